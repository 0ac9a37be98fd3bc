//! Symmetric tridiagonal eigenpairs: Sturm bisection and inverse iteration.

/// Count of eigenvalues strictly below `x` (Sturm sequence via LDLᵀ pivots).
pub(crate) fn sturm_count(diag: &[f64], off: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut d = diag[0] - x;
    if d.abs() < pivmin {
        d = -pivmin;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        d = diag[i] - x - off[i - 1] * off[i - 1] / d;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the spectrum.
pub(crate) fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// Infinity norm of the matrix.
pub(crate) fn norm_inf(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            diag[i].abs() + if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max)
}

pub(crate) fn pivmin(off: &[f64]) -> f64 {
    let bmax = off.iter().map(|b| b * b).fold(1.0f64, f64::max);
    f64::MIN_POSITIVE * bmax
}

/// The `j`-th smallest eigenvalue (0-based), bisected to working precision.
pub(crate) fn bisect(diag: &[f64], off: &[f64], j: usize, bounds: (f64, f64), pivmin: f64) -> f64 {
    let (mut lo, mut hi) = bounds;
    let width = (hi - lo).abs().max(hi.abs()).max(lo.abs());
    lo -= 2.0 * f64::EPSILON * width + pivmin;
    hi += 2.0 * f64::EPSILON * width + pivmin;
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            break;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin {
            break;
        }
        if sturm_count(diag, off, mid, pivmin) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// LU factorization of `T - σI` with partial pivoting.
struct Lu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl Lu {
    fn new(diag: &[f64], off: &[f64], sigma: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|a| a - sigma).collect();
        let mut du = off.to_vec();
        let mut dl = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            d,
            du,
            du2,
            dl,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.du2[i] * b[i + 2];
            }
            b[i] = s / self.d[i];
        }
    }
}

pub(crate) fn residual(diag: &[f64], off: &[f64], lambda: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    let mut s = 0.0;
    for i in 0..n {
        let mut r = (diag[i] - lambda) * v[i];
        if i > 0 {
            r += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += off[i] * v[i + 1];
        }
        s += r * r;
    }
    s.sqrt()
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

pub(crate) struct InverseIteration {
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Inverse iteration for the eigenvector of `lambda`, kept orthogonal to
/// `previous` (unit vectors) by Gram–Schmidt.
pub(crate) fn inverse_iteration(
    diag: &[f64],
    off: &[f64],
    lambda: f64,
    previous: &[Vec<f64>],
    target: f64,
    max_iter: usize,
) -> InverseIteration {
    let n = diag.len();
    let scale = norm_inf(diag, off).max(f64::MIN_POSITIVE);
    let lu = Lu::new(diag, off, lambda, f64::EPSILON * scale);
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.25 * ((i as f64) * 0.618_033_988_749_895).sin())
        .collect();
    normalize(&mut v);
    let mut res = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        lu.solve(&mut v);
        for p in previous {
            let dot: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (x, q) in v.iter_mut().zip(p) {
                *x -= dot * q;
            }
        }
        normalize(&mut v);
        res = residual(diag, off, lambda, &v);
        if res <= target && it >= 2 {
            break;
        }
    }
    InverseIteration {
        vector: v,
        residual: res,
        iterations: it,
    }
}
