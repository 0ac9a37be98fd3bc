//! Finite-difference oracle for `H = -d/dx (1/M) d/dx + V` with Dirichlet ends.
//!
//! The operator is discretized in flux form with `1/M` sampled at cell
//! midpoints, which keeps the matrix exactly symmetric. Eigenvalues come from
//! Sturm-sequence bisection, eigenvectors from inverse iteration.

mod tridiag;

use thiserror::Error;

use crate::models::{GWindow, ModelKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("grid needs lo < hi (finite) and npoints >= {min} (got [{lo}, {hi}] with {npoints} points)", min = Grid::MIN_POINTS)]
    InvalidGrid { lo: f64, hi: f64, npoints: usize },
    #[error("mass must be positive and finite; got {value} at x = {x}")]
    NonPositiveMass { x: f64, value: f64 },
    #[error("potential is not finite at x = {x}")]
    NonFinitePotential { x: f64 },
    #[error("requested {k} eigenpairs from a matrix of size {size}")]
    KOutOfRange { k: usize, size: usize },
    #[error("inverse iteration for eigenvalue {index} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        index: usize,
        iterations: usize,
        residual: f64,
    },
    #[error("{values} samples do not match a grid of {npoints} points")]
    LengthMismatch { values: usize, npoints: usize },
    #[error("convergence order needs at least 3 grids (level >= 2, got {0})")]
    InsufficientLevels(usize),
    #[error("eigenvalue differences are not monotonically shrinking: {0:?}")]
    NonMonotone(Vec<f64>),
}

/// Uniform grid on `[lo, hi]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    lo: f64,
    hi: f64,
    npoints: usize,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(lo: f64, hi: f64, npoints: usize) -> Result<Self, SolverError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi && npoints >= Self::MIN_POINTS) {
            return Err(SolverError::InvalidGrid { lo, hi, npoints });
        }
        Ok(Self { lo, hi, npoints })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn npoints(&self) -> usize {
        self.npoints
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.npoints - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.npoints {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.npoints).map(|i| self.x(i)).collect()
    }

    /// The grid with half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            npoints: 2 * (self.npoints - 1) + 1,
            ..*self
        }
    }
}

/// Mass profile, potential and default truncation of a 1D problem.
pub trait Problem {
    fn mass(&self, x: f64) -> f64;
    fn potential(&self, x: f64) -> f64;
    /// Interval holding the lowest `k` states.
    fn interval(&self, k: usize) -> (f64, f64);
}

impl Problem for ModelKind {
    fn mass(&self, x: f64) -> f64 {
        ModelKind::mass(self, x).unwrap_or(f64::NAN)
    }

    fn potential(&self, x: f64) -> f64 {
        self.v_eff(x).unwrap_or(f64::NAN)
    }

    fn interval(&self, k: usize) -> (f64, f64) {
        self.x_interval(GWindow::for_spectrum(self.alpha(), self.m(), k.saturating_sub(1)))
    }
}

/// A problem given by closures and a fixed interval.
pub struct FnProblem<M, V> {
    pub mass: M,
    pub potential: V,
    pub lo: f64,
    pub hi: f64,
}

impl<M: Fn(f64) -> f64, V: Fn(f64) -> f64> Problem for FnProblem<M, V> {
    fn mass(&self, x: f64) -> f64 {
        (self.mass)(x)
    }

    fn potential(&self, x: f64) -> f64 {
        (self.potential)(x)
    }

    fn interval(&self, _k: usize) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// Wraps a problem and adds a constant to its potential.
pub struct Shifted<'a, P: ?Sized> {
    pub inner: &'a P,
    pub shift: f64,
}

impl<P: Problem + ?Sized> Problem for Shifted<'_, P> {
    fn mass(&self, x: f64) -> f64 {
        self.inner.mass(x)
    }

    fn potential(&self, x: f64) -> f64 {
        self.inner.potential(x) + self.shift
    }

    fn interval(&self, k: usize) -> (f64, f64) {
        self.inner.interval(k)
    }
}

/// Symmetric tridiagonal matrix on the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedOperator {
    grid: Grid,
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl DiscretizedOperator {
    /// Wraps an arbitrary symmetric tridiagonal matrix; `off` has one entry
    /// fewer than `diag`. The attached grid has unit spacing.
    pub fn from_parts(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty() && diag.len() == off.len() + 1);
        let npoints = diag.len() + 2;
        let grid = Grid {
            lo: 0.0,
            hi: (npoints - 1) as f64,
            npoints,
        };
        Self { grid, diag, off }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `H[i][i+1] = H[i+1][i]`.
    pub fn off_diagonal(&self) -> &[f64] {
        &self.off
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn norm_inf(&self) -> f64 {
        tridiag::norm_inf(&self.diag, &self.off)
    }

    /// `H v` for interior samples `v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut r = self.diag[i] * v[i];
                if i > 0 {
                    r += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    r += self.off[i] * v[i + 1];
                }
                r
            })
            .collect()
    }
}

/// Flux-form discretization:
/// `(Hv)_i = -[a_{i+½}(v_{i+1} - v_i) - a_{i-½}(v_i - v_{i-1})]/h² + V_i v_i`, `a = 1/M`.
pub fn discretize<P: Problem + ?Sized>(problem: &P, grid: Grid) -> Result<DiscretizedOperator, SolverError> {
    let n = grid.npoints();
    let h = grid.spacing();
    let h2 = h * h;
    let a: Vec<f64> = (0..n - 1)
        .map(|i| {
            let x = grid.x(i) + 0.5 * h;
            let m = problem.mass(x);
            if m.is_finite() && m > 0.0 {
                Ok(1.0 / m)
            } else {
                Err(SolverError::NonPositiveMass { x, value: m })
            }
        })
        .collect::<Result<_, _>>()?;
    let mut diag = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        let x = grid.x(i);
        let v = problem.potential(x);
        if !v.is_finite() {
            return Err(SolverError::NonFinitePotential { x });
        }
        diag.push((a[i - 1] + a[i]) / h2 + v);
    }
    let off = (1..n - 2).map(|i| -a[i] / h2).collect();
    Ok(DiscretizedOperator { grid, diag, off })
}

/// Relative residual `‖Hv - Ev‖₂ / ‖H‖_∞` accepted from inverse iteration.
pub const RESIDUAL_TOL: f64 = 1e-10;
const MAX_INVERSE_ITERATIONS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub grid: Grid,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Samples on all grid nodes (zero at both ends), `∫v² dx = 1` by Simpson,
    /// first antinode positive.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖Hv - Ev‖₂` for the unit-Euclidean interior vector.
    pub residuals: Vec<f64>,
    pub matrix_norm: f64,
}

/// The `k` smallest eigenpairs.
pub fn eigen_lowest(op: &DiscretizedOperator, k: usize) -> Result<SpectrumResult, SolverError> {
    let size = op.size();
    if k == 0 || k > size {
        return Err(SolverError::KOutOfRange { k, size });
    }
    let (diag, off) = (&op.diag, &op.off);
    let bounds = tridiag::gershgorin(diag, off);
    let pivmin = tridiag::pivmin(off);
    let norm = op.norm_inf();
    let target = 1e-3 * RESIDUAL_TOL * norm;
    let mut eigenvalues = Vec::with_capacity(k);
    let mut interior: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for j in 0..k {
        let lambda = tridiag::bisect(diag, off, j, bounds, pivmin);
        let inv = tridiag::inverse_iteration(diag, off, lambda, &interior, target, MAX_INVERSE_ITERATIONS);
        if inv.residual.is_nan() || inv.residual > RESIDUAL_TOL * norm {
            return Err(SolverError::NoConvergence {
                index: j,
                iterations: inv.iterations,
                residual: inv.residual,
            });
        }
        eigenvalues.push(lambda);
        residuals.push(inv.residual);
        interior.push(inv.vector);
    }
    let grid = op.grid;
    let eigenvectors = interior
        .into_iter()
        .map(|v| {
            let mut full = Vec::with_capacity(grid.npoints());
            full.push(0.0);
            full.extend(v);
            full.push(0.0);
            let norm = quadrature(&full.iter().map(|x| x * x).collect::<Vec<_>>(), &grid)
                .expect("lengths match")
                .sqrt();
            for x in full.iter_mut() {
                *x /= norm;
            }
            fix_sign(&mut full);
            full
        })
        .collect();
    Ok(SpectrumResult {
        grid,
        eigenvalues,
        eigenvectors,
        residuals,
        matrix_norm: norm,
    })
}

/// Flips `v` so that its first significant local extremum is positive.
pub fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let n = v.len();
    for i in 0..n {
        let left = if i > 0 { v[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { v[i + 1].abs() } else { 0.0 };
        if v[i].abs() >= 1e-3 * max && v[i].abs() >= left && v[i].abs() >= right {
            if v[i] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            return;
        }
    }
}

/// Points used by [`solve`] when no grid is supplied.
pub const AUTO_NPOINTS: usize = 4001;

/// Lowest `k` eigenpairs of `problem`, on `grid` or on the automatic
/// truncation with [`AUTO_NPOINTS`] points.
pub fn solve<P: Problem + ?Sized>(problem: &P, k: usize, grid: Option<Grid>) -> Result<SpectrumResult, SolverError> {
    let grid = match grid {
        Some(g) => g,
        None => {
            let (lo, hi) = problem.interval(k);
            Grid::new(lo, hi, AUTO_NPOINTS)?
        }
    };
    let size = grid.npoints() - 2;
    if k == 0 || k > size {
        return Err(SolverError::KOutOfRange { k, size });
    }
    eigen_lowest(&discretize(problem, grid)?, k)
}

pub fn solve_model(model: &ModelKind, k: usize, grid: Option<Grid>) -> Result<SpectrumResult, SolverError> {
    solve(model, k, grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub npoints: Vec<usize>,
    /// Lowest eigenvalue on each grid.
    pub eigenvalues: Vec<f64>,
    /// Observed order from each consecutive triple.
    pub orders: Vec<f64>,
}

/// Lowest eigenvalue on `base` and `level` successive halvings of its spacing.
pub fn convergence_study<P: Problem + ?Sized>(
    problem: &P,
    base: Grid,
    level: usize,
) -> Result<ConvergenceStudy, SolverError> {
    if level < 2 {
        return Err(SolverError::InsufficientLevels(level));
    }
    let mut grid = base;
    let mut npoints = Vec::new();
    let mut eigenvalues = Vec::new();
    for _ in 0..=level {
        npoints.push(grid.npoints());
        eigenvalues.push(solve(problem, 1, Some(grid))?.eigenvalues[0]);
        grid = grid.refined();
    }
    let diffs: Vec<f64> = eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    let monotone = diffs.windows(2).all(|d| d[0] * d[1] > 0.0 && d[1].abs() < d[0].abs());
    if !monotone {
        return Err(SolverError::NonMonotone(diffs));
    }
    let orders = diffs.windows(2).map(|d| (d[0] / d[1]).log2()).collect();
    Ok(ConvergenceStudy {
        npoints,
        eigenvalues,
        orders,
    })
}

/// Base grid size used by [`convergence_order`].
pub const CONVERGENCE_BASE_NPOINTS: usize = 1001;

/// Observed order of the lowest model eigenvalue from the finest Richardson
/// triple of `level` halvings of a [`CONVERGENCE_BASE_NPOINTS`] grid.
pub fn convergence_order<P: Problem + ?Sized>(problem: &P, level: usize) -> Result<f64, SolverError> {
    let (lo, hi) = problem.interval(1);
    let study = convergence_study(problem, Grid::new(lo, hi, CONVERGENCE_BASE_NPOINTS)?, level)?;
    Ok(*study.orders.last().expect("level >= 2 gives an order"))
}

/// Composite Simpson rule; the last interval uses the trapezoid rule when
/// the number of points is even.
pub fn quadrature(values: &[f64], grid: &Grid) -> Result<f64, SolverError> {
    let n = grid.npoints();
    if values.len() != n {
        return Err(SolverError::LengthMismatch {
            values: values.len(),
            npoints: n,
        });
    }
    let h = grid.spacing();
    let odd_end = if n % 2 == 1 { n } else { n - 1 };
    let mut s = 0.0;
    let mut i = 0;
    while i + 2 < odd_end {
        s += values[i] + 4.0 * values[i + 1] + values[i + 2];
        i += 2;
    }
    let mut total = s * h / 3.0;
    if odd_end < n {
        total += 0.5 * h * (values[n - 2] + values[n - 1]);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn laplacian() -> FnProblem<impl Fn(f64) -> f64, impl Fn(f64) -> f64> {
        FnProblem {
            mass: |_| 1.0,
            potential: |_| 0.0,
            lo: 0.0,
            hi: PI,
        }
    }

    fn oscillator() -> FnProblem<impl Fn(f64) -> f64, impl Fn(f64) -> f64> {
        FnProblem {
            mass: |_| 1.0,
            potential: |x| x * x,
            lo: -10.0,
            hi: 10.0,
        }
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 1.0, 15).is_err());
        assert!(Grid::new(1.0, 1.0, 100).is_err());
        let g = Grid::new(0.0, 1.0, 11).err();
        assert!(g.is_some());
        let g = Grid::new(-1.0, 1.0, 21).unwrap();
        assert_eq!(g.x(20), 1.0);
        assert!((g.spacing() - 0.1).abs() < 1e-15);
        assert_eq!(g.refined().npoints(), 41);
    }

    #[test]
    fn two_by_two() {
        let op = DiscretizedOperator::from_parts(vec![2.0, 2.0], vec![-1.0]);
        let r = eigen_lowest(&op, 2).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!(eigen_lowest(&op, 3).is_err());
        assert!(eigen_lowest(&op, 0).is_err());
    }

    #[test]
    fn dirichlet_laplacian() {
        let r = solve(&laplacian(), 4, Some(Grid::new(0.0, PI, 2000).unwrap())).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-4);
        for (n, e) in r.eigenvalues.iter().enumerate() {
            let exact = ((n + 1) * (n + 1)) as f64;
            assert!((e - exact).abs() < 1e-4 * exact, "{n}: {e}");
        }
    }

    #[test]
    fn operator_is_exactly_symmetric() {
        let op = discretize(&oscillator(), Grid::new(-10.0, 10.0, 101).unwrap()).unwrap();
        for i in 0..op.size() {
            for j in 0..op.size() {
                assert_eq!(op.entry(i, j), op.entry(j, i));
            }
        }
        assert!(op.off_diagonal().iter().all(|&b| b < 0.0));
    }

    #[test]
    fn harmonic_oscillator() {
        let r = solve(&oscillator(), 5, Some(Grid::new(-10.0, 10.0, 16001).unwrap())).unwrap();
        for (n, e) in r.eigenvalues.iter().enumerate() {
            assert!((e - (2 * n + 1) as f64).abs() < 1e-5, "{n}: {e}");
        }
        for &res in &r.residuals {
            assert!(res <= 1e-10 * r.matrix_norm);
        }
        for i in 0..5 {
            for j in 0..5 {
                let prod: Vec<f64> = r.eigenvectors[i]
                    .iter()
                    .zip(&r.eigenvectors[j])
                    .map(|(a, b)| a * b)
                    .collect();
                let ov = quadrature(&prod, &r.grid).unwrap();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((ov - target).abs() < 1e-8, "<{i}|{j}> = {ov}");
            }
        }
    }

    #[test]
    fn oscillator_convergence_order() {
        let p = convergence_order(&oscillator(), 2).unwrap();
        assert!((p - 2.0).abs() < 0.1, "{p}");
        assert_eq!(
            convergence_order(&oscillator(), 0),
            Err(SolverError::InsufficientLevels(0))
        );
    }

    #[test]
    fn model_spectra() {
        let c1 = ModelKind::case1(1.0, 2.0, 1, 0.0).unwrap();
        let r = solve_model(&c1, 3, None).unwrap();
        for (n, e) in r.eigenvalues.iter().enumerate() {
            let exact = c1.energy(n);
            assert!(((e - exact) / exact).abs() < 1e-4, "{n}: {e}");
        }
        let c2 = ModelKind::case2(1, 2.0, 2, 0.0).unwrap();
        let r = solve_model(&c2, 3, None).unwrap();
        for (n, e) in r.eigenvalues.iter().enumerate() {
            let exact = 2.5 + n as f64;
            assert!(((e - exact) / exact).abs() < 1e-3, "{n}: {e}");
        }
        let e0 = solve_model(&ModelKind::case2(0, 2.0, 2, 0.0).unwrap(), 3, None).unwrap();
        let e2 = solve_model(&ModelKind::case2(2, 2.0, 2, 0.0).unwrap(), 3, None).unwrap();
        for (a, b) in e0.eigenvalues.iter().zip(&e2.eigenvalues) {
            assert!((a - b).abs() < 2e-3);
        }
    }

    #[test]
    fn model_convergence_order() {
        let c1 = ModelKind::case1(1.0, 2.0, 1, 0.0).unwrap();
        let p = convergence_order(&c1, 2).unwrap();
        assert!((1.8..=2.2).contains(&p), "{p}");
    }

    #[test]
    fn discretize_rejects_bad_inputs() {
        let grid = Grid::new(0.0, 1.0, 20).unwrap();
        let bad_mass = FnProblem {
            mass: |x: f64| x - 0.5,
            potential: |_| 0.0,
            lo: 0.0,
            hi: 1.0,
        };
        assert!(matches!(
            discretize(&bad_mass, grid),
            Err(SolverError::NonPositiveMass { .. })
        ));
        let bad_pot = FnProblem {
            mass: |_| 1.0,
            potential: |x: f64| 1.0 / (x - grid.x(3)),
            lo: 0.0,
            hi: 1.0,
        };
        assert!(matches!(
            discretize(&bad_pot, grid),
            Err(SolverError::NonFinitePotential { .. })
        ));
    }

    #[test]
    fn simpson_rule() {
        for n in [16, 17, 100, 101] {
            let g = Grid::new(0.0, 1.0, n).unwrap();
            assert!((quadrature(&vec![1.0; n], &g).unwrap() - 1.0).abs() < 1e-14);
        }
        let g = Grid::new(0.0, PI, 1001).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|x| x.sin()).collect();
        assert!((quadrature(&v, &g).unwrap() - 2.0).abs() < 1e-8);
        assert!(matches!(
            quadrature(&v[..10], &g),
            Err(SolverError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn sign_convention() {
        let mut v = vec![0.0, -0.2, -1.0, -0.3, 0.5, 0.0];
        fix_sign(&mut v);
        assert_eq!(v[2], 1.0);
    }
}
