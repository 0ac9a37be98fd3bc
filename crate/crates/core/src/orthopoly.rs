//! Classical and exceptional (X_m) Laguerre polynomials.
//!
//! The X_m-Laguerre polynomial of degree `nu` is the polynomial solution of
//!
//! ```text
//! F'' + Q F' + R F = 0,
//! Q = [(α+1-g) - 2g L_{m-1}^{α}(-g)/L_m^{α-1}(-g)] / g,
//! R = [nu - 2α L_{m-1}^{α}(-g)/L_m^{α-1}(-g)] / g.
//! ```
//!
//! Multiplying through by `g L_m^{α-1}(-g)` gives an operator with polynomial
//! coefficients; the family member of degree `nu` spans its one-dimensional
//! kernel on polynomials of degree `<= nu`.

use nalgebra::DMatrix;
use num::{BigRational, One, Zero};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::poly::{Polynomial, Scalar};
use crate::quad::{self, QuadError, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrthoError {
    #[error("degree {nu} is below the codimension m = {m}; the X_m family starts at degree m")]
    BelowCodimension { nu: usize, m: usize },
    #[error("codimension m must be >= 1")]
    ZeroCodimension,
    #[error("alpha must be a finite real > 1 (got {0})")]
    InvalidAlpha(f64),
    #[error("nullspace of the X_m operator at degree {nu} has dimension {dim}, expected 1")]
    NullspaceDimension { nu: usize, dim: usize },
    #[error("floating nullspace residual {residual:e} exceeds {threshold:e}")]
    Residual { residual: f64, threshold: f64 },
    #[error("weight requires g > 0 (got {0})")]
    NonPositiveArgument(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Scale convention for X_m-Laguerre polynomials. The sign is always fixed
/// so that the leading coefficient is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// Unit leading coefficient.
    #[default]
    Monic,
    /// Leading coefficient `1 / (n! m!)` for degree `n + m`. This is the
    /// scale under which `‖L̂_{n+m,m}‖² = (n+m+α) Γ(n+α) / n!`.
    Standard,
}

/// Codimension, parameter and scale convention of an X_m-Laguerre family.
#[derive(Debug, Clone, PartialEq)]
pub struct XmFamily {
    m: usize,
    alpha: f64,
    alpha_exact: BigRational,
    convention: Convention,
}

impl XmFamily {
    pub fn new(m: usize, alpha: f64) -> Result<Self, OrthoError> {
        if m == 0 {
            return Err(OrthoError::ZeroCodimension);
        }
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(OrthoError::InvalidAlpha(alpha));
        }
        let alpha_exact = BigRational::from_float(alpha).ok_or(OrthoError::InvalidAlpha(alpha))?;
        Ok(Self {
            m,
            alpha,
            alpha_exact,
            convention: Convention::Monic,
        })
    }

    /// Family with an exactly specified rational parameter.
    pub fn with_rational_alpha(m: usize, alpha: BigRational) -> Result<Self, OrthoError> {
        let approx = alpha.to_f64();
        if m == 0 {
            return Err(OrthoError::ZeroCodimension);
        }
        if alpha <= BigRational::one() {
            return Err(OrthoError::InvalidAlpha(approx));
        }
        Ok(Self {
            m,
            alpha: approx,
            alpha_exact: alpha,
            convention: Convention::Monic,
        })
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alpha_exact(&self) -> &BigRational {
        &self.alpha_exact
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }
}

/// Generalized Laguerre polynomial `L_n^{(α)}` from the three-term recurrence.
pub fn classical_laguerre<T: Scalar>(n: usize, alpha: &T) -> Polynomial<T> {
    let one = T::one();
    let mut prev = Polynomial::constant(one.clone());
    if n == 0 {
        return prev;
    }
    let mut cur = Polynomial::from_coeffs(vec![one.clone() + alpha.clone(), -one]);
    for k in 1..n {
        let kk = T::from_i64(k as i64);
        let a = Polynomial::from_coeffs(vec![T::from_i64(2 * k as i64 + 1) + alpha.clone(), -T::one()]);
        let next = (&(&a * &cur) - &prev.scale(&(kk + alpha.clone()))).scale(&(T::one() / T::from_i64(k as i64 + 1)));
        prev = cur;
        cur = next;
    }
    cur
}

/// Value of `L_n^{(α)}(x)`; negative degrees evaluate to zero.
pub fn laguerre(n: i64, alpha: f64, x: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// The X_m operator with denominators cleared, applied to `p`:
///
/// `L_m^{α-1}(-g)·g·p'' + [(α+1-g) L_m^{α-1}(-g) - 2g L_{m-1}^{α}(-g)]·p' + [nu L_m^{α-1}(-g) - 2α L_{m-1}^{α}(-g)]·p`.
///
/// The zero polynomial certifies that `p` belongs to the family at degree `nu`.
pub fn xm_ode_residual<T: Scalar>(p: &Polynomial<T>, nu: usize, m: usize, alpha: &T) -> Polynomial<T> {
    let ops = XmOperator::new(m, alpha);
    ops.apply(p, nu)
}

struct XmOperator<T> {
    d_g: Polynomial<T>,
    first: Polynomial<T>,
    denom: Polynomial<T>,
    two_alpha_d1: Polynomial<T>,
}

impl<T: Scalar> XmOperator<T> {
    fn new(m: usize, alpha: &T) -> Self {
        let one = T::one();
        let denom = classical_laguerre(m, &(alpha.clone() - one.clone())).reflect();
        let d1 = if m == 0 {
            Polynomial::zero()
        } else {
            classical_laguerre(m - 1, alpha).reflect()
        };
        let g = Polynomial::monomial(1);
        let d_g = &denom * &g;
        let lin = Polynomial::from_coeffs(vec![alpha.clone() + one.clone(), -one]);
        let first = &(&lin * &denom) - &(&g * &d1).scale(&T::from_i64(2));
        let two_alpha_d1 = d1.scale(&(alpha.clone() * T::from_i64(2)));
        Self {
            d_g,
            first,
            denom,
            two_alpha_d1,
        }
    }

    fn apply(&self, p: &Polynomial<T>, nu: usize) -> Polynomial<T> {
        let dp = p.derivative();
        let ddp = dp.derivative();
        let zeroth = &self.denom.scale(&T::from_i64(nu as i64)) - &self.two_alpha_d1;
        &(&(&self.d_g * &ddp) + &(&self.first * &dp)) + &(&zeroth * p)
    }

    /// Column `j` holds the coefficients of the operator applied to `g^j`.
    fn matrix(&self, nu: usize, m: usize) -> Vec<Vec<T>> {
        let rows = nu + m + 1;
        let mut a = vec![vec![T::zero(); nu + 1]; rows];
        for j in 0..=nu {
            let col = self.apply(&Polynomial::monomial(j), nu);
            for (row, c) in a.iter_mut().zip(col.coeffs()) {
                row[j] = c.clone();
            }
        }
        a
    }
}

fn factorial_exact(n: usize) -> BigRational {
    (1..=n as i64).fold(BigRational::one(), |acc, k| acc * BigRational::from_integer(k.into()))
}

fn normalize_exact(p: Polynomial<BigRational>, nu: usize, m: usize, convention: Convention) -> Polynomial<BigRational> {
    let lead = p.leading_coeff().cloned().expect("nonzero null vector");
    let target = match convention {
        Convention::Monic => BigRational::one(),
        Convention::Standard => BigRational::one() / (factorial_exact(nu - m) * factorial_exact(m)),
    };
    p.scale(&(target / lead))
}

/// Exact X_m-Laguerre polynomial of degree `nu` for rational `alpha`.
pub fn xm_laguerre_exact(
    nu: usize,
    m: usize,
    alpha: &BigRational,
    convention: Convention,
) -> Result<Polynomial<BigRational>, OrthoError> {
    if m == 0 {
        return Err(OrthoError::ZeroCodimension);
    }
    if nu < m {
        return Err(OrthoError::BelowCodimension { nu, m });
    }
    let mut a = XmOperator::new(m, alpha).matrix(nu, m);
    let cols = nu + 1;
    let rows = a.len();

    // Reduced row echelon form.
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = BigRational::one() / a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (v, p) in a[i].iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return Err(OrthoError::NullspaceDimension { nu, dim: free.len() });
    }
    let f = free[0];
    let mut v = vec![BigRational::zero(); cols];
    v[f] = BigRational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -a[row][f].clone();
    }
    let p = Polynomial::from_coeffs(v);
    Ok(normalize_exact(p, nu, m, convention))
}

/// X_m-Laguerre polynomial of degree `nu` with double-precision coefficients,
/// constructed in exact arithmetic and rounded once at the end.
pub fn xm_laguerre(nu: usize, family: &XmFamily) -> Result<Polynomial<f64>, OrthoError> {
    xm_laguerre_exact(nu, family.m, &family.alpha_exact, family.convention).map(|p| p.to_f64())
}

/// Singular values below this fraction of the largest count as zero.
pub const FLOAT_NULLSPACE_RTOL: f64 = 1e-12;
/// Relative residual accepted from the floating construction.
pub const FLOAT_RESIDUAL_TOL: f64 = 1e-10;

/// Floating-point construction through the SVD of the operator matrix.
pub fn xm_laguerre_float(nu: usize, family: &XmFamily) -> Result<Polynomial<f64>, OrthoError> {
    let m = family.m;
    if nu < m {
        return Err(OrthoError::BelowCodimension { nu, m });
    }
    let op = XmOperator::new(m, &family.alpha);
    let rows = op.matrix(nu, m);
    let a = DMatrix::from_fn(rows.len(), nu + 1, |i, j| rows[i][j]);
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sigma = &svd.singular_values;
    let smax = sigma.max();
    let dim = sigma.iter().filter(|&&s| s <= FLOAT_NULLSPACE_RTOL * smax).count();
    if dim != 1 {
        return Err(OrthoError::NullspaceDimension { nu, dim });
    }
    let imin = sigma.imin();
    let v: Vec<f64> = v_t.row(imin).iter().copied().collect();
    let lead = v[nu];
    let target = match family.convention {
        Convention::Monic => 1.0,
        Convention::Standard => (-(ln_gamma((nu - m + 1) as f64) + ln_gamma((m + 1) as f64))).exp(),
    };
    let p = Polynomial::from_coeffs(v.iter().map(|c| c * target / lead).collect());

    let res = op.apply(&p, nu);
    let res_norm = res.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt();
    let p_norm = p.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt();
    let scale = a.norm() * p_norm;
    let residual = res_norm / scale;
    if residual > FLOAT_RESIDUAL_TOL {
        return Err(OrthoError::Residual {
            residual,
            threshold: FLOAT_RESIDUAL_TOL,
        });
    }
    Ok(p)
}

/// Orthogonality weight `g^α e^{-g} / L_m^{α-1}(-g)²`.
pub fn xm_weight(family: &XmFamily, g: f64) -> Result<f64, OrthoError> {
    if g.is_nan() || g <= 0.0 {
        return Err(OrthoError::NonPositiveArgument(g));
    }
    Ok(weight_unchecked(family.m, family.alpha, g))
}

fn weight_unchecked(m: usize, alpha: f64, g: f64) -> f64 {
    let d = laguerre(m as i64, alpha - 1.0, -g);
    (alpha * g.ln() - g - 2.0 * d.ln()).exp()
}

/// Relative accuracy requested from [`xm_inner_product`].
pub const INNER_PRODUCT_TOL: Tolerance = Tolerance::new(1e-9, 1e-14);

/// `∫_0^∞ L̂_{nu1} L̂_{nu2} W dg` by adaptive quadrature.
pub fn xm_inner_product(nu1: usize, nu2: usize, family: &XmFamily) -> Result<f64, OrthoError> {
    let p1 = xm_laguerre(nu1, family)?;
    let p2 = xm_laguerre(nu2, family)?;
    let (m, alpha) = (family.m, family.alpha);
    let integrand = |g: f64| {
        if g <= 0.0 {
            return 0.0;
        }
        p1.eval_f64(g) * p2.eval_f64(g) * weight_unchecked(m, alpha, g)
    };
    Ok(quad::integrate_semi_infinite(integrand, INNER_PRODUCT_TOL)?.value)
}

/// Closed-form squared norm `(n+m+α) Γ(n+α) / n!` of the degree `n+m` member
/// under [`Convention::Standard`].
pub fn standard_norm_squared(n: usize, family: &XmFamily) -> f64 {
    let a = family.alpha;
    let lg = ln_gamma(n as f64 + a) - ln_gamma(n as f64 + 1.0);
    (n as f64 + family.m as f64 + a) * lg.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn laguerre_base_cases() {
        for a in [0.5, 2.0, 7.25] {
            assert_eq!(classical_laguerre(0, &a), Polynomial::constant(1.0));
        }
        // L_1^{(2)} = 3 - x
        assert_eq!(
            classical_laguerre(1, &q(2, 1)),
            Polynomial::from_coeffs(vec![q(3, 1), q(-1, 1)])
        );
    }

    #[test]
    fn laguerre_two_at_minus_one() {
        // x²/2 - (α+2)x + (α+1)(α+2)/2 at x = -1, α = 2
        let closed = |x: f64, a: f64| x * x / 2.0 - (a + 2.0) * x + (a + 1.0) * (a + 2.0) / 2.0;
        assert_eq!(closed(-1.0, 2.0), 10.5);
        assert_eq!(classical_laguerre(2, &q(2, 1)).eval(&q(-1, 1)), q(21, 2));
        assert_relative_eq!(laguerre(2, 2.0, -1.0), 10.5, max_relative = 1e-15);
        assert_relative_eq!(classical_laguerre(2, &2.0).eval_f64(-1.0), 10.5, max_relative = 1e-15);
    }

    #[test]
    fn value_recurrence_matches_polynomial() {
        for n in 0..8 {
            let p = classical_laguerre(n, &1.5);
            for x in [-3.0, -0.2, 0.0, 1.7, 6.0] {
                assert_relative_eq!(
                    laguerre(n as i64, 1.5, x),
                    p.eval_f64(x),
                    epsilon = 1e-11,
                    max_relative = 1e-12
                );
            }
        }
        assert_eq!(laguerre(-1, 2.0, 3.0), 0.0);
    }

    #[test]
    fn x1_degree_one_is_g_plus_alpha_plus_one() {
        let p = xm_laguerre_exact(1, 1, &q(2, 1), Convention::Monic).unwrap();
        assert_eq!(p, Polynomial::from_coeffs(vec![q(3, 1), q(1, 1)]));
        let a = q(7, 3);
        let p = xm_laguerre_exact(1, 1, &a, Convention::Monic).unwrap();
        assert_eq!(p, Polynomial::from_coeffs(vec![a + q(1, 1), q(1, 1)]));
    }

    #[test]
    fn below_codimension_is_rejected() {
        let err = xm_laguerre_exact(0, 1, &q(2, 1), Convention::Monic).unwrap_err();
        assert_eq!(err, OrthoError::BelowCodimension { nu: 0, m: 1 });
    }

    #[test]
    fn residual_of_non_member_is_nonzero() {
        let one = Polynomial::constant(q(1, 1));
        assert!(!xm_ode_residual(&one, 0, 1, &q(2, 1)).is_zero());
        assert!(xm_ode_residual(&Polynomial::<BigRational>::zero(), 3, 2, &q(2, 1)).is_zero());
    }

    #[test]
    fn ground_member_is_reflected_laguerre() {
        // degree-m member ∝ L_m^{α}(-g)
        for m in 1..=4 {
            let a = q(5, 2);
            let p = xm_laguerre_exact(m, m, &a, Convention::Monic).unwrap();
            let l = classical_laguerre(m, &a).reflect();
            let lead = l.leading_coeff().unwrap().clone();
            assert_eq!(p, l.scale(&(q(1, 1) / lead)));
        }
    }

    #[test]
    fn standard_convention_leading_coefficient() {
        let p = xm_laguerre_exact(5, 2, &q(2, 1), Convention::Standard).unwrap();
        assert_eq!(p.leading_coeff().unwrap(), &q(1, 12));
    }

    #[test]
    fn weight_values() {
        let f1 = XmFamily::new(1, 2.0).unwrap();
        assert_relative_eq!(
            xm_weight(&f1, 1.0).unwrap(),
            (-1.0f64).exp() / 9.0,
            max_relative = 1e-14
        );
        assert!(xm_weight(&f1, 1e-200).unwrap() < 1e-300);
        assert!(xm_weight(&f1, 0.0).is_err());
        assert!(xm_weight(&f1, -1.0).is_err());

        // L_2^{1}(x) = x²/2 - 3x + 3, so L_2^{1}(-1) = 6.5
        let d = laguerre(2, 1.0, -1.0);
        assert_relative_eq!(d, 6.5, max_relative = 1e-15);
        let f2 = XmFamily::new(2, 2.0).unwrap();
        assert_relative_eq!(
            xm_weight(&f2, 1.0).unwrap(),
            (-1.0f64).exp() / 42.25,
            max_relative = 1e-14
        );
    }

    #[test]
    fn family_validation() {
        assert_eq!(XmFamily::new(0, 2.0).unwrap_err(), OrthoError::ZeroCodimension);
        assert!(matches!(XmFamily::new(1, 1.0), Err(OrthoError::InvalidAlpha(_))));
        assert!(matches!(XmFamily::new(1, f64::NAN), Err(OrthoError::InvalidAlpha(_))));
    }

    #[test]
    fn float_fallback_matches_exact() {
        for m in 1..=3 {
            let fam = XmFamily::new(m, 1.5).unwrap();
            for nu in m..m + 5 {
                let exact = xm_laguerre(nu, &fam).unwrap();
                let float = xm_laguerre_float(nu, &fam).unwrap();
                assert_eq!(exact.degree(), float.degree());
                for (a, b) in exact.coeffs().iter().zip(float.coeffs()) {
                    assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "m={m} nu={nu}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn float_fallback_rejects_below_codimension() {
        let fam = XmFamily::new(2, 2.0).unwrap();
        assert!(matches!(
            xm_laguerre_float(1, &fam),
            Err(OrthoError::BelowCodimension { nu: 1, m: 2 })
        ));
    }
}
