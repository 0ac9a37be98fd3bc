//! Point canonical transformation between the PDM equation and the X_m ODE.

use super::{LaguerreBlock, ModelError, ModelKind};

/// `Q(g)`, `dQ/dg` and `R(g)` of the X_m-Laguerre equation with parameter `p`.
pub(crate) fn ode_coefficients(lb: &LaguerreBlock, alpha: f64, p: f64, g: f64) -> (f64, f64, f64) {
    let r1 = lb.d1 / lb.d;
    let q = (alpha + 1.0 - g) / g - 2.0 * r1;
    let dq = -(alpha + 1.0) / (g * g) - 2.0 * (lb.d2 / lb.d - r1 * r1);
    let r = (p - 2.0 * alpha * r1) / g;
    (q, dq, r)
}

/// Logarithm of the prefactor `f = √(M/|g'|) exp(½∫Q dg)` with
/// `∫Q dg = (α+1) ln g - g - 2 ln L_m^{α-1}(-g)`.
pub(crate) fn ln_prefactor(model: &ModelKind, x: f64) -> Result<f64, ModelError> {
    let alpha = model.alpha();
    let g = model.g_unchecked(x);
    let lb = LaguerreBlock::new(model.m(), alpha, g)?;
    let ln_jac = match model {
        ModelKind::Case1(p) => -p.b().ln(),
        ModelKind::Case2(p) => (p.l() as f64).ln() - x.ln(),
    };
    Ok(0.5 * ln_jac + 0.5 * ((alpha + 1.0) * g.ln() - g) - lb.d.ln())
}

/// The PCT prefactor `f(x)`, so that `ψ_n = f · L̂_{n+m,m}(g(x))` up to scale.
pub fn pct_prefactor(model: &ModelKind, x: f64) -> Result<f64, ModelError> {
    model.check_domain(x)?;
    Ok(ln_prefactor(model, x)?.exp())
}

/// `[E_n - V_eff(x)]` minus the right-hand side of the master relation
///
/// ```text
/// g'''/(2Mg') - (3/(4M))(g''/g')² + (g'²/M)(R - Q_g/2 - Q²/4) - M''/(2M²) + 3M'²/(4M³)
/// ```
///
/// with ODE parameter `n + m`. Vanishes identically for a consistent model.
pub fn pct_master_residual(model: &ModelKind, n: usize, x: f64) -> Result<f64, ModelError> {
    let [_, g1, g2, g3] = model.g_derivatives(x)?;
    let [mm, m1, m2] = model.mass_derivatives(x)?;
    let alpha = model.alpha();
    let g = model.g_unchecked(x);
    let lb = LaguerreBlock::new(model.m(), alpha, g)?;
    let (q, dq, r) = ode_coefficients(&lb, alpha, (n + model.m()) as f64, g);
    let rhs = g3 / (2.0 * mm * g1) - 3.0 / (4.0 * mm) * (g2 / g1).powi(2)
        + g1 * g1 / mm * (r - 0.5 * dq - 0.25 * q * q)
        - m2 / (2.0 * mm * mm)
        + 3.0 * m1 * m1 / (4.0 * mm * mm * mm);
    Ok(model.energy(n) - model.v_eff(x)? - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scale(model: &ModelKind) -> f64 {
        model.spacing().max(1.0)
    }

    #[test]
    fn master_identity_examples() {
        let c1 = ModelKind::case1(1.0, 2.0, 1, 0.0).unwrap();
        assert!(pct_master_residual(&c1, 0, 0.5).unwrap().abs() < 1e-9);
        let c2 = ModelKind::case2(1, 2.0, 2, 0.0).unwrap();
        assert!(pct_master_residual(&c2, 1, 1.3).unwrap().abs() < 1e-9);
    }

    #[test]
    fn master_identity_over_domains() {
        let mut models = Vec::new();
        for m in 1..=3 {
            models.push(ModelKind::case1(1.0, 2.0, m, 0.0).unwrap());
            models.push(ModelKind::case1(0.7, 1.5, m, 0.3).unwrap());
            for eta in 0..3 {
                models.push(ModelKind::case2(eta, 2.0, m, 0.0).unwrap());
            }
        }
        for model in &models {
            for n in 0..=3 {
                for i in 0..50 {
                    let x = match model {
                        ModelKind::Case1(_) => -2.0 + 4.0 * i as f64 / 49.0,
                        ModelKind::Case2(_) => 0.3 + 1.5 * i as f64 / 49.0,
                    };
                    let r = pct_master_residual(model, n, x).unwrap();
                    let v = model.v_eff(x).unwrap().abs() + model.energy(n).abs();
                    assert!(r.abs() < 1e-9 * scale(model) * v.max(1.0), "{model:?} n={n} x={x}: {r}");
                }
            }
        }
    }

    #[test]
    fn wrong_parameter_breaks_identity() {
        let c1 = ModelKind::case1(1.0, 2.0, 2, 0.0).unwrap();
        let [_, g1, g2, g3] = c1.g_derivatives(0.2).unwrap();
        let [mm, m1, m2] = c1.mass_derivatives(0.2).unwrap();
        let g = c1.g_map(0.2).unwrap();
        let lb = LaguerreBlock::new(2, 2.0, g).unwrap();
        // parameter n instead of n + m
        let (q, dq, r) = ode_coefficients(&lb, 2.0, 1.0, g);
        let rhs = g3 / (2.0 * mm * g1) - 3.0 / (4.0 * mm) * (g2 / g1).powi(2)
            + g1 * g1 / mm * (r - 0.5 * dq - 0.25 * q * q)
            - m2 / (2.0 * mm * mm)
            + 3.0 * m1 * m1 / (4.0 * mm * mm * mm);
        assert!((c1.energy(1) - c1.v_eff(0.2).unwrap() - rhs).abs() > 0.1);
    }

    #[test]
    fn case1_prefactor_closed_form() {
        let (b, alpha, m) = (0.8, 2.0, 2);
        let model = ModelKind::case1(b, alpha, m, 0.0).unwrap();
        let closed = |x: f64| {
            let g = (-b * x).exp();
            (-(alpha + 1.0) * b * x / 2.0 - g / 2.0).exp() / crate::orthopoly::laguerre(m as i64, alpha - 1.0, -g)
        };
        let r0 = pct_prefactor(&model, 0.0).unwrap() / closed(0.0);
        for x in [-2.0, -0.5, 1.0, 3.0] {
            let r = pct_prefactor(&model, x).unwrap() / closed(x);
            assert!((r / r0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prefactor_positive() {
        let model = ModelKind::case2(2, 2.0, 3, 0.0).unwrap();
        for i in 1..100 {
            assert!(pct_prefactor(&model, 0.03 * i as f64).unwrap() > 0.0);
        }
        assert!(pct_prefactor(&model, 0.0).is_err());
    }
}
