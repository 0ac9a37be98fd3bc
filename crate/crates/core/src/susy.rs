//! Supersymmetric structure: superpotentials, ladder operators and partners.
//!
//! With `u = 1/√M` the ladder operators are `A = u d/dx + W` and
//! `A† = -d/dx u + W`, so that `H - E_0 = A†A` and the partner Hamiltonian
//! is `AA† + E_0` with potential `V^p = V + 2uW' - u u''`.

use num::BigRational;
use thiserror::Error;

use crate::models::{BoundState, GWindow, LaguerreBlock, ModelError, ModelKind};
use crate::orthopoly::laguerre;
use crate::solver::{Grid, Problem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SusyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("finite-difference stencils need at least 5 samples (got {0})")]
    TooFewPoints(usize),
    #[error("grid spacing must be positive and finite (got {0})")]
    BadSpacing(f64),
}

/// Laguerre ratios entering `W` and its derivative, evaluated at `-g`.
struct Ratios {
    /// `L_{m-1}^{α}/L_m^{α-1}`
    r1: f64,
    /// `L_{m-1}^{α+1}/L_m^{α}`
    r2: f64,
    dr1: f64,
    dr2: f64,
}

impl Ratios {
    fn new(m: usize, alpha: f64, g: f64) -> Result<Self, ModelError> {
        let lb = LaguerreBlock::new(m, alpha, g)?;
        let m = m as i64;
        let den2 = laguerre(m, alpha, -g);
        if !(den2.is_finite() && den2 > 0.0) {
            return Err(ModelError::Denominator { g, value: den2 });
        }
        let r1 = lb.d1 / lb.d;
        let r2 = laguerre(m - 1, alpha + 1.0, -g) / den2;
        Ok(Self {
            r1,
            r2,
            dr1: lb.d2 / lb.d - r1 * r1,
            dr2: laguerre(m - 2, alpha + 2.0, -g) / den2 - r2 * r2,
        })
    }
}

/// `(u, u', u'')` for `u = 1/√M`.
pub fn inverse_sqrt_mass(model: &ModelKind, x: f64) -> Result<[f64; 3], ModelError> {
    model.check_domain(x)?;
    Ok(match model {
        ModelKind::Case1(p) => {
            let b = p.b();
            let u = (0.5 * b * x).exp();
            [u, 0.5 * b * u, 0.25 * b * b * u]
        }
        ModelKind::Case2(p) => {
            let l = p.l() as f64;
            let eta = p.eta() as i32;
            let e = eta as f64;
            [
                x.powi(-eta) / l,
                -e * x.powi(-eta - 1) / l,
                e * (e + 1.0) * x.powi(-eta - 2) / l,
            ]
        }
    })
}

/// Closed-form superpotential:
///
/// ```text
/// W^I  = (b/2)[(1+α)e^{bx/2} - e^{-bx/2}(1 + 2(L_{m-1}^α/L_m^{α-1} - L_{m-1}^{α+1}/L_m^α))]
/// W^II = [1/2 - (L_{m-1}^{α+1}/L_m^α - L_{m-1}^α/L_m^{α-1})] x^{l/2} + (1 - l(α+1))/(2l) x^{-l/2}
/// ```
pub fn superpotential(model: &ModelKind, x: f64) -> Result<f64, ModelError> {
    Ok(superpotential_and_derivative(model, x)?.0)
}

/// `dW/dx`, analytic.
pub fn superpotential_derivative(model: &ModelKind, x: f64) -> Result<f64, ModelError> {
    Ok(superpotential_and_derivative(model, x)?.1)
}

fn superpotential_and_derivative(model: &ModelKind, x: f64) -> Result<(f64, f64), ModelError> {
    let [g, g1, _, _] = model.g_derivatives(x)?;
    let alpha = model.alpha();
    let r = Ratios::new(model.m(), alpha, g)?;
    let s = r.r1 - r.r2;
    let ds = (r.dr1 - r.dr2) * g1;
    Ok(match model {
        ModelKind::Case1(p) => {
            let b = p.b();
            let up = (0.5 * b * x).exp();
            let um = g.sqrt();
            let w = 0.5 * b * ((1.0 + alpha) * up - um * (1.0 + 2.0 * s));
            let dw = 0.5 * b * ((1.0 + alpha) * 0.5 * b * up + 0.5 * b * um * (1.0 + 2.0 * s) - um * 2.0 * ds);
            (w, dw)
        }
        ModelKind::Case2(p) => {
            let l = p.l() as f64;
            let a = 0.5 + s;
            let c = (1.0 - l * (alpha + 1.0)) / (2.0 * l);
            let xp = x.powf(0.5 * l);
            let xm = 1.0 / xp;
            let w = a * xp + c * xm;
            let dw = ds * xp + a * 0.5 * l * xp / x - c * 0.5 * l * xm / x;
            (w, dw)
        }
    })
}

/// `W = -(1/√M) ψ_0'/ψ_0` from the analytic ground state, with the
/// log-derivative taken by fourth-order central differences.
#[derive(Debug, Clone)]
pub struct GroundStateSuperpotential {
    ground: BoundState,
}

impl GroundStateSuperpotential {
    pub fn new(model: &ModelKind) -> Result<Self, ModelError> {
        Ok(Self {
            ground: BoundState::new(*model, 0)?,
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64, ModelError> {
        let model = self.ground.model();
        model.check_domain(x)?;
        let h = match model {
            ModelKind::Case1(p) => 1e-3 / p.b(),
            ModelKind::Case2(_) => 1e-3 * x.min(1.0),
        };
        let f = |t: f64| -> Result<f64, ModelError> {
            let (s, l) = self.ground.ln_abs(t)?;
            if s == 0.0 {
                Err(ModelError::Node(t))
            } else {
                Ok(l)
            }
        };
        let d = (f(x - 2.0 * h)? - 8.0 * f(x - h)? + 8.0 * f(x + h)? - f(x + 2.0 * h)?) / (12.0 * h);
        let [u, _, _] = inverse_sqrt_mass(model, x)?;
        Ok(-u * d)
    }
}

pub fn superpotential_from_groundstate(model: &ModelKind, x: f64) -> Result<f64, ModelError> {
    GroundStateSuperpotential::new(model)?.eval(x)
}

/// `δ = V_c - V_c^{susy}(α)`, the ground energy of the model.
pub fn susy_offset(model: &ModelKind) -> f64 {
    model.vc() - model.susy_vc()
}

/// `E_0` under the SUSY preset, evaluated in rational arithmetic from the
/// exact binary values of `b` and `α`:
/// `s((α+1)/2 + m/α) - s(2m+α+α²)/(2α)` with `s = b²` or `1`.
pub fn susy_ground_energy_exact(model: &ModelKind) -> BigRational {
    let q = |v: f64| BigRational::from_float(v).expect("finite parameter");
    let int = |v: i64| BigRational::from_integer(v.into());
    let a = q(model.alpha());
    let m = int(model.m() as i64);
    let s = match model {
        ModelKind::Case1(p) => q(p.b()) * q(p.b()),
        ModelKind::Case2(_) => int(1),
    };
    let level = (a.clone() + int(1)) / int(2) + m.clone() / a.clone();
    let vc = -(s.clone() * (int(2) * m + a.clone() + a.clone() * a.clone())) / (int(2) * a);
    s * level + vc
}

/// Additive constant in the shape-invariance relation: `b²` or `1`.
pub fn shape_shift(model: &ModelKind) -> f64 {
    model.spacing()
}

/// The model with `α -> α+1` and the same ground offset `δ`.
pub fn shifted_model(model: &ModelKind) -> Result<ModelKind, ModelError> {
    let up = model.with_alpha(model.alpha() + 1.0)?;
    Ok(up.with_vc(up.susy_vc() + susy_offset(model)))
}

/// Closed-form partner potential:
///
/// ```text
/// Case 1: b²[α(α+2)e^{bx}/4 + g/4 + g B(g; α+1)] - b²(α/2 + m/(α+1))
/// Case 2: (α(α+2)x^{-l} + x^l)/4 + x^l B(g; α+1) + (2l-1)/(4l²) x^{-l} - (α/2 + m/(α+1))
/// ```
///
/// with `B(g; a) = 2(D1/D)² - D2/D + E1/(aD) + D1/D - E1/D` built from
/// `D = L_m^{a-1}(-g)`, plus the ground offset `δ`.
pub fn partner_potential(model: &ModelKind, x: f64) -> Result<f64, ModelError> {
    model.check_domain(x)?;
    let alpha = model.alpha();
    let m = model.m();
    let g = model.g_map(x)?;
    let a1 = alpha + 1.0;
    let bracket = LaguerreBlock::new(m, a1, g)?.potential_bracket(a1);
    let constant = alpha / 2.0 + m as f64 / a1;
    let value = match model {
        ModelKind::Case1(p) => {
            let b2 = p.b() * p.b();
            b2 * (alpha * (alpha + 2.0) / (4.0 * g) + g / 4.0 + g * bracket) - b2 * constant
        }
        ModelKind::Case2(p) => {
            let l = p.l() as f64;
            let inv = 1.0 / g;
            (alpha * (alpha + 2.0) * inv + g) / 4.0 + g * bracket + (2.0 * l - 1.0) / (4.0 * l * l) * inv - constant
        }
    };
    Ok(value + susy_offset(model))
}

/// Partner potential through the factorization, `V + 2uW' - u u''`.
pub fn partner_potential_factorized(model: &ModelKind, x: f64) -> Result<f64, ModelError> {
    let [u, _, u2] = inverse_sqrt_mass(model, x)?;
    let (_, dw) = superpotential_and_derivative(model, x)?;
    Ok(model.v_eff(x)? + 2.0 * u * dw - u * u2)
}

/// `V` rebuilt from the superpotential, `W² - (uW)' + E_0`.
pub fn potential_from_superpotential(model: &ModelKind, x: f64) -> Result<f64, ModelError> {
    let [u, u1, _] = inverse_sqrt_mass(model, x)?;
    let (w, dw) = superpotential_and_derivative(model, x)?;
    Ok(w * w - (u1 * w + u * dw) + susy_offset(model))
}

/// `V^p(x; α) - V(x; α+1) - shift`, with the ground offset held fixed.
pub fn shape_invariance_residual(model: &ModelKind, x: f64) -> Result<f64, ModelError> {
    let up = shifted_model(model)?;
    Ok(partner_potential(model, x)? - up.v_eff(x)? - shape_shift(model))
}

/// Same as [`shape_invariance_residual`] with `V^p` taken from
/// [`partner_potential_factorized`].
pub fn shape_invariance_residual_factorized(model: &ModelKind, x: f64) -> Result<f64, ModelError> {
    let up = shifted_model(model)?;
    Ok(partner_potential_factorized(model, x)? - up.v_eff(x)? - shape_shift(model))
}

/// Partner eigenstate `ψ_n^p`: the `n`-th state of the `α+1` model, i.e.
/// `g^{(α+2)/2} e^{-g/2} L̂_{n+m,m}^{α+1}(g) / L_m^α(-g)` times the PCT Jacobian factor.
pub fn partner_state(model: &ModelKind, n: usize) -> Result<BoundState, ModelError> {
    BoundState::new(shifted_model(model)?, n)
}

pub fn partner_wavefunction(model: &ModelKind, n: usize, x: f64) -> Result<f64, ModelError> {
    model.check_domain(x)?;
    partner_state(model, n)?.eval(x)
}

/// The partner Hamiltonian as a solver problem. Its levels are `E_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartnerModel {
    pub base: ModelKind,
}

impl PartnerModel {
    pub fn new(base: ModelKind) -> Self {
        Self { base }
    }

    pub fn shift(&self) -> f64 {
        shape_shift(&self.base)
    }
}

impl Problem for PartnerModel {
    fn mass(&self, x: f64) -> f64 {
        self.base.mass(x).unwrap_or(f64::NAN)
    }

    fn potential(&self, x: f64) -> f64 {
        partner_potential(&self.base, x).unwrap_or(f64::NAN)
    }

    fn interval(&self, k: usize) -> (f64, f64) {
        let alpha = self.base.alpha() + 1.0;
        self.base.x_interval(GWindow::for_spectrum(alpha, self.base.m(), k))
    }
}

/// Samples on the uniform nodes `lo + i h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub lo: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(lo: f64, h: f64, values: Vec<f64>) -> Self {
        Self { lo, h, values }
    }

    pub fn from_grid(grid: &Grid, values: Vec<f64>) -> Self {
        Self::new(grid.lo(), grid.spacing(), values)
    }

    pub fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_grid(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn x(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.h
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.lo, self.h, self.values.iter().map(|v| v * s).collect())
    }

    /// Rescaled to unit max-norm with the first antinode positive.
    pub fn unit_max(&self) -> Self {
        let mut out = self.scaled(1.0 / self.max_abs());
        crate::solver::fix_sign(&mut out.values);
        out
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Trapezoid-rule `∫ f g dx`.
    pub fn inner(&self, other: &Self) -> f64 {
        let n = self.values.len();
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        let ends = self.values[0] * other.values[0] + self.values[n - 1] * other.values[n - 1];
        self.h * (s - 0.5 * ends)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    fn check(&self) -> Result<(), SusyError> {
        if self.values.len() < 5 {
            return Err(SusyError::TooFewPoints(self.values.len()));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(SusyError::BadSpacing(self.h));
        }
        Ok(())
    }

    /// Fourth-order first derivative: central in the interior, one-sided
    /// five-point stencils at the two nodes nearest each end.
    pub fn derivative(&self) -> Result<Self, SusyError> {
        self.check()?;
        let v = &self.values;
        let n = v.len();
        let h = self.h;
        let fwd = |i: usize| {
            (-25.0 * v[i] + 48.0 * v[i + 1] - 36.0 * v[i + 2] + 16.0 * v[i + 3] - 3.0 * v[i + 4]) / (12.0 * h)
        };
        let bwd = |i: usize| {
            (25.0 * v[i] - 48.0 * v[i - 1] + 36.0 * v[i - 2] - 16.0 * v[i - 3] + 3.0 * v[i - 4]) / (12.0 * h)
        };
        let skew =
            |i: usize| (-3.0 * v[i - 1] - 10.0 * v[i] + 18.0 * v[i + 1] - 6.0 * v[i + 2] + v[i + 3]) / (12.0 * h);
        let skew_back =
            |i: usize| (3.0 * v[i + 1] + 10.0 * v[i] - 18.0 * v[i - 1] + 6.0 * v[i - 2] - v[i - 3]) / (12.0 * h);
        let out = (0..n)
            .map(|i| match i {
                0 => fwd(0),
                1 => skew(1),
                _ if i == n - 1 => bwd(i),
                _ if i == n - 2 => skew_back(i),
                _ => (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h),
            })
            .collect();
        Ok(Self::new(self.lo, h, out))
    }
}

fn coefficient_samples(model: &ModelKind, psi: &SampledFunction) -> Result<(Vec<f64>, Vec<f64>), SusyError> {
    let mut us = Vec::with_capacity(psi.len());
    let mut ws = Vec::with_capacity(psi.len());
    for i in 0..psi.len() {
        let x = psi.x(i);
        us.push(inverse_sqrt_mass(model, x)?[0]);
        ws.push(superpotential(model, x)?);
    }
    Ok((us, ws))
}

/// `Aψ = uψ' + Wψ`.
pub fn apply_a(model: &ModelKind, psi: &SampledFunction) -> Result<SampledFunction, SusyError> {
    let d = psi.derivative()?;
    let (us, ws) = coefficient_samples(model, psi)?;
    let values = (0..psi.len())
        .map(|i| us[i] * d.values[i] + ws[i] * psi.values[i])
        .collect();
    Ok(SampledFunction::new(psi.lo, psi.h, values))
}

/// `A†ψ = -(uψ)' + Wψ`.
pub fn apply_a_dagger(model: &ModelKind, psi: &SampledFunction) -> Result<SampledFunction, SusyError> {
    psi.check()?;
    let (us, ws) = coefficient_samples(model, psi)?;
    let u_psi = SampledFunction::new(psi.lo, psi.h, (0..psi.len()).map(|i| us[i] * psi.values[i]).collect());
    let d = u_psi.derivative()?;
    let values = (0..psi.len()).map(|i| -d.values[i] + ws[i] * psi.values[i]).collect();
    Ok(SampledFunction::new(psi.lo, psi.h, values))
}
