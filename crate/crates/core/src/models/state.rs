use crate::orthopoly::{xm_laguerre, Convention, XmFamily};
use crate::poly::Polynomial;
use crate::quad::{self, Tolerance};

use super::pct::ln_prefactor;
use super::{GWindow, LaguerreBlock, ModelError, ModelKind};

/// Accuracy of the normalization integral.
pub const NORM_TOL: Tolerance = Tolerance::new(1e-12, 0.0);
/// Accuracy of overlaps between unit-normalized states.
pub const OVERLAP_TOL: Tolerance = Tolerance::new(1e-12, 1e-13);

/// Analytic bound state `ψ_n = C f(x) L̂_{n+m,m}^α(g(x))`, with `C` fixed by
/// quadrature so that `∫ψ_n² dx = 1`.
///
/// Values are assembled in log space, so high levels far in the tails do not
/// overflow before the exponential is taken.
#[derive(Debug, Clone)]
pub struct BoundState {
    model: ModelKind,
    n: usize,
    poly: Polynomial<f64>,
    convention: Convention,
    raw_norm_sq: f64,
    ln_c: f64,
}

impl BoundState {
    pub fn new(model: ModelKind, n: usize) -> Result<Self, ModelError> {
        Self::with_convention(model, n, Convention::Monic)
    }

    pub fn with_convention(model: ModelKind, n: usize, convention: Convention) -> Result<Self, ModelError> {
        let m = model.m();
        let family = XmFamily::new(m, model.alpha())?.with_convention(convention);
        let poly = xm_laguerre(n + m, &family)?;
        let mut state = Self {
            model,
            n,
            poly,
            convention,
            raw_norm_sq: 1.0,
            ln_c: 0.0,
        };
        let window = GWindow::for_quadrature(model.alpha(), m, n);
        let alpha = model.alpha();
        let weighted = |g: f64| -> f64 {
            let Ok(lb) = LaguerreBlock::new(m, alpha, g) else {
                return f64::NAN;
            };
            let p = state.poly.eval_f64(g);
            if p == 0.0 {
                return 0.0;
            }
            (alpha * g.ln() - g - 2.0 * lb.d.ln() + 2.0 * p.abs().ln()).exp()
        };
        let j = quad::integrate_pieces(weighted, &g_breaks(window), NORM_TOL)?.value;
        let kappa = match model {
            ModelKind::Case1(p) => p.b() * p.b(),
            ModelKind::Case2(_) => 1.0,
        };
        state.raw_norm_sq = j;
        state.ln_c = 0.5 * (kappa.ln() - j.ln());
        Ok(state)
    }

    pub fn model(&self) -> &ModelKind {
        &self.model
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// `L̂_{n+m,m}^α` in the chosen convention.
    pub fn polynomial(&self) -> &Polynomial<f64> {
        &self.poly
    }

    /// `∫_0^∞ L̂² W dg` over the quadrature window.
    pub fn weighted_norm_sq(&self) -> f64 {
        self.raw_norm_sq
    }

    /// The constant `C` in `ψ = C f L̂`.
    pub fn scale(&self) -> f64 {
        self.ln_c.exp()
    }

    /// Numerically determined constant `N` for the closed form
    /// `ψ = N g^{(α+1)/2} e^{-g/2} L̂ / L_m^{α-1}(-g)` (times `x^{-1/2}` in Case 2).
    pub fn closed_form_norm(&self) -> f64 {
        let s = match self.model {
            ModelKind::Case1(p) => p.b(),
            ModelKind::Case2(p) => p.l() as f64,
        };
        (s / self.raw_norm_sq).sqrt()
    }

    /// `x` interval outside which `ψ²` is negligible.
    pub fn x_window(&self) -> (f64, f64) {
        self.model
            .x_interval(GWindow::for_quadrature(self.model.alpha(), self.model.m(), self.n))
    }

    /// `(sign, ln|ψ|)`; the sign is 0 exactly at a node.
    pub fn ln_abs(&self, x: f64) -> Result<(f64, f64), ModelError> {
        self.model.check_domain(x)?;
        let g = self.model.g_unchecked(x);
        let p = self.poly.eval_f64(g);
        if p == 0.0 {
            return Ok((0.0, f64::NEG_INFINITY));
        }
        Ok((p.signum(), self.ln_c + ln_prefactor(&self.model, x)? + p.abs().ln()))
    }

    pub fn eval(&self, x: f64) -> Result<f64, ModelError> {
        let (s, l) = self.ln_abs(x)?;
        Ok(if s == 0.0 { 0.0 } else { s * l.exp() })
    }

    pub fn density(&self, x: f64) -> Result<f64, ModelError> {
        let (s, l) = self.ln_abs(x)?;
        Ok(if s == 0.0 { 0.0 } else { (2.0 * l).exp() })
    }

    /// Samples on `xs`, mapping out-of-domain points to zero.
    pub fn sample(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x).unwrap_or(0.0)).collect()
    }

    /// `∫ψ_a ψ_b dx` for two states sharing the same change of variable
    /// (same case, `b` or `η`), computed in the `g` variable.
    pub fn overlap(&self, other: &BoundState) -> Result<f64, ModelError> {
        let model = self.model;
        let wa = GWindow::for_quadrature(model.alpha(), model.m(), self.n);
        let wb = GWindow::for_quadrature(other.model.alpha(), other.model.m(), other.n);
        let window = GWindow {
            g_lo: wa.g_lo.min(wb.g_lo),
            g_hi: wa.g_hi.max(wb.g_hi),
        };
        let integrand = |g: f64| -> f64 {
            let x = model.x_of_g(g);
            let (Ok((sa, la)), Ok((sb, lb))) = (self.ln_abs(x), other.ln_abs(x)) else {
                return f64::NAN;
            };
            let Ok([_, g1, _, _]) = model.g_derivatives(x) else {
                return f64::NAN;
            };
            sa * sb * (la + lb - g1.abs().ln()).exp()
        };
        Ok(quad::integrate_pieces(integrand, &g_breaks(window), OVERLAP_TOL)?.value)
    }

    /// Number of sign changes of `ψ` on a uniform sample of its window.
    pub fn count_nodes(&self, samples: usize) -> usize {
        let (lo, hi) = self.x_window();
        let mut prev = 0.0;
        let mut count = 0;
        for i in 1..samples {
            let x = lo + (hi - lo) * i as f64 / samples as f64;
            let v = self.eval(x).unwrap_or(0.0);
            if v != 0.0 {
                if prev != 0.0 && v.signum() != prev {
                    count += 1;
                }
                prev = v.signum();
            }
        }
        count
    }
}

/// Breakpoints: geometric up to `g = 1`, then uniform to `g_hi`.
fn g_breaks(w: GWindow) -> Vec<f64> {
    let mut breaks = Vec::new();
    let mut g = w.g_lo;
    while g < 0.5 {
        breaks.push(g);
        g *= 4.0;
    }
    let steps = 24;
    let start = breaks.last().copied().unwrap_or(w.g_lo).max(w.g_lo);
    if breaks.is_empty() {
        breaks.push(start);
    }
    for k in 1..=steps {
        let next = start + (w.g_hi - start) * k as f64 / steps as f64;
        breaks.push(next);
    }
    breaks
}

/// `ψ_n(x)` for a single point. Builds a [`BoundState`]; reuse one for many points.
pub fn wavefunction(model: &ModelKind, n: usize, x: f64) -> Result<f64, ModelError> {
    model.check_domain(x)?;
    BoundState::new(*model, n)?.eval(x)
}

/// Separable two-dimensional density `ψ_{n1}(x)² ψ_{n2}(y)²`.
#[derive(Debug, Clone)]
pub struct Density2d {
    pub sx: BoundState,
    pub sy: BoundState,
}

impl Density2d {
    pub fn new(model: ModelKind, n1: usize, n2: usize) -> Result<Self, ModelError> {
        let sx = BoundState::new(model, n1)?;
        let sy = if n2 == n1 {
            sx.clone()
        } else {
            BoundState::new(model, n2)?
        };
        Ok(Self { sx, sy })
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64, ModelError> {
        Ok(self.sx.density(x)? * self.sy.density(y)?)
    }
}

pub fn density2d(model: &ModelKind, n1: usize, n2: usize, x: f64, y: f64) -> Result<f64, ModelError> {
    model.check_domain(x)?;
    model.check_domain(y)?;
    Density2d::new(*model, n1, n2)?.eval(x, y)
}
