//! Analytic engine for the two position-dependent-mass families.
//!
//! Both models share the BenDaniel–Duke Hamiltonian
//! `H = -d/dx (1/M) d/dx + V_eff` and the point canonical transformation
//! `ψ = f(x) F(g(x))` onto the X_m-Laguerre equation:
//!
//! * [`Case1Params`]: `M = g = e^{-bx}` on the real line, `E_n = b²(n + (α+1)/2 + m/α) + V_c`.
//! * [`Case2Params`]: `M = l² x^{2η}`, `g = x^l` on `x > 0`, `E_n = n + (α+1)/2 + m/α + V_c`.

mod params;
mod pct;
mod state;

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::orthopoly::{laguerre, OrthoError};
use crate::quad::QuadError;

pub use params::{Case1Params, Case2Params};
pub use pct::{pct_master_residual, pct_prefactor};
pub use state::{density2d, wavefunction, BoundState, Density2d};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter {name} = {value}: requires {constraint}")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },
    #[error("x = {x} is outside the model domain ({domain})")]
    Domain { x: f64, domain: &'static str },
    #[error("denominator L_m^(α-1)(-g) = {value:e} is not a usable positive number at g = {g:e}")]
    Denominator { g: f64, value: f64 },
    #[error("closed form is only defined for m = 1 (got m = {0})")]
    RequiresM1(usize),
    #[error("wavefunction vanishes at x = {0}; log-derivative undefined")]
    Node(f64),
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error("normalization quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
}

/// One of the two exactly solvable mass families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Case1(Case1Params),
    Case2(Case2Params),
}

/// Interval of the PCT variable `g`, mapped to `x` by [`ModelKind::x_interval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GWindow {
    pub g_lo: f64,
    pub g_hi: f64,
}

/// Tail of `|ψ|²` tolerated at the small-`g` end of solver grids.
pub const SOLVER_TAIL: f64 = 1e-12;
/// Level spacings of potential headroom at the large-`g` end of solver grids.
pub const SOLVER_HEADROOM: f64 = 25.0;

impl GWindow {
    /// Truncation used by the finite-difference oracle for the lowest
    /// `n_max + 1` levels: `|ψ|² ~ g^{α+1}` sets the small-`g` end and
    /// `V ≈ scale·g/4` must exceed `E_{n_max}` by [`SOLVER_HEADROOM`] spacings
    /// at the large-`g` end.
    pub fn for_spectrum(alpha: f64, m: usize, n_max: usize) -> Self {
        let g_lo = SOLVER_TAIL.powf(1.0 / (alpha + 1.0));
        let level = n_max as f64 + (alpha + 1.0) / 2.0 + m as f64 / alpha;
        Self {
            g_lo,
            g_hi: 4.0 * (level + SOLVER_HEADROOM),
        }
    }

    /// Wide window for normalization integrals: both tails of `|ψ_n|²` for
    /// `n <= n_max` are far below double precision.
    pub fn for_quadrature(alpha: f64, m: usize, n_max: usize) -> Self {
        let g_lo = 1e-24f64.powf(1.0 / (alpha + 1.0));
        let k = alpha + 2.0 * (n_max + m) as f64 + 2.0;
        let mut g_hi = 2.0 * k + 10.0;
        while k * g_hi.ln() - g_hi > -60.0 {
            g_hi *= 1.1;
        }
        Self { g_lo, g_hi }
    }
}

/// Laguerre values at `-g` that make up the rational parts of `V_eff`, `W` and `Q`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LaguerreBlock {
    /// `L_m^{α-1}(-g)`
    pub d: f64,
    /// `L_{m-1}^{α}(-g)`, the g-derivative of `d`
    pub d1: f64,
    /// `L_{m-2}^{α+1}(-g)`, the g-derivative of `d1`
    pub d2: f64,
    /// `L_{m-1}^{α+1}(-g)`
    pub e1: f64,
}

impl LaguerreBlock {
    pub fn new(m: usize, alpha: f64, g: f64) -> Result<Self, ModelError> {
        let m = m as i64;
        let d = laguerre(m, alpha - 1.0, -g);
        if !(d.is_finite() && d > f64::MIN_POSITIVE) {
            return Err(ModelError::Denominator { g, value: d });
        }
        Ok(Self {
            d,
            d1: laguerre(m - 1, alpha, -g),
            d2: laguerre(m - 2, alpha + 1.0, -g),
            e1: laguerre(m - 1, alpha + 1.0, -g),
        })
    }

    /// The rational combination multiplying `g` in `V_eff`:
    /// `2(D1/D)² - D2/D + E1/(div·D) + D1/D - E1/D`.
    pub fn potential_bracket(&self, div: f64) -> f64 {
        let r = self.d1 / self.d;
        2.0 * r * r - self.d2 / self.d + self.e1 / (div * self.d) + r - self.e1 / self.d
    }
}

impl ModelKind {
    pub fn case1(b: f64, alpha: f64, m: usize, vc: f64) -> Result<Self, ModelError> {
        Case1Params::new(b, alpha, m, vc).map(Self::Case1)
    }

    pub fn case2(eta: u32, alpha: f64, m: usize, vc: f64) -> Result<Self, ModelError> {
        Case2Params::new(eta, alpha, m, vc).map(Self::Case2)
    }

    pub fn alpha(&self) -> f64 {
        match self {
            Self::Case1(p) => p.alpha(),
            Self::Case2(p) => p.alpha(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Self::Case1(p) => p.m(),
            Self::Case2(p) => p.m(),
        }
    }

    pub fn vc(&self) -> f64 {
        match self {
            Self::Case1(p) => p.vc(),
            Self::Case2(p) => p.vc(),
        }
    }

    /// Level spacing: `b²` for Case 1, `1` for Case 2.
    pub fn spacing(&self) -> f64 {
        match self {
            Self::Case1(p) => p.b() * p.b(),
            Self::Case2(_) => 1.0,
        }
    }

    /// The `V_c` that puts the ground level at zero.
    pub fn susy_vc(&self) -> f64 {
        match self {
            Self::Case1(p) => p.susy_vc(),
            Self::Case2(p) => p.susy_vc(),
        }
    }

    pub fn with_vc(self, vc: f64) -> Self {
        match self {
            Self::Case1(p) => Self::Case1(p.with_vc(vc)),
            Self::Case2(p) => Self::Case2(p.with_vc(vc)),
        }
    }

    pub fn with_susy_vc(self) -> Self {
        self.with_vc(self.susy_vc())
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self, ModelError> {
        Ok(match self {
            Self::Case1(p) => Self::Case1(p.with_alpha(alpha)?),
            Self::Case2(p) => Self::Case2(p.with_alpha(alpha)?),
        })
    }

    pub fn check_domain(&self, x: f64) -> Result<(), ModelError> {
        match self {
            Self::Case1(_) if x.is_finite() => Ok(()),
            Self::Case1(_) => Err(ModelError::Domain {
                x,
                domain: "finite real x",
            }),
            Self::Case2(_) if x.is_finite() && x > 0.0 => Ok(()),
            Self::Case2(_) => Err(ModelError::Domain { x, domain: "x > 0" }),
        }
    }

    pub fn mass(&self, x: f64) -> Result<f64, ModelError> {
        self.check_domain(x)?;
        Ok(self.mass_unchecked(x))
    }

    pub(crate) fn mass_unchecked(&self, x: f64) -> f64 {
        match self {
            Self::Case1(p) => (-p.b() * x).exp(),
            Self::Case2(p) => p.c() * x.powi(2 * p.eta() as i32),
        }
    }

    /// `(M, M', M'')`, analytic.
    pub fn mass_derivatives(&self, x: f64) -> Result<[f64; 3], ModelError> {
        self.check_domain(x)?;
        Ok(match self {
            Self::Case1(p) => {
                let b = p.b();
                let mm = (-b * x).exp();
                [mm, -b * mm, b * b * mm]
            }
            Self::Case2(p) => {
                let c = p.c();
                let k = 2 * p.eta() as i32;
                let kf = k as f64;
                let first = if k == 0 { 0.0 } else { c * kf * x.powi(k - 1) };
                let second = if k < 2 {
                    0.0
                } else {
                    c * kf * (kf - 1.0) * x.powi(k - 2)
                };
                [c * x.powi(k), first, second]
            }
        })
    }

    pub fn g_map(&self, x: f64) -> Result<f64, ModelError> {
        self.check_domain(x)?;
        Ok(self.g_unchecked(x))
    }

    pub(crate) fn g_unchecked(&self, x: f64) -> f64 {
        match self {
            Self::Case1(p) => (-p.b() * x).exp(),
            Self::Case2(p) => x.powi(p.l() as i32),
        }
    }

    /// `(g, g', g'', g''')`, analytic.
    pub fn g_derivatives(&self, x: f64) -> Result<[f64; 4], ModelError> {
        self.check_domain(x)?;
        Ok(match self {
            Self::Case1(p) => {
                let b = p.b();
                let g = (-b * x).exp();
                [g, -b * g, b * b * g, -b * b * b * g]
            }
            Self::Case2(p) => {
                let l = p.l() as i32;
                let lf = l as f64;
                [
                    x.powi(l),
                    lf * x.powi(l - 1),
                    lf * (lf - 1.0) * x.powi(l - 2),
                    lf * (lf - 1.0) * (lf - 2.0) * x.powi(l - 3),
                ]
            }
        })
    }

    /// Inverse of [`ModelKind::g_map`].
    pub fn x_of_g(&self, g: f64) -> f64 {
        match self {
            Self::Case1(p) => -g.ln() / p.b(),
            Self::Case2(p) => g.powf(1.0 / p.l() as f64),
        }
    }

    /// Maps a `g` window to an ascending `x` interval.
    pub fn x_interval(&self, w: GWindow) -> (f64, f64) {
        let (a, b) = (self.x_of_g(w.g_lo), self.x_of_g(w.g_hi));
        (a.min(b), a.max(b))
    }

    /// Full `m`-dependent effective potential including `V_c`.
    pub fn v_eff(&self, x: f64) -> Result<f64, ModelError> {
        self.check_domain(x)?;
        let alpha = self.alpha();
        let g = self.g_unchecked(x);
        let lb = LaguerreBlock::new(self.m(), alpha, g)?;
        let bracket = lb.potential_bracket(alpha);
        Ok(match self {
            Self::Case1(p) => {
                let b = p.b();
                b * b * ((alpha * alpha - 1.0) * (b * x).exp() / 4.0 + g / 4.0 + g * bracket) + p.vc()
            }
            Self::Case2(p) => {
                let inv = 1.0 / g;
                let nu = p.nu();
                let extra = (1.0 - nu) * (3.0 - nu) / (4.0 * (2.0 - nu) * (2.0 - nu));
                (inv * (alpha * alpha - 1.0) + g) / 4.0 + g * bracket + extra * inv + p.vc()
            }
        })
    }

    /// `E_n`; the spectrum is equispaced with spacing [`ModelKind::spacing`].
    pub fn energy(&self, n: usize) -> f64 {
        let a = self.alpha();
        self.spacing() * (n as f64 + (a + 1.0) / 2.0 + self.m() as f64 / a) + self.vc()
    }

    /// The closed-form normalization constant
    /// `N = (s·n! / ((n+m+α) Γ(n+α)))^{1/2}` with `s = b` (Case 1) or `1` (Case 2).
    pub fn norm_constant_formula(&self, n: usize) -> f64 {
        let a = self.alpha();
        let s = match self {
            Self::Case1(p) => p.b(),
            Self::Case2(_) => 1.0,
        };
        let ln = s.ln() + ln_gamma(n as f64 + 1.0) - (n as f64 + self.m() as f64 + a).ln() - ln_gamma(n as f64 + a);
        (0.5 * ln).exp()
    }
}

/// The standalone `m = 1` closed form of the Case-1 potential:
/// `(b²/4)(e^{bx}(α²-1) + e^{-bx} + 4/(α(1+αe^{bx})) + 8/(1+αe^{bx})²) + V_c`.
///
/// This expression does not coincide with [`ModelKind::v_eff`] at `m = 1`
/// except at isolated points; see [`v_eff_m1_reduced`].
pub fn v_eff_m1_closed_form(p: &Case1Params, x: f64) -> Result<f64, ModelError> {
    if p.m() != 1 {
        return Err(ModelError::RequiresM1(p.m()));
    }
    if !x.is_finite() {
        return Err(ModelError::Domain {
            x,
            domain: "finite real x",
        });
    }
    let (a, b) = (p.alpha(), p.b());
    let e = (b * x).exp();
    let u = 1.0 + a * e;
    Ok(b * b / 4.0 * (e * (a * a - 1.0) + 1.0 / e + 4.0 / (a * u) + 8.0 / (u * u)) + p.vc())
}

/// The `m = 1` reduction of the general Case-1 potential, obtained with
/// `L_1^{α-1}(-g) = α + g`:
/// `(b²/4)(e^{bx}(α²-1) + e^{-bx} + 12/(αu) - 8/(αu²)) + V_c`, `u = 1 + αe^{bx}`.
pub fn v_eff_m1_reduced(p: &Case1Params, x: f64) -> Result<f64, ModelError> {
    if p.m() != 1 {
        return Err(ModelError::RequiresM1(p.m()));
    }
    if !x.is_finite() {
        return Err(ModelError::Domain {
            x,
            domain: "finite real x",
        });
    }
    let (a, b) = (p.alpha(), p.b());
    let e = (b * x).exp();
    let u = 1.0 + a * e;
    Ok(b * b / 4.0 * (e * (a * a - 1.0) + 1.0 / e + 12.0 / (a * u) - 8.0 / (a * u * u)) + p.vc())
}
