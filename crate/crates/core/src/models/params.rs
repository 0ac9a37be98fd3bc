use super::ModelError;

fn check_alpha(alpha: f64) -> Result<(), ModelError> {
    if alpha.is_finite() && alpha > 1.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name: "alpha",
            constraint: "alpha > 1",
            value: alpha,
        })
    }
}

fn check_m(m: usize) -> Result<(), ModelError> {
    if m >= 1 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name: "m",
            constraint: "m >= 1",
            value: m as f64,
        })
    }
}

fn check_vc(vc: f64) -> Result<(), ModelError> {
    if vc.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name: "vc",
            constraint: "vc finite",
            value: vc,
        })
    }
}

/// Exponential mass `M(x) = e^{-bx}` with `g(x) = e^{-bx}` on the whole line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case1Params {
    b: f64,
    alpha: f64,
    m: usize,
    vc: f64,
}

impl Case1Params {
    pub fn new(b: f64, alpha: f64, m: usize, vc: f64) -> Result<Self, ModelError> {
        if !(b.is_finite() && b > 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "b",
                constraint: "b > 0",
                value: b,
            });
        }
        check_alpha(alpha)?;
        check_m(m)?;
        check_vc(vc)?;
        Ok(Self { b, alpha, m, vc })
    }

    /// Parameters with `vc` chosen so that the ground level sits at zero.
    pub fn susy(b: f64, alpha: f64, m: usize) -> Result<Self, ModelError> {
        Self::new(b, alpha, m, 0.0).map(|p| p.with_vc(p.susy_vc()))
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vc(&self) -> f64 {
        self.vc
    }

    /// `λ = -1/b` in `M = λ g'`.
    pub fn lambda(&self) -> f64 {
        -1.0 / self.b
    }

    /// `C = b²`, the constant value of `g'/(λ g)`.
    pub fn c(&self) -> f64 {
        self.b * self.b
    }

    /// `-b² (2m + α + α²) / (2α)`.
    pub fn susy_vc(&self) -> f64 {
        let (a, m) = (self.alpha, self.m as f64);
        -self.b * self.b * (2.0 * m + a + a * a) / (2.0 * a)
    }

    pub fn with_vc(mut self, vc: f64) -> Self {
        self.vc = vc;
        self
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self, ModelError> {
        Self::new(self.b, alpha, self.m, self.vc)
    }
}

/// Power-law mass `M(x) = l² x^{2η}` with `g(x) = x^l`, `l = 2η + 2`, on `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case2Params {
    eta: u32,
    alpha: f64,
    m: usize,
    vc: f64,
}

impl Case2Params {
    pub fn new(eta: u32, alpha: f64, m: usize, vc: f64) -> Result<Self, ModelError> {
        check_alpha(alpha)?;
        check_m(m)?;
        check_vc(vc)?;
        Ok(Self { eta, alpha, m, vc })
    }

    pub fn susy(eta: u32, alpha: f64, m: usize) -> Result<Self, ModelError> {
        Self::new(eta, alpha, m, 0.0).map(|p| p.with_vc(p.susy_vc()))
    }

    pub fn eta(&self) -> u32 {
        self.eta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vc(&self) -> f64 {
        self.vc
    }

    /// `ν = 2η / (2η + 1)`.
    pub fn nu(&self) -> f64 {
        let e = self.eta as f64;
        2.0 * e / (2.0 * e + 1.0)
    }

    /// `l = (2 - ν)/(1 - ν) = 2η + 2`.
    pub fn l(&self) -> u32 {
        2 * self.eta + 2
    }

    /// `c = l²`.
    pub fn c(&self) -> f64 {
        let l = self.l() as f64;
        l * l
    }

    pub fn kappa(&self) -> f64 {
        1.0
    }

    pub fn susy_vc(&self) -> f64 {
        let (a, m) = (self.alpha, self.m as f64);
        -(2.0 * m + a + a * a) / (2.0 * a)
    }

    pub fn with_vc(mut self, vc: f64) -> Self {
        self.vc = vc;
        self
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self, ModelError> {
        Self::new(self.eta, alpha, self.m, self.vc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn case1_derived_constants() {
        for b in [0.5, 1.0, 2.0] {
            let p = Case1Params::new(b, 2.0, 1, 0.0).unwrap();
            assert_relative_eq!(p.lambda() * p.c(), -b, max_relative = 1e-15);
            // g'/(λ g) with g = e^{-bx}: (-b g)/(λ g) = -b/λ = b²
            assert_relative_eq!(-b / p.lambda(), p.c(), max_relative = 1e-15);
        }
    }

    #[test]
    fn case2_derived_constants() {
        for eta in 0..6 {
            let p = Case2Params::new(eta, 2.0, 1, 0.0).unwrap();
            let nu = p.nu();
            assert!((0.0..1.0).contains(&nu));
            assert_relative_eq!((2.0 - nu) / (1.0 - nu), p.l() as f64, max_relative = 1e-12);
            assert_eq!(p.l() % 2, 0);
            assert_relative_eq!(p.kappa() * p.c(), (p.l() * p.l()) as f64);
        }
        assert_relative_eq!(Case2Params::new(1, 2.0, 1, 0.0).unwrap().nu(), 2.0 / 3.0);
    }

    #[test]
    fn susy_vc_values() {
        assert_eq!(Case1Params::susy(1.0, 2.0, 1).unwrap().vc(), -2.0);
        assert_eq!(Case1Params::susy(2.0, 2.0, 1).unwrap().vc(), -8.0);
        assert_eq!(Case2Params::susy(3, 2.0, 2).unwrap().vc(), -2.5);
    }

    #[test]
    fn invalid_parameters_name_the_field() {
        let err = Case1Params::new(1.0, 0.5, 1, 0.0).unwrap_err();
        assert!(err.to_string().contains("alpha > 1"), "{err}");
        let err = Case1Params::new(-1.0, 2.0, 1, 0.0).unwrap_err();
        assert!(err.to_string().contains("b > 0"), "{err}");
        let err = Case2Params::new(0, 2.0, 0, 0.0).unwrap_err();
        assert!(err.to_string().contains("m >= 1"), "{err}");
    }
}
