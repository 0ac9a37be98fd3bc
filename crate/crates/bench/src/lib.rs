//! Shared inputs for the benchmarks.

use xmpdm::models::ModelKind;
use xmpdm::solver::{FnProblem, Grid};

/// Case 1 and case 2 presets at `alpha = 2`.
pub fn models(m: usize) -> [ModelKind; 2] {
    [
        ModelKind::case1(1.0, 2.0, m, 0.0).expect("valid preset"),
        ModelKind::case2(1, 2.0, m, 0.0).expect("valid preset"),
    ]
}

pub type Profile = fn(f64) -> f64;

pub fn oscillator() -> FnProblem<Profile, Profile> {
    FnProblem {
        mass: |_| 1.0,
        potential: |x| x * x,
        lo: -10.0,
        hi: 10.0,
    }
}

pub fn oscillator_grid(npoints: usize) -> Grid {
    Grid::new(-10.0, 10.0, npoints).expect("valid grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use xmpdm::solver::solve;

    #[test]
    fn fixtures_solve() {
        let r = solve(&oscillator(), 2, Some(oscillator_grid(2001))).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-3);
        for model in models(1) {
            assert!(model.energy(0) > 0.0);
        }
    }
}
