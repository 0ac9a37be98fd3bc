use xmpdm::models::{BoundState, ModelKind};
use xmpdm::solver::{solve_model, SpectrumResult};

fn presets() -> Vec<ModelKind> {
    let mut out: Vec<ModelKind> = (1..=4).map(|m| ModelKind::case1(1.0, 2.0, m, 0.0).unwrap()).collect();
    for m in 1..=3 {
        for eta in 0..=3 {
            out.push(ModelKind::case2(eta, 2.0, m, 0.0).unwrap());
        }
    }
    out
}

fn gap_spread(r: &SpectrumResult) -> f64 {
    let gaps: Vec<f64> = r.eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
    var.sqrt() / mean
}

#[test]
fn eigenvalues_match_analytic_spectrum() {
    for model in presets() {
        let r = solve_model(&model, 5, None).unwrap();
        for n in 0..4 {
            let exact = model.energy(n);
            let rel = ((r.eigenvalues[n] - exact) / exact).abs();
            assert!(rel < 1e-3, "{model:?} n={n}: {} vs {exact}", r.eigenvalues[n]);
        }
        assert!(gap_spread(&r) < 1e-3, "{model:?}");
        for w in r.eigenvalues.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}

#[test]
fn eigenvectors_match_analytic_states() {
    for model in presets() {
        let r = solve_model(&model, 4, None).unwrap();
        let nodes = r.grid.nodes();
        for n in 0..4 {
            let state = BoundState::new(model, n).unwrap();
            let mut analytic: Vec<f64> = nodes.iter().map(|&x| state.eval(x).unwrap_or(0.0)).collect();
            xmpdm::solver::fix_sign(&mut analytic);
            let d = analytic
                .iter()
                .zip(&r.eigenvectors[n])
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(d < 1e-3, "{model:?} n={n}: {d}");
        }
    }
}

#[test]
fn refinement_improves_agreement() {
    use xmpdm::solver::{Grid, Problem};
    let model = ModelKind::case2(2, 2.0, 2, 0.0).unwrap();
    let (lo, hi) = model.interval(3);
    let mut last = f64::INFINITY;
    for npoints in [1001, 2001, 4001] {
        let r = solve_model(&model, 3, Some(Grid::new(lo, hi, npoints).unwrap())).unwrap();
        let err = (r.eigenvalues[2] - model.energy(2)).abs();
        assert!(err < last);
        last = err;
    }
}
