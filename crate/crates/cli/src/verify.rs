//! The `verify` command: every invariant as a named pass/fail check.

use std::time::Instant;

use num::{BigRational, Zero};
use serde_json::{Map, Value};
use xmpdm::models::{pct_master_residual, v_eff_m1_reduced, BoundState, ModelKind};
use xmpdm::orthopoly::{
    standard_norm_squared, xm_inner_product, xm_laguerre_exact, xm_ode_residual, Convention, XmFamily,
};
use xmpdm::solver::{convergence_order, fix_sign, solve, FnProblem, Grid, Problem, Shifted};
use xmpdm::susy::{
    apply_a, partner_state, shape_invariance_residual, susy_ground_energy_exact, PartnerModel, SampledFunction,
};

use crate::config::Format;
use crate::output::{json_num, render_csv, Cell, Table};

/// Highest codimension and degree excess in the exactness check.
pub const EXACT_MAX_M: usize = 4;
pub const EXACT_MAX_EXTRA: usize = 6;
pub const SAMPLE_POINTS: usize = 50;
pub const LEVELS: usize = 4;
pub const OSCILLATOR_NPOINTS: usize = 16001;
const LADDER_NPOINTS: usize = 4001;

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Models to check; empty means the shipped presets.
    pub models: Vec<ModelKind>,
    /// Added to `V_eff` in the numeric oracle (test hook).
    pub veff_fault: f64,
    pub timing: bool,
}

impl VerifyOptions {
    pub fn presets() -> Vec<ModelKind> {
        let mut out: Vec<ModelKind> = (1..=4)
            .map(|m| ModelKind::case1(1.0, 2.0, m, 0.0).expect("valid preset"))
            .collect();
        for m in 1..=3 {
            for eta in 0..=3 {
                out.push(ModelKind::case2(eta, 2.0, m, 0.0).expect("valid preset"));
            }
        }
        out
    }

    fn scope(&self) -> Vec<ModelKind> {
        if self.models.is_empty() {
            Self::presets()
        } else {
            self.models.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst value over the scope; NaN when the check could not run.
    pub measured: f64,
    pub tolerance: f64,
    pub runtime_ms: Option<f64>,
    /// Model or sample responsible for `measured`, or the error.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scope: Vec<String>,
    pub veff_fault: f64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut t = Table::new(&["name", "status", "measured", "tolerance", "runtime_ms", "detail"]);
                for c in &self.checks {
                    t.push(vec![
                        Cell::Text(c.name.into()),
                        Cell::Text(status(c).into()),
                        Cell::Num(c.measured),
                        Cell::Num(c.tolerance),
                        c.runtime_ms.map_or(Cell::Text(String::new()), Cell::Num),
                        Cell::Text(csv_text(&c.detail)),
                    ]);
                }
                render_csv(&t)
            }
            Format::Json => {
                let mut meta = Map::new();
                meta.insert("command".into(), Value::from("verify"));
                meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
                meta.insert("scope".into(), Value::from(self.scope.clone()));
                meta.insert("veff_fault".into(), json_num(self.veff_fault));
                let checks: Vec<Value> = self
                    .checks
                    .iter()
                    .map(|c| {
                        let mut o = Map::new();
                        o.insert("name".into(), Value::from(c.name));
                        o.insert("status".into(), Value::from(status(c)));
                        o.insert("measured".into(), json_num(c.measured));
                        o.insert("tolerance".into(), json_num(c.tolerance));
                        o.insert("runtime_ms".into(), c.runtime_ms.map_or(Value::Null, json_num));
                        o.insert("detail".into(), Value::from(c.detail.as_str()));
                        Value::Object(o)
                    })
                    .collect();
                let mut summary = Map::new();
                summary.insert("passed".into(), Value::from(self.passed()));
                summary.insert("failed".into(), Value::from(self.failed()));
                let mut root = Map::new();
                root.insert("metadata".into(), Value::Object(meta));
                root.insert("checks".into(), Value::Array(checks));
                root.insert("summary".into(), Value::Object(summary));
                let mut s = serde_json::to_string(&Value::Object(root)).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

fn status(c: &Check) -> &'static str {
    if c.passed {
        "pass"
    } else {
        "fail"
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn label(model: &ModelKind) -> String {
    match model {
        ModelKind::Case1(p) => format!("case1(b={}, alpha={}, m={}, vc={})", p.b(), p.alpha(), p.m(), p.vc()),
        ModelKind::Case2(p) => format!(
            "case2(eta={}, alpha={}, m={}, vc={})",
            p.eta(),
            p.alpha(),
            p.m(),
            p.vc()
        ),
    }
}

/// Largest value and where it occurred.
#[derive(Debug, Clone)]
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: 0.0,
            at: String::new(),
        }
    }

    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if self.value.is_nan() {
            return;
        }
        if value.is_nan() || value > self.value || self.at.is_empty() {
            self.value = value;
            self.at = at();
        }
    }
}

type Outcome = Result<Worst, String>;

struct Ctx {
    models: Vec<ModelKind>,
    fault: f64,
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn sample_points(model: &ModelKind) -> Vec<f64> {
    let (lo, hi) = model.interval(LEVELS);
    (0..SAMPLE_POINTS)
        .map(|i| lo + (hi - lo) * (0.05 + 0.9 * i as f64 / (SAMPLE_POINTS - 1) as f64))
        .collect()
}

fn families(ctx: &Ctx) -> Vec<f64> {
    let mut alphas: Vec<f64> = ctx.models.iter().map(ModelKind::alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    alphas
}

fn orthopoly_exactness(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for alpha in families(ctx) {
        let a = BigRational::from_float(alpha).ok_or("non-finite alpha")?;
        for m in 1..=EXACT_MAX_M {
            for nu in m..=m + EXACT_MAX_EXTRA {
                let p = xm_laguerre_exact(nu, m, &a, Convention::Monic).map_err(e)?;
                let nonzero = !xm_ode_residual(&p, nu, m, &a).is_zero() || p.degree() != Some(nu);
                w.update(f64::from(u8::from(nonzero)), || {
                    format!("alpha={alpha}, m={m}, nu={nu}")
                });
            }
        }
    }
    Ok(w)
}

fn orthopoly_orthogonality(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for alpha in families(ctx) {
        for m in 1..=EXACT_MAX_M {
            let fam = XmFamily::new(m, alpha)
                .map_err(e)?
                .with_convention(Convention::Standard);
            let norms: Vec<f64> = (0..=LEVELS).map(|n| standard_norm_squared(n, &fam)).collect();
            for i in 0..=LEVELS {
                for j in 0..i {
                    let ip = xm_inner_product(m + i, m + j, &fam).map_err(e)?;
                    w.update(ip.abs() / (norms[i] * norms[j]).sqrt(), || {
                        format!("alpha={alpha}, m={m}, degrees {} and {}", m + i, m + j)
                    });
                }
            }
        }
    }
    Ok(w)
}

fn orthopoly_norms(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for alpha in families(ctx) {
        for m in 1..=EXACT_MAX_M {
            let fam = XmFamily::new(m, alpha)
                .map_err(e)?
                .with_convention(Convention::Standard);
            for n in 0..=LEVELS {
                let numeric = xm_inner_product(m + n, m + n, &fam).map_err(e)?;
                let exact = standard_norm_squared(n, &fam);
                w.update(((numeric - exact) / exact).abs(), || {
                    format!("alpha={alpha}, m={m}, n={n}")
                });
            }
        }
    }
    Ok(w)
}

fn orthonormality(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for model in &ctx.models {
        let states = (0..=LEVELS)
            .map(|n| BoundState::new(*model, n))
            .collect::<Result<Vec<_>, _>>()
            .map_err(e)?;
        for i in 0..states.len() {
            for j in 0..=i {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = (states[i].overlap(&states[j]).map_err(e)? - target).abs();
                w.update(d, || format!("{} <{i}|{j}>", label(model)));
            }
        }
    }
    Ok(w)
}

fn pct_identity(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for model in &ctx.models {
        for n in 0..LEVELS {
            for x in sample_points(model) {
                let r = pct_master_residual(model, n, x).map_err(e)?;
                w.update(r.abs(), || format!("{} n={n} x={x}", label(model)));
            }
        }
    }
    Ok(w)
}

/// Derived `m = 1` closed form against the general potential on `[-3, 3]`.
fn m1_reduction(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    let mut models: Vec<ModelKind> = ctx
        .models
        .iter()
        .filter(|m| matches!(m, ModelKind::Case1(p) if p.m() == 1))
        .copied()
        .collect();
    if models.is_empty() {
        models.push(ModelKind::case1(1.0, 2.0, 1, 0.0).map_err(e)?);
    }
    for model in &models {
        let ModelKind::Case1(p) = model else { continue };
        for i in 0..1000 {
            let x = -3.0 + 6.0 * i as f64 / 999.0;
            let general = model.v_eff(x).map_err(e)?;
            let reduced = v_eff_m1_reduced(p, x).map_err(e)?;
            w.update((general - reduced).abs() / general.abs().max(1.0), || {
                format!("{} x={x}", label(model))
            });
        }
    }
    Ok(w)
}

fn oracle<F>(ctx: &Ctx, k: usize, mut visit: F) -> Outcome
where
    F: FnMut(&ModelKind, &xmpdm::solver::SpectrumResult, &mut Worst) -> Result<(), String>,
{
    let mut w = Worst::new();
    for model in &ctx.models {
        let problem = Shifted {
            inner: model,
            shift: ctx.fault,
        };
        let r = solve(&problem, k, None).map_err(e)?;
        visit(model, &r, &mut w)?;
    }
    Ok(w)
}

fn oracle_spectrum(ctx: &Ctx) -> Outcome {
    oracle(ctx, LEVELS, |model, r, w| {
        for (n, &numeric) in r.eigenvalues.iter().enumerate() {
            let exact = model.energy(n);
            w.update((numeric - exact).abs() / exact.abs().max(model.spacing()), || {
                format!("{} n={n}", label(model))
            });
        }
        Ok(())
    })
}

fn oracle_equispacing(ctx: &Ctx) -> Outcome {
    oracle(ctx, LEVELS + 1, |model, r, w| {
        let gaps: Vec<f64> = r.eigenvalues.windows(2).map(|p| p[1] - p[0]).collect();
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
        w.update(var.sqrt() / mean, || label(model));
        Ok(())
    })
}

fn oracle_eigenvectors(ctx: &Ctx) -> Outcome {
    oracle(ctx, LEVELS, |model, r, w| {
        let nodes = r.grid.nodes();
        for (n, numeric) in r.eigenvectors.iter().enumerate() {
            let state = BoundState::new(*model, n).map_err(e)?;
            let mut analytic: Vec<f64> = nodes.iter().map(|&x| state.eval(x).unwrap_or(0.0)).collect();
            fix_sign(&mut analytic);
            let d = analytic
                .iter()
                .zip(numeric)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            w.update(d, || format!("{} n={n}", label(model)));
        }
        Ok(())
    })
}

fn susy_models(ctx: &Ctx) -> Vec<ModelKind> {
    ctx.models.iter().map(|m| m.with_susy_vc()).collect()
}

fn ladder_grid(model: &ModelKind) -> Result<Grid, String> {
    let (lo, hi) = model.interval(LEVELS + 1);
    Grid::new(lo, hi, LADDER_NPOINTS).map_err(e)
}

fn sampled(state: &BoundState, grid: &Grid) -> SampledFunction {
    SampledFunction::sample(grid, |x| state.eval(x).unwrap_or(0.0))
}

fn susy_ground_energy(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for model in susy_models(ctx) {
        let e0 = susy_ground_energy_exact(&model);
        let v = if e0.is_zero() { 0.0 } else { f64::INFINITY };
        w.update(v, || format!("{} E0 = {e0}", label(&model)));
    }
    Ok(w)
}

fn susy_annihilation(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for model in susy_models(ctx) {
        let grid = ladder_grid(&model)?;
        let psi0 = sampled(&BoundState::new(model, 0).map_err(e)?, &grid);
        let a = apply_a(&model, &psi0).map_err(e)?;
        w.update(a.norm() / psi0.norm(), || label(&model));
    }
    Ok(w)
}

fn susy_intertwining(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for model in susy_models(ctx) {
        let grid = ladder_grid(&model)?;
        for n in 0..LEVELS - 1 {
            let up = sampled(&BoundState::new(model, n + 1).map_err(e)?, &grid);
            let lowered = apply_a(&model, &up).map_err(e)?.unit_max();
            let partner = sampled(&partner_state(&model, n).map_err(e)?, &grid).unit_max();
            w.update(lowered.max_distance(&partner), || format!("{} n={n}", label(&model)));
        }
    }
    Ok(w)
}

fn shape_invariance(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for model in ctx.models.iter().flat_map(|m| [*m, m.with_susy_vc()]) {
        for x in sample_points(&model) {
            let r = shape_invariance_residual(&model, x).map_err(e)?;
            w.update(r.abs(), || format!("{} x={x}", label(&model)));
        }
    }
    Ok(w)
}

fn partner_spectrum(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for model in susy_models(ctx) {
        let r = solve(&PartnerModel::new(model), LEVELS - 1, None).map_err(e)?;
        for (n, &numeric) in r.eigenvalues.iter().enumerate() {
            let target = model.energy(n + 1);
            w.update((numeric - target).abs() / target.abs().max(model.spacing()), || {
                format!("{} n={n}", label(&model))
            });
        }
    }
    Ok(w)
}

fn oscillator() -> FnProblem<impl Fn(f64) -> f64, impl Fn(f64) -> f64> {
    FnProblem {
        mass: |_| 1.0,
        potential: |x| x * x,
        lo: -10.0,
        hi: 10.0,
    }
}

fn solver_oscillator(_: &Ctx) -> Outcome {
    let mut w = Worst::new();
    let grid = Grid::new(-10.0, 10.0, OSCILLATOR_NPOINTS).map_err(e)?;
    let r = solve(&oscillator(), LEVELS + 1, Some(grid)).map_err(e)?;
    for (n, &v) in r.eigenvalues.iter().enumerate() {
        w.update((v - (2 * n + 1) as f64).abs(), || format!("n={n}"));
    }
    Ok(w)
}

fn solver_order(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    let p = convergence_order(&oscillator(), 2).map_err(e)?;
    w.update((p - 2.0).abs(), || format!("oscillator p={p}"));
    if let Some(model) = ctx.models.first() {
        let p = convergence_order(model, 2).map_err(e)?;
        w.update((p - 2.0).abs(), || format!("{} p={p}", label(model)));
    }
    Ok(w)
}

type CheckFn = fn(&Ctx) -> Outcome;

/// Name, tolerance and body of every registered check, in report order.
pub const CHECKS: [(&str, f64); 17] = [
    ("orthopoly_exactness", 0.0),
    ("orthopoly_orthogonality", 1e-8),
    ("orthopoly_norms", 1e-8),
    ("orthonormality", 1e-6),
    ("pct_identity", 1e-9),
    ("m1_reduction", 1e-12),
    ("oracle_spectrum", 1e-3),
    ("oracle_equispacing", 1e-3),
    ("oracle_eigenvectors", 1e-3),
    ("susy_ground_energy", 0.0),
    ("susy_annihilation", 1e-6),
    ("susy_intertwining", 1e-5),
    ("shape_invariance", 1e-9),
    ("partner_spectrum", 1e-3),
    ("solver_oscillator", 1e-5),
    ("solver_order", 0.2),
    ("solver_symmetry", 0.0),
];

fn solver_symmetry(ctx: &Ctx) -> Outcome {
    let mut w = Worst::new();
    for model in &ctx.models {
        let (lo, hi) = model.interval(LEVELS);
        let op = xmpdm::solver::discretize(model, Grid::new(lo, hi, 101).map_err(e)?).map_err(e)?;
        for i in 1..op.size() {
            w.update((op.entry(i, i - 1) - op.entry(i - 1, i)).abs(), || label(model));
            if op.entry(i, i - 1) >= 0.0 {
                w.update(f64::INFINITY, || {
                    format!("{} non-negative off-diagonal at {i}", label(model))
                });
            }
        }
    }
    Ok(w)
}

fn body(name: &str) -> CheckFn {
    match name {
        "orthopoly_exactness" => orthopoly_exactness,
        "orthopoly_orthogonality" => orthopoly_orthogonality,
        "orthopoly_norms" => orthopoly_norms,
        "orthonormality" => orthonormality,
        "pct_identity" => pct_identity,
        "m1_reduction" => m1_reduction,
        "oracle_spectrum" => oracle_spectrum,
        "oracle_equispacing" => oracle_equispacing,
        "oracle_eigenvectors" => oracle_eigenvectors,
        "susy_ground_energy" => susy_ground_energy,
        "susy_annihilation" => susy_annihilation,
        "susy_intertwining" => susy_intertwining,
        "shape_invariance" => shape_invariance,
        "partner_spectrum" => partner_spectrum,
        "solver_oscillator" => solver_oscillator,
        "solver_order" => solver_order,
        "solver_symmetry" => solver_symmetry,
        _ => unreachable!("unregistered check {name}"),
    }
}

/// Runs all checks concurrently; the report lists them in registration order.
pub fn run(opts: &VerifyOptions) -> Report {
    let ctx = Ctx {
        models: opts.scope(),
        fault: opts.veff_fault,
    };
    let checks = std::thread::scope(|s| {
        let handles: Vec<_> = CHECKS
            .iter()
            .map(|&(name, tolerance)| {
                let ctx = &ctx;
                s.spawn(move || {
                    let start = Instant::now();
                    let outcome = body(name)(ctx);
                    let elapsed = start.elapsed().as_secs_f64() * 1e3;
                    let (measured, detail) = match outcome {
                        Ok(w) => (w.value, w.at),
                        Err(msg) => (f64::NAN, msg),
                    };
                    Check {
                        name,
                        passed: measured.is_finite() && measured <= tolerance,
                        measured,
                        tolerance,
                        runtime_ms: opts.timing.then_some(elapsed),
                        detail,
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect()
    });
    Report {
        scope: ctx.models.iter().map(label).collect(),
        veff_fault: opts.veff_fault,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single() -> VerifyOptions {
        VerifyOptions {
            models: vec![ModelKind::case2(1, 2.0, 1, 0.0).unwrap()],
            veff_fault: 0.0,
            timing: false,
        }
    }

    #[test]
    fn single_model_passes() {
        let report = run(&single());
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
        assert_eq!(report.checks.len(), CHECKS.len());
    }

    #[test]
    fn fault_hook_fails_only_the_spectrum() {
        let report = run(&VerifyOptions {
            veff_fault: 0.1,
            ..single()
        });
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert_eq!(failed, vec!["oracle_spectrum"]);
    }

    #[test]
    fn worst_tracks_nan() {
        let mut w = Worst::new();
        w.update(1.0, || "a".into());
        w.update(f64::NAN, || "b".into());
        w.update(5.0, || "c".into());
        assert!(w.value.is_nan());
        assert_eq!(w.at, "b");
    }
}
