//! Table builders for `spectrum`, `profile` and `density2d`.

use serde_json::{Map, Value};
use xmpdm::models::{BoundState, Density2d, ModelKind};
use xmpdm::solver::{quadrature, solve, Grid, Problem, AUTO_NPOINTS};

use crate::config::{CaseTag, RunConfig, VcChoice};
use crate::output::{json_num, Cell, Document, Table};
use crate::CliError;

pub const PROFILE_NPOINTS: usize = 2001;
pub const DENSITY2D_NPOINTS: usize = 201;

/// Parameter and grid block shared by every command's metadata.
pub fn metadata(cfg: &RunConfig, command: &str, grid: &Grid) -> Map<String, Value> {
    let mut params = Map::new();
    params.insert("case".into(), Value::from(cfg.case.to_string()));
    match cfg.case {
        CaseTag::Case1 => params.insert("b".into(), json_num(cfg.b)),
        CaseTag::Case2 => params.insert("eta".into(), Value::from(cfg.eta)),
    };
    params.insert("alpha".into(), json_num(cfg.alpha));
    params.insert("m".into(), Value::from(cfg.m));
    if let Ok(model) = cfg.model() {
        params.insert("vc".into(), json_num(model.vc()));
    }
    params.insert(
        "vc_preset".into(),
        match cfg.vc {
            VcChoice::SusyZero => Value::from(crate::config::SUSY_ZERO),
            VcChoice::Value(_) => Value::Null,
        },
    );
    params.insert("n_max".into(), Value::from(cfg.n_max));
    let mut g = Map::new();
    g.insert("lo".into(), json_num(grid.lo()));
    g.insert("hi".into(), json_num(grid.hi()));
    g.insert("npoints".into(), Value::from(grid.npoints()));
    let mut meta = Map::new();
    meta.insert("command".into(), Value::from(command));
    meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    if let Some(f) = &cfg.figure {
        meta.insert("figure".into(), Value::from(f.as_str()));
    }
    meta.insert("parameters".into(), Value::Object(params));
    meta.insert("grid".into(), Value::Object(g));
    meta
}

/// Analytic against numeric levels `0..=n_max`.
pub fn spectrum(cfg: &RunConfig) -> Result<Document, CliError> {
    let model = cfg.model()?;
    let k = cfg.n_max + 1;
    let grid = cfg.grid(model.interval(k), AUTO_NPOINTS)?;
    let result = solve(&model, k, Some(grid))?;
    let mut table = Table::new(&["n", "E_analytic", "E_numeric", "abs_err", "rel_err"]);
    for (n, &numeric) in result.eigenvalues.iter().enumerate() {
        let exact = model.energy(n);
        let abs_err = (numeric - exact).abs();
        table.push(vec![
            Cell::Int(n as i64),
            Cell::Num(exact),
            Cell::Num(numeric),
            Cell::Num(abs_err),
            Cell::Num(abs_err / exact.abs().max(model.spacing())),
        ]);
    }
    let mut meta = metadata(cfg, "spectrum", &result.grid);
    meta.insert(
        "max_residual".into(),
        json_num(result.residuals.iter().fold(0.0, |a, &r| a.max(r))),
    );
    meta.insert("matrix_norm".into(), json_num(result.matrix_norm));
    Ok(Document { metadata: meta, table })
}

/// Sampled mass, potential and signed wavefunctions on a uniform grid.
#[derive(Debug, Clone)]
pub struct Profile {
    pub grid: Grid,
    pub mass: Vec<f64>,
    pub v_eff: Vec<f64>,
    /// `psi[n][i]` for `n = 0..=n_max`.
    pub psi: Vec<Vec<f64>>,
}

impl Profile {
    pub fn new(model: &ModelKind, n_max: usize, grid: Grid) -> Result<Self, CliError> {
        let xs = grid.nodes();
        let mass = xs.iter().map(|&x| model.mass(x)).collect::<Result<Vec<_>, _>>()?;
        let v_eff = xs.iter().map(|&x| model.v_eff(x)).collect::<Result<Vec<_>, _>>()?;
        let psi = (0..=n_max)
            .map(|n| {
                let state = BoundState::new(*model, n)?;
                xs.iter().map(|&x| state.eval(x)).collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { grid, mass, v_eff, psi })
    }

    /// `∫|ψ_n|² dx` on the profile grid.
    pub fn norm_sq(&self, n: usize) -> Result<f64, CliError> {
        let d: Vec<f64> = self.psi[n].iter().map(|p| p * p).collect();
        Ok(quadrature(&d, &self.grid)?)
    }

    /// Sign changes of `ψ_n`, ignoring samples below `1e-10` of its peak.
    pub fn nodes(&self, n: usize) -> usize {
        count_sign_changes(&self.psi[n])
    }
}

pub fn count_sign_changes(values: &[f64]) -> usize {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-10 * peak;
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in values.iter().filter(|v| v.abs() > floor) {
        if last != 0.0 && v.signum() != last {
            changes += 1;
        }
        last = v.signum();
    }
    changes
}

pub fn profile_data(cfg: &RunConfig) -> Result<Profile, CliError> {
    let model = cfg.model()?;
    let grid = cfg.grid(model.interval(cfg.n_max + 1), PROFILE_NPOINTS)?;
    Profile::new(&model, cfg.n_max, grid)
}

/// `x, M, V_eff, psi0_sq, ...` for plotting the potential and its states.
pub fn profile(cfg: &RunConfig) -> Result<Document, CliError> {
    let p = profile_data(cfg)?;
    let mut columns = vec!["x".to_string(), "M".into(), "V_eff".into()];
    columns.extend((0..=cfg.n_max).map(|n| format!("psi{n}_sq")));
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    for (i, x) in p.grid.nodes().into_iter().enumerate() {
        let mut row = vec![Cell::Num(x), Cell::Num(p.mass[i]), Cell::Num(p.v_eff[i])];
        row.extend(p.psi.iter().map(|psi| Cell::Num(psi[i] * psi[i])));
        table.push(row);
    }
    let mut meta = metadata(cfg, "profile", &p.grid);
    let norms = (0..=cfg.n_max)
        .map(|n| p.norm_sq(n).map(json_num))
        .collect::<Result<Vec<_>, _>>()?;
    meta.insert("density_integrals".into(), Value::Array(norms));
    Ok(Document { metadata: meta, table })
}

/// Separable 2D density `|ψ_{n1}(x) ψ_{n2}(y)|²` on a square mesh.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub grid: Grid,
    /// `rho[i][j]` at `(x_i, y_j)`.
    pub rho: Vec<Vec<f64>>,
}

impl Mesh {
    pub fn new(model: &ModelKind, n1: usize, n2: usize, grid: Grid) -> Result<Self, CliError> {
        let d = Density2d::new(*model, n1, n2)?;
        let xs = grid.nodes();
        let sx = xs.iter().map(|&x| d.sx.eval(x)).collect::<Result<Vec<_>, _>>()?;
        let sy = xs.iter().map(|&y| d.sy.eval(y)).collect::<Result<Vec<_>, _>>()?;
        let rho = sx
            .iter()
            .map(|a| sy.iter().map(|b| (a * b) * (a * b)).collect())
            .collect();
        Ok(Self { grid, rho })
    }

    /// Product Simpson rule over the mesh.
    pub fn integral(&self) -> Result<f64, CliError> {
        let inner = self
            .rho
            .iter()
            .map(|row| quadrature(row, &self.grid))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(quadrature(&inner, &self.grid)?)
    }

    /// Strict local maxima over the 8-neighbourhood above `1e-6` of the peak.
    pub fn lobes(&self) -> usize {
        let n = self.rho.len();
        let peak = self.rho.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
        let mut count = 0;
        for i in 1..n.saturating_sub(1) {
            for j in 1..n - 1 {
                let v = self.rho[i][j];
                if v <= 1e-6 * peak {
                    continue;
                }
                let is_max = (i - 1..=i + 1)
                    .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                    .filter(|&(a, b)| (a, b) != (i, j))
                    .all(|(a, b)| self.rho[a][b] < v);
                if is_max {
                    count += 1;
                }
            }
        }
        count
    }
}

pub fn density2d_data(cfg: &RunConfig) -> Result<Mesh, CliError> {
    if cfg.case != CaseTag::Case2 {
        return Err(CliError::Validation(
            "density2d supports case 2 only (the 2D figure uses the case-2 family); pass --case 2".into(),
        ));
    }
    let model = cfg.model()?;
    let grid = cfg.grid(model.interval(cfg.n1.max(cfg.n2) + 1), DENSITY2D_NPOINTS)?;
    Mesh::new(&model, cfg.n1, cfg.n2, grid)
}

/// `x, y, rho` rows with `y` varying fastest.
pub fn density2d(cfg: &RunConfig) -> Result<Document, CliError> {
    let mesh = density2d_data(cfg)?;
    let xs = mesh.grid.nodes();
    let mut table = Table::new(&["x", "y", "rho"]);
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            table.push(vec![Cell::Num(x), Cell::Num(y), Cell::Num(mesh.rho[i][j])]);
        }
    }
    let mut meta = metadata(cfg, "density2d", &mesh.grid);
    meta.insert("n1".into(), Value::from(cfg.n1));
    meta.insert("n2".into(), Value::from(cfg.n2));
    meta.insert("mesh_integral".into(), json_num(mesh.integral()?));
    meta.insert("lobes".into(), Value::from(mesh.lobes()));
    Ok(Document { metadata: meta, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigLayer;

    fn cfg(layer: ConfigLayer) -> RunConfig {
        RunConfig::resolve(layer, None).unwrap()
    }

    #[test]
    fn default_spectrum() {
        let doc = spectrum(&RunConfig::default()).unwrap();
        assert_eq!(doc.table.column("E_analytic").unwrap(), vec![2.0, 3.0, 4.0]);
        for r in doc.table.column("rel_err").unwrap() {
            assert!(r < 1e-4, "{r}");
        }
    }

    #[test]
    fn susy_zero_spectrum_starts_at_zero() {
        let c = cfg(ConfigLayer {
            b: Some(2.0),
            preset: Some("susy-zero".into()),
            ..Default::default()
        });
        let e = spectrum(&c).unwrap().table.column("E_analytic").unwrap();
        assert!(e[0].abs() < 1e-12);
        assert!((e[1] - 4.0).abs() < 1e-12 && (e[2] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn profile_columns_and_norms() {
        let c = cfg(ConfigLayer {
            figure: Some("fig2b".into()),
            ..Default::default()
        });
        let doc = profile(&c).unwrap();
        assert_eq!(doc.table.columns.len(), 6);
        let x = doc.table.column("x").unwrap();
        let m = doc.table.column("M").unwrap();
        for (x, m) in x.iter().zip(&m) {
            assert!((m - 16.0 * x * x).abs() <= 1e-12 * m.max(1.0));
        }
        let p = profile_data(&c).unwrap();
        for n in 0..3 {
            assert!((p.norm_sq(n).unwrap() - 1.0).abs() < 1e-6);
            assert_eq!(p.nodes(n), n);
        }
    }

    #[test]
    fn density2d_rejects_case1() {
        let err = density2d(&RunConfig::default()).unwrap_err();
        assert!(err.to_string().contains("case 2"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn density2d_lobes_and_normalization() {
        let c = cfg(ConfigLayer {
            figure: Some("fig5d".into()),
            ..Default::default()
        });
        let mesh = density2d_data(&c).unwrap();
        assert_eq!(mesh.lobes(), 6);
        assert!((mesh.integral().unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn sign_changes_ignore_tails() {
        assert_eq!(count_sign_changes(&[1e-20, -1e-20, 1.0, 0.5, -0.5, -1.0, 1e-19]), 1);
    }
}
