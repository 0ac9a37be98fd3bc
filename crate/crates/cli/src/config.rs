//! Run configuration: command-line flags over a config file over a figure
//! preset over built-in defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer};
use serde_json::{Map, Value};
use xmpdm::models::ModelKind;
use xmpdm::solver::Grid;

use crate::figures;
use crate::CliError;

/// Environment variable that sets the directory for relative `--out` paths.
pub const OUTPUT_DIR_ENV: &str = "XMPDM_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    Case1,
    Case2,
}

impl FromStr for CaseTag {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "case1" | "i" => Ok(Self::Case1),
            "2" | "case2" | "ii" => Ok(Self::Case2),
            other => Err(CliError::Validation(format!("case: expected 1 or 2, got {other:?}"))),
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Case1 => "1",
            Self::Case2 => "2",
        })
    }
}

impl<'de> Deserialize<'de> for CaseTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        let s = match &v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(serde::de::Error::custom("case must be 1 or 2")),
        };
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(CliError::Validation(format!(
                "format: expected csv or json, got {other:?}"
            ))),
        }
    }
}

/// Either an explicit `V_c` or the preset that puts `E_0` at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VcChoice {
    Value(f64),
    SusyZero,
}

pub const SUSY_ZERO: &str = "susy-zero";

/// One source of settings; unset fields defer to lower-precedence layers.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub case: Option<CaseTag>,
    pub b: Option<f64>,
    pub alpha: Option<f64>,
    pub m: Option<usize>,
    pub eta: Option<u32>,
    pub vc: Option<f64>,
    pub preset: Option<String>,
    #[serde(alias = "n_max")]
    pub nmax: Option<usize>,
    #[serde(alias = "grid-lo")]
    pub grid_lo: Option<f64>,
    #[serde(alias = "grid-hi")]
    pub grid_hi: Option<f64>,
    pub npoints: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub figure: Option<String>,
}

const FLOAT_KEYS: [&str; 5] = ["b", "alpha", "vc", "grid_lo", "grid_hi"];
const INT_KEYS: [&str; 6] = ["m", "eta", "nmax", "npoints", "n1", "n2"];

impl ConfigLayer {
    /// Parses a JSON object or flat `key = value` lines (`#` starts a comment).
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")));
        }
        let mut map = Map::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected key=value", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            let key = if key == "n_max" { "nmax".to_string() } else { key };
            let value = value.trim().trim_matches('"');
            let parsed = if FLOAT_KEYS.contains(&key.as_str()) {
                let v: f64 = value
                    .parse()
                    .map_err(|_| CliError::Validation(format!("config: {key} must be a number, got {value:?}")))?;
                serde_json::to_value(v).map_err(|e| CliError::Validation(format!("config: {key}: {e}")))?
            } else if INT_KEYS.contains(&key.as_str()) {
                let v: u64 = value.parse().map_err(|_| {
                    CliError::Validation(format!("config: {key} must be a non-negative integer, got {value:?}"))
                })?;
                Value::from(v)
            } else {
                Value::from(value)
            };
            if map.insert(key.clone(), parsed).is_some() {
                return Err(CliError::Validation(format!("config: duplicate key {key}")));
            }
        }
        serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    fn vc_choice(&self) -> Result<Option<VcChoice>, CliError> {
        match (&self.vc, &self.preset) {
            (Some(_), Some(_)) => Err(CliError::Validation("vc and preset are mutually exclusive".into())),
            (Some(v), None) => Ok(Some(VcChoice::Value(*v))),
            (None, Some(p)) if p == SUSY_ZERO => Ok(Some(VcChoice::SusyZero)),
            (None, Some(p)) => Err(CliError::Validation(format!(
                "preset: unknown {p:?} (known: {SUSY_ZERO})"
            ))),
            (None, None) => Ok(None),
        }
    }

    fn specifies_model(&self) -> bool {
        self.case.is_some()
            || self.b.is_some()
            || self.alpha.is_some()
            || self.m.is_some()
            || self.eta.is_some()
            || self.vc.is_some()
            || self.preset.is_some()
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseTag,
    pub b: f64,
    pub alpha: f64,
    pub m: usize,
    pub eta: u32,
    pub vc: VcChoice,
    pub n_max: usize,
    pub grid_lo: Option<f64>,
    pub grid_hi: Option<f64>,
    pub npoints: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub n1: usize,
    pub n2: usize,
    pub figure: Option<String>,
    /// Whether any layer above the defaults chose model parameters.
    pub explicit_model: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: CaseTag::Case1,
            b: 1.0,
            alpha: 2.0,
            m: 1,
            eta: 0,
            vc: VcChoice::Value(0.0),
            n_max: 2,
            grid_lo: None,
            grid_hi: None,
            npoints: None,
            format: Format::Csv,
            out: None,
            n1: 0,
            n2: 0,
            figure: None,
            explicit_model: false,
        }
    }
}

macro_rules! pick {
    ($layers:expr, $field:ident) => {
        $layers.iter().find_map(|l| l.$field.clone())
    };
}

impl RunConfig {
    /// Merges `flags` over `file`; the figure preset named by either sits
    /// below both, and built-in defaults below that.
    pub fn resolve(flags: ConfigLayer, file: Option<ConfigLayer>) -> Result<Self, CliError> {
        let mut layers = vec![flags];
        layers.extend(file);
        let figure = pick!(layers, figure);
        if let Some(name) = &figure {
            layers.push(figures::layer(name)?);
        }
        let d = Self::default();
        let mut vc = None;
        for l in &layers {
            if let Some(choice) = l.vc_choice()? {
                vc.get_or_insert(choice);
            }
        }
        let cfg = Self {
            case: pick!(layers, case).unwrap_or(d.case),
            b: pick!(layers, b).unwrap_or(d.b),
            alpha: pick!(layers, alpha).unwrap_or(d.alpha),
            m: pick!(layers, m).unwrap_or(d.m),
            eta: pick!(layers, eta).unwrap_or(d.eta),
            vc: vc.unwrap_or(d.vc),
            n_max: pick!(layers, nmax).unwrap_or(d.n_max),
            grid_lo: pick!(layers, grid_lo),
            grid_hi: pick!(layers, grid_hi),
            npoints: pick!(layers, npoints),
            format: pick!(layers, format).unwrap_or(d.format),
            out: pick!(layers, out),
            n1: pick!(layers, n1).unwrap_or(d.n1),
            n2: pick!(layers, n2).unwrap_or(d.n2),
            figure,
            explicit_model: layers.iter().any(ConfigLayer::specifies_model),
        };
        let foreign = match cfg.case {
            CaseTag::Case1 => pick!(layers, eta).map(|_| "eta"),
            CaseTag::Case2 => pick!(layers, b).map(|_| "b"),
        };
        if let Some(key) = foreign {
            return Err(CliError::Validation(format!(
                "{key} does not apply to case {}",
                cfg.case
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model()?;
        if let Some(n) = self.npoints {
            if n < Grid::MIN_POINTS {
                return Err(CliError::Validation(format!(
                    "npoints must be >= {} (got {n})",
                    Grid::MIN_POINTS
                )));
            }
        }
        if let (Some(lo), Some(hi)) = (self.grid_lo, self.grid_hi) {
            if lo >= hi {
                return Err(CliError::Validation(format!(
                    "grid_lo must be < grid_hi (got {lo} >= {hi})"
                )));
            }
        }
        for (name, v) in [("grid_lo", self.grid_lo), ("grid_hi", self.grid_hi)] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(CliError::Validation(format!("{name} must be finite")));
                }
                if self.case == CaseTag::Case2 && v <= 0.0 {
                    return Err(CliError::Validation(format!("{name} must be > 0 for case 2 (got {v})")));
                }
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<ModelKind, CliError> {
        let base = match self.case {
            CaseTag::Case1 => ModelKind::case1(self.b, self.alpha, self.m, 0.0)?,
            CaseTag::Case2 => ModelKind::case2(self.eta, self.alpha, self.m, 0.0)?,
        };
        Ok(match self.vc {
            VcChoice::Value(v) if v.is_finite() => base.with_vc(v),
            VcChoice::Value(v) => return Err(CliError::Validation(format!("vc must be finite (got {v})"))),
            VcChoice::SusyZero => base.with_susy_vc(),
        })
    }

    /// The grid for this run: overrides where given, `auto` otherwise.
    pub fn grid(&self, auto: (f64, f64), default_npoints: usize) -> Result<Grid, CliError> {
        let lo = self.grid_lo.unwrap_or(auto.0);
        let hi = self.grid_hi.unwrap_or(auto.1);
        Ok(Grid::new(lo, hi, self.npoints.unwrap_or(default_npoints))?)
    }

    pub fn has_grid_override(&self) -> bool {
        self.grid_lo.is_some() || self.grid_hi.is_some() || self.npoints.is_some()
    }

    /// Output path with relative paths placed under `$XMPDM_OUTPUT_DIR` when set.
    pub fn output_path(&self) -> Option<PathBuf> {
        let out = self.out.as_ref()?;
        if out.is_absolute() {
            return Some(out.clone());
        }
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Some(PathBuf::from(dir).join(out)),
            _ => Some(out.clone()),
        }
    }
}
