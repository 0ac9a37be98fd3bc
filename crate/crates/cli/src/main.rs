use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xmpdm_cli::config::{CaseTag, ConfigLayer, Format, RunConfig};
use xmpdm_cli::{commands, verify, CliError, VerifyOptions};

/// Position-dependent-mass models built on exceptional Laguerre polynomials.
#[derive(Debug, Parser)]
#[command(name = "xmpdm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic against numeric energy levels.
    Spectrum(Common),
    /// Mass, potential and densities on a grid.
    Profile(Common),
    /// Separable 2D probability density (case 2).
    Density2d {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
    },
    /// Run every check and report pass/fail.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Report runtime_ms as null so output is byte-identical across runs.
        #[arg(long)]
        no_timing: bool,
        #[arg(long, hide = true, num_args = 0..=1, default_missing_value = "0.1")]
        inject_veff_fault: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// 1 (exponential mass) or 2 (power mass).
    #[arg(long)]
    case: Option<CaseTag>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    eta: Option<u32>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "preset")]
    vc: Option<f64>,
    /// Named choice of V_c; only `susy-zero`.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    grid_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    grid_hi: Option<f64>,
    #[arg(long)]
    npoints: Option<usize>,
    #[arg(long)]
    format: Option<Format>,
    /// Relative paths resolve against $XMPDM_OUTPUT_DIR when set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value or JSON file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Figure preset such as fig1a or fig5d.
    #[arg(long)]
    figure: Option<String>,
}

impl Common {
    fn resolve(&self, n1: Option<usize>, n2: Option<usize>) -> Result<RunConfig, CliError> {
        let flags = ConfigLayer {
            case: self.case,
            b: self.b,
            alpha: self.alpha,
            m: self.m,
            eta: self.eta,
            vc: self.vc,
            preset: self.preset.clone(),
            nmax: self.nmax,
            grid_lo: self.grid_lo,
            grid_hi: self.grid_hi,
            npoints: self.npoints,
            format: self.format,
            out: self.out.clone(),
            n1,
            n2,
            figure: self.figure.clone(),
        };
        let file = self.config.as_deref().map(ConfigLayer::from_file).transpose()?;
        RunConfig::resolve(flags, file)
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match cfg.output_path() {
        Some(path) => {
            let io = |source| CliError::Io {
                path: path.display().to_string(),
                source,
            };
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(io)?;
            }
            std::fs::write(&path, text).map_err(io)
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Spectrum(c) => {
            let cfg = c.resolve(None, None)?;
            emit(&cfg, &commands::spectrum(&cfg)?.render(cfg.format))?;
        }
        Command::Profile(c) => {
            let cfg = c.resolve(None, None)?;
            emit(&cfg, &commands::profile(&cfg)?.render(cfg.format))?;
        }
        Command::Density2d { common, n1, n2 } => {
            let cfg = common.resolve(n1, n2)?;
            emit(&cfg, &commands::density2d(&cfg)?.render(cfg.format))?;
        }
        Command::Verify {
            common,
            no_timing,
            inject_veff_fault,
        } => {
            let cfg = common.resolve(None, None)?;
            let opts = VerifyOptions {
                models: if cfg.explicit_model {
                    vec![cfg.model()?]
                } else {
                    Vec::new()
                },
                veff_fault: inject_veff_fault.unwrap_or(0.0),
                timing: !no_timing,
            };
            let report = verify::run(&opts);
            emit(&cfg, &report.render(cfg.format))?;
            if !report.all_passed() {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!(
                        "FAIL {}: measured {} > {} ({})",
                        c.name, c.measured, c.tolerance, c.detail
                    );
                }
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
