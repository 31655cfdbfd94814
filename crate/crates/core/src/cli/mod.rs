//! Command-line front end: `alleedyn analyze|simulate|scan`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration or usage error,
//! 3 numerical failure, 4 expectation not met.

pub mod config;
pub mod output;
pub mod report;
pub mod scan;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::equilibria::EquilibriumLabel;
use crate::integrator::{detect_convergence, integrate};
use crate::model::State;
use config::{ConfigError, Format, RunConfig};
use scan::{Axis, ScanError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("expectation not met: {0}")]
    ExpectationNotMet(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io { .. } => 1,
            Self::Config(_) | Self::Usage(_) | Self::Scan(_) => 2,
            Self::Numerical(_) => 3,
            Self::ExpectationNotMet(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "alleedyn",
    version,
    about = "Equilibria, stability and simulation of a prey with a strong Allee effect and two competing predators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; files go to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output formats (repeat or comma-separate).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report equilibria, spectra and stability verdicts.
    Analyze(#[command(flatten)] Common),
    /// Integrate from the configured initial state.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Target state `x,y1,y2` the run must converge to.
        #[arg(long)]
        expect: Option<String>,
        /// Max-norm tolerance for `--expect`.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Classify one equilibrium over a parameter grid.
    Scan {
        #[command(flatten)]
        common: Common,
        /// `name,lo,hi,n`; give once or twice.
        #[arg(long, required = true)]
        axis: Vec<String>,
        #[arg(long, default_value = "E1")]
        equilibrium: String,
    },
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let io = |path: PathBuf| move |source| CliError::Io { path, source };
    std::fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(io(path.clone()))
}

/// Writes each `(format, contents)` pair to `<dir>/<stem>.<ext>`, or prints
/// the single requested one when there is no output directory.
fn emit(out: Option<&Path>, stem: &str, docs: &[(Format, String)]) -> Result<(), CliError> {
    match out {
        Some(dir) => docs
            .iter()
            .try_for_each(|(f, text)| write_file(dir, &format!("{stem}.{}", f.extension()), text)),
        None => match docs {
            [(_, text)] => {
                print!("{text}");
                Ok(())
            }
            _ => Err(CliError::Usage("several formats need --out <dir>".into())),
        },
    }
}

fn formats(
    common: &Common,
    cfg: &RunConfig,
    default: Format,
    allowed: &[Format],
) -> Result<Vec<Format>, CliError> {
    let mut f = if !common.format.is_empty() {
        common.format.clone()
    } else if !cfg.outputs.formats.is_empty() {
        cfg.outputs.formats.clone()
    } else {
        vec![default]
    };
    f.dedup();
    if let Some(bad) = f.iter().find(|x| !allowed.contains(x)) {
        return Err(CliError::Usage(format!(
            "format {bad:?} is not available for this command"
        )));
    }
    Ok(f)
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialise") + "\n"
}

fn parse_state(s: &str) -> Result<State, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--expect needs `x,y1,y2`, got `{s}`")))?;
    match v[..] {
        [x, y1, y2] => Ok(State { x, y1, y2 }),
        _ => Err(CliError::Usage(format!(
            "--expect needs three values, got `{s}`"
        ))),
    }
}

pub fn cmd_analyze(common: &Common) -> Result<(), CliError> {
    let cfg = RunConfig::from_path(&common.config)?;
    let fmts = formats(common, &cfg, Format::Json, &[Format::Json])?;
    let r = report::analyze(&cfg.params);
    let out = common.out.as_deref().or(cfg.outputs.dir.as_deref());
    emit(
        out,
        "report",
        &fmts.iter().map(|f| (*f, to_json(&r))).collect::<Vec<_>>(),
    )
}

pub fn cmd_simulate(common: &Common, expect: Option<&str>, tol: f64) -> Result<(), CliError> {
    let cfg = RunConfig::from_path(&common.config)?;
    let init = cfg
        .init
        .ok_or_else(|| CliError::Usage("simulate needs `init` in the config".into()))?;
    let fmts = formats(
        common,
        &cfg,
        Format::Csv,
        &[Format::Csv, Format::Json, Format::Svg],
    )?;
    let target = expect.map(parse_state).transpose()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let traj = integrate(&cfg.params, &init, &cfg.integration)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let docs: Vec<(Format, String)> = fmts
        .iter()
        .map(|f| {
            let text = match f {
                Format::Csv => output::trajectory_csv(&traj),
                Format::Json => to_json(&traj),
                Format::Svg => output::trajectory_svg(&traj),
            };
            (*f, text)
        })
        .collect();
    emit(
        common.out.as_deref().or(cfg.outputs.dir.as_deref()),
        "trajectory",
        &docs,
    )?;
    if let Some(target) = target {
        let c = detect_convergence(&traj, &target, tol);
        let last = traj.last();
        if c.converged {
            eprintln!(
                "converged to {target} within {tol} (entered at t = {})",
                c.time.unwrap_or(0.0)
            );
        } else {
            return Err(CliError::ExpectationNotMet(format!(
                "final state {last} at t = {} is {:e} from {target}",
                traj.times.last().copied().unwrap_or(0.0),
                last.dist_inf(&target)
            )));
        }
    }
    Ok(())
}

pub fn cmd_scan(
    common: &Common,
    axes: &[String],
    equilibrium: &str,
) -> Result<scan::ScanReport, CliError> {
    let cfg = RunConfig::from_path(&common.config)?;
    let which: EquilibriumLabel = equilibrium.parse().map_err(CliError::Usage)?;
    let axes: Vec<Axis> = axes
        .iter()
        .map(|a| Axis::parse(a))
        .collect::<Result<_, _>>()?;
    let fmts = formats(common, &cfg, Format::Csv, &[Format::Csv, Format::Json])?;
    let r = scan::scan(&cfg.params, &axes, which)?;
    let out = common.out.as_deref().or(cfg.outputs.dir.as_deref());
    match out {
        Some(dir) => {
            for f in &fmts {
                match f {
                    Format::Csv => {
                        write_file(dir, "scan.csv", &scan::scan_csv(&r))?;
                        write_file(dir, "boundaries.csv", &scan::boundaries_csv(&r))?;
                    }
                    _ => write_file(dir, "scan.json", &to_json(&r))?,
                }
            }
        }
        None => match fmts[..] {
            [Format::Csv] => {
                print!("{}", scan::scan_csv(&r));
                for b in &r.boundaries {
                    eprintln!(
                        "boundary: {} in [{}, {}]: {} -> {}",
                        b.param, b.from_value, b.to_value, b.from_label, b.to_label
                    );
                }
            }
            [Format::Json] => print!("{}", to_json(&r)),
            _ => return Err(CliError::Usage("several formats need --out <dir>".into())),
        },
    }
    Ok(r)
}

/// Parses `args` and runs the selected command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Analyze(c) => cmd_analyze(c),
        Command::Simulate {
            common,
            expect,
            tol,
        } => cmd_simulate(common, expect.as_deref(), *tol),
        Command::Scan {
            common,
            axis,
            equilibrium,
        } => cmd_scan(common, axis, equilibrium).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("alleedyn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
