//! Command-line front end: map-spec parsing, flat config files, JSON
//! reports and image/cloud emission.

mod commands;
mod config;
mod mapspec;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{cmd_boettcher, cmd_classify, cmd_probe, cmd_render, Artifact, Outcome, Settings, BOETTCHER_RESIDUAL};
pub use config::{parse_disk, parse_points, parse_viewport, ConfigFile, ViewportConfig, CONFIG_KEYS, VIEWPORT_DEFAULT};
pub use mapspec::{parse_complex, MapDescription, MapSpec, MAP_GRAMMAR};
pub use report::{ReportDocument, Section, SectionStatus, Timing, REPORT_SCHEMA};

pub const EXIT_PARSE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("map spec error at column {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("config error on line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] crate::error::Error),
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Config { .. } | CliError::Usage(_) => EXIT_PARSE,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "holodyn", version, about = "Numerical holomorphic dynamics", after_help = MAP_GRAMMAR)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Fixed points, cycles, multipliers and the 2d-2 bound
    Classify,
    /// Boettcher charts with residuals at sample points
    Boettcher,
    /// Escape-time, inverse-iteration or Newton-basin rendering
    Render,
    /// Marty and transitivity diagnostics
    Probe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Ppm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Escape,
    Inverse,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeKind {
    Marty,
    Transitivity,
}

macro_rules! value_enum_from_str {
    ($($t:ty),*) => {$(
        impl std::str::FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s, true)
            }
        }
    )*};
}
value_enum_from_str!(Format, Mode, ProbeKind);

/// Every flag may also be given as `key = value` in the file named by
/// `--config`; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Map specification, e.g. "poly: 1 0 -1"
    #[arg(long, global = true)]
    pub map: Option<String>,
    /// Boettcher method: ritt, milnor, series, original or all
    #[arg(long, global = true)]
    pub method: Option<String>,
    #[arg(long, global = true)]
    pub max_period: Option<usize>,
    /// cx,cy,hw,px,py
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub viewport: Option<String>,
    /// Seed for stochastic subsampling
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Sample points separated by ';', e.g. "5;3+1i;inf"
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub points: Option<String>,
    /// Chart center or inverse-iteration seed ("auto", "inf" or a complex number)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long, global = true)]
    pub max_iter: Option<u32>,
    #[arg(long, global = true)]
    pub escape_radius: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// hue or gray
    #[arg(long, global = true)]
    pub palette: Option<String>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true)]
    pub n_terms: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub kind: Option<ProbeKind>,
    /// Disk cx,cy,r probed by the diagnostics
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub region: Option<String>,
    /// Target disk cx,cy,r for the transitivity probe
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub target: Option<String>,
    /// Add wall-clock timing to reports (breaks byte-identical output)
    #[arg(long, global = true)]
    pub timing: bool,
}

/// Parse arguments, run one command, write its primary output and return
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let settings = Settings::resolve(&cli.options)?;
    let started = std::time::Instant::now();
    let mut outcome = match cli.command {
        Command::Classify => cmd_classify(&settings)?,
        Command::Boettcher => cmd_boettcher(&settings)?,
        Command::Render => cmd_render(&settings)?,
        Command::Probe => cmd_probe(&settings)?,
    };
    if settings.timing {
        outcome.report.timing = Some(Timing {
            seconds: started.elapsed().as_secs_f64(),
        });
    }
    outcome.write(&settings, stdout)?;
    Ok(if outcome.report.is_flagged() { EXIT_NUMERIC } else { 0 })
}
