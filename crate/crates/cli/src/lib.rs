//! Command-line front end for the ring-cavity model.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 solver failure,
//! 3 validation-suite failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

use config::{Format, RotationSection, RunConfig};
use ringjc::analysis::Method;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: msg.into() }
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        Self { code: EXIT_SOLVER, message: msg.into() }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: msg.into() }
    }
}

impl From<ringjc::Error> for CliError {
    fn from(e: ringjc::Error) -> Self {
        use ringjc::Error::*;
        match e {
            Domain(_) => Self::usage(e.to_string()),
            Unsupported(_) => Self::usage(format!("unsupported configuration: {e}")),
            SweepFailed { ref failures } => {
                let mut msg = format!("{} sweep point(s) failed", failures.len());
                for (i, err) in failures {
                    msg.push_str(&format!("\n  point {i}: {err}"));
                }
                Self::solver(msg)
            }
            _ => Self::solver(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ringjc", version, about = "Two-mode Jaynes-Cummings model of an atom in a rotating ring cavity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Single-excitation energies and eigenstates.
    Eigen,
    /// Steady photon numbers over a drive-detuning grid.
    Sweep,
    /// Side-peak height against rotation detuning, with its slope.
    Slope,
    /// Run the invariant suites.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Analytic,
    Numeric,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Analytic => Method::Analytic,
            MethodArg::Numeric => Method::Numeric,
            MethodArg::Both => Method::Both,
        }
    }
}

/// Flags shared by all subcommands. They override values from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Number of sweep points.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub g: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub drive_amp: Option<f64>,
    /// Rotation detuning Δ; replaces any rotation section of the config.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega_atom: Option<f64>,
    /// Sweep range of Ω̃ = Ω_a − ω_d as LO,HI.
    #[arg(long, global = true, value_parser = parse_range, allow_hyphen_values = true)]
    pub omega_drive_detuning_range: Option<[f64; 2]>,
    /// Test hook: break the Hermiticity of the Hamiltonian seen by `validate`.
    #[arg(long, global = true, hide = true)]
    pub corrupt_hamiltonian: bool,
}

fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok([lo, hi])
}

impl Common {
    /// File config (or defaults) with the flags applied on top.
    pub fn effective_config(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let p = &mut c.params;
        p.g = self.g.or(p.g);
        p.gamma = self.gamma.or(p.gamma);
        p.drive_amp = self.drive_amp.or(p.drive_amp);
        p.omega0 = self.omega0.or(p.omega0);
        p.omega_atom = self.omega_atom.or(p.omega_atom);
        if let Some(d) = self.delta {
            c.rotation = RotationSection { delta: Some(d), ..Default::default() };
        }
        if let Some(n) = self.n_max {
            c.solver.n_max = n;
        }
        if self.threads.is_some() {
            c.solver.threads = self.threads;
        }
        if let Some(n) = self.points {
            c.sweep.points = n;
        }
        if self.omega_drive_detuning_range.is_some() {
            c.sweep.range = self.omega_drive_detuning_range;
        }
        if let Some(m) = self.method {
            c.sweep.methods = vec![m.into()];
        }
        if self.out.is_some() {
            c.output.path = self.out.clone();
        }
        if let Some(f) = self.format {
            c.output.format = f;
        }
        Ok(c)
    }
}

/// Writes `text` to the configured output, or stdout.
pub fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::usage(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::usage(format!("stdout: {e}")))
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config = cli.common.effective_config()?;
    let resolved = config.resolve()?;
    let text = match cli.command {
        Command::Eigen => commands::eigen(&config, &resolved)?,
        Command::Sweep => commands::sweep(&config, &resolved)?,
        Command::Slope => commands::slope(&config, &resolved)?,
        Command::Validate => {
            let report = validate::run_suites(&resolved, cli.common.corrupt_hamiltonian);
            let text = validate::render(&report, resolved.format);
            emit(resolved.out.as_ref(), &text)?;
            let failed: Vec<_> = report.iter().filter(|s| s.status == validate::Status::Fail).map(|s| s.name).collect();
            if !failed.is_empty() {
                return Err(CliError::validation(format!("failed suites: {}", failed.join(", "))));
            }
            return Ok(());
        }
    };
    emit(resolved.out.as_ref(), &text)
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
