//! Batch front end for the cpwall library: parameter sweeps written as CSV or
//! JSON, and a verification suite.

mod config;
mod modes;
mod output;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Mode, RawConfig, SweepConfig};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
    #[error(transparent)]
    Numerical(#[from] cpwall::Error),
}

impl CliError {
    pub fn config(key: &str, message: String) -> Self {
        CliError::Config { key: key.to_string(), message }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Output(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

/// Computes field kernels, energy densities and Casimir-Polder energies of
/// an atom in front of a conducting wall. All values are in reduced units.
#[derive(Debug, Parser)]
#[command(name = "cpwall", version)]
struct Args {
    /// density, density-dynamic, cp, cp-dynamic, kernel or verify
    #[arg(long)]
    mode: Option<String>,
    /// Atom-wall distance
    #[arg(long)]
    d: Option<String>,
    /// Dipole matrix element as x,y,z; equal components give an isotropic atom
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Static electric polarizability of the probe atom
    #[arg(long)]
    alpha_b: Option<String>,
    /// Static magnetic polarizability of the probe atom
    #[arg(long)]
    alpha_m_b: Option<String>,
    /// coord:lo:hi:n[:log] with coord one of r0, z, x, d, t
    #[arg(long, allow_hyphen_values = true)]
    sweep: Option<String>,
    /// Observation point x,y,z; repeatable
    #[arg(long, allow_hyphen_values = true)]
    point: Vec<String>,
    /// Time c*t since the atom started dressing itself
    #[arg(long)]
    time: Option<String>,
    /// Relative quadrature tolerance
    #[arg(long)]
    rel_tol: Option<String>,
    /// electric or magnetic (cp mode)
    #[arg(long)]
    field: Option<String>,
    /// quadrature or closed_form (cp mode)
    #[arg(long)]
    route: Option<String>,
    /// Output path; standard output when absent
    #[arg(long)]
    out: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// key=value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

fn merge(args: Args) -> Result<SweepConfig, CliError> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let flags: [(&str, Option<String>); 12] = [
        ("mode", args.mode),
        ("d", args.d),
        ("mu", args.mu),
        ("alpha-b", args.alpha_b),
        ("alpha-m-b", args.alpha_m_b),
        ("sweep", args.sweep),
        ("time", args.time),
        ("rel-tol", args.rel_tol),
        ("field", args.field),
        ("route", args.route),
        ("out", args.out),
        ("format", args.format),
    ];
    for (key, value) in flags {
        raw.set(key, value.into_iter().collect());
    }
    raw.set("point", args.point);
    raw.resolve()
}

fn open_output(config: &SweepConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &config.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(config: &SweepConfig) -> Result<u8, CliError> {
    // fail on an unwritable path before any computation
    let mut out = open_output(config)?;
    let echo = config.echo();
    if config.mode == Mode::Verify {
        let checks = verify::run_suite(config.quadrature)?;
        output::write_table(&mut out, config.format, &verify::table(&checks), &echo)?;
        out.flush()?;
        if config.out.is_some() {
            verify::print_summary(io::stdout().lock(), &checks)?;
        } else {
            verify::print_summary(io::stderr().lock(), &checks)?;
        }
        return Ok(if checks.iter().all(verify::Check::passed) { 0 } else { EXIT_VERIFICATION });
    }
    let (table, failures) = modes::run_grid(config);
    output::write_table(&mut out, config.format, &table, &echo)?;
    out.flush()?;
    for f in &failures {
        let p = f.point.point;
        let t = f.point.t.map(|t| format!(", t={t}")).unwrap_or_default();
        eprintln!(
            "row {} (point {},{},{}, d={}{t}) failed: {}",
            f.index, p[0], p[1], p[2], f.point.d, f.message
        );
    }
    Ok(if failures.is_empty() { 0 } else { EXIT_NUMERICAL })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = merge(args).and_then(|config| run(&config));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cpwall: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
