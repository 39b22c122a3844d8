use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cvdisc::chernoff::s_overlap_global;
use cvdisc::fock::{converged_s_overlaps, FockConfig, DEFAULT_TRACE_TOL};
use cvdisc::local::scan_heterodyne_optimality;
use cvdisc::report::{sweep, write_csv, DiscriminationReport, Spacing, SweepSpec};
use cvdisc::Error;

/// Largest `mu` accepted by the Fock-space oracle.
const ORACLE_MU_MAX: f64 = 2.5;
const ORACLE_TOL: f64 = 1e-3;

#[derive(Parser)]
#[command(name = "cvdisc", version, about = "Error-probability bounds for detecting Gaussian correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Subcommand)]
enum Command {
    /// Print every bound for one value of mu as JSON.
    Point {
        #[arg(long)]
        mu: f64,
    },
    /// Write a CSV table over a grid of mu values.
    Sweep {
        #[arg(long, default_value_t = 1.001)]
        mu_min: f64,
        #[arg(long, default_value_t = 1000.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, value_enum, default_value_t = SpacingArg::Log)]
        spacing: SpacingArg,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that heterodyne minimizes the averaged s-overlap over squeezed POVMs.
    VerifyHet {
        #[arg(long, value_delimiter = ',', default_values_t = [1.5, 2.0, 5.0, 20.0])]
        mu: Vec<f64>,
        /// Correlation as a fraction of its maximum, g = frac (mu - 1).
        #[arg(long, value_delimiter = ',', default_values_t = [0.4, 1.0])]
        g_frac: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5, 0.7, 0.9])]
        s: Vec<f64>,
    },
    /// Compare the closed-form s-overlap with the truncated Fock-space value.
    OracleCheck {
        #[arg(long, value_delimiter = ',', default_values_t = [1.5, 2.0])]
        mu: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.5, 0.7])]
        s: Vec<f64>,
        /// Starting cutoff per mode; doubled until the value settles.
        #[arg(long, default_value_t = 12)]
        cutoff: usize,
        /// Gauss-Hermite nodes per axis (defaults to twice the cutoff).
        #[arg(long)]
        nodes: Option<usize>,
    },
}

enum Failure {
    Verification(String),
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Lib(Error::Domain(_)) => 2,
            Failure::Io(_) => 3,
            Failure::Lib(Error::Convergence(_)) => 4,
            Failure::Lib(Error::Invariant(_)) => 5,
            Failure::Lib(Error::Numerical(_) | Error::ReportFailure(_)) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Verification(m) => write!(f, "{m}"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Lib(Error::Domain(msg.into()))
}

fn run_point(mu: f64) -> Result<(), Failure> {
    let report = DiscriminationReport::compute(mu)?.check()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn run_sweep(spec: SweepSpec, out: Option<PathBuf>) -> Result<(), Failure> {
    let rows = sweep(&spec)?;
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path)?);
            write_csv(&mut w, &rows)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_csv(&mut w, &rows)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run_verify_het(mus: &[f64], fracs: &[f64], ss: &[f64]) -> Result<(), Failure> {
    if mus.is_empty() || fracs.is_empty() || ss.is_empty() {
        return Err(usage("empty parameter range"));
    }
    if let Some(f) = fracs.iter().find(|&&f| !(f > 0.0 && f <= 1.0)) {
        return Err(usage(format!("g-frac must lie in (0, 1], got {f}")));
    }
    if let Some(m) = mus.iter().find(|&&m| !(m > 1.0)) {
        return Err(usage(format!("mu must exceed 1, got {m}")));
    }
    let mut failures = Vec::new();
    let mut total = 0;
    for &mu in mus {
        for &frac in fracs {
            for &s in ss {
                let g = frac * (mu - 1.0);
                let r = scan_heterodyne_optimality(mu, g, s)?;
                total += 1;
                println!(
                    "{} mu={mu} g={g} s={s} argmin_lambda={} derivative={:e}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.argmin_lambda,
                    r.derivative_at_one
                );
                if !r.passed {
                    failures.push(format!("(mu={mu}, g={g}, s={s})"));
                }
            }
        }
    }
    if failures.is_empty() {
        println!("heterodyne optimal at all {total} grid points");
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{} of {total} grid points failed: {}",
            failures.len(),
            failures.join(", ")
        )))
    }
}

fn run_oracle_check(mus: &[f64], ss: &[f64], cutoff: usize, nodes: Option<usize>) -> Result<(), Failure> {
    if mus.is_empty() || ss.is_empty() {
        return Err(usage("empty parameter range"));
    }
    if let Some(m) = mus.iter().find(|&&m| !(m <= ORACLE_MU_MAX)) {
        return Err(usage(format!("oracle scope is mu <= {ORACLE_MU_MAX}, got {m}")));
    }
    let config = FockConfig::new(cutoff, nodes.unwrap_or(2 * cutoff), DEFAULT_TRACE_TOL)?;
    println!("mu,s,closed_form,oracle,abs_diff,cutoff");
    let mut worst: f64 = 0.0;
    for &mu in mus {
        let conv = converged_s_overlaps(mu, ss, &config)?;
        for (&s, &oracle) in ss.iter().zip(&conv.values) {
            let closed = s_overlap_global(mu, s)?;
            let diff = (closed - oracle).abs();
            worst = worst.max(diff);
            println!("{mu},{s},{closed:.12},{oracle:.12},{diff:.3e},{}", conv.cutoff);
        }
    }
    if worst <= ORACLE_TOL {
        Ok(())
    } else {
        Err(Failure::Verification(format!("largest difference {worst:e} exceeds {ORACLE_TOL:e}")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Point { mu } => run_point(mu),
        Command::Sweep { mu_min, mu_max, points, spacing, out } => {
            let spacing = match spacing {
                SpacingArg::Linear => Spacing::Linear,
                SpacingArg::Log => Spacing::Log,
            };
            SweepSpec::new(mu_min, mu_max, points, spacing)
                .map_err(Failure::from)
                .and_then(|spec| run_sweep(spec, out))
        }
        Command::VerifyHet { mu, g_frac, s } => run_verify_het(&mu, &g_frac, &s),
        Command::OracleCheck { mu, s, cutoff, nodes } => run_oracle_check(&mu, &s, cutoff, nodes),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvdisc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
