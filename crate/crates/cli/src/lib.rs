//! The `concentrate` command line: argument parsing and dispatch to the harness.
//!
//! Exit codes: 0 on success, 1 on a domain error or a failed verdict
//! (`check`, `converge`), 2 on a usage error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use concentrate::harness::{
    default_r_grid, finite_record, fidelity_record, info_record, infer_regime, record_seed, run_check_suite,
    run_experiment, yield_record, CurveKind, Experiment, ExperimentConfig, ExperimentRecord, OutputFormat,
};
use concentrate::random::DEFAULT_SEED;
use concentrate::{Error, Regime, SchmidtSpectrum};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "CONCENTRATE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_N_LIST: &str = "100,200,500,1000,2000";
const DEFAULT_GRID_POINTS: usize = 200;

#[derive(Parser, Debug)]
#[command(name = "concentrate", version, about = "Error exponents of pure-state entanglement concentration")]
struct Cli {
    /// Report errors as a JSON object on stdout.
    #[arg(long, global = true)]
    json_errors: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summary of a spectrum: dimension, entropies, saturation points.
    Info {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal single-copy concentration to size L (every L when --size is absent).
    Finite {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long)]
        size: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Asymptotic yield at one error exponent.
    Yield {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// Error exponent r, in bits.
        #[arg(long = "r")]
        r: f64,
        /// Curve to evaluate; all four when absent.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Yield curves over an exponent grid.
    Sweep {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// lo:hi:steps; defaults to 200 points past both saturation points.
        #[arg(long)]
        r_grid: Option<String>,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact finite-n exponents against the asymptotic prediction.
    Converge {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// Per-copy rate R = (1/n) log2 L, in bits.
        #[arg(long)]
        rate: f64,
        /// a,b,c or a..b..step.
        #[arg(long, default_value = DEFAULT_N_LIST)]
        n_list: String,
        /// Regime; inferred from the rate when absent.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        /// Accepted |residual| at the largest n.
        #[arg(long, allow_negative_numbers = true)]
        tolerance: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Direct yields of rho, sigma and rho ⊗ sigma.
    Nonadd {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// Second spectrum; the first one when absent.
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long = "r", conflicts_with = "r_grid")]
        r: Option<f64>,
        #[arg(long)]
        r_grid: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Checks of the fidelity-conversion constructions for target size T.
    Fidelity {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// Target size T; every feasible T when absent.
        #[arg(long)]
        size: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The seeded property-check suite.
    Check {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Replaces every property tolerance.
        #[arg(long, allow_negative_numbers = true)]
        tolerance: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Comma-separated Schmidt coefficients.
    #[arg(long, required_unless_present = "spectrum_file", conflicts_with = "spectrum_file")]
    spectrum: Option<String>,
    /// File with one coefficient per line; '#' starts a comment.
    #[arg(long)]
    spectrum_file: Option<PathBuf>,
    /// Rescale coefficients that do not sum to 1.
    #[arg(long)]
    renormalize: bool,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Direct,
    Converse,
    FidelityDirect,
    FidelityConverse,
}

impl From<Kind> for CurveKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Direct => CurveKind::Direct,
            Kind::Converse => CurveKind::Converse,
            Kind::FidelityDirect => CurveKind::FidelityDirect,
            Kind::FidelityConverse => CurveKind::FidelityConverse,
        }
    }
}

/// Failure of one invocation.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(msg) => Failure::Usage(msg),
            other => Failure::Domain(other),
        }
    }
}

type Outcome = std::result::Result<(ExperimentRecord, bool), Failure>;

fn parse_list(text: &str) -> std::result::Result<Vec<f64>, Failure> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Failure::Usage(format!("not a number: {s:?}"))))
        .collect()
}

fn load_spectrum(args: &SpectrumArgs) -> std::result::Result<SchmidtSpectrum, Failure> {
    let values = match (&args.spectrum, &args.spectrum_file) {
        (Some(text), None) => parse_list(text)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let body: String = text.lines().map(|l| l.split('#').next().unwrap_or("")).collect::<Vec<_>>().join("\n");
            parse_list(&body)?
        }
        _ => return Err(Failure::Usage("give exactly one of --spectrum and --spectrum-file".into())),
    };
    Ok(SchmidtSpectrum::with_renormalize(&values, args.renormalize)?)
}

/// Parses `a,b,c` or `a..b..step` (inclusive of `b` when it lies on the step).
fn parse_n_list(text: &str) -> std::result::Result<Vec<u64>, Failure> {
    let bad = || Failure::Usage(format!("bad --n-list {text:?}: expected a,b,c or a..b..step"));
    if text.contains("..") {
        let parts: Vec<u64> = text.split("..").map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        let [lo, hi, step] = parts[..] else { return Err(bad()) };
        if step == 0 || lo > hi {
            return Err(bad());
        }
        Ok((lo..=hi).step_by(step as usize).collect())
    } else {
        text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
    }
}

/// Parses `lo:hi:steps` into `steps` evenly spaced points from `lo` to `hi`.
fn parse_r_grid(text: &str) -> std::result::Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("bad --r-grid {text:?}: expected lo:hi:steps"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, steps] = parts[..] else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    match steps {
        0 => Err(bad()),
        1 => Ok(vec![lo]),
        _ => Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()),
    }
}

fn curves(kind: Option<Kind>) -> Vec<CurveKind> {
    kind.map_or_else(|| CurveKind::ALL.to_vec(), |k| vec![k.into()])
}

fn dispatch(command: &Command) -> Outcome {
    match command {
        Command::Info { spectrum, .. } => Ok((info_record(&load_spectrum(spectrum)?), true)),
        Command::Finite { spectrum, size, .. } => Ok((finite_record(&load_spectrum(spectrum)?, *size)?, true)),
        Command::Yield { spectrum, r, kind, .. } => {
            Ok((yield_record(&load_spectrum(spectrum)?, *r, &curves(*kind))?, true))
        }
        Command::Sweep { spectrum, r_grid, kind, .. } => {
            let p = load_spectrum(spectrum)?;
            let r_grid = match r_grid {
                Some(text) => parse_r_grid(text)?,
                None => default_r_grid(&p, DEFAULT_GRID_POINTS),
            };
            let cfg = ExperimentConfig::new(p, Experiment::Sweep { r_grid, curves: curves(*kind) });
            Ok((run_experiment(&cfg)?, true))
        }
        Command::Converge { spectrum, rate, n_list, kind, tolerance, seed, .. } => {
            let p = load_spectrum(spectrum)?;
            let n_list = parse_n_list(n_list)?;
            let regime = match kind {
                None => infer_regime(&p, *rate)?,
                Some(Kind::Direct) => Regime::Direct,
                Some(Kind::Converse) => Regime::Converse,
                Some(_) => return Err(Failure::Usage("converge accepts --kind direct or converse".into())),
            };
            let mut cfg = ExperimentConfig::new(p, Experiment::Converge { rate: *rate, regime, n_list });
            cfg.seed = *seed;
            cfg.tolerance = *tolerance;
            let mut rec = run_experiment(&cfg)?;
            record_seed(&mut rec, *seed);
            let pass = rec.meta_value("pass") == Some(&concentrate::harness::Cell::Bool(true));
            Ok((rec, pass))
        }
        Command::Nonadd { spectrum, sigma, r, r_grid, .. } => {
            let rho = load_spectrum(spectrum)?;
            let sigma = match sigma {
                Some(text) => SchmidtSpectrum::with_renormalize(&parse_list(text)?, spectrum.renormalize)?,
                None => rho.clone(),
            };
            let r_grid = match (r, r_grid) {
                (Some(r), _) => vec![*r],
                (None, Some(text)) => parse_r_grid(text)?,
                (None, None) => return Err(Failure::Usage("nonadd needs --r or --r-grid".into())),
            };
            let cfg = ExperimentConfig::new(rho, Experiment::NonAdditivity { sigma, r_grid });
            Ok((run_experiment(&cfg)?, true))
        }
        Command::Fidelity { spectrum, size, .. } => Ok((fidelity_record(&load_spectrum(spectrum)?, *size)?, true)),
        Command::Check { seed, tolerance, .. } => {
            let outcome = run_check_suite(*seed, *tolerance);
            Ok((outcome.record, outcome.all_pass))
        }
    }
}

fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Info { output, .. }
        | Command::Finite { output, .. }
        | Command::Yield { output, .. }
        | Command::Sweep { output, .. }
        | Command::Converge { output, .. }
        | Command::Nonadd { output, .. }
        | Command::Fidelity { output, .. }
        | Command::Check { output, .. } => output,
    }
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // A pool built earlier in the same process keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn report(failure: &Failure, json: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let (kind, message, code) = match failure {
        Failure::Usage(msg) => ("Usage", msg.clone(), EXIT_USAGE),
        Failure::Domain(e) => (e.kind(), e.to_string(), EXIT_DOMAIN),
    };
    if json {
        let body = serde_json::json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
        let _ = writeln!(stdout, "{body}");
    } else {
        let _ = writeln!(stderr, "error: {message}");
    }
    code
}

/// Runs one invocation with explicit output streams and returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    if let Err(f) = configure_threads() {
        return report(&f, cli.json_errors, stdout, stderr);
    }
    let (record, pass) = match dispatch(&cli.command) {
        Ok(v) => v,
        Err(f) => return report(&f, cli.json_errors, stdout, stderr),
    };
    let output = output_args(&cli.command);
    let format = match output.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    match &output.out {
        Some(path) => {
            if let Err(e) = record.write_to(path, format) {
                return report(&Failure::Domain(e), cli.json_errors, stdout, stderr);
            }
        }
        None => {
            let _ = stdout.write_all(record.render(format).as_bytes());
        }
    }
    if pass {
        EXIT_OK
    } else {
        EXIT_DOMAIN
    }
}

/// Runs one invocation against the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_list_forms() {
        assert_eq!(parse_n_list("100,200, 500").unwrap(), vec![100, 200, 500]);
        assert_eq!(parse_n_list("10..40..10").unwrap(), vec![10, 20, 30, 40]);
        assert_eq!(parse_n_list("10..35..10").unwrap(), vec![10, 20, 30]);
        assert!(parse_n_list("10..5..1").is_err());
        assert!(parse_n_list("1,x").is_err());
    }

    #[test]
    fn r_grid_form() {
        let grid = parse_r_grid("0.1:0.5:5").unwrap();
        assert_eq!((grid.len(), grid[0], grid[4]), (5, 0.1, 0.5));
        assert_eq!(parse_r_grid("0.3:0.3:1").unwrap(), vec![0.3]);
        assert!(parse_r_grid("0.1:0.5").is_err());
        assert!(parse_r_grid("0.1:0.5:0").is_err());
    }

    #[test]
    fn spectrum_file_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.txt");
        fs::write(&path, "# weights\n0.75\n\n0.25 # tail\n").unwrap();
        let args = SpectrumArgs { spectrum: None, spectrum_file: Some(path), renormalize: false };
        assert_eq!(load_spectrum(&args).unwrap().probs(), &[0.75, 0.25]);
    }
}
