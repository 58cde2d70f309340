//! Command-line front end: verification suites, structure classification,
//! fluctuation averages, and accelerated-frame sweep tables.
//!
//! Exit codes: 0 on success, 1 on a checked-domain failure (failed
//! verification check, axiom violation, functional precondition), 2 on
//! usage or parse failure. CSV output carries 17 significant digits so
//! identical inputs reproduce byte-identical files.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fluctgeom::config::Config;
use fluctgeom::fluct::{
    fluctuation_metric, hermitian_average, riemann_average, symplectic_average, BoxDomain,
    FluctError, FluctuationMetric, ThermoState,
};
use fluctgeom::gcs::Gcs;
use fluctgeom::matdoc::parse_matrix_doc;
use fluctgeom::nalgebra::DMatrix;
use fluctgeom::num_complex::Complex;
use fluctgeom::quad::{Estimate, QuadError, QuadratureSpec};
use fluctgeom::suite;
use fluctgeom::unruh::{
    delta_xi, thermal_exponent, unruh_phase, unruh_temperature, BFieldSpec,
    ContractionConvention, FrameSpec, PhysicalConstants, TrajectorySpec,
    DEFAULT_LINE_INTEGRAL_STEPS,
};

#[derive(Parser)]
#[command(
    name = "fluctgeom",
    version,
    about = "Geometric fluctuation toolkit: verification, classification, averages, sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every module property suite and report PASS/FAIL per check
    Verify(VerifyArgs),
    /// Read a matrix document and print the type integer of the structure
    Classify(ClassifyArgs),
    /// Evaluate an average functional and emit CSV rows
    Average(AverageArgs),
    /// Emit a CSV sweep table of the accelerated-frame thermal chain
    Unruh(UnruhArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Fibre half-dimension for the randomized suites
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Seed for the randomized suites
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Optional matrix document checked as a candidate structure
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Matrix document holding the 4n x 4n candidate
    #[arg(long)]
    input: PathBuf,
    /// Write the result here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Functional {
    Riemann,
    Symplectic,
    Hermitian,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    #[value(name = "tensor-grid")]
    TensorGrid,
    #[value(name = "monte-carlo")]
    MonteCarlo,
}

#[derive(Args)]
struct AverageArgs {
    /// Key-value configuration file (flags override its entries)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Which average functional to evaluate
    #[arg(long, value_enum)]
    functional: Option<Functional>,
    /// Built-in integrand: one, T2, q1 or absz2
    #[arg(long)]
    integrand: Option<String>,
    /// Quadrature backend
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Grid points per axis
    #[arg(long)]
    points: Option<usize>,
    /// Monte Carlo sample count
    #[arg(long)]
    samples: Option<usize>,
    /// Monte Carlo seed
    #[arg(long)]
    seed: Option<u64>,
    /// Write CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Units {
    Natural,
    Si,
}

#[derive(Copy, Clone, Debug)]
struct SweepRange {
    start: f64,
    stop: f64,
    count: usize,
}

fn parse_sweep(raw: &str) -> Result<SweepRange, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err("sweep must be start:stop:count".into());
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad sweep start {:?}", parts[0]))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad sweep stop {:?}", parts[1]))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad sweep count {:?}", parts[2]))?;
    if count < 1 {
        return Err("sweep count must be at least 1".into());
    }
    if !(start.is_finite() && stop.is_finite() && start <= stop) {
        return Err("sweep bounds must be finite with start <= stop".into());
    }
    Ok(SweepRange { start, stop, count })
}

#[derive(Args)]
struct UnruhArgs {
    /// Particle mass
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Laboratory time at which the chain is evaluated
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Constant B-field coefficient for the line-integral column
    #[arg(long = "B", default_value_t = 2.0 / 3.0)]
    b: f64,
    /// Acceleration sweep start:stop:count
    #[arg(long, value_parser = parse_sweep, default_value = "1:10:10")]
    sweep: SweepRange,
    /// Unit system for the physical constants
    #[arg(long, value_enum, default_value_t = Units::Natural)]
    units: Units,
    /// Write CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

enum CliError {
    /// Exit code 2: bad flags, malformed files, invalid configuration.
    Usage(String),
    /// Exit code 1: a checked domain failure.
    Domain(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }
    fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }
}

fn fluct_error(err: FluctError) -> CliError {
    match err {
        FluctError::Quadrature(q) => match q {
            QuadError::BadPoints(_) | QuadError::BadSamples(_) | QuadError::BadTruncation(_) => {
                CliError::usage(q.to_string())
            }
            other => CliError::domain(other.to_string()),
        },
        other => CliError::domain(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Average(args) => cmd_average(args),
        Command::Unruh(args) => cmd_unruh(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let mut report = suite::run_all(args.n as usize, args.seed);
    if let Some(path) = &args.input {
        let doc = parse_matrix_doc(&read_file(path)?).map_err(|e| CliError::usage(e.to_string()))?;
        let mat = doc
            .expect_doubled()
            .map_err(|e| CliError::usage(e.to_string()))?;
        let candidate =
            Gcs::candidate(mat.clone()).map_err(|e| CliError::usage(e.to_string()))?;
        report.extend(suite::candidate_checks(&candidate));
    }

    let mut text = String::new();
    for check in &report.checks {
        let _ = writeln!(text, "{check}");
    }
    let total = report.checks.len();
    if report.all_pass() {
        let _ = writeln!(
            text,
            "ALL PASS ({total} checks, n = {}, seed = {})",
            args.n, args.seed
        );
        emit(&args.output, &text)
    } else {
        let failed = report.failures();
        let _ = writeln!(
            text,
            "FAILED {} of {total} checks: {}",
            failed.len(),
            failed.join(", ")
        );
        emit(&args.output, &text)?;
        Err(CliError::domain(format!(
            "{} of {total} checks failed",
            failed.len()
        )))
    }
}

fn cmd_classify(args: ClassifyArgs) -> Result<(), CliError> {
    let doc = parse_matrix_doc(&read_file(&args.input)?)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let mat = doc
        .expect_doubled()
        .map_err(|e| CliError::usage(e.to_string()))?;
    let candidate = Gcs::candidate(mat.clone()).map_err(|e| CliError::usage(e.to_string()))?;

    let report = candidate.verify();
    if !report.all_pass() {
        return Err(CliError::domain(format!(
            "matrix violates structure axioms: {}",
            report.failures().join(", ")
        )));
    }
    let k = candidate
        .gcs_type()
        .map_err(|e| CliError::domain(e.to_string()))?;
    emit(&args.output, &format!("type k = {k}\n"))
}

struct AverageSetup {
    functional: Functional,
    integrand: String,
    spec: QuadratureSpec,
    config: Config,
}

fn resolve_average(args: &AverageArgs) -> Result<AverageSetup, CliError> {
    let config = match &args.input {
        Some(path) => {
            Config::parse(&read_file(path)?).map_err(|e| CliError::usage(e.to_string()))?
        }
        None => Config::default(),
    };
    let bad_value = |e: fluctgeom::config::ConfigError| CliError::usage(e.to_string());

    let functional = match args.functional {
        Some(f) => f,
        None => match config.get_str("functional") {
            Some("riemann") => Functional::Riemann,
            Some("symplectic") => Functional::Symplectic,
            Some("hermitian") => Functional::Hermitian,
            Some(other) => return Err(CliError::usage(format!("unknown functional {other:?}"))),
            None => return Err(CliError::usage("no functional selected")),
        },
    };
    let integrand = match &args.integrand {
        Some(name) => name.clone(),
        None => config
            .get_str("integrand")
            .ok_or_else(|| CliError::usage("no integrand selected"))?
            .to_string(),
    };

    let scheme = match args.scheme {
        Some(s) => s,
        None => match config.get_str("scheme") {
            Some("tensor-grid") | None => SchemeArg::TensorGrid,
            Some("monte-carlo") => SchemeArg::MonteCarlo,
            Some(other) => return Err(CliError::usage(format!("unknown scheme {other:?}"))),
        },
    };
    let points = match args.points {
        Some(p) => p,
        None => config.get_usize("points").map_err(bad_value)?.unwrap_or(513),
    };
    let samples = match args.samples {
        Some(s) => s,
        None => config
            .get_usize("samples")
            .map_err(bad_value)?
            .unwrap_or(1_000_000),
    };
    let seed = match args.seed {
        Some(s) => s,
        None => config.get_u64("seed").map_err(bad_value)?.unwrap_or(42),
    };
    let truncation = config
        .get_f64("truncation")
        .map_err(bad_value)?
        .unwrap_or(fluctgeom::quad::DEFAULT_TRUNCATION_SIGMAS);

    let spec = match scheme {
        SchemeArg::TensorGrid => QuadratureSpec::grid(points),
        SchemeArg::MonteCarlo => QuadratureSpec::monte_carlo(samples, seed),
    }
    .with_truncation(truncation);
    spec.validate().map_err(|e| CliError::usage(e.to_string()))?;

    Ok(AverageSetup {
        functional,
        integrand,
        spec,
        config,
    })
}

/// Metric coefficients: direct g_TT/g_VV keys win, otherwise they are
/// derived from a thermodynamic state given by T, V, C_V, dPdV_T (P, S,
/// k_B optional), defaulting to the unit metric.
fn riemann_metric(config: &Config) -> Result<FluctuationMetric<f64>, CliError> {
    let bad_value = |e: fluctgeom::config::ConfigError| CliError::usage(e.to_string());
    if config.contains("g_TT") || config.contains("g_VV") {
        let g_tt = config.get_f64("g_TT").map_err(bad_value)?.unwrap_or(1.0);
        let g_vv = config.get_f64("g_VV").map_err(bad_value)?.unwrap_or(1.0);
        return FluctuationMetric::new(g_tt, g_vv).map_err(fluct_error);
    }
    if config.contains("T") {
        let t = config.require_f64("T").map_err(bad_value)?;
        let v = config.get_f64("V").map_err(bad_value)?.unwrap_or(1.0);
        let p = config.get_f64("P").map_err(bad_value)?.unwrap_or(1.0);
        let s = config.get_f64("S").map_err(bad_value)?.unwrap_or(1.0);
        let c_v = config.require_f64("C_V").map_err(bad_value)?;
        let dp_dv = config.require_f64("dPdV_T").map_err(bad_value)?;
        let k_b = config.get_f64("k_B").map_err(bad_value)?.unwrap_or(1.0);
        let state = ThermoState::new(t, v, p, s, c_v, dp_dv, k_b).map_err(fluct_error)?;
        return Ok(fluctuation_metric(&state));
    }
    Ok(FluctuationMetric::new(1.0, 1.0).expect("unit metric is positive"))
}

fn cmd_average(args: AverageArgs) -> Result<(), CliError> {
    let setup = resolve_average(&args)?;
    let bad_value = |e: fluctgeom::config::ConfigError| CliError::usage(e.to_string());
    let unknown = || {
        CliError::usage(format!(
            "unknown integrand {:?} for this functional (built-ins: one, T2, q1, absz2)",
            setup.integrand
        ))
    };

    let estimate: Estimate<f64> = match setup.functional {
        Functional::Riemann => {
            let metric = riemann_metric(&setup.config)?;
            match setup.integrand.as_str() {
                "one" => riemann_average(|_, _| 1.0, &metric, &setup.spec),
                "T2" => riemann_average(|t, _| t * t, &metric, &setup.spec),
                _ => return Err(unknown()),
            }
            .map_err(fluct_error)?
        }
        Functional::Symplectic => {
            let n = setup.config.get_usize("n").map_err(bad_value)?.unwrap_or(1);
            if n == 0 {
                return Err(CliError::usage("n must be at least 1"));
            }
            let lo = setup
                .config
                .get_f64("box_lo")
                .map_err(bad_value)?
                .unwrap_or(0.0);
            let hi = setup
                .config
                .get_f64("box_hi")
                .map_err(bad_value)?
                .unwrap_or(1.0);
            let omega = fluctgeom::SymplecticForm64::standard(n);
            let domain = BoxDomain::cube(2 * n, lo, hi).map_err(fluct_error)?;
            match setup.integrand.as_str() {
                "one" => symplectic_average(|_| 1.0, &omega, &domain, &setup.spec),
                "q1" => symplectic_average(|x| x[1], &omega, &domain, &setup.spec),
                _ => return Err(unknown()),
            }
            .map_err(fluct_error)?
        }
        Functional::Hermitian => {
            let h = setup.config.get_f64("h").map_err(bad_value)?.unwrap_or(1.0);
            let hm = DMatrix::from_element(1, 1, Complex::new(h, 0.0));
            match setup.integrand.as_str() {
                "one" => hermitian_average(|_| 1.0, &hm, &setup.spec),
                "absz2" => hermitian_average(|z| z[0].norm_sqr(), &hm, &setup.spec),
                _ => return Err(unknown()),
            }
            .map_err(fluct_error)?
        }
    };

    let mut text = String::from("name,value,stderr\n");
    let _ = writeln!(
        text,
        "{},{:.16e},{:.16e}",
        setup.integrand, estimate.value, estimate.std_err
    );
    emit(&args.output, &text)
}

fn cmd_unruh(args: UnruhArgs) -> Result<(), CliError> {
    if !(args.m > 0.0 && args.m.is_finite()) {
        return Err(CliError::usage("m must be strictly positive"));
    }
    if !(args.t >= 0.0 && args.t.is_finite()) {
        return Err(CliError::usage("t must be nonnegative"));
    }
    if !args.b.is_finite() {
        return Err(CliError::usage("B must be finite"));
    }
    if args.sweep.start <= 0.0 {
        return Err(CliError::usage(
            "sweep accelerations must be strictly positive (the thermal exponent diverges at T = 0)",
        ));
    }
    let pc = match args.units {
        Units::Natural => PhysicalConstants::<f64>::natural(),
        Units::Si => PhysicalConstants::<f64>::si(),
    };

    let mut text = String::from("alpha,T,phase,delta_xi,thermal_exponent\n");
    for idx in 0..args.sweep.count {
        let alpha = if args.sweep.count == 1 {
            args.sweep.start
        } else {
            let frac = idx as f64 / (args.sweep.count - 1) as f64;
            args.sweep.start + frac * (args.sweep.stop - args.sweep.start)
        };
        let fs = FrameSpec::new(alpha, args.m).map_err(|e| CliError::domain(e.to_string()))?;
        let temperature =
            unruh_temperature(alpha, &pc).map_err(|e| CliError::domain(e.to_string()))?;
        let phase = unruh_phase(&fs, args.t, &pc);
        let traj = TrajectorySpec::uniform_acceleration(&fs);
        let dxi = delta_xi(
            &BFieldSpec::constant(args.b),
            &traj,
            args.t,
            DEFAULT_LINE_INTEGRAL_STEPS,
            ContractionConvention::PaperComponents,
        )
        .map_err(|e| CliError::domain(e.to_string()))?;
        let exponent = thermal_exponent(args.m, temperature, &pc)
            .map_err(|e| CliError::domain(e.to_string()))?;
        let _ = writeln!(
            text,
            "{alpha:.16e},{temperature:.16e},{phase:.16e},{dxi:.16e},{exponent:.16e}"
        );
    }
    emit(&args.output, &text)
}

impl FromStr for SweepRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sweep(s)
    }
}
