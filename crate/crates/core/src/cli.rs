//! Command-line front end: `construct`, `verify` and `inspect`.
//!
//! Exit status: 0 when every claimed property was verified, 1 when the
//! verifier found a violation (or a system failed validation), 2 on errors,
//! 3 when a point set was written without being verified.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::curve::{
    construct_for_grid_with, validate_system, CurveError, CurveSystem, Mode, SystemManifest,
    TweakPolicy, ValidationReport,
};
use crate::field::{FieldContext, PrimeThreshold};
use crate::points::{
    best_translation, eval_curve, parse_points, to_csv, to_json, PointFile, TranslationOptions,
    TranslationOutcome, TranslationStrategy, DEFAULT_SAMPLES, DEFAULT_TRANSLATION_BUDGET,
};
use crate::verify::{
    verify, Incidence, Ring, VerificationReport, VerifyError, VerifyMode, VerifyOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_UNVERIFIED: i32 = 3;

/// Default cap on subsets examined by `verify` and by `construct`'s self-check.
pub const DEFAULT_VERIFY_BUDGET: u64 = 100_000_000;

#[derive(Debug, Parser)]
#[command(name = "spherefree", version, about = "Grid point sets with no d+2 points on a sphere or plane")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "SPHEREFREE_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a point set in [n]^d and write it to a directory.
    Construct(ConstructArgs),
    /// Compute the most points on one sphere-or-plane for a point file.
    Verify(VerifyArgs),
    /// Print the polynomial system and its validation report.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Full,
    Strict,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Full => Mode::Full,
            ModeArg::Strict => Mode::Strict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TweakArg {
    /// Only the adjustment with g vanishing at zero; degenerate primes are skipped.
    Standard,
    /// Fall back to the extended adjustment when the first one degenerates.
    Fallback,
}

impl From<TweakArg> for TweakPolicy {
    fn from(t: TweakArg) -> TweakPolicy {
        match t {
            TweakArg::Standard => TweakPolicy::StandardOnly,
            TweakArg::Fallback => TweakPolicy::WithFallback,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationArg {
    Exhaustive,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RingArg {
    Int,
    Modp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyModeArg {
    Oracle,
    Fast,
}

impl From<VerifyModeArg> for VerifyMode {
    fn from(m: VerifyModeArg) -> VerifyMode {
        match m {
            VerifyModeArg::Oracle => VerifyMode::Oracle,
            VerifyModeArg::Fast => VerifyMode::Fast,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConstructArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=11))]
    pub d: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    #[arg(long, value_enum, default_value = "full")]
    pub mode: ModeArg,
    /// Output directory.
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub translation: TranslationArg,
    /// Largest translation space searched exhaustively.
    #[arg(long, default_value_t = DEFAULT_TRANSLATION_BUDGET)]
    pub budget: u64,
    /// Translations drawn when sampling.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    /// Require p > 10 (d+1)! instead of p > (d+1)!.
    #[arg(long)]
    pub factor10: bool,
    #[arg(long, value_enum, default_value = "fallback")]
    pub tweak: TweakArg,
    /// Write the points without checking them first.
    #[arg(long)]
    pub skip_verify: bool,
    /// Subset cap for the self-check.
    #[arg(long, default_value_t = DEFAULT_VERIFY_BUDGET)]
    pub verify_budget: u64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// CSV or JSON point file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Dimension; taken from the points when omitted.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_enum, default_value = "int")]
    pub ring: RingArg,
    /// Prime for `--ring modp`; read from a JSON manifest when omitted.
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, value_enum, default_value = "oracle")]
    pub mode: VerifyModeArg,
    /// Also require no d+1 points on a plane.
    #[arg(long)]
    pub plane_only: bool,
    /// Write the report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_VERIFY_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub d: usize,
    /// Grid side; the prime is the first admissible one at or above it.
    #[arg(long, conflicts_with = "p", required_unless_present = "p")]
    pub n: Option<u64>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, value_enum, default_value = "full")]
    pub mode: ModeArg,
    #[arg(long)]
    pub factor10: bool,
    #[arg(long, value_enum, default_value = "fallback")]
    pub tweak: TweakArg,
}

/// Verification summary stored in manifests (no timings).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub ring: String,
    pub p: Option<u64>,
    pub mode: VerifyMode,
    pub target: String,
    pub max_on_sphere_or_plane: Incidence,
    pub max_on_plane: Option<Incidence>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: ConstructArgs,
    pub p: u64,
    pub alpha: u64,
    pub threshold: PrimeThreshold,
    pub rejected_primes: Vec<u64>,
    pub system: SystemManifest,
    pub modular_points: usize,
    pub domain_size: usize,
    pub self_intersections: Vec<(u64, u64)>,
    pub translation: TranslationOutcome,
    pub grid_points: usize,
    pub verification: Option<VerificationSummary>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
    #[error(transparent)]
    Points(#[from] crate::points::PointsError),
    #[error(transparent)]
    Verify(#[from] crate::verify::VerifyError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("constructed system failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error("{0}")]
    Usage(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn threshold(factor10: bool) -> PrimeThreshold {
    if factor10 {
        PrimeThreshold::TenFactorial
    } else {
        PrimeThreshold::Factorial
    }
}

fn signed(points: &[Vec<u64>]) -> Vec<Vec<i64>> {
    points.iter().map(|x| x.iter().map(|&c| c as i64).collect()).collect()
}

fn summarize(report: &VerificationReport, target: &str) -> VerificationSummary {
    VerificationSummary {
        ring: report.ring.clone(),
        p: report.p,
        mode: report.mode,
        target: target.to_string(),
        max_on_sphere_or_plane: report.max_on_sphere_or_plane.clone(),
        max_on_plane: report.max_on_plane.clone(),
        passed: report.passed(),
    }
}

pub fn construct(args: &ConstructArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let d = args.d as usize;
    let mode = Mode::from(args.mode);
    let threshold = threshold(args.factor10);
    let built = construct_for_grid_with(args.n, d, mode, threshold, args.tweak.into())?;
    for p in &built.rejected_primes {
        eprintln!("p = {p}: adjustment degenerate, moving to the next prime");
    }
    let system = built.system;
    let report = validate_system(&system);
    if !report.passed() {
        return Err(CliError::Invalid(report));
    }
    let set = eval_curve(&system, mode)?;
    let options = TranslationOptions {
        strategy: match args.translation {
            TranslationArg::Exhaustive => TranslationStrategy::Exhaustive,
            TranslationArg::Sample => TranslationStrategy::Sample,
        },
        budget: args.budget,
        samples: args.samples,
        seed: args.seed,
    };
    let (outcome, grid) = best_translation(&set, args.n, &options)?;
    eprintln!("construction and translation: {:.2?}", start.elapsed());

    let verification = if args.skip_verify {
        None
    } else {
        let t0 = Instant::now();
        let ring = Ring::ModP(FieldContext::prime_field(system.ctx.p())?);
        let verify_options = VerifyOptions {
            mode: VerifyMode::Fast,
            plane_only: mode == Mode::Strict,
            budget: Some(args.verify_budget),
        };
        let report = verify(&signed(&set.points), d, ring, verify_options).map_err(|e| match e {
            VerifyError::BudgetExceeded { .. } => {
                CliError::Usage(format!("self-check: {e}; pass --skip-verify or raise --verify-budget"))
            }
            e => e.into(),
        })?;
        eprintln!("self-check over F_{}: {:.2?}", system.ctx.p(), t0.elapsed());
        Some(summarize(&report, "modular"))
    };

    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: args.clone(),
        p: system.ctx.p(),
        alpha: system.ctx.alpha(),
        threshold,
        rejected_primes: built.rejected_primes,
        system: system.manifest(),
        modular_points: set.len(),
        domain_size: set.domain_size,
        self_intersections: set.self_intersections.clone(),
        translation: outcome.clone(),
        grid_points: grid.points.len(),
        verification: verification.clone(),
    };
    let manifest_value = serde_json::to_value(&manifest).map_err(crate::points::PointsError::from)?;

    let out = &args.out;
    fs::create_dir_all(out).map_err(io_err(out))?;
    write(&out.join("points.csv"), &to_csv(&grid.points))?;
    let grid_file = PointFile { points: signed(&grid.points), manifest: Some(manifest_value.clone()) };
    write(&out.join("points.json"), &to_json(&grid_file)?)?;
    write(&out.join("modular.csv"), &to_csv(&set.points))?;
    let modular_file = PointFile { points: signed(&set.points), manifest: Some(manifest_value) };
    write(&out.join("modular.json"), &to_json(&modular_file)?)?;
    write(&out.join("manifest.json"), &to_json(&manifest)?)?;

    println!("p = {}, alpha = {}, mode = {}", system.ctx.p(), system.ctx.alpha(), mode);
    println!(
        "modular points: {} (domain {}, self-intersections {})",
        set.len(),
        set.domain_size,
        set.self_intersections.len()
    );
    let search = if outcome.exhaustive { "exhaustive" } else { "sampled" };
    println!("translation v = {:?} ({search}, {} candidates)", outcome.v, outcome.candidates_examined);
    println!("grid points in [{}]^{d}: {} (first-moment floor {})", args.n, grid.points.len(), outcome.floor);
    match &verification {
        None => {
            println!("not verified");
            Ok(EXIT_UNVERIFIED)
        }
        Some(v) => {
            println!("max on a sphere or plane over F_p: {} (bound {})", v.max_on_sphere_or_plane.count, d + 1);
            if let Some(plane) = &v.max_on_plane {
                println!("max on a plane over F_p: {} (bound {d})", plane.count);
            }
            println!("{}", if v.passed { "PASS" } else { "FAIL" });
            Ok(if v.passed { EXIT_OK } else { EXIT_VIOLATION })
        }
    }
}

pub fn verify_cmd(args: &VerifyArgs) -> Result<i32, CliError> {
    let text = fs::read_to_string(&args.input).map_err(io_err(&args.input))?;
    let file = parse_points(&text)?;
    let d = match (args.d, file.points.first()) {
        (Some(d), _) => d,
        (None, Some(x)) => x.len(),
        (None, None) => return Err(CliError::Usage("empty point file; pass --d".into())),
    };
    let ring = match args.ring {
        RingArg::Int => Ring::Integers,
        RingArg::Modp => {
            let from_manifest =
                file.manifest.as_ref().and_then(|m| m.get("p")).and_then(serde_json::Value::as_u64);
            let p = args.p.or(from_manifest).ok_or_else(|| {
                CliError::Usage("--ring modp needs --p or a JSON file with a manifest".into())
            })?;
            Ring::ModP(FieldContext::prime_field(p)?)
        }
    };
    let options = VerifyOptions { mode: args.mode.into(), plane_only: args.plane_only, budget: Some(args.budget) };
    let report = verify(&file.points, d, ring, options)?;
    println!("{report}");
    let show = |label: &str, inc: &Incidence| {
        let pts: Vec<String> = inc
            .witness
            .iter()
            .map(|&i| format!("({})", file.points[i].iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        println!("{label} witness: {}", pts.join(" "));
    };
    if report.max_on_sphere_or_plane.count > d + 1 {
        show("sphere-or-plane", &report.max_on_sphere_or_plane);
    }
    if let Some(plane) = report.max_on_plane.as_ref().filter(|i| i.count > d) {
        show("plane", plane);
    }
    if let Some(path) = &args.report {
        write(path, &to_json(&report)?)?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VIOLATION })
}

fn print_system(system: &CurveSystem) {
    let ctx = system.ctx;
    println!("p = {}, alpha = {}, d = {}, mode = {}", ctx.p(), ctx.alpha(), system.d(), system.mode);
    println!("matrix A (corner sign {:+}):", system.matrix.sign_choice);
    for row in &system.matrix.entries {
        println!("  {}", row.iter().map(|x| format!("{x:>4}")).collect::<String>());
    }
    println!("lambda = {:?}", system.lambda);
    for (i, fi) in system.f.iter().enumerate() {
        println!("f_{} = {fi}", i + 1);
    }
    println!("g = g_{} = {}", system.g_index, system.g);
    println!("h = {}", system.h);
    if let Some(t) = &system.tweak {
        println!("adjustment ({:?}): mu = {:?}, nu = {}, second nu = {}", t.variant, t.mu, t.nu, t.second_nu);
    }
}

pub fn inspect(args: &InspectArgs) -> Result<i32, CliError> {
    let ctx = match (args.p, args.n) {
        (Some(p), _) => FieldContext::new(p, args.d)?,
        (None, Some(n)) => FieldContext::for_grid(n, args.d, threshold(args.factor10))?,
        (None, None) => return Err(CliError::Usage("pass --n or --p".into())),
    };
    let mode = Mode::from(args.mode);
    let full = CurveSystem::build(ctx, Mode::Full)?;
    let system = match mode {
        Mode::Full => full,
        Mode::Strict => match full.apply_nice_tweak() {
            Ok(s) => s,
            Err(CurveError::DegenerateTweak { p, report }) => {
                println!("DegenerateTweak at p = {p}: the adjustment with g = g_{} fails", full.g_index);
                for c in report.failures() {
                    println!("  {}: {}", c.name, c.detail);
                }
                if args.tweak == TweakArg::Standard {
                    print_system(&full);
                    return Ok(EXIT_VIOLATION);
                }
                println!("trying the extended adjustment");
                match full.apply_alternative_tweak() {
                    Ok(s) => s,
                    Err(e) => {
                        println!("{e}");
                        print_system(&full);
                        return Ok(EXIT_VIOLATION);
                    }
                }
            }
            Err(e) => return Err(e.into()),
        },
    };
    print_system(&system);
    let report = validate_system(&system);
    println!("{report}");
    Ok(if report.passed() { EXIT_OK } else { EXIT_VIOLATION })
}

pub fn run(cli: Cli) -> i32 {
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    }
    let result = match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Inspect(a) => inspect(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_ERROR
    })
}
