//! `qss` — command-line harness for the secret sharing simulation lab.
//!
//! Subcommands: `run` (one honest protocol run), `attack` (Monte Carlo
//! batches under an attack model), `verify-gates` (simulator invariants),
//! `nullspace` (entangle-and-measure constraint report), `shamir`
//! (classical layer only). All randomness flows from `--seed`; `--canonical`
//! strips wall-clock fields so outputs diff byte-exactly.

mod verify;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use qss_core::adversary::{entangle_measure_nullspace, AttackModel, ConstraintReport};
use qss_core::field::{select_prime, FieldElement, PrimeModulus};
use qss_core::protocol::{run_protocol, ProtocolConfig, ReconstructionResult};
use qss_core::shamir::{
    compute_shadow, distribute_shares, reconstruct_classical, sample_polynomial,
};
use qss_core::transcript::Transcript;
use qss_core::trials::{run_trials_with_records, StatsSummary, TrialPlan, TrialRecord};

#[derive(Parser)]
#[command(
    name = "qss",
    version,
    about = "(t,n) threshold d-level quantum secret sharing simulation lab"
)]
struct Cli {
    /// Strip wall-clock fields for byte-exact output diffing.
    #[arg(long, global = true)]
    canonical: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one honest protocol run and emit result + transcript JSON.
    Run(RunArgs),
    /// Run a Monte Carlo attack batch and emit a statistics summary.
    Attack(AttackArgs),
    /// Run the simulator invariant suite for one dimension.
    VerifyGates(VerifyGatesArgs),
    /// Report the entangle-and-measure constraint nullspace for one prime.
    Nullspace(NullspaceArgs),
    /// Classical share/reconstruct without the quantum layer.
    Shamir(ShamirArgs),
}

#[derive(Args, Clone, Default)]
struct ProtocolFlags {
    /// Prime dimension; omitted = smallest prime in (n, 2n].
    #[arg(long)]
    d: Option<u64>,
    /// Reconstruction threshold t [default: 2].
    #[arg(long)]
    t: Option<usize>,
    /// Participant count n [default: t].
    #[arg(long)]
    n: Option<usize>,
    /// Dealer secret in Z_d [default: 0].
    #[arg(long)]
    secret: Option<u64>,
    /// Reconstruction subset as a comma list, e.g. 1,3. Default: 1..t.
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<usize>>,
    /// Decoys per sequence.
    #[arg(long)]
    m: Option<usize>,
    /// Master seed for every random draw.
    #[arg(long)]
    seed: Option<u64>,
    /// Decoy error-rate threshold in [0, 1].
    #[arg(long)]
    error_threshold: Option<f64>,
    /// JSON config file; explicit flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    protocol: ProtocolFlags,
    /// Write the JSON document to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    InterceptResend,
    DishonestMeasure,
    ForgedResult,
    SongBaseline,
    None,
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    protocol: ProtocolFlags,
    /// Attack model to simulate.
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Number of independent trials.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Dishonest participant for dishonest-measure. Default: the initiator.
    #[arg(long)]
    target: Option<usize>,
    /// Value announced by a forging reconstructor. Default: secret + 1 mod d.
    #[arg(long)]
    forged: Option<u64>,
    /// Write per-trial records as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads for the batch. Default: rayon's global pool.
    #[arg(long)]
    threads: Option<usize>,
    /// Write the JSON document to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyGatesArgs {
    /// Qudit dimension to check (>= 2; primality not required for gates).
    #[arg(long)]
    d: usize,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct NullspaceArgs {
    /// Prime dimension (<= 13).
    #[arg(long)]
    d: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ShamirArgs {
    /// Prime modulus; omitted = smallest prime in (n, 2n].
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    secret: u64,
    /// Reconstruction subset as a comma list. Default: 1..t.
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

type CliResult<T> = Result<T, CliError>;

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

/// JSON config file mirroring [`ProtocolConfig`] plus the subset.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    n: Option<usize>,
    t: Option<usize>,
    d: Option<u64>,
    m: Option<usize>,
    secret: Option<u64>,
    error_threshold: Option<f64>,
    master_seed: Option<u64>,
    subset: Option<Vec<usize>>,
    xs: Option<Vec<u64>>,
}

fn resolve_config(flags: &ProtocolFlags) -> CliResult<(ProtocolConfig, Vec<usize>)> {
    let file: ConfigFile = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| usage(format!("bad config {}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let t = flags.t.or(file.t).unwrap_or(2);
    let n = flags.n.or(file.n).unwrap_or(t);
    let secret = flags.secret.or(file.secret).unwrap_or(0);
    let d = flags.d.or(file.d);
    let m = flags.m.or(file.m).unwrap_or(4);
    let error_threshold = flags.error_threshold.or(file.error_threshold).unwrap_or(0.0);
    let seed = flags.seed.or(file.master_seed).unwrap_or(0);
    let mut config =
        ProtocolConfig::new(n, t, d, m, secret, error_threshold, seed).map_err(usage)?;
    if let Some(xs) = file.xs {
        config = config.with_points(xs).map_err(usage)?;
    }
    let subset = flags
        .subset
        .clone()
        .or(file.subset)
        .unwrap_or_else(|| (1..=t).collect());
    config.validate_subset(&subset).map_err(usage)?;
    Ok((config, subset))
}

fn wall_clock(canonical: bool) -> Option<u128> {
    if canonical {
        None
    } else {
        Some(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
        )
    }
}

fn emit(doc: &impl Serialize, out: Option<&PathBuf>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(doc).map_err(runtime)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct RunDocument<'a> {
    schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at_ms: Option<u128>,
    config: &'a ProtocolConfig,
    subset: &'a [usize],
    result: &'a ReconstructionResult,
    transcript: &'a Transcript,
}

fn cmd_run(args: &RunArgs, canonical: bool) -> CliResult<ExitCode> {
    let (config, subset) = resolve_config(&args.protocol)?;
    let (transcript, result) = run_protocol(&config, &subset).map_err(runtime)?;
    let doc = RunDocument {
        schema: "qss-run/1",
        generated_at_ms: wall_clock(canonical),
        config: &config,
        subset: &subset,
        result: &result,
        transcript: &transcript,
    };
    emit(&doc, args.out.as_ref())?;
    if result.aborted || !result.hash_ok {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct AttackDocument<'a> {
    schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at_ms: Option<u128>,
    model: AttackModel,
    config: &'a ProtocolConfig,
    subset: &'a [usize],
    trials_seed: u64,
    summary: &'a StatsSummary,
}

fn write_csv(
    path: &PathBuf,
    model: AttackModel,
    config: &ProtocolConfig,
    records: &[TrialRecord],
) -> CliResult<()> {
    let mut out = Vec::new();
    writeln!(out, "model,d,t,n,m,trial,detected,recovered,secret,match").map_err(runtime)?;
    for r in records {
        let recovered = r.recovered.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            model.name(),
            config.d.get(),
            config.t,
            config.n,
            config.m,
            r.trial,
            r.detected,
            recovered,
            config.secret,
            r.matches_secret
        )
        .map_err(runtime)?;
    }
    fs::write(path, out).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn cmd_attack(args: &AttackArgs, canonical: bool) -> CliResult<ExitCode> {
    let (config, subset) = resolve_config(&args.protocol)?;
    let model = match args.model {
        ModelArg::None => AttackModel::None,
        ModelArg::InterceptResend => AttackModel::InterceptResend,
        ModelArg::SongBaseline => AttackModel::SongBaseline,
        ModelArg::DishonestMeasure => {
            let target = args.target.unwrap_or(subset[0]);
            if !subset.contains(&target) {
                return Err(usage(format!(
                    "--target {target} is not in the reconstruction subset {subset:?}"
                )));
            }
            AttackModel::DishonestMeasure { target }
        }
        ModelArg::ForgedResult => {
            let forged = args
                .forged
                .unwrap_or((config.secret + 1) % config.d.get());
            if forged >= config.d.get() {
                return Err(usage(format!("--forged {forged} is not in Z_{}", config.d)));
            }
            AttackModel::ForgedResult { forged }
        }
    };
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let plan = TrialPlan {
        base_config: config.clone(),
        subset: subset.clone(),
        attack: model,
        trials: args.trials,
        master_seed: config.master_seed,
    };
    let run = || run_trials_with_records(&plan);
    let (summary, records) = match args.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(runtime)?
            .install(run),
        None => run(),
    }
    .map_err(runtime)?;
    if let Some(path) = &args.csv {
        write_csv(path, model, &config, &records)?;
    }
    let doc = AttackDocument {
        schema: "qss-attack/1",
        generated_at_ms: wall_clock(canonical),
        model,
        config: &config,
        subset: &subset,
        trials_seed: plan.master_seed,
        summary: &summary,
    };
    emit(&doc, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_gates(args: &VerifyGatesArgs) -> CliResult<ExitCode> {
    if args.d < 2 {
        return Err(usage("--d must be at least 2"));
    }
    if args.d > 64 {
        return Err(usage("--d larger than 64 is not supported by the check suite"));
    }
    let checks = verify::run_gate_checks(args.d, args.seed);
    let mut all_pass = true;
    println!("{:<40} {:<6} detail", "check", "result");
    for check in &checks {
        all_pass &= check.pass;
        println!(
            "{:<40} {:<6} {}",
            check.name,
            if check.pass { "pass" } else { "FAIL" },
            check.detail
        );
    }
    if all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

#[derive(Serialize)]
struct NullspaceDocument {
    schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at_ms: Option<u128>,
    report: ConstraintReport,
}

fn cmd_nullspace(args: &NullspaceArgs, canonical: bool) -> CliResult<ExitCode> {
    let report = entangle_measure_nullspace(args.d).map_err(usage)?;
    let doc = NullspaceDocument {
        schema: "qss-nullspace/1",
        generated_at_ms: wall_clock(canonical),
        report,
    };
    emit(&doc, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ShamirShare {
    x: u64,
    y: u64,
}

#[derive(Serialize)]
struct ShamirShadow {
    participant: usize,
    x: u64,
    s: u64,
}

#[derive(Serialize)]
struct ShamirDocument {
    schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at_ms: Option<u128>,
    d: u64,
    t: usize,
    n: usize,
    secret: u64,
    xs: Vec<u64>,
    shares: Vec<ShamirShare>,
    subset: Vec<usize>,
    shadows: Vec<ShamirShadow>,
    shadow_sum: u64,
    reconstructed: u64,
}

fn cmd_shamir(args: &ShamirArgs, canonical: bool) -> CliResult<ExitCode> {
    let d = match args.d {
        Some(v) => PrimeModulus::new(v).map_err(usage)?,
        None => select_prime(args.n as u64).map_err(usage)?,
    };
    if args.t < 2 || args.t > args.n {
        return Err(usage(format!(
            "threshold must satisfy 2 <= t <= n, got t={}, n={}",
            args.t, args.n
        )));
    }
    if args.n as u64 > d.get() - 1 {
        return Err(usage(format!(
            "at most d-1 = {} participants fit in Z_{}",
            d.get() - 1,
            d
        )));
    }
    if args.secret >= d.get() {
        return Err(usage(format!("secret {} is not in Z_{}", args.secret, d)));
    }
    let subset = args
        .subset
        .clone()
        .unwrap_or_else(|| (1..=args.t).collect());
    if subset.len() != args.t {
        return Err(usage(format!(
            "subset must have exactly t={} members, got {}",
            args.t,
            subset.len()
        )));
    }
    for (i, &p) in subset.iter().enumerate() {
        if p == 0 || p > args.n || subset[i + 1..].contains(&p) {
            return Err(usage(format!("bad subset member {p}")));
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let polynomial =
        sample_polynomial(d.element(args.secret), args.t, &mut rng).map_err(usage)?;
    let points: Vec<FieldElement> = (1..=args.n as u64).map(|v| d.element(v)).collect();
    let shares = distribute_shares(&polynomial, &points).map_err(runtime)?;

    let subset_points: Vec<FieldElement> =
        subset.iter().map(|&p| d.element(p as u64)).collect();
    let subset_shares: Vec<_> = subset.iter().map(|&p| shares[p - 1]).collect();
    let mut shadow_sum = d.element(0);
    let mut shadows = Vec::new();
    for (&p, share) in subset.iter().zip(&subset_shares) {
        let shadow = compute_shadow(share, &subset_points).map_err(runtime)?;
        shadow_sum = shadow_sum + shadow.s;
        shadows.push(ShamirShadow {
            participant: p,
            x: share.x.value(),
            s: shadow.s.value(),
        });
    }
    let reconstructed = reconstruct_classical(&subset_shares).map_err(runtime)?;

    let doc = ShamirDocument {
        schema: "qss-shamir/1",
        generated_at_ms: wall_clock(canonical),
        d: d.get(),
        t: args.t,
        n: args.n,
        secret: args.secret,
        xs: points.iter().map(|x| x.value()).collect(),
        shares: shares
            .iter()
            .map(|s| ShamirShare { x: s.x.value(), y: s.y.value() })
            .collect(),
        subset,
        shadows,
        shadow_sum: shadow_sum.value(),
        reconstructed: reconstructed.value(),
    };
    emit(&doc, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> CliResult<ExitCode> {
    match &cli.command {
        Command::Run(args) => cmd_run(args, cli.canonical),
        Command::Attack(args) => cmd_attack(args, cli.canonical),
        Command::VerifyGates(args) => cmd_verify_gates(args),
        Command::Nullspace(args) => cmd_nullspace(args, cli.canonical),
        Command::Shamir(args) => cmd_shamir(args, cli.canonical),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
