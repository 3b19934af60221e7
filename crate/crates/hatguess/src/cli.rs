//! The `hatguess` command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a counterexample or
//! defeating coloring was produced, 3 nothing found or a budget refused.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hatguess_core::book::{
    build_onto_family, construct_book_strategy, verify_onto_family, BookParameters, OntoMode, OntoOptions,
};
use hatguess_core::clique::{capacity, check_refutation, handle_known_set, HandleOutcome, Refutation};
use hatguess_core::linear::{
    decode_element, defeat_linear, spread_lemma_trial, DefeatOutcome, LinearStrategy, SpreadFamily,
};
use hatguess_core::planar::{
    adversary_13, build_cover_family, construct_planar_strategy, cover_subset_count, verify_cover_family, CoverMode,
    CoverOptions, Members, PairFunctionFamily,
};
use hatguess_core::randgraph::{BookSearchOptions, BoundOptions};
use hatguess_core::solver::{solve_hg, SolveLimits};
use hatguess_core::{evaluate, Color, Coloring, Graph, HatError, StrategyProfile, VerifyMode, VerifyOutcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::experiment::{run_experiment, ExperimentConfig};
use crate::formats::{
    invalid, read_json, FormatError, GraphFile, KnownSetFile, LinearStrategyFile, OntoFamilyFile, PairFamilyFile,
    SpreadFamilyFile, StrategyFile,
};
use crate::parallel::verify_parallel;

#[derive(Debug, Parser)]
#[command(name = "hatguess", version, about = "Hat guessing games on graphs")]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Seed for every random choice; generated and recorded when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on colorings swept or subsets enumerated.
    #[arg(long, global = true, default_value_t = hatguess_core::DEFAULT_BUDGET)]
    budget: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a strategy profile on a graph.
    Verify(VerifyArgs),
    /// Decide whether some profile wins with q colors.
    Solve(SolveArgs),
    /// Play a clique on a known set of colorings.
    HandleSet(HandleSetArgs),
    #[command(subcommand)]
    Planar(PlanarCommand),
    #[command(subcommand)]
    Book(BookCommand),
    #[command(subcommand)]
    Linear(LinearCommand),
    #[command(subcommand)]
    Randgraph(RandgraphCommand),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    strategy: PathBuf,
    /// Expected color count; must match the strategy file.
    #[arg(long)]
    q: Option<Color>,
    /// Sample this many colorings instead of sweeping all of them.
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    q: Color,
    #[arg(long, default_value_t = 1_000_000)]
    max_colorings: u64,
    #[arg(long, default_value_t = 100_000_000)]
    max_nodes: u64,
}

#[derive(Debug, Args)]
struct HandleSetArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long, default_value_t = hatguess_core::clique::DEFAULT_NODE_BUDGET)]
    node_budget: u64,
}

#[derive(Debug, Subcommand)]
enum PlanarCommand {
    /// Build a covering pair-function family.
    Build(PlanarBuildArgs),
    /// Check a family and the strategy built from it.
    Verify(PlanarVerifyArgs),
    /// Run the 13-color adversary against a profile.
    Attack(PlanarAttackArgs),
}

#[derive(Debug, Args)]
struct PlanarBuildArgs {
    #[arg(long, default_value_t = 12)]
    q: Color,
    /// Use the implicit family of all pair functions.
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = 2_000_000)]
    subset_budget: u64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
}

#[derive(Debug, Args)]
struct PlanarVerifyArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long, default_value_t = 2_000_000)]
    subset_budget: u64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
}

#[derive(Debug, Args)]
struct PlanarAttackArgs {
    #[arg(long)]
    m: usize,
    /// `random` or a strategy file for the 13-color construction.
    #[arg(long, default_value = "random")]
    strategy: String,
}

#[derive(Debug, Subcommand)]
enum BookCommand {
    /// Draw and verify an onto family.
    Build(BookBuildArgs),
    /// Check an onto family and the book strategy built from it.
    Verify(BookVerifyArgs),
}

#[derive(Debug, Args)]
struct BookBuildArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    q: Color,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 16)]
    retries: u32,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

#[derive(Debug, Args)]
struct BookVerifyArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

#[derive(Debug, Subcommand)]
enum LinearCommand {
    /// Produce a coloring on which an affine strategy is all wrong.
    Defeat(LinearDefeatArgs),
    /// Exact spread of a set family.
    Spread(LinearSpreadArgs),
    /// How often a random subset of the ground set contains a member.
    Trial(LinearTrialArgs),
}

#[derive(Debug, Args)]
struct LinearDefeatArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<Color>,
    /// `random` or a linear strategy file.
    #[arg(long, default_value = "random")]
    strategy: String,
    #[arg(long, default_value_t = hatguess_core::linear::DEFAULT_DEFEAT_RETRIES)]
    retries: u32,
}

#[derive(Debug, Args)]
struct LinearSpreadArgs {
    #[arg(long)]
    family: PathBuf,
}

#[derive(Debug, Args)]
struct LinearTrialArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Ground set size for materialized families; defaults to one past the
    /// largest element.
    #[arg(long)]
    ground: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum RandgraphCommand {
    /// Certified lower bounds over sampled G(n, 1/2).
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long, value_delimiter = ',', default_value = "1024,4096,16384")]
    sizes: Vec<usize>,
    /// Seeds per size, counting up from --seed.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    /// Report wall_ms as 0.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, default_value_t = 10_000)]
    k_max: u64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Core(#[from] HatError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Success,
    Attack,
    NotFound,
}

struct Outcome {
    kind: Kind,
    status: &'static str,
    result: Value,
}

fn success(status: &'static str, result: Value) -> Outcome {
    Outcome {
        kind: Kind::Success,
        status,
        result,
    }
}

fn attack(status: &'static str, result: Value) -> Outcome {
    Outcome {
        kind: Kind::Attack,
        status,
        result,
    }
}

fn not_found(status: &'static str, result: Value) -> Outcome {
    Outcome {
        kind: Kind::NotFound,
        status,
        result,
    }
}

#[derive(Serialize)]
struct Config<'a> {
    argv: &'a [String],
    seed: u64,
    budget: u64,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: Config<'a>,
    status: &'a str,
    result: &'a Value,
}

struct Ctx {
    seed: u64,
    budget: u64,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let seed = match cli.global.seed {
        Some(s) => s,
        None => {
            let s = fresh_seed();
            argv.push("--seed".into());
            argv.push(s.to_string());
            s
        }
    };
    let ctx = Ctx {
        seed,
        budget: cli.global.budget,
    };
    let name = command_name(&cli.command);
    let outcome = match dispatch(&cli.command, &ctx) {
        Ok(o) => o,
        Err(CliError::Core(HatError::BudgetExceeded { what, requested, limit })) => not_found(
            "budget_exceeded",
            json!({ "what": what, "requested": requested, "limit": limit.to_string() }),
        ),
        Err(CliError::Core(HatError::Contract(message))) => not_found("contract_failed", json!({ "message": message })),
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let report = Report {
        command: &name,
        config: Config {
            argv: &argv,
            seed,
            budget: ctx.budget,
        },
        status: outcome.status,
        result: &outcome.result,
    };
    let text = match cli.global.format {
        Format::Json => serde_json::to_string_pretty(&report)
            .map(|s| s + "\n")
            .map_err(|e| e.to_string()),
        Format::Csv => render_csv(&report),
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let written = match &cli.global.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    match outcome.kind {
        Kind::Success => 0,
        Kind::Attack => 2,
        Kind::NotFound => 3,
    }
}

fn fresh_seed() -> u64 {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_nanos() as u64);
    nanos ^ (u64::from(std::process::id()) << 32)
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Verify(_) => "verify",
        Command::Solve(_) => "solve",
        Command::HandleSet(_) => "handle-set",
        Command::Planar(PlanarCommand::Build(_)) => "planar build",
        Command::Planar(PlanarCommand::Verify(_)) => "planar verify",
        Command::Planar(PlanarCommand::Attack(_)) => "planar attack",
        Command::Book(BookCommand::Build(_)) => "book build",
        Command::Book(BookCommand::Verify(_)) => "book verify",
        Command::Linear(LinearCommand::Defeat(_)) => "linear defeat",
        Command::Linear(LinearCommand::Spread(_)) => "linear spread",
        Command::Linear(LinearCommand::Trial(_)) => "linear trial",
        Command::Randgraph(RandgraphCommand::Experiment(_)) => "randgraph experiment",
    }
    .to_string()
}

fn dispatch(c: &Command, ctx: &Ctx) -> Result<Outcome, CliError> {
    match c {
        Command::Verify(a) => cmd_verify(a, ctx),
        Command::Solve(a) => cmd_solve(a),
        Command::HandleSet(a) => cmd_handle_set(a),
        Command::Planar(PlanarCommand::Build(a)) => cmd_planar_build(a, ctx),
        Command::Planar(PlanarCommand::Verify(a)) => cmd_planar_verify(a, ctx),
        Command::Planar(PlanarCommand::Attack(a)) => cmd_planar_attack(a, ctx),
        Command::Book(BookCommand::Build(a)) => cmd_book_build(a, ctx),
        Command::Book(BookCommand::Verify(a)) => cmd_book_verify(a, ctx),
        Command::Linear(LinearCommand::Defeat(a)) => cmd_linear_defeat(a, ctx),
        Command::Linear(LinearCommand::Spread(a)) => cmd_linear_spread(a, ctx),
        Command::Linear(LinearCommand::Trial(a)) => cmd_linear_trial(a, ctx),
        Command::Randgraph(RandgraphCommand::Experiment(a)) => cmd_experiment(a, ctx),
    }
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let file: GraphFile = read_json(path, "graph")?;
    Ok(file.to_graph().map_err(|e| invalid(path, e))?)
}

fn load_profile(path: &Path) -> Result<StrategyProfile, CliError> {
    let file: StrategyFile = read_json(path, "strategy")?;
    Ok(file.to_profile().map_err(|e| invalid(path, e))?)
}

/// Verifies exhaustively when `q^n` fits the budget or `samples` is absent.
fn play(graph: &Graph, profile: &StrategyProfile, samples: Option<u64>, ctx: &Ctx) -> Result<Outcome, CliError> {
    let mode = match samples {
        Some(count) => VerifyMode::Sampled { count, seed: ctx.seed },
        None => VerifyMode::Exhaustive,
    };
    let mode_name = if samples.is_some() { "sampled" } else { "exhaustive" };
    Ok(match verify_parallel(graph, profile, mode, ctx.budget)? {
        VerifyOutcome::Winning => success(
            "winning",
            json!({ "mode": mode_name, "winning": true, "conclusive": true, "counterexample": null }),
        ),
        VerifyOutcome::NoCounterexampleFound { samples } => success(
            "no_counterexample_found",
            json!({ "mode": mode_name, "winning": null, "conclusive": false, "samples": samples, "counterexample": null }),
        ),
        VerifyOutcome::Counterexample(c) => attack(
            "counterexample",
            json!({ "mode": mode_name, "winning": false, "conclusive": true, "counterexample": c.values() }),
        ),
    })
}

/// Sweeps exhaustively when possible, else samples.
fn play_auto(graph: &Graph, profile: &StrategyProfile, samples: u64, ctx: &Ctx) -> Result<Outcome, CliError> {
    let fits = hatguess_core::game::coloring_count(graph.n(), profile.q()).is_some_and(|t| t <= ctx.budget);
    play(graph, profile, if fits { None } else { Some(samples) }, ctx)
}

fn cmd_verify(a: &VerifyArgs, ctx: &Ctx) -> Result<Outcome, CliError> {
    let graph = load_graph(&a.graph)?;
    let profile = load_profile(&a.strategy)?;
    if let Some(q) = a.q {
        if q != profile.q() {
            return Err(CliError::Usage(format!(
                "--q {q} but the strategy uses q={}",
                profile.q()
            )));
        }
    }
    play(&graph, &profile, a.samples, ctx)
}

fn cmd_solve(a: &SolveArgs) -> Result<Outcome, CliError> {
    let graph = load_graph(&a.graph)?;
    let limits = SolveLimits {
        max_colorings: a.max_colorings,
        max_nodes: a.max_nodes,
    };
    let out = solve_hg(&graph, a.q, limits)?;
    Ok(match out.witness {
        Some(w) => success(
            "winnable",
            json!({ "winnable": true, "nodes": out.nodes, "strategy": StrategyFile::from_profile(&w)? }),
        ),
        None => not_found("not_winnable", json!({ "winnable": false, "nodes": out.nodes })),
    })
}

fn refutation_json(r: &Refutation) -> Value {
    match r {
        Refutation::Dead { witness } => json!({ "dead": witness }),
        Refutation::Split { witness, branches } => json!({
            "split": witness,
            "branches": branches.iter().map(|(v, sub)| json!([v, refutation_json(sub)])).collect::<Vec<_>>(),
        }),
    }
}

fn cmd_handle_set(a: &HandleSetArgs) -> Result<Outcome, CliError> {
    let file: KnownSetFile = read_json(&a.set, "set")?;
    let ks = file.to_known_set().map_err(|e| invalid(&a.set, e))?;
    Ok(match handle_known_set(&ks, a.node_budget)? {
        HandleOutcome::Handled(s) => {
            let tables: Vec<Value> = (0..ks.d())
                .map(|j| {
                    s.table(j)
                        .iter()
                        .map(|(seen, g)| json!({ "seen": seen, "guess": g }))
                        .collect()
                })
                .collect();
            success(
                "handled",
                json!({ "handled": true, "covers_set": s.covers(&ks), "tables": tables, "default_guess": 0 }),
            )
        }
        HandleOutcome::Infeasible(cert) => not_found(
            "infeasible",
            json!({
                "handled": false,
                "nodes": cert.nodes,
                "refutation_size": cert.tree.size(),
                "replay_ok": check_refutation(&ks, &cert.tree),
                "refutation": refutation_json(&cert.tree),
            }),
        ),
    })
}

fn cover_json(check: &hatguess_core::planar::CoverCheck) -> Value {
    json!({
        "exact": check.exact,
        "checked": check.checked,
        "passed": check.passed(),
        "violation": check.violation.as_ref().map(|v| v.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>()),
    })
}

fn cover_mode(q: Color, subset_budget: u64, samples: u64, seed: u64) -> CoverMode {
    if cover_subset_count(q) <= subset_budget.into() {
        CoverMode::Exhaustive
    } else {
        CoverMode::Sampled { count: samples, seed }
    }
}

fn cmd_planar_build(a: &PlanarBuildArgs, ctx: &Ctx) -> Result<Outcome, CliError> {
    if a.full {
        let family = PairFunctionFamily::full(a.q)?;
        let check = verify_cover_family(&family, cover_mode(a.q, a.subset_budget, a.samples, ctx.seed))?;
        let cover = cover_json(&check);
        let out = json!({ "members": family.len().to_string(), "cover": cover, "family": PairFamilyFile::from_family(&family) });
        return Ok(if check.passed() {
            success("built", out)
        } else {
            attack("cover_violation", out)
        });
    }
    let opts = CoverOptions {
        subset_budget: a.subset_budget,
        samples: a.samples,
        ..CoverOptions::default()
    };
    let (family, check) = build_cover_family(a.q, ctx.seed, opts)?;
    Ok(success(
        "built",
        json!({
            "members": family.len().to_string(),
            "cover": cover_json(&check),
            "family": PairFamilyFile::from_family(&family),
        }),
    ))
}

fn cmd_planar_verify(a: &PlanarVerifyArgs, ctx: &Ctx) -> Result<Outcome, CliError> {
    let file: PairFamilyFile = read_json(&a.family, "family")?;
    let family = file.to_family().map_err(|e| invalid(&a.family, e))?;
    let check = verify_cover_family(&family, cover_mode(family.q(), a.subset_budget, a.samples, ctx.seed))?;
    let cover = cover_json(&check);
    if !check.passed() {
        return Ok(attack("cover_violation", json!({ "cover": cover })));
    }
    if matches!(family.members(), Members::Full) {
        return Ok(success("cover_only", json!({ "cover": cover, "game": null })));
    }
    let strat = construct_planar_strategy(&family)?;
    let game = play_auto(&strat.graph, &strat.profile, a.samples, ctx)?;
    Ok(Outcome {
        kind: game.kind,
        status: game.status,
        result: json!({ "cover": cover, "vertices": strat.graph.n(), "game": game.result }),
    })
}

fn cmd_planar_attack(a: &PlanarAttackArgs, ctx: &Ctx) -> Result<Outcome, CliError> {
    let graph = Graph::planar_construction(13, a.m);
    let profile = if a.strategy == "random" {
        StrategyProfile::hashed(13, graph.n(), ctx.seed)
    } else {
        load_profile(Path::new(&a.strategy))?
    };
    let coloring = adversary_13(&graph, &profile)?;
    let correct = evaluate(&graph, &profile, &coloring)?;
    Ok(attack(
        "defeated",
        json!({ "m": a.m, "q": 13, "coloring": coloring.values(), "correct": correct }),
    ))
}

fn cmd_book_build(a: &BookBuildArgs, ctx: &Ctx) -> Result<Outcome, CliError> {
    let params = BookParameters::new(a.d, a.q, a.m, a.s)?;
    let opts = OntoOptions {
        budget: ctx.budget,
        samples: a.samples,
        retries: a.retries,
        require_exact: false,
    };
    let family = build_onto_family(params, ctx.seed, opts)?;
    Ok(success(
        "built",
        json!({
            "exact": family.verification.is_exact(),
            "handleable_threshold": (a.s as u64).saturating_sub(1) <= capacity_u64(a.d),
            "family": OntoFamilyFile::from_family(&family),
        }),
    ))
}

fn capacity_u64(d: usize) -> u64 {
    u64::try_from(capacity(d as u32)).unwrap_or(u64::MAX)
}

fn cmd_book_verify(a: &BookVerifyArgs, ctx: &Ctx) -> Result<Outcome, CliError> {
    let file: OntoFamilyFile = read_json(&a.family, "family")?;
    let params = file.params().map_err(|e| invalid(&a.family, e))?;
    let mode = OntoMode::Auto {
        budget: ctx.budget,
        samples: a.samples,
        seed: ctx.seed,
    };
    let check = verify_onto_family(&params, &file.members, mode).map_err(|e| invalid(&a.family, e))?;
    let onto = json!({
        "exact": check.verification.is_exact(),
        "verification": crate::formats::VerificationFile::from(check.verification),
        "passed": check.passed(),
        "violation": check.violation,
    });
    if !check.passed() {
        return Ok(attack("onto_violation", json!({ "onto": onto })));
    }
    let family = hatguess_core::book::OntoFamily {
        params,
        members: file.members.clone(),
        verification: check.verification,
    };
    let strat = construct_book_strategy(&family)?;
    let game = play_auto(&strat.graph, &strat.profile, a.samples, ctx)?;
    Ok(Outcome {
        kind: game.kind,
        status: game.status,
        result: json!({ "onto": onto, "vertices": strat.graph.n(), "game": game.result }),
    })
}

fn cmd_linear_defeat(a: &LinearDefeatArgs, ctx: &Ctx) -> Result<Outcome, CliError> {
    let strategy = if a.strategy == "random" {
        let (Some(n), Some(m), Some(p)) = (a.n, a.m, a.p) else {
            return Err(CliError::Usage("a random strategy needs --n, --m and --p".into()));
        };
        LinearStrategy::random(n, m, p, &mut ChaCha8Rng::seed_from_u64(ctx.seed))?
    } else {
        let path = Path::new(&a.strategy);
        let file: LinearStrategyFile = read_json(path, "strategy")?;
        let s = file.to_strategy().map_err(|e| invalid(path, e))?;
        for (flag, given, actual) in [
            ("n", a.n, s.n()),
            ("m", a.m, s.m()),
            ("p", a.p.map(|p| p as usize), s.p() as usize),
        ] {
            if given.is_some_and(|g| g != actual) {
                return Err(CliError::Usage(format!(
                    "--{flag} disagrees with the strategy file ({actual})"
                )));
            }
        }
        s
    };
    let file = LinearStrategyFile::from_strategy(&strategy);
    Ok(match defeat_linear(&strategy, ctx.seed, a.retries)? {
        DefeatOutcome::Defeated {
            coloring,
            x_f,
            x_g,
            attempt,
        } => {
            let c = Coloring::new(strategy.p(), coloring)?;
            let correct = evaluate(&strategy.graph(), &strategy.to_profile(), &c)?;
            attack(
                "defeated",
                json!({ "coloring": c.values(), "correct": correct, "x_f": x_f, "x_g": x_g, "attempt": attempt, "strategy": file }),
            )
        }
        DefeatOutcome::NotFound { attempts } => {
            not_found("not_found", json!({ "attempts": attempts, "strategy": file }))
        }
    })
}

fn cmd_linear_spread(a: &LinearSpreadArgs, ctx: &Ctx) -> Result<Outcome, CliError> {
    let file: SpreadFamilyFile = read_json(&a.family, "family")?;
    let family = file.to_family().map_err(|e| invalid(&a.family, e))?;
    let value = family.spread(ctx.budget)?;
    let mut out = json!({
        "members": value.members,
        "worst_set": value.worst,
        "worst_count": value.count,
        "spread": value.value,
    });
    if let SpreadFamily::Implicit { strategy, .. } = &family {
        let (m, p) = (strategy.m(), strategy.p());
        out["worst_set_decoded"] = json!(value.worst.iter().map(|&e| decode_element(e, m, p)).collect::<Vec<_>>());
        out["threshold"] = json!(f64::from(p).powf(1.0 / m as f64));
        out["at_least_threshold"] = json!(value.at_least_root(u64::from(p), m as u32));
    }
    Ok(success("ok", out))
}

fn cmd_linear_trial(a: &LinearTrialArgs, ctx: &Ctx) -> Result<Outcome, CliError> {
    let file: SpreadFamilyFile = read_json(&a.family, "family")?;
    let family = file.to_family().map_err(|e| invalid(&a.family, e))?;
    let (ground, w) = match &family {
        SpreadFamily::Implicit { strategy, .. } => (strategy.vertices() * strategy.p() as usize, strategy.vertices()),
        SpreadFamily::Materialized(members) => {
            let top = members.iter().flatten().max().map_or(0, |&e| e as usize + 1);
            (a.ground.unwrap_or(top), members.iter().map(Vec::len).max().unwrap_or(0))
        }
    };
    let report = spread_lemma_trial(&family, ground, a.r, a.trials, ctx.seed)?;
    let spread = family.spread(ctx.budget).ok().map(|s| s.value);
    Ok(success(
        "ok",
        json!({
            "r": a.r,
            "trials": report.trials,
            "hits": report.hits,
            "frequency": report.frequency,
            "spread": spread,
            // the lemma asks for spread at least C r log(2w) with C unknown
            "r_log_2w": f64::from(a.r) * ((2 * w.max(1)) as f64).ln(),
        }),
    ))
}

fn cmd_experiment(a: &ExperimentArgs, ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ExperimentConfig {
        sizes: a.sizes.clone(),
        seeds: a.seeds,
        base_seed: ctx.seed,
        timing: !a.no_timing,
        options: BoundOptions {
            search: BookSearchOptions {
                k_max: a.k_max,
                ..BookSearchOptions::default()
            },
            ..BoundOptions::default()
        },
    };
    let report = run_experiment(&cfg)?;
    Ok(success(
        "ok",
        serde_json::to_value(report).map_err(|e| CliError::Usage(e.to_string()))?,
    ))
}

fn render_csv(report: &Report<'_>) -> Result<String, String> {
    let mut buf = Vec::new();
    writeln!(buf, "# command: {}", report.command).map_err(|e| e.to_string())?;
    writeln!(buf, "# argv: {}", report.config.argv.join(" ")).map_err(|e| e.to_string())?;
    writeln!(buf, "# seed: {}", report.config.seed).map_err(|e| e.to_string())?;
    writeln!(buf, "# budget: {}", report.config.budget).map_err(|e| e.to_string())?;
    writeln!(buf, "# status: {}", report.status).map_err(|e| e.to_string())?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let rows = report.result.get("rows").and_then(Value::as_array);
        match rows.and_then(|r| r.first()).and_then(Value::as_object) {
            Some(first) => {
                let keys: Vec<&String> = first.keys().collect();
                w.write_record(&keys).map_err(|e| e.to_string())?;
                for row in rows.into_iter().flatten() {
                    let cells: Vec<String> = keys.iter().map(|k| scalar(&row[k.as_str()])).collect();
                    w.write_record(&cells).map_err(|e| e.to_string())?;
                }
            }
            None => {
                w.write_record(["key", "value"]).map_err(|e| e.to_string())?;
                let mut flat = Vec::new();
                flatten("", report.result, &mut flat);
                for (k, v) in flat {
                    w.write_record([k, v]).map_err(|e| e.to_string())?;
                }
            }
        }
        w.flush().map_err(|e| e.to_string())?;
    }
    String::from_utf8(buf).map_err(|e| e.to_string())
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}
