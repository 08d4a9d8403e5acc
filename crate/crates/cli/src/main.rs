//! `csglab`: generate, analyze and simulate capacitated cost-sharing
//! connection games.
//!
//! Exit codes: 0 success, 1 a bound verdict or suite check failed, 2 bad
//! input, 3 the strategy space exceeded the enumeration cap.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use csglab::analysis::{compute_ratios, optimal_profile, Criterion, EnumerationLimits};
use csglab::document::{
    CriterionSelection, InstanceDocument, ProfileDocument, ReportDocument, TraceDocument, Volatile,
};
use csglab::dynamics::{run_dynamics, AgentOrder, DeviationPolicy, ImprovementRule, DEFAULT_STEP_CAP};
use csglab::graph::DEFAULT_PATH_CAP;
use csglab::instances::{InstanceRecipe, RandomDagParams, RandomSpParams, SchemeFamily};
use csglab::rational::parse_rational;
use csglab::suite::{run_suite, SuiteConfig};
use csglab::{Error, GameInstance, Rational};

#[derive(Parser, Debug)]
#[command(name = "csglab", version, about = "Capacitated cost-sharing connection games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an instance document.
    Gen {
        #[command(subcommand)]
        recipe: GenRecipe,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Enumerate equilibria and report exact ratios with bound verdicts.
    Analyze(AnalyzeArgs),
    /// Run improvement dynamics and emit the trace.
    Dynamics(DynamicsArgs),
    /// Run the bounds suite.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum GenRecipe {
    /// Five-node DAG with unbounded anarchy ratios.
    Fig2 {
        #[arg(long, value_parser = rational)]
        x: Rational,
        #[arg(long, value_parser = rational)]
        y: Rational,
    },
    /// Parallel links with a threshold edge.
    Fig3 {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = rational)]
        eps: Rational,
    },
    /// Two parallel links of cost 1 and n.
    TwoLink {
        #[arg(long)]
        n: u32,
    },
    /// Random symmetric series-parallel game.
    RandomSp {
        #[arg(long, env = "CSGLAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        max_edges: usize,
        #[arg(long, value_enum, default_value_t = Family::Mixed)]
        family: Family,
    },
    /// Random asymmetric DAG game.
    RandomDag {
        #[arg(long, env = "CSGLAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        nodes: usize,
        #[arg(long, default_value_t = 8)]
        max_edges: usize,
        #[arg(long, value_enum, default_value_t = Family::Mixed)]
        family: Family,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Ordinary,
    Threshold,
    RandomValid,
    Mixed,
}

impl From<Family> for SchemeFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Ordinary => SchemeFamily::Ordinary,
            Family::Threshold => SchemeFamily::Threshold,
            Family::RandomValid => SchemeFamily::RandomValid,
            Family::Mixed => SchemeFamily::Mixed,
        }
    }
}

#[derive(Args, Debug)]
struct Input {
    /// Instance document; standard input when omitted.
    file: Option<PathBuf>,
    #[arg(long = "in", conflicts_with = "file")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CriterionArg {
    Both,
    Sc,
    Mc,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    io: Input,
    #[arg(long, value_enum, default_value_t = CriterionArg::Both)]
    criterion: CriterionArg,
    /// Maximum number of simple paths per agent.
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    cap: usize,
    /// Maximum number of candidate profiles.
    #[arg(long, default_value_t = EnumerationLimits::default().profile_cap)]
    profile_cap: usize,
    /// Skip the dynamics trace from the sum-cost optimum.
    #[arg(long)]
    no_dynamics: bool,
    /// Omit the wall-time block so the output is byte-stable.
    #[arg(long)]
    stable: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrderArg {
    RoundRobin,
    Reverse,
    Seeded,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    BestResponse,
    FirstImproving,
}

#[derive(Args, Debug)]
struct DynamicsArgs {
    #[command(flatten)]
    io: Input,
    /// `opt-sc`, `opt-mc` or a profile document.
    #[arg(long, default_value = "opt-sc")]
    start: String,
    #[arg(long, value_enum, default_value_t = OrderArg::RoundRobin)]
    policy: OrderArg,
    #[arg(long, value_enum, default_value_t = RuleArg::BestResponse)]
    rule: RuleArg,
    #[arg(long, env = "CSGLAB_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
    step_cap: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "paper")]
    suite: String,
    /// Seconds; later checks are failed once it is spent.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, env = "CSGLAB_SEED", default_value_t = 0)]
    seed: u64,
}

fn rational(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::PathExplosion { .. } => 3,
            Error::InternalAssertion(_) | Error::SelfCheckFailed(_) | Error::StepCapExceeded(_) => 1,
            _ => 2,
        };
        Failure { code, message: err.to_string() }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 2, message }
}

fn read_input(io: &Input) -> Result<String, Failure> {
    match io.file.as_ref().or(io.input.as_ref()) {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| input_error(format!("cannot read {}: {e}", path.display()))),
        None => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| input_error(format!("cannot read standard input: {e}")))?;
            Ok(text)
        }
    }
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| input_error(format!("cannot write standard output: {e}"))),
    }
}

fn load_instance(io: &Input) -> Result<GameInstance, Failure> {
    let text = read_input(io)?;
    Ok(InstanceDocument::parse(&text)?.to_instance()?)
}

fn gen(recipe: &GenRecipe, out: Option<&PathBuf>) -> Result<u8, Failure> {
    let recipe = match recipe {
        GenRecipe::Fig2 { x, y } => InstanceRecipe::Fig2 { x: x.clone(), y: y.clone() },
        GenRecipe::Fig3 { n, eps } => InstanceRecipe::Fig3 { n: *n, eps: eps.clone() },
        GenRecipe::TwoLink { n } => InstanceRecipe::TwoLink { n: *n },
        GenRecipe::RandomSp { seed, n, max_edges, family } => InstanceRecipe::RandomSp(RandomSpParams {
            seed: *seed,
            agents: *n,
            max_edges: *max_edges,
            family: (*family).into(),
            ..Default::default()
        }),
        GenRecipe::RandomDag { seed, n, nodes, max_edges, family } => {
            InstanceRecipe::RandomDag(RandomDagParams {
                seed: *seed,
                agents: *n,
                nodes: *nodes,
                max_edges: *max_edges,
                family: (*family).into(),
                ..Default::default()
            })
        }
    };
    let instance = recipe.build()?;
    write_output(out, &InstanceDocument::from_instance(&instance, Some(recipe)).to_json())?;
    Ok(0)
}

fn analyze(args: &AnalyzeArgs) -> Result<u8, Failure> {
    let started = Instant::now();
    let instance = load_instance(&args.io)?;
    let limits = EnumerationLimits { path_cap: args.cap, profile_cap: args.profile_cap };
    let report = compute_ratios(&instance, limits)?;
    let selection = match args.criterion {
        CriterionArg::Both => CriterionSelection::Both,
        CriterionArg::Sc => CriterionSelection::Sc,
        CriterionArg::Mc => CriterionSelection::Mc,
    };
    let mut doc = ReportDocument::from_report(&report, selection);
    if !args.no_dynamics {
        let trace = run_dynamics(&instance, &report.optimum_sc.profile, &DeviationPolicy::default(), DEFAULT_STEP_CAP)?;
        doc.dynamics = Some(TraceDocument::from_trace(&instance, &trace));
    }
    if !args.stable {
        doc.volatile = Some(Volatile { wall_time_ms: started.elapsed().as_millis() as u64 });
    }
    write_output(args.io.out.as_ref(), &doc.to_json())?;
    Ok(if doc.all_hold() { 0 } else { 1 })
}

fn dynamics(args: &DynamicsArgs) -> Result<u8, Failure> {
    let instance = load_instance(&args.io)?;
    let limits = EnumerationLimits::default();
    let start = match args.start.as_str() {
        "opt-sc" => optimal_profile(&instance, Criterion::SumCost, limits)?.profile,
        "opt-mc" => optimal_profile(&instance, Criterion::MaxCost, limits)?.profile,
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| input_error(format!("cannot read start profile {path}: {e}")))?;
            ProfileDocument::parse(&text)?.to_profile(&instance)?
        }
    };
    let order = match args.policy {
        OrderArg::RoundRobin => AgentOrder::RoundRobin,
        OrderArg::Reverse => AgentOrder::Fixed((0..instance.agent_count()).rev().collect()),
        OrderArg::Seeded => AgentOrder::Seeded(args.seed),
    };
    let rule = match args.rule {
        RuleArg::BestResponse => ImprovementRule::BestResponse,
        RuleArg::FirstImproving => ImprovementRule::FirstImproving,
    };
    let trace = run_dynamics(&instance, &start, &DeviationPolicy { order, rule }, args.step_cap)?;
    let doc = TraceDocument::from_trace(&instance, &trace);
    write_output(args.io.out.as_ref(), &doc.to_json())?;
    Ok(if doc.terminal_is_nash { 0 } else { 1 })
}

fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    if args.suite != "paper" {
        return Err(input_error(format!("unknown suite {:?}; available: paper", args.suite)));
    }
    let config = SuiteConfig { seed: args.seed, budget: args.budget.map(Duration::from_secs) };
    let results = run_suite(&config);
    let mut stdout = io::stdout().lock();
    for result in &results {
        writeln!(stdout, "{result}").map_err(|e| input_error(e.to_string()))?;
    }
    let passed = results.iter().filter(|r| r.passed()).count();
    writeln!(stdout, "{passed}/{} checks passed", results.len()).map_err(|e| input_error(e.to_string()))?;
    Ok(if passed == results.len() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen { recipe, out } => gen(recipe, out.as_ref()),
        Command::Analyze(args) => analyze(args),
        Command::Dynamics(args) => dynamics(args),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("csglab: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
