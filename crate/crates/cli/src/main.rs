mod document;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use rmop::attack::{self, AttackError};
use rmop::bench::{self, BoundReport, ExperimentError, ExperimentSpec, ScenarioSource};
use rmop::graph::{self, GenParams, GraphError, Layout, ScenarioDocument};
use rmop::planner::{self, PlanError, PlannerOptions};
use rmop::{OpMethod, OpSolverConfig, PlannerKind, RewardKind, RewardModel, Scenario, Solution};
use serde::Serialize;
use thiserror::Error;

use document::{digest, AttackDocument, ScenarioCheck, SolutionCheck, SolutionDocument, VerifyReport};

/// Plan robot paths that keep their reward under worst-case robot loss.
#[derive(Debug, Parser)]
#[command(name = "rmop", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a scenario on a synthetic importance map.
    Gen(GenArgs),
    /// Plan paths for a scenario.
    Solve(SolveArgs),
    /// Remove robots from a solution and report the remaining reward.
    Attack(AttackArgs),
    /// Run an experiment sweep and write CSV records.
    Bench(BenchArgs),
    /// Check a scenario and, optionally, a solution against it.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LayoutArg {
    Grid,
    UniformRandom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RewardArg {
    Modular,
    Coverage,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlannerArg {
    Rmop,
    Sga,
    Ng,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SubroutineArg {
    Exact,
    Gcb,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum AttackArg {
    Worst,
    Greedy,
    Random,
    Partial,
}

#[derive(Debug, clap::Args)]
struct GenArgs {
    #[arg(long)]
    vertices: usize,
    #[arg(long)]
    robots: usize,
    #[arg(long)]
    alpha: usize,
    #[arg(long)]
    budget: f64,
    #[arg(long, value_enum, default_value = "grid")]
    layout: LayoutArg,
    /// Number of Gaussian bumps in the importance field.
    #[arg(long)]
    bumps: Option<usize>,
    /// Constant added to the normalized importance field, in [0, 1].
    #[arg(long)]
    baseline: Option<f64>,
    #[arg(long, value_enum, default_value = "modular")]
    reward_kind: RewardArg,
    /// Coverage rewards only: how far a vertex senses.
    #[arg(long)]
    sensing_radius: Option<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, clap::Args)]
struct SolveArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "rmop")]
    planner: PlannerArg,
    #[arg(long, value_enum, default_value = "gcb")]
    subroutine: SubroutineArg,
    /// Mask the redundancy paths' vertices before planning the coverage set.
    #[arg(long)]
    mask_redundant: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, clap::Args)]
struct AttackArgs {
    /// Solution document produced by `solve`.
    solution: PathBuf,
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "worst")]
    model: AttackArg,
    #[arg(long)]
    size: usize,
    /// Required for the random attack.
    #[arg(long)]
    seed: Option<u64>,
    /// Partial attack: the α the plan assumed. Defaults to the scenario's α.
    #[arg(long)]
    planned_alpha: Option<usize>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct BenchArgs {
    /// Experiment spec (JSON). Relative scenario paths resolve against its directory.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Per planner, attack and size: mean and variance of the residual.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("solution was planned for scenario {expected}, but {path} has digest {actual}; refusing to evaluate")]
    DigestMismatch {
        path: PathBuf,
        expected: String,
        actual: String,
    },
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    text
}

fn load_solution(path: &Path) -> Result<(SolutionDocument, Vec<u8>), CliError> {
    let bytes = read(path)?;
    let doc = serde_json::from_slice(&bytes).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    Ok((doc, bytes))
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, CliError> {
    let mut params = GenParams::new(args.vertices, args.robots, args.alpha, args.budget, args.seed);
    params.layout = match args.layout {
        LayoutArg::Grid => Layout::Grid,
        LayoutArg::UniformRandom => Layout::UniformRandom,
    };
    params.reward_kind = match args.reward_kind {
        RewardArg::Modular => RewardKind::Modular,
        RewardArg::Coverage => RewardKind::Coverage,
    };
    if let Some(bumps) = args.bumps {
        params.importance.bumps = bumps;
    }
    if let Some(baseline) = args.baseline {
        params.importance.baseline = baseline;
    }
    if let Some(radius) = args.sensing_radius {
        params.sensing_radius = radius;
    }
    let scenario = graph::generate_scenario(&params)?;
    write(&args.out, to_json(&scenario.to_document()).as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, CliError> {
    let bytes = read(&args.scenario)?;
    let scenario = graph::load_scenario(&bytes)?;
    let solver = OpSolverConfig::for_method(match args.subroutine {
        SubroutineArg::Exact => OpMethod::Exact,
        SubroutineArg::Gcb => OpMethod::Gcb,
    });
    let options = PlannerOptions {
        mask_redundant_set: args.mask_redundant,
    };
    let solution = match args.planner {
        PlannerArg::Rmop => planner::solve_rmop_with(&scenario, &solver, options)?,
        PlannerArg::Sga => planner::solve_sga(&scenario, &solver)?,
        PlannerArg::Ng => {
            let model = RewardModel::for_scenario(&scenario);
            Solution::baseline(PlannerKind::Ng, &model, bench::naive_greedy_baseline(&scenario))
                .map_err(PlanError::from)?
        }
    };
    let report = BoundReport::for_solution(&scenario, &solution, &solver);
    let doc = SolutionDocument::new(digest(&bytes), &solution, solver, options, report);
    write(&args.out, to_json(&doc).as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_attack(args: AttackArgs) -> Result<ExitCode, CliError> {
    let scenario_bytes = read(&args.scenario)?;
    let (doc, solution_bytes) = load_solution(&args.solution)?;
    let actual = digest(&scenario_bytes);
    if actual != doc.scenario_digest {
        return Err(CliError::DigestMismatch {
            path: args.scenario,
            expected: doc.scenario_digest,
            actual,
        });
    }
    let scenario = graph::load_scenario(&scenario_bytes)?;
    let model = RewardModel::for_scenario(&scenario);
    let solution = doc.solution();
    let mut planned_alpha = None;
    let outcome = match args.model {
        AttackArg::Worst => attack::worst_case_attack(&model, &solution, args.size)?,
        AttackArg::Greedy => attack::greedy_attack(&model, &solution, args.size)?,
        AttackArg::Random => {
            let Some(seed) = args.seed else {
                Cli::command()
                    .error(ErrorKind::MissingRequiredArgument, "the random attack needs --seed")
                    .exit();
            };
            attack::random_attack(&model, &solution, args.size, seed)?
        }
        AttackArg::Partial => {
            let planned = args.planned_alpha.unwrap_or(scenario.alpha());
            planned_alpha = Some(planned);
            attack::partial_worst_attack(&model, &solution, planned, args.size)?
        }
    };
    let report = AttackDocument {
        scenario_digest: doc.scenario_digest.clone(),
        solution_digest: digest(&solution_bytes),
        size: args.size,
        planned_alpha,
        team_reward: model.eval_team(&solution.paths).map_err(PlanError::from)?,
        outcome,
    };
    let text = to_json(&report);
    match &args.out {
        Some(path) => write(path, text.as_bytes())?,
        None => io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, CliError> {
    let mut spec = ExperimentSpec::parse(&read(&args.spec)?)?;
    if let ScenarioSource::File(path) = &mut spec.scenario {
        if path.is_relative() {
            if let Some(dir) = args.spec.parent() {
                *path = dir.join(&*path);
            }
        }
    }
    let records = bench::run_experiment(&spec)?;
    let mut csv = Vec::new();
    bench::write_csv(&records, &mut csv)?;
    write(&args.out, &csv)?;
    if let Some(path) = &args.summary {
        write(path, to_json(&bench::summarize(&records)).as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn check_scenario(bytes: &[u8]) -> (ScenarioCheck, Option<Scenario>) {
    let mut check = ScenarioCheck::default();
    let doc = match ScenarioDocument::parse(bytes) {
        Ok(doc) => doc,
        Err(e) => {
            check.errors.push(e.to_string());
            return (check, None);
        }
    };
    match doc.graph() {
        Ok(graph) => check.metric = graph.verify_metric(),
        Err(e) => {
            check.errors.push(e.to_string());
            return (check, None);
        }
    }
    if !check.metric.is_clean() {
        return (check, None);
    }
    match doc.into_scenario() {
        Ok(scenario) => (check, Some(scenario)),
        Err(e) => {
            check.errors.push(e.to_string());
            (check, None)
        }
    }
}

fn check_solution_file(path: &Path, scenario_digest: &str, scenario: Option<&Scenario>) -> SolutionCheck {
    let mut check = SolutionCheck::default();
    match load_solution(path) {
        Err(e) => check.error = Some(e.to_string()),
        Ok((doc, _)) => {
            check.digest_matches = doc.scenario_digest == scenario_digest;
            if let Some(scenario) = scenario {
                check.issues = planner::check_solution(scenario, &doc.solution()).issues;
            }
        }
    }
    check
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let bytes = read(&args.scenario)?;
    let (scenario_check, scenario) = check_scenario(&bytes);
    let solution = args
        .solution
        .as_deref()
        .map(|path| check_solution_file(path, &digest(&bytes), scenario.as_ref()));
    let mut report = VerifyReport {
        clean: false,
        scenario: scenario_check,
        solution,
    };
    report.clean = report.scenario.metric.is_clean()
        && report.scenario.errors.is_empty()
        && report
            .solution
            .as_ref()
            .is_none_or(|s| s.digest_matches && s.issues.is_empty() && s.error.is_none());

    let mut out = String::new();
    if args.json {
        out = to_json(&report);
    } else {
        out.push_str(&format!("scenario {}\n", args.scenario.display()));
        out.push_str(&format!("{}\n", report.scenario.metric).replace("\n\n", "\n"));
        for e in &report.scenario.errors {
            out.push_str(&format!("error: {e}\n"));
        }
        if let (Some(path), Some(s)) = (&args.solution, &report.solution) {
            out.push_str(&format!("solution {}\n", path.display()));
            if let Some(e) = &s.error {
                out.push_str(&format!("error: {e}\n"));
            }
            if s.error.is_none() && !s.digest_matches {
                out.push_str("error: scenario digest does not match\n");
            }
            for issue in &s.issues {
                out.push_str(&format!("issue: {issue}\n"));
            }
        }
        out.push_str(if report.clean {
            "result: clean\n"
        } else {
            "result: problems found\n"
        });
    }
    io::stdout().write_all(out.as_bytes()).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })?;
    Ok(if report.clean {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
