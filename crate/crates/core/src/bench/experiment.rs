//! Seeded trial harness: resample robot starts, plan with each planner,
//! attack each plan, and record rewards and planning time.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::{self, AttackError};
use crate::graph::{generate_scenario, load_scenario, sample_starts, GenParams, GraphError, Scenario};
use crate::orienteering::{OpMethod, OpSolverConfig};
use crate::planner::{solve_rmop, solve_sga, PlanError, PlannerKind, Solution};
use crate::reward::RewardModel;

use super::naive_greedy_baseline;

pub const CSV_HEADER: [&str; 8] = [
    "trial",
    "planner",
    "attack_model",
    "attack_size",
    "f_S",
    "residual",
    "plan_ms",
    "loop_iters",
];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error("cannot read scenario {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioSource {
    Generate(GenParams),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    /// No removal; residual equals the team reward.
    None,
    /// Exhaustive worst case; the robust planner is re-planned with `α = size`.
    Worst,
    /// Greedy worst case; the robust planner is re-planned with `α = size`.
    Greedy,
    /// Uniformly random removal; the robust planner is re-planned with `α = size`.
    Random,
    /// Exhaustive worst case of `size` robots against a plan for the scenario's `α`.
    Partial,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Worst => "worst",
            Self::Greedy => "greedy",
            Self::Random => "random",
            Self::Partial => "partial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSpec {
    pub model: AttackKind,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub scenario: ScenarioSource,
    pub planners: Vec<PlannerKind>,
    pub attacks: Vec<AttackSpec>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_subroutine")]
    pub subroutine: OpMethod,
    /// When false, `plan_ms` is written as 0 so output is byte-reproducible.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

fn default_subroutine() -> OpMethod {
    OpMethod::Gcb
}

fn default_true() -> bool {
    true
}

impl ExperimentSpec {
    pub fn parse(bytes: &[u8]) -> Result<Self, ExperimentError> {
        let spec: Self = serde_json::from_slice(bytes).map_err(|e| ExperimentError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.planners.is_empty() {
            return Err(ExperimentError::Spec("planners must not be empty".into()));
        }
        if self.attacks.iter().any(|a| a.sizes.is_empty()) {
            return Err(ExperimentError::Spec("every attack needs at least one size".into()));
        }
        Ok(())
    }

    /// The scenario whose starts get resampled in every trial.
    pub fn base_scenario(&self) -> Result<Scenario, ExperimentError> {
        match &self.scenario {
            ScenarioSource::Generate(params) => Ok(generate_scenario(params)?),
            ScenarioSource::File(path) => {
                let bytes = std::fs::read(path).map_err(|source| ExperimentError::Io {
                    path: path.clone(),
                    source,
                })?;
                Ok(load_scenario(&bytes)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub trial: usize,
    pub planner: PlannerKind,
    pub attack_model: AttackKind,
    pub attack_size: usize,
    #[serde(rename = "f_S")]
    pub f_s: f64,
    pub residual: f64,
    pub plan_ms: f64,
    pub loop_iters: usize,
}

struct Plan {
    solution: Solution,
    plan_ms: f64,
}

fn plan(
    kind: PlannerKind,
    scenario: &Scenario,
    model: &RewardModel,
    solver: &OpSolverConfig,
    timing: bool,
) -> Result<Plan, ExperimentError> {
    let started = Instant::now();
    let solution = match kind {
        PlannerKind::Rmop => solve_rmop(scenario, solver)?,
        PlannerKind::Sga => solve_sga(scenario, solver)?,
        PlannerKind::Ng => {
            Solution::baseline(PlannerKind::Ng, model, naive_greedy_baseline(scenario)).map_err(PlanError::from)?
        }
    };
    let plan_ms = if timing {
        started.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(Plan { solution, plan_ms })
}

fn random_seed(trial_seed: u64, size: usize) -> u64 {
    trial_seed ^ (size as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs every trial in order. Output is a pure function of the spec apart from `plan_ms`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRecord>, ExperimentError> {
    spec.validate()?;
    let base = spec.base_scenario()?;
    let solver = OpSolverConfig::for_method(spec.subroutine);
    let n = base.n_robots();
    let mut master = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut records = Vec::new();

    for trial in 0..spec.trials {
        let trial_seed: u64 = master.gen();
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let starts = sample_starts(&mut rng, base.graph().len(), n);
        let scenario = base.with_starts(starts)?;
        let model = RewardModel::for_scenario(&scenario);

        // Plans keyed by (planner, alpha) so sweeps reuse work.
        let mut plans: BTreeMap<(PlannerKind, usize), Plan> = BTreeMap::new();
        for attack in &spec.attacks {
            for &size in &attack.sizes {
                if size >= n {
                    return Err(ExperimentError::Spec(format!(
                        "attack size {size} must be smaller than the team size {n}"
                    )));
                }
                let planned_alpha = match attack.model {
                    AttackKind::Worst | AttackKind::Greedy | AttackKind::Random => size,
                    AttackKind::None | AttackKind::Partial => scenario.alpha(),
                };
                if attack.model == AttackKind::Partial && size > planned_alpha {
                    return Err(ExperimentError::Spec(format!(
                        "partial attack size {size} exceeds the scenario alpha {planned_alpha}"
                    )));
                }
                for &planner in &spec.planners {
                    // Only the robust planner depends on alpha.
                    let key_alpha = if planner == PlannerKind::Rmop { planned_alpha } else { 0 };
                    let p = match plans.entry((planner, key_alpha)) {
                        Entry::Occupied(slot) => slot.into_mut(),
                        Entry::Vacant(slot) => {
                            let planned = scenario.with_alpha(key_alpha)?;
                            slot.insert(plan(planner, &planned, &model, &solver, spec.record_timing)?)
                        }
                    };
                    let solution = &p.solution;
                    let residual = match attack.model {
                        AttackKind::None => solution.team_reward,
                        AttackKind::Worst => attack::worst_case_attack(&model, solution, size)?.residual,
                        AttackKind::Greedy => attack::greedy_attack(&model, solution, size)?.residual,
                        AttackKind::Random => {
                            attack::random_attack(&model, solution, size, random_seed(trial_seed, size))?.residual
                        }
                        AttackKind::Partial => {
                            attack::partial_worst_attack(&model, solution, planned_alpha, size)?.residual
                        }
                    };
                    records.push(ExperimentRecord {
                        trial,
                        planner,
                        attack_model: attack.model,
                        attack_size: size,
                        f_s: solution.team_reward,
                        residual,
                        plan_ms: p.plan_ms,
                        loop_iters: solution.loop_iterations,
                    });
                }
            }
        }
    }
    Ok(records)
}

/// Writes records as RFC 4180 CSV; the header is written even with no records.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], writer: W) -> Result<(), ExperimentError> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    out.write_record(CSV_HEADER)?;
    for r in records {
        out.serialize(r)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Mean and population variance of residuals per (planner, attack, size).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub planner: PlannerKind,
    pub attack_model: AttackKind,
    pub attack_size: usize,
    pub trials: usize,
    pub mean_residual: f64,
    pub var_residual: f64,
    pub mean_f_s: f64,
    pub mean_plan_ms: f64,
}

pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(AttackKind, usize, PlannerKind), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.attack_model, r.attack_size, r.planner))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((attack_model, attack_size, planner), rs)| {
            let k = rs.len() as f64;
            let mean = rs.iter().map(|r| r.residual).sum::<f64>() / k;
            let var = rs.iter().map(|r| (r.residual - mean).powi(2)).sum::<f64>() / k;
            SummaryRow {
                planner,
                attack_model,
                attack_size,
                trials: rs.len(),
                mean_residual: mean,
                var_residual: var,
                mean_f_s: rs.iter().map(|r| r.f_s).sum::<f64>() / k,
                mean_plan_ms: rs.iter().map(|r| r.plan_ms).sum::<f64>() / k,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(trials: usize) -> ExperimentSpec {
        ExperimentSpec {
            scenario: ScenarioSource::Generate(GenParams::new(30, 4, 2, 25.0, 3)),
            planners: vec![PlannerKind::Rmop, PlannerKind::Sga],
            attacks: vec![AttackSpec {
                model: AttackKind::Worst,
                sizes: vec![2],
            }],
            trials,
            seed: 17,
            subroutine: OpMethod::Gcb,
            record_timing: false,
        }
    }

    #[test]
    fn record_count() {
        let records = run_experiment(&small_spec(2)).unwrap();
        assert_eq!(records.len(), 4);
        assert!(records.iter().all(|r| r.residual <= r.f_s + 1e-9));
    }

    #[test]
    fn csv_is_reproducible() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&run_experiment(&small_spec(3)).unwrap(), &mut a).unwrap();
        write_csv(&run_experiment(&small_spec(3)).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("trial,planner,attack_model,attack_size,f_S,residual,plan_ms,loop_iters\n"));
        assert!(text.contains(",rmop,worst,2,"));
    }

    #[test]
    fn zero_trials_writes_header_only() {
        let mut out = Vec::new();
        write_csv(&run_experiment(&small_spec(0)).unwrap(), &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "trial,planner,attack_model,attack_size,f_S,residual,plan_ms,loop_iters\n"
        );
    }

    #[test]
    fn unknown_planner_is_rejected() {
        let json = r#"{"scenario":{"generate":{"n_vertices":10,"n_robots":3,"alpha":1,"budget":10,"seed":1}},
            "planners":["rmop","magic"],"attacks":[{"model":"worst","sizes":[1]}],"trials":1,"seed":1}"#;
        let err = ExperimentSpec::parse(json.as_bytes()).unwrap_err();
        assert!(matches!(err, ExperimentError::Spec(_)));
        assert!(err.to_string().contains("magic"));
    }

    #[test]
    fn summary_groups_by_planner() {
        let records = run_experiment(&small_spec(3)).unwrap();
        let summary = summarize(&records);
        assert_eq!(summary.len(), 2);
        assert!(summary.iter().all(|s| s.trials == 3 && s.var_residual >= 0.0));
    }
}
