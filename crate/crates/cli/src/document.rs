//! JSON documents written by the CLI.

use rmop::attack::AttackOutcome;
use rmop::bench::BoundReport;
use rmop::graph::MetricReport;
use rmop::planner::{PlannerOptions, SolutionIssue};
use rmop::{OpSolverConfig, Path, PlannerKind, Solution};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotPath {
    pub robot: usize,
    pub vertices: Vec<usize>,
    pub cost: f64,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDocument {
    /// SHA-256 of the scenario file bytes, hex encoded.
    pub scenario_digest: String,
    pub planner: PlannerKind,
    pub solver: OpSolverConfig,
    #[serde(default)]
    pub mask_redundant_set: bool,
    pub paths: Vec<RobotPath>,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub team_reward: f64,
    pub loop_iterations: usize,
    pub bound_report: BoundReport,
}

impl SolutionDocument {
    pub fn new(
        scenario_digest: String,
        solution: &Solution,
        solver: OpSolverConfig,
        options: PlannerOptions,
        bound_report: BoundReport,
    ) -> Self {
        Self {
            scenario_digest,
            planner: solution.planner,
            solver,
            mask_redundant_set: options.mask_redundant_set,
            paths: solution
                .paths
                .iter()
                .zip(&solution.per_path_rewards)
                .map(|(p, &reward)| RobotPath {
                    robot: p.robot,
                    vertices: p.vertices.clone(),
                    cost: p.cost,
                    reward,
                })
                .collect(),
            s1: solution.s1_robots.clone(),
            s2: solution.s2_robots.clone(),
            team_reward: solution.team_reward,
            loop_iterations: solution.loop_iterations,
            bound_report,
        }
    }

    pub fn solution(&self) -> Solution {
        Solution {
            planner: self.planner,
            paths: self
                .paths
                .iter()
                .map(|p| Path {
                    robot: p.robot,
                    vertices: p.vertices.clone(),
                    cost: p.cost,
                })
                .collect(),
            s1_robots: self.s1.clone(),
            s2_robots: self.s2.clone(),
            team_reward: self.team_reward,
            loop_iterations: self.loop_iterations,
            per_path_rewards: self.paths.iter().map(|p| p.reward).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackDocument {
    pub scenario_digest: String,
    pub solution_digest: String,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planned_alpha: Option<usize>,
    pub team_reward: f64,
    #[serde(flatten)]
    pub outcome: AttackOutcome,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCheck {
    pub metric: MetricReport,
    /// Other validation failures (starts, budget, α, coverage data).
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolutionCheck {
    pub digest_matches: bool,
    pub issues: Vec<SolutionIssue>,
    /// Set when the file could not be read as a solution document.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub clean: bool,
    pub scenario: ScenarioCheck,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionCheck>,
}
