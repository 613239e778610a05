//! Baselines, approximation-bound calculators, brute-force oracles and the
//! experiment harness.

mod experiment;
mod oracle;

pub use experiment::{
    run_experiment, summarize, write_csv, AttackKind, AttackSpec, ExperimentError, ExperimentRecord, ExperimentSpec,
    ScenarioSource, SummaryRow, CSV_HEADER,
};
pub use oracle::{
    brute_force_mop, brute_force_mop_for, brute_force_rmop, feasible_paths, OracleConfig, OracleError, OracleResult,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Path, Scenario, METRIC_TOL};
use crate::orienteering::{OpMethod, OpSolverConfig};
use crate::planner::Solution;
use crate::reward::{team_curvature, vertex_curvature, RewardModel};

/// Naive greedy: each robot, on its own, keeps scanning the unvisited vertices
/// from most to least rewarding and appends the first one it can still afford.
pub fn naive_greedy_baseline(scenario: &Scenario) -> Vec<Path> {
    let graph = scenario.graph();
    let budget = scenario.budget();
    let mut by_reward: Vec<usize> = (0..graph.len()).collect();
    by_reward.sort_by(|&a, &b| {
        graph.vertices()[b]
            .reward
            .total_cmp(&graph.vertices()[a].reward)
            .then(a.cmp(&b))
    });
    scenario
        .starts()
        .iter()
        .enumerate()
        .map(|(robot, &start)| {
            let mut visited = vec![false; graph.len()];
            visited[start] = true;
            let mut vertices = vec![start];
            let mut cost = 0.0;
            loop {
                let at = *vertices.last().expect("non-empty");
                let next = by_reward
                    .iter()
                    .copied()
                    .find(|&v| !visited[v] && cost + graph.dist(at, v) <= budget + METRIC_TOL);
                let Some(v) = next else { break };
                cost += graph.dist(at, v);
                visited[v] = true;
                vertices.push(v);
            }
            let cost = graph.path_cost(&vertices).expect("simple path by construction");
            Path { robot, vertices, cost }
        })
        .collect()
}

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("curvature {0} must lie in [0, 1); the bound degenerates at 1")]
    Curvature(f64),
    #[error("approximation factor must be at least 1, got {0}")]
    Eta(f64),
    #[error("bound needs 0 < alpha < N (alpha = {alpha}, N = {robots})")]
    Alpha { alpha: usize, robots: usize },
}

fn check_params(k_f: f64, k_g: f64, eta: f64) -> Result<(), BoundError> {
    for k in [k_f, k_g] {
        if !(0.0..1.0).contains(&k) {
            return Err(BoundError::Curvature(k));
        }
    }
    if eta.is_nan() || eta < 1.0 {
        return Err(BoundError::Eta(eta));
    }
    Ok(())
}

/// Guarantee of sequential greedy assignment against the multi-path optimum:
/// `1 / (1/(1−k_g) + η/(1−k_f))`.
pub fn theorem1_bound(k_f: f64, k_g: f64, eta: f64) -> Result<f64, BoundError> {
    check_params(k_f, k_g, eta)?;
    Ok(1.0 / (1.0 / (1.0 - k_g) + eta / (1.0 - k_f)))
}

/// Guarantee of the robust planner's post-attack reward against the robust optimum:
/// `max(1−k_f, 1/(α+1), 1/(N−α)) / (1/(1−k_g) + η/(1−k_f))`.
pub fn theorem2_bound(k_f: f64, k_g: f64, eta: f64, alpha: usize, n: usize) -> Result<f64, BoundError> {
    check_params(k_f, k_g, eta)?;
    if alpha == 0 || alpha >= n {
        return Err(BoundError::Alpha { alpha, robots: n });
    }
    let numerator = (1.0 - k_f)
        .max(1.0 / (alpha as f64 + 1.0))
        .max(1.0 / (n - alpha) as f64);
    Ok(numerator / (1.0 / (1.0 - k_g) + eta / (1.0 - k_f)))
}

pub const K_F_SURROGATE_NOTE: &str = "k_f is computed with the returned paths as the ground set, not over all feasible paths; treat the fractions as indicative";
pub const GCB_ETA_NOTE: &str =
    "eta is the relaxed-budget factor of the cost-benefit greedy; this run enforced the budget strictly";

/// Curvatures and the approximation fractions they imply for one solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub k_f: f64,
    pub k_g: f64,
    pub eta: f64,
    pub alpha: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// `None` when a curvature is 1 or `α = 0`.
    pub theorem2_fraction: Option<f64>,
    pub theorem1_fraction: Option<f64>,
    pub k_f_ground_set_note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_note: Option<String>,
}

impl BoundReport {
    pub fn for_solution(scenario: &Scenario, solution: &Solution, solver: &OpSolverConfig) -> Self {
        let model = RewardModel::for_scenario(scenario);
        let all: Vec<usize> = (0..scenario.graph().len()).collect();
        let k_g = vertex_curvature(&model, &all).value;
        let k_f = team_curvature(&model, &solution.paths).value;
        let alpha = scenario.alpha();
        let n = scenario.n_robots();
        Self {
            k_f,
            k_g,
            eta: solver.eta,
            alpha,
            n,
            theorem2_fraction: theorem2_bound(k_f, k_g, solver.eta, alpha, n).ok(),
            theorem1_fraction: theorem1_bound(k_f, k_g, solver.eta).ok(),
            k_f_ground_set_note: K_F_SURROGATE_NOTE.to_string(),
            eta_note: (solver.method == OpMethod::Gcb).then(|| GCB_ETA_NOTE.to_string()),
        }
    }
}
