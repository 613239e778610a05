//! Brute-force optima for tiny instances.
//!
//! Every robot's feasible rooted paths are enumerated, collapsed to distinct
//! vertex sets (only the set matters for reward), and every combination of
//! one set per robot is scored. Rewards of vertex sets are tabulated over all
//! `2^|V|` bitmasks up front.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{MetricGraph, Path, Scenario, VertexId, METRIC_TOL};
use crate::orienteering::REWARD_TOL;
use crate::reward::RewardModel;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("brute force needs at most {limit} vertices, graph has {vertices}")]
    TooManyVertices { vertices: usize, limit: usize },
    #[error("brute force would score {combinations} path combinations (limit {limit})")]
    Guard { combinations: u128, limit: u128 },
    #[error("robot {0} is not part of the scenario")]
    UnknownRobot(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Cap on the product of per-robot distinct feasible vertex sets.
    pub max_combinations: u128,
    pub max_vertices: usize,
    /// Cap on simple paths explored per robot.
    pub max_paths_per_robot: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_combinations: 10_000_000,
            max_vertices: 20,
            max_paths_per_robot: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    /// One optimal path per robot considered, in the order the robots were given.
    pub witness: Vec<Path>,
}

/// Distinct vertex sets reachable by a simple rooted path within budget, each
/// with the lexicographically first path that visits it.
pub fn feasible_paths(
    graph: &MetricGraph,
    start: VertexId,
    budget: f64,
    max_paths: usize,
) -> Option<Vec<(u64, Vec<VertexId>)>> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        graph: &MetricGraph,
        seq: &mut Vec<VertexId>,
        mask: u64,
        cost: f64,
        budget: f64,
        seen: &mut std::collections::HashMap<u64, usize>,
        out: &mut Vec<(u64, Vec<VertexId>)>,
        explored: &mut usize,
        max_paths: usize,
    ) -> bool {
        *explored += 1;
        if *explored > max_paths {
            return false;
        }
        seen.entry(mask).or_insert_with(|| {
            out.push((mask, seq.clone()));
            out.len() - 1
        });
        let at = *seq.last().expect("rooted");
        for v in 0..graph.len() {
            if mask & (1 << v) != 0 {
                continue;
            }
            let step = graph.dist(at, v);
            if cost + step <= budget + METRIC_TOL {
                seq.push(v);
                let ok = rec(
                    graph,
                    seq,
                    mask | (1 << v),
                    cost + step,
                    budget,
                    seen,
                    out,
                    explored,
                    max_paths,
                );
                seq.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut out = Vec::new();
    let mut seen = std::collections::HashMap::new();
    let mut explored = 0;
    rec(
        graph,
        &mut vec![start],
        1 << start,
        0.0,
        budget,
        &mut seen,
        &mut out,
        &mut explored,
        max_paths,
    )
    .then_some(out)
}

fn reward_table(model: &RewardModel, n: usize) -> Vec<f64> {
    let mut buf = Vec::with_capacity(n);
    (0..1u64 << n)
        .map(|mask| {
            buf.clear();
            buf.extend((0..n).filter(|&v| mask & (1 << v) != 0));
            model.eval_vertex_set(&buf).expect("ids within graph")
        })
        .collect()
}

struct Prepared {
    table: Vec<f64>,
    options: Vec<Vec<(u64, Vec<VertexId>)>>,
}

fn prepare(scenario: &Scenario, robots: &[usize], config: &OracleConfig) -> Result<Prepared, OracleError> {
    let graph = scenario.graph();
    if graph.len() > config.max_vertices.min(63) {
        return Err(OracleError::TooManyVertices {
            vertices: graph.len(),
            limit: config.max_vertices.min(63),
        });
    }
    let mut options = Vec::with_capacity(robots.len());
    let mut combinations: u128 = 1;
    for &r in robots {
        let start = *scenario.starts().get(r).ok_or(OracleError::UnknownRobot(r))?;
        let paths =
            feasible_paths(graph, start, scenario.budget(), config.max_paths_per_robot).ok_or(OracleError::Guard {
                combinations: u128::MAX,
                limit: config.max_combinations,
            })?;
        combinations = combinations.saturating_mul(paths.len() as u128);
        if combinations > config.max_combinations {
            return Err(OracleError::Guard {
                combinations,
                limit: config.max_combinations,
            });
        }
        options.push(paths);
    }
    let model = RewardModel::for_scenario(scenario);
    Ok(Prepared {
        table: reward_table(&model, graph.len()),
        options,
    })
}

/// Calls `visit` with the chosen option index per robot for every combination.
fn for_each_combination(sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; sizes.len()];
    loop {
        visit(&idx);
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn witness(scenario: &Scenario, robots: &[usize], prepared: &Prepared, choice: &[usize]) -> Vec<Path> {
    robots
        .iter()
        .zip(choice)
        .zip(&prepared.options)
        .map(|((&robot, &c), opts)| {
            Path::new(scenario.graph(), robot, opts[c].1.clone()).expect("enumerated paths are simple")
        })
        .collect()
}

/// Max-min optimum: the best post-attack reward over all path combinations
/// when the adversary removes any `α` robots.
pub fn brute_force_rmop(scenario: &Scenario, config: &OracleConfig) -> Result<OracleResult, OracleError> {
    let robots: Vec<usize> = (0..scenario.n_robots()).collect();
    let prepared = prepare(scenario, &robots, config)?;
    let n = robots.len();
    let alpha = scenario.alpha();

    // Survivor index lists for every removal of exactly alpha robots.
    let mut survivor_sets: Vec<Vec<usize>> = Vec::new();
    for removal in 0u64..(1 << n) {
        if removal.count_ones() as usize == alpha {
            survivor_sets.push((0..n).filter(|&i| removal & (1 << i) == 0).collect());
        }
    }

    let sizes: Vec<usize> = prepared.options.iter().map(Vec::len).collect();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_choice = vec![0; n];
    let mut masks = vec![0u64; n];
    for_each_combination(&sizes, |choice| {
        let mut full = 0;
        for (i, &c) in choice.iter().enumerate() {
            masks[i] = prepared.options[i][c].0;
            full |= masks[i];
        }
        if prepared.table[full as usize] <= best_value + REWARD_TOL {
            return;
        }
        let mut worst = f64::INFINITY;
        for survivors in &survivor_sets {
            let union = survivors.iter().fold(0u64, |acc, &i| acc | masks[i]);
            worst = worst.min(prepared.table[union as usize]);
            if worst <= best_value + REWARD_TOL {
                return;
            }
        }
        best_value = worst;
        best_choice.copy_from_slice(choice);
    });
    Ok(OracleResult {
        value: best_value,
        witness: witness(scenario, &robots, &prepared, &best_choice),
    })
}

/// Multi-path optimum for the whole team, with no adversary.
pub fn brute_force_mop(scenario: &Scenario, config: &OracleConfig) -> Result<OracleResult, OracleError> {
    let robots: Vec<usize> = (0..scenario.n_robots()).collect();
    brute_force_mop_for(scenario, &robots, config)
}

/// Multi-path optimum restricted to a subset of the robots.
pub fn brute_force_mop_for(
    scenario: &Scenario,
    robots: &[usize],
    config: &OracleConfig,
) -> Result<OracleResult, OracleError> {
    let prepared = prepare(scenario, robots, config)?;
    let sizes: Vec<usize> = prepared.options.iter().map(Vec::len).collect();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_choice = vec![0; robots.len()];
    if robots.is_empty() {
        return Ok(OracleResult {
            value: 0.0,
            witness: Vec::new(),
        });
    }
    for_each_combination(&sizes, |choice| {
        let union = choice
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &c)| acc | prepared.options[i][c].0);
        let value = prepared.table[union as usize];
        if value > best_value + REWARD_TOL {
            best_value = value;
            best_choice.copy_from_slice(choice);
        }
    });
    Ok(OracleResult {
        value: best_value,
        witness: witness(scenario, robots, &prepared, &best_choice),
    })
}
