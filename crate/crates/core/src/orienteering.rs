//! Single-robot orienteering: find a rooted path of cost at most `budget`
//! that maximizes the reward under a (possibly masked) reward model.
//!
//! Two solvers share the [`OpSolverConfig`] front end: an exhaustive search
//! that is exact on small graphs, and a generalized cost-benefit greedy that
//! grows a vertex set by gain per unit of cheapest-insertion route cost.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, MetricGraph, Path, VertexId, METRIC_TOL};
use crate::reward::{RewardModel, RewardState};

/// Largest graph the exhaustive solver accepts by default.
pub const EXACT_VERTEX_LIMIT: usize = 14;

/// Rewards closer than this are treated as ties.
pub const REWARD_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum OpError {
    #[error(
        "exact solver is limited to {limit} vertices but the graph has {vertices}; \
         use the gcb subroutine for larger graphs"
    )]
    TooLarge { vertices: usize, limit: usize },
    #[error("start vertex {0} does not exist")]
    BadStart(VertexId),
    #[error("budget must be finite and non-negative, got {0}")]
    BadBudget(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpMethod {
    Exact,
    Gcb,
}

impl std::str::FromStr for OpMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "gcb" => Ok(Self::Gcb),
            other => Err(format!("unknown subroutine '{other}' (expected exact or gcb)")),
        }
    }
}

/// Approximation factor attributed to the cost-benefit greedy, `2 / (1 − 1/e)`.
pub fn gcb_eta() -> f64 {
    2.0 / (1.0 - (-1.0f64).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpSolverConfig {
    pub method: OpMethod,
    /// Approximation factor used only when reporting bounds.
    pub eta: f64,
    #[serde(default = "default_exact_limit")]
    pub exact_vertex_limit: usize,
}

fn default_exact_limit() -> usize {
    EXACT_VERTEX_LIMIT
}

impl OpSolverConfig {
    pub fn exact() -> Self {
        Self {
            method: OpMethod::Exact,
            eta: 1.0,
            exact_vertex_limit: EXACT_VERTEX_LIMIT,
        }
    }

    pub fn gcb() -> Self {
        Self {
            method: OpMethod::Gcb,
            eta: gcb_eta(),
            exact_vertex_limit: EXACT_VERTEX_LIMIT,
        }
    }

    pub fn for_method(method: OpMethod) -> Self {
        match method {
            OpMethod::Exact => Self::exact(),
            OpMethod::Gcb => Self::gcb(),
        }
    }

    /// Solves for one robot and stamps the robot index on the result.
    pub fn solve(
        &self,
        graph: &MetricGraph,
        model: &RewardModel,
        robot: usize,
        start: VertexId,
        budget: f64,
    ) -> Result<Path, OpError> {
        let mut path = match self.method {
            OpMethod::Exact => exact_with_limit(graph, model, start, budget, self.exact_vertex_limit)?,
            OpMethod::Gcb => solve_op_gcb(graph, model, start, budget)?,
        };
        path.robot = robot;
        Ok(path)
    }
}

fn check_inputs(graph: &MetricGraph, start: VertexId, budget: f64) -> Result<(), OpError> {
    if start >= graph.len() {
        return Err(OpError::BadStart(start));
    }
    if !budget.is_finite() || budget < 0.0 {
        return Err(OpError::BadBudget(budget));
    }
    Ok(())
}

/// Exhaustive search over simple rooted paths with cost at most `budget`.
///
/// Returns the best path; among equal rewards the lexicographically smallest
/// vertex sequence wins. The returned path has `robot == 0`.
pub fn solve_op_exact(graph: &MetricGraph, model: &RewardModel, start: VertexId, budget: f64) -> Result<Path, OpError> {
    exact_with_limit(graph, model, start, budget, EXACT_VERTEX_LIMIT)
}

fn exact_with_limit(
    graph: &MetricGraph,
    model: &RewardModel,
    start: VertexId,
    budget: f64,
    limit: usize,
) -> Result<Path, OpError> {
    check_inputs(graph, start, budget)?;
    if graph.len() > limit {
        return Err(OpError::TooLarge {
            vertices: graph.len(),
            limit,
        });
    }
    let n = graph.len();
    let mut search = ExactSearch {
        graph,
        state: model.state(),
        budget,
        visited: vec![false; n],
        seq: vec![start],
        best_value: f64::NEG_INFINITY,
        best_seq: vec![start],
    };
    search.visited[start] = true;
    search.state.insert(start);
    search.visit(start, 0.0);
    let best = search.best_seq;
    let cost = graph.path_cost(&best)?;
    Ok(Path {
        robot: 0,
        vertices: best,
        cost,
    })
}

struct ExactSearch<'a> {
    graph: &'a MetricGraph,
    state: RewardState<'a>,
    budget: f64,
    visited: Vec<bool>,
    seq: Vec<VertexId>,
    best_value: f64,
    best_seq: Vec<VertexId>,
}

impl ExactSearch<'_> {
    // Children are tried in ascending id order, so the traversal is lexicographic
    // and only strict improvements need to replace the incumbent.
    fn visit(&mut self, at: VertexId, cost: f64) {
        let value = self.state.value();
        if value > self.best_value + REWARD_TOL {
            self.best_value = value;
            self.best_seq.clone_from(&self.seq);
        }
        let remaining = self.budget - cost;
        let n = self.graph.len();
        // Anything reachable later is reachable directly (metric), and gains only
        // shrink as the path grows, so this sum bounds every extension.
        let mut bound = value;
        for w in 0..n {
            if !self.visited[w] && self.graph.dist(at, w) <= remaining + METRIC_TOL {
                bound += self.state.gain(w);
            }
        }
        if bound <= self.best_value + REWARD_TOL {
            return;
        }
        for next in 0..n {
            if self.visited[next] {
                continue;
            }
            let step = self.graph.dist(at, next);
            if step > remaining + METRIC_TOL {
                continue;
            }
            self.visited[next] = true;
            self.seq.push(next);
            self.state.insert(next);
            self.visit(next, cost + step);
            self.state.remove(next);
            self.seq.pop();
            self.visited[next] = false;
        }
    }
}

/// An ordering of a vertex set as an open path from its root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteEstimate {
    pub ordering: Vec<VertexId>,
    pub cost: f64,
}

/// Cheapest position to insert `v` into an open route, as `(index, cost increase)`.
/// Index `route.len()` means appending. Earliest position wins ties.
fn best_insertion(graph: &MetricGraph, route: &[VertexId], v: VertexId) -> (usize, f64) {
    let last = *route.last().expect("route has a root");
    let mut best = (route.len(), graph.dist(last, v));
    for pos in 1..route.len() {
        let (a, b) = (route[pos - 1], route[pos]);
        let inc = graph.dist(a, v) + graph.dist(v, b) - graph.dist(a, b);
        if inc < best.1 || (inc == best.1 && pos < best.0) {
            best = (pos, inc);
        }
    }
    best
}

/// Builds an open route from `start` through `set` by repeated cheapest
/// insertion. Ties go to the smaller vertex id, then the earlier position.
pub fn cheapest_insertion(graph: &MetricGraph, start: VertexId, set: &[VertexId]) -> Result<RouteEstimate, OpError> {
    if start >= graph.len() {
        return Err(OpError::BadStart(start));
    }
    let mut pending: Vec<VertexId> = Vec::with_capacity(set.len());
    for &v in set {
        if v >= graph.len() {
            return Err(GraphError::UnknownVertex(v).into());
        }
        if v != start {
            pending.push(v);
        }
    }
    pending.sort_unstable();
    pending.dedup();

    let mut route = vec![start];
    while !pending.is_empty() {
        let mut pick: Option<(usize, usize, f64)> = None;
        for (i, &v) in pending.iter().enumerate() {
            let (pos, inc) = best_insertion(graph, &route, v);
            if pick.is_none_or(|(_, _, best)| inc < best) {
                pick = Some((i, pos, inc));
            }
        }
        let (i, pos, _) = pick.expect("pending is non-empty");
        let v = pending.remove(i);
        route.insert(pos, v);
    }
    let cost = graph.path_cost(&route)?;
    Ok(RouteEstimate { ordering: route, cost })
}

/// Generalized cost-benefit greedy with a strict budget.
///
/// Each round takes the candidate with the largest ratio of reward gain to
/// cheapest-insertion cost increase (zero increase ranks first, ties go to the
/// smaller id). An unaffordable pick is dropped for good. The result is the
/// better of the greedy route and the best affordable two-vertex path.
pub fn solve_op_gcb(graph: &MetricGraph, model: &RewardModel, start: VertexId, budget: f64) -> Result<Path, OpError> {
    check_inputs(graph, start, budget)?;
    let n = graph.len();
    let mut state = model.state();
    state.insert(start);
    let mut route = vec![start];
    let mut cost = 0.0;
    let mut alive: Vec<bool> = (0..n).map(|v| v != start).collect();

    loop {
        let mut pick: Option<(VertexId, f64, usize, f64)> = None;
        for (v, live) in alive.iter_mut().enumerate() {
            if !*live {
                continue;
            }
            let gain = state.gain(v);
            if gain <= 0.0 {
                // Gains never grow back under a monotone submodular reward.
                *live = false;
                continue;
            }
            let (pos, inc) = best_insertion(graph, &route, v);
            let ratio = if inc <= 0.0 { f64::INFINITY } else { gain / inc };
            if pick.is_none_or(|(_, best, _, _)| ratio > best) {
                pick = Some((v, ratio, pos, inc));
            }
        }
        let Some((v, _, pos, inc)) = pick else { break };
        alive[v] = false;
        if cost + inc.max(0.0) <= budget + METRIC_TOL {
            route.insert(pos, v);
            state.insert(v);
            cost += inc.max(0.0);
        }
    }

    let greedy_value = state.value();
    let mut best_single: Option<(VertexId, f64)> = None;
    let mut single_state = model.state();
    single_state.insert(start);
    for v in 0..n {
        if v == start || graph.dist(start, v) > budget + METRIC_TOL {
            continue;
        }
        let value = single_state.value() + single_state.gain(v);
        if best_single.is_none_or(|(_, best)| value > best) {
            best_single = Some((v, value));
        }
    }
    let vertices = match best_single {
        Some((v, value)) if value > greedy_value + REWARD_TOL => vec![start, v],
        _ => route,
    };
    let cost = graph.path_cost(&vertices)?;
    Ok(Path {
        robot: 0,
        vertices,
        cost,
    })
}
