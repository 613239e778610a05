//! Sequential greedy assignment and the robust two-set planner.
//!
//! The robust planner splits the team into a *redundancy* set of `α` robots,
//! which keep their individually best paths regardless of overlap, and a
//! *coverage* set planned by sequential greedy assignment. The two sets are
//! rebuilt until every redundancy path is individually at least as good as
//! every coverage path.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{MetricGraph, Path, Scenario, VertexId, METRIC_TOL};
use crate::orienteering::{OpError, OpSolverConfig, REWARD_TOL};
use crate::reward::{RewardError, RewardModel};

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error("redundancy loop did not settle within {cap} iterations; this indicates a solver bug")]
    LoopCap { cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Rmop,
    Sga,
    Ng,
}

impl PlannerKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Rmop => "rmop",
            Self::Sga => "sga",
            Self::Ng => "ng",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rmop" => Ok(Self::Rmop),
            "sga" => Ok(Self::Sga),
            "ng" => Ok(Self::Ng),
            other => Err(format!("unknown planner '{other}' (expected rmop, sga or ng)")),
        }
    }
}

/// Per-step record of a sequential greedy assignment run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SgaTrace {
    pub order: Vec<usize>,
    /// Team-reward gain of each step's path over the paths before it.
    pub gains: Vec<f64>,
    /// Number of masked vertices when each step was planned.
    pub masked_counts: Vec<usize>,
}

/// Plans robots one after another; each robot sees the vertices of all
/// earlier paths masked out. `robots` is `(robot index, start)` in planning order.
pub fn sga(
    graph: &MetricGraph,
    model: &RewardModel,
    robots: &[(usize, VertexId)],
    budget: f64,
    solver: &OpSolverConfig,
) -> Result<(Vec<Path>, SgaTrace), PlanError> {
    let mut current = model.clone();
    let mut paths = Vec::with_capacity(robots.len());
    let mut trace = SgaTrace::default();
    for &(robot, start) in robots {
        trace.order.push(robot);
        trace.masked_counts.push(current.masked_count());
        let path = solver.solve(graph, &current, robot, start, budget)?;
        trace.gains.push(current.path_reward(&path)?);
        current = current.masked(path.vertices.iter().copied())?;
        paths.push(path);
    }
    Ok((paths, trace))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannerOptions {
    /// Non-canonical variant: mask the redundancy set's vertices before
    /// planning the coverage set.
    pub mask_redundant_set: bool,
}

/// Paths for the whole team plus planner diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub planner: PlannerKind,
    /// One path per robot, indexed by robot.
    pub paths: Vec<Path>,
    pub s1_robots: Vec<usize>,
    pub s2_robots: Vec<usize>,
    pub team_reward: f64,
    pub loop_iterations: usize,
    pub per_path_rewards: Vec<f64>,
}

impl Solution {
    /// Wraps a path per robot; every robot goes in the coverage set.
    pub fn baseline(planner: PlannerKind, model: &RewardModel, mut paths: Vec<Path>) -> Result<Self, RewardError> {
        paths.sort_by_key(|p| p.robot);
        let unmasked = model.unmasked();
        let per_path_rewards = paths
            .iter()
            .map(|p| unmasked.path_reward(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            planner,
            s1_robots: Vec::new(),
            s2_robots: paths.iter().map(|p| p.robot).collect(),
            team_reward: unmasked.eval_team(&paths)?,
            loop_iterations: 0,
            per_path_rewards,
            paths,
        })
    }
}

/// Sequential greedy assignment over the whole team in robot order.
pub fn solve_sga(scenario: &Scenario, solver: &OpSolverConfig) -> Result<Solution, PlanError> {
    let model = RewardModel::for_scenario(scenario);
    let robots: Vec<(usize, VertexId)> = scenario.starts().iter().copied().enumerate().collect();
    let (paths, _) = sga(scenario.graph(), &model, &robots, scenario.budget(), solver)?;
    Ok(Solution::baseline(PlannerKind::Sga, &model, paths)?)
}

/// Robust planner with default options.
pub fn solve_rmop(scenario: &Scenario, solver: &OpSolverConfig) -> Result<Solution, PlanError> {
    solve_rmop_with(scenario, solver, PlannerOptions::default())
}

pub fn solve_rmop_with(
    scenario: &Scenario,
    solver: &OpSolverConfig,
    options: PlannerOptions,
) -> Result<Solution, PlanError> {
    let graph = scenario.graph();
    let model = RewardModel::for_scenario(scenario);
    let budget = scenario.budget();
    let alpha = scenario.alpha();
    let n = scenario.n_robots();

    if alpha == 0 {
        let mut solution = solve_sga(scenario, solver)?;
        solution.planner = PlannerKind::Rmop;
        return Ok(solution);
    }

    // Independent best path per robot.
    let mut best: Vec<Path> = scenario
        .starts()
        .iter()
        .enumerate()
        .map(|(robot, &start)| solver.solve(graph, &model, robot, start, budget))
        .collect::<Result<_, _>>()?;
    let mut best_reward: Vec<f64> = best.iter().map(|p| model.path_reward(p)).collect::<Result<_, _>>()?;

    let cap = 10 * n;
    for iteration in 1..=cap {
        let mut ranked: Vec<usize> = (0..n).collect();
        ranked.sort_by(|&a, &b| best_reward[b].total_cmp(&best_reward[a]).then(a.cmp(&b)));
        let mut s1: Vec<usize> = ranked[..alpha].to_vec();
        s1.sort_unstable();
        let s2: Vec<usize> = (0..n).filter(|r| !s1.contains(r)).collect();

        let sga_model = if options.mask_redundant_set {
            model.masked(s1.iter().flat_map(|&r| best[r].vertices.iter().copied()))?
        } else {
            model.clone()
        };
        let robots: Vec<(usize, VertexId)> = s2.iter().map(|&r| (r, scenario.starts()[r])).collect();
        let (coverage, _) = sga(graph, &sga_model, &robots, budget, solver)?;
        let coverage_reward: Vec<f64> = coverage
            .iter()
            .map(|p| model.path_reward(p))
            .collect::<Result<_, _>>()?;

        let floor = s1.iter().map(|&r| best_reward[r]).fold(f64::INFINITY, f64::min);
        let ceiling = coverage_reward.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if ceiling <= floor + REWARD_TOL {
            let mut paths: Vec<Option<Path>> = vec![None; n];
            for &r in &s1 {
                paths[r] = Some(best[r].clone());
            }
            for p in coverage {
                let r = p.robot;
                paths[r] = Some(p);
            }
            let paths: Vec<Path> = paths.into_iter().map(|p| p.expect("every robot planned")).collect();
            let per_path_rewards = paths.iter().map(|p| model.path_reward(p)).collect::<Result<_, _>>()?;
            return Ok(Solution {
                planner: PlannerKind::Rmop,
                team_reward: model.eval_team(&paths)?,
                paths,
                s1_robots: s1,
                s2_robots: s2,
                loop_iterations: iteration,
                per_path_rewards,
            });
        }

        // A coverage path beat some redundancy path; it also beats what we had
        // stored for its robot, which was ranked below every redundancy path.
        for (p, reward) in coverage.into_iter().zip(coverage_reward) {
            if reward > floor + REWARD_TOL && reward > best_reward[p.robot] + REWARD_TOL {
                let r = p.robot;
                best_reward[r] = reward;
                best[r] = p;
            }
        }
    }
    Err(PlanError::LoopCap { cap })
}

/// One problem found by [`check_solution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionIssue {
    PathCount {
        expected: usize,
        got: usize,
    },
    RobotIndex {
        position: usize,
        robot: usize,
    },
    WrongRoot {
        robot: usize,
        expected: VertexId,
        got: Option<VertexId>,
    },
    InvalidVertex {
        robot: usize,
        vertex: VertexId,
    },
    RepeatedVertex {
        robot: usize,
        vertex: VertexId,
    },
    CostMismatch {
        robot: usize,
        stated: f64,
        actual: f64,
    },
    BudgetExceeded {
        robot: usize,
        cost: f64,
        overshoot: f64,
    },
    NotPartition {
        detail: String,
    },
    RedundancySize {
        expected: usize,
        got: usize,
    },
    RewardMismatch {
        robot: usize,
        stated: f64,
        actual: f64,
    },
    TeamRewardMismatch {
        stated: f64,
        actual: f64,
    },
    InvariantViolated {
        s1_robot: usize,
        s1_reward: f64,
        s2_robot: usize,
        s2_reward: f64,
    },
}

impl fmt::Display for SolutionIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PathCount { expected, got } => write!(f, "expected {expected} paths, found {got}"),
            Self::RobotIndex { position, robot } => write!(f, "path at position {position} belongs to robot {robot}"),
            Self::WrongRoot { robot, expected, got } => {
                write!(f, "robot {robot}: path must start at {expected}, starts at {got:?}")
            }
            Self::InvalidVertex { robot, vertex } => write!(f, "robot {robot}: unknown vertex {vertex}"),
            Self::RepeatedVertex { robot, vertex } => write!(f, "robot {robot}: vertex {vertex} repeated"),
            Self::CostMismatch { robot, stated, actual } => {
                write!(f, "robot {robot}: stated cost {stated} but path costs {actual}")
            }
            Self::BudgetExceeded { robot, cost, overshoot } => {
                write!(f, "robot {robot}: path cost {cost} exceeds budget by {overshoot}")
            }
            Self::NotPartition { detail } => write!(f, "redundancy/coverage sets are not a partition: {detail}"),
            Self::RedundancySize { expected, got } => write!(f, "redundancy set has {got} robots, expected {expected}"),
            Self::RewardMismatch { robot, stated, actual } => {
                write!(f, "robot {robot}: stated reward {stated} but path is worth {actual}")
            }
            Self::TeamRewardMismatch { stated, actual } => {
                write!(f, "stated team reward {stated} but paths are worth {actual}")
            }
            Self::InvariantViolated {
                s1_robot,
                s1_reward,
                s2_robot,
                s2_reward,
            } => write!(
                f,
                "redundancy invariant violated: robot {s2_robot} (coverage, {s2_reward}) outranks robot {s1_robot} (redundancy, {s1_reward})"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub issues: Vec<SolutionIssue>,
    /// Team reward recomputed from the paths.
    pub team_reward: Option<f64>,
}

impl SolutionReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + a.abs().max(b.abs()))
}

/// Checks every structural invariant of a solution against its scenario.
pub fn check_solution(scenario: &Scenario, solution: &Solution) -> SolutionReport {
    let graph = scenario.graph();
    let model = RewardModel::for_scenario(scenario);
    let n = scenario.n_robots();
    let mut issues = Vec::new();

    if solution.paths.len() != n {
        issues.push(SolutionIssue::PathCount {
            expected: n,
            got: solution.paths.len(),
        });
    }
    let mut rewards: Vec<Option<f64>> = vec![None; n];
    let mut all_valid = solution.paths.len() == n;
    for (position, path) in solution.paths.iter().enumerate() {
        let robot = path.robot;
        if robot != position || robot >= n {
            issues.push(SolutionIssue::RobotIndex { position, robot });
            all_valid = false;
            continue;
        }
        let expected = scenario.starts()[robot];
        if path.vertices.first() != Some(&expected) {
            issues.push(SolutionIssue::WrongRoot {
                robot,
                expected,
                got: path.vertices.first().copied(),
            });
        }
        let mut seen = vec![false; graph.len()];
        let mut valid = true;
        for &v in &path.vertices {
            if v >= graph.len() {
                issues.push(SolutionIssue::InvalidVertex { robot, vertex: v });
                valid = false;
            } else if seen[v] {
                issues.push(SolutionIssue::RepeatedVertex { robot, vertex: v });
                valid = false;
            } else {
                seen[v] = true;
            }
        }
        if !valid {
            all_valid = false;
            continue;
        }
        let actual: f64 = path.vertices.windows(2).map(|w| graph.dist(w[0], w[1])).sum();
        if !close(actual, path.cost) {
            issues.push(SolutionIssue::CostMismatch {
                robot,
                stated: path.cost,
                actual,
            });
        }
        if actual > scenario.budget() + METRIC_TOL {
            issues.push(SolutionIssue::BudgetExceeded {
                robot,
                cost: actual,
                overshoot: actual - scenario.budget(),
            });
        }
        let reward = model.path_reward(path).expect("vertices validated");
        if let Some(&stated) = solution.per_path_rewards.get(robot) {
            if !close(stated, reward) {
                issues.push(SolutionIssue::RewardMismatch {
                    robot,
                    stated,
                    actual: reward,
                });
            }
        }
        rewards[robot] = Some(reward);
    }

    let mut membership = vec![0usize; n];
    let mut out_of_range = Vec::new();
    for &r in solution.s1_robots.iter().chain(&solution.s2_robots) {
        match membership.get_mut(r) {
            Some(m) => *m += 1,
            None => out_of_range.push(r),
        }
    }
    if !out_of_range.is_empty() {
        issues.push(SolutionIssue::NotPartition {
            detail: format!("unknown robots {out_of_range:?}"),
        });
    }
    let missing: Vec<usize> = (0..n).filter(|&r| membership[r] == 0).collect();
    let doubled: Vec<usize> = (0..n).filter(|&r| membership[r] > 1).collect();
    if !missing.is_empty() {
        issues.push(SolutionIssue::NotPartition {
            detail: format!("robots {missing:?} are in neither set"),
        });
    }
    if !doubled.is_empty() {
        issues.push(SolutionIssue::NotPartition {
            detail: format!("robots {doubled:?} are listed twice"),
        });
    }
    let expected_s1 = match solution.planner {
        PlannerKind::Rmop => scenario.alpha(),
        PlannerKind::Sga | PlannerKind::Ng => 0,
    };
    if solution.s1_robots.len() != expected_s1 {
        issues.push(SolutionIssue::RedundancySize {
            expected: expected_s1,
            got: solution.s1_robots.len(),
        });
    }

    if solution.planner == PlannerKind::Rmop {
        let mut worst: Option<(usize, f64)> = None;
        for &r in &solution.s1_robots {
            if let Some(Some(w)) = rewards.get(r) {
                if worst.is_none_or(|(_, m)| *w < m) {
                    worst = Some((r, *w));
                }
            }
        }
        if let Some((s1_robot, s1_reward)) = worst {
            for &r in &solution.s2_robots {
                if let Some(Some(w)) = rewards.get(r) {
                    if *w > s1_reward + REWARD_TOL {
                        issues.push(SolutionIssue::InvariantViolated {
                            s1_robot,
                            s1_reward,
                            s2_robot: r,
                            s2_reward: *w,
                        });
                    }
                }
            }
        }
    }

    let team_reward = all_valid.then(|| model.eval_team(&solution.paths).expect("vertices validated"));
    if let Some(actual) = team_reward {
        if !close(actual, solution.team_reward) {
            issues.push(SolutionIssue::TeamRewardMismatch {
                stated: solution.team_reward,
                actual,
            });
        }
    }
    SolutionReport { issues, team_reward }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{four_vertex_graph, vertex};
    use crate::graph::RewardKind;

    fn scenario(starts: Vec<usize>, alpha: usize, budget: f64) -> Scenario {
        Scenario::new(four_vertex_graph(), starts, budget, alpha, RewardKind::Modular).unwrap()
    }

    #[test]
    fn sga_two_robots_four_vertices() {
        let s = scenario(vec![0, 0], 0, 2.0);
        let model = RewardModel::for_scenario(&s);
        let (paths, trace) = sga(s.graph(), &model, &[(0, 0), (1, 0)], 2.0, &OpSolverConfig::exact()).unwrap();
        assert_eq!(paths[0].vertices, vec![0, 1, 2]);
        assert_eq!(paths[1].vertices, vec![0, 3]);
        assert_eq!(model.eval_team(&paths).unwrap(), 12.0);
        assert_eq!(trace.gains, vec![8.0, 4.0]);
        assert_eq!(trace.masked_counts, vec![0, 3]);
        assert_eq!(trace.order, vec![0, 1]);
    }

    #[test]
    fn sga_single_robot_matches_solver() {
        let s = scenario(vec![0], 0, 2.0);
        let model = RewardModel::for_scenario(&s);
        let (paths, _) = sga(s.graph(), &model, &[(0, 0)], 2.0, &OpSolverConfig::gcb()).unwrap();
        let direct = OpSolverConfig::gcb().solve(s.graph(), &model, 0, 0, 2.0).unwrap();
        assert_eq!(paths, vec![direct]);
    }

    #[test]
    fn sga_all_zero_rewards() {
        let g = MetricGraph::euclidean((0..4).map(|i| vertex(i, i as f64, 0.0, 0.0)).collect()).unwrap();
        let s = Scenario::new(g, vec![0, 2], 5.0, 0, RewardKind::Modular).unwrap();
        let sol = solve_sga(&s, &OpSolverConfig::exact()).unwrap();
        assert_eq!(sol.paths[0].vertices, vec![0]);
        assert_eq!(sol.paths[1].vertices, vec![2]);
        assert_eq!(sol.team_reward, 0.0);
    }

    #[test]
    fn rmop_two_robots_one_attack() {
        let s = scenario(vec![0, 0], 1, 2.0);
        let sol = solve_rmop(&s, &OpSolverConfig::exact()).unwrap();
        assert_eq!(sol.s1_robots, vec![0]);
        assert_eq!(sol.s2_robots, vec![1]);
        assert_eq!(sol.paths[0].vertices, vec![0, 1, 2]);
        assert_eq!(sol.paths[1].vertices, vec![0, 1, 2]);
        assert_eq!(sol.team_reward, 8.0);
        assert_eq!(sol.loop_iterations, 1);
        assert!(check_solution(&s, &sol).is_clean());
    }

    #[test]
    fn rmop_alpha_zero_is_sga() {
        let s = scenario(vec![0, 3, 0], 0, 3.0);
        let a = solve_rmop(&s, &OpSolverConfig::exact()).unwrap();
        let b = solve_sga(&s, &OpSolverConfig::exact()).unwrap();
        assert_eq!(a.paths, b.paths);
        assert!(a.s1_robots.is_empty());
    }

    #[test]
    fn single_robot_requires_alpha_zero() {
        let err = Scenario::new(four_vertex_graph(), vec![0], 2.0, 1, RewardKind::Modular).unwrap_err();
        assert!(err.to_string().contains("alpha must be < N"));
        let s = scenario(vec![0], 0, 2.0);
        assert!(solve_rmop(&s, &OpSolverConfig::exact()).is_ok());
    }

    #[test]
    fn masked_variant_spreads_coverage() {
        let s = scenario(vec![0, 0], 1, 2.0);
        let sol = solve_rmop_with(
            &s,
            &OpSolverConfig::exact(),
            PlannerOptions {
                mask_redundant_set: true,
            },
        )
        .unwrap();
        assert_eq!(sol.paths[1].vertices, vec![0, 3]);
        assert!(check_solution(&s, &sol).is_clean());
    }

    #[test]
    fn check_flags_budget_violation() {
        let s = scenario(vec![0, 0], 1, 2.0);
        let mut sol = solve_rmop(&s, &OpSolverConfig::exact()).unwrap();
        sol.paths[1] = Path::new(s.graph(), 1, vec![0, 1, 2, 3]).unwrap();
        let report = check_solution(&s, &sol);
        let over = report
            .issues
            .iter()
            .find_map(|i| match i {
                SolutionIssue::BudgetExceeded { robot, overshoot, .. } => Some((*robot, *overshoot)),
                _ => None,
            })
            .expect("budget issue");
        assert_eq!(over.0, 1);
        assert!((over.1 - 8f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn check_flags_invariant_violation() {
        let s = scenario(vec![0, 0], 1, 2.0);
        let mut sol = solve_rmop(&s, &OpSolverConfig::exact()).unwrap();
        sol.paths[0] = Path::new(s.graph(), 0, vec![0, 3]).unwrap();
        sol.per_path_rewards[0] = 4.0;
        sol.team_reward = 12.0;
        let report = check_solution(&s, &sol);
        assert_eq!(
            report.issues,
            vec![SolutionIssue::InvariantViolated {
                s1_robot: 0,
                s1_reward: 4.0,
                s2_robot: 1,
                s2_reward: 8.0
            }]
        );
    }

    #[test]
    fn check_flags_wrong_root_and_partition() {
        let s = scenario(vec![0, 0], 1, 2.0);
        let mut sol = solve_rmop(&s, &OpSolverConfig::exact()).unwrap();
        sol.paths[1].vertices = vec![1, 2];
        sol.s2_robots.clear();
        let report = check_solution(&s, &sol);
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, SolutionIssue::WrongRoot { robot: 1, .. })));
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, SolutionIssue::NotPartition { .. })));
    }
}
