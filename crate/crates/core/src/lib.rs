//! Planning budget-constrained paths for a robot team so that the collected
//! reward survives the worst-case loss of `α` robots.
//!
//! - [`graph`]: metric graphs, scenarios, generation and the JSON document form
//! - [`reward`]: modular and coverage rewards, team reward, curvature
//! - [`orienteering`]: single-robot solvers (exhaustive and cost-benefit greedy)
//! - [`planner`]: sequential greedy assignment and the robust two-set planner
//! - [`attack`]: exhaustive, greedy, random and partial adversaries
//! - [`bench`]: baselines, bound calculators, brute-force oracles, experiments

pub mod attack;
pub mod bench;
pub mod graph;
pub mod orienteering;
pub mod planner;
pub mod reward;

pub use attack::{AttackModel, AttackOutcome};
pub use graph::{load_scenario, GenParams, MetricGraph, Path, RewardKind, Scenario, Vertex, VertexId};
pub use orienteering::{OpMethod, OpSolverConfig};
pub use planner::{check_solution, sga, solve_rmop, solve_sga, PlannerKind, Solution};
pub use reward::RewardModel;
