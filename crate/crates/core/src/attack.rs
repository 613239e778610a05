//! Adversaries that remove robots from a planned team.

use std::fmt;

use rand::seq::index;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orienteering::REWARD_TOL;
use crate::planner::Solution;
use crate::reward::{RewardError, RewardModel};

/// Default cap on the number of subsets the exhaustive attack will enumerate.
pub const ENUMERATION_GUARD: u128 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum AttackError {
    #[error("attack size {size} must be smaller than the team size {robots}")]
    TooLarge { size: usize, robots: usize },
    #[error("exhaustive attack would enumerate {subsets} subsets (limit {limit}); use the greedy attack")]
    Guard { subsets: u128, limit: u128 },
    #[error("actual attack size {actual} exceeds the planned size {planned}")]
    PartialExceedsPlan { actual: usize, planned: usize },
    #[error(transparent)]
    Reward(#[from] RewardError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackModel {
    WorstExhaustive,
    WorstGreedy,
    Random,
    Partial,
}

impl AttackModel {
    pub fn name(self) -> &'static str {
        match self {
            Self::WorstExhaustive => "worst-exhaustive",
            Self::WorstGreedy => "worst-greedy",
            Self::Random => "random",
            Self::Partial => "partial",
        }
    }
}

impl fmt::Display for AttackModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    /// Removed robot indices, ascending.
    pub removed: Vec<usize>,
    pub residual: f64,
    pub model: AttackModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Team reward of the robots not in `removed`.
pub fn residual(model: &RewardModel, solution: &Solution, removed: &[usize]) -> Result<f64, RewardError> {
    let mut out = vec![false; solution.paths.len()];
    for &r in removed {
        if let Some(slot) = out.get_mut(r) {
            *slot = true;
        }
    }
    model.eval_team(
        solution
            .paths
            .iter()
            .enumerate()
            .filter(|(i, _)| !out[*i])
            .map(|(_, p)| p),
    )
}

fn check_size(solution: &Solution, size: usize) -> Result<(), AttackError> {
    let robots = solution.paths.len();
    if size >= robots && !(size == 0 && robots == 0) {
        return Err(AttackError::TooLarge { size, robots });
    }
    Ok(())
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exhaustive minimizer of the residual over all subsets of exactly `size`
/// robots. Ties go to the lexicographically smallest index set.
pub fn worst_case_attack(model: &RewardModel, solution: &Solution, size: usize) -> Result<AttackOutcome, AttackError> {
    worst_case_attack_with_guard(model, solution, size, ENUMERATION_GUARD)
}

pub fn worst_case_attack_with_guard(
    model: &RewardModel,
    solution: &Solution,
    size: usize,
    guard: u128,
) -> Result<AttackOutcome, AttackError> {
    check_size(solution, size)?;
    let n = solution.paths.len();
    let subsets = binomial(n, size);
    if subsets > guard {
        return Err(AttackError::Guard { subsets, limit: guard });
    }
    let mut combo: Vec<usize> = (0..size).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let value = residual(model, solution, &combo)?;
        if best.as_ref().is_none_or(|(_, b)| value < *b - REWARD_TOL) {
            best = Some((combo.clone(), value));
        }
        if !next_combination(&mut combo, n) {
            break;
        }
    }
    let (removed, residual) = best.expect("at least one subset");
    Ok(AttackOutcome {
        removed,
        residual,
        model: AttackModel::WorstExhaustive,
        seed: None,
    })
}

/// Advances a sorted k-combination of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in (i + 1)..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Removes, `size` times, the robot whose removal lowers the residual most.
/// Its residual is an upper bound on the exhaustive one.
pub fn greedy_attack(model: &RewardModel, solution: &Solution, size: usize) -> Result<AttackOutcome, AttackError> {
    check_size(solution, size)?;
    let n = solution.paths.len();
    let mut removed: Vec<usize> = Vec::with_capacity(size);
    let mut current = residual(model, solution, &removed)?;
    for _ in 0..size {
        let mut pick: Option<(usize, f64)> = None;
        for r in 0..n {
            if removed.contains(&r) {
                continue;
            }
            removed.push(r);
            let value = residual(model, solution, &removed)?;
            removed.pop();
            if pick.is_none_or(|(_, b)| value < b - REWARD_TOL) {
                pick = Some((r, value));
            }
        }
        let (r, value) = pick.expect("size < n leaves a candidate");
        removed.push(r);
        current = value;
    }
    removed.sort_unstable();
    Ok(AttackOutcome {
        removed,
        residual: current,
        model: AttackModel::WorstGreedy,
        seed: None,
    })
}

/// Uniformly random subset of exactly `size` robots, reproducible per seed.
pub fn random_attack(
    model: &RewardModel,
    solution: &Solution,
    size: usize,
    seed: u64,
) -> Result<AttackOutcome, AttackError> {
    check_size(solution, size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut removed = index::sample(&mut rng, solution.paths.len(), size).into_vec();
    removed.sort_unstable();
    let residual = residual(model, solution, &removed)?;
    Ok(AttackOutcome {
        removed,
        residual,
        model: AttackModel::Random,
        seed: Some(seed),
    })
}

/// Worst-case attack on fewer robots than the planner assumed.
pub fn partial_worst_attack(
    model: &RewardModel,
    solution: &Solution,
    planned_alpha: usize,
    actual_size: usize,
) -> Result<AttackOutcome, AttackError> {
    if actual_size > planned_alpha {
        return Err(AttackError::PartialExceedsPlan {
            actual: actual_size,
            planned: planned_alpha,
        });
    }
    let mut outcome = worst_case_attack(model, solution, actual_size)?;
    outcome.model = AttackModel::Partial;
    Ok(outcome)
}
