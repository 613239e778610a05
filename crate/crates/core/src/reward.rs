//! Single-path reward `g`, team reward `f` and curvature.
//!
//! `g` is either modular (a weight per vertex) or weighted coverage (a vertex
//! covers a set of cells, a cell counts once). The team reward of a set of
//! paths is `g` of the union of their vertices.
//!
//! A model can carry a *mask*: a set of already-visited vertices. Evaluation
//! under a mask is the gain over the masked set, `g(A ∪ M) − g(M)`, so masked
//! vertices contribute nothing and, for coverage, neither do cells they
//! already cover.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{MetricGraph, Path, RewardKind, Scenario, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RewardError {
    #[error("vertex {0} is outside the reward model")]
    UnknownVertex(VertexId),
    #[error("vertex {0} has no coverage set")]
    MissingCoverage(VertexId),
}

#[derive(Debug)]
struct RewardData {
    kind: RewardKind,
    weights: Vec<f64>,
    cover: Vec<Vec<u32>>,
    cell_weights: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Mask {
    vertices: Vec<bool>,
    cells: Vec<bool>,
    count: usize,
}

#[derive(Debug, Clone)]
pub struct RewardModel {
    data: Arc<RewardData>,
    mask: Option<Arc<Mask>>,
}

impl RewardModel {
    pub fn modular(weights: Vec<f64>) -> Self {
        Self {
            data: Arc::new(RewardData {
                kind: RewardKind::Modular,
                weights,
                cover: Vec::new(),
                cell_weights: Vec::new(),
            }),
            mask: None,
        }
    }

    /// Coverage model from per-vertex `(cell, weight)` lists. A cell's weight
    /// is taken from its first occurrence.
    pub fn coverage(sets: &[Vec<(u64, f64)>]) -> Self {
        let mut index: HashMap<u64, u32> = HashMap::new();
        let mut cell_weights = Vec::new();
        let cover = sets
            .iter()
            .map(|set| {
                let mut cells: Vec<u32> = set
                    .iter()
                    .map(|&(cell, w)| {
                        *index.entry(cell).or_insert_with(|| {
                            cell_weights.push(w);
                            (cell_weights.len() - 1) as u32
                        })
                    })
                    .collect();
                cells.sort_unstable();
                cells.dedup();
                cells
            })
            .collect();
        Self {
            data: Arc::new(RewardData {
                kind: RewardKind::Coverage,
                weights: Vec::new(),
                cover,
                cell_weights,
            }),
            mask: None,
        }
    }

    pub fn from_graph(graph: &MetricGraph, kind: RewardKind) -> Result<Self, RewardError> {
        match kind {
            RewardKind::Modular => Ok(Self::modular(graph.vertices().iter().map(|v| v.reward).collect())),
            RewardKind::Coverage => {
                let sets = graph
                    .vertices()
                    .iter()
                    .map(|v| v.coverage.clone().ok_or(RewardError::MissingCoverage(v.id)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Self::coverage(&sets))
            }
        }
    }

    pub fn for_scenario(scenario: &Scenario) -> Self {
        Self::from_graph(scenario.graph(), scenario.reward_kind()).expect("scenario validated coverage sets")
    }

    pub fn kind(&self) -> RewardKind {
        self.data.kind
    }

    pub fn n_vertices(&self) -> usize {
        match self.data.kind {
            RewardKind::Modular => self.data.weights.len(),
            RewardKind::Coverage => self.data.cover.len(),
        }
    }

    /// The same model with `vertices` added to the mask.
    pub fn masked<I: IntoIterator<Item = VertexId>>(&self, vertices: I) -> Result<Self, RewardError> {
        let n = self.n_vertices();
        let mut mask = match &self.mask {
            Some(m) => (**m).clone(),
            None => Mask {
                vertices: vec![false; n],
                cells: vec![false; self.data.cell_weights.len()],
                count: 0,
            },
        };
        for v in vertices {
            if v >= n {
                return Err(RewardError::UnknownVertex(v));
            }
            if !mask.vertices[v] {
                mask.vertices[v] = true;
                mask.count += 1;
                if self.data.kind == RewardKind::Coverage {
                    for &c in &self.data.cover[v] {
                        mask.cells[c as usize] = true;
                    }
                }
            }
        }
        Ok(Self {
            data: Arc::clone(&self.data),
            mask: Some(Arc::new(mask)),
        })
    }

    /// The model without any mask.
    pub fn unmasked(&self) -> Self {
        Self {
            data: Arc::clone(&self.data),
            mask: None,
        }
    }

    pub fn is_masked(&self, v: VertexId) -> bool {
        self.mask
            .as_ref()
            .is_some_and(|m| m.vertices.get(v).copied().unwrap_or(false))
    }

    pub fn masked_count(&self) -> usize {
        self.mask.as_ref().map_or(0, |m| m.count)
    }

    pub fn state(&self) -> RewardState<'_> {
        let slots = match self.data.kind {
            RewardKind::Modular => self.data.weights.len(),
            RewardKind::Coverage => self.data.cell_weights.len(),
        };
        RewardState {
            model: self,
            counts: vec![0; slots],
            value: 0.0,
        }
    }

    fn check(&self, v: VertexId) -> Result<(), RewardError> {
        if v < self.n_vertices() {
            Ok(())
        } else {
            Err(RewardError::UnknownVertex(v))
        }
    }

    /// `g` of a vertex set; duplicates are ignored.
    pub fn eval_vertex_set(&self, set: &[VertexId]) -> Result<f64, RewardError> {
        let mut state = self.state();
        for &v in set {
            self.check(v)?;
            state.insert(v);
        }
        Ok(state.value())
    }

    /// `g(v)` alone.
    pub fn singleton(&self, v: VertexId) -> f64 {
        self.state().gain(v)
    }

    /// Team reward: `g` of the union of the paths' vertices.
    pub fn eval_team<'p, I>(&self, paths: I) -> Result<f64, RewardError>
    where
        I: IntoIterator<Item = &'p Path>,
    {
        let mut state = self.state();
        for p in paths {
            for &v in &p.vertices {
                self.check(v)?;
                state.insert(v);
            }
        }
        Ok(state.value())
    }

    /// `f(base ∪ addition) − f(base)`.
    pub fn marginal(&self, base: &[Path], addition: &[Path]) -> Result<f64, RewardError> {
        let before = self.eval_team(base)?;
        let after = self.eval_team(base.iter().chain(addition))?;
        Ok((after - before).max(0.0))
    }

    /// Individual reward of one path, `f({P}) = g(P)`.
    pub fn path_reward(&self, path: &Path) -> Result<f64, RewardError> {
        self.eval_vertex_set(&path.vertices)
    }
}

/// Incremental evaluator over a multiset of vertices.
#[derive(Debug, Clone)]
pub struct RewardState<'m> {
    model: &'m RewardModel,
    counts: Vec<u32>,
    value: f64,
}

impl RewardState<'_> {
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Gain of adding `v` to the current contents.
    pub fn gain(&self, v: VertexId) -> f64 {
        let data = &self.model.data;
        let mask = self.model.mask.as_deref();
        match data.kind {
            RewardKind::Modular => {
                if self.counts[v] > 0 || mask.is_some_and(|m| m.vertices[v]) {
                    0.0
                } else {
                    data.weights[v]
                }
            }
            RewardKind::Coverage => data.cover[v]
                .iter()
                .filter(|&&c| self.counts[c as usize] == 0 && !mask.is_some_and(|m| m.cells[c as usize]))
                .map(|&c| data.cell_weights[c as usize])
                .sum(),
        }
    }

    /// Adds `v` and returns the gain.
    pub fn insert(&mut self, v: VertexId) -> f64 {
        let gain = self.gain(v);
        match self.model.data.kind {
            RewardKind::Modular => self.counts[v] += 1,
            RewardKind::Coverage => {
                for &c in &self.model.data.cover[v] {
                    self.counts[c as usize] += 1;
                }
            }
        }
        self.value += gain;
        gain
    }

    /// Undoes one earlier `insert(v)`.
    pub fn remove(&mut self, v: VertexId) {
        let data = &self.model.data;
        match data.kind {
            RewardKind::Modular => {
                self.counts[v] -= 1;
            }
            RewardKind::Coverage => {
                for &c in &data.cover[v] {
                    self.counts[c as usize] -= 1;
                }
            }
        }
        // Re-deriving the loss after the decrement is exactly the gain of re-inserting.
        self.value -= self.gain(v);
        if self.value < 0.0 {
            self.value = 0.0;
        }
    }
}

/// Curvature of a monotone submodular function over a finite ground set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEstimate {
    pub value: f64,
    pub ground_set_size: usize,
    /// Elements with `h({v}) = 0`; they carry no information and are left out of the minimum.
    pub skipped_zero_singletons: usize,
}

/// Relative slack under which a leave-one-out ratio counts as exactly 1.
const RATIO_SNAP: f64 = 1e-12;

/// `1 − min_v (h(V) − h(V∖v)) / h(v)` over elements `0..ground_len`, with
/// `h` given as an evaluator on index subsets. Returns 0 when every singleton is zero.
pub fn curvature<F>(ground_len: usize, mut evaluator: F) -> CurvatureEstimate
where
    F: FnMut(&[usize]) -> f64,
{
    let all: Vec<usize> = (0..ground_len).collect();
    let whole = evaluator(&all);
    let mut min_ratio: Option<f64> = None;
    let mut skipped = 0;
    let mut rest = Vec::with_capacity(ground_len.saturating_sub(1));
    for v in 0..ground_len {
        let single = evaluator(&[v]);
        if single <= 0.0 {
            skipped += 1;
            continue;
        }
        rest.clear();
        rest.extend(all.iter().copied().filter(|&u| u != v));
        let unique = whole - evaluator(&rest);
        let mut ratio = unique / single;
        if (ratio - 1.0).abs() <= RATIO_SNAP * (1.0 + whole.abs() / single) {
            ratio = 1.0;
        }
        min_ratio = Some(min_ratio.map_or(ratio, |m: f64| m.min(ratio)));
    }
    let value = min_ratio.map_or(0.0, |r| (1.0 - r).clamp(0.0, 1.0));
    CurvatureEstimate {
        value,
        ground_set_size: ground_len,
        skipped_zero_singletons: skipped,
    }
}

/// Curvature `k_g` of the single-path reward over a vertex ground set.
pub fn vertex_curvature(model: &RewardModel, ground: &[VertexId]) -> CurvatureEstimate {
    let mut buf = Vec::with_capacity(ground.len());
    curvature(ground.len(), |idx| {
        buf.clear();
        buf.extend(idx.iter().map(|&i| ground[i]));
        model.eval_vertex_set(&buf).expect("ground set ids are valid")
    })
}

/// Curvature `k_f` of the team reward with the given paths as the ground set.
pub fn team_curvature(model: &RewardModel, paths: &[Path]) -> CurvatureEstimate {
    curvature(paths.len(), |idx| {
        model
            .eval_team(idx.iter().map(|&i| &paths[i]))
            .expect("paths reference valid vertices")
    })
}
