//! Metric graphs, scenarios and their JSON document form.
//!
//! A [`Scenario`] bundles a [`MetricGraph`] with one start vertex per robot,
//! the per-robot path budget and the number of robots an adversary may remove.
//! Everything here is immutable once constructed.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack used for every metric and budget comparison on accumulated `f64` sums.
pub const METRIC_TOL: f64 = 1e-9;

pub type VertexId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("malformed scenario document: {0}")]
    Parse(String),
    #[error("vertex at position {index} has id {id}; ids must be dense 0..n-1 in order")]
    NonDenseId { index: usize, id: usize },
    #[error("vertex {0} has a negative or non-finite reward")]
    BadReward(usize),
    #[error("vertex {vertex} has a negative or non-finite weight for cell {cell}")]
    BadCoverageWeight { vertex: usize, cell: u64 },
    #[error("cell {cell} has inconsistent weights ({first} vs {second})")]
    InconsistentCellWeight { cell: u64, first: f64, second: f64 },
    #[error("vertex {0} has a non-finite position")]
    BadPosition(usize),
    #[error("distance matrix must be {expected}x{expected}, row {row} has {got} entries")]
    MatrixShape { expected: usize, row: usize, got: usize },
    #[error("distance matrix has {got} rows, expected {expected}")]
    MatrixRows { expected: usize, got: usize },
    #[error("distance ({i},{j}) is negative or non-finite")]
    BadDistance { i: usize, j: usize },
    #[error("distance matrix is not symmetric at ({i},{j})")]
    Asymmetric { i: usize, j: usize },
    #[error("distance matrix diagonal entry ({0},{0}) is not zero")]
    NonZeroDiagonal(usize),
    #[error("triangle inequality violated: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    Triangle { i: usize, j: usize, k: usize },
    #[error("graph has no vertices")]
    Empty,
    #[error("no robots given")]
    NoRobots,
    #[error("start of robot {robot} refers to unknown vertex {vertex}")]
    BadStart { robot: usize, vertex: usize },
    #[error("alpha must be < N (alpha = {alpha}, N = {robots})")]
    AlphaTooLarge { alpha: usize, robots: usize },
    #[error("budget must be a finite non-negative number, got {0}")]
    BadBudget(f64),
    #[error("reward_kind is coverage but vertex {0} has no coverage set")]
    MissingCoverage(usize),
    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
    #[error("vertex {0} appears more than once in the path")]
    RepeatedVertex(usize),
    #[error("invalid generator parameter: {0}")]
    Generator(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    #[default]
    Modular,
    Coverage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    pub id: VertexId,
    pub x: f64,
    pub y: f64,
    pub reward: f64,
    /// `(cell id, cell weight)` pairs. Only consulted for coverage rewards.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Vec<(u64, f64)>>,
}

/// A complete graph on the vertices with a dense distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    distance: Vec<f64>,
    explicit: bool,
}

impl MetricGraph {
    /// Euclidean graph over the vertex positions.
    pub fn euclidean(vertices: Vec<Vertex>) -> Result<Self, GraphError> {
        check_vertices(&vertices)?;
        let n = vertices.len();
        let mut distance = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (vertices[i].x - vertices[j].x).hypot(vertices[i].y - vertices[j].y);
                distance[i * n + j] = d;
                distance[j * n + i] = d;
            }
        }
        Ok(Self {
            vertices,
            distance,
            explicit: false,
        })
    }

    /// Graph with an explicit matrix. Shape and entry sanity are checked here,
    /// the metric axioms are not: run [`MetricGraph::verify_metric`] for that.
    pub fn with_matrix(vertices: Vec<Vertex>, matrix: &[Vec<f64>]) -> Result<Self, GraphError> {
        check_vertices(&vertices)?;
        let n = vertices.len();
        if matrix.len() != n {
            return Err(GraphError::MatrixRows {
                expected: n,
                got: matrix.len(),
            });
        }
        let mut distance = Vec::with_capacity(n * n);
        for (row, entries) in matrix.iter().enumerate() {
            if entries.len() != n {
                return Err(GraphError::MatrixShape {
                    expected: n,
                    row,
                    got: entries.len(),
                });
            }
            for (col, &d) in entries.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(GraphError::BadDistance { i: row, j: col });
                }
            }
            distance.extend_from_slice(entries);
        }
        Ok(Self {
            vertices,
            distance,
            explicit: true,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.get(id)
    }

    /// True when the matrix was supplied rather than derived from positions.
    pub fn has_explicit_matrix(&self) -> bool {
        self.explicit
    }

    #[inline]
    pub fn dist(&self, i: VertexId, j: VertexId) -> f64 {
        self.distance[i * self.vertices.len() + j]
    }

    pub fn matrix_rows(&self) -> Vec<Vec<f64>> {
        self.distance
            .chunks(self.vertices.len().max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// Lists every diagonal, symmetry and triangle violation.
    pub fn verify_metric(&self) -> MetricReport {
        let n = self.len();
        let mut report = MetricReport::default();
        for i in 0..n {
            if self.dist(i, i).abs() > METRIC_TOL {
                report.diagonal.push(i);
            }
            for j in (i + 1)..n {
                if (self.dist(i, j) - self.dist(j, i)).abs() > METRIC_TOL {
                    report.asymmetric.push((i, j));
                }
            }
        }
        for i in 0..n {
            for k in 0..n {
                if i == k {
                    continue;
                }
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    if self.dist(i, k) > self.dist(i, j) + self.dist(j, k) + METRIC_TOL {
                        report.triangle.push((i, j, k));
                    }
                }
            }
        }
        report
    }

    /// Sum of distances over consecutive vertices; `0.0` for a single vertex.
    pub fn path_cost(&self, vertices: &[VertexId]) -> Result<f64, GraphError> {
        let mut seen = vec![false; self.len()];
        for &v in vertices {
            if v >= self.len() {
                return Err(GraphError::UnknownVertex(v));
            }
            if seen[v] {
                return Err(GraphError::RepeatedVertex(v));
            }
            seen[v] = true;
        }
        Ok(vertices.windows(2).map(|w| self.dist(w[0], w[1])).sum())
    }
}

fn check_vertices(vertices: &[Vertex]) -> Result<(), GraphError> {
    if vertices.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut cell_weights: BTreeMap<u64, f64> = BTreeMap::new();
    for (index, v) in vertices.iter().enumerate() {
        if v.id != index {
            return Err(GraphError::NonDenseId { index, id: v.id });
        }
        if !v.x.is_finite() || !v.y.is_finite() {
            return Err(GraphError::BadPosition(index));
        }
        if !v.reward.is_finite() || v.reward < 0.0 {
            return Err(GraphError::BadReward(index));
        }
        for &(cell, w) in v.coverage.iter().flatten() {
            if !w.is_finite() || w < 0.0 {
                return Err(GraphError::BadCoverageWeight { vertex: index, cell });
            }
            match cell_weights.get(&cell) {
                Some(&first) if first != w => {
                    return Err(GraphError::InconsistentCellWeight { cell, first, second: w })
                }
                _ => {
                    cell_weights.insert(cell, w);
                }
            }
        }
    }
    Ok(())
}

/// Metric-axiom violations. Empty means the matrix is a metric.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub diagonal: Vec<VertexId>,
    pub asymmetric: Vec<(VertexId, VertexId)>,
    /// `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k)`.
    pub triangle: Vec<(VertexId, VertexId, VertexId)>,
}

impl MetricReport {
    pub fn is_clean(&self) -> bool {
        self.diagonal.is_empty() && self.asymmetric.is_empty() && self.triangle.is_empty()
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return write!(f, "metric: ok");
        }
        for i in &self.diagonal {
            writeln!(f, "diagonal violation at {i}")?;
        }
        for (i, j) in &self.asymmetric {
            writeln!(f, "symmetry violation at ({i},{j})")?;
        }
        for (i, j, k) in &self.triangle {
            writeln!(f, "triangle violation ({i},{j},{k})")?;
        }
        Ok(())
    }
}

/// A rooted path for one robot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub robot: usize,
    pub vertices: Vec<VertexId>,
    pub cost: f64,
}

impl Path {
    pub fn new(graph: &MetricGraph, robot: usize, vertices: Vec<VertexId>) -> Result<Self, GraphError> {
        let cost = graph.path_cost(&vertices)?;
        Ok(Self { robot, vertices, cost })
    }

    /// The trivial path that never leaves the start.
    pub fn stay(robot: usize, start: VertexId) -> Self {
        Self {
            robot,
            vertices: vec![start],
            cost: 0.0,
        }
    }
}

/// The full problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    graph: MetricGraph,
    starts: Vec<VertexId>,
    budget: f64,
    alpha: usize,
    reward_kind: RewardKind,
}

impl Scenario {
    /// Validates every instance invariant, including the metric axioms.
    pub fn new(
        graph: MetricGraph,
        starts: Vec<VertexId>,
        budget: f64,
        alpha: usize,
        reward_kind: RewardKind,
    ) -> Result<Self, GraphError> {
        let report = graph.verify_metric();
        if let Some(&i) = report.diagonal.first() {
            return Err(GraphError::NonZeroDiagonal(i));
        }
        if let Some(&(i, j)) = report.asymmetric.first() {
            return Err(GraphError::Asymmetric { i, j });
        }
        if let Some(&(i, j, k)) = report.triangle.first() {
            return Err(GraphError::Triangle { i, j, k });
        }
        Self::new_unchecked_metric(graph, starts, budget, alpha, reward_kind)
    }

    fn new_unchecked_metric(
        graph: MetricGraph,
        starts: Vec<VertexId>,
        budget: f64,
        alpha: usize,
        reward_kind: RewardKind,
    ) -> Result<Self, GraphError> {
        if starts.is_empty() {
            return Err(GraphError::NoRobots);
        }
        for (robot, &vertex) in starts.iter().enumerate() {
            if vertex >= graph.len() {
                return Err(GraphError::BadStart { robot, vertex });
            }
        }
        if alpha >= starts.len() {
            return Err(GraphError::AlphaTooLarge {
                alpha,
                robots: starts.len(),
            });
        }
        if !budget.is_finite() || budget < 0.0 {
            return Err(GraphError::BadBudget(budget));
        }
        if reward_kind == RewardKind::Coverage {
            if let Some(v) = graph.vertices().iter().position(|v| v.coverage.is_none()) {
                return Err(GraphError::MissingCoverage(v));
            }
        }
        Ok(Self {
            graph,
            starts,
            budget,
            alpha,
            reward_kind,
        })
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn starts(&self) -> &[VertexId] {
        &self.starts
    }

    pub fn n_robots(&self) -> usize {
        self.starts.len()
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn reward_kind(&self) -> RewardKind {
        self.reward_kind
    }

    /// Same instance with a different attack size.
    pub fn with_alpha(&self, alpha: usize) -> Result<Self, GraphError> {
        Self::new_unchecked_metric(
            self.graph.clone(),
            self.starts.clone(),
            self.budget,
            alpha,
            self.reward_kind,
        )
    }

    /// Same instance with different robot starts.
    pub fn with_starts(&self, starts: Vec<VertexId>) -> Result<Self, GraphError> {
        Self::new_unchecked_metric(self.graph.clone(), starts, self.budget, self.alpha, self.reward_kind)
    }

    /// Same instance with a different budget.
    pub fn with_budget(&self, budget: f64) -> Result<Self, GraphError> {
        Self::new_unchecked_metric(
            self.graph.clone(),
            self.starts.clone(),
            budget,
            self.alpha,
            self.reward_kind,
        )
    }

    pub fn to_document(&self) -> ScenarioDocument {
        ScenarioDocument {
            vertices: self.graph.vertices.clone(),
            distance_matrix: self.graph.explicit.then(|| self.graph.matrix_rows()),
            starts: self.starts.clone(),
            budget: self.budget,
            alpha: self.alpha,
            reward_kind: self.reward_kind,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("scenario serializes")
    }
}

/// Wire form of a scenario. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub vertices: Vec<Vertex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_matrix: Option<Vec<Vec<f64>>>,
    pub starts: Vec<VertexId>,
    pub budget: f64,
    pub alpha: usize,
    #[serde(default)]
    pub reward_kind: RewardKind,
}

impl ScenarioDocument {
    pub fn parse(bytes: &[u8]) -> Result<Self, GraphError> {
        serde_json::from_slice(bytes).map_err(|e| GraphError::Parse(e.to_string()))
    }

    /// Builds the graph without checking the metric axioms.
    pub fn graph(&self) -> Result<MetricGraph, GraphError> {
        match &self.distance_matrix {
            Some(m) => MetricGraph::with_matrix(self.vertices.clone(), m),
            None => MetricGraph::euclidean(self.vertices.clone()),
        }
    }

    pub fn into_scenario(self) -> Result<Scenario, GraphError> {
        let graph = self.graph()?;
        Scenario::new(graph, self.starts, self.budget, self.alpha, self.reward_kind)
    }
}

/// Parses and fully validates a scenario document.
pub fn load_scenario(bytes: &[u8]) -> Result<Scenario, GraphError> {
    ScenarioDocument::parse(bytes)?.into_scenario()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    #[default]
    Grid,
    UniformRandom,
}

/// Importance map sampled at the vertex positions: a sum of isotropic
/// Gaussian bumps with random centres, widths and heights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportanceField {
    pub bumps: usize,
    /// Bump standard deviations are drawn from this range, as fractions of
    /// the shorter side of the area.
    #[serde(default = "default_sigma_range")]
    pub sigma_range: (f64, f64),
    /// Constant added to the normalized field before scaling, in [0, 1].
    /// Keeps low-importance regions worth visiting.
    #[serde(default = "default_baseline")]
    pub baseline: f64,
    /// Each vertex's value is multiplied by a factor drawn from `[1 - noise, 1 + noise]`.
    #[serde(default)]
    pub noise: f64,
}

fn default_baseline() -> f64 {
    0.2
}

fn default_sigma_range() -> (f64, f64) {
    (0.08, 0.2)
}

impl Default for ImportanceField {
    fn default() -> Self {
        Self {
            bumps: 3,
            sigma_range: default_sigma_range(),
            baseline: default_baseline(),
            noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenParams {
    pub n_vertices: usize,
    pub n_robots: usize,
    pub alpha: usize,
    pub budget: f64,
    #[serde(default)]
    pub layout: Layout,
    #[serde(default)]
    pub importance: ImportanceField,
    #[serde(default)]
    pub reward_kind: RewardKind,
    /// Side lengths of the rectangular area.
    #[serde(default = "default_area")]
    pub area: (f64, f64),
    /// Coverage rewards: a vertex also covers the cells of vertices within this distance.
    #[serde(default = "default_sensing_radius")]
    pub sensing_radius: f64,
    pub seed: u64,
}

fn default_area() -> (f64, f64) {
    (120.0, 80.0)
}

fn default_sensing_radius() -> f64 {
    12.0
}

impl GenParams {
    pub fn new(n_vertices: usize, n_robots: usize, alpha: usize, budget: f64, seed: u64) -> Self {
        Self {
            n_vertices,
            n_robots,
            alpha,
            budget,
            layout: Layout::Grid,
            importance: ImportanceField::default(),
            reward_kind: RewardKind::Modular,
            area: default_area(),
            sensing_radius: default_sensing_radius(),
            seed,
        }
    }
}

/// Deterministic scenario generator. Rewards are the importance field scaled
/// to integers in `[1, 100]`; starts are distinct whenever `N <= |V|`.
pub fn generate_scenario(params: &GenParams) -> Result<Scenario, GraphError> {
    let p = params;
    if p.n_vertices == 0 {
        return Err(GraphError::Generator("n_vertices must be at least 1".into()));
    }
    if p.n_robots == 0 {
        return Err(GraphError::NoRobots);
    }
    if p.alpha >= p.n_robots {
        return Err(GraphError::AlphaTooLarge {
            alpha: p.alpha,
            robots: p.n_robots,
        });
    }
    if !(p.budget.is_finite() && p.budget >= 0.0) {
        return Err(GraphError::BadBudget(p.budget));
    }
    let (w, h) = p.area;
    if !(w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0) {
        return Err(GraphError::Generator("area sides must be positive".into()));
    }
    let (s_lo, s_hi) = p.importance.sigma_range;
    if !(s_lo > 0.0 && s_hi >= s_lo && s_hi.is_finite()) {
        return Err(GraphError::Generator("sigma_range must satisfy 0 < lo <= hi".into()));
    }
    let (base, noise) = (p.importance.baseline, p.importance.noise);
    if !((0.0..=1.0).contains(&base) && (0.0..=1.0).contains(&noise)) {
        return Err(GraphError::Generator("baseline and noise must lie in [0, 1]".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let positions: Vec<(f64, f64)> = match p.layout {
        Layout::Grid => {
            let cols = ((p.n_vertices as f64 * w / h).sqrt().ceil() as usize).max(1);
            let rows = p.n_vertices.div_ceil(cols);
            (0..p.n_vertices)
                .map(|i| {
                    let (r, c) = (i / cols, i % cols);
                    ((c as f64 + 0.5) * w / cols as f64, (r as f64 + 0.5) * h / rows as f64)
                })
                .collect()
        }
        Layout::UniformRandom => (0..p.n_vertices)
            .map(|_| (rng.gen_range(0.0..w), rng.gen_range(0.0..h)))
            .collect(),
    };

    let short = w.min(h);
    let bumps: Vec<(f64, f64, f64, f64)> = (0..p.importance.bumps)
        .map(|_| {
            let cx = rng.gen_range(0.0..w);
            let cy = rng.gen_range(0.0..h);
            let sigma = short * if s_hi > s_lo { rng.gen_range(s_lo..s_hi) } else { s_lo };
            let height = rng.gen_range(0.5..1.0);
            (cx, cy, sigma, height)
        })
        .collect();
    let raw: Vec<f64> = positions
        .iter()
        .map(|&(x, y)| {
            bumps
                .iter()
                .map(|&(cx, cy, s, a)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp())
                .sum()
        })
        .collect();
    let raw: Vec<f64> = {
        let top = raw.iter().cloned().fold(0.0, f64::max);
        raw.iter()
            .map(|&r| {
                let scaled = if top > 0.0 { r / top } else { 0.0 };
                let factor = if noise > 0.0 {
                    rng.gen_range(1.0 - noise..=1.0 + noise)
                } else {
                    1.0
                };
                (base + scaled) * factor
            })
            .collect()
    };
    let peak = raw.iter().cloned().fold(0.0, f64::max);
    let rewards: Vec<f64> = raw
        .iter()
        .map(|&r| {
            if peak > 0.0 {
                (1.0 + 99.0 * r / peak).round()
            } else {
                1.0
            }
        })
        .collect();

    let vertices: Vec<Vertex> = positions
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| {
            let coverage = (p.reward_kind == RewardKind::Coverage).then(|| {
                positions
                    .iter()
                    .enumerate()
                    .filter(|&(j, &(xj, yj))| j == id || (x - xj).hypot(y - yj) <= p.sensing_radius)
                    .map(|(j, _)| (j as u64, rewards[j]))
                    .collect()
            });
            Vertex {
                id,
                x,
                y,
                reward: rewards[id],
                coverage,
            }
        })
        .collect();

    let starts = sample_starts(&mut rng, p.n_vertices, p.n_robots);
    let graph = MetricGraph::euclidean(vertices)?;
    Scenario::new(graph, starts, p.budget, p.alpha, p.reward_kind)
}

/// Uniform start vertices, distinct when there are enough vertices.
pub fn sample_starts<R: Rng>(rng: &mut R, n_vertices: usize, n_robots: usize) -> Vec<VertexId> {
    if n_robots <= n_vertices {
        index::sample(rng, n_vertices, n_robots).into_vec()
    } else {
        (0..n_robots).map(|_| rng.gen_range(0..n_vertices)).collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn vertex(id: usize, x: f64, y: f64, reward: f64) -> Vertex {
        Vertex {
            id,
            x,
            y,
            reward,
            coverage: None,
        }
    }

    /// v0=(0,0,0) v1=(1,0,5) v2=(2,0,3) v3=(0,2,4)
    pub(crate) fn four_vertex_graph() -> MetricGraph {
        MetricGraph::euclidean(vec![
            vertex(0, 0.0, 0.0, 0.0),
            vertex(1, 1.0, 0.0, 5.0),
            vertex(2, 2.0, 0.0, 3.0),
            vertex(3, 0.0, 2.0, 4.0),
        ])
        .unwrap()
    }

    #[test]
    fn positions_only_document_gets_euclidean_matrix() {
        let doc = r#"{
            "vertices": [
                {"id": 0, "x": 0, "y": 0, "reward": 0},
                {"id": 1, "x": 3, "y": 0, "reward": 1},
                {"id": 2, "x": 3, "y": 4, "reward": 2},
                {"id": 3, "x": 0, "y": 4, "reward": 3}
            ],
            "starts": [0, 1],
            "budget": 10,
            "alpha": 1,
            "reward_kind": "modular"
        }"#;
        let s = load_scenario(doc.as_bytes()).unwrap();
        assert_eq!(s.graph().dist(0, 2), 5.0);
        assert_eq!(s.graph().dist(1, 3), 5.0);
        assert_eq!(s.graph().dist(0, 1), 3.0);
        assert!(!s.graph().has_explicit_matrix());
    }

    #[test]
    fn alpha_equal_to_n_is_rejected() {
        let doc = r#"{"vertices":[{"id":0,"x":0,"y":0,"reward":1}],
            "starts":[0,0],"budget":1,"alpha":2,"reward_kind":"modular"}"#;
        let err = load_scenario(doc.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("alpha must be < N"), "{err}");
    }

    #[test]
    fn asymmetric_matrix_error_names_pair() {
        let doc = r#"{"vertices":[{"id":0,"x":0,"y":0,"reward":1},{"id":1,"x":1,"y":0,"reward":1}],
            "distance_matrix":[[0,1],[2,0]],
            "starts":[0],"budget":1,"alpha":0,"reward_kind":"modular"}"#;
        let err = load_scenario(doc.as_bytes()).unwrap_err();
        assert_eq!(err, GraphError::Asymmetric { i: 0, j: 1 });
        assert!(err.to_string().contains("(0,1)"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let doc = r#"{"vertices":[{"id":0,"x":0,"y":0,"reward":1}],
            "starts":[0],"budget":1,"alpha":0,"reward_kind":"modular","extra":1}"#;
        assert!(matches!(load_scenario(doc.as_bytes()), Err(GraphError::Parse(_))));
    }

    #[test]
    fn non_dense_ids_rejected() {
        let err = MetricGraph::euclidean(vec![vertex(0, 0.0, 0.0, 1.0), vertex(2, 1.0, 0.0, 1.0)]).unwrap_err();
        assert_eq!(err, GraphError::NonDenseId { index: 1, id: 2 });
    }

    #[test]
    fn negative_reward_rejected() {
        let err = MetricGraph::euclidean(vec![vertex(0, 0.0, 0.0, -1.0)]).unwrap_err();
        assert_eq!(err, GraphError::BadReward(0));
    }

    #[test]
    fn euclidean_graph_is_metric() {
        assert!(four_vertex_graph().verify_metric().is_clean());
    }

    #[test]
    fn triangle_violation_reported() {
        let vs = (0..3).map(|i| vertex(i, 0.0, 0.0, 0.0)).collect();
        let m = vec![vec![0.0, 1.0, 10.0], vec![1.0, 0.0, 1.0], vec![10.0, 1.0, 0.0]];
        let g = MetricGraph::with_matrix(vs, &m).unwrap();
        let report = g.verify_metric();
        assert!(report.triangle.contains(&(0, 1, 2)));
        assert!(report.diagonal.is_empty() && report.asymmetric.is_empty());
    }

    #[test]
    fn diagonal_violation_reported() {
        let vs = (0..2).map(|i| vertex(i, 0.0, 0.0, 0.0)).collect();
        let m = vec![vec![0.0, 1.0], vec![1.0, 0.5]];
        let report = MetricGraph::with_matrix(vs, &m).unwrap().verify_metric();
        assert_eq!(report.diagonal, vec![1]);
    }

    #[test]
    fn path_cost_examples() {
        let g = four_vertex_graph();
        assert_eq!(g.path_cost(&[0]).unwrap(), 0.0);
        assert_eq!(g.path_cost(&[0, 1, 2]).unwrap(), 2.0);
        assert_eq!(g.path_cost(&[0, 3]).unwrap(), 2.0);
        assert_eq!(g.path_cost(&[0, 9]), Err(GraphError::UnknownVertex(9)));
        assert_eq!(g.path_cost(&[0, 1, 0]), Err(GraphError::RepeatedVertex(0)));
    }

    #[test]
    fn full_scale_generation() {
        let s = generate_scenario(&GenParams::new(96, 10, 3, 60.0, 7)).unwrap();
        assert_eq!(s.graph().len(), 96);
        assert_eq!(s.n_robots(), 10);
        assert_eq!(s.alpha(), 3);
        assert_eq!(s.budget(), 60.0);
        assert!(s.graph().verify_metric().is_clean());
        for v in s.graph().vertices() {
            assert!((0.0..=100.0).contains(&v.reward) && v.reward.fract() == 0.0);
        }
        assert!(s.graph().vertices().iter().any(|v| v.reward == 100.0));
    }

    #[test]
    fn generation_is_deterministic() {
        let mut p = GenParams::new(40, 5, 2, 30.0, 11);
        p.layout = Layout::UniformRandom;
        p.reward_kind = RewardKind::Coverage;
        let a = generate_scenario(&p).unwrap().to_json();
        let b = generate_scenario(&p).unwrap().to_json();
        assert_eq!(a, b);
        p.seed = 12;
        assert_ne!(a, generate_scenario(&p).unwrap().to_json());
    }

    #[test]
    fn single_vertex_generation() {
        let s = generate_scenario(&GenParams::new(1, 1, 0, 1.0, 3)).unwrap();
        assert_eq!(s.starts(), &[0]);
        assert_eq!(s.graph().len(), 1);
    }

    #[test]
    fn generator_rejects_bad_alpha() {
        let err = generate_scenario(&GenParams::new(10, 3, 3, 1.0, 0)).unwrap_err();
        assert!(matches!(err, GraphError::AlphaTooLarge { .. }));
    }

    #[test]
    fn document_round_trip() {
        let mut p = GenParams::new(12, 3, 1, 20.0, 5);
        p.reward_kind = RewardKind::Coverage;
        let s = generate_scenario(&p).unwrap();
        let back = load_scenario(s.to_json().as_bytes()).unwrap();
        assert_eq!(s, back);
    }
}
