//! Ising instances, MaxCut graphs, energies, and instance generation.
//!
//! Spins live in {-1, +1} and couple through a symmetric zero-diagonal
//! matrix. The objective the oscillator network minimizes is
//! `machine_energy = -sum_{i,j} J[i][j] s_i s_j`, with every unordered
//! pair counted twice by the double sum. MaxCut instances map onto
//! couplings as `J = -A` for adjacency matrix `A`, so maximizing the cut
//! and minimizing the machine energy coincide.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric coupling matrix with zero diagonal over `n` spins.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingProblem {
    n: usize,
    couplings: Array2<f64>,
}

impl IsingProblem {
    /// Builds a problem from a full coupling matrix, validating symmetry,
    /// zero diagonal, and finiteness.
    pub fn from_couplings(couplings: Array2<f64>) -> Result<Self> {
        let (rows, cols) = couplings.dim();
        if rows != cols {
            return Err(Error::InvalidParam(format!(
                "coupling matrix must be square, got {rows}x{cols}"
            )));
        }
        if rows == 0 {
            return Err(Error::InvalidParam("need at least one spin".into()));
        }
        for i in 0..rows {
            if couplings[[i, i]] != 0.0 {
                return Err(Error::InvalidParam(format!(
                    "diagonal term at ({i}, {i}) must be zero, got {}",
                    couplings[[i, i]]
                )));
            }
            for j in 0..cols {
                let w = couplings[[i, j]];
                if !w.is_finite() {
                    return Err(Error::InvalidParam(format!(
                        "coupling ({i}, {j}) is not finite"
                    )));
                }
                if couplings[[i, j]] != couplings[[j, i]] {
                    return Err(Error::InvalidParam(format!(
                        "coupling matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n: rows, couplings })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[[i, j]]
    }

    pub fn couplings(&self) -> &Array2<f64> {
        &self.couplings
    }
}

/// A spin configuration; every entry is exactly -1 or +1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.is_empty() {
            return Err(Error::InvalidParam("spin vector is empty".into()));
        }
        for (i, &s) in spins.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(Error::InvalidParam(format!(
                    "spin {i} is {s}, must be -1 or +1"
                )));
            }
        }
        Ok(Self(spins))
    }

    /// All spins up.
    pub fn all_up(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    /// The globally flipped configuration.
    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    pub(crate) fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }
}

/// Undirected weighted graph; edges are stored as `(i, j, w)` with `i < j`,
/// sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParam("graph needs at least one node".into()));
        }
        for (pos, &(i, j, w)) in edges.iter().enumerate() {
            if i == j {
                return Err(Error::InvalidEdge {
                    position: pos,
                    i,
                    j,
                    message: "self-loop; endpoints must satisfy i < j".into(),
                });
            }
            if i > j {
                return Err(Error::InvalidEdge {
                    position: pos,
                    i,
                    j,
                    message: "endpoints out of order; must satisfy i < j".into(),
                });
            }
            if j >= n {
                return Err(Error::InvalidEdge {
                    position: pos,
                    i,
                    j,
                    message: format!("node index out of range for n = {n}"),
                });
            }
            if !w.is_finite() {
                return Err(Error::InvalidEdge {
                    position: pos,
                    i,
                    j,
                    message: "weight is not finite".into(),
                });
            }
        }
        let mut edges = edges;
        edges.sort_by_key(|&(i, j, _)| (i, j));
        for (pos, pair) in edges.windows(2).enumerate() {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::InvalidEdge {
                    position: pos + 1,
                    i: pair[1].0,
                    j: pair[1].1,
                    message: "duplicate edge".into(),
                });
            }
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Total edge weight, `sum_{i<j} w_ij`.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }
}

/// `H = s^T J s`, the quadratic Ising objective with each pair counted twice.
pub fn hamiltonian(p: &IsingProblem, s: &SpinConfig) -> Result<f64> {
    if s.len() != p.n {
        return Err(Error::DimensionMismatch {
            expected: p.n,
            got: s.len(),
        });
    }
    let mut acc = 0.0;
    for i in 0..p.n {
        for j in 0..p.n {
            acc += p.couplings[[i, j]] * f64::from(s.get(i)) * f64::from(s.get(j));
        }
    }
    Ok(acc)
}

/// The quantity the oscillator dynamics minimize: `-hamiltonian`.
pub fn machine_energy(p: &IsingProblem, s: &SpinConfig) -> Result<f64> {
    Ok(-hamiltonian(p, s)?)
}

/// Encodes a MaxCut instance as couplings `J = -A`.
pub fn maxcut_to_ising(g: &WeightedGraph) -> IsingProblem {
    let mut couplings = Array2::zeros((g.n, g.n));
    for &(i, j, w) in &g.edges {
        couplings[[i, j]] = -w;
        couplings[[j, i]] = -w;
    }
    IsingProblem { n: g.n, couplings }
}

/// Inverse of [`maxcut_to_ising`]: recovers the graph with `w = -J` on
/// every nonzero coupling. Round-trips exactly.
pub fn ising_to_maxcut(p: &IsingProblem) -> WeightedGraph {
    let mut edges = Vec::new();
    for i in 0..p.n {
        for j in (i + 1)..p.n {
            let w = -p.couplings[[i, j]];
            if w != 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    WeightedGraph { n: p.n, edges }
}

/// Total weight of edges crossing the partition induced by `s`.
pub fn cut_value(g: &WeightedGraph, s: &SpinConfig) -> Result<f64> {
    if s.len() != g.n {
        return Err(Error::DimensionMismatch {
            expected: g.n,
            got: s.len(),
        });
    }
    let mut acc = 0.0;
    for &(i, j, w) in &g.edges {
        acc += w * (1.0 - f64::from(s.get(i)) * f64::from(s.get(j))) / 2.0;
    }
    Ok(acc)
}

/// Weighted graph Laplacian `L = D - J` with `D[i][i] = sum_j J[i][j]`.
pub fn laplacian(p: &IsingProblem) -> Array2<f64> {
    let n = p.n;
    let mut lap = Array2::zeros((n, n));
    for i in 0..n {
        let degree: f64 = (0..n).map(|j| p.couplings[[i, j]]).sum();
        for j in 0..n {
            lap[[i, j]] = -p.couplings[[i, j]];
        }
        lap[[i, i]] += degree;
    }
    lap
}

/// Families of benchmark instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstanceKind {
    /// Erdos-Renyi G(n, p) with unit edge weights.
    Gnp { edge_prob: f64 },
    /// Complete graph with standard normal weights.
    CompleteGaussian,
    /// Star of unit edges; for n = 4 this is the breadboard demo graph
    /// with the hub at node 2.
    Star,
}

/// Generates a benchmark instance; bit-reproducible for a fixed seed.
pub fn generate_instance(kind: InstanceKind, n: usize, seed: u64) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(Error::InvalidParam("need at least one node".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = match kind {
        InstanceKind::Gnp { edge_prob } => {
            if !(0.0..=1.0).contains(&edge_prob) {
                return Err(Error::InvalidParam(format!(
                    "edge probability {edge_prob} outside [0, 1]"
                )));
            }
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random::<f64>() < edge_prob {
                        edges.push((i, j, 1.0));
                    }
                }
            }
            edges
        }
        InstanceKind::CompleteGaussian => {
            let mut edges = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in (i + 1)..n {
                    let w: f64 = rng.sample(StandardNormal);
                    edges.push((i, j, w));
                }
            }
            edges
        }
        InstanceKind::Star => {
            let hub = 2.min(n - 1);
            (0..n)
                .filter(|&v| v != hub)
                .map(|v| (v.min(hub), v.max(hub), 1.0))
                .collect()
        }
    };
    WeightedGraph::new(n, edges)
}

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

/// Parses the JSON problem format `{"n": ..., "edges": [[i, j, w], ...]}`.
pub fn parse_problem(text: &str) -> Result<WeightedGraph> {
    let raw: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    WeightedGraph::new(raw.n, raw.edges)
}

/// Serializes a graph to the JSON problem format, edges sorted by `(i, j)`.
pub fn serialize_problem(g: &WeightedGraph) -> String {
    let file = ProblemFile {
        n: g.n,
        edges: g.edges.clone(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("graph serialization cannot fail");
    out.push('\n');
    out
}
