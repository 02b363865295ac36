//! Weighted graphs on vertex pairs, cuts, and cut sparsity.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::pairs::{pair_count, pair_index, pair_index_unchecked, pairs};
use crate::points::check_permutation;

/// Non-negative weights on the unordered pairs of `n` vertices. Used for
/// both the cost graph and the demand graph of a Sparsest Cut instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct WeightedGraph {
    n: usize,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    i: usize,
    j: usize,
    w: f64,
}

impl TryFrom<GraphJson> for WeightedGraph {
    type Error = Error;

    fn try_from(raw: GraphJson) -> Result<Self> {
        let edges: Vec<_> = raw.edges.iter().map(|e| (e.i, e.j, e.w)).collect();
        WeightedGraph::from_edges(raw.n, &edges)
    }
}

impl From<WeightedGraph> for GraphJson {
    fn from(g: WeightedGraph) -> Self {
        let edges = g
            .edges()
            .map(|(i, j, w)| EdgeJson { i, j, w })
            .collect();
        GraphJson { n: g.n, edges }
    }
}

impl WeightedGraph {
    /// Builds a graph from `(i, j, w)` triples with `i < j`. Duplicate pairs
    /// are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("field `n` must be at least 2, got {n}")));
        }
        let mut weights = vec![0.0; pair_count(n)];
        let mut seen = vec![false; pair_count(n)];
        for (e, &(i, j, w)) in edges.iter().enumerate() {
            let k = pair_index(i, j, n).map_err(|err| invalid(format!("field `edges[{e}]`: {err}")))?;
            if seen[k] {
                return Err(invalid(format!("field `edges[{e}]`: duplicate pair ({i}, {j})")));
            }
            seen[k] = true;
            weights[k] = w;
        }
        Self::from_pair_weights(n, weights)
    }

    /// Builds a graph from weights listed in canonical pair order.
    pub fn from_pair_weights(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("field `n` must be at least 2, got {n}")));
        }
        if weights.len() != pair_count(n) {
            return Err(invalid(format!(
                "expected {} pair weights, got {}",
                pair_count(n),
                weights.len()
            )));
        }
        for (k, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                let (i, j) = crate::pairs::pair_from_index(k, n)?;
                return Err(invalid(format!(
                    "weight on pair ({i}, {j}) must be finite and non-negative, got {w}"
                )));
            }
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(invalid("graph has zero total weight"));
        }
        Ok(Self { n, weights })
    }

    /// Complete graph with every pair weighted `w`.
    pub fn complete(n: usize, w: f64) -> Result<Self> {
        Self::from_pair_weights(n, vec![w; pair_count(n)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.weights[pair_index_unchecked(i, j, self.n)],
            std::cmp::Ordering::Greater => self.weights[pair_index_unchecked(j, i, self.n)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Weight of the pair at canonical index `k`.
    pub fn weight_at(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn pair_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Pairs with non-zero weight, in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        pairs(self.n)
            .zip(self.weights.iter())
            .filter(|(_, w)| **w != 0.0)
            .map(|((i, j), w)| (i, j, *w))
    }

    /// Symmetric weight matrix with zero diagonal.
    pub fn adjacency(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.weight(i, j))
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_pair_weights(self.n, self.weights.iter().map(|w| w * factor).collect())
    }

    /// Relabels vertices so that new vertex `k` is old vertex `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let weights = pairs(self.n).map(|(i, j)| self.weight(perm[i], perm[j])).collect();
        Self::from_pair_weights(self.n, weights)
    }
}

/// A vertex subset `S` with `{} != S != V`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cut {
    n: usize,
    members: Vec<usize>,
}

impl Cut {
    pub fn new(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&v) = members.iter().find(|&&v| v >= n) {
            return Err(invalid(format!("cut member {v} out of range for n = {n}")));
        }
        if members.is_empty() || members.len() == n {
            return Err(invalid("cut must be a nonempty proper subset"));
        }
        Ok(Self { n, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted members of `S`.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn indicator(&self) -> Vec<bool> {
        let mut out = vec![false; self.n];
        for &v in &self.members {
            out[v] = true;
        }
        out
    }

    pub fn complement(&self) -> Self {
        let inside = self.indicator();
        Self {
            n: self.n,
            members: (0..self.n).filter(|&v| !inside[v]).collect(),
        }
    }
}

/// A cut together with its cost, demand and sparsity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    pub cut: Cut,
    pub cut_cost: f64,
    pub cut_demand: f64,
    /// `cut_cost / cut_demand`, or `+inf` when no demand is separated.
    #[serde(with = "crate::io::extended_f64")]
    pub sparsity: f64,
}

impl CutResult {
    pub fn is_feasible(&self) -> bool {
        self.cut_demand > 0.0
    }
}

/// Evaluates the sparsity of `cut`. Sums run over pairs in canonical order.
pub fn cut_sparsity(cut: &Cut, cost: &WeightedGraph, demand: &WeightedGraph) -> Result<CutResult> {
    let n = cut.n();
    if cost.n() != n || demand.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "cut on {n} vertices, cost graph on {}, demand graph on {}",
            cost.n(),
            demand.n()
        )));
    }
    let inside = cut.indicator();
    let mut cut_cost = 0.0;
    let mut cut_demand = 0.0;
    for (k, (i, j)) in pairs(n).enumerate() {
        if inside[i] != inside[j] {
            cut_cost += cost.weight_at(k);
            cut_demand += demand.weight_at(k);
        }
    }
    let sparsity = if cut_demand > 0.0 {
        cut_cost / cut_demand
    } else {
        f64::INFINITY
    };
    Ok(CutResult {
        cut: cut.clone(),
        cut_cost,
        cut_demand,
        sparsity,
    })
}
