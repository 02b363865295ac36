//! Seeded generators of l2-squared point sets and Sparsest Cut instances.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, whose output
//! stream is fixed by the ChaCha specification and does not depend on the
//! platform. The same spec therefore yields the same bits everywhere.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::{sym_eigen, RANK_CUTOFF};
use crate::pairs::{pair_count, pairs};
use crate::points::{check_l22, PointSet};
use crate::sdp::{solve_sdp, SdpInstance, SolverOptions};

/// Tolerance of the validity gate every generated point set must pass.
pub const GEN_L22_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    HypercubeSubset,
    Simplex,
    LineSqrt,
    L1Embeddable,
    SdpDerived,
    Cycle,
    Complete,
    Dumbbell,
    BlockModel,
}

impl GeneratorKind {
    pub const POINT_SETS: [GeneratorKind; 5] = [
        GeneratorKind::HypercubeSubset,
        GeneratorKind::Simplex,
        GeneratorKind::LineSqrt,
        GeneratorKind::L1Embeddable,
        GeneratorKind::SdpDerived,
    ];
    pub const INSTANCES: [GeneratorKind; 4] = [
        GeneratorKind::Cycle,
        GeneratorKind::Complete,
        GeneratorKind::Dumbbell,
        GeneratorKind::BlockModel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::HypercubeSubset => "hypercube_subset",
            GeneratorKind::Simplex => "simplex",
            GeneratorKind::LineSqrt => "line_sqrt",
            GeneratorKind::L1Embeddable => "l1_embeddable",
            GeneratorKind::SdpDerived => "sdp_derived",
            GeneratorKind::Cycle => "cycle",
            GeneratorKind::Complete => "complete",
            GeneratorKind::Dumbbell => "dumbbell",
            GeneratorKind::BlockModel => "block_model",
        }
    }

    pub fn is_point_set(self) -> bool {
        Self::POINT_SETS.contains(&self)
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::POINT_SETS
            .iter()
            .chain(Self::INSTANCES.iter())
            .copied()
            .find(|k| k.name() == name)
    }
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    #[default]
    Uniform,
    /// Independent weights drawn uniformly from `[0.1, 1)`.
    Random,
}

/// Kind-specific parameters. Fields a kind does not use are ignored.
///
/// | kind | parameters (defaults) |
/// |---|---|
/// | `hypercube_subset` | `d` (3), `n` (all `2^d` vertices) |
/// | `simplex` | `n` (required), `side` (1) |
/// | `line_sqrt` | `s`, or `n` random values in `[0, 10)` |
/// | `l1_embeddable` | `n` (required), `d` cuts (`n`) |
/// | `sdp_derived` | `n` (required, at most 12) |
/// | `cycle`, `complete` | `n` (required), `weights` |
/// | `dumbbell` | `n` vertices per clique (required), `bridge` (1), `weights` |
/// | `block_model` | `n` (required), `r` blocks (2), `intra` (1), `inter` (0.05), `p_in` (1) |
///
/// Every instance kind also takes `demand` (`uniform`).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intra: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<WeightKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    #[serde(default)]
    pub params: GenParams,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        Self {
            kind,
            params: GenParams::default(),
            seed,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.params.n = Some(n);
        self
    }

    pub fn with_d(mut self, d: usize) -> Self {
        self.params.d = Some(d);
        self
    }

    fn require_n(&self, min: usize) -> Result<usize> {
        let n = self
            .params
            .n
            .ok_or_else(|| invalid(format!("{} needs parameter n", self.kind)))?;
        if n < min {
            return Err(invalid(format!("{} needs n >= {min}, got {n}", self.kind)));
        }
        Ok(n)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Generates a point set and gates it through the l2-squared check at
/// [`GEN_L22_TOL`]. The returned set is flagged as validated.
pub fn gen_pointset(spec: &GeneratorSpec) -> Result<PointSet> {
    let mut rng = rng(spec.seed);
    let ps = match spec.kind {
        GeneratorKind::HypercubeSubset => hypercube_subset(spec, &mut rng)?,
        GeneratorKind::Simplex => {
            let n = spec.require_n(2)?;
            simplex(n, positive("side", spec.params.side.unwrap_or(1.0))?)?
        }
        GeneratorKind::LineSqrt => line_sqrt(spec, &mut rng)?,
        GeneratorKind::L1Embeddable => l1_embeddable(spec, &mut rng)?,
        GeneratorKind::SdpDerived => sdp_derived(spec, &mut rng)?,
        other => return Err(invalid(format!("{other} generates instances, not point sets"))),
    };
    let report = check_l22(&ps, GEN_L22_TOL);
    if !report.ok {
        return Err(Error::ConstraintViolated(format!(
            "generated {} set fails the l2-squared gate by {:e}",
            spec.kind, report.worst_violation
        )));
    }
    Ok(ps.assume_l22())
}

fn hypercube_subset(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<PointSet> {
    let d = spec.params.d.unwrap_or(3);
    if !(1..=20).contains(&d) {
        return Err(invalid(format!("hypercube dimension must lie in 1..=20, got {d}")));
    }
    let total = 1usize << d;
    let n = spec.params.n.unwrap_or(total);
    if n < 2 || n > total {
        return Err(invalid(format!("hypercube subset size must lie in 2..={total}, got {n}")));
    }
    let mut vertices: Vec<usize> = (0..total).collect();
    if n < total {
        vertices.shuffle(rng);
        vertices.truncate(n);
        vertices.sort_unstable();
    }
    // Vertex v has coordinate k equal to bit d-1-k, so the order is lexicographic.
    PointSet::new(DMatrix::from_fn(n, d, |i, k| ((vertices[i] >> (d - 1 - k)) & 1) as f64))
}

/// Regular simplex with edge length `side`, expressed in the orthonormal
/// Helmert basis of the hyperplane orthogonal to the all-ones vector.
pub fn simplex(n: usize, side: f64) -> Result<PointSet> {
    if n < 2 {
        return Err(invalid(format!("simplex needs n >= 2, got {n}")));
    }
    let scale = side / std::f64::consts::SQRT_2;
    PointSet::new(DMatrix::from_fn(n, n - 1, |i, k| {
        let k1 = (k + 1) as f64;
        let norm = (k1 * (k1 + 1.0)).sqrt();
        let h = if i <= k {
            1.0
        } else if i == k + 1 {
            -k1
        } else {
            0.0
        };
        scale * h / norm
    }))
}

/// Points whose squared distances are `|s_i - s_j|`: after sorting, point
/// `p` has coordinate `sqrt(s_(k+1) - s_(k))` on every axis `k < p`.
fn line_sqrt(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<PointSet> {
    let s = match &spec.params.s {
        Some(s) => s.clone(),
        None => {
            let n = spec.require_n(2)?;
            (0..n).map(|_| rng.gen_range(0.0..10.0)).collect()
        }
    };
    line_metric_points(&s)
}

pub fn line_metric_points(s: &[f64]) -> Result<PointSet> {
    let n = s.len();
    if n < 2 {
        return Err(invalid(format!("line_sqrt needs at least 2 values, got {n}")));
    }
    if let Some(k) = s.iter().position(|v| !v.is_finite()) {
        return Err(invalid(format!("s[{k}] is not finite")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b)));
    let mut rank = vec![0; n];
    for (p, &i) in order.iter().enumerate() {
        rank[i] = p;
    }
    let steps: Vec<f64> = order.windows(2).map(|w| (s[w[1]] - s[w[0]]).sqrt()).collect();
    PointSet::new(DMatrix::from_fn(n, n - 1, |i, k| if k < rank[i] { steps[k] } else { 0.0 }))
}

/// Non-negative combination of random cut semimetrics: coordinate `t` of
/// point `i` is `sqrt(w_t)` when `i` lies in cut `S_t` and 0 otherwise.
fn l1_embeddable(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<PointSet> {
    let n = spec.require_n(2)?;
    let m = spec.params.d.unwrap_or(n);
    if m == 0 {
        return Err(invalid("l1_embeddable needs at least one cut"));
    }
    let mut coords = DMatrix::zeros(n, m);
    for t in 0..m {
        let w: f64 = rng.gen_range(0.1..1.0);
        // Resample until the cut is proper.
        let members = loop {
            let m: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            if m.iter().any(|&b| b) && !m.iter().all(|&b| b) {
                break m;
            }
        };
        for (i, &inside) in members.iter().enumerate() {
            if inside {
                coords[(i, t)] = w.sqrt();
            }
        }
    }
    PointSet::new(coords)
}

const SDP_DERIVED_MAX_N: usize = 12;
const SDP_DERIVED_MIN_MIX: f64 = 1e-3;

/// Points from an SDP solution on a random instance. Solver residue is
/// removed by mixing the squared distances with a small multiple of the
/// regular simplex metric, then the set is re-expressed in its affine hull.
fn sdp_derived(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<PointSet> {
    let n = spec.require_n(3)?;
    if n > SDP_DERIVED_MAX_N {
        return Err(invalid(format!("sdp_derived is limited to n <= {SDP_DERIVED_MAX_N}, got {n}")));
    }
    let cost = random_connected_graph(n, rng)?;
    let demand = WeightedGraph::complete(n, 1.0)?;
    let opts = SolverOptions {
        tol: 1e-5,
        max_iter: 50_000,
        log_every: 0,
    };
    let sol = solve_sdp(&SdpInstance::new(cost, demand)?, &opts)?;
    repair_to_l22(&sol.points)
}

fn random_connected_graph(n: usize, rng: &mut ChaCha8Rng) -> Result<WeightedGraph> {
    let mut w = vec![0.0; pair_count(n)];
    for (k, (i, j)) in pairs(n).enumerate() {
        if j == i + 1 || rng.gen_bool(0.4) {
            w[k] = rng.gen_range(0.1..1.0);
        }
    }
    WeightedGraph::from_pair_weights(n, w)
}

fn repair_to_l22(ps: &PointSet) -> Result<PointSet> {
    let n = ps.len();
    let dist = ps.sq_dist_matrix();
    let scale = dist.iter().fold(0.0f64, |m, x| m.max(*x));
    if scale <= 0.0 {
        return Err(Error::Degenerate("SDP solution collapsed to a point".into()));
    }
    let worst = check_l22(ps, 0.0).worst_violation.max(0.0);
    // Mixing distances as (1 - t) D + t * scale * (1 - delta_ij) lowers every
    // triangle excess by t * (worst + scale). SDP optima are often integral
    // cuts whose points coincide in clusters; the floor on t keeps those
    // points apart by far more than rounding noise.
    let mut theta = ((worst + 1e-10 * scale) / (worst + scale)).max(SDP_DERIVED_MIN_MIX).min(1.0);
    loop {
        let mixed = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                (1.0 - theta) * dist[(i, j)] + theta * scale
            }
        });
        let candidate = points_from_sq_dists(&mixed)?;
        if check_l22(&candidate, GEN_L22_TOL).ok {
            return Ok(candidate);
        }
        if theta >= 1.0 {
            return Err(Error::Degenerate("could not repair SDP points".into()));
        }
        theta = (theta * 2.0).min(1.0);
    }
}

/// Classical multidimensional scaling: points whose squared distances are
/// `dist`, in as many coordinates as the centered Gram matrix has rank.
fn points_from_sq_dists(dist: &DMatrix<f64>) -> Result<PointSet> {
    let n = dist.nrows();
    let row_mean: Vec<f64> = (0..n).map(|i| dist.row(i).sum() / n as f64).collect();
    let mean = row_mean.iter().sum::<f64>() / n as f64;
    let gram = DMatrix::from_fn(n, n, |i, j| -0.5 * (dist[(i, j)] - row_mean[i] - row_mean[j] + mean));
    let (vals, vecs) = sym_eigen(&gram);
    let top = vals.iter().fold(0.0f64, |m, v| m.max(*v));
    let keep: Vec<usize> = (0..n).rev().filter(|&k| vals[k] > RANK_CUTOFF * top).collect();
    if keep.is_empty() {
        return Err(Error::Degenerate("distance matrix has no spread".into()));
    }
    PointSet::new(DMatrix::from_fn(n, keep.len(), |i, c| {
        vecs[(i, keep[c])] * vals[keep[c]].sqrt()
    }))
}

fn draw_weight(kind: WeightKind, base: f64, rng: &mut ChaCha8Rng) -> f64 {
    match kind {
        WeightKind::Uniform => base,
        WeightKind::Random => base * rng.gen_range(0.1..1.0),
    }
}

/// Generates a Sparsest Cut instance.
pub fn gen_instance(spec: &GeneratorSpec) -> Result<SdpInstance> {
    let mut rng = rng(spec.seed);
    let p = &spec.params;
    let weights = p.weights.unwrap_or_default();
    let (n, cost) = match spec.kind {
        GeneratorKind::Cycle => {
            let n = spec.require_n(3)?;
            let edges: Vec<_> = (0..n)
                .map(|i| {
                    let j = (i + 1) % n;
                    (i.min(j), i.max(j), draw_weight(weights, 1.0, &mut rng))
                })
                .collect();
            (n, WeightedGraph::from_edges(n, &edges)?)
        }
        GeneratorKind::Complete => {
            let n = spec.require_n(2)?;
            let w = (0..pair_count(n)).map(|_| draw_weight(weights, 1.0, &mut rng)).collect();
            (n, WeightedGraph::from_pair_weights(n, w)?)
        }
        GeneratorKind::Dumbbell => {
            let k = spec.require_n(2)?;
            let bridge = positive("bridge", p.bridge.unwrap_or(1.0))?;
            let n = 2 * k;
            let mut edges = Vec::new();
            for side in 0..2 {
                for i in 0..k {
                    for j in i + 1..k {
                        edges.push((side * k + i, side * k + j, draw_weight(weights, 1.0, &mut rng)));
                    }
                }
            }
            edges.push((k - 1, k, bridge));
            (n, WeightedGraph::from_edges(n, &edges)?)
        }
        GeneratorKind::BlockModel => {
            let n = spec.require_n(2)?;
            let r = p.r.unwrap_or(2);
            if r < 1 || r > n {
                return Err(invalid(format!("block_model needs 1 <= r <= n, got r = {r}, n = {n}")));
            }
            let intra = positive("intra", p.intra.unwrap_or(1.0))?;
            let inter = p.inter.unwrap_or(0.05);
            if !(inter.is_finite() && inter >= 0.0) {
                return Err(invalid(format!("inter must be non-negative, got {inter}")));
            }
            let p_in = p.p_in.unwrap_or(1.0);
            if !(p_in > 0.0 && p_in <= 1.0) {
                return Err(invalid(format!("p_in must lie in (0, 1], got {p_in}")));
            }
            // Vertex i belongs to block i * r / n, so blocks are contiguous and balanced.
            let block = |i: usize| i * r / n;
            let w = pairs(n)
                .map(|(i, j)| {
                    if block(i) == block(j) {
                        if rng.gen_bool(p_in) {
                            draw_weight(weights, intra, &mut rng)
                        } else {
                            0.0
                        }
                    } else {
                        draw_weight(weights, inter, &mut rng)
                    }
                })
                .collect();
            (n, WeightedGraph::from_pair_weights(n, w)?)
        }
        other => return Err(invalid(format!("{other} generates point sets, not instances"))),
    };
    let demand_kind = p.demand.unwrap_or_default();
    let demand = (0..pair_count(n)).map(|_| draw_weight(demand_kind, 1.0, &mut rng)).collect();
    SdpInstance::new(cost, WeightedGraph::from_pair_weights(n, demand)?)
}
