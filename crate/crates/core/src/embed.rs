//! Linear embeddings of l2-squared point sets into l2.
//!
//! Every map here is `x -> A x`. The psd-rooted maps use `A = P^{1/2}` with
//! `P = sum_kl p_kl (x_k - x_l)(x_k - x_l)^T` for a distribution `p` over
//! pairs; on an l2-squared input any such map is a contraction from squared
//! distances to distances. The one-dimensional maps project onto the top
//! left singular vector of a (demand-weighted) difference matrix.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::psd_sqrt;
use crate::pairs::{pair_count, pairs};
use crate::points::{difference_matrix, weighted_difference_matrix, PointSet};
use crate::spectral::svd_spectrum;

/// Relative slack allowed when testing the contraction property.
pub const CONTRACTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GoemansMvee,
    SquaredLength,
    StableRankPsd,
    #[serde(rename = "spectral_1d")]
    Spectral1d,
    #[serde(rename = "demand_spectral_1d")]
    DemandSpectral1d,
    DemandSquaredLength,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::GoemansMvee,
        Method::SquaredLength,
        Method::StableRankPsd,
        Method::Spectral1d,
        Method::DemandSpectral1d,
        Method::DemandSquaredLength,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::GoemansMvee => "goemans_mvee",
            Method::SquaredLength => "squared_length",
            Method::StableRankPsd => "stable_rank_psd",
            Method::Spectral1d => "spectral_1d",
            Method::DemandSpectral1d => "demand_spectral_1d",
            Method::DemandSquaredLength => "demand_squared_length",
        }
    }

    pub fn is_functional(self) -> bool {
        matches!(self, Method::Spectral1d | Method::DemandSpectral1d)
    }

    pub fn uses_demand(self) -> bool {
        matches!(self, Method::DemandSpectral1d | Method::DemandSquaredLength)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A linear map `f(x) = A x` with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EmbeddingJson", into = "EmbeddingJson")]
pub struct EmbeddingOperator {
    pub method: Method,
    /// `d' x d`; `d' = 1` for functional embeddings.
    pub matrix: DMatrix<f64>,
    /// Distribution over pairs in canonical order, for psd-rooted maps.
    pub p: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    method: Method,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<Vec<f64>>,
}

impl TryFrom<EmbeddingJson> for EmbeddingOperator {
    type Error = Error;

    fn try_from(raw: EmbeddingJson) -> Result<Self> {
        let rows = raw.a.len();
        let cols = raw.a.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || raw.a.iter().any(|r| r.len() != cols) {
            return Err(invalid("field `A` must be a non-empty rectangular matrix"));
        }
        if let Some(p) = &raw.p {
            check_distribution(p)?;
        }
        Ok(Self {
            method: raw.method,
            matrix: DMatrix::from_fn(rows, cols, |i, k| raw.a[i][k]),
            p: raw.p,
        })
    }
}

impl From<EmbeddingOperator> for EmbeddingJson {
    fn from(e: EmbeddingOperator) -> Self {
        EmbeddingJson {
            method: e.method,
            a: e.matrix.row_iter().map(|r| r.iter().copied().collect()).collect(),
            p: e.p,
        }
    }
}

impl EmbeddingOperator {
    pub fn is_functional(&self) -> bool {
        self.matrix.nrows() == 1
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    /// Images of all points, one row per point.
    pub fn embed_points(&self, ps: &PointSet) -> DMatrix<f64> {
        ps.coords() * self.matrix.transpose()
    }

    /// Coordinates of a one-dimensional embedding.
    pub fn line_values(&self, ps: &PointSet) -> Result<Vec<f64>> {
        if !self.is_functional() {
            return Err(invalid(format!("{} is not one-dimensional", self.method)));
        }
        Ok(self.embed_points(ps).column(0).iter().copied().collect())
    }
}

fn ensure_validated(ps: &PointSet) -> Result<()> {
    if ps.is_validated() {
        Ok(())
    } else {
        Err(Error::NotValidated)
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some(k) = p.iter().position(|x| !x.is_finite() || *x < 0.0) {
        return Err(invalid(format!("pair probability p[{k}] = {} is negative or not finite", p[k])));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("pair probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// `P = sum_kl p_kl (x_k - x_l)(x_k - x_l)^T`.
pub fn pair_second_moment(ps: &PointSet, p: &[f64]) -> DMatrix<f64> {
    let d = ps.dim();
    let mut out = DMatrix::zeros(d, d);
    for ((i, j), &w) in pairs(ps.len()).zip(p) {
        if w != 0.0 {
            let m = ps.diff(i, j);
            out.ger(w, &m, &m, 1.0);
        }
    }
    (&out + out.transpose()) * 0.5
}

fn psd_embedding(ps: &PointSet, p: Vec<f64>, method: Method) -> Result<EmbeddingOperator> {
    ensure_validated(ps)?;
    if p.len() != pair_count(ps.len()) {
        return Err(Error::DimensionMismatch(format!(
            "distribution has {} entries, expected {}",
            p.len(),
            pair_count(ps.len())
        )));
    }
    check_distribution(&p)?;
    let matrix = psd_sqrt(&pair_second_moment(ps, &p));
    Ok(EmbeddingOperator {
        method,
        matrix,
        p: Some(p),
    })
}

/// `x -> P^{1/2} x` for the given distribution over pairs, tagged with
/// `method`.
pub fn psd_embedding_from_distribution(ps: &PointSet, p: &[f64], method: Method) -> Result<EmbeddingOperator> {
    psd_embedding(ps, p.to_vec(), method)
}

fn normalized(weights: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate(format!("{what} has zero total mass")));
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Psd-rooted map with `p_kl` proportional to `|x_k - x_l|^2`.
pub fn squared_length_embedding(ps: &PointSet) -> Result<EmbeddingOperator> {
    ensure_validated(ps)?;
    let n = ps.len();
    let p = normalized(pairs(n).map(|(i, j)| ps.sq_dist(i, j)).collect(), "squared-length distribution")
        .map_err(|_| Error::Degenerate("all points coincide".into()))?;
    psd_embedding(ps, p, Method::SquaredLength)
}

/// Psd-rooted map with `p_kl` proportional to `d_kl |x_k - x_l|^2`.
pub fn demand_squared_length_embedding(ps: &PointSet, demand: &WeightedGraph) -> Result<EmbeddingOperator> {
    ensure_validated(ps)?;
    check_graph(ps, demand)?;
    let p = normalized(
        pairs(ps.len())
            .enumerate()
            .map(|(k, (i, j))| demand.weight_at(k) * ps.sq_dist(i, j))
            .collect(),
        "demand-weighted squared-length distribution",
    )?;
    psd_embedding(ps, p, Method::DemandSquaredLength)
}

/// Psd-rooted map with `p_kl` proportional to `|v_kl|` for the top right
/// singular vector `v` of the difference matrix.
pub fn stable_rank_embedding(ps: &PointSet) -> Result<EmbeddingOperator> {
    ensure_validated(ps)?;
    let spec = svd_spectrum(&difference_matrix(ps))?;
    let p = normalized(spec.v_top().iter().map(|x| x.abs()).collect(), "top right singular vector")?;
    psd_embedding(ps, p, Method::StableRankPsd)
}

/// `x -> (sigma_1 / |v|_1) <x, u>` for the top singular triple of the
/// difference matrix.
pub fn spectral_1d_embedding(ps: &PointSet) -> Result<EmbeddingOperator> {
    ensure_validated(ps)?;
    let spec = svd_spectrum(&difference_matrix(ps))?;
    let v_l1: f64 = spec.v_top().iter().map(|x| x.abs()).sum();
    let row = spec.u_top().transpose() * (spec.sigma_top() / v_l1);
    Ok(EmbeddingOperator {
        method: Method::Spectral1d,
        matrix: DMatrix::from_row_slice(1, ps.dim(), row.as_slice()),
        p: None,
    })
}

/// `x -> sigma_1 <x, u> / sum_kl sqrt(d_kl) |v_kl|` for the top singular
/// triple of the demand-weighted difference matrix.
pub fn demand_spectral_1d_embedding(ps: &PointSet, demand: &WeightedGraph) -> Result<EmbeddingOperator> {
    ensure_validated(ps)?;
    check_graph(ps, demand)?;
    let m = weighted_difference_matrix(ps, demand)?;
    let spec = svd_spectrum(&m).map_err(|_| Error::Degenerate("demand-weighted difference matrix is zero".into()))?;
    let v = spec.v_top();
    let norm: f64 = demand
        .pair_weights()
        .iter()
        .zip(v.iter())
        .map(|(d, x)| d.sqrt() * x.abs())
        .sum();
    let row = spec.u_top().transpose() * (spec.sigma_top() / norm);
    Ok(EmbeddingOperator {
        method: Method::DemandSpectral1d,
        matrix: DMatrix::from_row_slice(1, ps.dim(), row.as_slice()),
        p: None,
    })
}

fn check_graph(ps: &PointSet, g: &WeightedGraph) -> Result<()> {
    if g.n() != ps.len() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} vertices, point set has {}",
            g.n(),
            ps.len()
        )));
    }
    Ok(())
}

/// Builds the embedding of the given kind. Demand-weighted methods use
/// `demand` when given and unit demand on every pair otherwise; the MVEE
/// behind `goemans_mvee` runs with its default parameters.
pub fn build_embedding(ps: &PointSet, method: Method, demand: Option<&WeightedGraph>) -> Result<EmbeddingOperator> {
    let uniform;
    let demand = match demand {
        Some(d) => d,
        None => {
            uniform = WeightedGraph::complete(ps.len(), 1.0)?;
            &uniform
        }
    };
    match method {
        Method::GoemansMvee => {
            crate::mvee::goemans(ps, crate::mvee::DEFAULT_EPS, crate::mvee::DEFAULT_MAX_ITER).map(|(_, g)| g.operator)
        }
        Method::SquaredLength => squared_length_embedding(ps),
        Method::StableRankPsd => stable_rank_embedding(ps),
        Method::Spectral1d => spectral_1d_embedding(ps),
        Method::DemandSpectral1d => demand_spectral_1d_embedding(ps, demand),
        Method::DemandSquaredLength => demand_squared_length_embedding(ps, demand),
    }
}

/// Distortion of an embedding measured against squared distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub contraction_ok: bool,
    /// Largest `|f(x_i) - f(x_j)| / |x_i - x_j|^2`.
    pub worst_expansion: f64,
    pub worst_expansion_pair: Option<(usize, usize)>,
    /// Largest `|x_i - x_j|^2 / |f(x_i) - f(x_j)|`; `null` when some pair
    /// collapses.
    #[serde(with = "crate::io::extended_f64")]
    pub worst_case_distortion: f64,
    pub worst_distortion_pair: Option<(usize, usize)>,
    /// `sum w_ij |x_i - x_j|^2 / sum w_ij |f(x_i) - f(x_j)|`.
    #[serde(with = "crate::io::extended_f64")]
    pub average_distortion: f64,
    pub weighted: bool,
    /// Additive allowance per pair in the contraction verdict; zero unless
    /// built by [`distortion_report_with_tol`].
    pub contraction_slack: f64,
    /// Pairs with squared distance at most [`COINCIDENT_REL`] times the
    /// largest one; they count in the averages but not in the ratios.
    pub coincident_pairs: usize,
}

/// Squared distance, relative to the largest one, at or below which a pair
/// counts as coincident in [`distortion_report`].
pub const COINCIDENT_REL: f64 = 1e-24;

/// Evaluates `emb` on every pair of `ps`. Sums use `weights` when given,
/// otherwise unit weights. Coincident pairs are skipped for the ratios.
pub fn distortion_report(
    ps: &PointSet,
    emb: &EmbeddingOperator,
    weights: Option<&WeightedGraph>,
) -> Result<DistortionReport> {
    distortion_report_with_tol(ps, emb, weights, 0.0)
}

/// [`distortion_report`] for a set that is l2-squared only up to relative
/// tolerance `l22_tol`. The contraction verdict then allows each image
/// distance an additive `l22_tol * |A|_2 * sqrt(D)`, with `D` the largest
/// squared distance; `worst_expansion` is still the plain ratio.
pub fn distortion_report_with_tol(
    ps: &PointSet,
    emb: &EmbeddingOperator,
    weights: Option<&WeightedGraph>,
    l22_tol: f64,
) -> Result<DistortionReport> {
    if emb.matrix.ncols() != ps.dim() {
        return Err(Error::DimensionMismatch(format!(
            "embedding expects dimension {}, points have {}",
            emb.matrix.ncols(),
            ps.dim()
        )));
    }
    if let Some(w) = weights {
        check_graph(ps, w)?;
    }
    let images = emb.embed_points(ps);
    let mut worst_expansion = 0.0f64;
    let mut worst_expansion_pair = None;
    let mut worst_distortion = 0.0f64;
    let mut worst_distortion_pair = None;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut coincident_pairs = 0;
    let mut contraction_ok = true;
    let diameter_sq = pairs(ps.len()).map(|(i, j)| ps.sq_dist(i, j)).fold(0.0, f64::max);
    let cutoff = COINCIDENT_REL * diameter_sq;
    let slack = if l22_tol > 0.0 {
        let op_norm = emb.matrix.singular_values().iter().copied().fold(0.0, f64::max);
        l22_tol * op_norm * diameter_sq.sqrt()
    } else {
        0.0
    };
    for (k, (i, j)) in pairs(ps.len()).enumerate() {
        let orig = ps.sq_dist(i, j);
        let img = (images.row(i) - images.row(j)).norm();
        let w = weights.map_or(1.0, |g| g.weight_at(k));
        num += w * orig;
        den += w * img;
        if orig <= cutoff {
            coincident_pairs += 1;
            continue;
        }
        contraction_ok &= img <= orig * (1.0 + CONTRACTION_TOL) + slack;
        let expansion = img / orig;
        if worst_expansion_pair.is_none() || expansion > worst_expansion {
            worst_expansion = expansion;
            worst_expansion_pair = Some((i, j));
        }
        let distortion = if img > 0.0 { orig / img } else { f64::INFINITY };
        if worst_distortion_pair.is_none() || distortion > worst_distortion {
            worst_distortion = distortion;
            worst_distortion_pair = Some((i, j));
        }
    }
    let average_distortion = if den > 0.0 { num / den } else { f64::INFINITY };
    Ok(DistortionReport {
        contraction_ok,
        worst_expansion,
        worst_expansion_pair,
        worst_case_distortion: worst_distortion,
        worst_distortion_pair,
        average_distortion,
        weighted: weights.is_some(),
        contraction_slack: slack,
        coincident_pairs,
    })
}
