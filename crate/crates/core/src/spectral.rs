//! Singular values of difference matrices, stable rank, graph Laplacians and
//! the generalized eigenvalues of a cost/demand Laplacian pencil.

use log::warn;
use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::{fix_sign, psd_range, RANK_CUTOFF};
use crate::pairs::pairs;
use crate::points::DifferenceMatrix;

/// Singular value decomposition of a difference matrix.
#[derive(Debug, Clone)]
pub struct DifferenceSpectrum {
    /// Singular values in non-increasing order, `min(d, m)` of them.
    pub sigma: Vec<f64>,
    /// Left singular vectors as columns (`d x min(d, m)`).
    pub left: DMatrix<f64>,
    /// Right singular vectors as columns (`m x min(d, m)`).
    pub right: DMatrix<f64>,
    pub frob_sq: f64,
    pub stable_rank: f64,
    /// Number of singular values above the relative rank cutoff.
    pub rank: usize,
}

/// The serialized form of a [`DifferenceSpectrum`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub sigma: Vec<f64>,
    pub stable_rank: f64,
    pub u_top: Vec<f64>,
    pub v_top: Vec<f64>,
}

impl DifferenceSpectrum {
    pub fn sigma_top(&self) -> f64 {
        self.sigma[0]
    }

    pub fn u_top(&self) -> DVector<f64> {
        self.left.column(0).into_owned()
    }

    pub fn v_top(&self) -> DVector<f64> {
        self.right.column(0).into_owned()
    }

    /// `U diag(sigma) V^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let s = DMatrix::from_diagonal(&DVector::from_column_slice(&self.sigma));
        &self.left * s * self.right.transpose()
    }

    /// Fraction of `sum sigma_t^2` carried by `t > r` (1-based `t`).
    pub fn tail_mass_fraction(&self, r: usize) -> f64 {
        if r >= self.sigma.len() {
            return 0.0;
        }
        let total: f64 = self.sigma.iter().map(|s| s * s).sum();
        let tail: f64 = self.sigma[r..].iter().map(|s| s * s).sum();
        tail / total
    }

    pub fn report(&self) -> SpectrumReport {
        SpectrumReport {
            sigma: self.sigma.clone(),
            stable_rank: self.stable_rank,
            u_top: self.u_top().iter().copied().collect(),
            v_top: self.v_top().iter().copied().collect(),
        }
    }
}

/// Thin SVD of `m`, sorted, with the first significant entry of every left
/// singular vector made positive and the right vector flipped to match.
pub fn svd_spectrum(m: &DifferenceMatrix) -> Result<DifferenceSpectrum> {
    let a = m.matrix();
    let frob_sq = m.frob_sq();
    if frob_sq == 0.0 {
        return Err(Error::Degenerate(
            "difference matrix is zero; stable rank undefined".into(),
        ));
    }
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| {
        svd.singular_values[y]
            .total_cmp(&svd.singular_values[x])
            .then(x.cmp(&y))
    });

    let mut sigma = Vec::with_capacity(k);
    let mut left = DMatrix::zeros(a.nrows(), k);
    let mut right = DMatrix::zeros(a.ncols(), k);
    for (dst, &src) in order.iter().enumerate() {
        let mut uc = u.column(src).into_owned();
        let mut vc = v_t.row(src).transpose();
        let before = uc.clone();
        fix_sign(&mut uc);
        if uc != before {
            vc.neg_mut();
        }
        sigma.push(svd.singular_values[src].max(0.0));
        left.set_column(dst, &uc);
        right.set_column(dst, &vc);
    }
    let top = sigma[0];
    let rank = sigma.iter().filter(|&&s| s > RANK_CUTOFF * top).count();
    Ok(DifferenceSpectrum {
        stable_rank: frob_sq / (top * top),
        sigma,
        left,
        right,
        frob_sq,
        rank,
    })
}

/// Graph Laplacian: `-W(i,j)` off the diagonal and weighted degrees on it.
pub fn laplacian(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for (k, (i, j)) in pairs(n).enumerate() {
        let w = g.weight_at(k);
        l[(i, j)] = -w;
        l[(j, i)] = -w;
    }
    for i in 0..n {
        let degree: f64 = (0..n).filter(|&j| j != i).map(|j| g.weight(i, j)).sum();
        l[(i, i)] = degree;
    }
    l
}

/// Finite generalized eigenvalues of the pencil `(L_C, L_D)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedSpectrum {
    /// Ascending; `lambdas[0]` is `lambda_1`.
    pub lambdas: Vec<f64>,
    /// Directions outside `range(L_D)` beyond the all-ones kernel; these
    /// would carry infinite eigenvalues and are not listed.
    pub dropped_infinite: usize,
}

impl GeneralizedSpectrum {
    /// `lambda_r` with 1-based `r`.
    pub fn lambda(&self, r: usize) -> Option<f64> {
        r.checked_sub(1).and_then(|k| self.lambdas.get(k).copied())
    }

    /// Smallest `r` with `lambda_r >= phi / (1 - delta)`, if any.
    pub fn r_certificate(&self, phi: f64, delta: f64) -> Option<usize> {
        if !(0.0..1.0).contains(&delta) {
            return None;
        }
        let threshold = phi / (1.0 - delta);
        self.lambdas.iter().position(|&l| l >= threshold).map(|k| k + 1)
    }

    /// Whether `lambda_r >= phi / (1 - delta)`.
    pub fn certifies(&self, r: usize, phi: f64, delta: f64) -> bool {
        (0.0..1.0).contains(&delta)
            && self.lambda(r).is_some_and(|l| l >= phi / (1.0 - delta))
    }
}

/// Eigenvalues of `(L_D^+)^{1/2} L_C (L_D^+)^{1/2}` on `range(L_D)`.
pub fn generalized_eigs(cost: &WeightedGraph, demand: &WeightedGraph) -> Result<GeneralizedSpectrum> {
    let n = cost.n();
    if demand.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "cost graph on {n} vertices, demand graph on {}",
            demand.n()
        )));
    }
    if demand.total_weight() <= 0.0 {
        return Err(invalid("demand graph has zero total weight"));
    }
    let lc = laplacian(cost);
    let ld = laplacian(demand);
    let (vals, basis) = psd_range(&ld);
    let k = vals.len();
    // B = V_r diag(lambda^-1/2) maps range coordinates into R^n.
    let b = &basis * DMatrix::from_diagonal(&vals.map(|x| 1.0 / x.sqrt()));
    let reduced = b.transpose() * &lc * &b;
    let (lambdas, _) = crate::linalg::sym_eigen(&reduced);
    let dropped_infinite = (n - 1).saturating_sub(k);
    if dropped_infinite > 0 {
        warn!(
            "demand Laplacian kernel has dimension {}; dropping {dropped_infinite} infinite generalized eigenvalue(s)",
            n - k
        );
    }
    Ok(GeneralizedSpectrum {
        lambdas: lambdas.iter().copied().collect(),
        dropped_infinite,
    })
}

/// Tail-mass inequality between the singular values of a demand-weighted
/// difference matrix and the generalized eigenvalues of the instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VonNeumannCheck {
    pub r: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `lhs = sum_{t>r} sigma_t^2 / sum sigma_t^2`, `rhs = phi_sdp / lambda_{r+1}`.
pub fn von_neumann_check(
    spec: &DifferenceSpectrum,
    r: usize,
    phi_sdp: f64,
    lambda_r1: f64,
) -> Result<VonNeumannCheck> {
    if !(lambda_r1 > 0.0) {
        return Err(invalid(format!("lambda_(r+1) must be positive, got {lambda_r1}")));
    }
    let lhs = spec.tail_mass_fraction(r);
    let rhs = phi_sdp / lambda_r1;
    Ok(VonNeumannCheck {
        r,
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-6,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableRankBound {
    pub sr: f64,
    pub bound: f64,
    /// Whether the top `r` singular values carry at least a `delta` fraction
    /// of the mass.
    pub precondition_holds: bool,
    pub ok: bool,
}

/// Compares `sr(M)` with `r / delta`.
pub fn stable_rank_bound(spec: &DifferenceSpectrum, r: usize, delta: f64) -> StableRankBound {
    let head = 1.0 - spec.tail_mass_fraction(r);
    let bound = r as f64 / delta;
    StableRankBound {
        sr: spec.stable_rank,
        bound,
        precondition_holds: head >= delta,
        ok: spec.stable_rank <= bound + 1e-9,
    }
}
