//! Origin-centered minimum-volume enclosing ellipsoid of the difference
//! vectors, and the worst-case embedding built from its John decomposition.
//!
//! The ellipsoid is found by a Khachiyan-style coordinate ascent on the
//! design weights `w` (maximize `log det sum_k w_k m_k m_k^T` over the
//! simplex) with Todd-Yildirim away steps, working in coordinates of the
//! span of the differences.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::embed::{pair_second_moment, EmbeddingOperator, Method};
use crate::error::{invalid, Error, Result};
use crate::pairs::pair_count;
use crate::points::{DifferenceMatrix, PointSet};
use crate::spectral::svd_spectrum;

pub const DEFAULT_EPS: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// `E = {x : x^T Q x <= 1}` with `Q^+ = sum_kl alpha_kl m_kl m_kl^T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidResult {
    #[serde(rename = "Q", with = "matrix_rows")]
    pub q: DMatrix<f64>,
    /// Pair weights in canonical order; they sum to `d_eff`.
    pub alpha: Vec<f64>,
    /// Requested tolerance.
    pub eps: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Dimension of the span of the differences.
    pub d_eff: usize,
    /// `max_kl m_kl^T Q m_kl - 1`.
    pub containment_excess: f64,
    /// `1 - min m_kl^T Q m_kl` over pairs with positive weight.
    pub support_slack: f64,
}

impl EllipsoidResult {
    /// Worst-case distortion bound `sqrt((1 + e) d_eff)` certified by the
    /// achieved containment `e`.
    pub fn certified_distortion(&self) -> f64 {
        ((1.0 + self.containment_excess.max(0.0)) * self.d_eff as f64).sqrt()
    }

    /// `m^T Q m`.
    pub fn gauge(&self, m: &DVector<f64>) -> f64 {
        (m.transpose() * &self.q * m)[(0, 0)]
    }
}

pub(crate) mod matrix_rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("matrix rows have unequal lengths"));
        }
        Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }
}

fn leverages(z: &DMatrix<f64>, w: &[f64]) -> Option<Vec<f64>> {
    let r = z.nrows();
    let mut sigma = DMatrix::zeros(r, r);
    for (k, &wk) in w.iter().enumerate() {
        if wk > 0.0 {
            let col = z.column(k);
            sigma.ger(wk, &col, &col, 1.0);
        }
    }
    let chol = Cholesky::new((&sigma + sigma.transpose()) * 0.5)?;
    let solved = chol.l().solve_lower_triangular(z)?;
    Some(solved.column_iter().map(|c| c.norm_squared()).collect())
}

/// Minimum-volume origin-centered ellipsoid enclosing the columns of `m`, to
/// within a factor `1 + eps` on the gauge.
pub fn mvee_centered(m: &DifferenceMatrix, eps: f64, max_iter: usize) -> Result<EllipsoidResult> {
    if !(eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    let spec = svd_spectrum(m)?;
    let r = spec.rank;
    let rf = r as f64;
    let basis = spec.left.columns(0, r).into_owned();
    let z = basis.transpose() * m.matrix();
    let cols = z.ncols();

    let active: Vec<bool> = z.column_iter().map(|c| c.norm() > 0.0).collect();
    let count = active.iter().filter(|&&a| a).count() as f64;
    let mut w: Vec<f64> = active.iter().map(|&a| if a { 1.0 / count } else { 0.0 }).collect();

    let mut iterations = 0;
    let mut converged = false;
    let mut kappa = leverages(&z, &w).ok_or_else(|| Error::Degenerate("design matrix is singular".into()))?;
    loop {
        let (j, kj) = kappa
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bj, bk), (k, &v)| if v > bk { (k, v) } else { (bj, bk) });
        let (i, ki) = kappa
            .iter()
            .enumerate()
            .filter(|(k, _)| w[*k] > 0.0)
            .fold((0, f64::INFINITY), |(bi, bk), (k, &v)| if v < bk { (k, v) } else { (bi, bk) });
        let up = kj / rf - 1.0;
        let down = 1.0 - ki / rf;
        if up <= eps && down <= eps {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let (k, tau) = if up >= down {
            (j, (kj / rf - 1.0) / (kj - 1.0))
        } else {
            let floor = -w[i] / (1.0 - w[i]);
            let tau = if ki > 1.0 { ((ki / rf - 1.0) / (ki - 1.0)).max(floor) } else { floor };
            (i, tau)
        };
        if !tau.is_finite() || tau == 0.0 {
            break;
        }
        for x in w.iter_mut() {
            *x *= 1.0 - tau;
        }
        w[k] += tau;
        if w[k] < 1e-300 {
            w[k] = 0.0;
        }
        kappa = match leverages(&z, &w) {
            Some(kp) => kp,
            None => return Err(Error::Degenerate("design matrix became singular".into())),
        };
    }

    let alpha: Vec<f64> = w.iter().map(|x| x * rf).collect();
    let mut sigma = DMatrix::zeros(r, r);
    for (k, &ak) in alpha.iter().enumerate() {
        if ak > 0.0 {
            let col = z.column(k);
            sigma.ger(ak, &col, &col, 1.0);
        }
    }
    let sigma_inv = Cholesky::new((&sigma + sigma.transpose()) * 0.5)
        .ok_or_else(|| Error::Degenerate("final design matrix is singular".into()))?
        .inverse();
    let q = &basis * sigma_inv * basis.transpose();
    let q = (&q + q.transpose()) * 0.5;

    let gauges: Vec<f64> = kappa.iter().map(|k| k / rf).collect();
    let containment_excess = gauges.iter().fold(f64::NEG_INFINITY, |m, &g| m.max(g)) - 1.0;
    let support_slack = 1.0
        - gauges
            .iter()
            .zip(&w)
            .filter(|(_, &wk)| wk > 0.0)
            .fold(f64::INFINITY, |m, (&g, _)| m.min(g));
    debug_assert_eq!(alpha.len(), cols);
    Ok(EllipsoidResult {
        q,
        alpha,
        eps,
        converged,
        iterations,
        d_eff: r,
        containment_excess,
        support_slack,
    })
}

/// The worst-case embedding `x -> d_eff^{-1/2} Q^{-1/2} x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoemansEmbedding {
    pub operator: EmbeddingOperator,
    pub converged: bool,
    /// Guaranteed bound on the worst-case distortion, `sqrt((1+e) d_eff)`.
    pub certified_distortion: f64,
}

pub fn goemans_embedding(ps: &PointSet, ell: &EllipsoidResult) -> Result<GoemansEmbedding> {
    if !ps.is_validated() {
        return Err(Error::NotValidated);
    }
    if ell.alpha.len() != pair_count(ps.len()) || ell.q.nrows() != ps.dim() {
        return Err(Error::DimensionMismatch(
            "ellipsoid was not computed from this point set".into(),
        ));
    }
    let total: f64 = ell.alpha.iter().sum();
    let p: Vec<f64> = ell.alpha.iter().map(|a| a / total).collect();
    let matrix = crate::linalg::psd_sqrt(&pair_second_moment(ps, &p));
    Ok(GoemansEmbedding {
        operator: EmbeddingOperator {
            method: Method::GoemansMvee,
            matrix,
            p: Some(p),
        },
        converged: ell.converged,
        certified_distortion: ell.certified_distortion(),
    })
}

/// Ellipsoid and embedding in one step with default parameters.
pub fn goemans(ps: &PointSet, eps: f64, max_iter: usize) -> Result<(EllipsoidResult, GoemansEmbedding)> {
    let ell = mvee_centered(&crate::points::difference_matrix(ps), eps, max_iter)?;
    let emb = goemans_embedding(ps, &ell)?;
    Ok((ell, emb))
}
