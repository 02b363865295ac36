//! Point sets, the l2-squared triangle check, and difference matrices.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::pairs::{pair_count, pairs};

/// Default relative tolerance for [`check_l22`].
pub const DEFAULT_L22_TOL: f64 = 1e-9;

/// `n` points in `R^d`, stored one per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointSetJson", into = "PointSetJson")]
pub struct PointSet {
    coords: DMatrix<f64>,
    validated_l22: bool,
}

#[derive(Serialize, Deserialize)]
struct PointSetJson {
    n: usize,
    d: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<PointSetJson> for PointSet {
    type Error = Error;

    fn try_from(raw: PointSetJson) -> Result<Self> {
        if raw.points.len() != raw.n {
            return Err(invalid(format!(
                "field `points` has {} rows but `n` = {}",
                raw.points.len(),
                raw.n
            )));
        }
        if let Some((i, row)) = raw.points.iter().enumerate().find(|(_, r)| r.len() != raw.d) {
            return Err(invalid(format!(
                "field `points[{i}]` has {} coordinates but `d` = {}",
                row.len(),
                raw.d
            )));
        }
        PointSet::from_rows(&raw.points)
    }
}

impl From<PointSet> for PointSetJson {
    fn from(ps: PointSet) -> Self {
        PointSetJson {
            n: ps.len(),
            d: ps.dim(),
            points: ps.rows(),
        }
    }
}

impl PointSet {
    /// Builds a point set from an `n x d` matrix whose rows are the points.
    pub fn new(coords: DMatrix<f64>) -> Result<Self> {
        if coords.nrows() < 2 {
            return Err(invalid(format!("need at least 2 points, got {}", coords.nrows())));
        }
        if coords.ncols() < 1 {
            return Err(invalid("dimension must be at least 1"));
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            let (i, k) = (pos % coords.nrows(), pos / coords.nrows());
            return Err(invalid(format!("coordinate {k} of point {i} is not finite")));
        }
        Ok(Self {
            coords,
            validated_l22: false,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(invalid("rows have unequal lengths"));
        }
        Self::new(DMatrix::from_fn(n, d, |i, k| rows[i][k]))
    }

    pub fn len(&self) -> usize {
        self.coords.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.coords.row(i).transpose()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.coords
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// `x_i - x_j`.
    pub fn diff(&self, i: usize, j: usize) -> DVector<f64> {
        (self.coords.row(i) - self.coords.row(j)).transpose()
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        (self.coords.row(i) - self.coords.row(j)).norm_squared()
    }

    /// Full matrix of squared distances.
    pub fn sq_dist_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut out = DMatrix::zeros(n, n);
        for (i, j) in pairs(n) {
            let v = self.sq_dist(i, j);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
        out
    }

    /// Whether the set carries the l2-squared validation flag.
    pub fn is_validated(&self) -> bool {
        self.validated_l22
    }

    /// Runs [`check_l22`] and sets the validation flag on success.
    pub fn validated(mut self, tol: f64) -> Result<Self> {
        let report = check_l22(&self, tol);
        if !report.ok {
            let (i, j, k) = report.worst_triple.unwrap_or_default();
            return Err(Error::ConstraintViolated(format!(
                "l2-squared triangle inequality fails on ({i}, {j}, {k}) by {:e}",
                report.worst_violation
            )));
        }
        self.validated_l22 = true;
        Ok(self)
    }

    /// Marks the set as l2-squared without checking.
    pub fn assume_l22(mut self) -> Self {
        self.validated_l22 = true;
        self
    }

    /// Adds `shift` to every point. The validation flag is kept since
    /// squared distances are unchanged.
    pub fn translated(&self, shift: &DVector<f64>) -> Result<Self> {
        if shift.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "shift has length {} but d = {}",
                shift.len(),
                self.dim()
            )));
        }
        let mut coords = self.coords.clone();
        for mut row in coords.row_iter_mut() {
            row += shift.transpose();
        }
        Ok(Self {
            coords,
            validated_l22: self.validated_l22,
        })
    }

    /// Reorders points so that new point `k` is old point `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.len())?;
        let coords = DMatrix::from_fn(self.len(), self.dim(), |i, k| self.coords[(perm[i], k)]);
        Ok(Self {
            coords,
            validated_l22: self.validated_l22,
        })
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(invalid("permutation has wrong length"));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(invalid("not a permutation"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Outcome of [`check_l22`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L22Report {
    pub ok: bool,
    /// Most violated `(i, j, k)`, read as `|x_i-x_j|^2 + |x_j-x_k|^2 >= |x_i-x_k|^2`.
    pub worst_triple: Option<(usize, usize, usize)>,
    /// `|x_i-x_k|^2 - |x_i-x_j|^2 - |x_j-x_k|^2` at the worst triple; negative
    /// values are slack.
    pub worst_violation: f64,
    /// Largest pairwise squared distance.
    pub scale: f64,
    pub tol: f64,
}

/// Checks the l2-squared triangle inequality on every triple, allowing a
/// violation of `tol` times the largest squared distance.
pub fn check_l22(ps: &PointSet, tol: f64) -> L22Report {
    let n = ps.len();
    let dist = ps.sq_dist_matrix();
    let scale = dist.iter().fold(0.0f64, |m, x| m.max(*x));

    // (violation, triple); larger violation wins, then the smaller triple.
    type Cand = (f64, (usize, usize, usize));
    let better = |a: Cand, b: Cand| -> Cand {
        match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => {
                if a.1 <= b.1 {
                    a
                } else {
                    b
                }
            }
        }
    };

    let worst = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let mut best: Option<Cand> = None;
            for j in 0..n {
                if j == i {
                    continue;
                }
                for k in i + 1..n {
                    if k == j {
                        continue;
                    }
                    let v = dist[(i, k)] - dist[(i, j)] - dist[(j, k)];
                    let cand = (v, (i, j, k));
                    best = Some(match best {
                        None => cand,
                        Some(b) => better(b, cand),
                    });
                }
            }
            best
        })
        .reduce_with(better);

    match worst {
        None => L22Report {
            ok: true,
            worst_triple: None,
            worst_violation: 0.0,
            scale,
            tol,
        },
        Some((v, t)) => L22Report {
            ok: v <= tol * scale,
            worst_triple: Some(t),
            worst_violation: v,
            scale,
            tol,
        },
    }
}

/// Matrix whose columns are the (optionally demand-scaled) differences
/// `x_i - x_j`, `i < j`, in canonical pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceMatrix {
    n: usize,
    matrix: DMatrix<f64>,
    weighted: bool,
}

impl DifferenceMatrix {
    /// Number of points the matrix was built from.
    pub fn points(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn column(&self, k: usize) -> DVector<f64> {
        self.matrix.column(k).into_owned()
    }

    pub fn frob_sq(&self) -> f64 {
        self.matrix.norm_squared()
    }
}

pub fn difference_matrix(ps: &PointSet) -> DifferenceMatrix {
    let n = ps.len();
    let mut matrix = DMatrix::zeros(ps.dim(), pair_count(n));
    for (k, (i, j)) in pairs(n).enumerate() {
        matrix.set_column(k, &ps.diff(i, j));
    }
    DifferenceMatrix {
        n,
        matrix,
        weighted: false,
    }
}

/// Columns `sqrt(d_ij) (x_i - x_j)`. Zero-demand pairs keep their (zero) column.
pub fn weighted_difference_matrix(ps: &PointSet, demand: &WeightedGraph) -> Result<DifferenceMatrix> {
    let n = ps.len();
    if demand.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "demand graph has {} vertices, point set has {n}",
            demand.n()
        )));
    }
    let mut matrix = DMatrix::zeros(ps.dim(), pair_count(n));
    for (k, (i, j)) in pairs(n).enumerate() {
        let w = demand.weight_at(k);
        if w < 0.0 {
            return Err(invalid(format!("negative demand on pair ({i}, {j})")));
        }
        matrix.set_column(k, &(ps.diff(i, j) * w.sqrt()));
    }
    Ok(DifferenceMatrix {
        n,
        matrix,
        weighted: true,
    })
}
