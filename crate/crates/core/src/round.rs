//! Sweep-cut rounding of one-dimensional embeddings, an exhaustive optimum
//! for small instances, and the end-to-end rounding pipeline.
//!
//! A line metric `|y_i - y_j|` is a non-negative combination of the
//! threshold cut metrics of the sorted order of `y`, so the ratio
//! `sum c_ij |y_i - y_j| / sum d_ij |y_i - y_j|` is an average of threshold
//! cut sparsities weighted by separated demand. The best threshold cut is
//! therefore never worse than the line ratio, and no other subset of the
//! line order needs to be examined.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::demand_spectral_1d_embedding;
use crate::error::{invalid, Error, Result};
use crate::graph::{cut_sparsity, Cut, CutResult, WeightedGraph};
use crate::pairs::pairs;
use crate::sdp::{SdpInstance, SdpSolution};
use crate::spectral::generalized_eigs;

pub const BRUTE_FORCE_MAX_N: usize = 20;

/// Best threshold cut of a vertex ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub best_cut: CutResult,
    pub line_values: Vec<f64>,
    /// `sum c_ij |y_i - y_j| / sum d_ij |y_i - y_j|`.
    #[serde(with = "crate::io::extended_f64")]
    pub line_ratio: f64,
}

/// Sorts vertices by value (ties by index) and returns the sparsest of the
/// `n - 1` prefix cuts. Prefixes that separate no demand are skipped.
pub fn sweep_round(values: &[f64], cost: &WeightedGraph, demand: &WeightedGraph) -> Result<SweepOutcome> {
    let n = values.len();
    if cost.n() != n || demand.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} line values, cost graph on {}, demand graph on {}",
            cost.n(),
            demand.n()
        )));
    }
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(invalid(format!("line value {k} is not finite")));
    }
    if values.iter().all(|&v| v == values[0]) {
        return Err(Error::Degenerate("all line values are equal; no cut is induced".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let mut best: Option<CutResult> = None;
    for t in 1..n {
        let cut = Cut::new(n, order[..t].iter().copied())?;
        let res = cut_sparsity(&cut, cost, demand)?;
        if !res.is_feasible() {
            continue;
        }
        if best.as_ref().is_none_or(|b| res.sparsity < b.sparsity) {
            best = Some(res);
        }
    }
    let best_cut = best.ok_or_else(|| Error::Degenerate("no threshold cut separates any demand".into()))?;

    let (mut num, mut den) = (0.0, 0.0);
    for (k, (i, j)) in pairs(n).enumerate() {
        let gap = (values[i] - values[j]).abs();
        num += cost.weight_at(k) * gap;
        den += demand.weight_at(k) * gap;
    }
    Ok(SweepOutcome {
        best_cut,
        line_values: values.to_vec(),
        line_ratio: if den > 0.0 { num / den } else { f64::INFINITY },
    })
}

/// Members of the canonical side of the cut whose complement side
/// (containing vertex 0) is given by `mask` over vertices `1..n`: the
/// smaller side, or the side containing 0 when both have equal size.
fn canonical_side(mask: u64, n: usize) -> Vec<usize> {
    let outside: Vec<usize> = (1..n).filter(|&v| mask >> (v - 1) & 1 == 1).collect();
    let size = outside.len();
    if size < n - size {
        outside
    } else {
        let mut inside = vec![0];
        inside.extend((1..n).filter(|&v| mask >> (v - 1) & 1 == 0));
        inside
    }
}

/// Exhaustive minimum over all cuts. Ties go to the smaller side, then to
/// the lexicographically smaller member list.
pub fn brute_force_sparsest_cut(cost: &WeightedGraph, demand: &WeightedGraph) -> Result<CutResult> {
    let n = cost.n();
    if demand.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "cost graph on {n} vertices, demand graph on {}",
            demand.n()
        )));
    }
    if n > BRUTE_FORCE_MAX_N {
        return Err(invalid(format!(
            "brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    let c = cost.adjacency();
    let d = demand.adjacency();
    let evaluate = |mask: u64| -> f64 {
        let side = |v: usize| v > 0 && mask >> (v - 1) & 1 == 1;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..n {
            let si = side(i);
            for j in i + 1..n {
                if si != side(j) {
                    num += c[(i, j)];
                    den += d[(i, j)];
                }
            }
        }
        if den > 0.0 {
            num / den
        } else {
            f64::INFINITY
        }
    };
    let better = |a: (f64, u64), b: (f64, u64)| -> (f64, u64) {
        match a.0.total_cmp(&b.0) {
            Ordering::Less => a,
            Ordering::Greater => b,
            Ordering::Equal => {
                let (sa, sb) = (canonical_side(a.1, n), canonical_side(b.1, n));
                if (sa.len(), &sa) <= (sb.len(), &sb) {
                    a
                } else {
                    b
                }
            }
        }
    };
    let total: u64 = 1 << (n - 1);
    let (sparsity, mask) = (1..total)
        .into_par_iter()
        .map(|m| (evaluate(m), m))
        .reduce_with(better)
        .expect("n >= 2 gives at least one cut");
    if !sparsity.is_finite() {
        return Err(Error::Degenerate("no cut separates any demand".into()));
    }
    cut_sparsity(&Cut::new(n, canonical_side(mask, n))?, cost, demand)
}

/// Result of rounding an SDP solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingOutcome {
    pub best_cut: CutResult,
    pub line_values: Vec<f64>,
    #[serde(with = "crate::io::extended_f64")]
    pub line_ratio: f64,
    pub phi_sdp: f64,
    /// `Phi(best_cut) / phi_sdp`.
    pub certified_ratio: f64,
    pub r: Option<usize>,
    pub delta: f64,
    /// `lambda_r(C, D)` for the `r` used.
    pub lambda_r: Option<f64>,
    /// `r / delta` when `lambda_r >= phi_sdp / (1 - delta)`.
    pub guarantee: Option<f64>,
}

/// Outcome JSON as written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub cut: Vec<usize>,
    pub phi: f64,
    pub phi_sdp: f64,
    pub ratio: f64,
    pub guarantee: Option<f64>,
    pub lambda_r: Option<f64>,
    pub r: Option<usize>,
    pub delta: f64,
    pub cut_cost: f64,
    pub cut_demand: f64,
    pub line_values: Vec<f64>,
}

impl RoundingOutcome {
    pub fn to_json(&self) -> OutcomeJson {
        OutcomeJson {
            cut: self.best_cut.cut.members().to_vec(),
            phi: self.best_cut.sparsity,
            phi_sdp: self.phi_sdp,
            ratio: self.certified_ratio,
            guarantee: self.guarantee,
            lambda_r: self.lambda_r,
            r: self.r,
            delta: self.delta,
            cut_cost: self.best_cut.cut_cost,
            cut_demand: self.best_cut.cut_demand,
            line_values: self.line_values.clone(),
        }
    }
}

/// Rounds `sol` through the demand-weighted one-dimensional spectral
/// embedding and a sweep. With `r = None` the smallest `r` certified by the
/// generalized eigenvalues is used. The guarantee is attached only when
/// `lambda_r >= phi_sdp / (1 - delta)`; the rounding runs either way.
pub fn round_sparsest_cut(
    inst: &SdpInstance,
    sol: &SdpSolution,
    delta: f64,
    r: Option<usize>,
) -> Result<RoundingOutcome> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if sol.points.len() != inst.n() {
        return Err(Error::DimensionMismatch("solution and instance sizes differ".into()));
    }
    let emb = demand_spectral_1d_embedding(&sol.points, &inst.demand)?;
    let values = emb.line_values(&sol.points)?;
    let sweep = sweep_round(&values, &inst.cost, &inst.demand).map_err(|e| match e {
        Error::Degenerate(msg) => Error::Degenerate(format!(
            "{msg} (phi_sdp = {}, point dimension {}, max |value| = {:e})",
            sol.phi_sdp,
            sol.points.dim(),
            values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        )),
        other => other,
    })?;

    let spectrum = generalized_eigs(&inst.cost, &inst.demand)?;
    let r = r.or_else(|| spectrum.r_certificate(sol.phi_sdp, delta));
    let lambda_r = r.and_then(|r| spectrum.lambda(r));
    let guarantee = r
        .filter(|&r| spectrum.certifies(r, sol.phi_sdp, delta))
        .map(|r| r as f64 / delta);
    Ok(RoundingOutcome {
        certified_ratio: sweep.best_cut.sparsity / sol.phi_sdp,
        best_cut: sweep.best_cut,
        line_values: sweep.line_values,
        line_ratio: sweep.line_ratio,
        phi_sdp: sol.phi_sdp,
        r,
        delta,
        lambda_r,
        guarantee,
    })
}
