//! Machine-checkable verdicts for the inequalities the embeddings rely on.
//!
//! [`verify_key_lemma`] tests, for pairs of pairs `a = x_i - x_j`,
//! `b = x_k - x_l`,
//!
//! ```text
//! <a, b/|b|>^2  <=  |<a, b>|  <=  |a|^2
//! ```
//!
//! which holds on every l2-squared set. [`verify_theorem_suite`] runs every
//! embedding and compares the measured distortions with their bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{build_embedding, distortion_report, distortion_report_with_tol, Method, CONTRACTION_TOL};
use crate::error::Error;
use crate::graph::WeightedGraph;
use crate::mvee::{goemans, DEFAULT_EPS, DEFAULT_MAX_ITER};
use crate::pairs::{pair_count, pairs};
use crate::points::{check_l22, difference_matrix, weighted_difference_matrix, PointSet, DEFAULT_L22_TOL};
use crate::spectral::svd_spectrum;

/// Largest `n` checked exhaustively by [`verify_key_lemma`].
pub const KEY_LEMMA_EXHAUSTIVE_MAX_N: usize = 25;
pub const KEY_LEMMA_SAMPLES: usize = 100_000;
pub const KEY_LEMMA_SEED: u64 = 0x6b65_795f_6c65_6d6d;
pub const KEY_LEMMA_TOL: f64 = 1e-9;

/// Relative slack on the distortion bounds.
pub const BOUND_SLACK: f64 = 1e-6;
/// Relative tolerance of the spectral sum identity.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyLemmaReport {
    pub ok: bool,
    /// Largest excess of either inequality, unnormalized.
    pub worst_violation: f64,
    /// `((i, j), (k, l))` with `a = x_i - x_j`, `b = x_k - x_l`.
    pub worst: Option<((usize, usize), (usize, usize))>,
    pub checked: usize,
    pub exhaustive: bool,
    /// Largest squared distance; violations are judged against `tol * scale`.
    pub scale: f64,
    pub tol: f64,
}

fn key_lemma_excess(ps: &PointSet, a: (usize, usize), b: (usize, usize)) -> f64 {
    let va = ps.diff(a.0, a.1);
    let vb = ps.diff(b.0, b.1);
    let nb = vb.norm_squared();
    let dot = va.dot(&vb);
    let second = dot.abs() - va.norm_squared();
    if nb == 0.0 {
        return second;
    }
    (dot * dot / nb - dot.abs()).max(second)
}

/// Checks both inequalities over all ordered pairs of pairs when
/// `n <= 25`, and over a fixed seeded sample of 100000 otherwise.
pub fn verify_key_lemma(ps: &PointSet, tol: f64) -> KeyLemmaReport {
    let n = ps.len();
    let m = pair_count(n);
    let plist: Vec<(usize, usize)> = pairs(n).collect();
    let scale = ps.sq_dist_matrix().iter().fold(0.0f64, |s, x| s.max(*x));
    let exhaustive = n <= KEY_LEMMA_EXHAUSTIVE_MAX_N;
    let candidates: Vec<(usize, usize)> = if exhaustive {
        (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(KEY_LEMMA_SEED);
        (0..KEY_LEMMA_SAMPLES).map(|_| (rng.gen_range(0..m), rng.gen_range(0..m))).collect()
    };
    let worst = candidates
        .par_iter()
        .map(|&(a, b)| (key_lemma_excess(ps, plist[a], plist[b]), a, b))
        .reduce_with(|x, y| match x.0.total_cmp(&y.0) {
            std::cmp::Ordering::Greater => x,
            std::cmp::Ordering::Less => y,
            std::cmp::Ordering::Equal => {
                if (x.1, x.2) <= (y.1, y.2) {
                    x
                } else {
                    y
                }
            }
        });
    let (worst_violation, worst) = match worst {
        Some((v, a, b)) => (v, Some((plist[a], plist[b]))),
        None => (0.0, None),
    };
    KeyLemmaReport {
        ok: worst_violation <= tol * scale,
        worst_violation,
        worst,
        checked: candidates.len(),
        exhaustive,
        scale,
        tol,
    }
}

/// One verdict of the theorem suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub claim: String,
    /// `null` when the item could not be evaluated.
    pub measured: Option<f64>,
    pub bound: f64,
    pub ok: bool,
    pub witness: Option<String>,
}

impl ClaimResult {
    fn upper(claim: impl Into<String>, measured: f64, bound: f64, witness: Option<String>) -> Self {
        Self {
            claim: claim.into(),
            measured: Some(measured),
            bound,
            ok: measured <= bound,
            witness,
        }
    }

    fn failed(claim: impl Into<String>, bound: f64, err: &Error) -> Self {
        Self {
            claim: claim.into(),
            measured: None,
            bound,
            ok: false,
            witness: Some(err.to_string()),
        }
    }
}

pub fn all_ok(items: &[ClaimResult]) -> bool {
    items.iter().all(|c| c.ok)
}

fn pair_witness(p: Option<(usize, usize)>) -> Option<String> {
    p.map(|(i, j)| format!("pair ({i}, {j})"))
}

/// Runs every embedding on `ps` and reports each bound as a separate item.
/// Demand-weighted items use `demand`, or unit demand when it is absent.
/// A failing item never stops the remaining ones.
pub fn verify_theorem_suite(ps: &PointSet, demand: Option<&WeightedGraph>) -> Vec<ClaimResult> {
    verify_theorem_suite_with_tol(ps, demand, DEFAULT_L22_TOL)
}

/// [`verify_theorem_suite`] with the l2-squared and key-lemma items judged
/// at relative tolerance `tol` (never tighter than the defaults).
pub fn verify_theorem_suite_with_tol(ps: &PointSet, demand: Option<&WeightedGraph>, tol: f64) -> Vec<ClaimResult> {
    let l22_tol = tol.max(DEFAULT_L22_TOL);
    let lemma_tol = tol.max(KEY_LEMMA_TOL);
    let mut items = Vec::new();
    let uniform;
    let demand = match demand {
        Some(d) => d,
        None => match WeightedGraph::complete(ps.len(), 1.0) {
            Ok(g) => {
                uniform = g;
                &uniform
            }
            Err(e) => return vec![ClaimResult::failed("demand", 0.0, &e)],
        },
    };

    let l22 = check_l22(ps, l22_tol);
    let witness = l22.worst_triple.map(|(i, j, k)| format!("triple ({i}, {j}, {k})"));
    let rel = if l22.scale > 0.0 { l22.worst_violation / l22.scale } else { 0.0 };
    items.push(ClaimResult::upper("l22_triangle", rel, l22_tol, witness));
    let violation = rel.max(0.0);

    let kl = verify_key_lemma(ps, lemma_tol);
    let rel = if kl.scale > 0.0 { kl.worst_violation / kl.scale } else { 0.0 };
    let witness = kl.worst.map(|(a, b)| format!("pairs {a:?} and {b:?}"));
    items.push(ClaimResult::upper("key_lemma", rel, lemma_tol, witness));

    let spectrum = svd_spectrum(&difference_matrix(ps));
    let d_eff = spectrum.as_ref().map_or(0, |s| s.rank) as f64;

    for method in Method::ALL {
        let claim = format!("contraction/{method}");
        let bound = 1.0 + CONTRACTION_TOL;
        match build_embedding(ps, method, Some(demand)).and_then(|e| distortion_report_with_tol(ps, &e, None, violation)) {
            Ok(r) => {
                let mut item = ClaimResult::upper(claim, r.worst_expansion, bound, pair_witness(r.worst_expansion_pair));
                if !item.ok && r.contraction_ok {
                    item.ok = true;
                    item.witness = Some(format!(
                        "within additive slack {:e} from l2-squared violation {violation:e}",
                        r.contraction_slack
                    ));
                }
                items.push(item);
            }
            Err(e) => items.push(ClaimResult::failed(claim, bound, &e)),
        }
    }

    match &spectrum {
        Ok(s) => {
            let bound = s.stable_rank * (1.0 + BOUND_SLACK);
            let claim = "average_distortion/stable_rank_psd";
            match build_embedding(ps, Method::StableRankPsd, None).and_then(|e| distortion_report(ps, &e, None)) {
                Ok(r) => items.push(ClaimResult::upper(claim, r.average_distortion, bound, None)),
                Err(e) => items.push(ClaimResult::failed(claim, bound, &e)),
            }

            let claim = "spectral_sum_identity/spectral_1d";
            let sigma_sq = s.sigma_top().powi(2);
            match build_embedding(ps, Method::Spectral1d, None).and_then(|e| e.line_values(ps)) {
                Ok(y) => {
                    let total: f64 = pairs(ps.len()).map(|(i, j)| (y[i] - y[j]).abs()).sum();
                    let rel = (total - sigma_sq).abs() / sigma_sq;
                    items.push(ClaimResult::upper(claim, rel, IDENTITY_TOL, Some(format!("sum {total}, sigma_1^2 {sigma_sq}"))));
                }
                Err(e) => items.push(ClaimResult::failed(claim, IDENTITY_TOL, &e)),
            }
        }
        Err(e) => {
            items.push(ClaimResult::failed("average_distortion/stable_rank_psd", 0.0, e));
            items.push(ClaimResult::failed("spectral_sum_identity/spectral_1d", IDENTITY_TOL, e));
        }
    }

    let claim = "worst_case_distortion/goemans_mvee";
    let bound = ((1.0 + DEFAULT_EPS) * d_eff).sqrt() * (1.0 + CONTRACTION_TOL);
    match goemans(ps, DEFAULT_EPS, DEFAULT_MAX_ITER).and_then(|(ell, g)| {
        let r = distortion_report(ps, &g.operator, None)?;
        Ok((ell, r))
    }) {
        Ok((ell, r)) => {
            let mut item = ClaimResult::upper(claim, r.worst_case_distortion, bound, pair_witness(r.worst_distortion_pair));
            if !ell.converged {
                item.ok = false;
                item.witness = Some(format!("MVEE stopped after {} iterations without converging", ell.iterations));
            }
            items.push(item);
        }
        Err(e) => items.push(ClaimResult::failed(claim, bound, &e)),
    }

    let bound = d_eff.sqrt() * (1.0 + BOUND_SLACK);
    let claim = "average_distortion/squared_length";
    match build_embedding(ps, Method::SquaredLength, None).and_then(|e| distortion_report(ps, &e, None)) {
        Ok(r) => items.push(ClaimResult::upper(claim, r.average_distortion, bound, None)),
        Err(e) => items.push(ClaimResult::failed(claim, bound, &e)),
    }
    let claim = "demand_average_distortion/demand_squared_length";
    match build_embedding(ps, Method::DemandSquaredLength, Some(demand)).and_then(|e| distortion_report(ps, &e, Some(demand))) {
        Ok(r) => items.push(ClaimResult::upper(claim, r.average_distortion, bound, None)),
        Err(e) => items.push(ClaimResult::failed(claim, bound, &e)),
    }

    let claim = "demand_average_distortion/demand_spectral_1d";
    match weighted_difference_matrix(ps, demand).and_then(|m| svd_spectrum(&m)) {
        Ok(s) => {
            let bound = s.stable_rank * (1.0 + BOUND_SLACK);
            match build_embedding(ps, Method::DemandSpectral1d, Some(demand))
                .and_then(|e| distortion_report(ps, &e, Some(demand)))
            {
                Ok(r) => items.push(ClaimResult::upper(claim, r.average_distortion, bound, None)),
                Err(e) => items.push(ClaimResult::failed(claim, bound, &e)),
            }
        }
        Err(e) => items.push(ClaimResult::failed(claim, 0.0, &e)),
    }
    items
}
