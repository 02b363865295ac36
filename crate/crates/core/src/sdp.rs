//! First-order solver for the Sparsest Cut semidefinite relaxation
//!
//! ```text
//! minimize   sum_ij c_ij |x_i - x_j|^2
//! subject to |x_i - x_j|^2 + |x_j - x_k|^2 >= |x_i - x_k|^2   for all i, j, k
//!            sum_kl d_kl |x_k - x_l|^2 = 1
//! ```
//!
//! Vertex 0 is pinned at the origin, so the unknown is the Gram matrix `Y`
//! of `x_1 - x_0, ..., x_{n-1} - x_0`, kept in scaled half-vectorized form
//! (`svec`, off-diagonals times `sqrt 2`). Every squared distance is linear
//! in `svec(Y)`. The problem `min q^T y  s.t.  A y in C` with
//! `C = {1} x (R_-)^T x PSD` is solved by operator splitting in the style of
//! OSQP/COSMO: one cached Cholesky factorization of
//! `sigma I + A^T R A` per penalty value, a cheap sparse product for the
//! `3 C(n,3)` triangle rows, and an eigenvalue projection onto the PSD cone.

use std::path::Path;

use log::debug;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::{sym_eigen, RANK_CUTOFF};
use crate::mvee::matrix_rows;
use crate::pairs::pairs;
use crate::points::{check_l22, L22Report, PointSet};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 200_000;
pub const DEFAULT_N_CAP: usize = 40;

/// Residual triangle violations up to this multiple of the solver tolerance
/// are accepted on extracted points.
pub const TRIANGLE_SLACK_FACTOR: f64 = 10.0;

/// A Sparsest Cut instance: cost and demand graphs on the same vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpInstance {
    pub cost: WeightedGraph,
    pub demand: WeightedGraph,
}

impl SdpInstance {
    pub fn new(cost: WeightedGraph, demand: WeightedGraph) -> Result<Self> {
        Self::with_cap(cost, demand, DEFAULT_N_CAP)
    }

    pub fn with_cap(cost: WeightedGraph, demand: WeightedGraph, cap: usize) -> Result<Self> {
        if cost.n() != demand.n() {
            return Err(Error::DimensionMismatch(format!(
                "cost graph on {} vertices, demand graph on {}",
                cost.n(),
                demand.n()
            )));
        }
        if cost.n() > cap {
            return Err(invalid(format!("instance has {} vertices, cap is {cap}", cost.n())));
        }
        Ok(Self { cost, demand })
    }

    pub fn n(&self) -> usize {
        self.cost.n()
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Ok(Self {
            cost: self.cost.permuted(perm)?,
            demand: self.demand.permuted(perm)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Record a log entry every this many iterations (0 disables the log).
    pub log_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            log_every: 500,
        }
    }
}

/// One line of the solver log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub iter: usize,
    pub objective: f64,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Largest triangle violation divided by the largest squared distance.
    pub max_triangle_violation: f64,
    /// `|sum_kl d_kl |x_k - x_l|^2 - 1|`.
    pub normalization_error: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Centered Gram matrix `X` of the point configuration.
    pub gram: DMatrix<f64>,
    pub points: PointSet,
    pub phi_sdp: f64,
    pub residuals: Residuals,
    pub converged: bool,
    pub iterations: usize,
    pub tol: f64,
    pub log: Vec<LogEntry>,
}

impl SdpSolution {
    /// Whether the extracted points passed the l2-squared check at
    /// `TRIANGLE_SLACK_FACTOR * tol`.
    pub fn points_validated(&self) -> bool {
        self.points.is_validated()
    }

    pub fn gram_file(&self) -> GramFile {
        GramFile {
            n: self.gram.nrows(),
            x: self.gram.clone(),
            phi_sdp: self.phi_sdp,
        }
    }
}

/// On-disk form of a solution: `{"n", "X", "phi_sdp"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramFile {
    pub n: usize,
    #[serde(rename = "X", with = "matrix_rows")]
    pub x: DMatrix<f64>,
    pub phi_sdp: f64,
}

/// `sum_ij w_ij (X_ii + X_jj - 2 X_ij)`.
pub fn gram_pair_sum(gram: &DMatrix<f64>, g: &WeightedGraph) -> f64 {
    pairs(g.n())
        .enumerate()
        .map(|(k, (i, j))| g.weight_at(k) * (gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)]))
        .sum()
}

/// Points `x_i` = rows of `V Lambda^{1/2}` over the numerically nonzero
/// eigenpairs of `gram`. The set is flagged as l2-squared when it passes
/// [`check_l22`] at `tol`.
pub fn extract_points(gram: &DMatrix<f64>, tol: f64) -> Result<(PointSet, L22Report)> {
    let n = gram.nrows();
    let (vals, vecs) = sym_eigen(gram);
    let top = vals.iter().fold(0.0f64, |m, x| m.max(*x));
    let keep: Vec<usize> = (0..n).rev().filter(|&k| vals[k] > RANK_CUTOFF * top).collect();
    if keep.is_empty() {
        return Err(Error::Degenerate("Gram matrix is zero".into()));
    }
    let coords = DMatrix::from_fn(n, keep.len(), |i, c| vecs[(i, keep[c])] * vals[keep[c]].sqrt());
    let ps = PointSet::new(coords)?;
    let report = check_l22(&ps, tol);
    let ps = if report.ok { ps.assume_l22() } else { ps };
    Ok((ps, report))
}

fn centered(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let j = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let x = &j * g * &j;
    (&x + x.transpose()) * 0.5
}

fn assemble(inst: &SdpInstance, gram: DMatrix<f64>, tol: f64) -> Result<SdpSolution> {
    let norm = gram_pair_sum(&gram, &inst.demand);
    if !(norm > 0.0) {
        return Err(Error::Degenerate("solution separates no demand".into()));
    }
    let gram = centered(&(gram / norm));
    let phi_sdp = gram_pair_sum(&gram, &inst.cost);
    let (points, report) = extract_points(&gram, TRIANGLE_SLACK_FACTOR * tol)?;
    let (vals, _) = sym_eigen(&gram);
    let residuals = Residuals {
        max_triangle_violation: if report.scale > 0.0 {
            report.worst_violation.max(0.0) / report.scale
        } else {
            0.0
        },
        normalization_error: (gram_pair_sum(&gram, &inst.demand) - 1.0).abs(),
        min_eigenvalue: vals[0],
    };
    Ok(SdpSolution {
        gram,
        points,
        phi_sdp,
        residuals,
        converged: false,
        iterations: 0,
        tol,
        log: Vec::new(),
    })
}

/// Sparse row over `svec` coordinates.
type Row = Vec<(usize, f64)>;

struct Layout {
    p: usize,
}

impl Layout {
    fn len(&self) -> usize {
        self.p * (self.p + 1) / 2
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * (2 * self.p - i + 1) / 2 + (j - i)
    }

    /// `|x_a - x_b|^2` as a functional of `svec(Y)`, vertex 0 at the origin.
    fn distance(&self, a: usize, b: usize, scale: f64, out: &mut Row) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if a == 0 {
            out.push((self.idx(b - 1, b - 1), scale));
        } else {
            out.push((self.idx(a - 1, a - 1), scale));
            out.push((self.idx(b - 1, b - 1), scale));
            out.push((self.idx(a - 1, b - 1), -std::f64::consts::SQRT_2 * scale));
        }
    }

    fn unsvec(&self, y: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.p, self.p);
        for i in 0..self.p {
            for j in i..self.p {
                let v = y[self.idx(i, j)];
                if i == j {
                    m[(i, i)] = v;
                } else {
                    m[(i, j)] = v / std::f64::consts::SQRT_2;
                    m[(j, i)] = v / std::f64::consts::SQRT_2;
                }
            }
        }
        m
    }

    fn svec(&self, m: &DMatrix<f64>, out: &mut [f64]) {
        for i in 0..self.p {
            for j in i..self.p {
                out[self.idx(i, j)] = if i == j {
                    m[(i, i)]
                } else {
                    0.5 * (m[(i, j)] + m[(j, i)]) * std::f64::consts::SQRT_2
                };
            }
        }
    }
}

fn compact(mut row: Row) -> Row {
    row.sort_by_key(|e| e.0);
    let mut out: Row = Vec::with_capacity(row.len());
    for (k, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += v,
            _ => out.push((k, v)),
        }
    }
    out.retain(|e| e.1 != 0.0);
    out
}

fn dot(row: &Row, x: &[f64]) -> f64 {
    row.iter().map(|&(k, v)| v * x[k]).sum()
}

fn project_psd(layout: &Layout, v: &[f64], out: &mut [f64]) {
    let m = layout.unsvec(v);
    let eig = SymmetricEigen::new(m);
    let clamped = eig.eigenvalues.map(|x| x.max(0.0));
    let proj = &eig.eigenvectors * DMatrix::from_diagonal(&clamped) * eig.eigenvectors.transpose();
    layout.svec(&proj, out);
}

struct Problem {
    layout: Layout,
    q: Vec<f64>,
    /// Equality row (unit norm) and its right-hand side.
    eq: Row,
    eq_rhs: f64,
    /// Triangle rows `D_ik - D_ij - D_jk <= 0`, unit norm.
    tri: Vec<Row>,
}

impl Problem {
    fn build(inst: &SdpInstance) -> Self {
        let n = inst.n();
        let layout = Layout { p: n - 1 };
        let total_cost = inst.cost.total_weight();
        let total_demand = inst.demand.total_weight();

        let mut obj = Row::new();
        let mut eq = Row::new();
        for (k, (i, j)) in pairs(n).enumerate() {
            let c = inst.cost.weight_at(k);
            if c != 0.0 {
                layout.distance(i, j, c / total_cost, &mut obj);
            }
            let d = inst.demand.weight_at(k);
            if d != 0.0 {
                layout.distance(i, j, d / total_demand, &mut eq);
            }
        }
        let mut q = vec![0.0; layout.len()];
        for (k, v) in compact(obj) {
            q[k] += v;
        }
        let eq = compact(eq);
        let eq_norm = eq.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
        let eq: Row = eq.into_iter().map(|(k, v)| (k, v / eq_norm)).collect();

        let mut tri = Vec::with_capacity(n * (n - 1) * (n - 2) / 2);
        for (i, k) in pairs(n) {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let mut row = Row::new();
                layout.distance(i, k, 1.0, &mut row);
                layout.distance(i, j, -1.0, &mut row);
                layout.distance(j, k, -1.0, &mut row);
                let row = compact(row);
                let norm = row.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
                tri.push(row.into_iter().map(|(c, v)| (c, v / norm)).collect());
            }
        }
        Self {
            layout,
            q,
            eq,
            eq_rhs: 1.0 / eq_norm,
            tri,
        }
    }
}

/// Penalty weights per constraint block.
#[derive(Clone, Copy)]
struct Penalty {
    rho: f64,
}

impl Penalty {
    const EQ_FACTOR: f64 = 1e3;

    fn eq(self) -> f64 {
        self.rho * Self::EQ_FACTOR
    }
}

const SIGMA: f64 = 1e-6;
const ALPHA: f64 = 1.6;
const RHO_MIN: f64 = 1e-6;
const RHO_MAX: f64 = 1e6;

fn factor(pb: &Problem, pen: Penalty) -> Cholesky<f64, Dyn> {
    let nv = pb.layout.len();
    let mut k = DMatrix::<f64>::identity(nv, nv) * (SIGMA + pen.rho);
    let mut add = |row: &Row, w: f64| {
        for &(a, va) in row {
            for &(b, vb) in row {
                k[(a, b)] += w * va * vb;
            }
        }
    };
    add(&pb.eq, pen.eq());
    for row in &pb.tri {
        add(row, pen.rho);
    }
    Cholesky::new(k).expect("sigma I + A^T R A is positive definite")
}

/// Solves the relaxation of `inst`. The returned solution is flagged
/// `converged = false` when the iteration cap is hit first.
pub fn solve_sdp(inst: &SdpInstance, opts: &SolverOptions) -> Result<SdpSolution> {
    if !(opts.tol > 0.0) {
        return Err(invalid(format!("tol must be positive, got {}", opts.tol)));
    }
    let n = inst.n();
    if inst.demand.total_weight() <= 0.0 {
        return Err(invalid("demand graph has zero total weight"));
    }
    let pb = Problem::build(inst);
    let nv = pb.layout.len();
    let nt = pb.tri.len();
    let total_cost = inst.cost.total_weight();
    let total_demand = inst.demand.total_weight();
    let objective_of = |x: &[f64]| -> f64 {
        pb.q.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() * total_cost / total_demand
    };

    // Regular simplex: Y = (I + 11^T) / 2 in scaled units has all squared
    // distances 1, hence unit normalization.
    let p = pb.layout.p;
    let y0 = (DMatrix::<f64>::identity(p, p) + DMatrix::from_element(p, p, 1.0)) * 0.5;
    let mut x = vec![0.0; nv];
    pb.layout.svec(&y0, &mut x);
    let norm0 = dot(&pb.eq, &x) / pb.eq_rhs;
    x.iter_mut().for_each(|v| *v /= norm0);

    // z and the dual y, split by block: eq (1), triangles (nt), psd (nv).
    let mut z_eq = pb.eq_rhs;
    let mut z_tri: Vec<f64> = pb.tri.iter().map(|r| dot(r, &x).min(0.0)).collect();
    let mut z_psd = x.clone();
    let mut y_eq = 0.0;
    let mut y_tri = vec![0.0; nt];
    let mut y_psd = vec![0.0; nv];

    let mut pen = Penalty { rho: 0.1 };
    let mut chol = factor(&pb, pen);
    let eps = 0.05 * opts.tol;

    let mut log = Vec::new();
    let mut converged = false;
    let mut iter = 0;
    let mut rhs = DVector::zeros(nv);
    let mut scratch = vec![0.0; nv];
    let mut history: Vec<f64> = Vec::new();
    const WINDOW: usize = 200;
    const CHECK_EVERY: usize = 10;
    const ADAPT_EVERY: usize = 100;

    while iter < opts.max_iter {
        iter += 1;
        // rhs = sigma x - q + A^T (R z - y)
        for k in 0..nv {
            rhs[k] = SIGMA * x[k] - pb.q[k] + (pen.rho * z_psd[k] - y_psd[k]);
        }
        let w_eq = pen.eq() * z_eq - y_eq;
        for &(k, v) in &pb.eq {
            rhs[k] += v * w_eq;
        }
        for (row, (&zt, &yt)) in pb.tri.iter().zip(z_tri.iter().zip(&y_tri)) {
            let w = pen.rho * zt - yt;
            for &(k, v) in row {
                rhs[k] += v * w;
            }
        }
        let xt = chol.solve(&rhs);

        // Relaxed updates, projections and dual ascent per block.
        for k in 0..nv {
            x[k] = ALPHA * xt[k] + (1.0 - ALPHA) * x[k];
        }
        let zt_eq = dot(&pb.eq, xt.as_slice());
        let relaxed = ALPHA * zt_eq + (1.0 - ALPHA) * z_eq;
        let new_eq = pb.eq_rhs;
        y_eq += pen.eq() * (relaxed - new_eq);
        z_eq = new_eq;

        for (t, row) in pb.tri.iter().enumerate() {
            let relaxed = ALPHA * dot(row, xt.as_slice()) + (1.0 - ALPHA) * z_tri[t];
            let znew = (relaxed + y_tri[t] / pen.rho).min(0.0);
            y_tri[t] += pen.rho * (relaxed - znew);
            z_tri[t] = znew;
        }

        for k in 0..nv {
            scratch[k] = ALPHA * xt[k] + (1.0 - ALPHA) * z_psd[k];
        }
        let shifted: Vec<f64> = scratch.iter().zip(&y_psd).map(|(r, y)| r + y / pen.rho).collect();
        let mut znew = vec![0.0; nv];
        project_psd(&pb.layout, &shifted, &mut znew);
        for k in 0..nv {
            y_psd[k] += pen.rho * (scratch[k] - znew[k]);
        }
        z_psd = znew;

        if iter % CHECK_EVERY != 0 && iter != opts.max_iter {
            continue;
        }

        // Residuals of the current (x, z, y).
        let ax_eq = dot(&pb.eq, &x);
        let mut prim = (ax_eq - z_eq).abs();
        let mut ax_norm = ax_eq.abs().max(z_eq.abs());
        for (t, row) in pb.tri.iter().enumerate() {
            let v = dot(row, &x);
            prim = prim.max((v - z_tri[t]).abs());
            ax_norm = ax_norm.max(v.abs()).max(z_tri[t].abs());
        }
        for k in 0..nv {
            prim = prim.max((x[k] - z_psd[k]).abs());
            ax_norm = ax_norm.max(x[k].abs()).max(z_psd[k].abs());
        }
        let mut aty = y_psd.clone();
        for &(k, v) in &pb.eq {
            aty[k] += v * y_eq;
        }
        for (row, &yt) in pb.tri.iter().zip(&y_tri) {
            for &(k, v) in row {
                aty[k] += v * yt;
            }
        }
        let aty_norm = aty.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let q_norm = pb.q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dual = aty.iter().zip(&pb.q).fold(0.0f64, |m, (a, q)| m.max((a + q).abs()));

        let objective = objective_of(&x);
        history.push(objective);
        if opts.log_every > 0 && iter % opts.log_every == 0 {
            log.push(LogEntry {
                iter,
                objective,
                max_residual: prim,
            });
        }

        let prim_ok = prim <= eps + eps * ax_norm;
        let dual_ok = dual <= eps + eps * aty_norm.max(q_norm);
        let steps = WINDOW / CHECK_EVERY;
        let stalled = history.len() > steps && {
            let past = history[history.len() - 1 - steps];
            (objective - past).abs() <= opts.tol * objective.abs().max(1.0)
        };
        if prim_ok && dual_ok && stalled {
            converged = true;
            break;
        }

        if iter % ADAPT_EVERY == 0 {
            let prim_rel = prim / ax_norm.max(1e-30);
            let dual_rel = dual / aty_norm.max(q_norm).max(1e-30);
            let ratio = (prim_rel / dual_rel.max(1e-30)).sqrt();
            if !(0.2..=5.0).contains(&ratio) {
                let rho = (pen.rho * ratio).clamp(RHO_MIN, RHO_MAX);
                if rho != pen.rho {
                    debug!("iter {iter}: rho {} -> {rho}", pen.rho);
                    pen.rho = rho;
                    chol = factor(&pb, pen);
                }
            }
        }
    }

    let final_objective = objective_of(&z_psd);
    let max_residual = pb
        .tri
        .iter()
        .map(|r| dot(r, &z_psd).max(0.0))
        .fold((dot(&pb.eq, &z_psd) - pb.eq_rhs).abs(), f64::max);
    if opts.log_every > 0 {
        log.push(LogEntry {
            iter,
            objective: final_objective,
            max_residual,
        });
    }

    // Lift the projected (exactly PSD) iterate back to an n x n Gram matrix.
    let ymat = pb.layout.unsvec(&z_psd);
    let mut gram = DMatrix::zeros(n, n);
    gram.view_mut((1, 1), (p, p)).copy_from(&ymat);
    let mut sol = assemble(inst, gram, opts.tol)?;
    sol.converged = converged;
    sol.iterations = iter;
    sol.log = log;
    Ok(sol)
}

/// Reads a Gram file and re-verifies every solution invariant against
/// `inst`. Nothing stored in the file beyond `X` is trusted.
pub fn load_solution(path: &Path, inst: &SdpInstance, tol: f64) -> Result<SdpSolution> {
    let file: GramFile = crate::io::read_json(path)?;
    solution_from_gram(&file, inst, tol)
}

pub fn solution_from_gram(file: &GramFile, inst: &SdpInstance, tol: f64) -> Result<SdpSolution> {
    let n = inst.n();
    let x = &file.x;
    if file.n != n || x.nrows() != n || x.ncols() != n {
        return Err(invalid(format!(
            "field `X` must be {n} x {n} (field `n` = {}, X is {} x {})",
            file.n,
            x.nrows(),
            x.ncols()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(invalid("field `X` has non-finite entries"));
    }
    let scale = x.amax().max(f64::MIN_POSITIVE);
    if (x - x.transpose()).amax() > 1e-12 * scale {
        return Err(Error::ConstraintViolated("X is not symmetric".into()));
    }
    let (vals, _) = sym_eigen(x);
    if vals[0] < -1e-8 * vals[n - 1].abs().max(scale) {
        return Err(Error::ConstraintViolated(format!(
            "X is not positive semidefinite (min eigenvalue {:e})",
            vals[0]
        )));
    }
    let norm = gram_pair_sum(x, &inst.demand);
    if (norm - 1.0).abs() > TRIANGLE_SLACK_FACTOR * tol {
        return Err(Error::ConstraintViolated(format!(
            "demand normalization is {norm}, expected 1"
        )));
    }
    let objective = gram_pair_sum(x, &inst.cost);
    if (objective - file.phi_sdp).abs() > 1e-8 * objective.abs().max(1.0) {
        return Err(Error::ConstraintViolated(format!(
            "field `phi_sdp` = {} but the objective of X is {objective}",
            file.phi_sdp
        )));
    }
    let (points, report) = extract_points(x, TRIANGLE_SLACK_FACTOR * tol)?;
    if !report.ok {
        let (i, j, k) = report.worst_triple.unwrap_or_default();
        return Err(Error::ConstraintViolated(format!(
            "triangle inequality on ({i}, {j}, {k}) violated by {:e}",
            report.worst_violation
        )));
    }
    Ok(SdpSolution {
        gram: x.clone(),
        points,
        phi_sdp: objective,
        residuals: Residuals {
            max_triangle_violation: if report.scale > 0.0 {
                report.worst_violation.max(0.0) / report.scale
            } else {
                0.0
            },
            normalization_error: (norm - 1.0).abs(),
            min_eigenvalue: vals[0],
        },
        converged: true,
        iterations: 0,
        tol,
        log: Vec::new(),
    })
}

pub fn save_solution(path: &Path, sol: &SdpSolution) -> Result<()> {
    crate::io::write_json(path, &sol.gram_file())
}

/// Gram matrix of the scaled indicator configuration of `cut`: feasible for
/// the relaxation with objective equal to the cut's sparsity.
pub fn cut_gram(cut: &crate::graph::Cut, demand: &WeightedGraph) -> Result<DMatrix<f64>> {
    let n = cut.n();
    let inside = cut.indicator();
    let separated: f64 = pairs(n)
        .enumerate()
        .filter(|(_, (i, j))| inside[*i] != inside[*j])
        .map(|(k, _)| demand.weight_at(k))
        .sum();
    if !(separated > 0.0) {
        return Err(Error::Degenerate("cut separates no demand".into()));
    }
    let s = 1.0 / separated.sqrt();
    let v = DVector::from_iterator(n, inside.iter().map(|&b| if b { s } else { 0.0 }));
    Ok(centered(&(&v * v.transpose())))
}
