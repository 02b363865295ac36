use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use l22embed::embed::{build_embedding, distortion_report_with_tol, Method};
use l22embed::gen::{gen_instance, gen_pointset, GenParams, GeneratorKind, GeneratorSpec, WeightKind};
use l22embed::mvee::{goemans, DEFAULT_EPS};
use l22embed::points::{check_l22, difference_matrix, weighted_difference_matrix, PointSet, DEFAULT_L22_TOL};
use l22embed::round::{brute_force_sparsest_cut, round_sparsest_cut};
use l22embed::sdp::{solution_from_gram, solve_sdp, GramFile, SdpInstance, SolverOptions};
use l22embed::spectral::{generalized_eigs, svd_spectrum};
use l22embed::verify::{all_ok, verify_theorem_suite_with_tol};

use crate::artifact::Run;
use crate::{CliError, GlobalArgs};

type CmdResult = Result<(), CliError>;

fn parameters<A: Serialize>(g: &GlobalArgs, a: &A) -> Value {
    json!({ "global": g, "args": a })
}

fn l22_tol(g: &GlobalArgs) -> f64 {
    g.tol.unwrap_or(DEFAULT_L22_TOL)
}

fn solver_options(g: &GlobalArgs) -> SolverOptions {
    let mut opts = SolverOptions::default();
    if let Some(t) = g.tol {
        opts.tol = t;
    }
    if let Some(m) = g.max_iter {
        opts.max_iter = m;
    }
    opts
}

fn emit(text: &str) {
    print!("{text}");
}

fn read_points(run: &mut Run, path: &PathBuf, tol: f64) -> Result<PointSet, CliError> {
    let ps: PointSet = run.read(path)?;
    let report = check_l22(&ps, tol);
    if !report.ok {
        let (i, j, k) = report.worst_triple.unwrap_or_default();
        return Err(CliError::Verification(format!(
            "{}: not l2-squared at tol {tol:e}: triple ({i}, {j}, {k}) violates by {:e} (scale {:e})",
            path.display(),
            report.worst_violation,
            report.scale
        )));
    }
    Ok(ps.assume_l22())
}

fn read_instance(run: &mut Run, path: &PathBuf) -> Result<SdpInstance, CliError> {
    let inst: SdpInstance = run.read(path)?;
    Ok(SdpInstance::new(inst.cost, inst.demand)?)
}

fn parse_weight_kind(s: &str) -> Result<WeightKind, String> {
    match s {
        "uniform" => Ok(WeightKind::Uniform),
        "random" => Ok(WeightKind::Random),
        _ => Err(format!("expected `uniform` or `random`, got `{s}`")),
    }
}

fn parse_kind(s: &str) -> Result<GeneratorKind, String> {
    GeneratorKind::from_name(s).ok_or_else(|| {
        let names: Vec<_> = GeneratorKind::POINT_SETS
            .iter()
            .chain(GeneratorKind::INSTANCES.iter())
            .map(|k| k.name())
            .collect();
        format!("unknown kind `{s}`; expected one of {}", names.join(", "))
    })
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    /// hypercube_subset, simplex, line_sqrt, l1_embeddable, sdp_derived,
    /// cycle, complete, dumbbell or block_model
    #[arg(long, value_parser = parse_kind, required_unless_present = "spec")]
    kind: Option<GeneratorKind>,
    /// Generator spec file {"kind", "params", "seed"}; replaces the other flags
    #[arg(long, conflicts_with = "kind")]
    spec: Option<PathBuf>,
    /// Number of points or vertices (vertices per clique for dumbbell)
    #[arg(long)]
    n: Option<usize>,
    /// Dimension (hypercube_subset) or number of cuts (l1_embeddable)
    #[arg(long)]
    d: Option<usize>,
    /// Edge length of the simplex
    #[arg(long)]
    side: Option<f64>,
    /// Comma-separated line positions for line_sqrt
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    /// Number of blocks for block_model
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    intra: Option<f64>,
    #[arg(long)]
    inter: Option<f64>,
    /// Probability of each intra-block edge
    #[arg(long)]
    p_in: Option<f64>,
    /// Bridge weight for dumbbell
    #[arg(long)]
    bridge: Option<f64>,
    /// Cost weights: uniform or random
    #[arg(long, value_parser = parse_weight_kind)]
    weights: Option<WeightKind>,
    /// Demand weights: uniform or random
    #[arg(long, value_parser = parse_weight_kind)]
    demand: Option<WeightKind>,
}

pub fn gen(g: &GlobalArgs, a: &GenArgs) -> CmdResult {
    let mut run = Run::new(g.out.clone(), g.deterministic, "gen", parameters(g, a));
    let spec = match &a.spec {
        Some(path) => run.read::<GeneratorSpec>(path)?,
        None => GeneratorSpec {
            kind: a.kind.expect("clap enforces --kind or --spec"),
            params: GenParams {
                n: a.n,
                d: a.d,
                side: a.side,
                s: a.s.clone(),
                r: a.r,
                intra: a.intra,
                inter: a.inter,
                p_in: a.p_in,
                bridge: a.bridge,
                weights: a.weights,
                demand: a.demand,
            },
            seed: g.seed,
        },
    };
    let text = if spec.kind.is_point_set() {
        run.write("points.json", &gen_pointset(&spec)?)?
    } else {
        run.write("instance.json", &gen_instance(&spec)?)?
    };
    emit(&text);
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    /// Point set file
    points: PathBuf,
}

pub fn check(g: &GlobalArgs, a: &CheckArgs) -> CmdResult {
    let mut run = Run::new(g.out.clone(), g.deterministic, "check", parameters(g, a));
    let ps: PointSet = run.read(&a.points)?;
    let report = check_l22(&ps, l22_tol(g));
    emit(&run.write("check.json", &report)?);
    if report.ok {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "triple {:?} violates the l2-squared triangle inequality by {:e}",
            report.worst_triple.unwrap_or_default(),
            report.worst_violation
        )))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    /// Point set file
    #[arg(required_unless_present = "instance")]
    points: Option<PathBuf>,
    /// Instance file; adds the demand-weighted spectrum and the generalized
    /// eigenvalues of the cost/demand pencil
    #[arg(long)]
    instance: Option<PathBuf>,
}

pub fn spectrum(g: &GlobalArgs, a: &SpectrumArgs) -> CmdResult {
    let mut run = Run::new(g.out.clone(), g.deterministic, "spectrum", parameters(g, a));
    let inst = a.instance.as_ref().map(|p| read_instance(&mut run, p)).transpose()?;
    let mut out = serde_json::Map::new();
    if let Some(path) = &a.points {
        let ps: PointSet = run.read(path)?;
        let s = svd_spectrum(&difference_matrix(&ps))?;
        let mut v = serde_json::to_value(s.report()).expect("plain data");
        v["rank"] = json!(s.rank);
        v["frob_sq"] = json!(s.frob_sq);
        out.insert("difference".into(), v);
        if let Some(inst) = &inst {
            let s = svd_spectrum(&weighted_difference_matrix(&ps, &inst.demand)?)?;
            let mut v = serde_json::to_value(s.report()).expect("plain data");
            v["rank"] = json!(s.rank);
            v["frob_sq"] = json!(s.frob_sq);
            out.insert("weighted_difference".into(), v);
        }
    }
    if let Some(inst) = &inst {
        out.insert("generalized".into(), json!(generalized_eigs(&inst.cost, &inst.demand)?));
    }
    emit(&run.write("spectrum.json", &out)?);
    Ok(())
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Goemans,
    Sqlen,
    StableRank,
    #[value(name = "spectral-1d")]
    #[serde(rename = "spectral-1d")]
    Spectral1d,
    #[value(name = "demand-spectral-1d")]
    #[serde(rename = "demand-spectral-1d")]
    DemandSpectral1d,
    DemandSqlen,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Goemans => Method::GoemansMvee,
            MethodArg::Sqlen => Method::SquaredLength,
            MethodArg::StableRank => Method::StableRankPsd,
            MethodArg::Spectral1d => Method::Spectral1d,
            MethodArg::DemandSpectral1d => Method::DemandSpectral1d,
            MethodArg::DemandSqlen => Method::DemandSquaredLength,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EmbedArgs {
    /// Point set file
    points: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Instance file whose demand weights the demand-based methods and the
    /// weighted distortion report (default: unit demand)
    #[arg(long)]
    instance: Option<PathBuf>,
}

pub fn embed(g: &GlobalArgs, a: &EmbedArgs) -> CmdResult {
    let mut run = Run::new(g.out.clone(), g.deterministic, "embed", parameters(g, a));
    let inst = a.instance.as_ref().map(|p| read_instance(&mut run, p)).transpose()?;
    let ps = read_points(&mut run, &a.points, l22_tol(g))?;
    let demand = inst.as_ref().map(|i| &i.demand);
    let method = Method::from(a.method);
    let mut extra = serde_json::Map::new();
    let emb = if method == Method::GoemansMvee {
        let max_iter = g.max_iter.unwrap_or(l22embed::mvee::DEFAULT_MAX_ITER);
        let (ell, gm) = goemans(&ps, DEFAULT_EPS, max_iter)?;
        extra.insert("certified_distortion".into(), json!(gm.certified_distortion));
        extra.insert("mvee_converged".into(), json!(ell.converged));
        extra.insert("mvee_iterations".into(), json!(ell.iterations));
        extra.insert("d_eff".into(), json!(ell.d_eff));
        gm.operator
    } else {
        build_embedding(&ps, method, demand)?
    };
    let l22 = check_l22(&ps, l22_tol(g));
    let violation = if l22.scale > 0.0 { (l22.worst_violation / l22.scale).max(0.0) } else { 0.0 };
    let uniform = distortion_report_with_tol(&ps, &emb, None, violation)?;
    let mut report = json!({ "method": method, "uniform": uniform, "l22_violation": violation });
    if let Some(d) = demand {
        report["demand_weighted"] = json!(distortion_report_with_tol(&ps, &emb, Some(d), violation)?);
    }
    for (k, v) in extra {
        report[k] = v;
    }
    run.write("embedding.json", &emb)?;
    emit(&run.write("distortion.json", &report)?);
    if uniform.contraction_ok {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "embedding expands pair {:?} by {}",
            uniform.worst_expansion_pair.unwrap_or_default(),
            uniform.worst_expansion
        )))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SdpArgs {
    /// Instance file
    instance: PathBuf,
}

pub fn sdp(g: &GlobalArgs, a: &SdpArgs) -> CmdResult {
    let mut run = Run::new(g.out.clone(), g.deterministic, "sdp", parameters(g, a));
    let inst = read_instance(&mut run, &a.instance)?;
    let opts = solver_options(g);
    let sol = solve_sdp(&inst, &opts)?;
    run.write("gram.json", &sol.gram_file())?;
    run.write("points.json", &sol.points)?;
    run.write_lines("sdp_log.jsonl", &sol.log)?;
    let summary = json!({
        "phi_sdp": sol.phi_sdp,
        "converged": sol.converged,
        "iterations": sol.iterations,
        "tol": sol.tol,
        "residuals": sol.residuals,
        "points_validated": sol.points_validated(),
        "dim": sol.points.dim(),
    });
    emit(&run.write("sdp.json", &summary)?);
    if !sol.converged {
        return Err(CliError::Verification(format!(
            "solver stopped after {} iterations without converging",
            sol.iterations
        )));
    }
    if !sol.points_validated() {
        return Err(CliError::Verification(format!(
            "extracted points fail the l2-squared check (relative violation {:e})",
            sol.residuals.max_triangle_violation
        )));
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct RoundArgs {
    /// Instance file
    instance: PathBuf,
    /// Gram file from `sdp`; the SDP is solved when absent
    #[arg(long)]
    gram: Option<PathBuf>,
    /// Spectral slack delta in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Threshold rank r (default: smallest r certified by the generalized eigenvalues)
    #[arg(long)]
    r: Option<usize>,
}

/// Relative slack on the certified guarantee.
const GUARANTEE_SLACK: f64 = 1e-4;

pub fn round(g: &GlobalArgs, a: &RoundArgs) -> CmdResult {
    let mut run = Run::new(g.out.clone(), g.deterministic, "round", parameters(g, a));
    let inst = read_instance(&mut run, &a.instance)?;
    let opts = solver_options(g);
    let sol = match &a.gram {
        Some(path) => {
            let file: GramFile = run.read(path)?;
            solution_from_gram(&file, &inst, opts.tol)?
        }
        None => solve_sdp(&inst, &opts)?,
    };
    let outcome = round_sparsest_cut(&inst, &sol, a.delta, a.r)?;
    let mut v = json!(outcome.to_json());
    v["sdp_converged"] = json!(sol.converged);
    emit(&run.write("outcome.json", &v)?);
    if let Some(gamma) = outcome.guarantee {
        let limit = gamma * outcome.phi_sdp * (1.0 + GUARANTEE_SLACK);
        if outcome.best_cut.sparsity > limit {
            return Err(CliError::Verification(format!(
                "cut sparsity {} exceeds the certified bound {limit}",
                outcome.best_cut.sparsity
            )));
        }
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Point set file
    points: PathBuf,
    /// Instance file whose demand drives the demand-weighted items
    #[arg(long)]
    instance: Option<PathBuf>,
}

pub fn verify(g: &GlobalArgs, a: &VerifyArgs) -> CmdResult {
    let mut run = Run::new(g.out.clone(), g.deterministic, "verify", parameters(g, a));
    let inst = a.instance.as_ref().map(|p| read_instance(&mut run, p)).transpose()?;
    let ps: PointSet = run.read(&a.points)?;
    // The suite reports an l2-squared failure as an item rather than refusing.
    let ps = ps.assume_l22();
    let items = verify_theorem_suite_with_tol(&ps, inst.as_ref().map(|i| &i.demand), l22_tol(g));
    let ok = all_ok(&items);
    emit(&run.write("verify.json", &json!({ "items": items, "ok": ok }))?);
    if ok {
        Ok(())
    } else {
        let failed: Vec<_> = items.iter().filter(|c| !c.ok).map(|c| c.claim.as_str()).collect();
        Err(CliError::Verification(format!("failed items: {}", failed.join(", "))))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    /// Instance file
    instance: PathBuf,
}

pub fn oracle(g: &GlobalArgs, a: &OracleArgs) -> CmdResult {
    let mut run = Run::new(g.out.clone(), g.deterministic, "oracle", parameters(g, a));
    let inst = read_instance(&mut run, &a.instance)?;
    let best = brute_force_sparsest_cut(&inst.cost, &inst.demand)?;
    let v = json!({
        "cut": best.cut.members(),
        "phi": best.sparsity,
        "cut_cost": best.cut_cost,
        "cut_demand": best.cut_demand,
    });
    emit(&run.write("oracle.json", &v)?);
    Ok(())
}
