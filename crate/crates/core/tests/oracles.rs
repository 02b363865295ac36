//! Hand-computed input/output pairs for every public operation.

use l22embed::embed::*;
use l22embed::gen::*;
use l22embed::graph::{cut_sparsity, Cut, WeightedGraph};
use l22embed::mvee::{goemans, goemans_embedding, mvee_centered, DEFAULT_EPS, DEFAULT_MAX_ITER};
use l22embed::pairs::{pair_index, pairs};
use l22embed::points::*;
use l22embed::round::*;
use l22embed::sdp::*;
use l22embed::spectral::*;
use l22embed::Error;
use nalgebra::{DMatrix, DVector};

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn pts(rows: &[&[f64]]) -> PointSet {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    PointSet::from_rows(&rows).unwrap()
}

/// Unit square in the order (0,0), (1,0), (0,1), (1,1).
fn square() -> PointSet {
    pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]).validated(0.0).unwrap()
}

fn triangle() -> PointSet {
    pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 3f64.sqrt() / 2.0]]).validated(1e-12).unwrap()
}

fn two_points() -> PointSet {
    pts(&[&[0.0, 1.0], &[3.0, -3.0]]).validated(0.0).unwrap()
}

fn cycle(n: usize) -> WeightedGraph {
    let edges: Vec<_> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n), 1.0)).collect();
    WeightedGraph::from_edges(n, &edges).unwrap()
}

fn complete(n: usize) -> WeightedGraph {
    WeightedGraph::complete(n, 1.0).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---------------------------------------------------------------- core

#[test]
fn pair_index_examples() {
    assert_eq!(pair_index(0, 1, 4).unwrap(), 0);
    assert_eq!(pair_index(0, 3, 4).unwrap(), 2);
    assert_eq!(pair_index(2, 3, 4).unwrap(), 5);
    assert!(pair_index(2, 2, 4).is_err());
    assert!(pair_index(3, 1, 4).is_err());
    assert!(pair_index(1, 4, 4).is_err());
}

#[test]
fn check_l22_examples() {
    assert!(check_l22(&square(), 0.0).ok);

    let line = pts(&[&[0.0], &[1.0], &[2.0]]);
    let r = check_l22(&line, DEFAULT_L22_TOL);
    assert!(!r.ok);
    assert_eq!(r.worst_violation, 2.0);
    assert_eq!(r.worst_triple, Some((0, 1, 2)));

    assert!(check_l22(&pts(&[&[5.0, -1.0], &[2.0, 7.0]]), 0.0).ok);
    assert!(check_l22(&pts(&[&[1.0], &[1.0], &[1.0]]), 0.0).ok);
}

#[test]
fn difference_matrix_examples() {
    let m = difference_matrix(&pts(&[&[0.0], &[3.0]]));
    assert_eq!(m.ncols(), 1);
    assert_eq!(m.column(0)[0], -3.0);

    let ps = square();
    let m = difference_matrix(&ps);
    assert_eq!(m.ncols(), 6);
    assert_eq!(m.frob_sq(), 8.0);
    for (k, (i, j)) in pairs(4).enumerate() {
        assert_eq!(m.column(k), ps.diff(i, j));
    }
}

#[test]
fn weighted_difference_matrix_examples() {
    let ps = square();
    let w = weighted_difference_matrix(&ps, &complete(4)).unwrap();
    assert_eq!(w.matrix(), difference_matrix(&ps).matrix());

    let single = WeightedGraph::from_edges(4, &[(1, 2, 4.0)]).unwrap();
    let w = weighted_difference_matrix(&ps, &single).unwrap();
    let k = pair_index(1, 2, 4).unwrap();
    assert_eq!(w.column(k), ps.diff(1, 2) * 2.0);
    for c in (0..6).filter(|&c| c != k) {
        assert_eq!(w.column(c).norm(), 0.0);
    }

    let demand = WeightedGraph::from_edges(4, &[(0, 1, 2.0), (0, 3, 0.5), (2, 3, 3.0)]).unwrap();
    let w = weighted_difference_matrix(&ps, &demand).unwrap();
    let expect: f64 = pairs(4).map(|(i, j)| demand.weight(i, j) * ps.sq_dist(i, j)).sum();
    assert!(close(w.frob_sq(), expect, 1e-12));

    assert!(weighted_difference_matrix(&ps, &complete(3)).is_err());
}

#[test]
fn cut_sparsity_examples() {
    let k4 = complete(4);
    for members in [vec![0], vec![1, 3], vec![0, 1, 2]] {
        let r = cut_sparsity(&Cut::new(4, members).unwrap(), &k4, &k4).unwrap();
        assert_eq!(r.sparsity, 1.0);
    }
    let c4 = cycle(4);
    let r = cut_sparsity(&Cut::new(4, [0, 1]).unwrap(), &c4, &k4).unwrap();
    assert_eq!((r.cut_cost, r.cut_demand, r.sparsity), (2.0, 4.0, 0.5));
    let r = cut_sparsity(&Cut::new(4, [2]).unwrap(), &c4, &k4).unwrap();
    assert_eq!(r.sparsity, 2.0 / 3.0);
    assert!(cut_sparsity(&Cut::new(4, [2]).unwrap(), &c4, &complete(5)).is_err());
}

#[test]
fn zero_demand_cut_is_infeasible_not_nan() {
    let demand = WeightedGraph::from_edges(3, &[(0, 1, 1.0)]).unwrap();
    let r = cut_sparsity(&Cut::new(3, [2]).unwrap(), &complete(3), &demand).unwrap();
    assert!(!r.is_feasible());
    assert_eq!(r.sparsity, f64::INFINITY);
}

#[test]
fn cut_rejects_empty_and_full() {
    assert!(Cut::new(3, Vec::<usize>::new()).is_err());
    assert!(Cut::new(3, [0, 1, 2]).is_err());
    assert!(Cut::new(3, [3]).is_err());
}

#[test]
fn file_formats() {
    let ps: PointSet = serde_json::from_str(r#"{"n":2,"d":1,"points":[[0.0],[3.0]]}"#).unwrap();
    assert_eq!(ps.sq_dist(0, 1), 9.0);
    let err = serde_json::from_str::<PointSet>(r#"{"n":2,"d":1,"points":[[0.0]]}"#).unwrap_err();
    assert!(err.to_string().contains('n'), "{err}");

    let g: WeightedGraph = serde_json::from_str(r#"{"n":3,"edges":[{"i":0,"j":2,"w":1.5}]}"#).unwrap();
    assert_eq!(g.weight(2, 0), 1.5);
    assert!(serde_json::from_str::<WeightedGraph>(
        r#"{"n":3,"edges":[{"i":0,"j":2,"w":1},{"i":0,"j":2,"w":2}]}"#
    )
    .is_err());
    assert!(serde_json::from_str::<WeightedGraph>(r#"{"n":3,"edges":[{"i":0,"j":2,"w":-1}]}"#).is_err());

    let x = 0.1 + 0.2;
    let ps = pts(&[&[x], &[1.0 / 3.0]]);
    let back: PointSet = serde_json::from_str(&serde_json::to_string(&ps).unwrap()).unwrap();
    assert_eq!(back.coords(), ps.coords());
}

// ---------------------------------------------------------------- spectral

#[test]
fn svd_spectrum_examples() {
    let ps = two_points();
    let s = svd_spectrum(&difference_matrix(&ps)).unwrap();
    assert!(close(s.sigma_top(), ps.sq_dist(0, 1).sqrt(), 1e-12));
    assert!(close(s.stable_rank, 1.0, 1e-12));

    let s = svd_spectrum(&difference_matrix(&square())).unwrap();
    assert!(close(s.sigma[0], 2.0, 1e-12) && close(s.sigma[1], 2.0, 1e-12));
    assert!(close(s.stable_rank, 2.0, 1e-12));
    let total: f64 = s.sigma.iter().map(|x| x * x).sum();
    assert!(close(total, s.frob_sq, 1e-10 * s.frob_sq));

    let zero = pts(&[&[1.0], &[1.0]]);
    assert!(svd_spectrum(&difference_matrix(&zero)).is_err());
}

#[test]
fn spectrum_sign_convention() {
    let ps = pts(&[&[0.0, 0.0], &[-2.0, 0.1], &[1.0, 0.3]]);
    let m = difference_matrix(&ps);
    let s = svd_spectrum(&m).unwrap();
    let u = s.u_top();
    let first = u.iter().find(|x| x.abs() > 1e-12).unwrap();
    assert!(*first > 0.0);
    let mv = m.matrix() * s.v_top();
    assert!((mv - u * s.sigma_top()).norm() <= 1e-8 * s.sigma_top());
}

#[test]
fn laplacian_examples() {
    let l = laplacian(&WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap());
    assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));

    let l = laplacian(&complete(3));
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(l[(i, j)], if i == j { 2.0 } else { -1.0 });
        }
    }
    let g = WeightedGraph::from_edges(4, &[(0, 1, 0.3), (1, 3, 2.5), (0, 2, 1.0)]).unwrap();
    let ones = DVector::from_element(4, 1.0);
    assert_eq!((laplacian(&g) * ones).norm(), 0.0);
}

#[test]
fn generalized_eigs_examples() {
    let d = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (0, 3, 1.0), (0, 2, 0.3)]).unwrap();
    let g = generalized_eigs(&d, &d).unwrap();
    assert_eq!(g.lambdas.len(), 3);
    assert!(g.lambdas.iter().all(|&l| close(l, 1.0, 1e-9)));

    let g = generalized_eigs(&d.scaled(2.0).unwrap(), &d).unwrap();
    assert!(g.lambdas.iter().all(|&l| close(l, 2.0, 1e-9)));

    let g = generalized_eigs(&complete(6), &complete(6)).unwrap();
    assert_eq!(g.lambdas.len(), 5);
    assert!(g.lambdas.iter().all(|&l| close(l, 1.0, 1e-9)));
}

#[test]
fn generalized_eigs_drops_infinite_directions() {
    // Demand only inside {0, 1}; costs reach vertex 2, so its direction is infinite.
    let cost = complete(3);
    let demand = WeightedGraph::from_edges(3, &[(0, 1, 1.0)]).unwrap();
    let g = generalized_eigs(&cost, &demand).unwrap();
    assert_eq!(g.lambdas.len(), 1);
    assert_eq!(g.dropped_infinite, 1);
}

#[test]
fn certificate_uses_smallest_qualifying_rank() {
    let g = GeneralizedSpectrum {
        lambdas: vec![0.1, 0.5, 2.0, 3.0],
        dropped_infinite: 0,
    };
    assert_eq!(g.r_certificate(0.9, 0.5), Some(3));
    assert!(g.certifies(3, 0.9, 0.5) && g.certifies(4, 0.9, 0.5));
    assert!(!g.certifies(2, 0.9, 0.5));
    assert_eq!(g.r_certificate(10.0, 0.5), None);
}

#[test]
fn von_neumann_examples() {
    let s = svd_spectrum(&difference_matrix(&square())).unwrap();
    let v = von_neumann_check(&s, 2, 0.3, 1.0).unwrap();
    assert_eq!(v.lhs, 0.0);
    assert!(v.ok);
    let v = von_neumann_check(&s, 5, 0.3, 1.0).unwrap();
    assert!(v.ok && v.lhs == 0.0);

    let v = von_neumann_check(&s, 0, 0.5, 0.5).unwrap();
    assert!(close(v.lhs, 1.0, 1e-12) && v.ok);
    let v = von_neumann_check(&s, 0, 0.4, 0.5).unwrap();
    assert!(!v.ok);
    assert!(von_neumann_check(&s, 1, 0.4, 0.0).is_err());
}

#[test]
fn stable_rank_bound_examples() {
    let line = pts(&[&[0.0], &[1.0]]);
    let s = svd_spectrum(&difference_matrix(&line)).unwrap();
    let b = stable_rank_bound(&s, 1, 1.0);
    assert!(b.precondition_holds && b.ok && close(b.sr, 1.0, 1e-12));

    let s = svd_spectrum(&difference_matrix(&square())).unwrap();
    let b = stable_rank_bound(&s, 2, 1.0);
    assert!(b.precondition_holds && b.ok);

    let b = stable_rank_bound(&s, 1, 0.5);
    assert!(b.precondition_holds && b.ok && b.bound == 2.0);

    let s = svd_spectrum(&difference_matrix(&gen_pointset(&GeneratorSpec::new(GeneratorKind::Simplex, 0).with_n(5)).unwrap())).unwrap();
    let b = stable_rank_bound(&s, 1, 0.5);
    assert!(!b.precondition_holds);
}

// ---------------------------------------------------------------- embed

#[test]
fn psd_embedding_examples() {
    let ps = two_points();
    let e = psd_embedding_from_distribution(&ps, &[1.0], Method::SquaredLength).unwrap();
    assert!(close(e.apply(&ps.diff(0, 1)).norm(), ps.sq_dist(0, 1), 1e-12));

    let tri = triangle();
    let e = psd_embedding_from_distribution(&tri, &[1.0 / 3.0; 3], Method::SquaredLength).unwrap();
    let p = pair_second_moment(&tri, &[1.0 / 3.0; 3]);
    assert!((p - DMatrix::identity(2, 2) * 0.5).norm() < 1e-12);
    for (i, j) in pairs(3) {
        assert!(close(e.apply(&tri.diff(i, j)).norm(), 1.0 / SQRT2, 1e-12));
    }

    assert!(psd_embedding_from_distribution(&tri, &[0.5, 0.2, 0.2], Method::SquaredLength).is_err());
    assert!(psd_embedding_from_distribution(&tri, &[1.5, -0.5, 0.0], Method::SquaredLength).is_err());
}

#[test]
fn squared_length_examples() {
    let r = distortion_report(&triangle(), &squared_length_embedding(&triangle()).unwrap(), None).unwrap();
    assert!(close(r.average_distortion, SQRT2, 1e-9));
    assert!(close(r.worst_case_distortion, SQRT2, 1e-9));

    let ps = two_points();
    let r = distortion_report(&ps, &squared_length_embedding(&ps).unwrap(), None).unwrap();
    assert!(close(r.average_distortion, 1.0, 1e-12) && close(r.worst_case_distortion, 1.0, 1e-12));

    let cube = gen_pointset(&GeneratorSpec::new(GeneratorKind::HypercubeSubset, 11).with_d(4).with_n(9)).unwrap();
    let r = distortion_report(&cube, &squared_length_embedding(&cube).unwrap(), None).unwrap();
    assert!(r.average_distortion <= 2.0 + 1e-9);

    let dup = pts(&[&[1.0, 1.0], &[1.0, 1.0]]).validated(0.0).unwrap();
    assert!(squared_length_embedding(&dup).is_err());
}

#[test]
fn stable_rank_embedding_examples() {
    let ps = two_points();
    let r = distortion_report(&ps, &stable_rank_embedding(&ps).unwrap(), None).unwrap();
    assert!(close(r.average_distortion, 1.0, 1e-12));

    let sq = square();
    let r = distortion_report(&sq, &stable_rank_embedding(&sq).unwrap(), None).unwrap();
    assert!(r.average_distortion <= 2.0 + 1e-9);

    let line = gen_pointset(&GeneratorSpec {
        params: GenParams { s: Some(vec![0.0, 1.0, 1.5, 4.0]), ..Default::default() },
        ..GeneratorSpec::new(GeneratorKind::LineSqrt, 0)
    })
    .unwrap();
    let rank_one = pts(&[&[0.0], &[1.0]]).validated(0.0).unwrap();
    for ps in [rank_one, line] {
        let s = svd_spectrum(&difference_matrix(&ps)).unwrap();
        let r = distortion_report(&ps, &stable_rank_embedding(&ps).unwrap(), None).unwrap();
        if s.rank == 1 {
            assert!(close(r.average_distortion, 1.0, 1e-6));
        }
        assert!(r.average_distortion <= s.stable_rank * (1.0 + 1e-6));
    }
}

#[test]
fn rank_one_set_is_embedded_without_average_loss() {
    let ps = pts(&[&[0.0, 0.0], &[1.0, 2.0]]).validated(0.0).unwrap();
    let r = distortion_report(&ps, &stable_rank_embedding(&ps).unwrap(), None).unwrap();
    assert!(close(r.average_distortion, 1.0, 1e-6));
}

#[test]
fn spectral_1d_examples() {
    let ps = two_points();
    let e = spectral_1d_embedding(&ps).unwrap();
    let y = e.line_values(&ps).unwrap();
    assert!(close((y[0] - y[1]).abs(), ps.sq_dist(0, 1), 1e-12));

    let sq = square();
    let y = spectral_1d_embedding(&sq).unwrap().line_values(&sq).unwrap();
    let total: f64 = pairs(4).map(|(i, j)| (y[i] - y[j]).abs()).sum();
    assert!(close(total, 4.0, 1e-8 * 4.0));

    let zero = pts(&[&[2.0], &[2.0]]).validated(0.0).unwrap();
    assert!(spectral_1d_embedding(&zero).is_err());
}

#[test]
fn demand_spectral_1d_examples() {
    let sq = square();
    let plain = spectral_1d_embedding(&sq).unwrap();
    let uniform = demand_spectral_1d_embedding(&sq, &complete(4)).unwrap();
    assert!((plain.matrix.clone() - uniform.matrix.clone()).norm() < 1e-12);

    let ps = two_points();
    let g = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
    let e = demand_spectral_1d_embedding(&ps, &g).unwrap();
    let r = distortion_report(&ps, &e, Some(&g)).unwrap();
    assert!(close(r.average_distortion, 1.0, 1e-12));

    let zero = WeightedGraph::from_edges(3, &[(0, 1, 1.0)]).unwrap();
    let stacked = pts(&[&[0.0], &[0.0], &[1.0]]).validated(0.0).unwrap();
    assert!(demand_spectral_1d_embedding(&stacked, &zero).is_err());
}

#[test]
fn demand_squared_length_examples() {
    let tri = triangle();
    let a = demand_squared_length_embedding(&tri, &complete(3)).unwrap();
    let b = squared_length_embedding(&tri).unwrap();
    assert!((a.matrix - b.matrix).norm() < 1e-12);

    let sq = square();
    let single = WeightedGraph::from_edges(4, &[(0, 3, 1.0)]).unwrap();
    let e = demand_squared_length_embedding(&sq, &single).unwrap();
    assert!(close(e.apply(&sq.diff(0, 3)).norm(), sq.sq_dist(0, 3), 1e-12));

    let ps = gen_pointset(&GeneratorSpec::new(GeneratorKind::L1Embeddable, 3).with_n(7).with_d(3)).unwrap();
    let demand = gen_instance(&GeneratorSpec {
        params: GenParams { n: Some(7), demand: Some(WeightKind::Random), ..Default::default() },
        ..GeneratorSpec::new(GeneratorKind::Complete, 3)
    })
    .unwrap()
    .demand;
    let e = demand_squared_length_embedding(&ps, &demand).unwrap();
    let r = distortion_report(&ps, &e, Some(&demand)).unwrap();
    let d_eff = svd_spectrum(&difference_matrix(&ps)).unwrap().rank as f64;
    assert!(d_eff <= 3.0);
    assert!(r.average_distortion <= 3f64.sqrt() + 1e-6);
    assert!(r.contraction_ok);
}

#[test]
fn distortion_report_examples() {
    let ps = pts(&[&[0.0], &[2.0]]).validated(0.0).unwrap();
    // x -> 2x maps the squared distance 4 to distance 4.
    let e = EmbeddingOperator { method: Method::SquaredLength, matrix: DMatrix::from_element(1, 1, 2.0), p: None };
    let r = distortion_report(&ps, &e, None).unwrap();
    assert_eq!((r.worst_case_distortion, r.average_distortion), (1.0, 1.0));
    assert!(r.contraction_ok);

    let with_dup = pts(&[&[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]]).validated(0.0).unwrap();
    let e = squared_length_embedding(&with_dup).unwrap();
    let r = distortion_report(&with_dup, &e, None).unwrap();
    assert!(r.worst_case_distortion.is_finite() && r.contraction_ok);
    assert!(r.average_distortion <= r.worst_case_distortion + 1e-12);
}

#[test]
fn embedding_json_schema() {
    let tri = triangle();
    let e = squared_length_embedding(&tri).unwrap();
    let v: serde_json::Value = serde_json::to_value(&e).unwrap();
    assert_eq!(v["method"], "squared_length");
    assert_eq!(v["A"].as_array().unwrap().len(), 2);
    assert_eq!(v["p"].as_array().unwrap().len(), 3);
    let back: EmbeddingOperator = serde_json::from_value(v).unwrap();
    assert_eq!(back, e);

    let v = serde_json::to_value(spectral_1d_embedding(&tri).unwrap()).unwrap();
    assert_eq!(v["method"], "spectral_1d");
    assert!(v.get("p").is_none());
}

// ---------------------------------------------------------------- mvee

#[test]
fn mvee_single_column() {
    let ps = pts(&[&[1.0, 2.0], &[0.0, 0.0]]);
    let m = difference_matrix(&ps);
    let ell = mvee_centered(&m, DEFAULT_EPS, DEFAULT_MAX_ITER).unwrap();
    assert!(ell.converged);
    assert_eq!(ell.d_eff, 1);
    assert!(close(ell.alpha[0], 1.0, 1e-12));
    assert!(close(ell.gauge(&m.column(0)), 1.0, 1e-9));
}

#[test]
fn mvee_triangle_is_unit_circle() {
    let m = difference_matrix(&triangle());
    let ell = mvee_centered(&m, DEFAULT_EPS, DEFAULT_MAX_ITER).unwrap();
    assert!((ell.q.clone() - DMatrix::identity(2, 2)).norm() < 1e-9);
    assert!(close(ell.alpha.iter().sum::<f64>(), 2.0, 1e-9));
}

#[test]
fn mvee_square_contains_diagonals() {
    let m = difference_matrix(&square());
    let ell = mvee_centered(&m, DEFAULT_EPS, DEFAULT_MAX_ITER).unwrap();
    assert!(ell.converged);
    for k in 0..m.ncols() {
        assert!(ell.gauge(&m.column(k)) <= 1.0 + DEFAULT_EPS + 1e-12);
    }
    assert!(close(ell.alpha.iter().sum::<f64>(), ell.d_eff as f64, 1e-6 * ell.d_eff as f64));
}

#[test]
fn mvee_rejects_bad_input() {
    let zero = difference_matrix(&pts(&[&[1.0], &[1.0]]));
    assert!(mvee_centered(&zero, DEFAULT_EPS, 10).is_err());
    assert!(mvee_centered(&difference_matrix(&square()), 0.0, 10).is_err());
}

#[test]
fn mvee_reports_non_convergence() {
    let ps = gen_pointset(&GeneratorSpec::new(GeneratorKind::L1Embeddable, 2).with_n(10).with_d(5)).unwrap();
    let ell = mvee_centered(&difference_matrix(&ps), 1e-12, 1).unwrap();
    assert!(!ell.converged);
    let g = goemans_embedding(&ps, &ell).unwrap();
    assert!(!g.converged);
}

#[test]
fn goemans_examples() {
    let ps = two_points();
    let (_, g) = goemans(&ps, DEFAULT_EPS, DEFAULT_MAX_ITER).unwrap();
    let r = distortion_report(&ps, &g.operator, None).unwrap();
    assert!(close(r.worst_case_distortion, 1.0, 1e-9));

    let tri = triangle();
    let (_, g) = goemans(&tri, DEFAULT_EPS, DEFAULT_MAX_ITER).unwrap();
    assert!((g.operator.matrix.clone() - DMatrix::identity(2, 2) / SQRT2).norm() < 1e-9);
    let r = distortion_report(&tri, &g.operator, None).unwrap();
    assert!(close(r.worst_case_distortion, SQRT2, 1e-9));

    let ps = gen_pointset(&GeneratorSpec::new(GeneratorKind::L1Embeddable, 5).with_n(8).with_d(3)).unwrap();
    let (ell, g) = goemans(&ps, DEFAULT_EPS, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(ell.d_eff, 3);
    let r = distortion_report(&ps, &g.operator, None).unwrap();
    assert!(r.worst_case_distortion <= (3.0 * (1.0 + DEFAULT_EPS)).sqrt() * (1.0 + 1e-9));
    assert!(r.contraction_ok);
}

#[test]
fn ellipsoid_json_schema() {
    let ell = mvee_centered(&difference_matrix(&triangle()), DEFAULT_EPS, DEFAULT_MAX_ITER).unwrap();
    let v = serde_json::to_value(&ell).unwrap();
    for key in ["Q", "alpha", "eps", "converged"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

// ---------------------------------------------------------------- sdp

fn opts() -> SolverOptions {
    SolverOptions::default()
}

#[test]
fn sdp_two_vertices() {
    let g = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
    let sol = solve_sdp(&SdpInstance::new(g.clone(), g).unwrap(), &opts()).unwrap();
    assert!(sol.converged);
    assert!(close(sol.phi_sdp, 1.0, 1e-6));
}

#[test]
fn sdp_cycle_four() {
    let inst = SdpInstance::new(cycle(4), complete(4)).unwrap();
    let sol = solve_sdp(&inst, &opts()).unwrap();
    assert!(sol.converged);
    assert!(sol.phi_sdp <= 0.5 + 1e-6);
    assert!(sol.points_validated());
    assert!(check_l22(&sol.points, TRIANGLE_SLACK_FACTOR * sol.tol).ok);
}

#[test]
fn sdp_solution_invariants() {
    let inst = gen_instance(&GeneratorSpec {
        params: GenParams { n: Some(7), weights: Some(WeightKind::Random), demand: Some(WeightKind::Random), ..Default::default() },
        ..GeneratorSpec::new(GeneratorKind::Complete, 9)
    })
    .unwrap();
    let sol = solve_sdp(&inst, &opts()).unwrap();
    assert!(sol.converged);
    let x = &sol.gram;
    let objective = gram_pair_sum(x, &inst.cost);
    assert!(close(objective, sol.phi_sdp, 1e-8 * sol.phi_sdp));
    assert!(close(gram_pair_sum(x, &inst.demand), 1.0, sol.tol));
    assert!(sol.residuals.min_eigenvalue >= -1e-8 * x.norm());
    assert!(sol.residuals.max_triangle_violation <= TRIANGLE_SLACK_FACTOR * sol.tol);

    let p = &sol.points;
    let mass: f64 = pairs(7).map(|(i, j)| inst.demand.weight(i, j) * p.sq_dist(i, j)).sum();
    assert!(close(mass, 1.0, sol.tol));
    let g = p.coords() * p.coords().transpose();
    assert!((g - x).norm() <= 1e-6 * x.norm());
}

#[test]
fn sdp_rejects_zero_demand_and_oversize() {
    // A demand graph must carry positive weight, so zero demand cannot even be built.
    assert!(WeightedGraph::from_pair_weights(3, vec![0.0; 3]).is_err());
    assert!(SdpInstance::new(complete(41), complete(41)).is_err());
    assert!(SdpInstance::new(complete(4), complete(5)).is_err());
}

#[test]
fn extract_points_examples() {
    let (ps, report) = extract_points(&DMatrix::identity(4, 4), 1e-9).unwrap();
    assert!(report.ok && ps.is_validated());
    for (i, j) in pairs(4) {
        assert!(close(ps.sq_dist(i, j), 2.0, 1e-12));
    }

    let s = DVector::from_vec(vec![1.0, -2.0, 0.5]);
    let (ps, _) = extract_points(&(&s * s.transpose()), 1e-9).unwrap();
    assert_eq!(ps.dim(), 1);
    assert!(close(ps.sq_dist(0, 1), 9.0, 1e-12));
}

#[test]
fn gram_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("l22embed-oracle-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gram.json");
    let inst = SdpInstance::new(cycle(5), complete(5)).unwrap();
    let sol = solve_sdp(&inst, &opts()).unwrap();
    save_solution(&path, &sol).unwrap();
    let back = load_solution(&path, &inst, sol.tol).unwrap();
    assert_eq!(back.gram, sol.gram);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn hand_built_gram_accepted() {
    let g = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
    let inst = SdpInstance::new(g.clone(), g).unwrap();
    let x = DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]);
    let file = GramFile { n: 2, x, phi_sdp: 1.0 };
    let sol = solution_from_gram(&file, &inst, 1e-6).unwrap();
    assert!(close(sol.phi_sdp, 1.0, 1e-12));
}

#[test]
fn planted_triangle_violation_rejected() {
    // Collinear points 0, a, 2a violate the triangle inequality by 2 a^2.
    let inst = SdpInstance::new(complete(3), complete(3)).unwrap();
    let a = (1.0f64 / 6.0).sqrt();
    let x = DVector::from_vec(vec![-a, 0.0, a]);
    let gram = &x * x.transpose();
    let phi = gram_pair_sum(&gram, &inst.cost);
    let err = solution_from_gram(&GramFile { n: 3, x: gram, phi_sdp: phi }, &inst, 1e-6).unwrap_err();
    assert!(matches!(err, Error::ConstraintViolated(_)), "{err}");
    assert!(err.to_string().contains("triangle"), "{err}");
}

#[test]
fn small_triangle_violation_rejected() {
    // An l2-squared triangle nudged so one triple is violated by 1e-2 of the scale.
    let inst = SdpInstance::new(complete(3), complete(3)).unwrap();
    let d = [1.0, 1.0, 2.02];
    let scale = d[0] + d[1] + d[2];
    let (d01, d12, d02) = (d[0] / scale, d[1] / scale, d[2] / scale);
    // Gram of points with x_0 at the origin, then centered.
    let y11 = d01;
    let y22 = d02;
    let y12 = (d01 + d02 - d12) / 2.0;
    let y = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, y11, y12, 0.0, y12, y22]);
    let j = DMatrix::identity(3, 3) - DMatrix::from_element(3, 3, 1.0 / 3.0);
    let gram = &j * y * &j;
    let phi = gram_pair_sum(&gram, &inst.cost);
    let err = solution_from_gram(&GramFile { n: 3, x: gram, phi_sdp: phi }, &inst, 1e-6).unwrap_err();
    assert!(err.to_string().contains("triangle"), "{err}");
}

#[test]
fn tampered_objective_rejected() {
    let inst = SdpInstance::new(cycle(4), complete(4)).unwrap();
    let sol = solve_sdp(&inst, &opts()).unwrap();
    let mut file = sol.gram_file();
    file.phi_sdp *= 0.5;
    let err = solution_from_gram(&file, &inst, sol.tol).unwrap_err();
    assert!(err.to_string().contains("phi_sdp"), "{err}");
}

#[test]
fn cut_gram_is_feasible_with_cut_objective() {
    let inst = SdpInstance::new(cycle(5), complete(5)).unwrap();
    let cut = Cut::new(5, [0, 1]).unwrap();
    let x = cut_gram(&cut, &inst.demand).unwrap();
    let phi = gram_pair_sum(&x, &inst.cost);
    assert!(close(phi, cut_sparsity(&cut, &inst.cost, &inst.demand).unwrap().sparsity, 1e-12));
    let sol = solution_from_gram(&GramFile { n: 5, x, phi_sdp: phi }, &inst, 1e-9).unwrap();
    assert!(sol.points_validated());
}

// ---------------------------------------------------------------- round

#[test]
fn sweep_examples() {
    let out = sweep_round(&[0.0, 0.0, 1.0, 1.0], &cycle(4), &complete(4)).unwrap();
    assert_eq!(out.best_cut.sparsity, 0.5);
    assert_eq!(out.best_cut.cut.members(), &[0, 1]);

    let g = complete(2);
    let out = sweep_round(&[0.4, 0.1], &g, &g).unwrap();
    assert_eq!(out.best_cut.sparsity, 1.0);

    let path = WeightedGraph::from_edges(5, &[(0, 1, 3.0), (1, 2, 0.2), (2, 3, 1.0), (3, 4, 2.0)]).unwrap();
    let out = sweep_round(&[0.0, 1.0, 2.0, 3.0, 4.0], &path, &complete(5)).unwrap();
    assert!(out.best_cut.sparsity <= out.line_ratio + 1e-12);
    assert_eq!(out.best_cut.cut.members(), &[0, 1]);

    assert!(matches!(sweep_round(&[2.0; 4], &cycle(4), &complete(4)), Err(Error::Degenerate(_))));
}

#[test]
fn sweep_splits_ties_by_index() {
    let demand = WeightedGraph::from_edges(3, &[(0, 1, 1.0)]).unwrap();
    let out = sweep_round(&[0.0, 0.0, 1.0], &complete(3), &demand).unwrap();
    assert_eq!(out.best_cut.cut.members(), &[0]);
    assert_eq!(out.best_cut.sparsity, 2.0);
}

#[test]
fn brute_force_examples() {
    let r = brute_force_sparsest_cut(&cycle(4), &complete(4)).unwrap();
    assert_eq!(r.sparsity, 0.5);
    let m = r.cut.members();
    assert_eq!(m.len(), 2);
    assert!(cycle(4).weight(m[0], m[1]) > 0.0);

    let r = brute_force_sparsest_cut(&complete(4), &complete(4)).unwrap();
    assert_eq!(r.sparsity, 1.0);

    let e = WeightedGraph::from_edges(4, &[(1, 3, 2.0)]).unwrap();
    let r = brute_force_sparsest_cut(&e, &e).unwrap();
    assert_eq!(r.sparsity, 1.0);

    assert!(brute_force_sparsest_cut(&complete(21), &complete(21)).is_err());
}

#[test]
fn brute_force_tie_break() {
    // Every cut of K_4/K_4 has sparsity 1; the smallest side, then the
    // lexicographically first, wins.
    let r = brute_force_sparsest_cut(&complete(4), &complete(4)).unwrap();
    assert_eq!(r.cut.members(), &[0]);
    let r = brute_force_sparsest_cut(&cycle(4), &complete(4)).unwrap();
    assert_eq!(r.cut.members(), &[0, 1]);
}

#[test]
fn round_two_vertices() {
    let g = complete(2);
    let inst = SdpInstance::new(g.clone(), g).unwrap();
    let sol = solve_sdp(&inst, &opts()).unwrap();
    let out = round_sparsest_cut(&inst, &sol, 0.5, None).unwrap();
    assert_eq!(out.best_cut.sparsity, 1.0);
    assert!(close(out.certified_ratio, 1.0, 1e-6));
}

#[test]
fn round_cost_equals_demand() {
    let g = gen_instance(&GeneratorSpec {
        params: GenParams { n: Some(6), weights: Some(WeightKind::Random), ..Default::default() },
        ..GeneratorSpec::new(GeneratorKind::Complete, 4)
    })
    .unwrap()
    .cost;
    let inst = SdpInstance::new(g.clone(), g).unwrap();
    let sol = solve_sdp(&inst, &opts()).unwrap();
    let out = round_sparsest_cut(&inst, &sol, 0.5, None).unwrap();
    assert!(close(out.best_cut.sparsity, 1.0, 1e-12));
    assert!(close(out.certified_ratio, 1.0 / sol.phi_sdp, 1e-12));
}

#[test]
fn round_certified_block_model() {
    let mut spec = GeneratorSpec::new(GeneratorKind::BlockModel, 1).with_n(10);
    spec.params.inter = Some(0.02);
    let inst = gen_instance(&spec).unwrap();
    let sol = solve_sdp(&inst, &opts()).unwrap();
    let delta = 0.5;
    let out = round_sparsest_cut(&inst, &sol, delta, None).unwrap();
    let r = out.r.expect("block model is certified");
    assert_eq!(out.guarantee, Some(r as f64 / delta));
    assert!(out.best_cut.sparsity <= (r as f64 / delta) * sol.phi_sdp * (1.0 + 1e-4));
    let opt = brute_force_sparsest_cut(&inst.cost, &inst.demand).unwrap();
    assert!(out.best_cut.sparsity >= opt.sparsity - 1e-10);

    let json = serde_json::to_value(out.to_json()).unwrap();
    for key in ["cut", "phi", "phi_sdp", "ratio", "guarantee", "lambda_r"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn round_without_certificate_still_rounds() {
    let inst = SdpInstance::new(complete(5), complete(5)).unwrap();
    let sol = solve_sdp(&inst, &opts()).unwrap();
    // All generalized eigenvalues are 1 and phi_sdp is about 1, so 1/(1-delta) > 1 fails.
    let out = round_sparsest_cut(&inst, &sol, 0.5, None).unwrap();
    assert_eq!(out.guarantee, None);
    assert!(close(out.best_cut.sparsity, 1.0, 1e-12));
    assert!(serde_json::to_value(out.to_json()).unwrap()["guarantee"].is_null());
}

// ---------------------------------------------------------------- gen

#[test]
fn generator_examples() {
    let tri = gen_pointset(&GeneratorSpec {
        params: GenParams { n: Some(3), side: Some(1.0), ..Default::default() },
        ..GeneratorSpec::new(GeneratorKind::Simplex, 0)
    })
    .unwrap();
    for (i, j) in pairs(3) {
        assert!(close(tri.sq_dist(i, j), 1.0, 1e-15));
    }

    let sq = gen_pointset(&GeneratorSpec::new(GeneratorKind::HypercubeSubset, 0).with_d(2)).unwrap();
    assert_eq!(sq.len(), 4);
    assert_eq!(difference_matrix(&sq).frob_sq(), 8.0);

    let line = gen_pointset(&GeneratorSpec {
        params: GenParams { s: Some(vec![0.0, 1.0, 4.0]), ..Default::default() },
        ..GeneratorSpec::new(GeneratorKind::LineSqrt, 0)
    })
    .unwrap();
    assert!(check_l22(&line, 1e-12).ok);
    assert!(close(line.sq_dist(0, 2), 4.0, 1e-14));
}

#[test]
fn instance_generator_examples() {
    let c4 = gen_instance(&GeneratorSpec::new(GeneratorKind::Cycle, 0).with_n(4)).unwrap();
    assert_eq!(c4.cost, cycle(4));
    assert_eq!(c4.demand, complete(4));

    let k = gen_instance(&GeneratorSpec::new(GeneratorKind::Complete, 0).with_n(5)).unwrap();
    assert_eq!(brute_force_sparsest_cut(&k.cost, &k.demand).unwrap().sparsity, 1.0);

    let mut spec = GeneratorSpec::new(GeneratorKind::BlockModel, 0).with_n(8);
    spec.params.r = Some(2);
    let bm = gen_instance(&spec).unwrap();
    let g = generalized_eigs(&bm.cost, &bm.demand).unwrap();
    let sol = solve_sdp(&bm, &opts()).unwrap();
    assert!(g.lambda(2).unwrap() >= 2.0 * sol.phi_sdp, "{:?} vs {}", g.lambdas, sol.phi_sdp);
}

// ---------------------------------------------------------------- verify

#[test]
fn key_lemma_examples() {
    use l22embed::verify::*;
    let r = verify_key_lemma(&triangle(), KEY_LEMMA_TOL);
    assert!(r.ok);

    let sq = square();
    assert!(verify_key_lemma(&sq, KEY_LEMMA_TOL).ok);

    let r = verify_key_lemma(&pts(&[&[0.0], &[1.0], &[2.0]]), KEY_LEMMA_TOL);
    assert!(!r.ok);
    assert!(close(r.worst_violation, 2.0, 1e-12));
}

#[test]
fn key_lemma_samples_large_sets() {
    use l22embed::verify::*;
    let ps = gen_pointset(&GeneratorSpec::new(GeneratorKind::L1Embeddable, 8).with_n(30).with_d(6)).unwrap();
    let r = verify_key_lemma(&ps, KEY_LEMMA_TOL);
    assert!(!r.exhaustive);
    assert_eq!(r.checked, KEY_LEMMA_SAMPLES);
    assert!(r.ok);
    assert_eq!(verify_key_lemma(&ps, KEY_LEMMA_TOL), r);
}

#[test]
fn theorem_suite_examples() {
    use l22embed::verify::*;
    let items = verify_theorem_suite(&two_points(), None);
    assert!(all_ok(&items));

    let items = verify_theorem_suite(&triangle(), None);
    assert!(all_ok(&items));
    let get = |name: &str| items.iter().find(|c| c.claim == name).unwrap().measured.unwrap();
    assert!(close(get("worst_case_distortion/goemans_mvee"), SQRT2, 1e-9));
    assert!(close(get("average_distortion/squared_length"), SQRT2, 1e-9));

    let v = serde_json::to_value(&items).unwrap();
    for key in ["claim", "measured", "bound", "ok", "witness"] {
        assert!(v[0].get(key).is_some(), "{key}");
    }
    assert_eq!(verify_theorem_suite(&triangle(), None), items);
}

#[test]
fn near_coincident_pairs_in_tolerance_validated_sets() {
    // 0.125 - 1.25e-11 and 0.125 + 4e-12 on a line with a far point: l2-squared
    // only up to about 1e-10, and no linear map contracts the close pair.
    let ps = pts(&[&[0.125 - 1.25e-11], &[0.125 + 4e-12], &[-0.125]]).validated(1e-9).unwrap();
    let e = EmbeddingOperator { method: Method::SquaredLength, matrix: DMatrix::from_element(1, 1, 0.25), p: None };
    let strict = distortion_report(&ps, &e, None).unwrap();
    assert!(!strict.contraction_ok && strict.worst_expansion > 1e8);
    let l22 = check_l22(&ps, 1e-9);
    let loose = distortion_report_with_tol(&ps, &e, None, l22.worst_violation / l22.scale).unwrap();
    assert!(loose.contraction_ok);
    assert!(loose.contraction_slack > 0.0 && loose.contraction_slack < 1e-9);
    assert_eq!(loose.worst_expansion, strict.worst_expansion);

    let rounded = pts(&[&[0.0, 0.3], &[1e-17, 0.3], &[1.0, 0.0]]).validated(1e-9).unwrap();
    let r = distortion_report(&rounded, &squared_length_embedding(&rounded).unwrap(), None).unwrap();
    assert_eq!(r.coincident_pairs, 1);
    assert!(r.contraction_ok);
}
