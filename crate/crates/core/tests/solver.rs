use std::collections::BTreeMap;

use lrsdp_core::generators::*;
use lrsdp_core::spectral::SymOperator;
use lrsdp_core::{solve, SdpProblem, SolverOptions, Status};

fn converged(p: &SdpProblem, opts: &SolverOptions) -> lrsdp_core::Solution {
    let s = solve(p, opts).unwrap();
    assert_eq!(s.status, Status::Converged);
    assert!(s.residues.eta_max <= opts.tol);
    s
}

#[test]
fn maxcut_closed_forms() {
    let o = SolverOptions::default();
    assert!((converged(&gen_maxcut(&maxcut_edge()).unwrap(), &o).objective - 1.0).abs() <= 1e-8);
    assert!((converged(&gen_maxcut(&maxcut_triangle()).unwrap(), &o).objective - 2.25).abs() <= 1e-7);
}

#[test]
fn scalar_completion_has_trace_six() {
    let p = gen_matrix_completion(1, 1, &[(0, 0, 3.0)]).unwrap();
    let s = converged(&p, &SolverOptions::default());
    assert!((s.objective - 6.0).abs() <= 1e-7);
    assert!((s.factor.gram() - lrsdp_core::nalgebra::DMatrix::from_element(2, 2, 3.0)).amax() <= 1e-6);
}

#[test]
fn quartic_closed_forms() {
    let mut x1_4 = BTreeMap::new();
    x1_4.insert(vec![4u8, 0], 1.0);
    let s = converged(&gen_quartic_sphere(2, &x1_4).unwrap(), &SolverOptions::default());
    assert!(s.objective.abs() <= 1e-7);

    let mut sq = BTreeMap::new();
    sq.insert(vec![4u8, 0], 1.0);
    sq.insert(vec![2u8, 2], 2.0);
    sq.insert(vec![0u8, 4], 1.0);
    let s = converged(&gen_quartic_sphere(2, &sq).unwrap(), &SolverOptions::default());
    assert!((s.objective - 1.0).abs() <= 1e-7);
}

#[test]
fn lanczos_path_agrees_with_dense_path() {
    let p = gen_maxcut(&random_graph(40, 0.3, 2)).unwrap();
    let dense = converged(&p, &SolverOptions::default());
    let sparse = converged(&p, &SolverOptions { dense_threshold: 0, ..SolverOptions::default() });
    assert!((dense.objective - sparse.objective).abs() <= 1e-6 * dense.objective.abs());
}

#[test]
fn certificate_holds_at_convergence() {
    let (qm, c) = random_bqp(5, 7);
    let p = gen_bqp_moment(&qm, &c).unwrap();
    let s = converged(&p, &SolverOptions::default());
    let y = s.factor.matrix();
    let sy = s.dual_operator(&p).apply(y).norm() / (1.0 + y.norm());
    assert!(sy <= 1e-7, "{sy:e}");
    assert!(s.lambda_min >= -1e-8 * (1.0 + s.lambda_max.abs()));
    let (bf, _) = bqp_brute_force(&qm, &c);
    assert!(s.objective <= bf + 1e-8);
}

#[test]
fn trace_respects_penalty_bounds_and_is_reproducible() {
    let (qm, c) = random_bqp(6, 1);
    let p = gen_bqp_moment(&qm, &c).unwrap();
    let o = SolverOptions { seed: 3, ..SolverOptions::default() };
    let a = solve(&p, &o).unwrap();
    let b = solve(&p, &o).unwrap();
    assert_eq!(a, b);
    for r in &a.trace {
        assert!(r.sigma >= o.sigma_min && r.sigma <= o.sigma_max);
        assert!(r.eps >= o.eps_floor);
    }
}
