use lrsdp_core::generators::*;
use lrsdp_core::nalgebra::DMatrix;
use lrsdp_core::SdpProblem;
use proptest::prelude::*;

fn rank_one(v: &lrsdp_core::nalgebra::DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

fn constraints_are_distinct(p: &SdpProblem) -> bool {
    let mut seen: Vec<Vec<(usize, usize, u64)>> = p
        .constraints()
        .iter()
        .map(|a| a.entries().iter().map(|&(i, j, v)| (i, j, v.to_bits())).collect())
        .collect();
    let len = seen.len();
    seen.sort();
    seen.dedup();
    seen.len() == len
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bqp_moment_of_any_sign_vector_is_feasible_and_exact(q in 2usize..8, seed in any::<u64>(), mask in any::<u32>()) {
        let (qm, c) = random_bqp(q, seed);
        let p = gen_bqp_moment(&qm, &c).unwrap();
        prop_assert!(constraints_are_distinct(&p));
        let x: Vec<f64> = (0..q).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let y = rank_one(&MonomialIndex::new(q, false).evaluate(&x));
        let r = p.apply_constraints(&y).unwrap() - p.rhs();
        prop_assert!(r.amax() <= 1e-12);
        prop_assert!(p.manifold().is_feasible(&y, 1e-12));
        let val = p.reported_objective(p.objective(&y).unwrap());
        prop_assert!((val - bqp_value(&qm, &c, &x)).abs() <= 1e-12 * (1.0 + val.abs()));
    }

    #[test]
    fn quartic_moment_of_any_unit_vector_is_feasible_and_exact(q in 1usize..6, seed in any::<u64>(), raw in prop::collection::vec(-1.0f64..1.0, 6)) {
        let nrm = raw[..q].iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(nrm > 1e-3);
        let x: Vec<f64> = raw[..q].iter().map(|v| v / nrm).collect();
        let coeffs = random_quartic(q, seed);
        let p = gen_quartic_sphere(q, &coeffs).unwrap();
        prop_assert!(constraints_are_distinct(&p));
        let y = rank_one(&MonomialIndex::new(q, true).evaluate(&x));
        let r = p.apply_constraints(&y).unwrap() - p.rhs();
        prop_assert!(r.amax() <= 1e-12);
        let val = p.objective(&y).unwrap();
        prop_assert!((val - polynomial_value(&coeffs, &x)).abs() <= 1e-11);
    }

    #[test]
    fn completion_sizes(s in 1usize..8, t in 1usize..8, rate in 0.0f64..1.0, seed in any::<u64>()) {
        let (m, samples) = random_matrix_completion(s, t, rate, seed);
        let p = gen_matrix_completion(s, t, &samples).unwrap();
        prop_assert_eq!((p.dim(), p.num_constraints()), (s + t, samples.len()));
        let x = DMatrix::from_fn(s + t, s + t, |i, j| if i < s && j >= s { m[(i, j - s)] } else if j < s && i >= s { m[(j, i - s)] } else { 0.0 });
        for (k, a) in p.constraints().iter().enumerate() {
            let ax = (a.to_dense().component_mul(&x)).sum();
            prop_assert!((ax - p.rhs()[k]).abs() <= 1e-12 * (1.0 + ax.abs()));
        }
    }
}

#[test]
fn quartic_dimensions_follow_monomial_count() {
    for q in 1..=6 {
        let p = gen_quartic_sphere(q, &random_quartic(q, 0)).unwrap();
        assert_eq!(p.dim(), 1 + q + q * (q + 1) / 2);
    }
    assert_eq!(gen_quartic_sphere(2, &random_quartic(2, 0)).unwrap().dim(), 6);
}

#[test]
fn maxcut_rank_one_cut_matches_graph_cut() {
    let g = random_graph(12, 0.4, 9);
    let p = gen_maxcut(&g).unwrap();
    let labels: Vec<f64> = (0..12).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
    let y = DMatrix::from_column_slice(12, 1, &labels);
    let val = p.reported_objective(p.objective(&y).unwrap());
    assert!((val - g.cut_value(&labels)).abs() < 1e-12);
}
