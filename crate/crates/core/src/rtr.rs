//! Riemannian trust-region minimization with a truncated conjugate-gradient
//! (Steihaug-Toint) model solver.

use nalgebra::DMatrix;

use crate::manifolds::{FactorPoint, ManifoldKind, TangentVector};

/// A smooth cost on a factor manifold.
///
/// `evaluate` returns the cost together with whatever cached state the
/// gradient and Hessian need, so trial points only pay for one evaluation.
pub trait Objective {
    type Eval;

    fn manifold(&self) -> ManifoldKind;

    fn evaluate(&self, y: &DMatrix<f64>) -> (f64, Self::Eval);

    /// Riemannian gradient at `y`.
    fn gradient(&self, y: &DMatrix<f64>, eval: &Self::Eval) -> DMatrix<f64>;

    /// Riemannian Hessian at `y` applied to the tangent vector `u`.
    fn hess_vec(&self, y: &DMatrix<f64>, eval: &Self::Eval, u: &DMatrix<f64>) -> DMatrix<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtrOptions {
    pub grad_tol: f64,
    pub max_inner_iters: usize,
    /// Defaults to `0.1 · sqrt(n p)` when unset.
    pub initial_radius: Option<f64>,
    /// Defaults to ten times the initial radius when unset.
    pub max_radius: Option<f64>,
    pub rho_prime: f64,
    pub kappa: f64,
    pub theta: f64,
    /// Cap on tCG iterations; defaults to the tangent-space dimension.
    pub max_tcg_iters: Option<usize>,
    pub min_radius: f64,
}

impl Default for RtrOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-6,
            max_inner_iters: 200,
            initial_radius: None,
            max_radius: None,
            rho_prime: 0.1,
            kappa: 0.1,
            theta: 1.0,
            max_tcg_iters: None,
            min_radius: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Tolerance,
    MaxIterations,
    RadiusCollapse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtrReport {
    pub grad_norm: f64,
    pub iterations: usize,
    pub tcg_iterations: usize,
    pub initial_cost: f64,
    pub final_cost: f64,
    /// Decrease obtained by the warm-direction line search alone.
    pub line_search_decrease: f64,
    pub termination: Termination,
}

impl RtrReport {
    pub fn cost_decrease(&self) -> f64 {
        self.initial_cost - self.final_cost
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcgStop {
    NegativeCurvature,
    ExceededRadius,
    ResidualReduced,
    ModelIncreased,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct TcgResult {
    pub step: DMatrix<f64>,
    /// Hessian applied to `step`.
    pub hess_step: DMatrix<f64>,
    pub stop: TcgStop,
    pub iterations: usize,
}

/// Approximately minimizes `<g, η> + ½ <η, H η>` over `‖η‖ <= radius`.
///
/// Stops on negative curvature or boundary crossing (returning a boundary
/// point), or once `‖r‖ <= ‖r₀‖ · min(‖r₀‖^θ, κ)`.
pub fn tcg(
    grad: &DMatrix<f64>,
    mut hess: impl FnMut(&DMatrix<f64>) -> DMatrix<f64>,
    radius: f64,
    kappa: f64,
    theta: f64,
    max_iters: usize,
) -> TcgResult {
    let (rows, cols) = grad.shape();
    let mut eta = DMatrix::zeros(rows, cols);
    let mut h_eta = DMatrix::zeros(rows, cols);
    let mut r = grad.clone();
    let mut r_r = r.norm_squared();
    let norm_r0 = libm::sqrt(r_r);
    if norm_r0 == 0.0 {
        return TcgResult { step: eta, hess_step: h_eta, stop: TcgStop::ResidualReduced, iterations: 0 };
    }
    let target = norm_r0 * libm::pow(norm_r0, theta).min(kappa);
    let mut delta = -&r;
    let mut e_pe = 0.0;
    let mut e_pd = 0.0;
    let mut d_pd = r_r;
    let mut model = 0.0;
    let radius_sq = radius * radius;

    for j in 0..max_iters {
        let h_delta = hess(&delta);
        let d_hd = delta.dot(&h_delta);
        let alpha = r_r / d_hd;
        let e_pe_new = e_pe + 2.0 * alpha * e_pd + alpha * alpha * d_pd;
        if d_hd <= 0.0 || e_pe_new >= radius_sq || !alpha.is_finite() {
            let disc = (e_pd * e_pd + d_pd * (radius_sq - e_pe)).max(0.0);
            let tau = (-e_pd + libm::sqrt(disc)) / d_pd;
            eta += &delta * tau;
            h_eta += &h_delta * tau;
            let stop = if d_hd <= 0.0 { TcgStop::NegativeCurvature } else { TcgStop::ExceededRadius };
            return TcgResult { step: eta, hess_step: h_eta, stop, iterations: j + 1 };
        }
        e_pe = e_pe_new;
        let new_eta = &eta + &delta * alpha;
        let new_h_eta = &h_eta + &h_delta * alpha;
        let new_model = new_eta.dot(grad) + 0.5 * new_eta.dot(&new_h_eta);
        if new_model >= model {
            return TcgResult { step: eta, hess_step: h_eta, stop: TcgStop::ModelIncreased, iterations: j + 1 };
        }
        eta = new_eta;
        h_eta = new_h_eta;
        model = new_model;

        r += &h_delta * alpha;
        let r_r_old = r_r;
        r_r = r.norm_squared();
        if libm::sqrt(r_r) <= target {
            return TcgResult { step: eta, hess_step: h_eta, stop: TcgStop::ResidualReduced, iterations: j + 1 };
        }
        let beta = r_r / r_r_old;
        delta = &delta * beta - &r;
        e_pd = beta * (e_pd + alpha * d_pd);
        d_pd = r_r + beta * beta * d_pd;
    }
    TcgResult { step: eta, hess_step: h_eta, stop: TcgStop::MaxIterations, iterations: max_iters }
}

fn tangent_dimension(manifold: ManifoldKind, n: usize, p: usize) -> usize {
    (n * p).saturating_sub(manifold.constraint_count(n)).max(1)
}

const LINE_SEARCH_MAX_HALVINGS: usize = 40;
const ARMIJO_C: f64 = 1e-4;

/// Minimizes `obj` starting from `y0`.
///
/// A supplied `warm_dir` is first consumed by an Armijo backtracking line
/// search (initial step 1, halving) before the trust-region loop starts.
/// Radius collapse is reported through [`Termination::RadiusCollapse`] and
/// the best iterate is still returned.
pub fn minimize<O: Objective>(
    obj: &O,
    y0: FactorPoint,
    warm_dir: Option<&TangentVector>,
    opts: &RtrOptions,
) -> (FactorPoint, RtrReport) {
    let manifold = obj.manifold();
    let mut y = y0.into_matrix();
    let (n, p) = y.shape();
    let (mut f, mut eval) = obj.evaluate(&y);
    let initial_cost = f;
    let mut g = obj.gradient(&y, &eval);

    let mut line_search_decrease = 0.0;
    if let Some(dir) = warm_dir {
        let u = dir.matrix();
        if u.shape() == y.shape() && u.norm() > 0.0 {
            let slope = g.dot(u);
            let mut t = 1.0;
            for _ in 0..LINE_SEARCH_MAX_HALVINGS {
                if let Ok(trial) = manifold.retract(&y, u, t) {
                    let (ft, et) = obj.evaluate(&trial);
                    if ft < f && ft <= f + ARMIJO_C * t * slope {
                        line_search_decrease = f - ft;
                        y = trial;
                        f = ft;
                        eval = et;
                        g = obj.gradient(&y, &eval);
                        break;
                    }
                }
                t *= 0.5;
            }
        }
    }

    let default_radius = 0.1 * libm::sqrt((n * p) as f64);
    let mut radius = opts.initial_radius.unwrap_or(default_radius);
    let max_radius = opts.max_radius.unwrap_or(10.0 * radius).max(radius);
    let max_tcg = opts.max_tcg_iters.unwrap_or_else(|| tangent_dimension(manifold, n, p));

    let mut grad_norm = g.norm();
    let mut iterations = 0;
    let mut tcg_iterations = 0;
    let termination = loop {
        if grad_norm <= opts.grad_tol {
            break Termination::Tolerance;
        }
        if iterations >= opts.max_inner_iters {
            break Termination::MaxIterations;
        }
        if radius < opts.min_radius {
            break Termination::RadiusCollapse;
        }
        iterations += 1;

        // Re-projecting keeps round-off in the tCG iterates from leaving the
        // tangent space when the penalty term dominates the Hessian.
        let hess = |d: &DMatrix<f64>| {
            let d = manifold.project(&y, d);
            manifold.project(&y, &obj.hess_vec(&y, &eval, &d))
        };
        let model = tcg(&g, hess, radius, opts.kappa, opts.theta, max_tcg);
        tcg_iterations += model.iterations;

        let proposal = manifold.retract(&y, &model.step, 1.0).ok().map(|yp| {
            let (fp, ep) = obj.evaluate(&yp);
            (yp, fp, ep)
        });
        let reg = f.abs().max(1.0) * f64::EPSILON * 1e3;
        let denom = -g.dot(&model.step) - 0.5 * model.step.dot(&model.hess_step) + reg;
        let model_decreased = denom >= 0.0;
        let rho = match &proposal {
            Some((_, fp, _)) if fp.is_finite() => (f - fp + reg) / denom,
            _ => f64::NEG_INFINITY,
        };

        if !(rho >= 0.25) || !model_decreased {
            radius *= 0.25;
        } else if rho > 0.75
            && matches!(model.stop, TcgStop::NegativeCurvature | TcgStop::ExceededRadius)
        {
            radius = (2.0 * radius).min(max_radius);
        }

        if model_decreased && rho > opts.rho_prime {
            if let Some((yp, fp, ep)) = proposal {
                y = yp;
                f = fp;
                eval = ep;
                g = obj.gradient(&y, &eval);
                grad_norm = g.norm();
            }
        }
    };

    let report = RtrReport {
        grad_norm,
        iterations,
        tcg_iterations,
        initial_cost,
        final_cost: f,
        line_search_decrease,
        termination,
    };
    (FactorPoint::from_parts_unchecked(y, manifold), report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{hessian_from_euclidean, random_point};
    use alloc::vec;
    use alloc::vec::Vec;
    use core::cell::RefCell;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `<C, Y Yᵀ>` restricted to a manifold (no constraints).
    struct Quadratic {
        c: DMatrix<f64>,
        manifold: ManifoldKind,
        accepted: RefCell<Vec<f64>>,
    }

    impl Objective for Quadratic {
        type Eval = DMatrix<f64>;
        fn manifold(&self) -> ManifoldKind {
            self.manifold
        }
        fn evaluate(&self, y: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
            let w = &self.c * y;
            (w.dot(y), w)
        }
        fn gradient(&self, y: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
            self.accepted.borrow_mut().push(w.dot(y));
            let z = self.manifold.multiplier(y, w);
            (w - self.manifold.adjoint_times(&z, y)) * 2.0
        }
        fn hess_vec(&self, y: &DMatrix<f64>, w: &DMatrix<f64>, u: &DMatrix<f64>) -> DMatrix<f64> {
            let h = &self.c * u * 2.0;
            hessian_from_euclidean(self.manifold, y, u, &h, w)
        }
    }

    /// Convex least squares `½‖Y - T‖²` on the free manifold.
    struct LeastSquares {
        target: DMatrix<f64>,
    }

    impl Objective for LeastSquares {
        type Eval = ();
        fn manifold(&self) -> ManifoldKind {
            ManifoldKind::Free
        }
        fn evaluate(&self, y: &DMatrix<f64>) -> (f64, ()) {
            (0.5 * (y - &self.target).norm_squared(), ())
        }
        fn gradient(&self, y: &DMatrix<f64>, _: &()) -> DMatrix<f64> {
            y - &self.target
        }
        fn hess_vec(&self, _: &DMatrix<f64>, _: &(), u: &DMatrix<f64>) -> DMatrix<f64> {
            u.clone()
        }
    }

    #[test]
    fn tcg_identity_hessian_takes_newton_step() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 3.0]);
        let out = tcg(&g, |d| d.clone(), 1e6, 0.1, 1.0, 10);
        assert!((out.step + &g).norm() < 1e-15);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn tcg_negative_curvature_hits_boundary() {
        let g = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let out = tcg(&g, |d| -d, 0.3, 0.1, 1.0, 10);
        assert_eq!(out.stop, TcgStop::NegativeCurvature);
        assert!((out.step.norm() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn tcg_matches_dense_model_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = DMatrix::from_fn(10, 10, |_, _| rng.gen_range(-1.0..1.0));
        let h = &a * a.transpose() + DMatrix::identity(10, 10);
        let g = DMatrix::from_fn(10, 1, |_, _| rng.gen_range(-1.0..1.0));
        let kappa = 1e-10;
        let out = tcg(&g, |d| &h * d, 1e6, kappa, 1.0, 100);
        assert_eq!(out.stop, TcgStop::ResidualReduced);
        let exact = -h.clone().lu().solve(&g).unwrap();
        let resid = &h * &out.step + &g;
        assert!(resid.norm() <= kappa * g.norm());
        assert!((out.step - exact).norm() <= 1e-8 * (1.0 + g.norm()));
    }

    #[test]
    fn tcg_step_stays_inside_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = DMatrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
            let h = (&a + a.transpose()) * 0.5;
            let g = DMatrix::from_fn(6, 1, |_, _| rng.gen_range(-1.0..1.0));
            let radius = rng.gen_range(0.01..2.0);
            let out = tcg(&g, |d| &h * d, radius, 0.1, 1.0, 50);
            assert!(out.step.norm() <= radius * (1.0 + 1e-12));
            // Model decrease at least that of the Cauchy point.
            let model = |e: &DMatrix<f64>| e.dot(&g) + 0.5 * e.dot(&(&h * e));
            let ghg = g.dot(&(&h * &g));
            let gn = g.norm();
            let tau = if ghg <= 0.0 { 1.0 } else { (gn.powi(3) / (radius * ghg)).min(1.0) };
            let cauchy = -&g * (tau * radius / gn);
            assert!(model(&out.step) <= model(&cauchy) + 1e-12);
        }
    }

    #[test]
    fn convex_quadratic_converges_monotonically() {
        let target = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, -3.0, 0.5, 4.0, -1.0]);
        let obj = LeastSquares { target: target.clone() };
        let y0 = FactorPoint::new(DMatrix::zeros(3, 2), ManifoldKind::Free).unwrap();
        let opts = RtrOptions { grad_tol: 1e-10, ..RtrOptions::default() };
        let (y, report) = minimize(&obj, y0, None, &opts);
        assert_eq!(report.termination, Termination::Tolerance);
        assert!(report.grad_norm <= 1e-10);
        assert!((y.matrix() - target).norm() < 1e-9);
        assert!(report.final_cost <= report.initial_cost);
    }

    #[test]
    fn escapes_sphere_saddle_with_warm_direction() {
        // min <diag(1,-1), Y Yᵀ> on the unit sphere; Y = e1 is a saddle.
        let c = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        let obj = Quadratic { c, manifold: ManifoldKind::UnitTrace, accepted: RefCell::new(vec![]) };
        let y0 = FactorPoint::new(DMatrix::from_column_slice(2, 1, &[1.0, 0.0]), ManifoldKind::UnitTrace).unwrap();
        let u = TangentVector::at(&y0, DMatrix::from_column_slice(2, 1, &[0.0, 1.0])).unwrap();

        let opts = RtrOptions { grad_tol: 1e-12, ..RtrOptions::default() };
        let (stuck, report) = minimize(&obj, y0.clone(), None, &opts);
        assert_eq!(report.iterations, 0);
        assert_eq!(stuck, y0);

        let (y, report) = minimize(&obj, y0, Some(&u), &opts);
        assert!(report.line_search_decrease > 0.0);
        assert!((report.final_cost + 1.0).abs() < 1e-12, "{}", report.final_cost);
        assert!(y.matrix()[1].abs() > 1.0 - 1e-6);
    }

    #[test]
    fn accepted_costs_are_nonincreasing_on_oblique() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = DMatrix::from_fn(8, 8, |_, _| rng.gen_range(-1.0..1.0));
        let c = (&a + a.transpose()) * 0.5;
        let obj = Quadratic { c, manifold: ManifoldKind::UnitDiagonal, accepted: RefCell::new(vec![]) };
        let y0 = random_point(8, 3, ManifoldKind::UnitDiagonal, 1);
        let opts = RtrOptions { grad_tol: 1e-9, ..RtrOptions::default() };
        let (y, report) = minimize(&obj, y0, None, &opts);
        assert_eq!(report.termination, Termination::Tolerance);
        assert!(ManifoldKind::UnitDiagonal.is_feasible(y.matrix(), 1e-14));
        let costs = obj.accepted.borrow();
        for w in costs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
    }
}
