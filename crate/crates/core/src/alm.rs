//! Augmented Lagrangian outer loop.
//!
//! Each outer iteration minimizes the factorized augmented Lagrangian
//! `Ψ_k(Y) = <C, YYᵀ> - yᵀ(A(YYᵀ) - b) + σ/2 ‖A(YYᵀ) - b‖²` on the factor
//! manifold with the trust-region solver, updates `y`, assembles the dual
//! matrix `S = C - A*(y) - B*(z)`, and certifies or continues:
//!
//! 1. truncate `Y` to its numerical rank `r`,
//! 2. append one zero column per negative eigenvalue of `S` (at most `δ_ne`)
//!    and hand the matching eigenvectors to the next subproblem as a descent
//!    direction,
//! 3. raise or lower `σ` depending on whether feasibility lags behind
//!    stationarity.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::manifolds::{
    hessian_from_euclidean, random_point_with, FactorPoint, ManifoldKind, TangentVector,
};
use crate::problem::{KktResidues, SdpProblem};
use crate::rtr::{self, Objective, RtrOptions, Termination};
use crate::spectral::{extreme_eigs, thin_svd, EigOptions, EigenPair, Side, SymOperator, DENSE_THRESHOLD};

/// Accuracy requested for the smallest eigenpairs of `S`.
const EIG_TOL_SMALLEST: f64 = 1e-10;
/// `λ_max` only scales the dual residue, so it can be looser.
const EIG_TOL_LARGEST: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub p0: usize,
    pub sigma0: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub gamma: f64,
    pub tau: f64,
    /// Relative singular-value threshold used for rank estimation.
    pub theta: f64,
    /// Maximum number of columns added per escape step.
    pub delta_ne: usize,
    pub eps0: f64,
    pub eps_decay: f64,
    pub eps_floor: f64,
    pub max_iters: usize,
    /// Wall-time limit in seconds, checked between outer iterations.
    pub max_time: Option<f64>,
    pub seed: u64,
    pub dense_threshold: usize,
    /// Inner solver settings; `grad_tol` is overwritten by the ε schedule.
    pub rtr: RtrOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            p0: 2,
            sigma0: 1.0,
            sigma_min: 1e-2,
            sigma_max: 1e7,
            gamma: 2.0,
            tau: 1.0,
            theta: 1e-3,
            delta_ne: 10,
            eps0: 1e-2,
            eps_decay: 0.5,
            eps_floor: 1e-11,
            max_iters: 300,
            max_time: None,
            seed: 0,
            dense_threshold: DENSE_THRESHOLD,
            rtr: RtrOptions::default(),
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidOptions(msg.into()));
        if !(self.tol > 0.0) {
            return fail("tol must be positive");
        }
        if self.p0 == 0 {
            return fail("p0 must be at least 1");
        }
        if !(self.gamma > 1.0) {
            return fail("gamma must exceed 1");
        }
        if !(self.tau > 0.0) {
            return fail("tau must be positive");
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return fail("theta must lie in (0, 1)");
        }
        if !(self.sigma_min > 0.0 && self.sigma_min <= self.sigma0 && self.sigma0 <= self.sigma_max) {
            return fail("need 0 < sigma_min <= sigma0 <= sigma_max");
        }
        if self.delta_ne == 0 {
            return fail("delta_ne must be at least 1");
        }
        if !(self.eps0 > 0.0 && self.eps_floor > 0.0 && self.eps_decay > 0.0 && self.eps_decay <= 1.0) {
            return fail("invalid epsilon schedule");
        }
        if !(self.rtr.rho_prime > 0.0 && self.rtr.rho_prime < 0.25) {
            return fail("rho_prime must lie in (0, 1/4)");
        }
        Ok(())
    }

    /// Subproblem gradient tolerance `ε_k = max(ε_floor, ε0 · β^k)`.
    pub fn epsilon(&self, k: usize) -> f64 {
        let k = i32::try_from(k).unwrap_or(i32::MAX);
        (self.eps0 * libm::pow(self.eps_decay, f64::from(k))).max(self.eps_floor)
    }
}

/// Source of elapsed wall time in seconds. The core has no clock of its own.
pub trait Clock {
    fn elapsed_secs(&self) -> f64;
}

/// Clock that never advances; time limits never trigger.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    IterationLimit,
    TimeLimit,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::IterationLimit => "iteration-limit",
            Status::TimeLimit => "time-limit",
        }
    }
}

/// One row of the per-iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub p: usize,
    pub sigma: f64,
    pub eps: f64,
    pub eta_p: f64,
    pub eta_d: f64,
    pub eta_g: f64,
    pub eta_max: f64,
    pub grad_norm: f64,
    pub inner_iters: usize,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub factor: FactorPoint,
    pub y: DVector<f64>,
    pub z: DVector<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Objective in the problem's reporting convention.
    pub objective: f64,
    pub residues: KktResidues,
    pub trace: Vec<IterationRecord>,
    pub status: Status,
}

impl Solution {
    /// `S = C - A*(y) - B*(z)` for this solution.
    pub fn dual_operator<'a>(&self, problem: &'a SdpProblem) -> DualOperator<'a> {
        DualOperator::new(problem, self.y.clone(), self.z.clone(), DENSE_THRESHOLD)
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// The dual slack `S = C - A*(λ) - B*(z)` as a matrix-free operator, with a
/// dense copy for small dimensions.
#[derive(Debug, Clone)]
pub struct DualOperator<'a> {
    problem: &'a SdpProblem,
    lambda: DVector<f64>,
    z: DVector<f64>,
    dense: Option<DMatrix<f64>>,
}

impl<'a> DualOperator<'a> {
    pub fn new(problem: &'a SdpProblem, lambda: DVector<f64>, z: DVector<f64>, dense_threshold: usize) -> Self {
        let mut op = Self { problem, lambda, z, dense: None };
        if problem.dim() <= dense_threshold {
            op.dense = Some(op.build_dense());
        }
        op
    }

    fn build_dense(&self) -> DMatrix<f64> {
        let n = self.problem.dim();
        let mut s = self.problem.cost().to_dense() - self.problem.adjoint_dense(&self.lambda);
        match self.problem.manifold() {
            ManifoldKind::Free => {}
            ManifoldKind::UnitTrace => {
                for i in 0..n {
                    s[(i, i)] -= self.z[0];
                }
            }
            ManifoldKind::UnitDiagonal => {
                for i in 0..n {
                    s[(i, i)] -= self.z[i];
                }
            }
        }
        s
    }

    pub fn multiplier_y(&self) -> &DVector<f64> {
        &self.lambda
    }

    pub fn multiplier_z(&self) -> &DVector<f64> {
        &self.z
    }
}

impl SymOperator for DualOperator<'_> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn apply(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        if let Some(d) = &self.dense {
            return d * v;
        }
        let mut out = DMatrix::zeros(v.nrows(), v.ncols());
        self.problem.cost().mul_acc(1.0, v, &mut out);
        self.problem.adjoint_acc(-1.0, &self.lambda, v, &mut out);
        out - self.problem.manifold().adjoint_times(&self.z, v)
    }

    fn to_dense(&self) -> Option<DMatrix<f64>> {
        Some(self.dense.clone().unwrap_or_else(|| self.build_dense()))
    }
}

/// The factorized augmented Lagrangian `Ψ_k` for fixed `y^k` and `σ_k`.
#[derive(Debug, Clone, Copy)]
pub struct AugmentedLagrangian<'a> {
    problem: &'a SdpProblem,
    y: &'a DVector<f64>,
    sigma: f64,
}

/// Cached quantities at one point of `Ψ_k`.
#[derive(Debug, Clone)]
pub struct AlEval {
    /// `A(X) - b`.
    pub residual: DVector<f64>,
    /// `y - σ (A(X) - b)`, so that `∇Φ(X) = C - A*(λ)`.
    pub lambda: DVector<f64>,
    /// `∇Φ(X) Y`.
    pub grad_phi_y: DMatrix<f64>,
}

impl<'a> AugmentedLagrangian<'a> {
    pub fn new(problem: &'a SdpProblem, y: &'a DVector<f64>, sigma: f64) -> Self {
        Self { problem, y, sigma }
    }

    /// `∇Φ(X) V = C V - A*(λ) V`.
    fn grad_phi_times(&self, lambda: &DVector<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(v.nrows(), v.ncols());
        self.problem.cost().mul_acc(1.0, v, &mut out);
        self.problem.adjoint_acc(-1.0, lambda, v, &mut out);
        out
    }

    /// Euclidean Hessian `H̃ = 2 (∇Φ(X) U + σ A*(A(YUᵀ + UYᵀ)) Y)`.
    pub fn euclidean_hess(&self, y: &DMatrix<f64>, eval: &AlEval, u: &DMatrix<f64>) -> DMatrix<f64> {
        let mut h = self.grad_phi_times(&eval.lambda, u);
        if self.problem.num_constraints() > 0 {
            let dir = self.problem.apply_constraints_sym(y, u) * 2.0;
            self.problem.adjoint_acc(self.sigma, &dir, y, &mut h);
        }
        h * 2.0
    }
}

impl Objective for AugmentedLagrangian<'_> {
    type Eval = AlEval;

    fn manifold(&self) -> ManifoldKind {
        self.problem.manifold()
    }

    fn evaluate(&self, y: &DMatrix<f64>) -> (f64, AlEval) {
        let residual = self.problem.apply_constraints_sym(y, y) - self.problem.rhs();
        let cost = self.problem.cost().inner_sym(y, y) - self.y.dot(&residual)
            + 0.5 * self.sigma * residual.norm_squared();
        let lambda = self.y - &residual * self.sigma;
        let grad_phi_y = self.grad_phi_times(&lambda, y);
        (cost, AlEval { residual, lambda, grad_phi_y })
    }

    fn gradient(&self, y: &DMatrix<f64>, eval: &AlEval) -> DMatrix<f64> {
        let manifold = self.problem.manifold();
        let z = manifold.multiplier(y, &eval.grad_phi_y);
        (&eval.grad_phi_y - manifold.adjoint_times(&z, y)) * 2.0
    }

    fn hess_vec(&self, y: &DMatrix<f64>, eval: &AlEval, u: &DMatrix<f64>) -> DMatrix<f64> {
        let h = self.euclidean_hess(y, eval, u);
        hessian_from_euclidean(self.problem.manifold(), y, u, &h, &eval.grad_phi_y)
    }
}

/// Multiplier `z` and dual operator `S = C + σ A*(A(X) - b - y/σ) - B*(z)`.
pub fn assemble_dual<'a>(
    problem: &'a SdpProblem,
    point: &FactorPoint,
    y: &DVector<f64>,
    sigma: f64,
    dense_threshold: usize,
) -> Result<(DVector<f64>, DualOperator<'a>)> {
    let residual = problem.apply_constraints(point.matrix())? - problem.rhs();
    let lambda = y - residual * sigma;
    let al = AugmentedLagrangian::new(problem, y, sigma);
    let w = al.grad_phi_times(&lambda, point.matrix());
    let z = problem.manifold().multiplier(point.matrix(), &w);
    let op = DualOperator::new(problem, lambda, z.clone(), dense_threshold);
    Ok((z, op))
}

/// Eigenvector-based descent direction for the rank-increased subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct EscapeDirection {
    /// `n × δ` eigenvectors of the `δ` most negative eigenvalues.
    pub vectors: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub delta: usize,
    /// Number of eigenvalues below `-tol` among those computed.
    pub n_ne_est: usize,
}

impl EscapeDirection {
    /// `U = [0_{n×r}, v_1, …, v_δ]`.
    pub fn padded(&self, r: usize) -> DMatrix<f64> {
        let n = self.vectors.nrows();
        let mut u = DMatrix::zeros(n, r + self.delta);
        u.columns_mut(r, self.delta).copy_from(&self.vectors);
        u
    }
}

/// Builds the escape direction from precomputed smallest eigenpairs (sorted
/// ascending). At most `n - r` columns are added.
pub fn escape_from_pairs(pairs: &[EigenPair], n: usize, r: usize, delta_ne: usize, tol: f64) -> EscapeDirection {
    let n_ne_est = pairs.iter().filter(|p| p.value < -tol).count();
    let delta = n_ne_est.min(delta_ne).min(n.saturating_sub(r));
    let mut vectors = DMatrix::zeros(n, delta);
    for (j, pair) in pairs.iter().take(delta).enumerate() {
        vectors.set_column(j, &pair.vector);
    }
    let eigenvalues = pairs.iter().take(delta).map(|p| p.value).collect();
    EscapeDirection { vectors, eigenvalues, delta, n_ne_est }
}

/// Computes the `δ_ne + 1` smallest eigenpairs of `S` and returns the escape
/// direction built from the negative ones.
pub fn escape_direction<S: SymOperator + ?Sized>(
    s: &S,
    r: usize,
    delta_ne: usize,
    tol: f64,
    eig: &EigOptions,
) -> Result<EscapeDirection> {
    let n = s.dim();
    let pairs = extreme_eigs(s, (delta_ne + 1).min(n), Side::Smallest, EIG_TOL_SMALLEST, eig)?;
    Ok(escape_from_pairs(&pairs, n, r, delta_ne, tol))
}

/// Replaces `Y` by `W_r D_r`, where `r` counts singular values above
/// `θ · s_1`, then renormalizes onto the manifold. A zero factor is replaced
/// by a random single-column point.
pub fn truncate_rank(point: &FactorPoint, theta: f64, seed: u64) -> (FactorPoint, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    truncate_rank_with(point, theta, &mut rng)
}

fn truncate_rank_with(point: &FactorPoint, theta: f64, rng: &mut ChaCha8Rng) -> (FactorPoint, usize) {
    let manifold = point.manifold();
    let svd = thin_svd(point.matrix());
    let s1 = svd.singular_values.get(0).copied().unwrap_or(0.0);
    if !(s1 > 0.0) {
        return (random_point_with(point.nrows(), 1, manifold, rng), 1);
    }
    let r = svd.singular_values.iter().take_while(|&&s| s > theta * s1).count().max(1);
    let mut y = svd.w.columns(0, r).into_owned();
    for j in 0..r {
        let s = svd.singular_values[j];
        y.column_mut(j).scale_mut(s);
    }
    // Discarded singular mass perturbs B(YYᵀ) slightly; project back.
    let y = manifold.normalize(y).unwrap_or_else(|_| random_point_with(point.nrows(), r, manifold, rng).into_matrix());
    (FactorPoint::from_parts_unchecked(y, manifold), r)
}

/// Self-adaptive penalty rule.
pub fn update_penalty(sigma: f64, eta_p_raw: f64, grad_norm: f64, opts: &SolverOptions) -> f64 {
    if eta_p_raw > opts.tau * grad_norm {
        (sigma * opts.gamma).min(opts.sigma_max)
    } else {
        (sigma / opts.gamma).max(opts.sigma_min)
    }
}

struct Snapshot {
    factor: FactorPoint,
    y: DVector<f64>,
    z: DVector<f64>,
    lambda_min: f64,
    lambda_max: f64,
    residues: KktResidues,
}

/// Solves `problem` without a wall clock.
pub fn solve(problem: &SdpProblem, opts: &SolverOptions) -> Result<Solution> {
    solve_with_clock(problem, opts, &NoClock)
}

pub fn solve_with_clock<C: Clock + ?Sized>(
    problem: &SdpProblem,
    opts: &SolverOptions,
    clock: &C,
) -> Result<Solution> {
    opts.validate()?;
    let n = problem.dim();
    let manifold = problem.manifold();
    let b_norm = problem.rhs().norm();
    let start = clock.elapsed_secs();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut point = random_point_with(n, opts.p0.min(n), manifold, &mut rng);
    let mut y = DVector::zeros(problem.num_constraints());
    let mut sigma = opts.sigma0;
    let mut warm: Option<TangentVector> = None;
    let mut relax_next = false;
    let mut trace = Vec::new();
    let mut best: Option<Snapshot> = None;
    let mut status = Status::IterationLimit;

    for k in 0..opts.max_iters {
        if let Some(limit) = opts.max_time {
            if clock.elapsed_secs() - start > limit {
                status = Status::TimeLimit;
                break;
            }
        }
        let mut eps = opts.epsilon(k);
        if relax_next {
            eps *= 10.0;
            relax_next = false;
        }

        let sub = AugmentedLagrangian::new(problem, &y, sigma);
        let inner_opts = RtrOptions { grad_tol: eps, ..opts.rtr };
        let (next_point, report) = rtr::minimize(&sub, point, warm.take().as_ref(), &inner_opts);
        point = next_point;
        if report.termination == Termination::RadiusCollapse {
            relax_next = true;
        }

        let residual = problem.apply_constraints_sym(point.matrix(), point.matrix()) - problem.rhs();
        let y_next = &y - &residual * sigma;
        let (z, s_op) = assemble_dual(problem, &point, &y, sigma, opts.dense_threshold)?;

        let eig = EigOptions { dense_threshold: opts.dense_threshold, seed: opts.seed.wrapping_add(k as u64), ..EigOptions::default() };
        let smallest = extreme_eigs(&s_op, (opts.delta_ne + 1).min(n), Side::Smallest, EIG_TOL_SMALLEST, &eig)?;
        let largest = extreme_eigs(&s_op, 1, Side::Largest, EIG_TOL_LARGEST, &eig)?;
        let lambda_min = smallest[0].value;
        let lambda_max = largest[0].value;
        let residues = problem.kkt_residues(point.matrix(), &y_next, &z, lambda_min, lambda_max)?;

        trace.push(IterationRecord {
            k,
            p: point.ncols(),
            sigma,
            eps,
            eta_p: residues.eta_p,
            eta_d: residues.eta_d,
            eta_g: residues.eta_g,
            eta_max: residues.eta_max,
            grad_norm: report.grad_norm,
            inner_iters: report.iterations,
            time: clock.elapsed_secs() - start,
        });

        if best.as_ref().map_or(true, |b| residues.eta_max < b.residues.eta_max) {
            best = Some(Snapshot {
                factor: point.clone(),
                y: y_next.clone(),
                z: z.clone(),
                lambda_min,
                lambda_max,
                residues,
            });
        }
        if residues.eta_max <= opts.tol {
            status = Status::Converged;
            // Report a rank-revealing factor when dropping the negligible
            // columns keeps the certificate.
            let (mut factor, mut residues) = (point, residues);
            let (truncated, r) = truncate_rank_with(&factor, opts.theta, &mut rng);
            if r < factor.ncols() {
                let res = problem.kkt_residues(truncated.matrix(), &y_next, &z, lambda_min, lambda_max)?;
                if res.eta_max <= opts.tol {
                    factor = truncated;
                    residues = res;
                }
            }
            best = Some(Snapshot { factor, y: y_next, z, lambda_min, lambda_max, residues });
            break;
        }

        // Rank update and saddle escape.
        let (truncated, r) = truncate_rank_with(&point, opts.theta, &mut rng);
        let tol_escape = (1e-4 * opts.tol * (1.0 + lambda_max.abs())).max(1e-12);
        let escape = escape_from_pairs(&smallest, n, r, opts.delta_ne, tol_escape);
        let cols = r + escape.delta;
        let mut y_new = DMatrix::zeros(n, cols);
        y_new.columns_mut(0, r).copy_from(truncated.matrix());
        let next = FactorPoint::from_parts_unchecked(y_new, manifold);
        if escape.delta > 0 {
            let mut u = DMatrix::zeros(n, cols);
            u.columns_mut(r, escape.delta).copy_from(&escape.vectors);
            warm = Some(TangentVector::from_matrix_unchecked(u));
        }
        point = next;

        let eta_p_raw = residual.norm() / (1.0 + b_norm);
        sigma = update_penalty(sigma, eta_p_raw, report.grad_norm, opts);
        y = y_next;
    }

    let best = best.ok_or_else(|| Error::InvalidOptions("max_iters must be at least 1".into()))?;
    let internal = problem.objective(best.factor.matrix())?;
    Ok(Solution {
        objective: problem.reported_objective(internal),
        factor: best.factor,
        y: best.y,
        z: best.z,
        lambda_min: best.lambda_min,
        lambda_max: best.lambda_max,
        residues: best.residues,
        trace,
        status,
    })
}

/// Extreme eigenvalues of `S` together with the KKT residues they imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub residues: KktResidues,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Recomputes the residues of a stored primal-dual triple `(Y, y, z)`.
pub fn certify(
    problem: &SdpProblem,
    factor: &DMatrix<f64>,
    dual_y: &DVector<f64>,
    z: &DVector<f64>,
    eig: &EigOptions,
) -> Result<Certificate> {
    let l = problem.manifold().constraint_count(problem.dim());
    if dual_y.len() != problem.num_constraints() {
        return Err(Error::DimensionMismatch {
            context: "certify multiplier y",
            expected: problem.num_constraints(),
            found: dual_y.len(),
        });
    }
    if z.len() != l {
        return Err(Error::DimensionMismatch { context: "certify multiplier z", expected: l, found: z.len() });
    }
    let s = DualOperator::new(problem, dual_y.clone(), z.clone(), eig.dense_threshold);
    let lambda_min = extreme_eigs(&s, 1, Side::Smallest, EIG_TOL_SMALLEST, eig)?[0].value;
    let lambda_max = extreme_eigs(&s, 1, Side::Largest, EIG_TOL_LARGEST, eig)?[0].value;
    let residues = problem.kkt_residues(factor, dual_y, z, lambda_min, lambda_max)?;
    Ok(Certificate { residues, lambda_min, lambda_max })
}
