//! Extreme eigenpairs of implicit symmetric operators and thin SVDs.
//!
//! Operators of dimension at most [`DENSE_THRESHOLD`] are densified once and
//! handed to a full symmetric eigensolver. Larger ones go through a
//! restarted Lanczos iteration with full reorthogonalization: the basis is
//! expanded by single vectors up to `min(n, max(4k, 30))`, Rayleigh-Ritz is
//! applied to the whole basis, and the wanted Ritz vectors are kept as the
//! seed of the next cycle (thick restart).

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::manifolds::gaussian_matrix;

/// Dimension up to which operators are densified.
pub const DENSE_THRESHOLD: usize = 1024;

/// A self-adjoint linear operator known through its action on tall-thin blocks.
pub trait SymOperator {
    fn dim(&self) -> usize;

    /// `S · v` for an `n × k` block `v`.
    fn apply(&self, v: &DMatrix<f64>) -> DMatrix<f64>;

    /// Dense form, when the operator can produce it cheaply.
    fn to_dense(&self) -> Option<DMatrix<f64>> {
        None
    }
}

impl SymOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        self * v
    }

    fn to_dense(&self) -> Option<DMatrix<f64>> {
        Some(self.clone())
    }
}

/// Wraps a closure as a [`SymOperator`].
pub struct FnOperator<F> {
    n: usize,
    action: F,
}

impl<F: Fn(&DMatrix<f64>) -> DMatrix<f64>> FnOperator<F> {
    pub fn new(n: usize, action: F) -> Self {
        Self { n, action }
    }
}

impl<F: Fn(&DMatrix<f64>) -> DMatrix<f64>> SymOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        (self.action)(v)
    }
}

/// Dense matrix of an operator: its own dense form, or `S · I` otherwise.
pub fn densify<S: SymOperator + ?Sized>(op: &S) -> DMatrix<f64> {
    let m = op.to_dense().unwrap_or_else(|| op.apply(&DMatrix::identity(op.dim(), op.dim())));
    (&m + m.transpose()) * 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Smallest,
    Largest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigOptions {
    pub dense_threshold: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { dense_threshold: DENSE_THRESHOLD, max_restarts: 50, seed: 0 }
    }
}

/// The `k` extreme eigenpairs of `op` on the requested side, sorted ascending
/// for [`Side::Smallest`] and descending for [`Side::Largest`].
///
/// Returned pairs satisfy `‖S v - λ v‖ <= tol · max(1, |λ|)`.
pub fn extreme_eigs<S: SymOperator + ?Sized>(
    op: &S,
    k: usize,
    side: Side,
    tol: f64,
    opts: &EigOptions,
) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(alloc::format!(
            "requested {k} eigenpairs of a {n}-dimensional operator"
        )));
    }
    if n <= opts.dense_threshold {
        Ok(dense_extreme_eigs(&densify(op), k, side))
    } else {
        lanczos_extreme_eigs(op, k, side, tol, opts)
    }
}

/// Full symmetric eigensolve, keeping `k` pairs from one end of the spectrum.
pub fn dense_extreme_eigs(m: &DMatrix<f64>, k: usize, side: Side) -> Vec<EigenPair> {
    let eig = SymmetricEigen::new(m.clone());
    let order = sorted_order(eig.eigenvalues.as_slice(), side);
    order
        .into_iter()
        .take(k)
        .map(|i| EigenPair { value: eig.eigenvalues[i], vector: eig.eigenvectors.column(i).into_owned() })
        .collect()
}

fn sorted_order(values: &[f64], side: Side) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = values[a].total_cmp(&values[b]);
        match side {
            Side::Smallest => ord,
            Side::Largest => ord.reverse(),
        }
    });
    idx
}

/// Orthogonalizes `v` against the first `cols` columns of `q` (two passes)
/// and returns its remaining norm.
fn orthogonalize(q: &DMatrix<f64>, cols: usize, v: &mut DVector<f64>) -> f64 {
    for _ in 0..2 {
        for j in 0..cols {
            let c = q.column(j).dot(v);
            v.axpy(-c, &q.column(j), 1.0);
        }
    }
    v.norm()
}

/// Restarted Lanczos with full reorthogonalization.
pub fn lanczos_extreme_eigs<S: SymOperator + ?Sized>(
    op: &S,
    k: usize,
    side: Side,
    tol: f64,
    opts: &EigOptions,
) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    let basis_dim = n.min((4 * k).max(30));
    let keep = (k + (basis_dim - k) / 2).min(basis_dim - 1).max(k.min(basis_dim - 1));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut q = DMatrix::<f64>::zeros(n, basis_dim);
    let mut sq = DMatrix::<f64>::zeros(n, basis_dim);
    let mut next = gaussian_matrix(n, 1, &mut rng).column(0).into_owned();
    let mut filled = 0usize;
    let mut best_residual = f64::INFINITY;

    for _restart in 0..=opts.max_restarts {
        while filled < basis_dim {
            let mut v = next.clone();
            let mut nrm = orthogonalize(&q, filled, &mut v);
            let mut attempts = 0;
            // Invariant subspace reached: continue with a fresh random direction.
            while nrm <= 1e-10 * (1.0 + next.norm()) && attempts < 10 {
                v = gaussian_matrix(n, 1, &mut rng).column(0).into_owned();
                nrm = orthogonalize(&q, filled, &mut v);
                attempts += 1;
            }
            if nrm <= 1e-300 {
                break;
            }
            v /= nrm;
            let sv = op.apply(&DMatrix::from_column_slice(n, 1, v.as_slice()));
            q.set_column(filled, &v);
            sq.set_column(filled, &sv.column(0));
            next = sv.column(0).into_owned();
            filled += 1;
        }

        let qb = q.columns(0, filled);
        let sqb = sq.columns(0, filled);
        let h = qb.transpose() * sqb;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let order = sorted_order(eig.eigenvalues.as_slice(), side);

        let mut pairs = Vec::with_capacity(k);
        let mut worst = 0.0f64;
        let mut first_unconverged: Option<DVector<f64>> = None;
        for &i in order.iter().take(k) {
            let theta = eig.eigenvalues[i];
            let coef = eig.eigenvectors.column(i);
            let x = &qb * coef;
            let r = &sqb * coef - &x * theta;
            let rel = r.norm() / theta.abs().max(1.0);
            worst = worst.max(rel);
            if rel > tol && first_unconverged.is_none() {
                first_unconverged = Some(r);
            }
            pairs.push(EigenPair { value: theta, vector: x });
        }
        best_residual = best_residual.min(worst);
        if worst <= tol || filled == n {
            return Ok(pairs);
        }

        // Thick restart on the leading Ritz vectors.
        let kept = keep.min(filled - 1);
        let mut new_q = DMatrix::<f64>::zeros(n, basis_dim);
        let mut new_sq = DMatrix::<f64>::zeros(n, basis_dim);
        for (slot, &i) in order.iter().take(kept).enumerate() {
            let coef = eig.eigenvectors.column(i);
            new_q.set_column(slot, &(&qb * coef));
            new_sq.set_column(slot, &(&sqb * coef));
        }
        q = new_q;
        sq = new_sq;
        filled = kept;
        next = first_unconverged.unwrap_or_else(|| gaussian_matrix(n, 1, &mut rng).column(0).into_owned());
    }
    Err(Error::EigenNotConverged { restarts: opts.max_restarts, residual: best_residual })
}

/// Thin singular value decomposition `Y = W diag(s) Vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinSvd {
    /// `n × k` with orthonormal columns, `k = min(n, p)`.
    pub w: DMatrix<f64>,
    /// Nonincreasing, nonnegative.
    pub singular_values: DVector<f64>,
    /// `p × k` with orthonormal columns.
    pub v: DMatrix<f64>,
}

pub fn thin_svd(y: &DMatrix<f64>) -> ThinSvd {
    let (n, p) = y.shape();
    let k = n.min(p);
    if k == 0 {
        return ThinSvd { w: DMatrix::zeros(n, 0), singular_values: DVector::zeros(0), v: DMatrix::zeros(p, 0) };
    }
    let svd = SVD::new(y.clone(), true, true);
    let u = svd.u.expect("left singular vectors requested");
    let vt = svd.v_t.expect("right singular vectors requested");
    let order = sorted_order(svd.singular_values.as_slice(), Side::Largest);
    let mut w = DMatrix::zeros(n, k);
    let mut v = DMatrix::zeros(p, k);
    let mut s = DVector::zeros(k);
    for (slot, &i) in order.iter().enumerate() {
        let col = u.column(i);
        let pivot = col.iter().fold(0.0f64, |best, &x| if x.abs() > best.abs() { x } else { best });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        w.set_column(slot, &(col * sign));
        v.set_column(slot, &(vt.row(i).transpose() * sign));
        s[slot] = svd.singular_values[i].max(0.0);
    }
    ThinSvd { w, singular_values: s, v }
}
