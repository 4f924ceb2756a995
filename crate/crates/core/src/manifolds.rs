//! Geometry of the factor manifolds `{Y : B(Y Yᵀ) = d}`.
//!
//! | kind           | point set              | tangent space at `Y`           |
//! |----------------|------------------------|--------------------------------|
//! | `Free`         | all `n × p` matrices   | everything                     |
//! | `UnitTrace`    | `‖Y‖_F = 1`            | `<U, Y> = 0`                   |
//! | `UnitDiagonal` | unit-norm rows         | `U(i,:) · Y(i,:) = 0` for all i |
//!
//! Gradients and Hessians are expressed through the Euclidean quantities of
//! the smooth cost `Ψ(Y) = Φ(Y Yᵀ)`: callers supply `W = ∇Φ(X) Y` and, for
//! Hessian-vector products, `H̃ = ∇²Ψ(Y)[U]`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use crate::problem::ManifoldKind;
use crate::error::{Error, Result};
use crate::problem::row_dot;

/// Tolerance used when validating externally supplied points.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// A factor `Y` together with the manifold it lives on.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPoint {
    y: DMatrix<f64>,
    manifold: ManifoldKind,
}

impl FactorPoint {
    /// Wraps `y`, checking the manifold constraint to [`FEASIBILITY_TOL`].
    pub fn new(y: DMatrix<f64>, manifold: ManifoldKind) -> Result<Self> {
        if !manifold.is_feasible(&y, FEASIBILITY_TOL) {
            return Err(Error::InvalidInput(alloc::format!(
                "factor is not on the {manifold} manifold"
            )));
        }
        Ok(Self { y, manifold })
    }

    /// Projects `y` onto the manifold first (row or global normalization).
    pub fn normalized(y: DMatrix<f64>, manifold: ManifoldKind) -> Result<Self> {
        Ok(Self { y: manifold.normalize(y)?, manifold })
    }

    pub(crate) fn from_parts_unchecked(y: DMatrix<f64>, manifold: ManifoldKind) -> Self {
        Self { y, manifold }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.y
    }

    pub fn manifold(&self) -> ManifoldKind {
        self.manifold
    }

    pub fn nrows(&self) -> usize {
        self.y.nrows()
    }

    /// Factorization size `p`.
    pub fn ncols(&self) -> usize {
        self.y.ncols()
    }

    /// Dense `X = Y Yᵀ`. Only meant for small problems and checks.
    pub fn gram(&self) -> DMatrix<f64> {
        &self.y * self.y.transpose()
    }
}

/// A tangent vector at some [`FactorPoint`].
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(DMatrix<f64>);

impl TangentVector {
    /// Wraps `u` after projecting it onto the tangent space at `point`.
    pub fn at(point: &FactorPoint, u: DMatrix<f64>) -> Result<Self> {
        project_tangent(point, &u)
    }

    pub(crate) fn from_matrix_unchecked(u: DMatrix<f64>) -> Self {
        Self(u)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

impl ManifoldKind {
    pub fn is_feasible(self, y: &DMatrix<f64>, tol: f64) -> bool {
        match self {
            ManifoldKind::Free => true,
            ManifoldKind::UnitTrace => (y.norm() - 1.0).abs() <= tol,
            ManifoldKind::UnitDiagonal => {
                (0..y.nrows()).all(|i| (libm::sqrt(row_dot(y, i, y, i)) - 1.0).abs() <= tol)
            }
        }
    }

    /// Metric projection onto the manifold.
    pub fn normalize(self, mut y: DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self {
            ManifoldKind::Free => {}
            ManifoldKind::UnitTrace => {
                let nrm = y.norm();
                if !(nrm > 0.0 && nrm.is_finite()) {
                    return Err(Error::StepRejected("zero or non-finite factor on the sphere"));
                }
                y /= nrm;
            }
            ManifoldKind::UnitDiagonal => {
                for i in 0..y.nrows() {
                    let nrm = libm::sqrt(row_dot(&y, i, &y, i));
                    if !(nrm > 0.0 && nrm.is_finite()) {
                        return Err(Error::StepRejected("zero or non-finite row on the oblique manifold"));
                    }
                    for k in 0..y.ncols() {
                        y[(i, k)] /= nrm;
                    }
                }
            }
        }
        Ok(y)
    }

    /// Orthogonal projection of `u` onto the tangent space at `y`.
    pub fn project(self, y: &DMatrix<f64>, u: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            ManifoldKind::Free => u.clone(),
            ManifoldKind::UnitTrace => {
                // Tr(B²X) = ‖Y‖² = 1 on the manifold; dividing keeps P idempotent
                // off-manifold too.
                let coef = u.dot(y) / y.norm_squared();
                u - y * coef
            }
            ManifoldKind::UnitDiagonal => {
                let mut out = u.clone();
                for i in 0..y.nrows() {
                    let coef = row_dot(u, i, y, i) / row_dot(y, i, y, i);
                    for k in 0..y.ncols() {
                        out[(i, k)] -= coef * y[(i, k)];
                    }
                }
                out
            }
        }
    }

    /// `R_Y(t U)`.
    pub fn retract(self, y: &DMatrix<f64>, u: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
        self.normalize(y + u * t)
    }

    /// Closed-form multiplier `z_i = Tr(B_i X ∇Φ) / Tr(B_i² X)` from `W = ∇Φ(X) Y`.
    pub fn multiplier(self, y: &DMatrix<f64>, w: &DMatrix<f64>) -> DVector<f64> {
        match self {
            ManifoldKind::Free => DVector::zeros(0),
            ManifoldKind::UnitTrace => DVector::from_element(1, y.dot(w) / y.norm_squared()),
            ManifoldKind::UnitDiagonal => DVector::from_iterator(
                y.nrows(),
                (0..y.nrows()).map(|i| row_dot(y, i, w, i) / row_dot(y, i, y, i)),
            ),
        }
    }

    /// `B*(z) · v`.
    pub fn adjoint_times(self, z: &DVector<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            ManifoldKind::Free => DMatrix::zeros(v.nrows(), v.ncols()),
            ManifoldKind::UnitTrace => v * z[0],
            ManifoldKind::UnitDiagonal => {
                let mut out = v.clone();
                for i in 0..v.nrows() {
                    for k in 0..v.ncols() {
                        out[(i, k)] *= z[i];
                    }
                }
                out
            }
        }
    }
}

fn check_shape(point: &FactorPoint, u: &DMatrix<f64>, context: &'static str) -> Result<()> {
    if u.nrows() != point.nrows() {
        return Err(Error::DimensionMismatch { context, expected: point.nrows(), found: u.nrows() });
    }
    if u.ncols() != point.ncols() {
        return Err(Error::DimensionMismatch { context, expected: point.ncols(), found: u.ncols() });
    }
    Ok(())
}

/// Orthogonal projection onto `T_Y`.
pub fn project_tangent(point: &FactorPoint, u: &DMatrix<f64>) -> Result<TangentVector> {
    check_shape(point, u, "project_tangent")?;
    Ok(TangentVector(point.manifold.project(&point.y, u)))
}

/// Retraction by metric projection: `Y + tU` followed by global or row-wise
/// normalization.
pub fn retract(point: &FactorPoint, u: &TangentVector, t: f64) -> Result<FactorPoint> {
    check_shape(point, &u.0, "retract")?;
    let y = point.manifold.retract(&point.y, &u.0, t)?;
    Ok(FactorPoint { y, manifold: point.manifold })
}

/// Multiplier `z` of the structural constraints, computed from `W = ∇Φ(X) Y`.
pub fn multiplier_z(point: &FactorPoint, grad_phi_y: &DMatrix<f64>) -> DVector<f64> {
    point.manifold.multiplier(&point.y, grad_phi_y)
}

/// Riemannian gradient `2 S Y = 2 (∇Φ(X) Y - B*(z) Y)`.
pub fn riem_grad(point: &FactorPoint, grad_phi_y: &DMatrix<f64>) -> TangentVector {
    let z = multiplier_z(point, grad_phi_y);
    let g = (grad_phi_y - point.manifold.adjoint_times(&z, &point.y)) * 2.0;
    TangentVector(g)
}

/// Riemannian Hessian applied to `u`, given the Euclidean Hessian-vector
/// product `H̃ = 2 (S̃ U + σ A*(A(Y Uᵀ + U Yᵀ)) Y)` and `W = S̃ Y`.
///
/// Free: `H̃`. UnitTrace: `H̃ - Tr(H̃ Yᵀ) Y - 2 Tr(S̃ X) U`. UnitDiagonal:
/// `H̃ - Diag(H̃ Yᵀ) Y - 2 Diag(S̃ X) U`, with `Diag(S̃ X)` read off the rows
/// of `W` and `Y`.
pub fn riem_hess_vec(
    point: &FactorPoint,
    u: &TangentVector,
    euclidean_hess: &DMatrix<f64>,
    grad_phi_y: &DMatrix<f64>,
) -> TangentVector {
    TangentVector(hessian_from_euclidean(point.manifold, &point.y, &u.0, euclidean_hess, grad_phi_y))
}

pub(crate) fn hessian_from_euclidean(
    manifold: ManifoldKind,
    y: &DMatrix<f64>,
    u: &DMatrix<f64>,
    euclidean_hess: &DMatrix<f64>,
    grad_phi_y: &DMatrix<f64>,
) -> DMatrix<f64> {
    debug_assert!(
        {
            let pu = manifold.project(y, u);
            (u - pu).norm() <= 1e-8 * (1.0 + u.norm())
        },
        "riem_hess_vec called with a non-tangent direction"
    );
    match manifold {
        ManifoldKind::Free => euclidean_hess.clone(),
        _ => {
            let z = manifold.multiplier(y, grad_phi_y);
            manifold.project(y, euclidean_hess) - manifold.adjoint_times(&z, u) * 2.0
        }
    }
}

/// Standard-normal `n × p` matrix normalized onto the manifold.
pub fn random_point(n: usize, p: usize, manifold: ManifoldKind, seed: u64) -> FactorPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_point_with(n, p, manifold, &mut rng)
}

pub(crate) fn random_point_with(
    n: usize,
    p: usize,
    manifold: ManifoldKind,
    rng: &mut ChaCha8Rng,
) -> FactorPoint {
    loop {
        let y = gaussian_matrix(n, p, rng);
        // An exactly zero row has probability zero; redraw if it happens.
        if let Ok(y) = manifold.normalize(y) {
            return FactorPoint { y, manifold };
        }
    }
}

/// Row-major filled Gaussian matrix, so results do not depend on storage order.
pub(crate) fn gaussian_matrix(n: usize, p: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let vals: Vec<f64> = (0..n * p).map(|_| StandardNormal.sample(rng)).collect();
    DMatrix::from_row_slice(n, p, &vals)
}
