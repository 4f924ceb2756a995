//! Low-rank solver for semidefinite programs
//!
//! ```text
//! min <C, X>  s.t.  A(X) = b,  B(X) = d,  X ⪰ 0
//! ```
//!
//! where `B` is empty, `Tr X = 1`, or `diag X = 1`. The variable is factored
//! as `X = YYᵀ`, the `B` constraints become a manifold for `Y`, and the
//! remaining constraints are handled by an augmented Lagrangian whose
//! subproblems run a Riemannian trust-region method. The factor width adapts
//! to the solution rank, and each outer iterate carries a KKT certificate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alm;
pub mod error;
pub mod generators;
pub mod manifolds;
pub mod problem;
pub mod rtr;
pub mod spectral;

pub use alm::{certify, solve, solve_with_clock, Certificate, Clock, IterationRecord, NoClock, Solution, SolverOptions, Status};
pub use error::{Error, Result};
pub use manifolds::{random_point, FactorPoint, TangentVector};
pub use problem::{KktResidues, ManifoldKind, SdpProblem, SparseSymMatrix};
pub use nalgebra;
