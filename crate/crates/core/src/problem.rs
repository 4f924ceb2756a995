//! SDP instances and matrix-free application of their linear maps.
//!
//! A problem is `min <C, X>` subject to `A(X) = b`, `X` PSD and, depending on
//! [`ManifoldKind`], a structural constraint `B(X) = d` that the solver keeps
//! exactly satisfied through the factorization `X = Y Yᵀ`. Nothing in this
//! module ever forms `X`: every map is evaluated on the factor `Y`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Structural constraint set handled by the manifold rather than by `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ManifoldKind {
    /// No structural constraint (`l = 0`); `Y` ranges over all `n × p` matrices.
    Free,
    /// `Tr X = 1`; `Y` lies on the unit sphere of the Frobenius norm.
    UnitTrace,
    /// `diag X = 1`; every row of `Y` has unit norm (oblique manifold).
    UnitDiagonal,
}

impl ManifoldKind {
    /// Number of structural constraints `l` for an `n × n` variable.
    pub fn constraint_count(self, n: usize) -> usize {
        match self {
            ManifoldKind::Free => 0,
            ManifoldKind::UnitTrace => 1,
            ManifoldKind::UnitDiagonal => n,
        }
    }

    /// The right-hand side `d`.
    pub fn rhs(self, n: usize) -> DVector<f64> {
        DVector::from_element(self.constraint_count(n), 1.0)
    }

    /// `B(Y Yᵀ)`.
    pub fn apply(self, y: &DMatrix<f64>) -> DVector<f64> {
        match self {
            ManifoldKind::Free => DVector::zeros(0),
            ManifoldKind::UnitTrace => DVector::from_element(1, y.norm_squared()),
            ManifoldKind::UnitDiagonal => {
                DVector::from_iterator(y.nrows(), (0..y.nrows()).map(|i| row_dot(y, i, y, i)))
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ManifoldKind::Free => "free",
            ManifoldKind::UnitTrace => "unit-trace",
            ManifoldKind::UnitDiagonal => "unit-diagonal",
        }
    }
}

impl core::str::FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(ManifoldKind::Free),
            "unit-trace" => Ok(ManifoldKind::UnitTrace),
            "unit-diagonal" => Ok(ManifoldKind::UnitDiagonal),
            other => Err(Error::InvalidInput(format!("unknown manifold kind `{other}`"))),
        }
    }
}

impl core::fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Dot product of row `i` of `a` with row `j` of `b`.
#[inline]
pub(crate) fn row_dot(a: &DMatrix<f64>, i: usize, b: &DMatrix<f64>, j: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..a.ncols() {
        acc += a[(i, k)] * b[(j, k)];
    }
    acc
}

/// `out[r, :] += alpha * v[c, :]`.
#[inline]
fn axpy_row(out: &mut DMatrix<f64>, r: usize, alpha: f64, v: &DMatrix<f64>, c: usize) {
    for k in 0..v.ncols() {
        out[(r, k)] += alpha * v[(c, k)];
    }
}

/// Symmetric matrix stored as its upper-triangular triplets.
///
/// Entries are kept sorted by `(row, col)` with `row <= col` and no duplicate
/// positions; the lower triangle is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSymMatrix {
    /// Builds a matrix from triplets. Lower-triangular positions are mirrored
    /// into the upper triangle; a position given twice is an error.
    pub fn new(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut entries = Self::normalized(n, triplets)?;
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEntry { row: w[0].0, col: w[0].1 });
            }
        }
        Ok(Self { n, entries })
    }

    /// Like [`SparseSymMatrix::new`] but sums values given for the same position.
    pub fn from_triplets_summed(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut raw = Self::normalized(n, triplets)?;
        raw.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(raw.len());
        for (r, c, v) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        Ok(Self { n, entries })
    }

    fn normalized(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Vec<(usize, usize, f64)>> {
        triplets
            .into_iter()
            .map(|(r, c, v)| {
                if r >= n || c >= n {
                    return Err(Error::IndexOutOfRange { row: r, col: c, n });
                }
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!("non-finite value at ({r}, {c})")));
                }
                Ok(if r <= c { (r, c, v) } else { (c, r, v) })
            })
            .collect()
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self { n, entries: (0..n).map(|i| (i, i, 1.0)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
            if r != c {
                m[(c, r)] += v;
            }
        }
        m
    }

    /// `<A, (Y Uᵀ + U Yᵀ) / 2>`; with `U = Y` this is `<A, Y Yᵀ>`.
    pub fn inner_sym(&self, y: &DMatrix<f64>, u: &DMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| {
                if r == c {
                    v * row_dot(y, r, u, r)
                } else {
                    v * (row_dot(y, r, u, c) + row_dot(u, r, y, c))
                }
            })
            .sum()
    }

    /// `out += alpha * A * v`.
    pub fn mul_acc(&self, alpha: f64, v: &DMatrix<f64>, out: &mut DMatrix<f64>) {
        for &(r, c, a) in &self.entries {
            axpy_row(out, r, alpha * a, v, c);
            if r != c {
                axpy_row(out, c, alpha * a, v, r);
            }
        }
    }
}

/// One nonzero of some constraint matrix `A_i`, flattened across constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    con: usize,
    row: usize,
    col: usize,
    val: f64,
}

/// A linear SDP with an optional structural manifold constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    n: usize,
    c: SparseSymMatrix,
    a: Vec<SparseSymMatrix>,
    b: DVector<f64>,
    manifold: ManifoldKind,
    objective_sign: f64,
    objective_offset: f64,
    terms: Vec<Term>,
}

impl SdpProblem {
    pub fn new(
        c: SparseSymMatrix,
        a: Vec<SparseSymMatrix>,
        b: Vec<f64>,
        manifold: ManifoldKind,
    ) -> Result<Self> {
        let n = c.dim();
        if n == 0 {
            return Err(Error::InvalidProblem("matrix dimension must be positive".into()));
        }
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                context: "constraint count vs rhs length",
                expected: a.len(),
                found: b.len(),
            });
        }
        if let Some(bad) = a.iter().find(|ai| ai.dim() != n) {
            return Err(Error::DimensionMismatch {
                context: "constraint matrix dimension",
                expected: n,
                found: bad.dim(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("non-finite right-hand side".into()));
        }
        let terms = a
            .iter()
            .enumerate()
            .flat_map(|(con, ai)| {
                ai.entries().iter().map(move |&(row, col, val)| Term { con, row, col, val })
            })
            .collect();
        Ok(Self {
            n,
            c,
            a,
            b: DVector::from_vec(b),
            manifold,
            objective_sign: 1.0,
            objective_offset: 0.0,
            terms,
        })
    }

    /// Sets how the internal (minimized) objective maps to the reported one:
    /// `reported = sign * internal + offset`.
    pub fn with_reporting(mut self, sign: f64, offset: f64) -> Self {
        self.objective_sign = if sign < 0.0 { -1.0 } else { 1.0 };
        self.objective_offset = offset;
        self
    }

    /// Same data with a different structural constraint.
    pub fn with_manifold(mut self, manifold: ManifoldKind) -> Self {
        self.manifold = manifold;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_constraints(&self) -> usize {
        self.a.len()
    }

    pub fn cost(&self) -> &SparseSymMatrix {
        &self.c
    }

    pub fn constraints(&self) -> &[SparseSymMatrix] {
        &self.a
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn manifold(&self) -> ManifoldKind {
        self.manifold
    }

    pub fn objective_sign(&self) -> f64 {
        self.objective_sign
    }

    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    fn check_rows(&self, y: &DMatrix<f64>, context: &'static str) -> Result<()> {
        if y.nrows() != self.n {
            return Err(Error::DimensionMismatch { context, expected: self.n, found: y.nrows() });
        }
        Ok(())
    }

    /// `A(Y Yᵀ)`.
    pub fn apply_constraints(&self, y: &DMatrix<f64>) -> Result<DVector<f64>> {
        self.check_rows(y, "apply_constraints")?;
        Ok(self.apply_constraints_sym(y, y))
    }

    /// `A((Y Uᵀ + U Yᵀ) / 2)`, unchecked.
    pub(crate) fn apply_constraints_sym(&self, y: &DMatrix<f64>, u: &DMatrix<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.a.len());
        for t in &self.terms {
            out[t.con] += if t.row == t.col {
                t.val * row_dot(y, t.row, u, t.row)
            } else {
                t.val * (row_dot(y, t.row, u, t.col) + row_dot(u, t.row, y, t.col))
            };
        }
        out
    }

    /// `(Σ_i v_i A_i) · w`.
    pub fn apply_adjoint_times(&self, v: &DVector<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if v.len() != self.a.len() {
            return Err(Error::DimensionMismatch {
                context: "apply_adjoint_times multiplier",
                expected: self.a.len(),
                found: v.len(),
            });
        }
        self.check_rows(w, "apply_adjoint_times")?;
        let mut out = DMatrix::zeros(self.n, w.ncols());
        self.adjoint_acc(1.0, v, w, &mut out);
        Ok(out)
    }

    /// `out += alpha (Σ_i v_i A_i) w`, unchecked.
    pub(crate) fn adjoint_acc(&self, alpha: f64, v: &DVector<f64>, w: &DMatrix<f64>, out: &mut DMatrix<f64>) {
        for t in &self.terms {
            let coef = alpha * v[t.con] * t.val;
            if coef == 0.0 {
                continue;
            }
            axpy_row(out, t.row, coef, w, t.col);
            if t.row != t.col {
                axpy_row(out, t.col, coef, w, t.row);
            }
        }
    }

    /// Dense `Σ_i v_i A_i`.
    pub fn adjoint_dense(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for t in &self.terms {
            let coef = v[t.con] * t.val;
            m[(t.row, t.col)] += coef;
            if t.row != t.col {
                m[(t.col, t.row)] += coef;
            }
        }
        m
    }

    /// Internal objective `<C, Y Yᵀ>` (the quantity being minimized).
    pub fn objective(&self, y: &DMatrix<f64>) -> Result<f64> {
        self.check_rows(y, "objective")?;
        Ok(self.c.inner_sym(y, y))
    }

    /// Maps an internal objective value to the reported convention.
    pub fn reported_objective(&self, internal: f64) -> f64 {
        self.objective_sign * internal + self.objective_offset
    }

    /// KKT residues of `(X = Y Yᵀ, y, z, S)` given the extreme eigenvalues of
    /// `S = C - A*(y) - B*(z)`.
    ///
    /// The primal residue folds the structural residual `‖B(X) - d‖` in
    /// quadrature with `‖A(X) - b‖`; the dual residue only penalizes negative
    /// curvature of `S`; the gap uses the full dual objective `bᵀy + dᵀz`.
    pub fn kkt_residues(
        &self,
        y: &DMatrix<f64>,
        dual_y: &DVector<f64>,
        z: &DVector<f64>,
        lambda_min: f64,
        lambda_max: f64,
    ) -> Result<KktResidues> {
        self.check_rows(y, "kkt_residues")?;
        if dual_y.len() != self.a.len() {
            return Err(Error::DimensionMismatch {
                context: "kkt_residues multiplier y",
                expected: self.a.len(),
                found: dual_y.len(),
            });
        }
        let l = self.manifold.constraint_count(self.n);
        if z.len() != l {
            return Err(Error::DimensionMismatch {
                context: "kkt_residues multiplier z",
                expected: l,
                found: z.len(),
            });
        }
        let primal = self.apply_constraints_sym(y, y) - &self.b;
        let d = self.manifold.rhs(self.n);
        let structural = self.manifold.apply(y) - &d;
        let infeas = libm::sqrt(primal.norm_squared() + structural.norm_squared());
        let eta_p = infeas / (1.0 + self.b.norm());
        let eta_d = (-lambda_min).max(0.0) / (1.0 + lambda_max.abs());
        let pobj = self.c.inner_sym(y, y);
        let dobj = self.b.dot(dual_y) + d.dot(z);
        let eta_g = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        Ok(KktResidues::new(eta_p, eta_d, eta_g))
    }
}

/// Relative primal infeasibility, dual infeasibility and duality gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResidues {
    pub eta_p: f64,
    pub eta_d: f64,
    pub eta_g: f64,
    pub eta_max: f64,
}

impl KktResidues {
    pub fn new(eta_p: f64, eta_d: f64, eta_g: f64) -> Self {
        Self { eta_p, eta_d, eta_g, eta_max: eta_p.max(eta_d).max(eta_g) }
    }
}

/// Dense `Σ_i v_i A_i` built from a list of matrices; used by tests and small
/// problems where the flattened term list is not available.
pub fn dense_combination(mats: &[SparseSymMatrix], v: &[f64]) -> DMatrix<f64> {
    let n = mats.first().map_or(0, SparseSymMatrix::dim);
    let mut m = DMatrix::zeros(n, n);
    for (ai, &vi) in mats.iter().zip(v) {
        m += ai.to_dense() * vi;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> SparseSymMatrix {
        let mut t = vec![];
        for r in 0..n {
            for c in r..n {
                if rng.gen_bool(0.5) {
                    t.push((r, c, rng.gen_range(-1.0..1.0)));
                }
            }
        }
        SparseSymMatrix::new(n, t).unwrap()
    }

    fn random_mat(n: usize, p: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn random_problem(n: usize, m: usize, rng: &mut ChaCha8Rng) -> SdpProblem {
        let c = random_sym(n, rng);
        let a = (0..m).map(|_| random_sym(n, rng)).collect();
        let b = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        SdpProblem::new(c, a, b, ManifoldKind::Free).unwrap()
    }

    #[test]
    fn identity_constraint_gives_frobenius_norm() {
        let p = SdpProblem::new(
            SparseSymMatrix::zeros(3),
            vec![SparseSymMatrix::identity(3)],
            vec![1.0],
            ManifoldKind::Free,
        )
        .unwrap();
        let y = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, -1.0, 0.5, 3.0, 0.0]);
        let v = p.apply_constraints(&y).unwrap();
        assert!((v[0] - y.norm_squared()).abs() < 1e-14);
    }

    #[test]
    fn off_diagonal_on_e1_is_zero() {
        let a = SparseSymMatrix::new(2, [(0, 1, 1.0)]).unwrap();
        let p = SdpProblem::new(SparseSymMatrix::zeros(2), vec![a], vec![0.0], ManifoldKind::Free).unwrap();
        let y = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        assert_eq!(p.apply_constraints(&y).unwrap()[0], 0.0);
    }

    #[test]
    fn constraints_match_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3, 10, 50] {
            let p = random_problem(n, 4, &mut rng);
            let y = random_mat(n, 2, &mut rng);
            let x = &y * y.transpose();
            let got = p.apply_constraints(&y).unwrap();
            for (i, ai) in p.constraints().iter().enumerate() {
                let want = ai.to_dense().dot(&x);
                assert!((got[i] - want).abs() <= 1e-12 * want.abs().max(1.0), "{} vs {}", got[i], want);
            }
            let obj = p.objective(&y).unwrap();
            assert!((obj - p.cost().to_dense().dot(&x)).abs() <= 1e-12 * obj.abs().max(1.0));
        }
    }

    #[test]
    fn adjoint_matches_dense_and_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_problem(6, 3, &mut rng);
        let w = random_mat(6, 2, &mut rng);
        let zero = p.apply_adjoint_times(&DVector::zeros(3), &w).unwrap();
        assert_eq!(zero, DMatrix::zeros(6, 2));
        let v = DVector::from_vec(vec![0.3, -1.2, 2.0]);
        let got = p.apply_adjoint_times(&v, &w).unwrap();
        let want = dense_combination(p.constraints(), v.as_slice()) * &w;
        assert!((got - want).norm() < 1e-12);

        let q = SdpProblem::new(
            SparseSymMatrix::zeros(6),
            vec![SparseSymMatrix::identity(6)],
            vec![1.0],
            ManifoldKind::Free,
        )
        .unwrap();
        let got = q.apply_adjoint_times(&DVector::from_element(1, 2.5), &w).unwrap();
        assert!((got - &w * 2.5).norm() < 1e-15);
    }

    #[test]
    fn adjoint_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = random_problem(8, 5, &mut rng);
            let y = random_mat(8, 3, &mut rng);
            let v = DVector::from_fn(5, |_, _| rng.gen_range(-1.0..1.0));
            let lhs = p.apply_adjoint_times(&v, &y).unwrap().dot(&y);
            let rhs = v.dot(&p.apply_constraints(&y).unwrap());
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn objective_trivial_cases() {
        let zero = SdpProblem::new(SparseSymMatrix::zeros(3), vec![], vec![], ManifoldKind::Free).unwrap();
        let y = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(zero.objective(&y).unwrap(), 0.0);
        let id = SdpProblem::new(SparseSymMatrix::identity(3), vec![], vec![], ManifoldKind::Free).unwrap();
        assert!((id.objective(&y).unwrap() - 2.0).abs() < 1e-15);
        let flipped = id.with_reporting(-1.0, 0.5);
        assert_eq!(flipped.reported_objective(2.0), -1.5);
    }

    #[test]
    fn dimension_errors() {
        let p = SdpProblem::new(SparseSymMatrix::identity(3), vec![], vec![], ManifoldKind::Free).unwrap();
        assert!(matches!(
            p.apply_constraints(&DMatrix::zeros(2, 1)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            SdpProblem::new(SparseSymMatrix::identity(3), vec![SparseSymMatrix::identity(2)], vec![1.0], ManifoldKind::Free),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            SparseSymMatrix::new(2, [(0, 2, 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            SparseSymMatrix::new(2, [(0, 1, 1.0), (1, 0, 1.0)]),
            Err(Error::DuplicateEntry { .. })
        ));
        let summed = SparseSymMatrix::from_triplets_summed(2, [(0, 1, 1.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(summed.entries(), &[(0, 1, 3.0)]);
    }

    #[test]
    fn residues_trivial_cases() {
        // X = e1 e1ᵀ, constraint X11 = 1, C = 0, S = 0.
        let p = SdpProblem::new(
            SparseSymMatrix::zeros(2),
            vec![SparseSymMatrix::new(2, [(0, 0, 1.0)]).unwrap()],
            vec![1.0],
            ManifoldKind::Free,
        )
        .unwrap();
        let y = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let r = p.kkt_residues(&y, &DVector::zeros(1), &DVector::zeros(0), 0.0, 0.0).unwrap();
        assert_eq!(r, KktResidues::new(0.0, 0.0, 0.0));
        let r = p.kkt_residues(&y, &DVector::zeros(1), &DVector::zeros(0), -1.0, 1.0).unwrap();
        assert_eq!(r.eta_d, 0.5);
        assert_eq!(r.eta_max, 0.5);
        // A PSD S never blocks certification.
        let r = p.kkt_residues(&y, &DVector::zeros(1), &DVector::zeros(0), 3.0, 5.0).unwrap();
        assert_eq!(r.eta_d, 0.0);
    }

    #[test]
    fn residues_invariant_under_constraint_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_problem(5, 4, &mut rng);
        let y = random_mat(5, 2, &mut rng);
        let dual = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        let perm = [2usize, 0, 3, 1];
        let q = SdpProblem::new(
            p.cost().clone(),
            perm.iter().map(|&i| p.constraints()[i].clone()).collect(),
            perm.iter().map(|&i| p.rhs()[i]).collect(),
            ManifoldKind::Free,
        )
        .unwrap();
        let dual_q = DVector::from_iterator(4, perm.iter().map(|&i| dual[i]));
        let z = DVector::zeros(0);
        let a = p.kkt_residues(&y, &dual, &z, -0.1, 2.0).unwrap();
        let b = q.kkt_residues(&y, &dual_q, &z, -0.1, 2.0).unwrap();
        for (u, v) in [(a.eta_p, b.eta_p), (a.eta_d, b.eta_d), (a.eta_g, b.eta_g)] {
            assert!((u - v).abs() < 1e-14);
        }
    }
}
