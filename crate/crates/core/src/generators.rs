//! Benchmark SDP families: Max-Cut, matrix completion, and second-order
//! moment relaxations of binary quadratic programs and of quartic
//! polynomials on the unit sphere.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::{ManifoldKind, SdpProblem, SparseSymMatrix};

/// Undirected graph with 0-based nodes and edges `(i, j, w)`, `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Edges may be given in either orientation; self-loops, duplicates and
    /// out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut out: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { row: i, col: j, n });
            }
            if i == j {
                return Err(Error::InvalidInput(format!("self-loop at node {i}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite weight on edge ({i}, {j})")));
            }
            out.push((i.min(j), i.max(j), w));
        }
        let mut sorted: Vec<(usize, usize)> = out.iter().map(|&(i, j, _)| (i, j)).collect();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEntry { row: w[0].0, col: w[0].1 });
        }
        Ok(Self { n, edges: out })
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for &(i, j, w) in &self.edges {
            l[(i, i)] += w;
            l[(j, j)] += w;
            l[(i, j)] -= w;
            l[(j, i)] -= w;
        }
        l
    }

    /// Cut weight of a ±1 labelling.
    pub fn cut_value(&self, labels: &[f64]) -> f64 {
        self.edges
            .iter()
            .filter(|&&(i, j, _)| labels[i] * labels[j] < 0.0)
            .map(|&(_, _, w)| w)
            .sum()
    }
}

/// Single unit edge; optimal relaxation value 1.
pub fn maxcut_edge() -> WeightedGraph {
    WeightedGraph { n: 2, edges: vec![(0, 1, 1.0)] }
}

/// Unit triangle; optimal relaxation value 9/4.
pub fn maxcut_triangle() -> WeightedGraph {
    WeightedGraph { n: 3, edges: vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)] }
}

/// Erdős–Rényi graph with unit weights.
pub fn random_graph(n: usize, density: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < density {
                edges.push((i, j, 1.0));
            }
        }
    }
    WeightedGraph { n, edges }
}

/// Max-Cut relaxation `max ¼<L, X>` s.t. `diag(X) = 1`, solved as
/// `min <-L/4, X>` and reported with flipped sign.
pub fn gen_maxcut(graph: &WeightedGraph) -> Result<SdpProblem> {
    if graph.n == 0 || graph.edges.is_empty() {
        return Err(Error::InvalidProblem("graph has no edges".into()));
    }
    let mut trips = Vec::with_capacity(3 * graph.edges.len());
    for &(i, j, w) in &graph.edges {
        trips.push((i, i, -0.25 * w));
        trips.push((j, j, -0.25 * w));
        trips.push((i, j, 0.25 * w));
    }
    let c = SparseSymMatrix::from_triplets_summed(graph.n, trips)?;
    Ok(SdpProblem::new(c, Vec::new(), Vec::new(), ManifoldKind::UnitDiagonal)?.with_reporting(-1.0, 0.0))
}

/// Nuclear-norm completion of an `s × t` matrix from 0-based samples
/// `(i, j, M_ij)`: `min Tr X` s.t. `X = [[W1, Z], [Zᵀ, W2]] ⪰ 0`, `Z_ij = M_ij`.
pub fn gen_matrix_completion(s: usize, t: usize, entries: &[(usize, usize, f64)]) -> Result<SdpProblem> {
    if s == 0 || t == 0 {
        return Err(Error::InvalidProblem("matrix dimensions must be positive".into()));
    }
    let n = s + t;
    let mut seen = BTreeMap::new();
    let mut a = Vec::with_capacity(entries.len());
    let mut b = Vec::with_capacity(entries.len());
    for &(i, j, v) in entries {
        if i >= s || j >= t {
            return Err(Error::IndexOutOfRange { row: i, col: j, n: s.max(t) });
        }
        if seen.insert((i, j), ()).is_some() {
            return Err(Error::DuplicateEntry { row: i, col: j });
        }
        a.push(SparseSymMatrix::new(n, [(i, s + j, 1.0)])?);
        b.push(2.0 * v);
    }
    SdpProblem::new(SparseSymMatrix::identity(n), a, b, ManifoldKind::Free)
}

/// Samples a rank-1 `s × t` matrix with Gaussian factors and keeps each
/// entry with probability `rate`. Returns `(M, samples)`.
pub fn random_matrix_completion(
    s: usize,
    t: usize,
    rate: f64,
    seed: u64,
) -> (DMatrix<f64>, Vec<(usize, usize, f64)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<f64> = (0..s).map(|_| rng.sample(StandardNormal)).collect();
    let v: Vec<f64> = (0..t).map(|_| rng.sample(StandardNormal)).collect();
    let m = DMatrix::from_fn(s, t, |i, j| u[i] * v[j]);
    let mut samples = Vec::new();
    for i in 0..s {
        for j in 0..t {
            if rng.gen::<f64>() < rate {
                samples.push((i, j, m[(i, j)]));
            }
        }
    }
    (m, samples)
}

/// Exponent vector of a monomial in `q` variables.
pub type Monomial = Vec<u8>;

/// Degree-≤2 monomial basis indexing the rows of a moment matrix.
///
/// Order: `1, x_1, …, x_q`, then the degree-2 monomials in lexicographic
/// order of `(i, j)` with `i < j` (or `i <= j` when squares are included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialIndex {
    q: usize,
    include_squares: bool,
    basis: Vec<Monomial>,
    lookup: BTreeMap<Monomial, usize>,
}

impl MonomialIndex {
    pub fn new(q: usize, include_squares: bool) -> Self {
        let mut basis = vec![vec![0u8; q]];
        for i in 0..q {
            let mut m = vec![0u8; q];
            m[i] = 1;
            basis.push(m);
        }
        for i in 0..q {
            let start = if include_squares { i } else { i + 1 };
            for j in start..q {
                let mut m = vec![0u8; q];
                m[i] += 1;
                m[j] += 1;
                basis.push(m);
            }
        }
        let lookup = basis.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
        Self { q, include_squares, basis, lookup }
    }

    pub fn num_vars(&self) -> usize {
        self.q
    }

    pub fn includes_squares(&self) -> bool {
        self.include_squares
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn monomial(&self, k: usize) -> &[u8] {
        &self.basis[k]
    }

    pub fn index_of(&self, m: &[u8]) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    /// Exponents of `basis[a] · basis[b]`.
    pub fn product(&self, a: usize, b: usize) -> Monomial {
        self.basis[a].iter().zip(&self.basis[b]).map(|(x, y)| x + y).collect()
    }

    /// Moment vector `v(x)`.
    pub fn evaluate(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|m| eval_monomial(m, x)))
    }
}

pub fn eval_monomial(m: &[u8], x: &[f64]) -> f64 {
    m.iter().zip(x).map(|(&e, &xi)| libm::pow(xi, f64::from(e))).product()
}

/// Entries of the upper triangle grouped by the monomial they represent, in
/// row-major first-appearance order.
struct Coincidences {
    keys: Vec<Monomial>,
    groups: Vec<Vec<(usize, usize)>>,
    lookup: BTreeMap<Monomial, usize>,
}

impl Coincidences {
    fn new(basis: &MonomialIndex) -> Self {
        let n = basis.len();
        let mut keys = Vec::new();
        let mut groups: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut lookup = BTreeMap::new();
        for a in 0..n {
            for b in a..n {
                let key = basis.product(a, b);
                let g = *lookup.entry(key.clone()).or_insert_with(|| {
                    keys.push(key);
                    groups.push(Vec::new());
                    groups.len() - 1
                });
                groups[g].push((a, b));
            }
        }
        Self { keys, groups, lookup }
    }

    fn representative(&self, key: &[u8]) -> Option<(usize, usize)> {
        self.lookup.get(key).map(|&g| self.groups[g][0])
    }

    /// `X_first - X_later = 0` for every later occurrence of each key.
    fn equalities(&self, n: usize, a: &mut Vec<SparseSymMatrix>, b: &mut Vec<f64>) -> Result<()> {
        for group in &self.groups {
            let first = group[0];
            for &later in &group[1..] {
                a.push(entry_difference(n, first, later)?);
                b.push(0.0);
            }
        }
        Ok(())
    }
}

/// Weight making `<A, X> = X_ab` for a single symmetric position.
fn entry_weight(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.5
    }
}

fn entry_difference(n: usize, p: (usize, usize), q: (usize, usize)) -> Result<SparseSymMatrix> {
    SparseSymMatrix::new(n, [(p.0, p.1, entry_weight(p.0, p.1)), (q.0, q.1, -entry_weight(q.0, q.1))])
}

/// Second-order moment relaxation of `min xᵀQx + cᵀx` over `x ∈ {-1, 1}^q`.
///
/// The basis omits squares since `x_i² = 1`. Entries of `M` representing the
/// same unreduced monomial are chained to their first occurrence, and each
/// monomial containing a square is equated with the monomial obtained by
/// cancelling that square. `M_00 = 1` closes the list. The reported objective
/// adds back the constant `Tr Q`.
pub fn gen_bqp_moment(q_mat: &DMatrix<f64>, c: &DVector<f64>) -> Result<SdpProblem> {
    let q = q_mat.nrows();
    if q < 2 {
        return Err(Error::InvalidProblem("BQP needs at least two variables".into()));
    }
    if q_mat.ncols() != q {
        return Err(Error::DimensionMismatch { context: "Q must be square", expected: q, found: q_mat.ncols() });
    }
    if c.len() != q {
        return Err(Error::DimensionMismatch { context: "linear term length", expected: q, found: c.len() });
    }
    let basis = MonomialIndex::new(q, false);
    let n = basis.len();
    let co = Coincidences::new(&basis);

    let mut a = Vec::new();
    let mut b = Vec::new();
    co.equalities(n, &mut a, &mut b)?;
    for key in &co.keys {
        for i in 0..q {
            if key[i] < 2 {
                continue;
            }
            let mut reduced = key.clone();
            reduced[i] -= 2;
            if let Some(to) = co.representative(&reduced) {
                let from = co.representative(key).expect("key is present");
                a.push(entry_difference(n, from, to)?);
                b.push(0.0);
            }
        }
    }
    a.push(SparseSymMatrix::new(n, [(0, 0, 1.0)])?);
    b.push(1.0);

    let mut trips = Vec::new();
    for i in 0..q {
        trips.push((0, 1 + i, 0.5 * c[i]));
        for j in i + 1..q {
            let mut m = vec![0u8; q];
            m[i] = 1;
            m[j] = 1;
            let k = basis.index_of(&m).expect("pair monomial in basis");
            trips.push((0, k, 0.5 * (q_mat[(i, j)] + q_mat[(j, i)])));
        }
    }
    let cost = SparseSymMatrix::from_triplets_summed(n, trips)?;
    let offset = q_mat.trace();
    Ok(SdpProblem::new(cost, a, b, ManifoldKind::UnitDiagonal)?.with_reporting(1.0, offset))
}

/// `xᵀQx + cᵀx`.
pub fn bqp_value(q_mat: &DMatrix<f64>, c: &DVector<f64>, x: &[f64]) -> f64 {
    let x = DVector::from_column_slice(x);
    (x.transpose() * q_mat * &x)[(0, 0)] + c.dot(&x)
}

/// Exact minimum by enumerating all `2^q` sign vectors.
pub fn bqp_brute_force(q_mat: &DMatrix<f64>, c: &DVector<f64>) -> (f64, Vec<f64>) {
    let q = q_mat.nrows();
    let mut best = (f64::INFINITY, vec![1.0; q]);
    for mask in 0u64..(1u64 << q) {
        let x: Vec<f64> = (0..q).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let v = bqp_value(q_mat, c, &x);
        if v < best.0 {
            best = (v, x);
        }
    }
    best
}

/// Symmetric `Q` and `c` with independent standard normal entries.
pub fn random_bqp(q: usize, seed: u64) -> (DMatrix<f64>, DVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q_mat = DMatrix::zeros(q, q);
    for i in 0..q {
        for j in i..q {
            let v: f64 = rng.sample(StandardNormal);
            q_mat[(i, j)] = v;
            q_mat[(j, i)] = v;
        }
    }
    let c = DVector::from_iterator(q, (0..q).map(|_| rng.sample::<f64, _>(StandardNormal)));
    (q_mat, c)
}

/// Second-order moment relaxation of `min p(x)` s.t. `‖x‖ = 1` for a
/// polynomial of degree at most four given by its coefficients.
pub fn gen_quartic_sphere(q: usize, coeffs: &BTreeMap<Monomial, f64>) -> Result<SdpProblem> {
    if q == 0 {
        return Err(Error::InvalidProblem("need at least one variable".into()));
    }
    let basis = MonomialIndex::new(q, true);
    let n = basis.len();
    let co = Coincidences::new(&basis);

    let mut trips = Vec::with_capacity(coeffs.len());
    for (m, &v) in coeffs {
        if m.len() != q {
            return Err(Error::DimensionMismatch { context: "monomial length", expected: q, found: m.len() });
        }
        let degree: u32 = m.iter().map(|&e| u32::from(e)).sum();
        if degree > 4 {
            return Err(Error::InvalidInput(format!("monomial of degree {degree} exceeds 4")));
        }
        let (i, j) = co.representative(m).expect("degree-4 monomials factor over the basis");
        trips.push((i, j, v * entry_weight(i, j)));
    }
    let cost = SparseSymMatrix::from_triplets_summed(n, trips)?;

    let mut a = Vec::new();
    let mut b = Vec::new();
    co.equalities(n, &mut a, &mut b)?;
    for w in 0..n {
        let mut ent = Vec::with_capacity(q + 1);
        for i in 0..q {
            let mut m = basis.monomial(w).to_vec();
            m[i] += 2;
            let (r, s) = co.representative(&m).expect("degree ≤ 4");
            ent.push((r, s, entry_weight(r, s)));
        }
        let (r, s) = co.representative(basis.monomial(w)).expect("basis monomial");
        ent.push((r, s, -entry_weight(r, s)));
        a.push(SparseSymMatrix::from_triplets_summed(n, ent)?);
        b.push(0.0);
    }
    a.push(SparseSymMatrix::new(n, [(0, 0, 1.0)])?);
    b.push(1.0);
    SdpProblem::new(cost, a, b, ManifoldKind::Free)
}

/// All monomials of degree at most `degree` in `q` variables, graded
/// lexicographic order.
pub fn monomials_up_to(q: usize, degree: u8) -> Vec<Monomial> {
    fn exact(pos: usize, left: u8, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e;
            exact(pos + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    if q == 0 {
        return out;
    }
    for d in 0..=degree {
        exact(0, d, &mut vec![0u8; q], &mut out);
    }
    out
}

/// Coefficients drawn from the standard normal for every monomial of degree ≤ 4.
pub fn random_quartic(q: usize, seed: u64) -> BTreeMap<Monomial, f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    monomials_up_to(q, 4).into_iter().map(|m| (m, rng.sample(StandardNormal))).collect()
}

pub fn polynomial_value(coeffs: &BTreeMap<Monomial, f64>, x: &[f64]) -> f64 {
    coeffs.iter().map(|(m, &v)| v * eval_monomial(m, x)).sum()
}
