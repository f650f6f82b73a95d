//! Lifting to symmetric matrices: `A ↦ (X ↦ AᵀXA)` and its fixed points in
//! the cone of positive semidefinite matrices.

use num::{One, Signed, Zero};

use crate::error::{CsrError, Result};
use crate::linalg::{has_eigenvalue_one, kernel_basis, solve, MatrixFamily, RatMatrix, Rational};

/// Coordinates of a symmetric `d×d` matrix: the diagonal first, then the
/// entries above it in row order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymVec {
    dim: usize,
    coords: Vec<Rational>,
}

/// Number of coordinates of a symmetric `d×d` matrix.
pub fn sym_dim(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Index pairs `(p, q)`, `p ≤ q`, in coordinate order.
pub fn sym_pairs(d: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..d).map(|p| (p, p)).collect();
    for p in 0..d {
        for q in p + 1..d {
            out.push((p, q));
        }
    }
    out
}

impl SymVec {
    pub fn new(dim: usize, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != sym_dim(dim) {
            return Err(CsrError::DimensionMismatch(format!(
                "{} coordinates for symmetric {dim}x{dim} matrices",
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn vectorize(x: &RatMatrix) -> Result<Self> {
        if !x.is_symmetric() {
            return Err(CsrError::Precondition("matrix is not symmetric".into()));
        }
        let coords = sym_pairs(x.rows()).into_iter().map(|(p, q)| x.get(p, q).clone()).collect();
        Ok(Self { dim: x.rows(), coords })
    }

    pub fn unvectorize(&self) -> RatMatrix {
        let mut x = RatMatrix::zeros(self.dim, self.dim);
        for ((p, q), c) in sym_pairs(self.dim).into_iter().zip(&self.coords) {
            x.set(p, q, c.clone());
            x.set(q, p, c.clone());
        }
        x
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }
}

/// Matrix of `X ↦ AᵀXA` in [`SymVec`] coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedOperator {
    pub base_dim: usize,
    pub matrix: RatMatrix,
}

impl LiftedOperator {
    pub fn apply(&self, x: &SymVec) -> SymVec {
        SymVec { dim: self.base_dim, coords: self.matrix.mul_vec(&x.coords) }
    }
}

pub fn tensor_square(a: &RatMatrix) -> LiftedOperator {
    let d = a.rows();
    let pairs = sym_pairs(d);
    let n = pairs.len();
    let mut m = RatMatrix::zeros(n, n);
    for (col, &(p, q)) in pairs.iter().enumerate() {
        for (row, &(k, l)) in pairs.iter().enumerate() {
            let v = if p == q {
                a.get(p, k) * a.get(p, l)
            } else {
                a.get(p, k) * a.get(q, l) + a.get(q, k) * a.get(p, l)
            };
            if !v.is_zero() {
                m.set(row, col, v);
            }
        }
    }
    LiftedOperator { base_dim: d, matrix: m }
}

/// The lift of the lift, acting on symmetric `D×D` matrices with
/// `D = d(d+1)/2`.
pub fn tensor_fourth(a: &RatMatrix) -> LiftedOperator {
    let inner = tensor_square(a).matrix;
    let outer = tensor_square(&inner);
    LiftedOperator { base_dim: inner.rows(), matrix: outer.matrix }
}

pub fn lifted_family(family: &MatrixFamily) -> MatrixFamily {
    family.map(|a| tensor_square(a).matrix).expect("lifts share a dimension")
}

/// `(1/m) Σ A_i^{⊗2}`.
pub fn lifted_average(family: &MatrixFamily) -> LiftedOperator {
    LiftedOperator { base_dim: family.dim(), matrix: lifted_family(family).average() }
}

/// `(1/m) Σ A_i^{⊗4}`.
pub fn lifted_fourth_average(family: &MatrixFamily) -> LiftedOperator {
    let f = family.map(|a| tensor_fourth(a).matrix).expect("lifts share a dimension");
    LiftedOperator { base_dim: sym_dim(family.dim()), matrix: f.average() }
}

/// Inertia facts of a symmetric matrix from exact symmetric elimination.
/// Returns `None` when the matrix is not positive semidefinite, else its
/// rank.
pub fn psd_rank(x: &RatMatrix) -> Option<usize> {
    debug_assert!(x.is_symmetric());
    let mut a = x.to_rows();
    let mut rank = 0;
    let mut alive: Vec<usize> = (0..x.rows()).collect();
    loop {
        if alive.iter().any(|&i| a[i][i].is_negative()) {
            return None;
        }
        let Some(pos) = alive.iter().position(|&i| a[i][i].is_positive()) else {
            // Zero diagonal: a PSD matrix must then vanish entirely.
            let zero = alive.iter().all(|&i| alive.iter().all(|&j| a[i][j].is_zero()));
            return zero.then_some(rank);
        };
        let p = alive.remove(pos);
        let piv = a[p][p].clone();
        for &i in &alive {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &piv;
            for &j in &alive {
                if !a[p][j].is_zero() {
                    let t = &f * &a[p][j];
                    a[i][j] -= t;
                }
            }
        }
        rank += 1;
    }
}

pub fn is_psd(x: &RatMatrix) -> bool {
    psd_rank(x).is_some()
}

pub fn is_positive_definite(x: &RatMatrix) -> bool {
    psd_rank(x) == Some(x.rows())
}

/// Rationals of the Stern–Brocot tree up to `depth`, with signs and zero,
/// simplest first.
pub fn stern_brocot(depth: usize) -> Vec<Rational> {
    let mut pos: Vec<Rational> = vec![Rational::one()];
    let mut frontier = vec![((0i64, 1i64), (1i64, 0i64))];
    for _ in 0..depth {
        let mut next = Vec::new();
        for ((a, b), (c, d)) in frontier {
            let m = (a + c, b + d);
            for (lo, hi) in [((a, b), m), (m, (c, d))] {
                let med = (lo.0 + hi.0, lo.1 + hi.1);
                pos.push(Rational::new(med.0.into(), med.1.into()));
                next.push((lo, hi));
            }
        }
        frontier = next;
    }
    let mut out = vec![Rational::zero()];
    for p in pos {
        out.push(p.clone());
        out.push(-p);
    }
    out
}

const SEARCH_BUDGET: usize = 20_000;

/// Some nonzero PSD matrix in the span of symmetric matrices with the given
/// coordinate vectors; positive definite ones are preferred.
///
/// Candidates: a single basis vector up to sign, the projection of the
/// identity onto the span, then combinations with Stern–Brocot coefficients.
pub fn psd_in_span(d: usize, basis: &[Vec<Rational>]) -> Option<SymVec> {
    if basis.is_empty() {
        return None;
    }
    let to_sym = |c: &[Rational]| -> SymVec {
        let mut v = vec![Rational::zero(); sym_dim(d)];
        for (ci, b) in c.iter().zip(basis) {
            if ci.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                *x += ci * y;
            }
        }
        SymVec { dim: d, coords: v }
    };
    let mut fallback: Option<SymVec> = None;
    let mut consider = |s: SymVec| -> Option<SymVec> {
        if s.coords.iter().all(Zero::is_zero) {
            return None;
        }
        let x = s.unvectorize();
        match psd_rank(&x) {
            Some(r) if r == d => Some(s),
            Some(_) => {
                fallback.get_or_insert(s);
                None
            }
            None => None,
        }
    };
    let k = basis.len();
    if k == 1 {
        for sgn in [Rational::one(), -Rational::one()] {
            if let Some(s) = consider(to_sym(&[sgn])) {
                return Some(s);
            }
        }
        return fallback;
    }
    // Orthogonal projection of vec(I) in coordinate space.
    let b = RatMatrix::from_columns(sym_dim(d), basis);
    let bt = b.transpose();
    let id = SymVec::vectorize(&RatMatrix::identity(d)).expect("identity is symmetric");
    if let Some(c) = solve(&(&bt * &b), &bt.mul_vec(&id.coords)) {
        if let Some(s) = consider(to_sym(&c)) {
            return Some(s);
        }
    }
    let coeffs = stern_brocot(3);
    let mut idx = vec![0usize; k];
    for _ in 0..SEARCH_BUDGET {
        // Odometer over coefficient tuples.
        let mut pos = 0;
        loop {
            if pos == k {
                return fallback;
            }
            idx[pos] += 1;
            if idx[pos] < coeffs.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        let c: Vec<Rational> = idx.iter().map(|&i| coeffs[i].clone()).collect();
        if let Some(s) = consider(to_sym(&c)) {
            return Some(s);
        }
    }
    fallback
}

/// A PSD fixed point of a lifted operator that has eigenvalue one.
///
/// For a one-dimensional eigenspace this is the generator with the sign
/// making it PSD; otherwise the search of [`psd_in_span`] runs on the
/// eigenspace.
pub fn perron_in_cone(op: &LiftedOperator) -> Result<SymVec> {
    if !has_eigenvalue_one(&op.matrix)? {
        return Err(CsrError::Precondition("lifted operator has no eigenvalue one".into()));
    }
    let n = op.matrix.rows();
    let kernel = kernel_basis(&(&op.matrix - &RatMatrix::identity(n)));
    match psd_in_span(op.base_dim, kernel.vectors()) {
        Some(mut y) => {
            if y.unvectorize().trace().is_negative() {
                y.coords.iter_mut().for_each(|c| *c = -c.clone());
            }
            Ok(y)
        }
        None => Err(CsrError::NoPsdEigenvector { kernel }),
    }
}
