//! Exact elimination: Bareiss for rank and determinant, Gauss–Jordan over the
//! rationals for kernels, solutions and inverses.

use num::bigint::BigInt;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::RatMatrix;
use super::rational::{common_denominator, format_rational, parse_rational, primitive, Rational};
use crate::error::{CsrError, Result};

/// Scales every row to integers. Returns the integer rows and the product of
/// the row multipliers.
fn integer_rows(m: &RatMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let rows = (0..m.rows())
        .map(|i| {
            let den = Rational::from_integer(common_denominator(m.row(i)));
            scale *= den.numer();
            m.row(i).iter().map(|q| (q * &den).to_integer()).collect()
        })
        .collect();
    (rows, scale)
}

/// Fraction-free elimination in place. Returns the rank and the sign of the
/// row permutation used; the last pivot is the determinant when the matrix is
/// square and nonsingular.
fn bareiss(a: &mut [Vec<BigInt>], cols: usize) -> (usize, i32, BigInt) {
    let rows = a.len();
    let mut sign = 1;
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        if p != r {
            a.swap(p, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    (r, sign, prev)
}

pub fn rank(m: &RatMatrix) -> usize {
    let (mut a, _) = integer_rows(m);
    bareiss(&mut a, m.cols()).0
}

pub fn determinant(m: &RatMatrix) -> Result<Rational> {
    m.ensure_square()?;
    let n = m.rows();
    if n == 0 {
        return Ok(Rational::one());
    }
    let (mut a, scale) = integer_rows(m);
    let (r, sign, last) = bareiss(&mut a, n);
    if r < n {
        return Ok(Rational::zero());
    }
    Ok(Rational::new(last * BigInt::from(sign), scale))
}

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (RatMatrix::from_rows(a).unwrap_or_else(|_| RatMatrix::zeros(rows, cols)), pivots)
}

/// Exact basis of the right null space, as primitive integer vectors.
pub fn kernel_basis(m: &RatMatrix) -> SubspaceBasis {
    let cols = m.cols();
    let (r, pivots) = rref(m);
    let mut vectors = Vec::new();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(row, free).clone();
        }
        vectors.push(primitive(&v));
    }
    SubspaceBasis::linear(cols, vectors)
}

/// Some solution of `a x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &RatMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.rows(), b.len(), "right-hand side length");
    let aug = RatMatrix::from_fn(a.rows(), a.cols() + 1, |i, j| {
        if j < a.cols() {
            a.get(i, j).clone()
        } else {
            b[i].clone()
        }
    });
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&a.cols()) {
        return None;
    }
    let mut x = vec![Rational::zero(); a.cols()];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, a.cols()).clone();
    }
    Some(x)
}

pub fn inverse(m: &RatMatrix) -> Result<RatMatrix> {
    m.ensure_square()?;
    let n = m.rows();
    let aug = RatMatrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m.get(i, j).clone()
        } else if j - n == i {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(CsrError::Singular);
    }
    Ok(r.submatrix(0, n, n, 2 * n))
}

/// Exact basis of a linear subspace, or of an affine one when `affine_point`
/// is present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<Vec<Rational>>,
    affine_point: Option<Vec<Rational>>,
}

impl SubspaceBasis {
    /// The vectors must be linearly independent; this is the caller's duty
    /// and is debug-asserted.
    pub fn linear(ambient_dim: usize, vectors: Vec<Vec<Rational>>) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == ambient_dim));
        debug_assert_eq!(rank(&RatMatrix::from_columns(ambient_dim, &vectors)), vectors.len());
        Self { ambient_dim, vectors, affine_point: None }
    }

    /// Linear span of arbitrary vectors; dependent ones are dropped.
    pub fn span(ambient_dim: usize, vectors: impl IntoIterator<Item = Vec<Rational>>) -> Self {
        let mut b = SpanBuilder::new(ambient_dim);
        for v in vectors {
            b.insert(&v);
        }
        b.into_basis()
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self::linear(ambient_dim, Vec::new())
    }

    pub fn with_point(mut self, point: Vec<Rational>) -> Self {
        assert_eq!(point.len(), self.ambient_dim);
        self.affine_point = Some(point);
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn affine_point(&self) -> Option<&[Rational]> {
        self.affine_point.as_deref()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    pub fn is_proper(&self) -> bool {
        self.dim() > 0 && self.dim() < self.ambient_dim
    }

    /// Membership in the linear part.
    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut b = SpanBuilder::new(self.ambient_dim);
        for w in &self.vectors {
            b.insert(w);
        }
        b.contains(v)
    }

    /// Membership in the affine subspace (the linear part when no point).
    pub fn contains_point(&self, x: &[Rational]) -> bool {
        match &self.affine_point {
            None => self.contains(x),
            Some(p) => {
                let d: Vec<Rational> = x.iter().zip(p).map(|(a, b)| a - b).collect();
                self.contains(&d)
            }
        }
    }

    /// Basis vectors as matrix columns.
    pub fn as_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(self.ambient_dim, &self.vectors)
    }

    /// Orthogonal complement of the linear part.
    pub fn orthogonal_complement(&self) -> SubspaceBasis {
        if self.vectors.is_empty() {
            return SubspaceBasis::linear(
                self.ambient_dim,
                (0..self.ambient_dim)
                    .map(|i| {
                        (0..self.ambient_dim)
                            .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                            .collect()
                    })
                    .collect(),
            );
        }
        kernel_basis(&self.as_matrix().transpose())
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient_dim: usize,
    vectors: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    affine_point: Option<Vec<String>>,
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn parse_vec(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

impl Serialize for SubspaceBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceRepr {
            ambient_dim: self.ambient_dim,
            vectors: self.vectors.iter().map(|v| strings(v)).collect(),
            affine_point: self.affine_point.as_deref().map(strings),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubspaceBasis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let r = SubspaceRepr::deserialize(d)?;
        let vectors = r
            .vectors
            .iter()
            .map(|v| parse_vec(v))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        if vectors.iter().any(|v| v.len() != r.ambient_dim) {
            return Err(D::Error::custom("vector length differs from ambient_dim"));
        }
        let basis = SubspaceBasis::span(r.ambient_dim, vectors.clone());
        if basis.dim() != vectors.len() {
            return Err(D::Error::custom("basis vectors are linearly dependent"));
        }
        let mut out = SubspaceBasis { ambient_dim: r.ambient_dim, vectors, affine_point: None };
        if let Some(p) = r.affine_point {
            let p = parse_vec(&p).map_err(D::Error::custom)?;
            if p.len() != r.ambient_dim {
                return Err(D::Error::custom("affine point length differs from ambient_dim"));
            }
            out.affine_point = Some(p);
        }
        Ok(out)
    }
}

/// Incrementally grown span kept in reduced row echelon form, so membership
/// and insertion each cost one reduction pass.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    n: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl SpanBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.n, "vector length");
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.n, "vector length");
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else { return false };
        let inv = w[p].recip();
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&w) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, w);
        self.pivots.insert(at, p);
        true
    }

    /// Echelon rows of the span.
    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn into_basis(self) -> SubspaceBasis {
        let n = self.n;
        let vectors = self.rows.iter().map(|r| primitive(r)).collect();
        SubspaceBasis { ambient_dim: n, vectors, affine_point: None }
    }
}
