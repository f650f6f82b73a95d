use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, parse_rational, to_f64, Rational};
use crate::error::{CsrError, Result};

/// Dense matrix of exact rationals, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CsrError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(CsrError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Integer matrix from nested slices; handy in tests and examples.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let v = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect();
        Self::from_rows(v).expect("rectangular input")
    }

    /// Parses nested string rows such as `[["1/2", "0"], ["0", "1"]]`.
    pub fn from_strs<R: AsRef<[S]>, S: AsRef<str>>(rows: &[R]) -> Result<Self> {
        let v = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|s| parse_rational(s.as_ref())).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::from_rows(v)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, cols: &[Vec<Rational>]) -> Self {
        Self::from_fn(n, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { Rational::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn ensure_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(CsrError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn data(&self) -> &[Rational] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Off-diagonal entries nonnegative.
    pub fn is_metzler(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || !self.get(i, j).is_negative()))
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    pub fn block_diag(blocks: &[RatMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r + i, c + j, b.get(i, j).clone());
                }
            }
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(self.get(i, j)))
    }

    pub fn max_abs(&self) -> Rational {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(format_rational).collect()).collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_strings())
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.to_strings();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

impl<'a> Mul<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;

    fn mul(self, rhs: &'a RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;

    fn add(self, rhs: &'a RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;

    fn sub(self, rhs: &'a RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;

    fn neg(self) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        RatMatrix::from_strs(&rows).map_err(D::Error::custom)
    }
}

/// The generating set of a semigroup: a nonempty ordered list of square
/// matrices of one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFamily {
    dim: usize,
    generators: Vec<RatMatrix>,
}

impl MatrixFamily {
    pub fn new(generators: Vec<RatMatrix>) -> Result<Self> {
        let first = generators.first().ok_or(CsrError::EmptyFamily)?;
        let dim = first.rows();
        for g in &generators {
            g.ensure_square()?;
            if g.rows() != dim {
                return Err(CsrError::DimensionMismatch(format!(
                    "generator of size {} in a family of dimension {dim}",
                    g.rows()
                )));
            }
        }
        Ok(Self { dim, generators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[RatMatrix] {
        &self.generators
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RatMatrix> {
        self.generators.iter()
    }

    pub fn into_generators(self) -> Vec<RatMatrix> {
        self.generators
    }

    /// `(1/m) Σ A_i`.
    pub fn average(&self) -> RatMatrix {
        let mut sum = RatMatrix::zeros(self.dim, self.dim);
        for g in &self.generators {
            sum = &sum + g;
        }
        sum.scale(&Rational::new(1.into(), (self.len() as i64).into()))
    }

    pub fn map(&self, f: impl FnMut(&RatMatrix) -> RatMatrix) -> Result<Self> {
        Self::new(self.generators.iter().map(f).collect())
    }

    pub fn transposed(&self) -> Self {
        self.map(RatMatrix::transpose).expect("transpose keeps shape")
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        self.map(|g| g.scale(c)).expect("scaling keeps shape")
    }

    pub fn is_nonnegative(&self) -> bool {
        self.generators.iter().all(RatMatrix::is_nonnegative)
    }

    pub fn is_integral(&self) -> bool {
        self.generators.iter().all(RatMatrix::is_integral)
    }

    /// Product `A_{w[0]} A_{w[1]} ⋯ A_{w[k-1]}` for a word of generator indices.
    pub fn product(&self, word: &[usize]) -> RatMatrix {
        let mut out = RatMatrix::identity(self.dim);
        for &i in word {
            out = &out * &self.generators[i];
        }
        out
    }
}

impl<'a> IntoIterator for &'a MatrixFamily {
    type Item = &'a RatMatrix;
    type IntoIter = std::slice::Iter<'a, RatMatrix>;

    fn into_iter(self) -> Self::IntoIter {
        self.generators.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::rat;

    #[test]
    fn multiplication_matches_hand_product() {
        let a = RatMatrix::from_i64(&[[1, 0], [1, 1]]);
        let b = RatMatrix::from_i64(&[[1, 1], [0, 1]]);
        assert_eq!(&a * &b, RatMatrix::from_i64(&[[1, 1], [1, 2]]));
    }

    #[test]
    fn json_round_trip() {
        let m = RatMatrix::from_strs(&[["1/2", "-3"], ["0", "7/9"]]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"[["1/2","-3"],["0","7/9"]]"#);
        let back: RatMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn kron_shape_and_entries() {
        let a = RatMatrix::from_i64(&[[1, 2], [3, 4]]);
        let k = a.kron(&RatMatrix::identity(2));
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(2, 0), &rat(3, 1));
        assert_eq!(k.get(2, 1), &rat(0, 1));
    }

    #[test]
    fn family_rejects_mixed_dimensions() {
        let r = MatrixFamily::new(vec![RatMatrix::identity(2), RatMatrix::identity(3)]);
        assert!(matches!(r, Err(CsrError::DimensionMismatch(_))));
        assert!(matches!(MatrixFamily::new(vec![]), Err(CsrError::EmptyFamily)));
    }

    #[test]
    fn word_product_order() {
        let f = MatrixFamily::new(vec![
            RatMatrix::from_i64(&[[1, 0], [1, 1]]),
            RatMatrix::from_i64(&[[1, 1], [0, 1]]),
        ])
        .unwrap();
        assert_eq!(f.product(&[0, 1]), &f.generators()[0] * &f.generators()[1]);
    }
}
