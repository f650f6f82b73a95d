//! Univariate polynomials over Q: characteristic polynomials, gcds, and a
//! small-degree factorizer used to find rational invariant subspaces.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::{One, Signed, ToPrimitive, Zero};

use super::eigen::eigenvalues_f64;
use super::matrix::RatMatrix;
use super::rational::{common_denominator, Rational};

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly(Vec<Rational>);

/// Degree above which factoring is not attempted.
const MAX_FACTOR_DEGREE: usize = 16;

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        Self(self.0.iter().map(|c| c / &lc).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.0.clone();
        let dd = d.degree();
        let lc = d.leading();
        if r.len() < d.0.len() {
            return (Self(Vec::new()), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors, monic.
    pub fn squarefree(&self) -> Self {
        if self.degree() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + super::rational::to_f64(c))
    }

    /// `p(M)` by Horner's scheme.
    pub fn eval_matrix(&self, m: &RatMatrix) -> RatMatrix {
        let n = m.rows();
        let mut acc = RatMatrix::zeros(n, n);
        for c in self.0.iter().rev() {
            acc = &acc * m;
            for i in 0..n {
                let v = acc.get(i, i) + c;
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// Scaled to a primitive integer polynomial with positive leading term.
    fn primitive_integer(&self) -> Vec<BigInt> {
        use num::Integer;
        let den = Rational::from_integer(common_denominator(self.0.iter()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * &den).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let sign = if ints.last().is_some_and(Signed::is_negative) { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|x| x / &g * &sign).collect()
    }
}

/// Characteristic polynomial `det(xI − M)` by the Faddeev–LeVerrier
/// recurrence, exact over Q.
pub fn charpoly(m: &RatMatrix) -> Poly {
    let n = m.rows();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    let mut mk = RatMatrix::zeros(n, n);
    for k in 1..=n {
        mk = &(m * &mk) + &RatMatrix::identity(n).scale(&c[n - k + 1]);
        let am = m * &mk;
        c[n - k] = -am.trace() / Rational::from_integer((k as i64).into());
    }
    Poly::new(c)
}

/// Irreducible factors over Q of the squarefree part of `p`, each monic.
///
/// Works numerically on the roots and confirms every factor by exact
/// division. When the degree or the coefficients are too large, or a factor
/// cannot be confirmed, the remaining cofactor is returned unsplit, so the
/// output always multiplies back to the squarefree part.
pub fn factor(p: &Poly) -> Vec<Poly> {
    let sq = p.squarefree();
    if sq.degree() <= 1 {
        return if sq.degree() == 1 { vec![sq] } else { Vec::new() };
    }
    // Peel off x first; the substitution below needs a nonzero constant term
    // only for convenience of the root search.
    let mut out = Vec::new();
    let mut rest = sq.clone();
    if rest.coeffs()[0].is_zero() {
        out.push(Poly::from_i64(&[0, 1]));
        rest = rest.div_rem(&Poly::from_i64(&[0, 1])).0;
    }
    if rest.degree() == 0 {
        return out;
    }
    if rest.degree() == 1 || rest.degree() > MAX_FACTOR_DEGREE {
        out.push(rest.monic());
        return out;
    }
    match factor_integer(&rest) {
        Some(fs) => out.extend(fs),
        None => out.push(rest.monic()),
    }
    out
}

fn factor_integer(p: &Poly) -> Option<Vec<Poly>> {
    const LIMIT: f64 = 1.0e15;
    let ints = p.primitive_integer();
    let n = ints.len() - 1;
    let a = ints[n].clone();
    // Q(y) = a^(n-1) p(y/a) is monic with integer coefficients.
    let mut monic = Vec::with_capacity(n + 1);
    for (k, c) in ints.iter().enumerate() {
        if k == n {
            monic.push(BigInt::one());
        } else {
            monic.push(c * num::pow(a.clone(), n - 1 - k));
        }
    }
    let mut q_f64 = Vec::with_capacity(n + 1);
    for c in &monic {
        let x = c.to_f64()?;
        if x.abs() > LIMIT {
            return None;
        }
        q_f64.push(x);
    }
    let q = Poly::new(monic.iter().map(|c| Rational::from_integer(c.clone())).collect());
    let roots = polish_roots(&q, roots_of(&q_f64)?);

    // Units: a real root or a conjugate pair.
    let mut units: Vec<Vec<Complex64>> = Vec::new();
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = roots[i];
        if z.im.abs() <= 1e-9 * (1.0 + z.norm()) {
            units.push(vec![Complex64::new(z.re, 0.0)]);
        } else {
            let j = (0..roots.len())
                .filter(|&j| !used[j])
                .min_by(|&x, &y| {
                    (roots[x] - z.conj()).norm().total_cmp(&(roots[y] - z.conj()).norm())
                })?;
            used[j] = true;
            units.push(vec![z, z.conj()]);
        }
    }

    let mut factors_y = Vec::new();
    let mut remaining = q.clone();
    let mut alive: Vec<usize> = (0..units.len()).collect();
    'search: loop {
        let deg: usize = alive.iter().map(|&u| units[u].len()).sum();
        if deg <= 1 {
            break;
        }
        let k = alive.len();
        if k > 20 {
            break;
        }
        // Subsets in order of increasing size; the first hit is irreducible.
        let mut masks: Vec<u32> = (1..(1u32 << k) - 1).collect();
        masks.sort_by_key(|m| m.count_ones());
        for mask in masks {
            let chosen: Vec<usize> = (0..k).filter(|b| mask & (1 << b) != 0).map(|b| alive[b]).collect();
            let cdeg: usize = chosen.iter().map(|&u| units[u].len()).sum();
            if cdeg * 2 > deg {
                continue;
            }
            let Some(candidate) = integer_poly_from_roots(chosen.iter().flat_map(|&u| units[u].iter().copied()))
            else {
                continue;
            };
            let (quot, rem) = remaining.div_rem(&candidate);
            if rem.is_zero() {
                factors_y.push(candidate);
                remaining = quot;
                alive.retain(|u| !chosen.contains(u));
                continue 'search;
            }
        }
        break;
    }
    factors_y.push(remaining);

    // Back to x: g(y) ↦ g(a x).
    let a_r = Rational::from_integer(a);
    Some(
        factors_y
            .into_iter()
            .filter(|g| g.degree() >= 1)
            .map(|g| {
                let mut s = Rational::one();
                let mut cs = Vec::with_capacity(g.0.len());
                for c in &g.0 {
                    cs.push(c * &s);
                    s *= &a_r;
                }
                Poly::new(cs).monic()
            })
            .collect(),
    )
}

/// Monic polynomial with the given roots, if its coefficients round cleanly
/// to integers.
fn integer_poly_from_roots(roots: impl Iterator<Item = Complex64>) -> Option<Poly> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for z in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * z;
        }
        c = next;
    }
    let mut out = Vec::with_capacity(c.len());
    for z in c {
        let r = z.re.round();
        if (z.re - r).abs() > 1e-5 * (1.0 + r.abs()) || z.im.abs() > 1e-5 * (1.0 + r.abs()) || r.abs() > 9.0e15 {
            return None;
        }
        out.push(Rational::from_integer(BigInt::from(r as i64)));
    }
    Some(Poly::new(out))
}

/// Roots of the monic f64 polynomial with coefficients `c` (constant term
/// first), via the companion matrix.
fn roots_of(c: &[f64]) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    let comp = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -c[n - 1 - j] / c[n]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    eigenvalues_f64(&comp).ok()
}

/// Newton steps on the exact polynomial, evaluated in floating point.
pub(crate) fn polish_roots(p: &Poly, mut roots: Vec<Complex64>) -> Vec<Complex64> {
    let dp = p.derivative();
    for z in roots.iter_mut() {
        for _ in 0..8 {
            let d = dp.eval_complex(*z);
            if d.norm() == 0.0 {
                break;
            }
            let step = p.eval_complex(*z) / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *z -= step;
            if step.norm() <= 1e-17 * (1.0 + z.norm()) {
                break;
            }
        }
    }
    roots
}

/// Distinct rational roots of `p`, each confirmed by exact division.
pub fn rational_roots(p: &Poly) -> Vec<Rational> {
    factor(p)
        .into_iter()
        .filter(|f| f.degree() == 1)
        .map(|f| -f.coeffs()[0].clone() / f.coeffs()[1].clone())
        .collect()
}
