//! Constructors for c.s.r. families and for perturbations that break the
//! property. Everything is exact: orthogonal pieces are signed permutations
//! composed with Pythagorean rotations, so generated families feed the exact
//! decision path directly.
//!
//! Sampling is reproducible from the 64-bit seed carried by [`FamilySpec`].

use num::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CsrError, Result};
use crate::linalg::rational::{int, rat};
use crate::linalg::{determinant, inverse, MatrixFamily, RatMatrix, Rational};

/// Rational points on the unit circle.
const PYTHAGOREAN: [(i64, i64, i64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)];

/// A reproducible description of a generated family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    OrthogonalSubgroup { dim: usize, count: usize, seed: u64 },
    /// `(k, n)`-matrices over an orthogonal inner family of size `k`.
    Kn { k: usize, n: usize, count: usize, seed: u64 },
    OneN { n: usize, count: usize, seed: u64 },
    Torsion { k: Vec<usize>, n: Vec<usize>, count: usize, seed: u64 },
    TensorProduct { left: Box<FamilySpec>, right: Box<FamilySpec>, count: usize, seed: u64 },
    TransposeOf { inner: Box<FamilySpec> },
    Euler { r: usize },
    JordanCounterexample,
    /// `T⁻¹ A T` for a random integer `T` with entries in `[-3, 3]`.
    Conjugated { inner: Box<FamilySpec>, seed: u64 },
    /// One generator scaled or nudged off the c.s.r. set.
    Perturbed { inner: Box<FamilySpec>, seed: u64 },
}

impl FamilySpec {
    pub fn build(&self) -> Result<MatrixFamily> {
        match self {
            Self::OrthogonalSubgroup { dim, count, seed } => gen_orthogonal(*dim, *count, *seed),
            Self::Kn { k, n, count, seed } => {
                let inner = gen_orthogonal(*k, 2, seed.wrapping_add(1))?;
                gen_kn(&inner, *n, *count, *seed)
            }
            Self::OneN { n, count, seed } => gen_one_n(*n, *count, *seed),
            Self::Torsion { k, n, count, seed } => gen_torsion(k, n, *count, *seed),
            Self::TensorProduct { left, right, count, seed } => {
                gen_tensor_product(&left.build()?, &right.build()?, *count, *seed)
            }
            Self::TransposeOf { inner } => Ok(inner.build()?.transposed()),
            Self::Euler { r } => gen_euler(*r),
            Self::JordanCounterexample => Ok(jordan_counterexample()),
            Self::Conjugated { inner, seed } => gen_conjugated(&inner.build()?, *seed).map(|(f, _)| f),
            Self::Perturbed { inner, seed } => Ok(perturb(&inner.build()?, *seed)),
        }
    }

    /// Dimension of the family [`build`](Self::build) produces.
    pub fn dim(&self) -> usize {
        match self {
            Self::OrthogonalSubgroup { dim, .. } => *dim,
            Self::Kn { k, n, .. } => k * n,
            Self::OneN { n, .. } => *n,
            Self::Torsion { k, n, .. } => k.iter().zip(n).map(|(a, b)| a * b).sum(),
            Self::TensorProduct { left, right, .. } => left.dim() * right.dim(),
            Self::TransposeOf { inner } | Self::Conjugated { inner, .. } | Self::Perturbed { inner, .. } => inner.dim(),
            Self::Euler { r } => r - 1,
            Self::JordanCounterexample => 2,
        }
    }

    /// Whether the construction guarantees a c.s.r. family.
    pub fn is_csr_by_construction(&self) -> bool {
        match self {
            Self::Euler { r } => r % 2 == 0,
            Self::JordanCounterexample | Self::Perturbed { .. } => false,
            Self::TransposeOf { inner } | Self::Conjugated { inner, .. } => inner.is_csr_by_construction(),
            Self::TensorProduct { left, right, .. } => left.is_csr_by_construction() && right.is_csr_by_construction(),
            _ => true,
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_signed_permutation(n: usize, rng: &mut impl Rng) -> RatMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut m = RatMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        m.set(i, j, int(if rng.gen_bool(0.5) { 1 } else { -1 }));
    }
    m
}

/// Rotation by a Pythagorean angle in a random coordinate plane.
fn random_rotation(n: usize, rng: &mut impl Rng) -> RatMatrix {
    let mut m = RatMatrix::identity(n);
    if n < 2 {
        return m;
    }
    let i = rng.gen_range(0..n);
    let j = (i + rng.gen_range(1..n)) % n;
    let (a, b, c) = *PYTHAGOREAN.choose(rng).expect("nonempty table");
    let (cos, sin) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
    m.set(i, i, rat(cos, c));
    m.set(j, j, rat(cos, c));
    m.set(i, j, rat(-sin, c));
    m.set(j, i, rat(sin, c));
    m
}

/// A random rational orthogonal matrix.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> RatMatrix {
    let p = random_signed_permutation(n, rng);
    if n >= 2 && rng.gen_bool(0.5) {
        &p * &random_rotation(n, rng)
    } else {
        p
    }
}

/// `count` random rational orthogonal matrices of size `dim`.
pub fn gen_orthogonal(dim: usize, count: usize, seed: u64) -> Result<MatrixFamily> {
    if dim == 0 || count == 0 {
        return Err(CsrError::Precondition("dimension and count must be positive".into()));
    }
    let mut r = rng(seed);
    MatrixFamily::new((0..count).map(|_| random_orthogonal(dim, &mut r)).collect())
}

/// `count` random `(1, n)`-matrices: one entry `±1` per row, zeros elsewhere.
pub fn gen_one_n(n: usize, count: usize, seed: u64) -> Result<MatrixFamily> {
    if n < 2 || count == 0 {
        return Err(CsrError::Precondition("need n >= 2 and count >= 1".into()));
    }
    let mut r = rng(seed);
    let gens = (0..count)
        .map(|_| {
            let mut m = RatMatrix::zeros(n, n);
            for i in 0..n {
                let j = r.gen_range(0..n);
                m.set(i, j, int(if r.gen_bool(0.5) { 1 } else { -1 }));
            }
            m
        })
        .collect();
    MatrixFamily::new(gens)
}

/// `count` random `(k, n)`-matrices whose nonzero blocks are short products
/// of the inner generators.
pub fn gen_kn(inner: &MatrixFamily, n: usize, count: usize, seed: u64) -> Result<MatrixFamily> {
    if n < 2 || count == 0 {
        return Err(CsrError::Precondition("need n >= 2 and count >= 1".into()));
    }
    let k = inner.dim();
    let mut r = rng(seed);
    let gens = (0..count)
        .map(|_| {
            let mut m = RatMatrix::zeros(k * n, k * n);
            for bi in 0..n {
                let bj = r.gen_range(0..n);
                let len = r.gen_range(1..=2);
                let word: Vec<usize> = (0..len).map(|_| r.gen_range(0..inner.len())).collect();
                let block = inner.product(&word);
                for a in 0..k {
                    for b in 0..k {
                        m.set(bi * k + a, bj * k + b, block.get(a, b).clone());
                    }
                }
            }
            m
        })
        .collect();
    MatrixFamily::new(gens)
}

/// `count` random `(k̄, n̄)`-torsion matrices `A = BC`.
///
/// `C` copies one chosen block of each group `i` into all `n_i` blocks
/// through orthogonal maps `Q_{i,j}`, landing in the subspace `L` of vectors
/// `(Q_{i,1}u_i, …, Q_{i,n_i}u_i)`. `B` acts on `L` as a block-diagonal
/// orthogonal map of the `u_i`.
pub fn gen_torsion(k: &[usize], n: &[usize], count: usize, seed: u64) -> Result<MatrixFamily> {
    if k.len() != n.len() || k.is_empty() || k.contains(&0) || n.contains(&0) || n.iter().all(|&x| x < 2) {
        return Err(CsrError::Precondition("torsion shape needs k_i, n_i >= 1 and some n_j >= 2".into()));
    }
    if count == 0 {
        return Err(CsrError::Precondition("count must be positive".into()));
    }
    let d: usize = k.iter().zip(n).map(|(a, b)| a * b).sum();
    let mut offsets = Vec::with_capacity(k.len());
    let mut acc = 0;
    for (ki, ni) in k.iter().zip(n) {
        offsets.push(acc);
        acc += ki * ni;
    }
    let mut r = rng(seed);
    let place = |m: &mut RatMatrix, row: usize, col: usize, block: &RatMatrix| {
        for a in 0..block.rows() {
            for b in 0..block.cols() {
                m.set(row + a, col + b, block.get(a, b).clone());
            }
        }
    };
    let gens = (0..count)
        .map(|_| {
            let mut c = RatMatrix::zeros(d, d);
            let mut phi = RatMatrix::zeros(d, d);
            let mut phi_pinv = RatMatrix::zeros(d, d);
            let mut g = RatMatrix::zeros(d, d);
            for (i, (&ki, &ni)) in k.iter().zip(n).enumerate() {
                let h = r.gen_range(0..ni);
                let qs: Vec<RatMatrix> = (0..ni).map(|_| random_orthogonal(ki, &mut r)).collect();
                let o = offsets[i];
                for (j, q) in qs.iter().enumerate() {
                    place(&mut c, o + j * ki, o + h * ki, q);
                    // L is parametrized by u_i placed in the first block slot.
                    place(&mut phi, o + j * ki, o, q);
                    place(&mut phi_pinv, o, o + j * ki, &q.transpose().scale(&rat(1, ni as i64)));
                }
                place(&mut g, o, o, &random_orthogonal(ki, &mut r));
            }
            let b = &(&phi * &g) * &phi_pinv;
            &b * &c
        })
        .collect();
    MatrixFamily::new(gens)
}

/// Kronecker products `A ⊗ B` of generators sampled from the two families.
pub fn gen_tensor_product(f1: &MatrixFamily, f2: &MatrixFamily, count: usize, seed: u64) -> Result<MatrixFamily> {
    if count == 0 {
        return Err(CsrError::Precondition("count must be positive".into()));
    }
    let mut r = rng(seed);
    let gens = (0..count)
        .map(|_| {
            let a = &f1.generators()[r.gen_range(0..f1.len())];
            let b = &f2.generators()[r.gen_range(0..f2.len())];
            a.kron(b)
        })
        .collect();
    MatrixFamily::new(gens)
}

/// The 0/1 matrices `D_0, D_1` of size `r − 1` counting binary expansions
/// with digits below `r`.
pub fn euler_digit_matrices(r: usize) -> Result<[RatMatrix; 2]> {
    if r < 3 {
        return Err(CsrError::Precondition("r must be at least 3".into()));
    }
    let n = r - 1;
    let build = |s: i64| {
        RatMatrix::from_fn(n, n, |i, j| {
            let v = 2 * (i as i64 + 1) - (j as i64 + 1);
            if 1 - s <= v && v <= r as i64 - s {
                int(1)
            } else {
                Rational::zero()
            }
        })
    };
    Ok([build(0), build(1)])
}

/// The pair `B_s = (2/r) D_s`.
pub fn gen_euler(r: usize) -> Result<MatrixFamily> {
    let [d0, d1] = euler_digit_matrices(r)?;
    let c = rat(2, r as i64);
    MatrixFamily::new(vec![d0.scale(&c), d1.scale(&c)])
}

/// Two unipotent Jordan blocks; each has spectral radius one, their product
/// does not.
pub fn jordan_counterexample() -> MatrixFamily {
    MatrixFamily::new(vec![RatMatrix::from_i64(&[[1, 1], [0, 1]]), RatMatrix::from_i64(&[[1, 0], [1, 1]])])
        .expect("static family")
}

/// Random integer matrix with entries in `[-3, 3]` and nonzero determinant.
pub fn random_conjugator(n: usize, rng: &mut impl Rng) -> RatMatrix {
    loop {
        let t = RatMatrix::from_fn(n, n, |_, _| int(rng.gen_range(-3..=3)));
        if determinant(&t).map(|d| !d.is_zero()).unwrap_or(false) {
            return t;
        }
    }
}

/// `T⁻¹ A T` for every generator; returns the family and `T`.
pub fn gen_conjugated(family: &MatrixFamily, seed: u64) -> Result<(MatrixFamily, RatMatrix)> {
    let mut r = rng(seed);
    let t = random_conjugator(family.dim(), &mut r);
    let ti = inverse(&t)?;
    let out = family.map(|a| &(&ti * a) * &t)?;
    Ok((out, t))
}

/// Breaks the c.s.r. property of (most) families: one generator is scaled by
/// a factor other than one, or one entry is shifted.
pub fn perturb(family: &MatrixFamily, seed: u64) -> MatrixFamily {
    let mut r = rng(seed);
    let mut gens = family.generators().to_vec();
    let i = r.gen_range(0..gens.len());
    match r.gen_range(0..3) {
        0 => gens[i] = gens[i].scale(&rat(11, 10)),
        1 => gens[i] = gens[i].scale(&rat(9, 10)),
        _ => {
            let n = family.dim();
            let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
            let v = gens[i].get(a, b) + rat(1, 3);
            gens[i].set(a, b, v);
        }
    }
    MatrixFamily::new(gens).expect("shape unchanged")
}

/// The test corpus: c.s.r. constructions of every class with `d ≤ 4`, their
/// transposes and conjugates, and `adversarial` perturbed copies.
pub fn standard_corpus(seed: u64, size: usize, adversarial: usize) -> Vec<FamilySpec> {
    let mut r = rng(seed);
    let mut base = Vec::with_capacity(size);
    while base.len() < size {
        let s = r.gen::<u64>();
        let count = r.gen_range(1..=3);
        let spec = match base.len() % 8 {
            0 => FamilySpec::OrthogonalSubgroup { dim: r.gen_range(2..=4), count, seed: s },
            1 => FamilySpec::OneN { n: r.gen_range(2..=4), count, seed: s },
            2 => FamilySpec::Kn { k: 2, n: 2, count, seed: s },
            3 => {
                let (k, n) = if r.gen_bool(0.5) { (vec![1, 1], vec![2, 1]) } else { (vec![1, 1], vec![2, 2]) };
                FamilySpec::Torsion { k, n, count, seed: s }
            }
            4 => FamilySpec::TensorProduct {
                left: Box::new(FamilySpec::OneN { n: 2, count: 2, seed: s ^ 1 }),
                right: Box::new(FamilySpec::OrthogonalSubgroup { dim: 2, count: 2, seed: s ^ 2 }),
                count,
                seed: s,
            },
            5 => FamilySpec::TransposeOf { inner: Box::new(FamilySpec::OneN { n: r.gen_range(2..=4), count, seed: s }) },
            6 => FamilySpec::Conjugated {
                inner: Box::new(FamilySpec::OrthogonalSubgroup { dim: r.gen_range(2..=3), count, seed: s ^ 3 }),
                seed: s,
            },
            _ => FamilySpec::TransposeOf {
                inner: Box::new(FamilySpec::Torsion { k: vec![1, 1], n: vec![2, 1], count, seed: s }),
            },
        };
        base.push(spec);
    }
    let mut out = base.clone();
    for j in 0..adversarial {
        let inner = base[j % base.len()].clone();
        out.push(FamilySpec::Perturbed { inner: Box::new(inner), seed: r.gen() });
    }
    out
}
