use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use csrkit::decision::{brute_force_csr, decide, decide_irreducible, decide_nonneg, Answer};
use csrkit::generators::{
    euler_digit_matrices, gen_euler, gen_kn, gen_one_n, gen_orthogonal, gen_tensor_product, gen_torsion,
    random_orthogonal, standard_corpus, FamilySpec,
};
use csrkit::linalg::rational::{int, rat};
use csrkit::linalg::{spectral_radius, MatrixFamily, RatMatrix, Rational};

fn cube_vertices(n: usize) -> Vec<Vec<Rational>> {
    (0..1u32 << n).map(|m| (0..n).map(|i| int(if m >> i & 1 == 1 { 1 } else { -1 })).collect()).collect()
}

#[test]
fn one_n_matrices_preserve_cube_vertices() {
    for n in 2..=4 {
        for seed in 0..10 {
            let f = gen_one_n(n, 3, seed).unwrap();
            for a in f.iter() {
                for v in cube_vertices(n) {
                    let w = a.mul_vec(&v);
                    assert!(w.iter().all(|x| *x == int(1) || *x == int(-1)), "n={n} seed={seed}");
                }
            }
        }
    }
}

fn nonzero_blocks_per_row(m: &RatMatrix, k: usize) -> Vec<usize> {
    let n = m.rows() / k;
    (0..n).map(|bi| (0..n).filter(|&bj| !m.submatrix(bi * k, bi * k + k, bj * k, bj * k + k).is_zero()).count()).collect()
}

#[test]
fn kn_products_stay_kn() {
    let inner = gen_orthogonal(2, 2, 5).unwrap();
    for seed in 0..10 {
        let f = gen_kn(&inner, 3, 3, seed).unwrap();
        for a in f.iter() {
            assert!(nonzero_blocks_per_row(a, 2).iter().all(|&c| c == 1));
            for b in f.iter() {
                assert!(nonzero_blocks_per_row(&(a * b), 2).iter().all(|&c| c == 1));
            }
        }
    }
}

#[test]
fn kn_with_trivial_inner_selects_rows() {
    let inner = MatrixFamily::new(vec![RatMatrix::identity(1)]).unwrap();
    let f = gen_kn(&inner, 2, 4, 1).unwrap();
    for a in f.iter() {
        assert!(a.data().iter().all(|x| *x == int(0) || *x == int(1)));
        assert!((0..2).all(|i| a.row(i).iter().filter(|x| **x == int(1)).count() == 1));
    }
}

#[test]
fn sampled_kn_family_is_csr() {
    let f = FamilySpec::Kn { k: 2, n: 2, count: 3, seed: 11 }.build().unwrap();
    assert_eq!(f.dim(), 4);
    let v = decide(&f, 8, 1e-9).unwrap();
    assert_eq!(v.answer, Answer::Yes);
    assert_eq!(brute_force_csr(&f, 8, 1e-9).unwrap().answer, Answer::Yes);
    if csrkit::subspace::is_irreducible(&f) {
        assert_eq!(decide_irreducible(&f, 1e-9).unwrap().answer, Answer::Yes);
    }
}

fn sq_norm(v: &[Rational]) -> Rational {
    v.iter().map(|x| x * x).sum()
}

/// A point of `I_{k̄,n̄}` up to scale: blocks of each group are orthogonal
/// images of one vector, so they share a norm.
fn torsion_point(k: &[usize], n: &[usize], rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let mut x = Vec::new();
    for (&ki, &ni) in k.iter().zip(n) {
        let u: Vec<Rational> = (0..ki).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect();
        for _ in 0..ni {
            x.extend(random_orthogonal(ki, rng).mul_vec(&u));
        }
    }
    x
}

fn in_torsion_set(x: &[Rational], k: &[usize], n: &[usize]) -> bool {
    let mut o = 0;
    for (&ki, &ni) in k.iter().zip(n) {
        let first = sq_norm(&x[o..o + ki]);
        if (1..ni).any(|j| sq_norm(&x[o + j * ki..o + (j + 1) * ki]) != first) {
            return false;
        }
        o += ki * ni;
    }
    true
}

#[test]
fn torsion_matrices_preserve_the_torsion_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (k, n) in [(vec![1, 1], vec![2, 1]), (vec![1, 1], vec![2, 2]), (vec![2, 1], vec![2, 1])] {
        let f = gen_torsion(&k, &n, 3, 42).unwrap();
        assert_eq!(f.dim(), k.iter().zip(&n).map(|(a, b)| a * b).sum::<usize>());
        for _ in 0..100 {
            let x = torsion_point(&k, &n, &mut rng);
            assert!(in_torsion_set(&x, &k, &n));
            for a in f.iter() {
                let y = a.mul_vec(&x);
                assert!(in_torsion_set(&y, &k, &n));
                assert_eq!(sq_norm(&y), sq_norm(&x));
            }
        }
    }
}

#[test]
fn sampled_torsion_family_is_csr() {
    let f = gen_torsion(&[1, 1], &[2, 1], 3, 3).unwrap();
    assert_eq!(decide(&f, 8, 1e-9).unwrap().answer, Answer::Yes);
    assert_eq!(brute_force_csr(&f, 8, 1e-9).unwrap().answer, Answer::Yes);
}

#[test]
fn tensor_radius_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let a = RatMatrix::from_fn(2, 2, |_, _| int(rng.gen_range(-3..=3)));
        let b = RatMatrix::from_fn(3, 3, |_, _| int(rng.gen_range(-3..=3)));
        let ra = spectral_radius(&a, 1e-9).unwrap().value;
        let rb = spectral_radius(&b, 1e-9).unwrap().value;
        let rab = spectral_radius(&a.kron(&b), 1e-9).unwrap().value;
        assert!((rab - ra * rb).abs() <= 1e-6 * (1.0 + rab));
    }
    let i = RatMatrix::identity(2);
    assert_eq!(i.kron(&i), RatMatrix::identity(4));
}

#[test]
fn tensor_of_one_n_families_is_csr() {
    let f = gen_tensor_product(&gen_one_n(2, 2, 1).unwrap(), &gen_one_n(2, 2, 2).unwrap(), 3, 9).unwrap();
    assert_eq!(f.dim(), 4);
    assert_eq!(decide(&f, 8, 1e-9).unwrap().answer, Answer::Yes);
}

#[test]
fn euler_small_cases() {
    let [d0, d1] = euler_digit_matrices(3).unwrap();
    assert_eq!(d0, RatMatrix::from_i64(&[[1, 0], [1, 1]]));
    assert_eq!(d1, RatMatrix::from_i64(&[[1, 1], [0, 1]]));
    for r in 3..=12 {
        let [d0, d1] = euler_digit_matrices(r).unwrap();
        let half = (&d0 + &d1).scale(&rat(1, 2));
        for j in 0..r - 1 {
            let s: Rational = half.column(j).into_iter().sum();
            assert_eq!(s, rat(r as i64, 2), "r={r} column {j}");
        }
    }
}

#[test]
fn euler_parity_decides_csr() {
    for r in 3..=8 {
        let want = if r % 2 == 0 { Answer::Yes } else { Answer::No };
        assert_eq!(decide_nonneg(&gen_euler(r).unwrap(), 1e-9).unwrap().answer, want, "r={r}");
    }
}

#[test]
fn corpus_specs_match_their_dimensions() {
    for spec in standard_corpus(1, 40, 10) {
        assert_eq!(spec.build().unwrap().dim(), spec.dim(), "{spec:?}");
    }
}

#[test]
fn constructions_pass_the_oracle() {
    for spec in standard_corpus(99, 40, 0) {
        let f = spec.build().unwrap();
        assert!(spec.is_csr_by_construction());
        assert_eq!(brute_force_csr(&f, 8, 1e-9).unwrap().answer, Answer::Yes, "{spec:?}");
        assert_eq!(brute_force_csr(&f.transposed(), 8, 1e-9).unwrap().answer, Answer::Yes, "{spec:?}");
    }
}
