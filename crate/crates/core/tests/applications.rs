use num::{BigUint, ToPrimitive};

use csrkit::applications::{
    de_rham, decide_finiteness, euler_b, euler_report, fractal_regularity, lss_positive_uniform, lss_uniform,
    AffineOperator, Finiteness, Uniformity,
};
use csrkit::applications::lss::expm_f64;
use csrkit::decision::Answer;
use csrkit::generators::gen_conjugated;
use csrkit::linalg::rational::{int, rat};
use csrkit::linalg::{MatrixFamily, RatMatrix, Rational};

/// Coefficients of `∏_j (1 + x^{2^j} + … + x^{(r−1)2^j})` up to `x^k_max`.
fn partitions_by_series(r: usize, k_max: usize) -> Vec<u64> {
    let mut series = vec![0u64; k_max + 1];
    series[0] = 1;
    let mut step = 1;
    while step <= k_max {
        let mut next = vec![0u64; k_max + 1];
        for (k, &c) in series.iter().enumerate().filter(|(_, c)| **c != 0) {
            for d in 0..r {
                let m = k + d * step;
                if m > k_max {
                    break;
                }
                next[m] += c;
            }
        }
        series = next;
        step *= 2;
    }
    series
}

/// Counts digit strings directly, most significant position first.
fn partitions_by_search(r: usize, k: usize) -> u64 {
    fn go(rest: usize, pos: u32, r: usize) -> u64 {
        let w = 1usize << pos;
        let mut total = 0;
        for d in 0..r {
            if d * w > rest {
                break;
            }
            let left = rest - d * w;
            total += if pos == 0 { u64::from(left == 0) } else { go(left, pos - 1, r) };
        }
        total
    }
    let top = usize::BITS - k.max(1).leading_zeros();
    go(k, top, r)
}

#[test]
fn partition_counts_match_independent_counts() {
    for r in 2..=6 {
        let b = euler_b(r, 1 << 12).unwrap();
        let series = partitions_by_series(r, 1 << 12);
        for (k, (x, y)) in b.iter().zip(&series).enumerate() {
            assert_eq!(x.to_u64(), Some(*y), "r={r} k={k}");
        }
        for (k, x) in b.iter().enumerate().take(201) {
            assert_eq!(x.to_u64(), Some(partitions_by_search(r, k)), "r={r} k={k}");
        }
    }
}

#[test]
fn small_partition_values() {
    assert!(euler_b(2, 64).unwrap().iter().all(|x| *x == BigUint::from(1u32)));
    let b3: Vec<u64> = euler_b(3, 4).unwrap().iter().map(|x| x.to_u64().unwrap()).collect();
    assert_eq!(b3, [1, 1, 2, 1, 3]);
}

#[test]
fn even_digit_bounds_grow_like_a_power() {
    for r in [4usize, 6, 8] {
        let b = euler_b(r, 1 << 20).unwrap();
        let pts: Vec<(f64, f64)> =
            (1usize << 10..=1 << 20).step_by(7).map(|k| ((k as f64).log2(), csrkit::applications::euler::log2_big(&b[k]))).collect();
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let want = (r as f64 / 2.0).log2();
        assert!((slope - want).abs() < 0.05, "r={r}: slope {slope} vs {want}");
    }
}

#[test]
fn euler_report_is_consistent() {
    let rep = euler_report(4, 1 << 14, 8, 1e-9).unwrap();
    assert_eq!(rep.csr_verdict.answer, Answer::Yes);
    assert!(rep.p1_estimate <= rep.p2_estimate);
    assert!((rep.p1_estimate - rep.p2_estimate).abs() < 0.05);
    let rep = euler_report(3, 1 << 14, 8, 1e-9).unwrap();
    assert_eq!(rep.csr_verdict.answer, Answer::No);
}

fn fam(ms: Vec<RatMatrix>) -> MatrixFamily {
    MatrixFamily::new(ms).unwrap()
}

#[test]
fn rotation_and_diagonal_projection_is_finite() {
    let f = fam(vec![RatMatrix::from_i64(&[[0, -1], [1, 0]]), RatMatrix::from_i64(&[[1, 0], [1, 0]])]);
    let rep = decide_finiteness(&f, 8, 1e-9).unwrap();
    assert_eq!(rep.verdict, Finiteness::Finite);
    assert!(rep.cardinality.is_some());
}

#[test]
fn unipotent_pair_is_infinite() {
    let f = fam(vec![RatMatrix::from_i64(&[[1, 1], [0, 1]]), RatMatrix::from_i64(&[[1, 0], [1, 1]])]);
    let rep = decide_finiteness(&f, 8, 1e-9).unwrap();
    assert_eq!(rep.verdict, Finiteness::Infinite);
    let (_, rho) = rep.witness.unwrap();
    assert!((rho - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-9);
}

fn so3_pair() -> MatrixFamily {
    fam(vec![
        RatMatrix::from_i64(&[[0, -1, 0], [1, 0, 0], [0, 0, 0]]),
        RatMatrix::from_i64(&[[0, 0, 0], [0, 0, -1], [0, 1, 0]]),
    ])
}

#[test]
fn conjugated_antisymmetric_pair_recovers_the_gram_matrix() {
    for seed in 0..5 {
        let (f, t) = gen_conjugated(&so3_pair(), seed).unwrap();
        let rep = lss_uniform(&f, 1e-9).unwrap();
        assert_eq!(rep.verdict, Uniformity::Uniform);
        let h = rep.h.unwrap();
        let gram = &t.transpose() * &t;
        let c: Rational = gram.get(0, 0) / h.get(0, 0);
        assert_eq!(h.scale(&c), gram, "seed {seed}");

        let hf = h.to_f64();
        let scale = hf.amax();
        for a in f.iter() {
            for tt in [0.25, 0.5, 1.0] {
                let e = expm_f64(a, tt);
                let drift = (e.transpose() * &hf * &e - &hf).amax() / scale;
                assert!(drift <= 1e-6, "seed {seed} t {tt}: {drift}");
            }
        }
    }
}

#[test]
fn positive_systems() {
    let lap = fam(vec![RatMatrix::from_i64(&[[-1, 1], [1, -1]])]);
    let rep = lss_positive_uniform(&lap, 1e-9).unwrap();
    assert_eq!(rep.verdict, Uniformity::Uniform);
    // Every point of the certificate has x₁ = x₂, so x₁ + x₂ is conserved on it.
    let v = rep.subspace.unwrap();
    let p = v.affine_point().unwrap();
    assert_eq!(p[0], p[1]);
    assert_eq!(rep.alpha, rat(1, 2));
}

/// `z ↦ m z` and `z ↦ (1 − m)(z − 1) + 1` for `m = 1/2 + 3i/8`, `|m| = 5/8`.
fn similarity_pair() -> (AffineOperator, AffineOperator) {
    let (a, b) = (rat(1, 2), rat(3, 8));
    let mul = |a: &Rational, b: &Rational| {
        RatMatrix::from_rows(vec![vec![a.clone(), -b.clone()], vec![b.clone(), a.clone()]]).unwrap()
    };
    let b0 = AffineOperator::new(mul(&a, &b), vec![int(0), int(0)]).unwrap();
    let b1 = AffineOperator::new(mul(&(int(1) - &a), &-b.clone()), vec![a.clone(), b.clone()]).unwrap();
    (b0, b1)
}

#[test]
fn similarity_pair_has_constant_regularity() {
    let (b0, b1) = similarity_pair();
    assert_eq!(b0.apply(&b1.fixed_point().unwrap()), b1.apply(&b0.fixed_point().unwrap()));
    let rep = fractal_regularity(&b0, &b1, 8, 1e-9).unwrap();
    assert!(rep.constant_regularity);
    let want = -(5.0f64 / 8.0).log2();
    assert!((rep.alpha_min - want).abs() < 1e-9 && (rep.alpha_max - want).abs() < 1e-9);
    assert!(rep.jsr_upper - rep.lsr_lower <= 2e-9);
}

#[test]
fn de_rham_curves() {
    let rep = fractal_regularity(&de_rham(&rat(1, 4)).unwrap().0, &de_rham(&rat(1, 4)).unwrap().1, 8, 1e-9).unwrap();
    assert!(rep.constant_regularity);
    assert!((rep.alpha_min - 1.0).abs() < 1e-12);
    let (b0, b1) = de_rham(&rat(1, 3)).unwrap();
    let rep = fractal_regularity(&b0, &b1, 8, 1e-9).unwrap();
    assert!(!rep.constant_regularity);
    assert!(0.0 < rep.alpha_min && rep.alpha_min < rep.alpha_max);
}
