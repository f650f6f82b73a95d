use proptest::prelude::*;

use csrkit::linalg::rational::{int, rat};
use csrkit::linalg::{
    charpoly, format_rational, inverse, kernel_basis, parse_rational, rank, spectral_radius, MatrixFamily, RatMatrix,
};

fn small_matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
    proptest::collection::vec(-3i64..=3, n * n)
        .prop_map(move |v| RatMatrix::from_fn(n, n, |i, j| int(v[i * n + j])))
}

fn sized_matrix() -> impl Strategy<Value = RatMatrix> {
    (1usize..=4).prop_flat_map(small_matrix)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rank_plus_nullity_is_dimension(m in sized_matrix()) {
        let k = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + k.dim(), m.cols());
        for v in k.vectors() {
            prop_assert!(m.mul_vec(v).iter().all(|x| *x == int(0)));
        }
    }

    #[test]
    fn spectral_radius_of_powers(m in sized_matrix(), k in 1u32..=4) {
        let r = spectral_radius(&m, 1e-9).unwrap().value;
        let rk = spectral_radius(&m.pow(k), 1e-9).unwrap().value;
        prop_assert!((rk - r.powi(k as i32)).abs() <= 1e-6 * (1.0 + rk));
    }

    #[test]
    fn spectral_radius_is_similarity_invariant(m in small_matrix(3), t in small_matrix(3)) {
        prop_assume!(inverse(&t).is_ok());
        let ti = inverse(&t).unwrap();
        let conj = &(&ti * &m) * &t;
        let a = spectral_radius(&m, 1e-9).unwrap().value;
        let b = spectral_radius(&conj, 1e-9).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a));
        prop_assert_eq!(charpoly(&m), charpoly(&conj));
    }

    #[test]
    fn transpose_reverses_products(a in small_matrix(3), b in small_matrix(3), word in proptest::collection::vec(0usize..2, 0..6)) {
        let f = MatrixFamily::new(vec![a, b]).unwrap();
        let rev: Vec<usize> = word.iter().rev().copied().collect();
        prop_assert_eq!(f.product(&word).transpose(), f.transposed().product(&rev));
    }

    #[test]
    fn rationals_round_trip(p in -1000i64..1000, q in 1i64..1000) {
        let x = rat(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn inverse_is_two_sided(m in sized_matrix()) {
        if let Ok(mi) = inverse(&m) {
            let id = RatMatrix::identity(m.rows());
            prop_assert_eq!(&m * &mi, id.clone());
            prop_assert_eq!(&mi * &m, id);
        }
    }
}
