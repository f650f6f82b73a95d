use proptest::prelude::*;

use csrkit::decision::{decide, verify_certificate, Answer, CsrVerdict};
use csrkit::generators::{gen_conjugated, standard_corpus, FamilySpec};
use csrkit::io::{family_to_json, parse_family};
use csrkit::linalg::rational::int;
use csrkit::linalg::{MatrixFamily, RatMatrix};

fn corpus_family() -> impl Strategy<Value = (FamilySpec, MatrixFamily)> {
    (any::<u64>(), 0usize..10).prop_map(|(seed, idx)| {
        let spec = standard_corpus(seed, 8, 2)[idx].clone();
        let f = spec.build().unwrap();
        (spec, f)
    })
}

fn integer_family() -> impl Strategy<Value = MatrixFamily> {
    (1usize..=3, 1usize..=2).prop_flat_map(|(n, m)| {
        proptest::collection::vec(proptest::collection::vec(prop_oneof![2 => Just(0i64), 1 => -1i64..=1], n * n), m)
            .prop_map(move |gens| {
                MatrixFamily::new(gens.iter().map(|v| RatMatrix::from_fn(n, n, |i, j| int(v[i * n + j]))).collect())
                    .unwrap()
            })
    })
}

fn agree(a: &CsrVerdict, b: &CsrVerdict) -> bool {
    a.answer == Answer::Unknown || b.answer == Answer::Unknown || a.answer == b.answer
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdict_survives_transpose((_, f) in corpus_family()) {
        let a = decide(&f, 8, 1e-9).unwrap();
        let b = decide(&f.transposed(), 8, 1e-9).unwrap();
        prop_assert!(agree(&a, &b), "{:?} vs {:?}", a.answer, b.answer);
    }

    #[test]
    fn verdict_survives_conjugation((_, f) in corpus_family(), seed in any::<u64>()) {
        let (g, _) = gen_conjugated(&f, seed).unwrap();
        let a = decide(&f, 8, 1e-9).unwrap();
        let b = decide(&g, 8, 1e-9).unwrap();
        prop_assert!(agree(&a, &b), "{:?} vs {:?}", a.answer, b.answer);
    }

    #[test]
    fn constructions_are_never_refuted((spec, f) in corpus_family()) {
        let v = decide(&f, 8, 1e-9).unwrap();
        if spec.is_csr_by_construction() {
            prop_assert_ne!(v.answer, Answer::No);
        }
        if v.answer != Answer::Unknown {
            prop_assert!(verify_certificate(&f, &v, 1e-9));
        }
    }

    #[test]
    fn certificates_verify_on_small_integer_families(f in integer_family()) {
        let v = decide(&f, 6, 1e-9).unwrap();
        if v.answer != Answer::Unknown {
            prop_assert!(verify_certificate(&f, &v, 1e-9));
        }
        // A certificate that survives a JSON round trip still verifies.
        let back: CsrVerdict = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        prop_assert_eq!(&back, &v);
    }

    #[test]
    fn family_json_round_trip(f in integer_family()) {
        let text = serde_json::to_string(&family_to_json(&f)).unwrap();
        prop_assert_eq!(parse_family(&text).unwrap(), f);
    }
}
