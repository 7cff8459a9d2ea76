use std::sync::Arc;

use proptest::prelude::*;
use tsc_core::graphs::{gp_k, ColoredCayleyGraph};
use tsc_core::{build_field, ColorPermutation, Elem, GammaElem, GammaL1, LinearMap};

fn small_field() -> impl Strategy<Value = (u32, u32)> {
    prop::sample::select(vec![(2, 2), (2, 3), (2, 4), (2, 6), (3, 2), (3, 3), (3, 4), (5, 2), (7, 2), (11, 2), (13, 1)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms((p, r) in small_field(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = build_field(p, r, None).unwrap();
        let (a, b, c) = (Elem(a % f.q()), Elem(b % f.q()), Elem(c % f.q()));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Elem(0));
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem(1));
            prop_assert_eq!(f.antilog(f.dlog(a).unwrap() as u64), a);
        }
        prop_assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
    }

    #[test]
    fn gamma_pow_matches_repeated_compose((p, r) in small_field(), e in 0u64..1000, s in 0u32..8, m in 0u64..40) {
        let gamma = GammaL1::new(p, r).unwrap();
        let g = gamma.normalize(GammaElem { e, s });
        let mut acc = GammaElem::IDENTITY;
        for _ in 0..m {
            acc = gamma.compose(acc, g);
        }
        prop_assert_eq!(gamma.pow(g, m), acc);
    }

    #[test]
    fn inverse_matrix((p, r) in small_field(), index in any::<u64>()) {
        let n = r as usize;
        let space = (p as u64).pow(r * r);
        let m = LinearMap::from_index(p, n, index % space);
        match m.inverse() {
            Some(inv) => {
                prop_assert_eq!(m.compose(&inv), LinearMap::identity(p, n));
                prop_assert_eq!(m.rank(), n);
            }
            None => prop_assert!(m.rank() < n),
        }
    }

    #[test]
    fn graph_file_round_trip((p, r) in small_field(), k in 2usize..4) {
        let f = Arc::new(build_field(p, r, None).unwrap());
        let Ok(g) = gp_k(f, k) else { return Ok(()) };
        let back = ColoredCayleyGraph::from_json(&g.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.color_table(), g.color_table());
        prop_assert_eq!(back.label(), g.label());
    }

    #[test]
    fn permutation_compose_and_inverse(images in Just((0u32..6).collect::<Vec<_>>()).prop_shuffle()) {
        let s = ColorPermutation::from_images(images).unwrap();
        prop_assert!(s.compose(&s.inverse()).is_identity());
        prop_assert_eq!(ColorPermutation::parse(6, &s.to_string()).unwrap(), s);
    }
}

#[test]
fn malformed_graph_json_is_rejected() {
    assert!(ColoredCayleyGraph::from_json("{\"label\": 3}").is_err());
    assert!(ColoredCayleyGraph::from_json("not json").is_err());
}
