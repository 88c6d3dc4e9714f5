use farey_orbits::arith::cyclically_ordered;
use farey_orbits::farey::farey_sequence;
use farey_orbits::group::{GroupElement, Word};
use farey_orbits::{Arc, ExtRational, IntMatrix2};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = ExtRational> {
    prop_oneof![
        9 => (-60i64..60, 1i64..40).prop_map(|(n, d)| ExtRational::new(n, d).unwrap()),
        1 => Just(ExtRational::infinity()),
    ]
}

/// Products of the `SL(2, ℤ)` generators `[[1,1],[0,1]]` and `[[0,-1],[1,0]]`.
fn matrix() -> impl Strategy<Value = IntMatrix2> {
    let t = IntMatrix2::new(1, 1, 0, 1).unwrap();
    let t_inv = IntMatrix2::new(1, -1, 0, 1).unwrap();
    let s = IntMatrix2::new(0, -1, 1, 0).unwrap();
    prop::collection::vec(0usize..3, 0..24).prop_map(move |picks| {
        picks.iter().fold(IntMatrix2::identity(), |g, &i| {
            g.mul([&t, &t_inv, &s][i])
        })
    })
}

fn distinct_triple() -> impl Strategy<Value = (ExtRational, ExtRational, ExtRational)> {
    (rational(), rational(), rational())
        .prop_filter("distinct", |(x, y, z)| x != y && y != z && x != z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn mobius_maps_preserve_cyclic_order(g in matrix(), (x, y, z) in distinct_triple()) {
        prop_assert_eq!(
            cyclically_ordered(&x, &y, &z),
            cyclically_ordered(&g.apply(&x), &g.apply(&y), &g.apply(&z))
        );
    }
}

proptest! {
    #[test]
    fn arc_membership_is_invariant(
        g in matrix(),
        (s, e) in (rational(), rational()).prop_filter("distinct", |(s, e)| s != e),
        x in rational(),
    ) {
        let arc = Arc::new(s, e).unwrap();
        prop_assert_eq!(arc.image(&g).contains(&g.apply(&x)), arc.contains(&x));
    }

    #[test]
    fn construction_is_scale_invariant(n in -1000i64..1000, d in 1i64..1000, k in 1i64..50) {
        prop_assert_eq!(ExtRational::new(k * n, k * d).unwrap(), ExtRational::new(n, d).unwrap());
        prop_assert_eq!(ExtRational::new(-k * n, -k * d).unwrap(), ExtRational::new(n, d).unwrap());
    }

    #[test]
    fn words_reduce_idempotently(letters in "[abc]{0,40}") {
        let w: Word = letters.parse().unwrap();
        let again: Word = w.to_string().replace('e', "").parse().unwrap();
        prop_assert_eq!(&again, &w);
        prop_assert!(w.letters().windows(2).all(|p| p[0] != p[1]));
        prop_assert_eq!(GroupElement::from_word(&w).word().unwrap(), w);
    }

    #[test]
    fn inverse_undoes_action(g in matrix(), x in rational()) {
        prop_assert_eq!(g.inverse().apply(&g.apply(&x)), x);
        prop_assert!(g.mul(&g.inverse()).is_identity());
    }
}

#[test]
fn mediants_of_neighbours_lie_strictly_between() {
    for n in 0..=10 {
        let seq = farey_sequence(n).unwrap();
        for (p, q) in seq.pairs() {
            let m = p.mediant(q);
            assert!(*p < m && m < *q);
        }
    }
}
