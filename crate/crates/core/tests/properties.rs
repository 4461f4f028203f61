use blab::bohr_bourgain::{intersect, BourgainSystem};
use blab::increment::{itlem_evaluate, run_increment, Mode};
use blab::sets::{
    count_ap3, count_ap3_brute, restricted_core, restricted_sumset, select_core_representatives,
    sumset,
};
use blab::{make_group, GSet, Group};
use proptest::prelude::*;

fn group_and_set() -> impl Strategy<Value = (Group, GSet)> {
    prop_oneof![
        (2u64..=60).prop_map(|n| vec![n]),
        (2u64..=8, 2u64..=8).prop_map(|(a, b)| vec![a, b]),
    ]
    .prop_flat_map(|shape| {
        let n: u64 = shape.iter().product();
        (
            Just(shape),
            prop::collection::vec(any::<bool>(), n as usize),
        )
    })
    .prop_map(|(shape, bits)| {
        let g = make_group(&shape).unwrap();
        let a = GSet::from_predicate(&g, |x| bits[x]);
        (g, a)
    })
}

fn system_on(g: &Group, freqs: &[usize], delta: f64) -> BourgainSystem {
    let n = g.cardinality();
    let freqs: Vec<usize> = freqs.iter().map(|f| f % n).collect();
    BourgainSystem::bohr(g, &freqs, delta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sumset_is_symmetric_and_at_least_as_large((_, a) in group_and_set(), t in 0usize..64) {
        let b = a.translate(t % a.group().cardinality());
        let ab = sumset(&a, &b).unwrap();
        prop_assert_eq!(ab.indices(), sumset(&b, &a).unwrap().indices());
        prop_assert!(restricted_sumset(&a, &b).unwrap().is_subset(&ab));
        if !a.is_empty() {
            prop_assert!(ab.len() >= a.len());
        }
    }

    #[test]
    fn fast_and_brute_counts_agree((_, a) in group_and_set()) {
        let fast = count_ap3(&a).unwrap();
        let brute = count_ap3_brute(&a);
        prop_assert_eq!(fast.total, brute.total);
        prop_assert_eq!(fast.nontrivial, brute.nontrivial);
    }

    #[test]
    fn restricted_core_identity((_, a) in group_and_set(), t in 0usize..64) {
        let b = a.translate(t % a.group().cardinality()).union(&a.negated()).unwrap();
        let (s, holds) = restricted_core(&a, &b).unwrap();
        prop_assert!(holds);
        let reps = select_core_representatives(&s);
        prop_assert!(reps.is_subset(&s));
        prop_assert_eq!(reps.doubled().indices(), s.doubled().indices());
        prop_assert_eq!(count_ap3(&reps).unwrap().nontrivial, 0);
    }

    #[test]
    fn dilates_are_nested(
        n in 3u64..200,
        freqs in prop::collection::vec(0usize..1000, 1..3),
        delta in 0.05f64..0.5,
        l1 in 0.05f64..=1.0,
        l2 in 0.05f64..=1.0,
    ) {
        let g = make_group(&[n]).unwrap();
        let s = system_on(&g, &freqs, delta);
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        let small = s.dilate(lo).unwrap().materialize(1.0);
        let big = s.dilate(hi).unwrap().materialize(1.0);
        prop_assert!(small.is_subset(&big));
        prop_assert!(small.contains(0));
        prop_assert_eq!(small.negated().indices(), small.indices());
    }

    #[test]
    fn regular_dilate_lies_in_its_window(
        n in 3u64..300,
        freqs in prop::collection::vec(0usize..1000, 1..4),
        delta in 0.05f64..0.5,
        other in prop::collection::vec(0usize..1000, 0..2),
    ) {
        let g = make_group(&[n]).unwrap();
        let mut s = system_on(&g, &freqs, delta);
        if !other.is_empty() {
            s = intersect(&[s, system_on(&g, &other, delta)]).unwrap();
        }
        let (lambda, r) = s.regular_dilate().unwrap();
        prop_assert!((0.5..1.0).contains(&lambda));
        prop_assert!(r.is_regular());
        prop_assert_eq!(r.materialize(1.0).indices(), s.materialize(lambda).indices());
    }

    #[test]
    fn increment_evaluation_is_conclusive_in_paper_mode(
        n in (7u64..80).prop_map(|n| n | 1),
        bits in prop::collection::vec(any::<bool>(), 160),
        trivial in any::<bool>(),
        freq in 1usize..1000,
    ) {
        let g = make_group(&[n]).unwrap();
        let mut a = GSet::from_predicate(&g, |x| bits[x]);
        if a.is_empty() {
            a.insert(0);
        }
        let sys = if trivial {
            BourgainSystem::trivial(&g)
        } else {
            system_on(&g, &[freq], 0.4).regular_dilate().unwrap().1
        };
        let r = itlem_evaluate(&a, &sys, Mode::Paper).unwrap();
        prop_assert!(r.conclusive());
        prop_assert!(r.decomposition_error < 1e-9);
    }

    #[test]
    fn practical_traces_are_monotone(
        n in (7u64..80).prop_map(|n| n | 1),
        bits in prop::collection::vec(any::<bool>(), 160),
    ) {
        let g = make_group(&[n]).unwrap();
        let mut a = GSet::from_predicate(&g, |x| bits[x]);
        if a.is_empty() {
            a.insert(0);
        }
        let t = run_increment(&a, &BourgainSystem::trivial(&g), Mode::Practical, 8).unwrap();
        prop_assert!(t.monotone());
        prop_assert!(!t.steps.is_empty());
        prop_assert_eq!(t.steps[0].k, 0);
    }
}
