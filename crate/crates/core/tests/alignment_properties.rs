use std::collections::BTreeMap;

use num_rational::Ratio;
use proptest::prelude::*;

use topic_floor::alignment::{avg_align, purity, Partition};

const LABELS: [&str; 3] = ["O", "T", "X"];

fn partition() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (1usize..60, 1usize..10, 2usize..=3).prop_flat_map(|(m, k, c)| {
        (prop::collection::vec(0..k, m), prop::collection::vec(0..c, m))
    })
}

fn build(clusters: &[usize], classes: &[usize], names: &[&str]) -> Partition {
    let labels: Vec<&str> = classes.iter().map(|&c| names[c]).collect();
    Partition::from_labels(clusters, &labels).unwrap()
}

/// Multiset of (size, align) pairs.
fn profile(p: &Partition) -> Vec<(u64, Ratio<u64>)> {
    let mut v: Vec<_> = avg_align(p).per_topic.iter().map(|t| (t.size, t.align)).collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn weighted_alignment_is_purity((clusters, classes) in partition()) {
        let p = build(&clusters, &classes, &LABELS);
        let r = avg_align(&p);
        prop_assert_eq!(r.avg_align, purity(&p));
        prop_assert_eq!(r.weights.iter().copied().sum::<Ratio<u64>>(), Ratio::from_integer(1));
        let n_classes = classes.iter().max().unwrap() + 1;
        for t in &r.per_topic {
            prop_assert!(t.align >= Ratio::new(1, n_classes as u64));
            prop_assert!(t.align <= Ratio::from_integer(1));
        }
    }

    #[test]
    fn renaming_classes_changes_nothing((clusters, classes) in partition()) {
        let a = build(&clusters, &classes, &LABELS);
        let b = build(&clusters, &classes, &["zeta", "alpha", "mid"]);
        prop_assert_eq!(profile(&a), profile(&b));
        prop_assert_eq!(avg_align(&a).avg_align, avg_align(&b).avg_align);
    }

    #[test]
    fn permuting_topic_ids_changes_nothing((clusters, classes) in partition(), shift in 1usize..50) {
        let permuted: Vec<usize> = clusters.iter().map(|&c| (c * 7 + shift) % 97 + 1000).collect();
        let a = build(&clusters, &classes, &LABELS);
        let b = build(&permuted, &classes, &LABELS);
        prop_assert_eq!(profile(&a), profile(&b));
        prop_assert_eq!(avg_align(&a).avg_align, avg_align(&b).avg_align);
    }

    #[test]
    fn refining_never_lowers_and_merging_never_raises(
        (clusters, classes) in partition(),
        picks in prop::collection::vec(any::<bool>(), 60),
        merge in (0usize..10, 0usize..10),
    ) {
        let base = avg_align(&build(&clusters, &classes, &LABELS)).avg_align;
        let target = clusters[0];
        let refined: Vec<usize> = clusters
            .iter()
            .zip(&picks)
            .map(|(&c, &p)| if c == target && p { 10_000 } else { c })
            .collect();
        prop_assert!(avg_align(&build(&refined, &classes, &LABELS)).avg_align >= base);

        let merged: Vec<usize> = clusters.iter().map(|&c| if c == merge.1 { merge.0 } else { c }).collect();
        prop_assert!(avg_align(&build(&merged, &classes, &LABELS)).avg_align <= base);
    }
}

#[test]
fn hand_computed_cases() {
    // {t1: 3 O + 1 T}, {t2: 1 O + 3 T}
    let p = build(&[1, 1, 1, 1, 2, 2, 2, 2], &[0, 0, 0, 1, 0, 1, 1, 1], &LABELS);
    assert_eq!(avg_align(&p).avg_align, Ratio::new(3, 4));

    let singletons = build(&[0, 1, 2, 3], &[0, 1, 0, 1], &LABELS);
    assert_eq!(purity(&singletons), Ratio::from_integer(1));

    let split = build(&[0, 0, 1, 1], &[0, 1, 1, 0], &LABELS);
    assert_eq!(avg_align(&split).avg_align, Ratio::new(1, 2));
    assert!(avg_align(&split).per_topic.iter().all(|t| t.tie && t.majority_label == "O"));
}

#[test]
fn one_cluster_gives_the_majority_share() {
    let classes = [0, 0, 1, 0, 1, 0, 0];
    let p = build(&[0; 7], &classes, &LABELS);
    let counts: BTreeMap<usize, u64> = classes.iter().fold(BTreeMap::new(), |mut m, &c| {
        *m.entry(c).or_default() += 1;
        m
    });
    assert_eq!(purity(&p), Ratio::new(*counts.values().max().unwrap(), 7));
}
