//! Property tests across modules.

use proptest::prelude::*;
use qgrass::expansion::{class_norm, CochainSpace, SupportGraph};
use qgrass::operators::coboundary;
use qgrass::random::{sample_trial, ConnectivityTester};
use qgrass::{Ambient, Chain, Field, ModRing};

fn line_cochain(amb: &Ambient, ring: ModRing, coeffs: &[u32]) -> Chain {
    let lines = amb.level(1).unwrap();
    Chain::from_terms(
        amb.n(),
        1,
        ring,
        lines.iter().zip(coeffs).map(|(l, &c)| (l.clone(), c as i64)),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn class_norm_is_at_most_support(coeffs in prop::collection::vec(0u32..3, 15)) {
        let amb = Ambient::with_q(2, 4).unwrap();
        let ring = ModRing::new(3).unwrap();
        let a = line_cochain(&amb, ring, &coeffs);
        let norm = class_norm(&amb, &a).unwrap();
        prop_assert!(norm <= a.len());
        // shifting by a coboundary leaves the class norm unchanged
        let zero_space = amb.level(0).unwrap()[0].clone();
        let shift = coboundary(amb.field(), &Chain::generator(zero_space, 1, ring)).unwrap();
        prop_assert_eq!(class_norm(&amb, &a.plus(&shift).unwrap()).unwrap(), norm);
    }

    #[test]
    fn coboundary_weight_matches_operator(coeffs in prop::collection::vec(0u32..3, 15)) {
        let amb = Ambient::with_q(2, 4).unwrap();
        let ring = ModRing::new(3).unwrap();
        let a = line_cochain(&amb, ring, &coeffs);
        let space = CochainSpace::new(&amb, 1, ring).unwrap();
        let dense = space.to_dense(&a).unwrap();
        prop_assert_eq!(space.from_dense(&dense).unwrap(), a.clone());
        let d = coboundary(amb.field(), &a).unwrap();
        prop_assert_eq!(space.coboundary_weight(&dense).unwrap(), d.len());
    }

    #[test]
    fn support_graph_components_partition(coeffs in prop::collection::vec(0u32..3, 35)) {
        let amb = Ambient::with_q(2, 4).unwrap();
        let ring = ModRing::new(3).unwrap();
        let planes = amb.level(2).unwrap();
        let a = Chain::from_terms(4, 2, ring, planes.iter().zip(&coeffs).map(|(p, &c)| (p.clone(), c as i64))).unwrap();
        let g = SupportGraph::new(&Field::new(2).unwrap(), &a);
        let mut seen: Vec<usize> = g.components().into_iter().flatten().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..a.len()).collect::<Vec<_>>());
    }

    #[test]
    fn connectivity_is_monotone_under_coupling(seed in any::<u64>(), trial in 0u64..50, p1 in 0.0f64..1.0, p2 in 0.0f64..1.0) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let t = ConnectivityTester::new(4, 1, 2, 3).unwrap();
        let a = sample_trial(4, 1, 2, lo, seed, trial).unwrap();
        let b = sample_trial(4, 1, 2, hi, seed, trial).unwrap();
        prop_assert!(a.included.iter().all(|i| b.included.contains(i)));
        prop_assert!(t.restricted_rank(&a).unwrap() <= t.restricted_rank(&b).unwrap());
        if t.is_k_connected(&a).unwrap() {
            prop_assert!(t.is_k_connected(&b).unwrap());
        }
        let (connected, uncovered) = t.is_k_connected_checked(&a).unwrap();
        prop_assert!(!(connected && uncovered > 0));
    }
}
