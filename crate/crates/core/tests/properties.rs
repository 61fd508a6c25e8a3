use std::sync::Arc;

use proptest::prelude::*;

use hamres::embed::{embed, EmbeddingBasis, Provenance};
use hamres::groebner_verifier::verify_groebner;
use hamres::ilp::{verify_ilp, ModeKind};
use hamres::setfile::VertexSet;
use hamres::shrink::{shrink, ShrinkConfig};
use hamres::verdict::is_valid_witness;
use hamres::{brute_force_verify, HammingInstance, Kmer, Status};

const GRAPHS: [(usize, usize); 4] = [(2, 3), (3, 2), (2, 4), (3, 3)];

fn random_set() -> impl Strategy<Value = Vec<Kmer>> {
    (0..GRAPHS.len()).prop_flat_map(|g| {
        let (k, a) = GRAPHS[g];
        let h = Arc::new(HammingInstance::new(k, a).unwrap());
        let n = h.vertex_count();
        proptest::collection::btree_set(0..n, 1..=(n as usize).min(6))
            .prop_map(move |idx| idx.into_iter().map(|i| Kmer::from_index(&h, i)).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verifiers_agree_with_brute_force(set in random_set()) {
        let truth = brute_force_verify(&set).unwrap();
        let groebner = verify_groebner(&set).unwrap();
        let ilp = verify_ilp(&set, ModeKind::PowersOfTwo, None, None).unwrap();
        prop_assert_eq!(groebner.status, truth.status);
        prop_assert_eq!(ilp.status, truth.status);
        for v in [&truth, &groebner, &ilp] {
            if let Some((x, y)) = &v.witness {
                prop_assert!(is_valid_witness(x, y, &set).unwrap());
            }
        }
    }

    #[test]
    fn embedding_matches_distances(set in random_set(), pick in any::<prop::sample::Index>()) {
        let h = Arc::clone(set[0].instance());
        let v = Kmer::from_index(&h, pick.index(h.vertex_count() as usize) as u128);
        let basis = EmbeddingBasis::new(VertexSet::new(h, set.clone()), Provenance::ShrinkOutput);
        let phi = embed(&v, &basis).unwrap();
        prop_assert_eq!(phi.len(), set.len());
        for (d, r) in phi.iter().zip(&set) {
            prop_assert_eq!(*d as usize, v.distance(r).unwrap());
        }
    }

    #[test]
    fn shrink_returns_a_resolving_subset(seed in any::<u64>(), g in 0..GRAPHS.len()) {
        let (k, a) = GRAPHS[g];
        let h = Arc::new(HammingInstance::new(k, a).unwrap());
        let all: Vec<Kmer> = (0..h.vertex_count()).map(|i| Kmer::from_index(&h, i)).collect();
        let cfg = ShrinkConfig { seed, samples_per_size: 50, ..ShrinkConfig::default() };
        let t = shrink(&all, &cfg).unwrap();
        prop_assert!(t.final_set.iter().all(|v| all.contains(v)));
        prop_assert_eq!(brute_force_verify(&t.final_set).unwrap().status, Status::Resolving);
        for s in &t.steps {
            prop_assert!(s.lower < s.size && s.size < s.upper);
        }
        let sizes: Vec<usize> = t.steps.iter().filter(|s| s.found).map(|s| s.size).collect();
        prop_assert!(sizes.windows(2).all(|w| w[1] < w[0]));
    }
}
