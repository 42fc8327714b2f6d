use proptest::prelude::*;

use turan_core::canon::{are_isomorphic, canonical_form};
use turan_core::digraph::digraph_vanishing_oracle;
use turan_core::orderings::{find_vanishing_ordering, verify_vanishing_certificate};
use turan_core::palette::{builtin_palette, find_palette_embedding, verify_palette_embedding};
use turan_core::partitioned::{reverse_partitioned, triad_stats, PartitionedHypergraph};
use turan_core::subgraph::contains_subhypergraph;
use turan_core::Hypergraph3;

fn hypergraph(max_n: usize) -> impl Strategy<Value = Hypergraph3> {
    (3..=max_n).prop_flat_map(|n| {
        let total = n * (n - 1) * (n - 2) / 6;
        proptest::collection::vec(any::<bool>(), total).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut r = 0;
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        if bits[r] {
                            edges.push([a, b, c]);
                        }
                        r += 1;
                    }
                }
            }
            Hypergraph3::from_edges(n, edges).unwrap()
        })
    })
}

fn with_perm(max_n: usize) -> impl Strategy<Value = (Hypergraph3, Vec<usize>)> {
    hypergraph(max_n).prop_flat_map(|h| {
        let perm = Just((0..h.n()).collect::<Vec<_>>()).prop_shuffle();
        (Just(h), perm)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_round_trip(h in hypergraph(8)) {
        prop_assert_eq!(Hypergraph3::parse(&h.to_text()).unwrap(), h);
    }

    #[test]
    fn canonical_form_is_relabeling_invariant((h, p) in with_perm(8)) {
        let g = h.relabel(&p);
        prop_assert_eq!(canonical_form(&h).unwrap(), canonical_form(&g).unwrap());
        prop_assert!(are_isomorphic(&h, &g).unwrap());
    }

    #[test]
    fn oracles_agree_and_certificates_verify(h in hypergraph(7)) {
        let cert = find_vanishing_ordering(&h).unwrap();
        prop_assert_eq!(cert.is_some(), digraph_vanishing_oracle(&h).unwrap().vanishing);
        if let Some(c) = cert {
            prop_assert!(verify_vanishing_certificate(&h, &c));
        }
    }

    #[test]
    fn vanishing_is_isomorphism_invariant((h, p) in with_perm(7)) {
        let a = find_vanishing_ordering(&h).unwrap().is_some();
        let b = find_vanishing_ordering(&h.relabel(&p)).unwrap().is_some();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn self_containment(h in hypergraph(7)) {
        let m = contains_subhypergraph(&h, &h).unwrap().unwrap();
        prop_assert!(m.is_embedding(&h, &h));
    }

    #[test]
    fn palette_embeddings_verify(h in hypergraph(6), which in 0usize..3) {
        let name = ["vanishing", "four27_a", "four27_b"][which];
        let p = builtin_palette(name).unwrap().palette;
        if let Some(e) = find_palette_embedding(&h, &p).unwrap() {
            prop_assert!(verify_palette_embedding(&h, &p, &e));
        }
    }

    #[test]
    fn reverse_is_an_involution(n in 3usize..6, which in 0usize..3) {
        let name = ["vanishing", "four27_a", "four27_b"][which];
        let ph = PartitionedHypergraph::from_palette(n, &builtin_palette(name).unwrap().palette);
        let r = reverse_partitioned(&ph);
        prop_assert_eq!(reverse_partitioned(&r), ph.clone());
        prop_assert_eq!(triad_stats(&r).minimum.map(|m| m.1), triad_stats(&ph).minimum.map(|m| m.1));
    }
}
