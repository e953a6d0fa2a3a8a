//! The compressed graph built directly (fixed-point enumeration plus arc
//! steps) must agree exactly with the image of the full graph under the
//! compression map, and walk counts must transfer between the two.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use sqfree_core::prune::{walk_counts_final, VertexSet};
use sqfree_core::rauzy::{
    build_full_rauzy, build_psi_graph, psi, GraphBudget, PsiMode,
};
use sqfree_core::search::{oracle_psi_image, oracle_walk_count, PsiImage};
use sqfree_core::words::{Alphabet, PartialWord, Symbol, Word};

fn random_pattern(rng: &mut ChaCha8Rng, k: usize, max_len: usize) -> PartialWord {
    let len = rng.gen_range(1..=max_len);
    let symbols = (0..len)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Symbol::Hole
            } else {
                Symbol::Letter(rng.gen_range(0..k as u8))
            }
        })
        .collect();
    PartialWord::new(symbols, &Alphabet::new(k).unwrap()).unwrap()
}

#[test]
fn exhaustive_graph_equals_brute_force_image() {
    // the full sweep the equivalence is claimed for: k=3 up to p=8 and k=4
    // up to p=5
    for (k, p) in [
        (3usize, 3usize),
        (3, 4),
        (3, 5),
        (3, 6),
        (3, 7),
        (3, 8),
        (4, 3),
        (4, 4),
        (4, 5),
    ] {
        let alphabet = Alphabet::new(k).unwrap();
        let budget = GraphBudget::default();
        let (direct, _) = build_psi_graph(&alphabet, p, PsiMode::Exhaustive, &budget).unwrap();
        let image = oracle_psi_image(&alphabet, p, &budget).unwrap();
        assert_eq!(
            PsiImage::of_graph(&direct),
            image,
            "k={k} p={p}: direct construction differs from the image"
        );
    }
}

#[test]
fn expected_sizes_at_small_parameters() {
    let sizes = [
        ((3usize, 3usize), (12usize, 18usize)),
        ((3, 4), (24, 36)),
        ((3, 5), (42, 48)),
        ((4, 3), (36, 96)),
    ];
    for ((k, p), (nv, na)) in sizes {
        let alphabet = Alphabet::new(k).unwrap();
        let (g, _) =
            build_psi_graph(&alphabet, p, PsiMode::Exhaustive, &GraphBudget::default()).unwrap();
        assert_eq!((g.vertex_count(), g.arc_count()), (nv, na), "k={k} p={p}");
    }
}

/// Walk counts on the full graph restricted to the preimage of a vertex set
/// equal the counts on the compressed graph at the compressed vertex.
#[test]
fn walk_counts_transfer_through_the_compression() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (k, p) in [(3usize, 4usize), (3, 5), (3, 6), (4, 3)] {
        let alphabet = Alphabet::new(k).unwrap();
        let budget = GraphBudget::default();
        let (full, _) = build_full_rauzy(&alphabet, p, &budget).unwrap();
        let (compressed, _) =
            build_psi_graph(&alphabet, p, PsiMode::Exhaustive, &budget).unwrap();

        // compressed index of every full vertex
        let image_index: Vec<usize> = (0..full.vertex_count())
            .map(|v| {
                let img = psi(&Word::new(full.word(v).to_vec(), &alphabet).unwrap(), p).unwrap();
                compressed.find_vertex(img.letters()).expect("image vertex")
            })
            .collect();

        for round in 0..8 {
            // random subset of compressed vertices, and its preimage
            let mut x_compressed = VertexSet::empty(compressed.vertex_count());
            for v in 0..compressed.vertex_count() {
                if rng.gen_bool(0.75) {
                    x_compressed.insert(v);
                }
            }
            let mut x_full = VertexSet::empty(full.vertex_count());
            for (v, &img) in image_index.iter().enumerate() {
                if x_compressed.contains(img) {
                    x_full.insert(v);
                }
            }
            let w = random_pattern(&mut rng, k, 6);
            let on_full = walk_counts_final(&full, &x_full, &w, u64::MAX).unwrap();
            let on_compressed =
                walk_counts_final(&compressed, &x_compressed, &w, u64::MAX).unwrap();
            for v in x_full.iter() {
                assert_eq!(
                    on_full[v], on_compressed[image_index[v]],
                    "k={k} p={p} round={round} vertex {v} pattern {w}"
                );
            }
        }
    }
}

/// The dynamic program agrees with explicit walk enumeration.
#[test]
fn walk_counts_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (k, p) in [(3usize, 3usize), (3, 4), (4, 3)] {
        let alphabet = Alphabet::new(k).unwrap();
        let (g, _) =
            build_psi_graph(&alphabet, p, PsiMode::Exhaustive, &GraphBudget::default()).unwrap();
        let x = VertexSet::full(g.vertex_count());
        for _ in 0..10 {
            let w = random_pattern(&mut rng, k, 5);
            let dp = walk_counts_final(&g, &x, &w, u64::MAX).unwrap();
            for v in (0..g.vertex_count()).step_by(3) {
                let exact = oracle_walk_count(&g, v, &w, 1 << 24).unwrap();
                assert_eq!(exact, dp[v].into(), "vertex {v} pattern {w}");
            }
        }
    }
}
