mod common;

use std::collections::BTreeSet;

use lanecert::lane_partition::completion;
use lanecert::lane_recursive::{
    apply_op_sequence, build_hierarchical_decomposition, op_sequence_to_completion, tree_merge, tree_merge_in_order, MergeTree, NodeKind,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn paths_are_short_and_hold_few_bridges(s in common::op_sequences(4, 120)) {
        let h = build_hierarchical_decomposition(&s).unwrap();
        prop_assert!(h.max_path_len() <= 2 * s.k);
        prop_assert!(h.max_bnodes_on_path() < s.k);
    }

    #[test]
    fn completion_and_root_fragment_reproduce_the_applied_graph(s in common::op_sequences(4, 120)) {
        let applied = apply_op_sequence(&s).unwrap().graph;
        let (g, ir, lp) = op_sequence_to_completion(&s).unwrap();
        prop_assert_eq!(completion(&g, &ir, &lp, false).unwrap().graph, applied.clone());
        let h = build_hierarchical_decomposition(&s).unwrap();
        let root: Vec<_> = h.root_fragment().edges.iter().copied().collect();
        prop_assert_eq!(root, applied.edges().to_vec());
    }

    #[test]
    fn containing_nodes_of_an_edge_are_its_owners_root_path(s in common::op_sequences(3, 60)) {
        let h = build_hierarchical_decomposition(&s).unwrap();
        let live: Vec<usize> = (0..h.nodes.len()).filter(|&x| x == h.root || h.nodes[x].parent.is_some()).collect();
        let mut owned = BTreeSet::new();
        for &x in &live {
            for e in h.own_edges(x) {
                prop_assert!(owned.insert(e), "edge {:?} owned twice", e);
                let containing: BTreeSet<usize> = live.iter().copied().filter(|&y| h.nodes[y].fragment.edges.contains(&e)).collect();
                let path: BTreeSet<usize> = h.path_to_root(x).into_iter().collect();
                prop_assert_eq!(containing, path);
            }
        }
        prop_assert_eq!(owned, h.root_fragment().edges.clone());
    }

    #[test]
    fn every_fragment_is_connected(s in common::op_sequences(4, 80)) {
        let h = build_hierarchical_decomposition(&s).unwrap();
        for x in (0..h.nodes.len()).filter(|&x| x == h.root || h.nodes[x].parent.is_some()) {
            prop_assert!(h.nodes[x].fragment.is_connected(), "node {}", x);
            prop_assert!(h.nodes[x].fragment.is_well_formed(), "node {}", x);
        }
    }

    #[test]
    fn tree_merge_ignores_contraction_order(s in common::op_sequences(4, 80), seed in any::<u64>()) {
        let h = build_hierarchical_decomposition(&s).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for t in (0..h.nodes.len()).filter(|&x| matches!(h.nodes[x].kind, NodeKind::T) && (x == h.root || h.nodes[x].parent.is_some())) {
            let members = &h.nodes[t].children;
            let local = |x: usize| members.iter().position(|&m| m == x).unwrap();
            let tree = MergeTree {
                nodes: members.iter().map(|&m| h.nodes[m].fragment.clone()).collect(),
                parent: members.iter().map(|&m| h.nodes[m].tree_parent.map(local)).collect(),
            };
            let all = tree_merge(&tree).unwrap();
            prop_assert_eq!(&all, &h.nodes[t].fragment);
            let mut order: Vec<usize> = (0..members.len()).filter(|&i| tree.parent[i].is_some()).collect();
            order.shuffle(&mut rng);
            prop_assert_eq!(tree_merge_in_order(&tree, &order).unwrap(), all);
        }
    }
}
