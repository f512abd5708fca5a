mod common;

use std::collections::HashMap;

use lanecert::graph::Graph;
use lanecert::homomorphism::{brute_force_property, eval_property, fold_tree_in_order, HomClass, Plugin, Property};
use lanecert::lane_recursive::{apply_op_sequence, build_hierarchical_decomposition, KLaneGraph, NodeKind, Op, OpSequence};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn evaluation_matches_brute_force(s in common::op_sequences(3, 12)) {
        let g = apply_op_sequence(&s).unwrap().graph;
        prop_assume!(g.n() <= 10);
        let h = build_hierarchical_decomposition(&s).unwrap();
        for p in Property::ALL {
            let ev = eval_property(&h, Plugin { property: p, marked: false }, &g).unwrap();
            prop_assert_eq!(ev.accepted, brute_force_property(&g, p).unwrap(), "{}", p);
        }
    }

    #[test]
    fn marked_evaluation_sees_only_host_edges(s in common::op_sequences(3, 12), drop in any::<u64>()) {
        let g = apply_op_sequence(&s).unwrap().graph;
        prop_assume!(g.n() <= 10);
        let host = Graph::new(g.n(), g.edges().iter().enumerate().filter(|(i, _)| drop >> (i % 64) & 1 == 0).map(|(_, &e)| e)).unwrap();
        let h = build_hierarchical_decomposition(&s).unwrap();
        for p in Property::ALL {
            let ev = eval_property(&h, Plugin { property: p, marked: true }, &host).unwrap();
            prop_assert_eq!(ev.accepted, brute_force_property(&host, p).unwrap(), "{}", p);
        }
    }

    #[test]
    fn tree_fold_order_does_not_matter(s in common::op_sequences(4, 60), seed in any::<u64>()) {
        let g = apply_op_sequence(&s).unwrap().graph;
        let h = build_hierarchical_decomposition(&s).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for p in Property::ALL {
            let ev = eval_property(&h, Plugin { property: p, marked: false }, &g).unwrap();
            for t in (0..h.nodes.len()).filter(|&x| matches!(h.nodes[x].kind, NodeKind::T) && ev.node[x].is_some()) {
                let members = &h.nodes[t].children;
                let classes: Vec<HomClass> = members.iter().map(|&m| ev.node[m].clone().unwrap()).collect();
                let parent: Vec<Option<usize>> = members
                    .iter()
                    .map(|&m| h.nodes[m].tree_parent.map(|q| members.iter().position(|&x| x == q).unwrap()))
                    .collect();
                let mut order: Vec<usize> = (0..members.len()).filter(|&i| parent[i].is_some()).collect();
                order.shuffle(&mut rng);
                prop_assert_eq!(&fold_tree_in_order(&classes, &parent, &order).unwrap(), ev.node[t].as_ref().unwrap());
            }
        }
    }
}

/// Shifts fresh vertex ids of a continuation so it can follow `prefix`.
fn append(prefix: &OpSequence, tail: &[Op], tail_base: usize) -> OpSequence {
    let shift = prefix.vertex_count() - tail_base;
    let mut ops = prefix.ops.clone();
    ops.extend(tail.iter().map(|op| match *op {
        Op::VInsert { lane, vertex } => Op::VInsert { lane, vertex: vertex + shift },
        e => e,
    }));
    OpSequence { k: prefix.k, initial: prefix.initial.clone(), ops }
}

fn root_class(p: Property, s: &OpSequence) -> HomClass {
    let applied = apply_op_sequence(s).unwrap();
    let frag = KLaneGraph {
        vertices: (0..applied.graph.n()).collect(),
        edges: applied.graph.edges().iter().copied().collect(),
        terminals: (1..=s.k).map(|l| (l, (s.initial[l - 1], applied.designated[l - 1]))).collect(),
    };
    HomClass::of_fragment(p, &frag, &|_, _| true).unwrap()
}

/// Fragments with equal classes stay indistinguishable under any continuation.
#[test]
fn equal_classes_are_congruent() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut compared = 0;
    for k in 1..=3 {
        let fragments: Vec<OpSequence> = (0..200)
            .map(|_| {
                let len = rng.gen_range(0..6);
                let choices: Vec<(bool, u8, u8)> = (0..len).map(|_| (rng.gen_bool(0.4), rng.gen(), rng.gen())).collect();
                common::ops_from_choices(k, &choices)
            })
            .filter(|s| s.vertex_count() <= 5)
            .collect();
        for p in Property::ALL {
            let mut by_class: HashMap<HomClass, Vec<&OpSequence>> = HashMap::new();
            for s in &fragments {
                by_class.entry(root_class(p, s)).or_default().push(s);
            }
            for group in by_class.values().filter(|g| g.len() >= 2) {
                for _ in 0..4 {
                    let (a, b) = (group[rng.gen_range(0..group.len())], group[rng.gen_range(0..group.len())]);
                    let len = rng.gen_range(0..5);
                    let choices: Vec<(bool, u8, u8)> = (0..len).map(|_| (rng.gen_bool(0.5), rng.gen(), rng.gen())).collect();
                    let tail = common::ops_from_choices(k, &choices);
                    let (sa, sb) = (append(a, &tail.ops, k), append(b, &tail.ops, k));
                    let (Ok(ga), Ok(gb)) = (apply_op_sequence(&sa), apply_op_sequence(&sb)) else { continue };
                    if ga.graph.n() > 10 || gb.graph.n() > 10 {
                        continue;
                    }
                    assert_eq!(
                        brute_force_property(&ga.graph, p).unwrap(),
                        brute_force_property(&gb.graph, p).unwrap(),
                        "{p}: {a:?} vs {b:?} under {tail:?}"
                    );
                    compared += 1;
                }
            }
        }
    }
    assert!(compared > 100, "only {compared} comparisons");
}
