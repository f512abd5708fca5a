mod common;

use lanecert::certification::{
    prove, prove_unchecked, prove_with_witness, to_vertex_labels, verify_all, verify_all_vertex_model, LabelAssignment, ProveError, Scheme,
};
use lanecert::graph::families::{cycle, path};
use lanecert::homomorphism::Property;
use lanecert::lane_recursive::{applied_graph_intervals, apply_op_sequence};
use proptest::prelude::*;

fn property() -> impl Strategy<Value = Property> {
    prop::sample::select(Property::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn honest_labels_are_accepted_exactly_on_yes_instances(s in common::op_sequences(3, 40), p in property()) {
        let g = apply_op_sequence(&s).unwrap().graph;
        let ir = applied_graph_intervals(&s).unwrap();
        let scheme = Scheme::new(p, s.k).unwrap();
        match prove_with_witness(&g, p, s.k, Some(&ir)) {
            Ok(proof) => {
                prop_assert!(common::holds(&g, p));
                let verdicts = verify_all(&scheme, &g, &proof.labels).unwrap();
                prop_assert!(verdicts.iter().all(Result::is_ok), "{:?}", verdicts);
                prop_assert!(proof.stats.lanes <= scheme.lane_bound());
            }
            Err(ProveError::PropertyFails) => prop_assert!(!common::holds(&g, p)),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn labels_of_no_instances_are_rejected_somewhere(s in common::op_sequences(2, 30), p in property()) {
        let g = apply_op_sequence(&s).unwrap().graph;
        prop_assume!(g.n() > 1 && !common::holds(&g, p));
        let scheme = Scheme::new(p, s.k).unwrap();
        let proof = prove_unchecked(&g, p, s.k, Some(&applied_graph_intervals(&s).unwrap())).unwrap();
        let verdicts = verify_all(&scheme, &g, &proof.labels).unwrap();
        prop_assert!(verdicts.iter().any(Result::is_err));
    }

    #[test]
    fn verification_is_deterministic_and_model_independent(s in common::op_sequences(3, 30)) {
        let g = apply_op_sequence(&s).unwrap().graph;
        let p = Property::EvenOrder;
        let scheme = Scheme::new(p, s.k).unwrap();
        let proof = prove_unchecked(&g, p, s.k, Some(&applied_graph_intervals(&s).unwrap())).unwrap();
        let first = verify_all(&scheme, &g, &proof.labels).unwrap();
        prop_assert_eq!(&first, &verify_all(&scheme, &g, &proof.labels).unwrap());
        let vl = to_vertex_labels(&g, &proof.labels).unwrap();
        let vertex = verify_all_vertex_model(&scheme, &g, &vl);
        let agree = first.iter().zip(&vertex).all(|(a, b)| a.is_ok() == b.is_ok());
        prop_assert!(agree);
    }
}

#[test]
fn label_files_survive_a_text_round_trip() {
    let g = cycle(12);
    let proof = prove(&g, Property::Bipartite, 2).unwrap();
    let back = LabelAssignment::from_text(&proof.labels.to_text()).unwrap();
    let scheme = Scheme::new(Property::Bipartite, 2).unwrap();
    assert!(verify_all(&scheme, &g, &back).unwrap().iter().all(Result::is_ok));
}

#[test]
fn long_paths_and_cycles_are_certified() {
    for n in [200, 1001] {
        for (g, p) in [(path(n), Property::Acyclic), (cycle(n + n % 2), Property::Bipartite)] {
            let scheme = Scheme::new(p, 2).unwrap();
            let proof = prove(&g, p, 2).unwrap();
            assert!(verify_all(&scheme, &g, &proof.labels).unwrap().iter().all(Result::is_ok));
        }
    }
}

#[test]
fn odd_cycles_have_no_bipartite_proof() {
    assert!(matches!(prove(&cycle(9), Property::Bipartite, 2), Err(ProveError::PropertyFails)));
}
