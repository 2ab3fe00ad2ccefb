use proptest::prelude::*;

use stateprep::circuit::{from_json, metrics, to_json};
use stateprep::sim::{verify_preparation, Mode};
use stateprep::synth::{synthesize_dc, synthesize_hybrid, synthesize_time, DcOptions};
use stateprep::tree::build_tree;

fn state(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 3 => 0.05f64..1.0], 1 << n).prop_filter_map("zero vector", |v| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (norm > 1e-6).then(|| v.iter().map(|x| x / norm).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn document_round_trip_keeps_metrics(x in (1usize..=4).prop_flat_map(state), prune in any::<bool>()) {
        let c = synthesize_dc(&build_tree(&x).unwrap(), DcOptions { prune, ..Default::default() }).unwrap();
        let back = from_json(&to_json(&c)).unwrap();
        prop_assert_eq!(metrics(&back).unwrap(), metrics(&c).unwrap());
        prop_assert_eq!(back.ops.len(), c.ops.len());
        prop_assert!(verify_preparation(&back, &x, Mode::enumerate()).unwrap().pass);
    }

    #[test]
    fn pruning_is_sound_and_never_wider(x in (1usize..=4).prop_flat_map(state)) {
        let tree = build_tree(&x).unwrap();
        let dense = synthesize_dc(&tree, DcOptions::default()).unwrap();
        let pruned = synthesize_dc(&tree, DcOptions { prune: true, ..Default::default() }).unwrap();
        prop_assert!(pruned.n_qubits <= dense.n_qubits);
        prop_assert!(verify_preparation(&pruned, &x, Mode::enumerate()).unwrap().pass);
    }

    #[test]
    fn time_circuit_is_deterministic_and_exact(x in (1usize..=5).prop_flat_map(state)) {
        let c = synthesize_time(&build_tree(&x).unwrap());
        prop_assert_eq!(c.n_qubits, c.data_qubits.len());
        let rep = verify_preparation(&c, &x, Mode::enumerate()).unwrap();
        prop_assert_eq!(rep.branches, 1);
        prop_assert!(rep.min_fidelity > 1.0 - 1e-9);
    }

    #[test]
    fn pruned_hybrid_verifies(x in (2usize..=4).prop_flat_map(state), lambda in 1usize..=2) {
        let c = synthesize_hybrid(&build_tree(&x).unwrap(), lambda, DcOptions { prune: true, ..Default::default() }).unwrap();
        prop_assert!(verify_preparation(&c, &x, Mode::enumerate()).unwrap().pass);
    }
}
