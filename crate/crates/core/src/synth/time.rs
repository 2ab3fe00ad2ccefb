//! Top-down time encoding with multi-controlled Y rotations.

use crate::circuit::{Circuit, Gate};
use crate::tree::{level_of, node_index, position_of, AmplitudeTree, PRUNE_TOL};

/// One gate per non-zero tree angle, level by level on `n` wires.
pub fn synthesize_time(tree: &AmplitudeTree) -> Circuit {
    let n = tree.n_qubits();
    let mut c = Circuit::new(n);
    c.data_qubits = (0..n).collect();
    let wires: Vec<usize> = (0..n).collect();
    emit_block(&mut c, tree, 0, &wires);
    c
}

/// Time-encodes the subtree rooted at `root` onto `wires`, where `wires[0]`
/// carries the subtree's most significant qubit.
pub(crate) fn emit_block(c: &mut Circuit, tree: &AmplitudeTree, root: usize, wires: &[usize]) {
    let (l0, p0) = (level_of(root), position_of(root));
    for r in 0..wires.len() {
        for p in 0..(1usize << r) {
            let theta = tree.node(node_index(l0 + r, (p0 << r) + p)).alpha;
            if theta.abs() < PRUNE_TOL {
                continue;
            }
            if r == 0 {
                c.push(Gate::RotY { theta, q: wires[0] });
            } else {
                let controls = (0..r).map(|k| (wires[k], ((p >> (r - 1 - k)) & 1) as u8)).collect();
                c.push(Gate::MultiCtrlRotY { theta, controls, target: wires[r] });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::metrics;
    use crate::tree::build_tree;

    #[test]
    fn single_qubit_is_one_rotation() {
        let t = 0.8f64;
        let c = synthesize_time(&build_tree(&[(t / 2.0).cos(), (t / 2.0).sin()]).unwrap());
        assert_eq!(c.ops.len(), 1);
        match c.ops[0].gate {
            Gate::RotY { theta, q: 0 } => assert!((theta - t).abs() < 1e-12),
            ref g => panic!("unexpected {g:?}"),
        }
    }

    #[test]
    fn dense_example_has_seven_gates() {
        let x: Vec<f64> = [0.04, 0.13, 0.16, 0.2, 0.07, 0.09, 0.2, 0.11].iter().map(|v: &f64| v.sqrt()).collect();
        let c = synthesize_time(&build_tree(&x).unwrap());
        let m = metrics(&c).unwrap();
        assert_eq!((c.ops.len(), m.depth_gates, m.qubits), (7, 7, 3));
        match &c.ops[6].gate {
            Gate::MultiCtrlRotY { controls, target, .. } => {
                assert_eq!(controls, &vec![(0, 1), (1, 1)]);
                assert_eq!(*target, 2);
            }
            g => panic!("unexpected {g:?}"),
        }
    }

    #[test]
    fn zero_angles_are_omitted() {
        let c = synthesize_time(&build_tree(&[1.0, 0.0, 0.0, 1.0]).unwrap());
        // Root pi/2, left leaf 0 (omitted), right leaf pi.
        assert_eq!(c.ops.len(), 2);
    }
}
