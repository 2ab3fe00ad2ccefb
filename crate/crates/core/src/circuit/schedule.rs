//! ASAP layering and resource metrics.

use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitError, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub qubits: usize,
    pub unit_cswaps: usize,
    pub depth_gates: usize,
    pub depth_full: usize,
}

/// Marks single-qubit gates that only rotate a wire into a measurement basis,
/// i.e. whose wire next sees a measurement or another such gate.
pub fn basis_change_mask(c: &Circuit) -> Vec<bool> {
    let mut feeds_measure = vec![false; c.n_qubits];
    let mut mask = vec![false; c.ops.len()];
    for (i, op) in c.ops.iter().enumerate().rev() {
        match &op.gate {
            Gate::MeasureZ { q, .. } => feeds_measure[*q] = true,
            g if g.is_single_qubit_unitary() => {
                let q = g.qubits()[0];
                mask[i] = feeds_measure[q];
            }
            g => g.qubits().into_iter().for_each(|q| feeds_measure[q] = false),
        }
    }
    mask
}

/// ASAP layer (0-based) of every unconditioned unitary gate that is not a
/// measurement-basis change; `None` for ops excluded from the gate depth.
pub fn gate_layers(c: &Circuit) -> Vec<Option<usize>> {
    let basis = basis_change_mask(c);
    let mut next_free = vec![0usize; c.n_qubits];
    c.ops
        .iter()
        .zip(basis)
        .map(|(op, is_basis)| {
            if is_basis || op.condition.is_some() || !op.gate.is_unitary() {
                return None;
            }
            let qubits = op.gate.qubits();
            let layer = qubits.iter().map(|&q| next_free[q]).max().unwrap_or(0);
            qubits.iter().for_each(|&q| next_free[q] = layer + 1);
            Some(layer)
        })
        .collect()
}

/// ASAP layer (0-based) of every op, honoring both wire and classical
/// dependencies: a conditioned op lands strictly after the measurements it
/// reads.
pub fn full_layers(c: &Circuit) -> Vec<usize> {
    let mut next_free = vec![0usize; c.n_qubits];
    let mut bit_ready = vec![0usize; c.n_clbits];
    c.ops
        .iter()
        .map(|op| {
            let qubits = op.gate.qubits();
            let mut layer = qubits.iter().map(|&q| next_free[q]).max().unwrap_or(0);
            if let Some(cond) = &op.condition {
                layer = cond.bits.iter().map(|&b| bit_ready[b]).fold(layer, usize::max);
            }
            qubits.iter().for_each(|&q| next_free[q] = layer + 1);
            if let Gate::MeasureZ { clbit, .. } = op.gate {
                bit_ready[clbit] = layer + 1;
            }
            layer
        })
        .collect()
}

pub fn metrics(c: &Circuit) -> Result<ResourceReport, CircuitError> {
    c.validate()?;
    let depth = |layers: &mut dyn Iterator<Item = usize>| layers.map(|l| l + 1).max().unwrap_or(0);
    Ok(ResourceReport {
        qubits: c.n_qubits,
        unit_cswaps: c.count("CSwap"),
        depth_gates: depth(&mut gate_layers(c).into_iter().flatten()),
        depth_full: depth(&mut full_layers(c).into_iter()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Condition, Op};

    #[test]
    fn empty_circuit_is_all_zero() {
        let m = metrics(&Circuit::default()).unwrap();
        assert_eq!(m, ResourceReport { qubits: 0, unit_cswaps: 0, depth_gates: 0, depth_full: 0 });
    }

    #[test]
    fn sequential_rotations_stack() {
        let mut c = Circuit::new(1);
        for _ in 0..3 {
            c.push(Gate::RotY { theta: 0.3, q: 0 });
        }
        assert_eq!(metrics(&c).unwrap().depth_gates, 3);
    }

    #[test]
    fn loading_shares_a_layer() {
        let mut c = Circuit::new(3);
        for q in 0..3 {
            c.push(Gate::RotY { theta: 0.3, q });
        }
        c.push(Gate::CSwap { control: 0, a: 1, b: 2 });
        let m = metrics(&c).unwrap();
        assert_eq!((m.depth_gates, m.depth_full, m.unit_cswaps), (2, 2, 1));
    }

    #[test]
    fn basis_changes_and_corrections_only_count_in_full_depth() {
        let mut c = Circuit::new(2);
        c.push(Gate::Hadamard(0));
        c.push(Gate::RotY { theta: 0.4, q: 1 });
        let b = c.measure(1);
        c.push(Op::conditioned(Gate::PauliZ(0), Condition::equals(vec![b], 1)));
        assert_eq!(basis_change_mask(&c), vec![false, true, false, false]);
        assert_eq!(gate_layers(&c), vec![Some(0), None, None, None]);
        assert_eq!(full_layers(&c), vec![0, 0, 1, 2]);
        let m = metrics(&c).unwrap();
        assert_eq!((m.depth_gates, m.depth_full), (1, 3));
    }

    #[test]
    fn conditioned_op_waits_for_its_bit() {
        let mut c = Circuit::new(3);
        c.push(Gate::RotY { theta: 1.0, q: 0 });
        c.push(Gate::RotY { theta: 1.0, q: 0 });
        let b = c.measure(0);
        c.push(Op::conditioned(Gate::PauliX(2), Condition::equals(vec![b], 1)));
        assert_eq!(full_layers(&c), vec![0, 1, 2, 3]);
    }
}
