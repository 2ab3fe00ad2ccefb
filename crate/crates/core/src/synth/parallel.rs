//! Rescheduling of controlled swaps for linear gate depth.
//!
//! The stage merging subtrees of `m - 1` qubits (the `m`-th stage counting
//! single-qubit leaves as stage 1) applies `m - 1` swaps sharing one control.
//! The first and last are rigid; they occupy slots `2m - 5` and `2m - 4`.
//! The movable `k`-th swap (`1 <= k <= m - 3`) is pulled forward into slot
//! `2m - 5 - k`, where it fills the gap left by an earlier stage's rigid
//! swaps. Stage 2 has a single swap in slot 0.

use std::collections::HashMap;

use super::SynthError;
use crate::circuit::{Circuit, Gate};

/// Reorders a dense divide-and-conquer circuit so that swaps run in the
/// slots above. Every other op follows the last swap on its wires (and the
/// measurements it reads), so per-wire order is preserved.
pub fn parallelize_cswaps(c: &Circuit) -> Result<Circuit, SynthError> {
    let n = c.data_qubits.len();
    if n == 0 || c.n_qubits != (1usize << n) - 1 {
        return Err(SynthError::UnrecognizedStructure(format!(
            "{} wires is not a dense tree over {} data qubits",
            c.n_qubits, n
        )));
    }
    let mut per_control: HashMap<usize, usize> = HashMap::new();
    for op in &c.ops {
        if let Gate::CSwap { control, .. } = op.gate {
            *per_control.entry(control).or_default() += 1;
        }
    }
    let Some(first_swap) = c.ops.iter().position(|op| matches!(op.gate, Gate::CSwap { .. })) else {
        return Ok(c.clone());
    };

    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut wire_key = vec![f64::NEG_INFINITY; c.n_qubits];
    let mut bit_key = vec![f64::NEG_INFINITY; c.n_clbits];
    let mut keys = Vec::with_capacity(c.ops.len());
    for (i, op) in c.ops.iter().enumerate() {
        let key = if i < first_swap {
            -1.0
        } else if let Gate::CSwap { control, a, b } = op.gate {
            let m = per_control[&control] + 1;
            let k = *seen.entry(control).and_modify(|k| *k += 1).or_insert(0);
            let slot = if m == 2 {
                0
            } else if k == 0 {
                2 * m - 5
            } else if k == m - 2 {
                2 * m - 4
            } else {
                2 * m - 5 - k
            } as f64;
            for q in [control, a, b] {
                wire_key[q] = slot;
            }
            slot
        } else {
            let mut key = op.gate.qubits().iter().map(|&q| wire_key[q]).fold(f64::NEG_INFINITY, f64::max);
            if let Some(cond) = &op.condition {
                key = cond.bits.iter().map(|&b| bit_key[b]).fold(key, f64::max);
            }
            let key = if key.is_finite() { key.floor() + 0.5 } else { -1.0 };
            for q in op.gate.qubits() {
                wire_key[q] = key;
            }
            if let Gate::MeasureZ { clbit, .. } = op.gate {
                bit_key[clbit] = key;
            }
            key
        };
        keys.push(key);
    }

    let mut order: Vec<usize> = (0..c.ops.len()).collect();
    order.sort_by(|&x, &y| keys[x].total_cmp(&keys[y]));
    let out = Circuit { ops: order.iter().map(|&i| c.ops[i].clone()).collect(), ..c.clone() };
    if wire_histories(c, 0..c.ops.len()) != wire_histories(c, order.iter().copied()) {
        return Err(SynthError::UnrecognizedStructure("rescheduling would reorder ops on a wire".into()));
    }
    out.validate().map_err(|e| SynthError::UnrecognizedStructure(e.to_string()))?;
    Ok(out)
}

/// Per wire, the sequence of ops touching it, where consecutive swaps that
/// share a control collapse into one unordered group (they commute).
fn wire_histories(c: &Circuit, order: impl Iterator<Item = usize>) -> Vec<Vec<Vec<usize>>> {
    let mut hist: Vec<Vec<Vec<usize>>> = vec![Vec::new(); c.n_qubits];
    for i in order {
        let gate = &c.ops[i].gate;
        for q in gate.qubits() {
            let groups = &mut hist[q];
            let joins = match (gate, groups.last().and_then(|g| g.last())) {
                (Gate::CSwap { control, .. }, Some(&prev)) => {
                    matches!(c.ops[prev].gate, Gate::CSwap { control: pc, .. } if pc == *control)
                }
                _ => false,
            };
            if joins {
                groups.last_mut().unwrap().push(i);
            } else {
                groups.push(vec![i]);
            }
        }
    }
    for groups in &mut hist {
        groups.iter_mut().for_each(|g| g.sort_unstable());
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::metrics;
    use crate::random::random_state;
    use crate::synth::{synthesize_dc, DcOptions};
    use crate::tree::build_tree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dc(n: usize, disentangle: bool) -> Circuit {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let tree = build_tree(&random_state(&mut rng, n)).unwrap();
        synthesize_dc(&tree, DcOptions { disentangle, ..Default::default() }).unwrap()
    }

    #[test]
    fn depth_becomes_linear() {
        for n in 2..=7 {
            for disentangle in [false, true] {
                let p = parallelize_cswaps(&dc(n, disentangle)).unwrap();
                assert_eq!(metrics(&p).unwrap().depth_gates, 2 * n - 2, "n = {n}");
            }
        }
    }

    #[test]
    fn n3_keeps_swap_order_and_metrics() {
        let c = dc(3, true);
        let p = parallelize_cswaps(&c).unwrap();
        let swaps = |c: &Circuit| -> Vec<Gate> {
            c.ops.iter().filter(|o| matches!(o.gate, Gate::CSwap { .. })).map(|o| o.gate.clone()).collect()
        };
        assert_eq!(swaps(&p), swaps(&c));
        assert_eq!(metrics(&p).unwrap(), metrics(&c).unwrap());
    }

    #[test]
    fn rejects_non_dense_circuits() {
        let mut c = Circuit::new(5);
        c.data_qubits = vec![0, 1, 2];
        assert!(matches!(parallelize_cswaps(&c), Err(SynthError::UnrecognizedStructure(_))));
    }
}
