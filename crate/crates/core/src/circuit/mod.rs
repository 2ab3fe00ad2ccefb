//! Circuit intermediate representation: unitary gates, mid-circuit
//! measurements, resets, and gates conditioned on classical bits.

mod document;
mod schedule;

pub use document::{from_json, to_json, ParseError};
pub use schedule::{basis_change_mask, full_layers, gate_layers, metrics, ResourceReport};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    RotY {
        theta: f64,
        q: usize,
    },
    RotZ {
        phi: f64,
        q: usize,
    },
    PauliZ(usize),
    PauliX(usize),
    Hadamard(usize),
    CSwap {
        control: usize,
        a: usize,
        b: usize,
    },
    /// Y rotation on `target` applied only when each control wire is in the
    /// computational state given by its polarity.
    MultiCtrlRotY {
        theta: f64,
        controls: Vec<(usize, u8)>,
        target: usize,
    },
    MeasureZ {
        q: usize,
        clbit: usize,
    },
    Reset(usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::RotY { q, .. } | Gate::RotZ { q, .. } | Gate::MeasureZ { q, .. } => vec![*q],
            Gate::PauliZ(q) | Gate::PauliX(q) | Gate::Hadamard(q) | Gate::Reset(q) => vec![*q],
            Gate::CSwap { control, a, b } => vec![*control, *a, *b],
            Gate::MultiCtrlRotY { controls, target, .. } => {
                controls.iter().map(|c| c.0).chain(std::iter::once(*target)).collect()
            }
        }
    }

    /// Whether the gate is a unitary acting on exactly one wire.
    pub fn is_single_qubit_unitary(&self) -> bool {
        matches!(self, Gate::RotY { .. } | Gate::RotZ { .. } | Gate::PauliZ(_) | Gate::PauliX(_) | Gate::Hadamard(_))
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Gate::MeasureZ { .. } | Gate::Reset(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Gate::RotY { .. } => "RotY",
            Gate::RotZ { .. } => "RotZ",
            Gate::PauliZ(_) => "PauliZ",
            Gate::PauliX(_) => "PauliX",
            Gate::Hadamard(_) => "Hadamard",
            Gate::CSwap { .. } => "CSwap",
            Gate::MultiCtrlRotY { .. } => "MultiCtrlRotY",
            Gate::MeasureZ { .. } => "MeasureZ",
            Gate::Reset(_) => "Reset",
        }
    }
}

/// Truth table over classical bits. Entry `i` of `table` applies to the
/// assignment whose bits, read with `bits[0]` as the most significant, spell
/// `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub bits: Vec<usize>,
    pub table: Vec<u8>,
}

impl Condition {
    pub fn new(bits: Vec<usize>, table: Vec<u8>) -> Self {
        Condition { bits, table }
    }

    /// Condition that fires only when `bits` read exactly `value`.
    pub fn equals(bits: Vec<usize>, value: usize) -> Self {
        let mut table = vec![0; 1 << bits.len()];
        table[value] = 1;
        Condition { bits, table }
    }

    pub fn index(&self, values: &[u8]) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | values[b] as usize)
    }

    pub fn fires(&self, values: &[u8]) -> bool {
        self.table[self.index(values)] != 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Op {
    pub gate: Gate,
    pub condition: Option<Condition>,
}

impl Op {
    pub fn new(gate: Gate) -> Self {
        Op { gate, condition: None }
    }

    pub fn conditioned(gate: Gate, condition: Condition) -> Self {
        Op { gate, condition: Some(condition) }
    }
}

impl From<Gate> for Op {
    fn from(gate: Gate) -> Self {
        Op::new(gate)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("op {op}: qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { op: usize, qubit: usize, n_qubits: usize },
    #[error("op {op}: qubit {qubit} appears more than once")]
    DuplicateQubit { op: usize, qubit: usize },
    #[error("op {op}: classical bit {clbit} out of range for {n_clbits} bits")]
    ClbitOutOfRange { op: usize, clbit: usize, n_clbits: usize },
    #[error("op {op}: classical bit {clbit} is already written")]
    ClbitRewritten { op: usize, clbit: usize },
    #[error("op {op}: condition reads classical bit {clbit} before it is measured")]
    UnmeasuredConditionBit { op: usize, clbit: usize },
    #[error("op {op}: condition table has {len} entries, expected {expected}")]
    BadTable { op: usize, len: usize, expected: usize },
    #[error("op {op}: {kind} cannot be conditioned")]
    NotConditionable { op: usize, kind: &'static str },
    #[error("op {op}: control polarity {polarity} is not 0 or 1")]
    BadPolarity { op: usize, polarity: u8 },
    #[error("data qubit {0} out of range")]
    DataQubitOutOfRange(usize),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_clbits: usize,
    pub data_qubits: Vec<usize>,
    pub ops: Vec<Op>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, ..Default::default() }
    }

    pub fn add_qubit(&mut self) -> usize {
        self.n_qubits += 1;
        self.n_qubits - 1
    }

    pub fn add_clbit(&mut self) -> usize {
        self.n_clbits += 1;
        self.n_clbits - 1
    }

    pub fn push(&mut self, op: impl Into<Op>) {
        self.ops.push(op.into());
    }

    /// Appends a measurement of `q` into a fresh classical bit and returns it.
    pub fn measure(&mut self, q: usize) -> usize {
        let clbit = self.add_clbit();
        self.push(Gate::MeasureZ { q, clbit });
        clbit
    }

    pub fn count(&self, kind: &str) -> usize {
        self.ops.iter().filter(|op| op.gate.kind() == kind).count()
    }

    /// Wires that are measured at least once.
    pub fn measured_qubits(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n_qubits];
        for op in &self.ops {
            if let Gate::MeasureZ { q, .. } = op.gate {
                seen[q] = true;
            }
        }
        (0..self.n_qubits).filter(|&q| seen[q]).collect()
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut written = vec![false; self.n_clbits];
        for (i, op) in self.ops.iter().enumerate() {
            let qubits = op.gate.qubits();
            for (k, &q) in qubits.iter().enumerate() {
                if q >= self.n_qubits {
                    return Err(CircuitError::QubitOutOfRange { op: i, qubit: q, n_qubits: self.n_qubits });
                }
                if qubits[..k].contains(&q) {
                    return Err(CircuitError::DuplicateQubit { op: i, qubit: q });
                }
            }
            if let Gate::MultiCtrlRotY { controls, .. } = &op.gate {
                if let Some(&(_, polarity)) = controls.iter().find(|c| c.1 > 1) {
                    return Err(CircuitError::BadPolarity { op: i, polarity });
                }
            }
            if let Some(cond) = &op.condition {
                if !op.gate.is_unitary() {
                    return Err(CircuitError::NotConditionable { op: i, kind: op.gate.kind() });
                }
                let expected = 1usize << cond.bits.len();
                if cond.table.len() != expected {
                    return Err(CircuitError::BadTable { op: i, len: cond.table.len(), expected });
                }
                for &b in &cond.bits {
                    if b >= self.n_clbits {
                        return Err(CircuitError::ClbitOutOfRange { op: i, clbit: b, n_clbits: self.n_clbits });
                    }
                    if !written[b] {
                        return Err(CircuitError::UnmeasuredConditionBit { op: i, clbit: b });
                    }
                }
            }
            if let Gate::MeasureZ { clbit, .. } = op.gate {
                if clbit >= self.n_clbits {
                    return Err(CircuitError::ClbitOutOfRange { op: i, clbit, n_clbits: self.n_clbits });
                }
                if written[clbit] {
                    return Err(CircuitError::ClbitRewritten { op: i, clbit });
                }
                written[clbit] = true;
            }
        }
        if let Some(&q) = self.data_qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(CircuitError::DataQubitOutOfRange(q));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_reads_msb_first() {
        let cond = Condition::equals(vec![2, 0], 0b10);
        assert!(cond.fires(&[0, 0, 1]));
        assert!(!cond.fires(&[1, 0, 0]));
        assert_eq!(cond.index(&[1, 0, 1]), 3);
    }

    #[test]
    fn validate_catches_bad_ops() {
        let mut c = Circuit::new(2);
        c.push(Gate::CSwap { control: 0, a: 1, b: 1 });
        assert_eq!(c.validate(), Err(CircuitError::DuplicateQubit { op: 0, qubit: 1 }));

        let mut c = Circuit::new(1);
        c.n_clbits = 1;
        c.push(Op::conditioned(Gate::PauliZ(0), Condition::equals(vec![0], 1)));
        assert_eq!(c.validate(), Err(CircuitError::UnmeasuredConditionBit { op: 0, clbit: 0 }));

        let mut c = Circuit::new(1);
        let b = c.measure(0);
        c.push(Gate::MeasureZ { q: 0, clbit: b });
        assert_eq!(c.validate(), Err(CircuitError::ClbitRewritten { op: 1, clbit: 0 }));

        let mut c = Circuit::new(1);
        let b = c.measure(0);
        c.push(Op::conditioned(Gate::Reset(0), Condition::equals(vec![b], 1)));
        assert!(matches!(c.validate(), Err(CircuitError::NotConditionable { .. })));

        let mut c = Circuit::new(1);
        let b = c.measure(0);
        c.push(Op::conditioned(Gate::PauliX(0), Condition::new(vec![b], vec![1])));
        assert!(matches!(c.validate(), Err(CircuitError::BadTable { .. })));

        let mut c = Circuit::new(1);
        c.push(Gate::Hadamard(3));
        assert!(matches!(c.validate(), Err(CircuitError::QubitOutOfRange { .. })));
    }

    #[test]
    fn measure_allocates_fresh_bits() {
        let mut c = Circuit::new(2);
        assert_eq!(c.measure(1), 0);
        assert_eq!(c.measure(0), 1);
        assert_eq!(c.n_clbits, 2);
        assert_eq!(c.measured_qubits(), vec![0, 1]);
        c.validate().unwrap();
    }
}
