//! JSON circuit documents.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Circuit, CircuitError, Condition, Gate, Op};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{location}: {message}")]
pub struct ParseError {
    pub location: String,
    pub message: String,
}

impl ParseError {
    fn at(location: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError { location: location.into(), message: message.into() }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    n_qubits: usize,
    n_clbits: usize,
    data_qubits: Vec<usize>,
    ops: Vec<OpDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpDoc {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clbit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polarities: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    condition: Option<CondDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CondDoc {
    bits: Vec<usize>,
    table: Vec<u8>,
}

/// Rounds to 12 significant digits.
pub(crate) fn round_angle(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn op_doc(op: &Op) -> OpDoc {
    let (angle, clbit, polarities) = match &op.gate {
        Gate::RotY { theta, .. } => (Some(*theta), None, None),
        Gate::RotZ { phi, .. } => (Some(*phi), None, None),
        Gate::MultiCtrlRotY { theta, controls, .. } => {
            (Some(*theta), None, Some(controls.iter().map(|c| c.1).collect()))
        }
        Gate::MeasureZ { clbit, .. } => (None, Some(*clbit), None),
        _ => (None, None, None),
    };
    OpDoc {
        kind: op.gate.kind().to_string(),
        qubits: op.gate.qubits(),
        angle: angle.map(round_angle),
        clbit,
        polarities,
        condition: op.condition.as_ref().map(|c| CondDoc { bits: c.bits.clone(), table: c.table.clone() }),
    }
}

pub fn to_json(c: &Circuit) -> String {
    let doc = Document {
        n_qubits: c.n_qubits,
        n_clbits: c.n_clbits,
        data_qubits: c.data_qubits.clone(),
        ops: c.ops.iter().map(op_doc).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("circuit documents always serialize")
}

fn gate_from_doc(doc: &OpDoc) -> Result<Gate, String> {
    let qubits = &doc.qubits;
    let arity = |k: usize| {
        if qubits.len() == k {
            Ok(())
        } else {
            Err(format!("{} takes {k} qubits, got {}", doc.kind, qubits.len()))
        }
    };
    let angle = || doc.angle.ok_or_else(|| format!("{} requires an angle", doc.kind));
    let gate = match doc.kind.as_str() {
        "RotY" => {
            arity(1)?;
            Gate::RotY { theta: angle()?, q: qubits[0] }
        }
        "RotZ" => {
            arity(1)?;
            Gate::RotZ { phi: angle()?, q: qubits[0] }
        }
        "PauliZ" => {
            arity(1)?;
            Gate::PauliZ(qubits[0])
        }
        "PauliX" => {
            arity(1)?;
            Gate::PauliX(qubits[0])
        }
        "Hadamard" => {
            arity(1)?;
            Gate::Hadamard(qubits[0])
        }
        "Reset" => {
            arity(1)?;
            Gate::Reset(qubits[0])
        }
        "CSwap" => {
            arity(3)?;
            Gate::CSwap { control: qubits[0], a: qubits[1], b: qubits[2] }
        }
        "MeasureZ" => {
            arity(1)?;
            let clbit = doc.clbit.ok_or("MeasureZ requires a clbit")?;
            Gate::MeasureZ { q: qubits[0], clbit }
        }
        "MultiCtrlRotY" => {
            let polarities = doc.polarities.as_ref().ok_or("MultiCtrlRotY requires polarities")?;
            arity(polarities.len() + 1)?;
            let controls = qubits.iter().copied().zip(polarities.iter().copied()).collect();
            Gate::MultiCtrlRotY { theta: angle()?, controls, target: qubits[polarities.len()] }
        }
        other => return Err(format!("unknown op kind {other:?}")),
    };
    Ok(gate)
}

pub fn from_json(text: &str) -> Result<Circuit, ParseError> {
    let doc: Document = serde_json::from_str(text)
        .map_err(|e| ParseError::at(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let mut ops = Vec::with_capacity(doc.ops.len());
    for (i, op) in doc.ops.iter().enumerate() {
        let gate = gate_from_doc(op).map_err(|m| ParseError::at(format!("ops[{i}]"), m))?;
        let condition = op.condition.as_ref().map(|c| Condition::new(c.bits.clone(), c.table.clone()));
        ops.push(Op { gate, condition });
    }
    let circuit = Circuit { n_qubits: doc.n_qubits, n_clbits: doc.n_clbits, data_qubits: doc.data_qubits, ops };
    circuit.validate().map_err(|e| ParseError::at(error_location(&e), e.to_string()))?;
    Ok(circuit)
}

fn error_location(e: &CircuitError) -> String {
    match e {
        CircuitError::QubitOutOfRange { op, .. }
        | CircuitError::DuplicateQubit { op, .. }
        | CircuitError::ClbitOutOfRange { op, .. }
        | CircuitError::ClbitRewritten { op, .. }
        | CircuitError::UnmeasuredConditionBit { op, .. }
        | CircuitError::BadTable { op, .. }
        | CircuitError::NotConditionable { op, .. }
        | CircuitError::BadPolarity { op, .. } => format!("ops[{op}]"),
        CircuitError::DataQubitOutOfRange(_) => "data_qubits".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Circuit {
        let mut c = Circuit::new(3);
        c.data_qubits = vec![0, 1];
        c.push(Gate::RotY { theta: 1.0, q: 0 });
        c.push(Gate::MultiCtrlRotY { theta: 0.5, controls: vec![(0, 0), (1, 1)], target: 2 });
        c.push(Gate::CSwap { control: 0, a: 1, b: 2 });
        c.push(Gate::RotZ { phi: -0.25, q: 2 });
        let b = c.measure(2);
        c.push(Op::conditioned(Gate::PauliZ(0), Condition::equals(vec![b], 1)));
        c.push(Gate::Reset(2));
        c
    }

    #[test]
    fn round_trip() {
        let c = sample();
        let text = to_json(&c);
        assert_eq!(from_json(&text).unwrap(), c);
        assert_eq!(to_json(&from_json(&text).unwrap()), text);
    }

    #[test]
    fn angles_keep_twelve_digits() {
        assert_eq!(round_angle(std::f64::consts::PI).to_string(), "3.14159265359");
        assert_eq!(round_angle(-1.0e-20), -1.0e-20);
        let mut c = Circuit::new(1);
        c.push(Gate::RotY { theta: std::f64::consts::E, q: 0 });
        assert!(to_json(&c).contains("2.71828182846"));
    }

    #[test]
    fn unmeasured_condition_bit_is_rejected() {
        let text = r#"{"n_qubits":1,"n_clbits":1,"data_qubits":[0],
            "ops":[{"kind":"PauliZ","qubits":[0],"condition":{"bits":[0],"table":[0,1]}}]}"#;
        let err = from_json(text).unwrap_err();
        assert_eq!(err.location, "ops[0]");
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = from_json("{\n  \"n_qubits\": 1,\n  oops }").unwrap_err();
        assert!(err.location.starts_with("line 3"), "{err}");
    }

    #[test]
    fn malformed_ops_are_located() {
        let text = r#"{"n_qubits":2,"n_clbits":0,"data_qubits":[],
            "ops":[{"kind":"Hadamard","qubits":[0]},{"kind":"CSwap","qubits":[0,1]}]}"#;
        assert_eq!(from_json(text).unwrap_err().location, "ops[1]");
        let text = r#"{"n_qubits":1,"n_clbits":0,"data_qubits":[],"ops":[{"kind":"Toffoli","qubits":[0]}]}"#;
        assert_eq!(from_json(text).unwrap_err().location, "ops[0]");
    }
}
