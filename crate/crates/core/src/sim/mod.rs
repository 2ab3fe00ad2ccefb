//! Branch-by-branch simulation of circuits with mid-circuit measurements and
//! classical feed-forward.

mod state;

pub use state::{hadamard, pauli_x, pauli_z, roty, rotz, LazyState, Matrix2};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, Op};

/// Branches with a smaller total probability are dropped.
pub const BRANCH_PROB_CUTOFF: f64 = 1e-14;
pub const DEFAULT_BRANCH_CAP: usize = 14;
pub const FIDELITY_TOL: f64 = 1e-9;
pub const PROBABILITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{measured} measured wires exceed the enumeration cap of {cap}")]
    TooManyBranches { measured: usize, cap: usize },
    #[error("invalid condition: {0}")]
    InvalidCondition(CircuitError),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(CircuitError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Every outcome of every measurement, depth first, outcome 0 first.
    Enumerate { cap: usize },
    /// `shots` independent runs drawn from a generator seeded with `seed`.
    Sample { shots: usize, seed: u64 },
}

impl Mode {
    pub fn enumerate() -> Self {
        Mode::Enumerate { cap: DEFAULT_BRANCH_CAP }
    }
}

/// One measurement trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// Measurement results in execution order.
    pub outcomes: Vec<u8>,
    /// Final value of every classical bit.
    pub clbits: Vec<u8>,
    /// Born probability of this trajectory.
    pub probability: f64,
    /// Number of shots that followed it (1 when enumerating).
    pub count: usize,
    pub state: LazyState,
    pub data_qubits: Vec<usize>,
}

impl Branch {
    pub fn data_density(&self) -> Vec<Vec<C64>> {
        self.state.reduced_density(&self.data_qubits)
    }

    /// Computational-basis probabilities of the data register.
    pub fn data_probabilities(&self) -> Vec<f64> {
        let rho = self.data_density();
        let total: f64 = (0..rho.len()).map(|i| rho[i][i].re).sum();
        (0..rho.len()).map(|i| rho[i][i].re / total).collect()
    }

    /// The data register's state, exact when it is unentangled with the
    /// remaining wires: the dominant column of its density matrix.
    pub fn data_state(&self) -> Vec<C64> {
        let rho = self.data_density();
        let j = (0..rho.len()).max_by(|&a, &b| rho[a][a].re.total_cmp(&rho[b][b].re)).unwrap_or(0);
        let scale = rho[j][j].re.sqrt();
        rho.iter().map(|row| row[j] / scale).collect()
    }

    /// `sqrt(<x|rho|x>)`: the overlap modulus when the data register is pure,
    /// and strictly below 1 when it is entangled with other wires.
    pub fn fidelity_to(&self, target: &[C64]) -> Result<f64, SimError> {
        let rho = self.data_density();
        if target.len() != rho.len() {
            return Err(SimError::DimensionMismatch { expected: rho.len(), got: target.len() });
        }
        let total: f64 = (0..rho.len()).map(|i| rho[i][i].re).sum();
        let mut v = C64::new(0.0, 0.0);
        for (i, row) in rho.iter().enumerate() {
            for (j, r) in row.iter().enumerate() {
                v += target[i].conj() * r * target[j];
            }
        }
        Ok((v.re / total).max(0.0).sqrt().min(1.0))
    }
}

/// `|<a|b>|`.
pub fn fidelity(a: &[C64], b: &[C64]) -> Result<f64, SimError> {
    if a.len() != b.len() {
        return Err(SimError::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm())
}

fn check(c: &Circuit) -> Result<(), SimError> {
    c.validate().map_err(|e| match e {
        CircuitError::UnmeasuredConditionBit { .. } | CircuitError::BadTable { .. } => SimError::InvalidCondition(e),
        e => SimError::InvalidCircuit(e),
    })
}

pub fn run(c: &Circuit, mode: Mode) -> Result<Vec<Branch>, SimError> {
    check(c)?;
    match mode {
        Mode::Enumerate { cap } => {
            let measured = c.count("MeasureZ") + c.count("Reset");
            if measured > cap {
                return Err(SimError::TooManyBranches { measured, cap });
            }
            let mut out = Vec::new();
            let start = Walker {
                state: LazyState::new(c.n_qubits),
                clbits: vec![0; c.n_clbits],
                outcomes: Vec::new(),
                probability: 1.0,
            };
            enumerate(c, 0, start, &mut out);
            Ok(out)
        }
        Mode::Sample { shots, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out: std::collections::BTreeMap<Vec<u8>, Branch> = std::collections::BTreeMap::new();
            for _ in 0..shots {
                let branch = sample_once(c, &mut rng);
                out.entry(branch.outcomes.clone()).and_modify(|b| b.count += 1).or_insert(branch);
            }
            Ok(out.into_values().collect())
        }
    }
}

#[derive(Clone)]
struct Walker {
    state: LazyState,
    clbits: Vec<u8>,
    outcomes: Vec<u8>,
    probability: f64,
}

impl Walker {
    /// Applies a unitary op; measurements and resets are handled by callers.
    fn apply(&mut self, op: &Op) {
        if let Some(cond) = &op.condition {
            if !cond.fires(&self.clbits) {
                return;
            }
        }
        let s = &mut self.state;
        match &op.gate {
            Gate::RotY { theta, q } => s.apply_1q(*q, &roty(*theta)),
            Gate::RotZ { phi, q } => s.apply_1q(*q, &rotz(*phi)),
            Gate::PauliZ(q) => s.apply_1q(*q, &pauli_z()),
            Gate::PauliX(q) => s.apply_1q(*q, &pauli_x()),
            Gate::Hadamard(q) => s.apply_1q(*q, &hadamard()),
            Gate::CSwap { control, a, b } => s.cswap(*control, *a, *b),
            Gate::MultiCtrlRotY { theta, controls, target } => s.apply_controlled_1q(controls, *target, &roty(*theta)),
            Gate::MeasureZ { .. } | Gate::Reset(_) => unreachable!("handled by the caller"),
        }
    }

    fn settle(&mut self, op: &Op, outcome: u8, p: f64) {
        match op.gate {
            Gate::MeasureZ { q, clbit } => {
                self.state.collapse(q, outcome, p);
                self.clbits[clbit] = outcome;
                self.outcomes.push(outcome);
            }
            Gate::Reset(q) => {
                self.state.collapse(q, outcome, p);
                self.state.collapse(q, 0, 1.0);
            }
            _ => unreachable!(),
        }
        self.probability *= p;
    }

    fn into_branch(self, c: &Circuit) -> Branch {
        Branch {
            outcomes: self.outcomes,
            clbits: self.clbits,
            probability: self.probability,
            count: 1,
            state: self.state,
            data_qubits: c.data_qubits.clone(),
        }
    }
}

fn measured_wire(op: &Op) -> Option<usize> {
    match op.gate {
        Gate::MeasureZ { q, .. } | Gate::Reset(q) => Some(q),
        _ => None,
    }
}

fn enumerate(c: &Circuit, from: usize, mut w: Walker, out: &mut Vec<Branch>) {
    for i in from..c.ops.len() {
        let op = &c.ops[i];
        let Some(q) = measured_wire(op) else {
            w.apply(op);
            continue;
        };
        let p1 = w.state.prob_one(q);
        let probs = [1.0 - p1, p1];
        let live: Vec<u8> = (0..2u8).filter(|&o| w.probability * probs[o as usize] >= BRANCH_PROB_CUTOFF).collect();
        for (k, &o) in live.iter().enumerate() {
            let mut next = if k + 1 == live.len() { std::mem::replace(&mut w, dummy()) } else { w.clone() };
            next.settle(op, o, probs[o as usize]);
            enumerate(c, i + 1, next, out);
        }
        return;
    }
    out.push(w.into_branch(c));
}

fn dummy() -> Walker {
    Walker { state: LazyState::new(0), clbits: Vec::new(), outcomes: Vec::new(), probability: 0.0 }
}

fn sample_once(c: &Circuit, rng: &mut ChaCha8Rng) -> Branch {
    let mut w = Walker {
        state: LazyState::new(c.n_qubits),
        clbits: vec![0; c.n_clbits],
        outcomes: Vec::new(),
        probability: 1.0,
    };
    for op in &c.ops {
        match measured_wire(op) {
            None => w.apply(op),
            Some(q) => {
                let p1 = w.state.prob_one(q);
                let o = u8::from(rng.gen::<f64>() < p1);
                w.settle(op, o, if o == 1 { p1 } else { 1.0 - p1 });
            }
        }
    }
    w.into_branch(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub branches: usize,
    /// Total probability of the enumerated branches, or the total sampled
    /// frequency in sample mode.
    pub sum_prob: f64,
    pub min_fidelity: f64,
    pub pass: bool,
}

/// Checks that every branch leaves the data register in `target`.
pub fn verify_preparation(c: &Circuit, target: &[f64], mode: Mode) -> Result<VerifyReport, SimError> {
    let expected = 1usize << c.data_qubits.len();
    if target.len() != expected {
        return Err(SimError::DimensionMismatch { expected, got: target.len() });
    }
    let norm = target.iter().map(|x| x * x).sum::<f64>().sqrt();
    let x: Vec<C64> = target.iter().map(|&v| C64::new(v / norm, 0.0)).collect();
    let branches = run(c, mode)?;
    let sum_prob = match mode {
        Mode::Enumerate { .. } => branches.iter().map(|b| b.probability).sum(),
        Mode::Sample { shots, .. } => branches.iter().map(|b| b.count).sum::<usize>() as f64 / shots.max(1) as f64,
    };
    let mut min_fidelity = f64::INFINITY;
    for b in &branches {
        min_fidelity = min_fidelity.min(b.fidelity_to(&x)?);
    }
    if branches.is_empty() {
        min_fidelity = 0.0;
    }
    let pass = min_fidelity >= 1.0 - FIDELITY_TOL && (sum_prob - 1.0).abs() <= PROBABILITY_TOL;
    Ok(VerifyReport { branches: branches.len(), sum_prob, min_fidelity, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Condition;
    use crate::random::random_state;
    use crate::synth::{synthesize_dc, synthesize_time, DcOptions};
    use crate::tree::build_tree;
    use proptest::prelude::*;

    fn real(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn born_rule_on_one_wire() {
        let mut c = Circuit::new(1);
        c.push(Gate::RotY { theta: std::f64::consts::FRAC_PI_2, q: 0 });
        c.measure(0);
        let b = run(&c, Mode::enumerate()).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!((b[0].outcomes.clone(), b[1].outcomes.clone()), (vec![0], vec![1]));
        assert!((b[0].probability - 0.5).abs() < 1e-15 && (b[1].probability - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fidelity_basics() {
        let v = real(&[0.6, 0.8]);
        assert!((fidelity(&v, &v).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&real(&[1.0, 0.0]), &real(&[0.0, 1.0])).unwrap(), 0.0);
        let phased: Vec<C64> = v.iter().map(|a| a * C64::from_polar(1.0, 0.7)).collect();
        assert!((fidelity(&v, &phased).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&v, &real(&[1.0])).is_err());
    }

    #[test]
    fn feed_forward_follows_outcomes() {
        // Measure a |+> wire and copy the result onto a second wire.
        let mut c = Circuit::new(2);
        c.data_qubits = vec![1];
        c.push(Gate::Hadamard(0));
        let b = c.measure(0);
        c.push(Op::conditioned(Gate::PauliX(1), Condition::equals(vec![b], 1)));
        for br in run(&c, Mode::enumerate()).unwrap() {
            let p = br.data_probabilities();
            assert_eq!(p[br.outcomes[0] as usize], 1.0);
        }
    }

    #[test]
    fn zero_probability_branches_are_pruned() {
        let mut c = Circuit::new(1);
        c.measure(0);
        let b = run(&c, Mode::enumerate()).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].outcomes, vec![0]);
    }

    #[test]
    fn cap_is_enforced() {
        let mut c = Circuit::new(3);
        for q in 0..3 {
            c.measure(q);
        }
        assert_eq!(run(&c, Mode::Enumerate { cap: 2 }), Err(SimError::TooManyBranches { measured: 3, cap: 2 }));
    }

    #[test]
    fn unmeasured_condition_is_invalid() {
        let mut c = Circuit::new(1);
        c.n_clbits = 1;
        c.push(Op::conditioned(Gate::PauliX(0), Condition::equals(vec![0], 1)));
        assert!(matches!(run(&c, Mode::enumerate()), Err(SimError::InvalidCondition(_))));
    }

    #[test]
    fn reset_returns_wire_to_zero() {
        let mut c = Circuit::new(1);
        c.data_qubits = vec![0];
        c.push(Gate::Hadamard(0));
        c.push(Gate::Reset(0));
        let r = verify_preparation(&c, &[1.0, 0.0], Mode::enumerate()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.branches, 2);
    }

    #[test]
    fn time_encoding_has_one_exact_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_state(&mut rng, 4);
        let c = synthesize_time(&build_tree(&x).unwrap());
        let b = run(&c, Mode::enumerate()).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b[0].fidelity_to(&real(&x)).unwrap() - 1.0).abs() < 1e-12);
        let st = b[0].data_state();
        for (a, want) in st.iter().zip(&x) {
            assert!((a.re.abs() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_seeded_and_matches_born_rule() {
        let mut c = Circuit::new(2);
        c.push(Gate::RotY { theta: 1.0, q: 0 });
        c.push(Gate::Hadamard(1));
        c.measure(0);
        c.measure(1);
        let shots = 100_000;
        let a = run(&c, Mode::Sample { shots, seed: 42 }).unwrap();
        let b = run(&c, Mode::Sample { shots, seed: 42 }).unwrap();
        assert_eq!(a, b);
        let exact = run(&c, Mode::enumerate()).unwrap();
        assert_eq!(a.len(), exact.len());
        // Chi-squared with 3 degrees of freedom; 16.27 is the 0.1% quantile.
        let chi2: f64 = a
            .iter()
            .zip(&exact)
            .map(|(s, e)| {
                let expected = e.probability * shots as f64;
                (s.count as f64 - expected).powi(2) / expected
            })
            .sum();
        assert!(chi2 < 16.27, "chi2 = {chi2}");
    }

    #[test]
    fn entangled_register_has_low_fidelity() {
        let tree = build_tree(&[0.36f64.sqrt(), 0.64f64.sqrt(), 0.5f64.sqrt(), 0.5f64.sqrt()]).unwrap();
        let c = synthesize_dc(&tree, DcOptions { disentangle: false, ..Default::default() }).unwrap();
        let b = run(&c, Mode::enumerate()).unwrap();
        assert_eq!(b.len(), 1);
        let x = [0.18f64, 0.32, 0.25, 0.25].map(f64::sqrt);
        assert!(b[0].fidelity_to(&real(&x)).unwrap() < 1.0 - 1e-6);
        let p = b[0].data_probabilities();
        assert!(p.iter().zip(&x).all(|(a, w)| (a - w * w).abs() < 1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn gates_preserve_norm(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tree = build_tree(&random_state(&mut rng, n)).unwrap();
            let c = synthesize_dc(&tree, DcOptions { disentangle: false, ..Default::default() }).unwrap();
            let mut w = Walker { state: LazyState::new(c.n_qubits), clbits: vec![], outcomes: vec![], probability: 1.0 };
            for op in &c.ops {
                w.apply(op);
                prop_assert!((w.state.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn layer_replay_matches_sequential(seed in any::<u64>(), n in 2usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tree = build_tree(&random_state(&mut rng, n)).unwrap();
            let c = synthesize_dc(&tree, DcOptions::default()).unwrap();
            let layers = crate::circuit::full_layers(&c);
            let mut order: Vec<usize> = (0..c.ops.len()).collect();
            order.sort_by_key(|&i| layers[i]);
            let replay = Circuit { ops: order.iter().map(|&i| c.ops[i].clone()).collect(), ..c.clone() };
            let mut a = run(&c, Mode::enumerate()).unwrap();
            let mut b = run(&replay, Mode::enumerate()).unwrap();
            a.sort_by(|x, y| x.clbits.cmp(&y.clbits));
            b.sort_by(|x, y| x.clbits.cmp(&y.clbits));
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.probability - y.probability).abs() < 1e-12);
                prop_assert!(fidelity(&x.data_state(), &y.data_state()).unwrap() > 1.0 - 1e-12);
            }
        }
    }
}
