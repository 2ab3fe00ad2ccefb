//! Perfect discrimination of two orthogonal multi-qubit states by adaptive
//! single-qubit measurements.
//!
//! The first (most significant) qubit `A` is measured in a basis chosen so
//! that, whatever the outcome, the residual states of the remaining qubits are
//! still orthogonal. Writing `|+> = |0>|eta0> + |1>|eta1>` and
//! `|-> = |0>|nu0> + |1>|nu1>`, the basis rows come from
//!
//! ```text
//! U = [[cos t,  sin t e^{iw}],
//!      [sin t e^{-iw}, -cos t]]
//! ```
//!
//! with `w` and `t` chosen to zero the diagonal of `F' G'^dagger`. The
//! procedure then recurses on each outcome's residual pair.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

/// Below this, numerators and denominators of the angle formulas count as 0.
const DEGENERATE_TOL: f64 = 1e-12;
/// Residual branch vectors with a smaller norm are treated as absent.
const RESIDUAL_TOL: f64 = 1e-12;
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalgateError {
    #[error("trace condition violated: |<nu0|eta0> + <nu1|eta1>| = {0:e}")]
    TraceNotZero(f64),
    #[error("states are not orthogonal: |<minus|plus>| = {0:e}")]
    NotOrthogonal(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state dimension {0} is not a power of two >= 2")]
    BadDimension(usize),
    #[error("state has zero norm")]
    ZeroVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// Two orthogonal unit states on `m` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthPair {
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
    pub m: usize,
}

impl OrthPair {
    /// Normalizes both states and checks that they are orthogonal.
    pub fn new(plus: Vec<C64>, minus: Vec<C64>) -> Result<Self, WalgateError> {
        let len = plus.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(WalgateError::BadDimension(len));
        }
        if minus.len() != len {
            return Err(WalgateError::DimensionMismatch { expected: len, got: minus.len() });
        }
        let plus = normalized(plus).ok_or(WalgateError::ZeroVector)?;
        let minus = normalized(minus).ok_or(WalgateError::ZeroVector)?;
        let overlap = inner(&minus, &plus).norm();
        if overlap > ORTHOGONALITY_TOL {
            return Err(WalgateError::NotOrthogonal(overlap));
        }
        Ok(OrthPair { plus, minus, m: len.trailing_zeros() as usize })
    }

    pub fn from_real(plus: &[f64], minus: &[f64]) -> Result<Self, WalgateError> {
        let lift = |v: &[f64]| v.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(lift(plus), lift(minus))
    }
}

/// Single-qubit rotation taking a basis ket `b0` to `|0>` (and its orthogonal
/// partner to `|1>` up to phase): an optional `RotZ(rz)` followed by `RotY(ry)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisChange {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rz: Option<f64>,
    pub ry: f64,
}

impl BasisChange {
    pub fn from_ket(b0: [C64; 2]) -> Self {
        let [c0, c1] = phase_normalized(b0.to_vec()).try_into().expect("two components");
        if c1.im.abs() < DEGENERATE_TOL {
            BasisChange { rz: None, ry: -2.0 * c1.re.atan2(c0.re) }
        } else {
            BasisChange { rz: Some(-c1.arg()), ry: -2.0 * c1.norm().atan2(c0.re) }
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rz.is_none() && self.ry == 0.0
    }
}

/// One node of the decision tree: measure the next qubit in `basis`, then
/// continue with `next[outcome]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Leaf(Label),
    Measure {
        /// `basis[j]` is the ket reported as outcome `j`.
        basis: [[C64; 2]; 2],
        /// `|<minus|plus>|` of the normalized pair this node discriminates.
        overlap: f64,
        next: Box<[Plan; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveMeasPlan {
    pub m: usize,
    pub root: Plan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanOutcome {
    pub path: Vec<u8>,
    pub label: Label,
    pub probability: f64,
}

impl AdaptiveMeasPlan {
    /// Measurement nodes at `depth`, with the outcome path that reaches them.
    pub fn nodes_at_depth(&self, depth: usize) -> Vec<(Vec<u8>, &Plan)> {
        let mut level = vec![(Vec::new(), &self.root)];
        for _ in 0..depth {
            level = level
                .into_iter()
                .flat_map(|(path, node)| match node {
                    Plan::Leaf(_) => Vec::new(),
                    Plan::Measure { next, .. } => (0..2u8)
                        .map(|j| {
                            let mut p = path.clone();
                            p.push(j);
                            (p, &next[j as usize])
                        })
                        .collect(),
                })
                .collect();
        }
        level
    }

    /// Every leaf with its full outcome path, in lexicographic path order.
    pub fn leaves(&self) -> Vec<(Vec<u8>, Label)> {
        self.nodes_at_depth(self.m)
            .into_iter()
            .filter_map(|(path, node)| match node {
                Plan::Leaf(label) => Some((path, *label)),
                Plan::Measure { .. } => None,
            })
            .collect()
    }

    /// Overlaps of the pairs handled at every measurement node.
    pub fn overlaps(&self) -> Vec<f64> {
        (0..self.m)
            .flat_map(|d| self.nodes_at_depth(d))
            .filter_map(|(_, node)| match node {
                Plan::Measure { overlap, .. } => Some(*overlap),
                Plan::Leaf(_) => None,
            })
            .collect()
    }

    /// Whether every basis ket has zero imaginary part.
    pub fn is_real(&self) -> bool {
        (0..self.m).flat_map(|d| self.nodes_at_depth(d)).all(|(_, node)| match node {
            Plan::Measure { basis, .. } => basis.iter().flatten().all(|c| c.im == 0.0),
            Plan::Leaf(_) => true,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let path_str = |p: &[u8]| p.iter().map(|b| char::from(b'0' + b)).collect::<String>();
        let ket = |k: &[C64; 2]| json!([[k[0].re, k[0].im], [k[1].re, k[1].im]]);
        let measurements: Vec<_> = (0..self.m)
            .flat_map(|d| self.nodes_at_depth(d))
            .filter_map(|(path, node)| match node {
                Plan::Measure { basis, .. } => Some(json!({
                    "qubit": path.len(),
                    "after": path_str(&path),
                    "basis": [ket(&basis[0]), ket(&basis[1])],
                    "rotation": BasisChange::from_ket(basis[0]),
                })),
                Plan::Leaf(_) => None,
            })
            .collect();
        let leaves: Vec<_> =
            self.leaves().into_iter().map(|(p, l)| json!({"path": path_str(&p), "label": l})).collect();
        json!({"m": self.m, "measurements": measurements, "leaves": leaves})
    }
}

/// `<a|b>`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn normalized(v: Vec<C64>) -> Option<Vec<C64>> {
    let n = norm(&v);
    (n > 0.0 && n.is_finite()).then(|| v.into_iter().map(|c| c / n).collect())
}

/// Scales `v` by a phase so its first non-negligible entry is real and
/// non-negative.
fn phase_normalized(v: Vec<C64>) -> Vec<C64> {
    match v.iter().find(|c| c.norm() > DEGENERATE_TOL) {
        Some(lead) => {
            let phase = lead.conj() / lead.norm();
            let mut out: Vec<C64> = v.iter().map(|c| c * phase).collect();
            if let Some(c) = out.iter_mut().find(|c| c.norm() > DEGENERATE_TOL) {
                c.im = 0.0;
            }
            out.iter_mut().filter(|c| c.im.abs() < 1e-15 * c.re.abs().max(1.0)).for_each(|c| c.im = 0.0);
            out
        }
        None => v,
    }
}

/// Maps an angle to the principal interval `(-pi/2, pi/2]`.
fn fold_half_turn(mut x: f64) -> f64 {
    use std::f64::consts::PI;
    while x > FRAC_PI_2 {
        x -= PI;
    }
    while x <= -FRAC_PI_2 {
        x += PI;
    }
    x
}

/// Returns `(theta, omega)` for the first-qubit basis that keeps the residual
/// pairs orthogonal.
pub fn solve_ua(eta0: &[C64], eta1: &[C64], nu0: &[C64], nu1: &[C64]) -> Result<(f64, f64), WalgateError> {
    let trace = (inner(nu0, eta0) + inner(nu1, eta1)).norm();
    if trace > ORTHOGONALITY_TOL {
        return Err(WalgateError::TraceNotZero(trace));
    }
    Ok(solve_ua_unchecked(eta0, eta1, nu0, nu1))
}

fn solve_ua_unchecked(eta0: &[C64], eta1: &[C64], nu0: &[C64], nu1: &[C64]) -> (f64, f64) {
    let a = inner(nu0, eta0) - inner(nu1, eta1);
    let p = inner(nu1, eta0);
    let q = inner(nu0, eta1);
    let (sum, diff) = (p + q, p - q);
    let omega_n = a.im * sum.re - a.re * sum.im;
    let omega_d = a.re * diff.re + a.im * diff.im;
    let omega =
        if omega_n.abs().max(omega_d.abs()) < DEGENERATE_TOL { 0.0 } else { fold_half_turn(omega_n.atan2(omega_d)) };
    let x = q * C64::from_polar(1.0, -omega) + p * C64::from_polar(1.0, omega);
    let two_theta = if a.re.abs().max(x.re.abs()) >= DEGENERATE_TOL {
        (-a.re).atan2(x.re)
    } else if a.im.abs().max(x.im.abs()) >= DEGENERATE_TOL {
        (-a.im).atan2(x.im)
    } else {
        0.0
    };
    (fold_half_turn(two_theta) / 2.0, omega)
}

/// Builds the adaptive plan: qubit 0 (most significant) first, then the
/// remaining qubits recursively on each outcome's residual pair.
pub fn decompose(pair: &OrthPair) -> AdaptiveMeasPlan {
    AdaptiveMeasPlan { m: pair.m, root: build(&pair.plus, &pair.minus) }
}

fn build(plus: &[C64], minus: &[C64]) -> Plan {
    let overlap = inner(minus, plus).norm();
    if plus.len() == 2 {
        let b0 = phase_normalized(plus.to_vec());
        let proj = inner(&b0, minus);
        let rest: Vec<C64> = minus.iter().zip(&b0).map(|(m, b)| m - proj * b).collect();
        let b1 = match normalized(rest) {
            Some(v) if norm(&v) > 0.5 => v,
            _ => vec![-b0[1].conj(), b0[0].conj()],
        };
        let b1 = phase_normalized(b1);
        return Plan::Measure {
            basis: [[b0[0], b0[1]], [b1[0], b1[1]]],
            overlap,
            next: Box::new([Plan::Leaf(Label::Plus), Plan::Leaf(Label::Minus)]),
        };
    }
    let half = plus.len() / 2;
    let (eta0, eta1) = plus.split_at(half);
    let (nu0, nu1) = minus.split_at(half);
    let (theta, omega) = solve_ua_unchecked(eta0, eta1, nu0, nu1);
    let (c, s) = (theta.cos(), theta.sin());
    let rows = [
        phase_normalized(vec![C64::new(c, 0.0), C64::from_polar(s, omega)]),
        phase_normalized(vec![C64::from_polar(s, -omega), C64::new(-c, 0.0)]),
    ];
    let residual = |row: &[C64], v0: &[C64], v1: &[C64]| -> Vec<C64> {
        v0.iter().zip(v1).map(|(x, y)| row[0].conj() * x + row[1].conj() * y).collect()
    };
    let next = [0, 1].map(|j| {
        let eta = residual(&rows[j], eta0, eta1);
        let nu = residual(&rows[j], nu0, nu1);
        let (ne, nn) = (norm(&eta), norm(&nu));
        match (ne < RESIDUAL_TOL, nn < RESIDUAL_TOL) {
            (false, false) => build(&normalized(eta).unwrap(), &normalized(nu).unwrap()),
            (false, true) | (true, true) => constant(Label::Plus, half),
            (true, false) => constant(Label::Minus, half),
        }
    });
    Plan::Measure { basis: [[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]], overlap, next: Box::new(next) }
}

/// Computational-basis measurements on a branch that only one state reaches.
fn constant(label: Label, dim: usize) -> Plan {
    if dim == 1 {
        return Plan::Leaf(label);
    }
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    Plan::Measure {
        basis: [[one, zero], [zero, one]],
        overlap: 0.0,
        next: Box::new([constant(label, dim / 2), constant(label, dim / 2)]),
    }
}

/// Runs `state` through the plan and reports every leaf with its probability.
pub fn evaluate_plan(plan: &AdaptiveMeasPlan, state: &[C64]) -> Result<Vec<PlanOutcome>, WalgateError> {
    let expected = 1usize << plan.m;
    if state.len() != expected {
        return Err(WalgateError::DimensionMismatch { expected, got: state.len() });
    }
    let total = norm(state).powi(2);
    if total == 0.0 {
        return Err(WalgateError::ZeroVector);
    }
    let mut out = Vec::with_capacity(expected);
    walk(&plan.root, state.to_vec(), &mut Vec::new(), total, &mut out);
    Ok(out)
}

fn walk(node: &Plan, amps: Vec<C64>, path: &mut Vec<u8>, total: f64, out: &mut Vec<PlanOutcome>) {
    match node {
        Plan::Leaf(label) => {
            out.push(PlanOutcome { path: path.clone(), label: *label, probability: norm(&amps).powi(2) / total })
        }
        Plan::Measure { basis, next, .. } => {
            let (a0, a1) = amps.split_at(amps.len() / 2);
            for j in 0..2 {
                let b = basis[j];
                let residual = a0.iter().zip(a1).map(|(x, y)| b[0].conj() * x + b[1].conj() * y).collect();
                path.push(j as u8);
                walk(&next[j], residual, path, total, out);
                path.pop();
            }
        }
    }
}

/// Probability that the plan labels `state` as `label`.
pub fn label_probability(outcomes: &[PlanOutcome], label: Label) -> f64 {
    outcomes.iter().filter(|o| o.label == label).map(|o| o.probability).sum()
}
