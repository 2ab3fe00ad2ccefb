//! Divide-and-conquer synthesis: every tree node gets its own wire, loaded in
//! pre-order, and sibling subtree states are merged bottom-up with controlled
//! swaps. The ancilla register left behind by each merge is measured in a
//! basis that disentangles it, with a feed-forward Z on the merging control.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{parallelize_cswaps, time, Compiled, DcOptions, SynthError};
use crate::circuit::{Circuit, Condition, Gate, Op};
use crate::tree::{left_child, level_of, node_index, right_child, AmplitudeTree, PruneAnnotations, PRUNE_TOL};
use crate::walgate::{decompose, BasisChange, OrthPair};

/// Pairs whose overlap exceeds `1 - OVERLAP_TOL` are treated as identical.
const OVERLAP_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub node: usize,
    pub level: usize,
    pub control: usize,
    pub measured: Vec<usize>,
    pub clbits: Vec<usize>,
    pub overlap: f64,
    /// Truth table over `clbits` selecting the branches that get a Z on the
    /// control; absent when no branch needs one.
    pub correction: Option<Vec<u8>>,
}

/// Measurement ops for one merge.
#[derive(Debug, Clone, PartialEq)]
pub struct Disentangler {
    pub ops: Vec<Op>,
    pub clbits: Vec<usize>,
    pub overlap: f64,
    pub correction: Option<Condition>,
}

/// Measures `ancillas`, which hold `psi_right` when `control` is `|0>` and
/// `psi_left` when it is `|1>`, so that the rest of the register is left in
/// the superposition of both branches. Outcomes go to consecutive classical
/// bits starting at `first_clbit`.
pub fn compile_disentangler(
    psi_left: &[f64],
    psi_right: &[f64],
    ancillas: &[usize],
    control: usize,
    first_clbit: usize,
) -> Result<Disentangler, SynthError> {
    let m = ancillas.len();
    let dim = 1usize << m;
    for psi in [psi_left, psi_right] {
        if psi.len() != dim {
            return Err(SynthError::AncillaMismatch { wires: m, dim: psi.len() });
        }
        let norm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(SynthError::NonUnitInput(norm));
        }
    }
    let raw: f64 = psi_left.iter().zip(psi_right).map(|(a, b)| a * b).sum();
    let flip = raw < 0.0;
    let right: Vec<f64> = psi_right.iter().map(|&x| if flip { -x } else { x }).collect();
    let s = if flip { -raw } else { raw };
    if s < 0.0 {
        return Err(SynthError::NegativeOverlapAfterConvention(s));
    }
    let clbits: Vec<usize> = (first_clbit..first_clbit + m).collect();
    let mut ops: Vec<Op> = Vec::new();

    if s > 1.0 - OVERLAP_TOL {
        ops.extend(ancillas.iter().zip(&clbits).map(|(&q, &clbit)| Op::new(Gate::MeasureZ { q, clbit })));
        let correction = flip.then(|| Condition::new(clbits.clone(), vec![1; dim]));
        if flip {
            ops.push(Op::new(Gate::PauliZ(control)));
        }
        return Ok(Disentangler { ops, clbits, overlap: raw, correction });
    }

    let (np, nm) = ((2.0 * (1.0 + s)).sqrt(), (2.0 * (1.0 - s)).sqrt());
    let plus: Vec<C64> = psi_left.iter().zip(&right).map(|(a, b)| C64::new((a + b) / np, 0.0)).collect();
    let minus: Vec<C64> = psi_left.iter().zip(&right).map(|(a, b)| C64::new((a - b) / nm, 0.0)).collect();
    let plan = decompose(&OrthPair { plus, minus, m });

    for d in 0..m {
        let changes: Vec<(usize, BasisChange)> = plan
            .nodes_at_depth(d)
            .into_iter()
            .filter_map(|(path, node)| match node {
                crate::walgate::Plan::Measure { basis, .. } => {
                    Some((path_value(&path), BasisChange::from_ket(basis[0])))
                }
                crate::walgate::Plan::Leaf(_) => None,
            })
            .collect();
        let uniform = changes.windows(2).all(|w| same_change(&w[0].1, &w[1].1));
        if uniform {
            emit_change(&mut ops, &changes[0].1, ancillas[d], None);
        } else {
            for (value, change) in &changes {
                let cond = Condition::equals(clbits[..d].to_vec(), *value);
                emit_change(&mut ops, change, ancillas[d], Some(cond));
            }
        }
        ops.push(Op::new(Gate::MeasureZ { q: ancillas[d], clbit: clbits[d] }));
    }

    let mut table = vec![0u8; dim];
    for (path, label) in plan.leaves() {
        table[path_value(&path)] = ((label == crate::walgate::Label::Minus) != flip) as u8;
    }
    let correction = table.contains(&1).then(|| Condition::new(clbits.clone(), table));
    if let Some(cond) = &correction {
        ops.push(Op::conditioned(Gate::PauliZ(control), cond.clone()));
    }
    Ok(Disentangler { ops, clbits, overlap: raw, correction })
}

fn path_value(path: &[u8]) -> usize {
    path.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

fn same_change(a: &BasisChange, b: &BasisChange) -> bool {
    let rz_eq = match (a.rz, b.rz) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() < 1e-12,
        _ => false,
    };
    rz_eq && (a.ry - b.ry).abs() < 1e-12
}

fn emit_change(ops: &mut Vec<Op>, change: &BasisChange, q: usize, cond: Option<Condition>) {
    let mut push = |gate| ops.push(Op { gate, condition: cond.clone() });
    if let Some(phi) = change.rz {
        push(Gate::RotZ { phi, q });
    }
    if change.ry != 0.0 {
        push(Gate::RotY { theta: change.ry, q });
    }
}

struct Built {
    wire: usize,
    spine: Vec<usize>,
    combine: bool,
}

/// Shared machinery for divide-and-conquer and hybrid synthesis. Subtrees of
/// `block` qubits (when `block > 1`) are time-encoded on their own wires;
/// every node above them gets one wire.
pub(super) struct Engine<'a> {
    tree: &'a AmplitudeTree,
    block: usize,
    flags: Option<PruneAnnotations>,
    disentangle: bool,
    circuit: Circuit,
    built: Vec<Option<Built>>,
    stages: Vec<StageReport>,
}

impl<'a> Engine<'a> {
    pub(super) fn new(tree: &'a AmplitudeTree, block: usize, opts: DcOptions) -> Self {
        Engine {
            tree,
            block,
            flags: opts.prune.then(|| tree.prune()),
            disentangle: opts.disentangle,
            circuit: Circuit::new(0),
            built: (0..tree.len()).map(|_| None).collect(),
            stages: Vec::new(),
        }
    }

    pub(super) fn run(mut self) -> Result<Compiled, SynthError> {
        let n = self.tree.n_qubits();
        self.circuit.data_qubits = self.build(0);
        for l in (0..n.saturating_sub(1)).rev() {
            for p in 0..(1usize << l) {
                let f = node_index(l, p);
                if self.built[f].as_ref().is_some_and(|b| b.combine) {
                    self.stage(f)?;
                }
            }
        }
        Ok(Compiled { circuit: self.circuit, stages: self.stages })
    }

    fn fresh(&mut self, k: usize) -> Vec<usize> {
        (0..k).map(|_| self.circuit.add_qubit()).collect()
    }

    fn load(&mut self, alpha: f64, q: usize) {
        if self.flags.is_none() {
            self.circuit.push(Gate::RotY { theta: alpha, q });
        } else if (alpha - FRAC_PI_2).abs() < PRUNE_TOL {
            self.circuit.push(Gate::Hadamard(q));
        } else if (alpha - PI).abs() < PRUNE_TOL {
            self.circuit.push(Gate::PauliX(q));
        } else if alpha.abs() >= PRUNE_TOL {
            self.circuit.push(Gate::RotY { theta: alpha, q });
        }
    }

    /// Allocates wires and loading gates for the subtree at `f` in pre-order
    /// and returns the wires that end up holding its state.
    fn build(&mut self, f: usize) -> Vec<usize> {
        let width = self.tree.subtree_qubits(f);
        let flags = self.flags.as_ref().map(|a| a.get(f));
        if flags.is_some_and(|fl| fl.trivial_subtree) {
            let spine = self.fresh(width);
            return self.record(f, spine, false);
        }
        if self.block > 1 && width == self.block {
            let spine = self.fresh(width);
            time::emit_block(&mut self.circuit, self.tree, f, &spine);
            return self.record(f, spine, false);
        }
        let alpha = self.tree.node(f).alpha;
        let w = self.fresh(1)[0];
        let leaf = width == 1;
        let (l, r) = (left_child(f), right_child(f));
        let (rest, combine) = match flags {
            None => {
                self.load(alpha, w);
                if leaf {
                    (Vec::new(), false)
                } else {
                    let rest = self.build(l);
                    self.build(r);
                    (rest, true)
                }
            }
            Some(fl) => {
                if leaf {
                    self.load(alpha, w);
                    (Vec::new(), false)
                } else if alpha.abs() < PRUNE_TOL {
                    (self.build(l), false)
                } else if (alpha - PI).abs() < PRUNE_TOL {
                    self.load(alpha, w);
                    (self.build(r), false)
                } else if fl.children_equal {
                    self.load(alpha, w);
                    (self.build(l), false)
                } else {
                    self.load(alpha, w);
                    let rest = self.build(l);
                    self.build(r);
                    (rest, true)
                }
            }
        };
        let mut spine = vec![w];
        spine.extend(rest);
        self.built[f] = Some(Built { wire: w, spine: spine.clone(), combine });
        spine
    }

    fn record(&mut self, f: usize, spine: Vec<usize>, combine: bool) -> Vec<usize> {
        self.built[f] = Some(Built { wire: spine[0], spine: spine.clone(), combine });
        spine
    }

    fn stage(&mut self, f: usize) -> Result<(), SynthError> {
        let (l, r) = (left_child(f), right_child(f));
        let control = self.built[f].as_ref().expect("built").wire;
        let left = self.built[l].as_ref().expect("left child built").spine.clone();
        let right = self.built[r].as_ref().expect("right child built").spine.clone();
        for (&a, &b) in left.iter().zip(&right) {
            self.circuit.push(Gate::CSwap { control, a, b });
        }
        if !self.disentangle {
            return Ok(());
        }
        let d = compile_disentangler(
            &self.tree.prepared_state(l),
            &self.tree.prepared_state(r),
            &right,
            control,
            self.circuit.n_clbits,
        )?;
        self.circuit.n_clbits += d.clbits.len();
        self.circuit.ops.extend(d.ops);
        self.stages.push(StageReport {
            node: f,
            level: level_of(f),
            control,
            measured: right,
            clbits: d.clbits,
            overlap: d.overlap,
            correction: d.correction.map(|c| c.table),
        });
        Ok(())
    }
}

pub fn compile_dc(tree: &AmplitudeTree, opts: DcOptions) -> Result<Compiled, SynthError> {
    let mut out = Engine::new(tree, 1, opts).run()?;
    if opts.parallelize {
        out.circuit = parallelize_cswaps(&out.circuit)?;
    }
    Ok(out)
}

pub fn synthesize_dc(tree: &AmplitudeTree, opts: DcOptions) -> Result<Circuit, SynthError> {
    compile_dc(tree, opts).map(|c| c.circuit)
}
