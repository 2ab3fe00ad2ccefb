//! Weighted binary tree for a non-negative amplitude vector.
//!
//! Node `f = 2^l - 1 + p` sits at level `l` and position `p`. It stores the
//! edge weights `omega0`/`omega1` (the conditional amplitude of the next qubit
//! being `|0>`/`|1>` given that the first `l` qubits spell `p`), the Y-rotation
//! angle that prepares `omega0|0> + omega1|1>` from `|0>`, and the norm of the
//! amplitudes underneath it. Leaves of the tree are the amplitudes themselves;
//! the deepest stored nodes live at level `n - 1`.

use thiserror::Error;

/// Norms below this are treated as exactly zero.
pub const ZERO_NORM_TOL: f64 = 1e-12;

/// Tolerance used for the per-node pruning predicates.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("vector length {0} is not a power of two >= 2")]
    NonPowerOfTwoLength(usize),
    #[error("amplitude {value} at index {index} is negative")]
    NegativeAmplitude { index: usize, value: f64 },
    #[error("amplitude at index {0} is not finite")]
    NonFiniteAmplitude(usize),
    #[error("vector has zero norm")]
    ZeroVector,
    #[error("node {0} roots a zero-norm subtree")]
    UndefinedNode(usize),
    #[error("node {index} out of range for a tree with {len} nodes")]
    NodeOutOfRange { index: usize, len: usize },
}

pub type TreeResult<T> = Result<T, TreeError>;

/// One interior node of the tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub omega0: f64,
    pub omega1: f64,
    /// Y-rotation angle in `[0, pi]`.
    pub alpha: f64,
    /// Norm of the amplitudes in this node's subtree.
    pub norm: f64,
    /// `false` for zero-norm nodes, whose weights and angle are all zero.
    pub defined: bool,
}

impl Node {
    const UNDEFINED: Node = Node { omega0: 0.0, omega1: 0.0, alpha: 0.0, norm: 0.0, defined: false };
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTree {
    n: usize,
    nodes: Vec<Node>,
    amplitudes: Vec<f64>,
}

/// Per-node flags consumed by pruned synthesis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PruneFlags {
    /// The loading angle is zero, so the node's qubit stays in `|0>`.
    pub skip_rotation: bool,
    /// The node's subtree prepares `|0...0>`.
    pub trivial_subtree: bool,
    /// Both child subtrees prepare the same state.
    pub children_equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneAnnotations {
    pub flags: Vec<PruneFlags>,
}

impl PruneAnnotations {
    pub fn get(&self, f: usize) -> PruneFlags {
        self.flags[f]
    }
}

/// Appends zeros until the length is a power of two (at least 2).
pub fn pad_to_power_of_two(x: &[f64]) -> Vec<f64> {
    let len = x.len().max(2).next_power_of_two();
    let mut out = x.to_vec();
    out.resize(len, 0.0);
    out
}

/// Builds the tree for `x`, renormalizing it first.
pub fn build_tree(x: &[f64]) -> TreeResult<AmplitudeTree> {
    AmplitudeTree::build(x)
}

/// Pre-order (root, left subtree, right subtree) listing of the `2^n - 1`
/// node indices of an `n`-qubit tree.
pub fn preorder(n: usize) -> Vec<usize> {
    fn visit(f: usize, level: usize, n: usize, out: &mut Vec<usize>) {
        out.push(f);
        if level + 1 < n {
            visit(2 * f + 1, level + 1, n, out);
            visit(2 * f + 2, level + 1, n, out);
        }
    }
    let mut out = Vec::with_capacity((1usize << n).saturating_sub(1));
    if n > 0 {
        visit(0, 0, n, &mut out);
    }
    out
}

/// Level of node `f`.
pub fn level_of(f: usize) -> usize {
    (usize::BITS - 1 - (f + 1).leading_zeros()) as usize
}

/// Position of node `f` within its level.
pub fn position_of(f: usize) -> usize {
    f + 1 - (1usize << level_of(f))
}

pub fn node_index(level: usize, position: usize) -> usize {
    (1usize << level) - 1 + position
}

pub fn left_child(f: usize) -> usize {
    2 * f + 1
}

pub fn right_child(f: usize) -> usize {
    2 * f + 2
}

impl AmplitudeTree {
    pub fn build(x: &[f64]) -> TreeResult<Self> {
        let len = x.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(TreeError::NonPowerOfTwoLength(len));
        }
        for (index, &value) in x.iter().enumerate() {
            if !value.is_finite() {
                return Err(TreeError::NonFiniteAmplitude(index));
            }
            if value < 0.0 {
                return Err(TreeError::NegativeAmplitude { index, value });
            }
        }
        let total: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if total <= 0.0 {
            return Err(TreeError::ZeroVector);
        }
        let amplitudes: Vec<f64> = x.iter().map(|v| v / total).collect();
        let n = len.trailing_zeros() as usize;

        // Squared norms, level by level from the amplitudes upward. `sq[l]`
        // has 2^l entries; `sq[n]` is the squared amplitudes.
        let mut sq: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
        sq[n] = amplitudes.iter().map(|v| v * v).collect();
        for l in (0..n).rev() {
            sq[l] = sq[l + 1].chunks(2).map(|c| c[0] + c[1]).collect();
        }

        let mut nodes = vec![Node::UNDEFINED; len - 1];
        for l in 0..n {
            for p in 0..(1usize << l) {
                let norm = sq[l][p].sqrt();
                let node = &mut nodes[node_index(l, p)];
                if norm < ZERO_NORM_TOL {
                    continue;
                }
                // At the deepest level use the signed amplitudes directly so
                // that the path products reproduce them to rounding.
                let (c0, c1) = if l + 1 == n {
                    (amplitudes[2 * p], amplitudes[2 * p + 1])
                } else {
                    (sq[l + 1][2 * p].sqrt(), sq[l + 1][2 * p + 1].sqrt())
                };
                let omega0 = c0 / norm;
                let omega1 = c1 / norm;
                *node = Node { omega0, omega1, alpha: 2.0 * omega1.atan2(omega0), norm, defined: true };
            }
        }
        Ok(AmplitudeTree { n, nodes, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, f: usize) -> &Node {
        &self.nodes[f]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The normalized input vector.
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn is_leaf(&self, f: usize) -> bool {
        level_of(f) + 1 == self.n
    }

    pub fn preorder(&self) -> Vec<usize> {
        preorder(self.n)
    }

    /// Number of qubits in the state rooted at `f`.
    pub fn subtree_qubits(&self, f: usize) -> usize {
        self.n - level_of(f)
    }

    /// The normalized state prepared by the subtree rooted at `f`, obtained by
    /// multiplying edge weights inside the subtree.
    pub fn subtree_state(&self, f: usize) -> TreeResult<Vec<f64>> {
        self.check_index(f)?;
        if !self.nodes[f].defined {
            return Err(TreeError::UndefinedNode(f));
        }
        Ok(self.weight_products(f))
    }

    /// Like [`subtree_state`](Self::subtree_state), but zero-norm subtrees
    /// yield `|0...0>`: every angle inside them is zero, which is what a
    /// circuit loading those angles actually produces.
    pub fn prepared_state(&self, f: usize) -> Vec<f64> {
        if self.nodes[f].defined {
            self.weight_products(f)
        } else {
            let mut v = vec![0.0; 1 << self.subtree_qubits(f)];
            v[0] = 1.0;
            v
        }
    }

    fn weight_products(&self, f: usize) -> Vec<f64> {
        let node = &self.nodes[f];
        if self.is_leaf(f) {
            return vec![node.omega0, node.omega1];
        }
        let left = self.weight_products(left_child(f));
        let right = self.weight_products(right_child(f));
        left.iter().map(|v| node.omega0 * v).chain(right.iter().map(|v| node.omega1 * v)).collect()
    }

    fn check_index(&self, f: usize) -> TreeResult<()> {
        if f >= self.nodes.len() {
            return Err(TreeError::NodeOutOfRange { index: f, len: self.nodes.len() });
        }
        Ok(())
    }

    /// Product of the edge weights from the root down to amplitude `i`.
    pub fn path_product(&self, i: usize) -> f64 {
        let mut f = 0;
        let mut product = 1.0;
        for l in 0..self.n {
            let bit = (i >> (self.n - 1 - l)) & 1;
            let node = &self.nodes[f];
            product *= if bit == 0 { node.omega0 } else { node.omega1 };
            f = 2 * f + 1 + bit;
        }
        product
    }

    pub fn prune(&self) -> PruneAnnotations {
        let mut flags = vec![PruneFlags::default(); self.nodes.len()];
        // Children before parents.
        for f in (0..self.nodes.len()).rev() {
            let skip_rotation = self.nodes[f].alpha.abs() < PRUNE_TOL;
            let (trivial_subtree, children_equal) = if self.is_leaf(f) {
                (skip_rotation, false)
            } else {
                let (l, r) = (left_child(f), right_child(f));
                let trivial = skip_rotation && flags[l].trivial_subtree && flags[r].trivial_subtree;
                let a = canonical_sign(self.prepared_state(l));
                let b = canonical_sign(self.prepared_state(r));
                let equal = a.iter().zip(&b).all(|(u, v)| (u - v).abs() <= PRUNE_TOL);
                (trivial, equal)
            };
            flags[f] = PruneFlags { skip_rotation, trivial_subtree, children_equal };
        }
        PruneAnnotations { flags }
    }
}

/// Flips the sign of `v` if needed so that its first non-negligible entry is
/// non-negative.
fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    if let Some(lead) = v.iter().find(|x| x.abs() > PRUNE_TOL) {
        if *lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}
