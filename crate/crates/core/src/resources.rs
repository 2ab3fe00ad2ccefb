//! Closed-form resource counts and the qubit-reuse scheduler.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResourceError {
    #[error("lambda {lambda} out of range 1..={n}")]
    LambdaOutOfRange { n: usize, lambda: usize },
    #[error("n = {0} is out of range for this formula")]
    NOutOfRange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DcFormulas {
    pub qubits: usize,
    pub cswaps: usize,
    pub depth: usize,
    pub depth_parallel: usize,
}

/// Divide-and-conquer counts for a dense `n`-qubit target.
pub fn dc_formulas(n: usize) -> Result<DcFormulas, ResourceError> {
    if n == 0 {
        return Err(ResourceError::NOutOfRange(n));
    }
    Ok(DcFormulas {
        qubits: (1 << n) - 1,
        cswaps: (1 << n) - n - 1,
        depth: 1 + n * (n - 1) / 2,
        depth_parallel: (2 * n).saturating_sub(2).max(1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HybridFormulas {
    pub qubits: usize,
    pub depth: usize,
}

/// Counts when `lambda`-qubit subtrees are time-encoded and the rest merged.
pub fn hybrid_formulas(n: usize, lambda: usize) -> Result<HybridFormulas, ResourceError> {
    if lambda == 0 || lambda > n {
        return Err(ResourceError::LambdaOutOfRange { n, lambda });
    }
    Ok(HybridFormulas {
        qubits: (lambda + 1) * (1 << (n - lambda)) - 1,
        depth: (1 << lambda) - 1 + (0..n - lambda).map(|l| n - l - 1).sum::<usize>(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MidresetFormulas {
    pub q_min: usize,
    pub depth: usize,
}

/// Minimum width and depth when ancillas are reset and reused mid-circuit.
pub fn midreset_formulas(n: usize) -> Result<MidresetFormulas, ResourceError> {
    if n <= 2 {
        return Err(ResourceError::NOutOfRange(n));
    }
    Ok(MidresetFormulas { q_min: (1 << (n - 2)) + (1 << (n - 3)) + n, depth: n * n })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReuseSchedule {
    pub total_circuits: usize,
    pub max_parallel: usize,
    pub rounds: Vec<usize>,
}

/// How many `n`-qubit preparations fit on `q_physical` qubits when each
/// keeps its `n` data qubits and hands its ancillas back after every round.
pub fn reuse_schedule(q_physical: usize, n: usize) -> ReuseSchedule {
    let width = (1usize << n) - 1;
    let mut free = q_physical;
    let mut rounds = Vec::new();
    while free >= width {
        let k = free / width;
        rounds.push(k);
        free -= k * n;
    }
    ReuseSchedule { total_circuits: rounds.iter().sum(), max_parallel: rounds.first().copied().unwrap_or(0), rounds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dc_values() {
        let t = |n| {
            let f = dc_formulas(n).unwrap();
            (f.qubits, f.cswaps, f.depth, f.depth_parallel)
        };
        assert_eq!(t(3), (7, 4, 4, 4));
        assert_eq!(t(1), (1, 0, 1, 1));
        assert_eq!(t(6), (63, 57, 16, 10));
        assert!(dc_formulas(0).is_err());
    }

    #[test]
    fn hybrid_values() {
        let t = |n, l| {
            let f = hybrid_formulas(n, l).unwrap();
            (f.qubits, f.depth)
        };
        assert_eq!(t(4, 2), (11, 8));
        assert_eq!(t(3, 3), (3, 7));
        assert_eq!(t(6, 3), (31, 19));
        assert_eq!(t(4, 3), (7, 10));
        assert_eq!(hybrid_formulas(3, 4), Err(ResourceError::LambdaOutOfRange { n: 3, lambda: 4 }));
    }

    #[test]
    fn midreset_values() {
        assert_eq!(midreset_formulas(3).unwrap(), MidresetFormulas { q_min: 6, depth: 9 });
        assert_eq!(midreset_formulas(4).unwrap(), MidresetFormulas { q_min: 10, depth: 16 });
        assert!(midreset_formulas(3).unwrap().q_min < dc_formulas(3).unwrap().qubits);
        assert_eq!(midreset_formulas(2), Err(ResourceError::NOutOfRange(2)));
    }

    /// Independent round-by-round replay: launch as many instances as fit,
    /// let each keep `n` qubits, repeat.
    fn greedy_oracle(q: usize, n: usize) -> (usize, usize) {
        let width = (1usize << n) - 1;
        let (mut free, mut total, mut first) = (q, 0, None);
        loop {
            let mut launched = 0;
            let mut pool = free;
            while pool >= width {
                pool -= width;
                launched += 1;
            }
            if launched == 0 {
                break;
            }
            first.get_or_insert(launched);
            total += launched;
            free = pool + launched * (width - n);
        }
        (total, first.unwrap_or(0))
    }

    #[test]
    fn reuse_points() {
        let t = |q| {
            let s = reuse_schedule(q, 3);
            (s.total_circuits, s.max_parallel)
        };
        assert_eq!(t(7), (1, 1));
        assert_eq!(t(8).0, 1);
        assert_eq!(t(10).0, 2);
        assert_eq!(t(14), (3, 2));
        assert_eq!(t(21), greedy_oracle(21, 3));
        assert_eq!(t(21), (5, 3));
    }

    proptest! {
        #[test]
        fn reuse_matches_oracle_and_is_monotone(q in 0usize..200, n in 1usize..=5) {
            let s = reuse_schedule(q, n);
            prop_assert_eq!((s.total_circuits, s.max_parallel), greedy_oracle(q, n));
            prop_assert!(reuse_schedule(q + 1, n).total_circuits >= s.total_circuits);
            let width = (1usize << n) - 1;
            prop_assert!(reuse_schedule(q + width, n).max_parallel > s.max_parallel);
        }

        #[test]
        fn hybrid_endpoints(n in 1usize..=10) {
            let dc = dc_formulas(n).unwrap();
            let h1 = hybrid_formulas(n, 1).unwrap();
            prop_assert_eq!((h1.qubits, h1.depth), (dc.qubits, dc.depth));
            let hn = hybrid_formulas(n, n).unwrap();
            prop_assert_eq!((hn.qubits, hn.depth), (n, (1 << n) - 1));
        }
    }
}
