//! Combine-and-conquer: `lambda`-qubit subtrees are time-encoded, and the
//! levels above them are merged as in divide-and-conquer.

use super::dc::Engine;
use super::{synthesize_time, Compiled, DcOptions, SynthError};
use crate::circuit::Circuit;
use crate::tree::AmplitudeTree;

pub fn compile_hybrid(tree: &AmplitudeTree, lambda: usize, opts: DcOptions) -> Result<Compiled, SynthError> {
    let n = tree.n_qubits();
    if lambda == 0 || lambda > n {
        return Err(SynthError::LambdaOutOfRange { lambda, n });
    }
    if opts.parallelize {
        return Err(SynthError::IncompatibleOptions("hybrid synthesis does not support swap parallelization"));
    }
    if lambda == n {
        return Ok(Compiled { circuit: synthesize_time(tree), stages: Vec::new() });
    }
    Engine::new(tree, lambda, opts).run()
}

pub fn synthesize_hybrid(tree: &AmplitudeTree, lambda: usize, opts: DcOptions) -> Result<Circuit, SynthError> {
    compile_hybrid(tree, lambda, opts).map(|c| c.circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::metrics;
    use crate::random::random_state;
    use crate::synth::synthesize_dc;
    use crate::tree::build_tree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tree(n: usize) -> AmplitudeTree {
        build_tree(&random_state(&mut ChaCha8Rng::seed_from_u64(11), n)).unwrap()
    }

    #[test]
    fn n4_lambda2() {
        let m = metrics(&synthesize_hybrid(&tree(4), 2, DcOptions::default()).unwrap()).unwrap();
        assert_eq!((m.qubits, m.depth_gates), (11, 8));
    }

    #[test]
    fn n4_lambda3() {
        let m = metrics(&synthesize_hybrid(&tree(4), 3, DcOptions::default()).unwrap()).unwrap();
        assert_eq!((m.qubits, m.depth_gates), (7, 10));
    }

    #[test]
    fn endpoints() {
        let t = tree(4);
        let opts = DcOptions::default();
        assert_eq!(synthesize_hybrid(&t, 4, opts).unwrap(), synthesize_time(&t));
        assert_eq!(synthesize_hybrid(&t, 1, opts).unwrap(), synthesize_dc(&t, opts).unwrap());
    }

    #[test]
    fn lambda_range_is_checked() {
        let t = tree(3);
        assert_eq!(
            synthesize_hybrid(&t, 0, DcOptions::default()),
            Err(SynthError::LambdaOutOfRange { lambda: 0, n: 3 })
        );
        assert!(synthesize_hybrid(&t, 4, DcOptions::default()).is_err());
        let par = DcOptions { parallelize: true, ..Default::default() };
        assert!(matches!(synthesize_hybrid(&t, 2, par), Err(SynthError::IncompatibleOptions(_))));
    }
}
