//! Random test inputs: target vectors and orthogonal state pairs.

use num_complex::Complex64 as C64;
use rand::seq::index::sample;
use rand::Rng;

use crate::walgate::{inner, OrthPair};

/// Uniform non-negative amplitudes on `n` qubits, normalized.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(0.01..1.0)).collect();
    normalize(v)
}

/// Non-negative vector with exactly `d` nonzero entries at random positions.
pub fn random_sparse_state<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Vec<f64> {
    let mut v = vec![0.0; 1 << n];
    for i in sample(rng, 1 << n, d) {
        v[i] = rng.gen_range(0.05..1.0);
    }
    normalize(v)
}

pub fn random_complex_state<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..1usize << m).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / n).collect()
}

fn random_vector<R: Rng + ?Sized>(rng: &mut R, m: usize, complex: bool) -> Vec<C64> {
    (0..1usize << m)
        .map(|_| {
            let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
            C64::new(rng.gen_range(-1.0..1.0), im)
        })
        .collect()
}

/// Two orthogonal unit states on `m` qubits, by Gram-Schmidt on random
/// vectors. With `complex = false` both states are real.
pub fn random_orth_pair<R: Rng + ?Sized>(rng: &mut R, m: usize, complex: bool) -> OrthPair {
    let a = random_vector(rng, m, complex);
    let b = random_vector(rng, m, complex);
    let na = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let a: Vec<C64> = a.into_iter().map(|c| c / na).collect();
    let proj = inner(&a, &b);
    let b: Vec<C64> = b.iter().zip(&a).map(|(y, x)| y - proj * x).collect();
    let nb = b.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let b: Vec<C64> = b.into_iter().map(|c| c / nb).collect();
    OrthPair::new(a, b).expect("Gram-Schmidt output is orthogonal")
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}
