//! Statevector over the wires currently in superposition.
//!
//! Wires join the vector the first time a gate touches them and leave it when
//! measured, after which they are remembered as classical bits. Position `i`
//! in `wires` is bit `wires.len() - 1 - i` of the amplitude index, so the
//! first wire is the most significant.

use num_complex::Complex64 as C64;

pub type Matrix2 = [[C64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct LazyState {
    wires: Vec<usize>,
    amps: Vec<C64>,
    /// Value of each wire while it is outside the vector.
    classical: Vec<u8>,
    position: Vec<Option<usize>>,
}

impl LazyState {
    pub fn new(n_wires: usize) -> Self {
        LazyState {
            wires: Vec::new(),
            amps: vec![C64::new(1.0, 0.0)],
            classical: vec![0; n_wires],
            position: vec![None; n_wires],
        }
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Classical value of `q`, or `None` if it is in superposition.
    pub fn classical_value(&self, q: usize) -> Option<u8> {
        self.position[q].is_none().then_some(self.classical[q])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn bit(&self, q: usize) -> usize {
        let pos = self.position[q].expect("wire in vector");
        self.wires.len() - 1 - pos
    }

    fn ensure(&mut self, q: usize) {
        if self.position[q].is_some() {
            return;
        }
        let v = self.classical[q] as usize;
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len() * 2];
        for (i, a) in self.amps.iter().enumerate() {
            amps[2 * i + v] = *a;
        }
        self.amps = amps;
        self.position[q] = Some(self.wires.len());
        self.wires.push(q);
    }

    pub fn apply_1q(&mut self, q: usize, u: &Matrix2) {
        self.apply_controlled_1q(&[], q, u);
    }

    /// Applies `u` to `target` on the subspace where every control wire reads
    /// its polarity.
    pub fn apply_controlled_1q(&mut self, controls: &[(usize, u8)], target: usize, u: &Matrix2) {
        // A classical control that disagrees turns the gate off entirely.
        let mut quantum = Vec::new();
        for &(q, pol) in controls {
            match self.classical_value(q) {
                Some(v) if v != pol => return,
                Some(_) => {}
                None => quantum.push((q, pol)),
            }
        }
        self.ensure(target);
        let t = 1usize << self.bit(target);
        let (mut cmask, mut cval) = (0usize, 0usize);
        for (q, pol) in quantum {
            let b = 1usize << self.bit(q);
            cmask |= b;
            if pol == 1 {
                cval |= b;
            }
        }
        for i in 0..self.amps.len() {
            if i & t != 0 || i & cmask != cval {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | t]);
            self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[i | t] = u[1][0] * a0 + u[1][1] * a1;
        }
    }

    pub fn cswap(&mut self, control: usize, a: usize, b: usize) {
        if self.classical_value(control) == Some(0) {
            return;
        }
        for q in [control, a, b] {
            self.ensure(q);
        }
        let (c, ba, bb) = (1usize << self.bit(control), 1usize << self.bit(a), 1usize << self.bit(b));
        for i in 0..self.amps.len() {
            if i & c != 0 && i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, i ^ ba ^ bb);
            }
        }
    }

    /// Probability of reading 1 on `q`.
    pub fn prob_one(&self, q: usize) -> f64 {
        match self.classical_value(q) {
            Some(v) => v as f64,
            None => {
                let b = 1usize << self.bit(q);
                let total = self.norm_sqr();
                let one: f64 =
                    self.amps.iter().enumerate().filter(|(i, _)| i & b != 0).map(|(_, a)| a.norm_sqr()).sum();
                one / total
            }
        }
    }

    /// Projects `q` onto `outcome` with probability `p` (as computed by the
    /// caller), renormalizes, and removes the wire from the vector.
    pub fn collapse(&mut self, q: usize, outcome: u8, p: f64) {
        let Some(pos) = self.position[q] else {
            self.classical[q] = outcome;
            return;
        };
        let b = self.wires.len() - 1 - pos;
        let low_mask = (1usize << b) - 1;
        let scale = 1.0 / p.sqrt();
        let half = self.amps.len() / 2;
        let amps: Vec<C64> = (0..half)
            .map(|j| {
                let i = ((j & !low_mask) << 1) | ((outcome as usize) << b) | (j & low_mask);
                self.amps[i] * scale
            })
            .collect();
        self.amps = amps;
        self.wires.remove(pos);
        self.position[q] = None;
        for (k, &w) in self.wires.iter().enumerate().skip(pos) {
            self.position[w] = Some(k);
        }
        self.classical[q] = outcome;
    }

    /// Reduced density matrix of `data` (listed most significant first),
    /// tracing out every other wire in the vector. Classical wires contribute
    /// their fixed value.
    pub fn reduced_density(&self, data: &[usize]) -> Vec<Vec<C64>> {
        let dim = 1usize << data.len();
        let mut fixed = 0usize;
        let mut quantum_bits = Vec::new();
        for (k, &q) in data.iter().enumerate() {
            let out_bit = data.len() - 1 - k;
            match self.classical_value(q) {
                Some(v) => fixed |= (v as usize) << out_bit,
                None => quantum_bits.push((1usize << self.bit(q), 1usize << out_bit)),
            }
        }
        let data_mask: usize = quantum_bits.iter().map(|b| b.0).sum();
        // Group amplitudes by the environment index; rho = sum over groups.
        let mut columns: std::collections::BTreeMap<usize, Vec<C64>> = std::collections::BTreeMap::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let d = quantum_bits.iter().filter(|(src, _)| i & src != 0).fold(fixed, |acc, (_, dst)| acc | dst);
            columns.entry(i & !data_mask).or_insert_with(|| vec![C64::new(0.0, 0.0); dim])[d] += a;
        }
        let mut rho = vec![vec![C64::new(0.0, 0.0); dim]; dim];
        for v in columns.values() {
            let support: Vec<usize> = (0..dim).filter(|&i| v[i].norm_sqr() != 0.0).collect();
            for &i in &support {
                for &j in &support {
                    rho[i][j] += v[i] * v[j].conj();
                }
            }
        }
        rho
    }
}

pub fn roty(theta: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
}

pub fn rotz(phi: f64) -> Matrix2 {
    let z = C64::new(0.0, 0.0);
    [[C64::from_polar(1.0, -phi / 2.0), z], [z, C64::from_polar(1.0, phi / 2.0)]]
}

pub fn pauli_x() -> Matrix2 {
    let (z, o) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    [[z, o], [o, z]]
}

pub fn pauli_z() -> Matrix2 {
    let (z, o) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    [[o, z], [z, -o]]
}

pub fn hadamard() -> Matrix2 {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wires_join_on_first_touch() {
        let mut s = LazyState::new(3);
        s.apply_1q(2, &hadamard());
        s.apply_1q(0, &pauli_x());
        assert_eq!(s.wires(), &[2, 0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // |wire2 wire0> = (|0> + |1>)|1>/sqrt2.
        let want = [0.0, h, 0.0, h];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn collapse_removes_the_wire() {
        let mut s = LazyState::new(2);
        s.apply_1q(0, &hadamard());
        s.apply_1q(1, &roty(1.0));
        let p1 = s.prob_one(0);
        assert!((p1 - 0.5).abs() < 1e-15);
        s.collapse(0, 1, p1);
        assert_eq!(s.wires(), &[1]);
        assert_eq!(s.classical_value(0), Some(1));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn classical_controls_short_circuit() {
        let mut s = LazyState::new(3);
        s.cswap(0, 1, 2);
        assert!(s.wires().is_empty());
        s.apply_1q(0, &pauli_x());
        s.apply_1q(1, &pauli_x());
        s.cswap(0, 1, 2);
        let rho = s.reduced_density(&[1, 2]);
        assert!((rho[1][1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduced_density_of_bell_pair_is_mixed() {
        let mut s = LazyState::new(2);
        s.apply_1q(0, &hadamard());
        s.apply_controlled_1q(&[(0, 1)], 1, &pauli_x());
        let rho = s.reduced_density(&[0]);
        assert!((rho[0][0].re - 0.5).abs() < 1e-15);
        assert!(rho[0][1].norm() < 1e-15);
    }
}
