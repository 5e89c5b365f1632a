//! Dense state-vector simulator for the QAOA gate set.
//!
//! Basis index `k` is read big-endian: qubit 0 is the most significant bit,
//! so qubit `q` lives at bit position `n - 1 - q`. Rotations follow the
//! `exp(-iθG/2)` convention for `G ∈ {Z, Z⊗Z, X}`.

use num_complex::Complex64;
use rand::Rng;

use crate::qubo::Bitstring;
use crate::{Error, Result};

/// Memory guard on the register width.
pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
    gates_applied: u64,
}

impl StateVector {
    /// Equal superposition over all `2^n` basis states.
    pub fn uniform(n: usize) -> Result<Self> {
        check_width(n)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(StateVector {
            n,
            amps: vec![a; dim],
            gates_applied: 0,
        })
    }

    /// The computational basis state `|z⟩`.
    pub fn basis(z: &Bitstring) -> Result<Self> {
        let n = z.len();
        check_width(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[z.to_index()] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n,
            amps,
            gates_applied: 0,
        })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the caller
    /// is responsible for normalisation.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::arg(format!("amplitude count {dim} is not 2^n, n >= 1")));
        }
        let n = dim.trailing_zeros() as usize;
        check_width(n)?;
        Ok(StateVector {
            n,
            amps,
            gates_applied: 0,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Number of gates applied since construction.
    pub fn gates_applied(&self) -> u64 {
        self.gates_applied
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn bit_mask(&self, q: usize) -> Result<usize> {
        if q >= self.n {
            return Err(Error::arg(format!(
                "qubit {q} out of range for {} qubits",
                self.n
            )));
        }
        Ok(1usize << (self.n - 1 - q))
    }

    /// `RZ(θ)` on qubit `q`: phase `e^{-iθ/2}` when the bit is 0, `e^{+iθ/2}`
    /// when it is 1.
    pub fn apply_rz(&mut self, q: usize, theta: f64) -> Result<()> {
        let mask = self.bit_mask(q)?;
        let minus = Complex64::from_polar(1.0, -theta / 2.0);
        let plus = minus.conj();
        for (k, a) in self.amps.iter_mut().enumerate() {
            *a *= if k & mask == 0 { minus } else { plus };
        }
        self.gates_applied += 1;
        Ok(())
    }

    /// `RZZ(θ)` on qubits `q1, q2`: phase `e^{-iθ/2}` when the two bits agree,
    /// `e^{+iθ/2}` when they differ.
    pub fn apply_rzz(&mut self, q1: usize, q2: usize, theta: f64) -> Result<()> {
        if q1 == q2 {
            return Err(Error::arg(format!("RZZ needs distinct qubits, got {q1} twice")));
        }
        let m1 = self.bit_mask(q1)?;
        let m2 = self.bit_mask(q2)?;
        let same = Complex64::from_polar(1.0, -theta / 2.0);
        let differ = same.conj();
        for (k, a) in self.amps.iter_mut().enumerate() {
            let parity = ((k & m1) != 0) ^ ((k & m2) != 0);
            *a *= if parity { differ } else { same };
        }
        self.gates_applied += 1;
        Ok(())
    }

    /// `RX(θ)` on qubit `q`, mixing each amplitude pair that differs only in
    /// that bit by `[[cos θ/2, -i sin θ/2], [-i sin θ/2, cos θ/2]]`.
    pub fn apply_rx(&mut self, q: usize, theta: f64) -> Result<()> {
        let mask = self.bit_mask(q)?;
        let (s, c) = (theta / 2.0).sin_cos();
        let mis = Complex64::new(0.0, -s);
        // Blocks of 2·mask: the first half has the bit clear, the second set.
        for block in self.amps.chunks_exact_mut(mask << 1) {
            let (lo, hi) = block.split_at_mut(mask);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let x0 = *a0;
                let x1 = *a1;
                *a0 = x0 * c + x1 * mis;
                *a1 = x0 * mis + x1 * c;
            }
        }
        self.gates_applied += 1;
        Ok(())
    }

    /// `Σ_k |amp_k|² · energies[k]`, summed in index order.
    pub fn expectation_diag(&self, energies: &[f64]) -> Result<f64> {
        if energies.len() != self.amps.len() {
            return Err(Error::arg(format!(
                "{} energies for a state of dimension {}",
                energies.len(),
                self.amps.len()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(energies)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum())
    }

    /// Draws `shots` independent measurement outcomes.
    pub fn sample<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Vec<Bitstring> {
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let last_nonzero = self
            .amps
            .iter()
            .rposition(|a| a.norm_sqr() > 0.0)
            .unwrap_or(self.amps.len() - 1);
        (0..shots)
            .map(|_| {
                let u = rng.gen::<f64>() * acc;
                let k = cdf.partition_point(|&c| c <= u).min(last_nonzero);
                Bitstring::from_index(k, self.n)
            })
            .collect()
    }
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::capability(format!(
            "qubit count {n} outside supported range 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}
