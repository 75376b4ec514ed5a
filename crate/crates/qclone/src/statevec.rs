//! Dense n-qubit state vectors and the phase-kickback circuit primitives.
//!
//! The oracle for a function f maps |x⟩|y⟩ to |x⟩|y XOR f(x)⟩; with the
//! target qubit prepared in |−⟩ it acts on the input register alone as the
//! sign flip |x⟩ → (−1)^{f(x)}|x⟩, which is everything the protocol needs.
//! Querying f on the uniform superposition therefore yields the phase
//! state 2^{−n/2} Σ_x (−1)^{f(x)}|x⟩.

use num_complex::Complex64;

use crate::bitfunc::BoolFunc;
use crate::error::{Error, Result};

/// Complex amplitude vector of length 2^n. All constructors and operations
/// return unit-norm states (tolerance 1e-12); amplitudes of phase states
/// happen to be real, but storage stays complex for generality.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadConfig(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        Ok(Self { n: len.trailing_zeros() as usize, amps })
    }

    /// The computational basis state |x⟩.
    pub fn basis(n: usize, x: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidN { n, min: 1, max: usize::MAX });
        }
        let dim = 1usize << n;
        if x >= dim {
            return Err(Error::BadConfig(format!("basis index {x} out of range for n={n}")));
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[x] = Complex64::ONE;
        Ok(Self { n, amps })
    }

    /// The uniform superposition, i.e. H^{⊗n}|0…0⟩.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidN { n, min: 1, max: usize::MAX });
        }
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self { n, amps: vec![a; dim] })
    }

    /// The phase state of `f`: amplitude (−1)^{f(x)} · 2^{−n/2} at |x⟩.
    pub fn phase_state(f: &BoolFunc) -> Self {
        let dim = f.size();
        let a = (dim as f64).sqrt().recip();
        let amps = (0..dim)
            .map(|x| Complex64::new(if f.eval(x) { -a } else { a }, 0.0))
            .collect();
        Self { n: f.n(), amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// One oracle query in phase-kickback form: flips the sign of every
    /// amplitude where f(x) = 1. Applying f to phase_state(g) gives
    /// phase_state(f XOR g) with no extra global phase.
    pub fn apply_phase_oracle(&self, f: &BoolFunc) -> Result<Self> {
        if f.n() != self.n {
            return Err(Error::NMismatch { left: f.n(), right: self.n });
        }
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(x, a)| if f.eval(x) { -a } else { *a })
            .collect();
        Ok(Self { n: self.n, amps })
    }

    /// Applies H^{⊗n} (the in-place butterfly, then 2^{−n/2}); self-inverse.
    pub fn walsh_hadamard(&self) -> Self {
        let mut amps = self.amps.clone();
        let dim = amps.len();
        let mut half = 1;
        while half < dim {
            for block in (0..dim).step_by(2 * half) {
                for i in block..block + half {
                    let (u, v) = (amps[i], amps[i + half]);
                    amps[i] = u + v;
                    amps[i + half] = u - v;
                }
            }
            half *= 2;
        }
        let scale = (dim as f64).sqrt().recip();
        for a in &mut amps {
            *a *= scale;
        }
        Self { n: self.n, amps }
    }

    /// The Hermitian inner product ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::NMismatch { left: self.n, right: other.n });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The state multiplied by a scalar (used for ±1 gauge flips).
    pub fn scaled(&self, c: Complex64) -> Self {
        let amps = self.amps.iter().map(|a| a * c).collect();
        Self { n: self.n, amps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn f(s: &str) -> BoolFunc {
        s.parse().unwrap()
    }

    #[test]
    fn phase_state_signs() {
        let psi = StateVector::phase_state(&f("01000000"));
        let a = 8f64.sqrt().recip();
        assert_abs_diff_eq!(psi.amplitudes()[0].re, a, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitudes()[1].re, -a, epsilon = 1e-15);
        for x in 2..8 {
            assert_abs_diff_eq!(psi.amplitudes()[x].re, a, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
        assert_eq!(StateVector::phase_state(&f("00000000")), StateVector::uniform(3).unwrap());
    }

    #[test]
    fn oracle_on_uniform_is_phase_state() {
        for s in ["01000000", "11000011", "0110"] {
            let h = f(s);
            let psi = StateVector::uniform(h.n()).unwrap().apply_phase_oracle(&h).unwrap();
            assert_eq!(psi, StateVector::phase_state(&h));
        }
    }

    #[test]
    fn oracle_composes_as_xor() {
        let f0 = f("01010101");
        let f1 = f("10110000");
        let lhs = StateVector::phase_state(&f0).apply_phase_oracle(&f1).unwrap();
        let rhs = StateVector::phase_state(&f0.xor(&f1).unwrap());
        assert_eq!(lhs, rhs);
        let twice = lhs.apply_phase_oracle(&f1).unwrap();
        assert_eq!(twice, StateVector::phase_state(&f0));
        assert!(lhs.apply_phase_oracle(&f("01")).is_err());
    }

    #[test]
    fn inner_matches_hamming_law() {
        let pairs = [("01000000", "01010101", 0.25), ("01010101", "11000011", 0.0)];
        for (a, b, want) in pairs {
            let (a, b) = (f(a), f(b));
            let got = StateVector::phase_state(&a).inner(&StateVector::phase_state(&b)).unwrap();
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-12);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-15);
            let law = 1.0 - 2.0 * a.hamming(&b).unwrap() as f64 / a.size() as f64;
            assert_abs_diff_eq!(got.re, law, epsilon = 1e-12);
        }
    }

    #[test]
    fn walsh_hadamard_basics() {
        let uniform = StateVector::uniform(3).unwrap();
        assert_eq!(
            StateVector::basis(3, 0).unwrap().walsh_hadamard(),
            uniform.clone()
        );
        let back = uniform.walsh_hadamard();
        assert_abs_diff_eq!(back.amplitudes()[0].re, 1.0, epsilon = 1e-12);
        for x in 1..8 {
            assert_abs_diff_eq!(back.amplitudes()[x].norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn walsh_hadamard_maps_parity_to_ones() {
        let n = 3;
        let parity = BoolFunc::from_fn(n, |k| k.count_ones() % 2 == 1).unwrap();
        let psi = StateVector::phase_state(&parity).walsh_hadamard();
        assert_abs_diff_eq!(psi.amplitudes()[(1 << n) - 1].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn complement_is_global_sign() {
        let h = f("01101001");
        let plus = StateVector::phase_state(&h);
        let minus = StateVector::phase_state(&h.complement());
        assert_eq!(minus, plus.scaled(Complex64::new(-1.0, 0.0)));
        let overlap = plus.inner(&minus).unwrap();
        assert_abs_diff_eq!(overlap.re, -1.0, epsilon = 1e-12);
    }
}
