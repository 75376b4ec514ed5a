//! Projective measurement in a supplied orthonormal set of states.
//!
//! The protocol only ever needs to tell exactly orthogonal states apart,
//! so unambiguous discrimination reduces to a Born-rule measurement in
//! the basis the states span. One generic mechanism covers both readouts:
//! identifying a phase state among the s2 representatives and among the
//! s1 candidates.

use rand::Rng;

use crate::bitfunc::BoolFunc;
use crate::error::{Error, Result};
use crate::statevec::StateVector;

/// Pairwise overlaps above this fail basis construction.
pub const ORTHO_TOL: f64 = 1e-10;

/// Measured states must have at least 1 − 1e−9 of their weight inside the
/// span of the basis.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// A list of mutually orthonormal states. Measurement outcomes are the
/// indices of the vectors; callers attach meaning (the s2 basis index i
/// labels the answer pair containing s2[i]).
#[derive(Clone, Debug)]
pub struct MeasurementBasis {
    n: usize,
    vectors: Vec<StateVector>,
}

impl MeasurementBasis {
    /// Builds the basis of phase states of `reps`. Orthogonality of phase
    /// states is equivalent to the tables disagreeing on exactly half of
    /// all inputs, so the check runs on truth tables (exact), not floats.
    pub fn from_functions(reps: &[BoolFunc]) -> Result<Self> {
        let states: Vec<StateVector> = reps.iter().map(StateVector::phase_state).collect();
        let n = check_same_n(&states)?;
        let half = 1usize << (n - 1);
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                let ham = reps[i].hamming(&reps[j])?;
                if ham != half {
                    let overlap = 1.0 - ham as f64 / half as f64;
                    return Err(Error::NotOrthogonal { i, j, overlap: overlap.abs() });
                }
            }
        }
        Ok(Self { n, vectors: states })
    }

    /// Builds a basis from arbitrary states, checking pairwise overlaps
    /// against [`ORTHO_TOL`].
    pub fn from_states(vectors: Vec<StateVector>) -> Result<Self> {
        let n = check_same_n(&vectors)?;
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                let overlap = vectors[i].inner(&vectors[j])?.norm();
                if overlap > ORTHO_TOL {
                    return Err(Error::NotOrthogonal { i, j, overlap });
                }
            }
        }
        Ok(Self { n, vectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    /// Born probabilities |⟨v_i|ψ⟩|², checked to sum to 1 within
    /// [`COMPLETENESS_TOL`].
    pub fn probabilities(&self, psi: &StateVector) -> Result<Vec<f64>> {
        if psi.n() != self.n {
            return Err(Error::NMismatch { left: psi.n(), right: self.n });
        }
        let probs: Vec<f64> = self
            .vectors
            .iter()
            .map(|v| v.inner(psi).map(|c| c.norm_sqr()))
            .collect::<Result<_>>()?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > COMPLETENESS_TOL {
            return Err(Error::OutsideBasis { total });
        }
        Ok(probs)
    }

    /// Samples one outcome index from the Born distribution.
    pub fn measure<R: Rng + ?Sized>(&self, psi: &StateVector, rng: &mut R) -> Result<usize> {
        let probs = self.probabilities(psi)?;
        let total: f64 = probs.iter().sum();
        let mut u = rng.random::<f64>() * total;
        for (i, p) in probs.iter().enumerate() {
            u -= p;
            if u <= 0.0 {
                return Ok(i);
            }
        }
        // Rounding pushed u past every bucket; the tail owns the residue.
        Ok(probs.len() - 1)
    }
}

fn check_same_n(states: &[StateVector]) -> Result<usize> {
    let first = states.first().ok_or_else(|| Error::BadConfig("empty basis".into()))?;
    for s in states {
        if s.n() != first.n() {
            return Err(Error::NMismatch { left: first.n(), right: s.n() });
        }
    }
    Ok(first.n())
}
