//! Simulation of an oracle-identification game in which probabilistically
//! cloning an intermediate query state beats the best strategy that never
//! clones.
//!
//! Three hidden Boolean functions f0, f1, f2 may each be queried once. The
//! goal is to name the answer pairs containing f0 XOR f1 and f0 XOR f2.
//! The crate builds the recursive function families the game is played on
//! ([`family`]), realizes the query circuits on dense state vectors
//! ([`statevec`]), computes maximal cloning efficiencies from the
//! positive-semidefiniteness achievability condition ([`cloner`]), and
//! plays both strategies either in closed form or by seeded Monte Carlo
//! ([`strategies`]). [`verify`] packages the golden-value checks the CLI
//! and the acceptance tests share.

pub mod bitfunc;
pub mod cloner;
pub mod discriminate;
pub mod error;
pub mod family;
pub mod rational;
pub mod report;
pub mod statevec;
pub mod strategies;
pub mod verify;

pub use bitfunc::BoolFunc;
pub use cloner::CloneSpec;
pub use discriminate::MeasurementBasis;
pub use error::{Error, Result};
pub use family::{FamilyBundle, Variant};
pub use statevec::StateVector;

/// Builds the family at level `n` and the cloner for its candidate query
/// states, tuned to the maximal feasible efficiencies.
pub fn optimal_spec(variant: Variant, n: usize) -> Result<(FamilyBundle, CloneSpec)> {
    let bundle = FamilyBundle::build(variant, n)?;
    let states: Vec<StateVector> = bundle.s_f0().iter().map(StateVector::phase_state).collect();
    let spec = CloneSpec::new(&states)?;
    let gammas = spec.max_efficiencies(None)?;
    let spec = spec.with_gammas(gammas)?;
    Ok((bundle, spec))
}
