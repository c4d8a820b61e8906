//! Statistics of output currents of continuously measured Markovian open
//! quantum systems.
//!
//! The library builds Lindblad master-equation models, vectorizes their
//! Liouvillians, and computes everything one can ask about the measurement
//! record of a continuous detector: steady-state currents, two-point
//! correlation functions and power spectra, zero-frequency noise, full
//! counting statistics (distributions, scaled cumulant generating functions,
//! cumulants of any order), waiting-time distributions, and stochastic
//! trajectories in both the jump and diffusive unravellings.  Gaussian
//! phase-space methods cover bosonic and fermionic quadratic models, and an
//! analysis layer provides Fisher-information rates, thermodynamic
//! uncertainty relations, and linear-response checks.
//!
//! Everything is dense linear algebra on small Hilbert spaces (dimension up
//! to a few tens), which is exactly the regime where the spectral
//! decomposition of the Liouvillian and its Drazin pseudo-inverse are cheap
//! and every quantity of interest has a closed linear-algebraic form.

mod error;
pub mod linalg;
pub mod lindblad;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testutil;
