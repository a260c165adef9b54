//! Quantum systems driven by almost-periodic classical flows.
//!
//! The crate simulates a quantum system whose control parameters are
//! carried around a 2-torus by a discrete measure-preserving flow (the
//! Chirikov standard map, explicit cycles, or a frozen control). Around the
//! Poincaré recurrences of the flow it constructs effective Hamiltonians,
//! by taking the p-th root of the monodromy over one almost-period, by
//! spectral filtering of the dense Koopman block matrix, or through
//! Baker-Campbell-Hausdorff expansions in the low- and high-frequency
//! regimes, and validates them against exact step-by-step propagation via
//! stroboscopic fidelities, survival probabilities and ensemble evolution.
//!
//! Start from the runnable examples (one per capability) or from the
//! `quasifloquet` binary, which reproduces the standard kicked-spin
//! experiment tables as CSV.

pub mod effham;
pub mod error;
pub mod flows;
pub mod observables;
pub mod quantum;
pub mod runner;

pub use error::{Error, Result};

/// Shared float formatting for the CSV interfaces (15 significant digits,
/// scientific notation, locale-independent).
pub(crate) mod fmt {
    pub fn float(x: f64) -> String {
        format!("{x:.14e}")
    }
}
