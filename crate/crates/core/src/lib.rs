//! Kicked rotor coupled to an ohmic nondemolition bath.
//!
//! ```text
//! H = p²/2 + K cos q Σ_n δ(t − n) + bath
//! ```
//!
//! The quantum side propagates the reduced density matrix in the momentum
//! basis and tracks the von Neumann entropy S = −Tr ρ ln ρ. The classical side
//! propagates the Husimi distribution with the bath's coarse-graining and
//! tracks S_H = −∫ f ln f dq dp/(2πħ). Both grow as A + B ln n once the bath
//! has randomized the angle.

// `!(x > 0.0)` is the NaN-rejecting form used by the range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bath;
pub mod classical;
pub mod error;
mod linalg;
pub mod params;
pub mod quantum;
pub mod standard_map;

pub use analysis::{
    convergence_metric, energy_slope, fit_growth, predict_a, regress_a_vs_ln_k, EntropySeries,
    FitWindow, GrowthFit, LineFit, Picture,
};
pub use classical::{run_classical, ClassicalRun, PhaseSpaceGrid};
pub use error::{Error, Result};
pub use params::{
    validate, BathParams, NumericsParams, RawConfig, RotorParams, RunParams, ValidatedConfig,
};
pub use quantum::{run_quantum, DensityMatrix, QuantumRun};
