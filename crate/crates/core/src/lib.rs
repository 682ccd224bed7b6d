//! Numerical laboratory for two-photon quantum-erasure experiments.
//!
//! The crate models a polarization-entangled photon pair whose object arm
//! may pass a partial polarizer, computes every complementarity quantity
//! (predictability, visibility, distinguishability, the measured and
//! conditioned curves, the entanglement overlap), and reproduces them from
//! seeded Monte Carlo coincidence counts.
//!
//! Everything is generic over the real scalar through [`Scalar`]; the
//! `*64` / `*32` aliases below pin the two concrete instantiations.

mod error;
mod linalg;
mod scalar;
mod state;

pub mod prep;
pub mod quant;
pub mod sim;

pub use error::{QeError, Result};
pub use linalg::{trace_norm_2x2, Amplitude, Mat2, ObjectOperator, ProbeOperator};
pub use scalar::Scalar;
pub use state::{DensityOperator, PureState};

/// Double-precision pure state.
pub type PureState64 = PureState<f64>;
/// Single-precision pure state.
pub type PureState32 = PureState<f32>;
/// Double-precision density operator.
pub type DensityOperator64 = DensityOperator<f64>;
/// Single-precision density operator.
pub type DensityOperator32 = DensityOperator<f32>;
/// Double-precision quantity report.
pub type QuantityReport64 = quant::QuantityReport<f64>;
/// Double-precision sweep output.
pub type SweepSeries64 = sim::SweepSeries<f64>;
