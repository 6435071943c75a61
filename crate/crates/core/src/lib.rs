//! Variational phase schedules for Grover-type search.
//!
//! Three simulation backends share one scalar abstraction ([`Real`]):
//!
//! * [`subspace`]: exact 2×2 transfer-matrix evolution in the invariant
//!   subspace, cheap enough for `n` up to 30;
//! * [`statevector`]: full `2ⁿ` amplitudes, used as the reference;
//! * [`noise`]: density matrices of compiled circuits under T₁/T₂ relaxation.
//!
//! [`problems`] and [`optimizer`] search the angle space, [`report`] turns
//! runs into tables.

pub mod circuit;
pub mod error;
pub mod noise;
pub mod optimizer;
pub mod problems;
pub mod report;
pub mod scalar;
pub mod schedule;
pub mod statevector;
pub mod subspace;

pub use error::{Error, Result};
pub use problems::ProblemKind;
pub use scalar::{cis, Real};
pub use schedule::{AngleSchedule, StepAngles};
pub use statevector::SearchInstance;
pub use subspace::SearchSize;

pub type C64 = num_complex::Complex<f64>;
pub type StepAngles64 = StepAngles<f64>;
pub type AngleSchedule64 = AngleSchedule<f64>;
pub type SubspaceState64 = subspace::SubspaceState<f64>;
pub type TransferMatrix64 = subspace::TransferMatrix<f64>;
pub type StateVector64 = statevector::StateVector<f64>;
pub type Bounds64 = problems::Bounds<f64>;
pub type OptimizationResult64 = optimizer::OptimizationResult<f64>;
pub type Circuit64 = circuit::Circuit<f64>;
pub type NoiseModel64 = noise::NoiseModel<f64>;
pub type DensityMatrix64 = noise::DensityMatrix<f64>;
