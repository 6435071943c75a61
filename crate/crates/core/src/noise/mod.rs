//! T₁/T₂ relaxation and density-matrix simulation of compiled circuits.

mod density;
mod kraus;
mod sweep;

pub use density::{simulate_noisy, simulate_noisy_observed, DensityMatrix, MAX_DENSITY_QUBITS};
pub use kraus::{
    completeness_error, kraus_relaxation, relaxation_params, NoiseModel, Op2, RelaxationParams,
};
pub use sweep::{exceeds_threshold, log_space, t1t2_sweep, SweepGrid, SweepResult, SweepRow};
