//! Stationary continuous-variable entanglement of a hybrid system made of a
//! mechanical membrane, an optical Fabry–Perot cavity and two microwave
//! circuits.
//!
//! The chain runs from laboratory parameters ([`model`]) through the
//! linearized fluctuation dynamics ([`dynamics`]) to the Gaussian steady
//! state and its logarithmic negativities ([`gaussian`]). [`pipeline`] wires
//! one point end to end and [`sweep`] evaluates whole grids.

pub mod constants;
pub mod dynamics;
pub mod gaussian;
pub mod model;
pub mod pipeline;
pub mod sweep;

pub use dynamics::{
    diffusion_matrix, drift_matrix, stability, DiffusionMatrix, DriftMatrix, StabilityReport,
};
pub use gaussian::{
    integrate_covariance_oracle, log_negativity, reduce_bipartite, solve_lyapunov, BipartiteCm,
    Bipartition, CovarianceMatrix, GaussianError, OracleSettings, Subsystem,
};
pub use model::{
    bare_couplings, bare_detunings, drive_amplitudes, steady_state, thermal_occupation,
    OperatingPoint, ParamError, SystemParams,
};
pub use pipeline::{evaluate_point, Detunings, PointReport};
pub use sweep::{
    preset, run_sweep, run_sweep_with, Axis, Figure, Grid, Parallelism, SpecError, SweepRow,
    SweepSpec,
};
