//! Contour dynamics for vortex patches and vortex layers on the periodic
//! strip `S¹ x R`.
//!
//! The crate evaluates the periodic Biot-Savart kernel and its gradient,
//! computes velocities and boundary velocities of patch systems with
//! spectrally accurate quadrature, and integrates patch boundaries in time.
//! The [`io`] module holds the run configuration and output formats used by
//! the `vortex-strip` binary.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod geometry;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod quadrature;
pub mod spectral;

pub use dynamics::{
    cde_rhs, cde_rhs_with, mean_flow_diagnostics, velocity, velocity_gradient, CdeOptions, CdeRhs,
    MeanFlow, Quadrature, VelocityField,
};
pub use error::{Error, Result};
pub use evolution::{
    redistribute, rk4_step, rk4_step_with, run, run_streaming, Breakdown, Diagnostics, FrameRecord,
    RunOutcome, SimConfig,
};
pub use exec::Execution;
pub use geometry::{
    gamma_star, point_in_region, replicate, signed_area, strip_distance, validate_contour,
    vertical_moment, wrap_x1, Contour, PatchSystem, StripPoint,
};
pub use linalg::{Mat2, Vec2};
