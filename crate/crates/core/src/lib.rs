//! Gerstner's trochoidal wave on the equatorial f-plane.
//!
//! The crate evaluates the explicit Lagrangian solution of the rotating
//! free-boundary Euler system (Coriolis terms `±2ωw`, `∓2ωu`), inverts it
//! numerically to obtain Eulerian fields, and certifies with independent
//! finite differences and particle tracing that the closed form satisfies
//! every equation of the system.
//!
//! Module map:
//!
//! - [`params`]: wave constants, particle labels and physical points.
//! - [`fields`]: closed-form flow map, Jacobians, pressure and vorticity.
//! - [`inversion`]: label recovery, free-surface profile and Eulerian fields.
//! - [`verify`]: finite-difference residuals and the grid sweep report.
//! - [`tracer`]: RK4 particle paths and circle fitting.

pub mod error;
pub mod fields;
pub mod inversion;
pub mod params;
pub mod tracer;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{
    dispersion_residual, flow_acceleration, flow_map, flow_velocity, inverse_jacobian, jacobian,
    pressure_lagrangian, vorticity, wave_speed, FlowKinematics, Mat2,
};
pub use inversion::{
    eulerian_pressure, eulerian_state, eulerian_velocity, in_domain, invert_map,
    invert_map_detailed, surface_elevation, InversionSettings, ProfileKind, SurfaceProfile,
};
pub use params::{EulerianPoint, LagrangianLabel, WaveParameters};
pub use tracer::{compare_to_analytic, trace, Trajectory};
pub use verify::{run_full_verification, FdStep, SamplingGrid, Tolerances, VerificationReport};
