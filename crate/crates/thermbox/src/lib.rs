//! Thermal simulation of a cubic test box with two independent models:
//!
//! * a lumped one-zone thermal network (air node, combined air/radiant node,
//!   per-wall discrete response factors, aggregated storage branches), and
//! * a 3D transient heat-conduction FEM on a voxel mesh of the same box,
//!   with Robin exterior boundaries and an equivalent-conductivity air core.
//!
//! Both are driven by identical hourly weather converted to per-surface
//! sol-air temperatures, and a comparison harness checks that they produce
//! matching indoor air temperatures for the opaque heavy-weight box.

pub mod compare;
pub mod config;
pub mod fem;
pub mod harness;
pub mod linalg;
pub mod material;
pub mod validate;
pub mod wall;
pub mod weather;
pub mod zone;

/// Air density used for ventilation and zone air capacity, kg/m3.
pub const RHO_AIR: f64 = 1.2;
/// Specific heat of air, J/(kg K).
pub const C_AIR: f64 = 1000.0;
/// Simulation time step, s. Response factors are only valid at this step.
pub const STEP_SECONDS: f64 = 3600.0;
/// Angular frequency of a 24 h cycle, rad/s.
pub const OMEGA_24H: f64 = 2.0 * std::f64::consts::PI / 86_400.0;
/// Angular frequency of a 1 h cycle, rad/s.
pub const OMEGA_1H: f64 = 2.0 * std::f64::consts::PI / 3_600.0;
