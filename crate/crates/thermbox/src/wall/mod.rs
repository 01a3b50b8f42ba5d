//! Frequency-domain wall characterization and the two discrete surrogates
//! used by the zone network: per-part cross-transmission response factors
//! and the aggregated two-branch storage network.

mod branch;
mod response;
mod transfer;

pub use branch::{fit_branch_network, Branch, BranchNetwork};
pub use response::{
    cross_flow_step, discrete_phase, fit_response_factors, CrossFlowState, ResponseFactors,
};
pub use transfer::{
    admittances, admittances_from_matrix, layer_matrix, part_matrix, wall_matrix, AdmittanceTriple,
    TransferMatrix,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WallError {
    #[error("degenerate wall spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("unstable response-factor poles: moduli {0:.6} and {1:.6} (must be < 1)")]
    UnstablePoles(f64, f64),
    #[error("branch target phase {phase_deg:.2} deg outside [0, 90]: storage admittance phase cannot exceed 90 deg")]
    PhaseOutOfRange { phase_deg: f64 },
    #[error("branch fit did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
}
