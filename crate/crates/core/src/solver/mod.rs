//! Stokes projection, the parameter-free preconditioner, PCG with Lanczos
//! condition estimates, and spectral diagnostics.

mod pcg;
mod preconditioner;
mod spectrum;
mod stokes;

pub use pcg::{lanczos_from_cg, pcg_solve, pcg_solve_observed, PcgOptions, SolveReport, StoppingRule};
pub use preconditioner::{apply_preconditioner, Preconditioner, PreconditionerFactors};
pub use spectrum::{
    condition_estimate, dense_preconditioned_spectrum, estimate_condition, lanczos_extremes, measure_inf_sup,
    verify_norm_equivalence, InfSupReport, LanczosEstimate, NormEquivalence, DENSE_LIMIT,
};
pub use stokes::{stokes_project_action, StokesProjector};
