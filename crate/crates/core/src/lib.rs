//! Finite-element solver for nearly-incompressible linear elasticity on the
//! unit square, with a parameter-free preconditioner built from an elasticity
//! solve and a discrete Stokes projection.
//!
//! Every numerical type is generic over [`scalar::Real`]; the `*F64` aliases
//! below fix the scalar to `f64`.

// Index loops mirror the matrix formulas; `!(x > 0)` comparisons reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fem;
pub mod fourier;
pub mod mesh;
pub mod scalar;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use fem::{
    apply_dirichlet, build_space, compute_errors, interpolate, AssembledSystem, Discretization, DofSpace,
    ElasticityProblem, ElementKind, ElementPair, ErrorNorms, ManufacturedProblem, MaterialParameters,
    ReducedSystem,
};
pub use mesh::{build_uniform_mesh, classify_boundary, Mesh};
pub use scalar::Real;
pub use solver::{
    condition_estimate, estimate_condition, pcg_solve, PcgOptions, Preconditioner, PreconditionerFactors,
    SolveReport, StokesProjector,
};
pub use sparse::{CsrMatrix, Factorization};

pub type MeshF64 = Mesh<f64>;
pub type DofSpaceF64 = DofSpace<f64>;
pub type AssembledSystemF64 = AssembledSystem<f64>;
pub type ReducedSystemF64 = ReducedSystem<f64>;
pub type DiscretizationF64 = Discretization<f64>;
pub type CsrMatrixF64 = CsrMatrix<f64>;
pub type SolveReportF64 = SolveReport<f64>;
pub type PreconditionerFactorsF64 = PreconditionerFactors<f64>;
pub type StokesProjectorF64 = StokesProjector<f64>;
