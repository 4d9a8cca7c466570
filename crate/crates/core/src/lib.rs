//! Local Fourier analysis of p-multigrid and macro-element h-multigrid for
//! high-order finite element discretizations of second-order PDEs.
//!
//! The crate builds element operators `A_e = Bᵀ D B` for tensor-product
//! Lagrange bases on Gauss-Lobatto nodes, localizes them to Fourier symbols
//! on the infinite uniform grid, and predicts two-grid convergence factors
//! for Jacobi and Chebyshev polynomial smoothers by maximizing the spectral
//! radius of the error-propagation symbol over frequency space. A periodic
//! block-circulant assembly acts as an independent oracle: symbol eigenvalues
//! must reproduce the spectrum of the assembled operator, and measured
//! two-grid convergence must track the predicted factor.

pub mod basis;
pub mod oracle;
pub mod smoother;
pub mod symbol;
pub mod tables;
pub mod transfer;
pub mod twogrid;
pub mod weakform;

pub(crate) mod linalg;
pub(crate) mod util;

pub use basis::{gauss_legendre_rule, gauss_lobatto_points, lagrange_matrices, tensor_basis};
pub use basis::{ElementBasis, QuadratureRule};
pub use oracle::{
    assemble_periodic, assemble_periodic_operator, circulant_eig_check, measured_two_grid_factor,
};
pub use oracle::{MeasuredFactor, PeriodicProblem, MAX_PERIODIC_UNKNOWNS};
pub use smoother::{
    chebyshev_coefficients, chebyshev_error_symbol, estimate_lambda_max, estimate_lambda_max_at,
    jacobi_error_symbol, lambda_max_sample_frequencies, smoother_spectrum_sweep,
    ChebyshevCoefficients, SmootherKind, SmootherSpec,
};
pub use symbol::{
    diagonal_symbol, localization, operator_symbol, symbol_eigenvalues, Localization,
    OperatorSymbol,
};
pub use tables::{run_table, Table, TableId, TableOptions, TableRow};
pub use transfer::{
    h_macro_element, h_transfer, p_transfer, prolongation_symbol, restriction_symbol, TransferPair,
};
pub use twogrid::{
    convergence_factor, default_resolution, frequency_grid, omega_sweep, optimal_omega,
    two_grid_symbol, Coarsening, GridKind, SweepResult, TwoGrid, TwoGridSpec,
    ORIGIN_EXCLUSION_RADIUS,
};
pub use weakform::{
    elasticity_weakform, element_operator, laplacian_weakform, ElasticityModel, ElementOperator,
    WeakForm,
};

/// Errors reported by analysis and oracle routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator diagonal has a zero entry; Jacobi preconditioning undefined")]
    SingularDiagonal,
    #[error("eigenvalue computation failed to converge")]
    EigenFailure,
    #[error("all frequencies excluded by the coarse-symbol singularity cutoff")]
    AllFrequenciesExcluded,
}

pub type Result<T> = std::result::Result<T, Error>;
