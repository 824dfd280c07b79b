//! Picard iteration for the rescaled nonlinear Klein–Gordon equation with
//! first-octant, band-limited data.

pub mod data;
pub mod nonlinearity;
pub mod picard;
pub mod scaling;

pub use data::{concentrating_support, gen_concentrating, gen_gaussian_octant, gen_sokhotski_plemelj, SokhotskiPlemelj};
pub use nonlinearity::{
    apply_nonlinearity, band_limit, dealiased_product, NonlinearityKind, NonlinearitySpec, BAND_TOL,
};
pub use picard::{
    picard_solve, relative_distance, series_norm, IterationRecord, IterationReport, NonlinearScaling, SolverConfig,
    TAIL_LIMIT,
};
pub use scaling::{pde_residual, scale_data, scale_solution, select_lambda, Direction, LambdaChoice};
