//! Littlewood–Paley machinery on the periodic lattice for spaces with
//! exponential frequency weights `2^{s|ξ|}`, linear Klein–Gordon propagators,
//! and a Picard solver for first-octant data.

pub mod error;
pub mod lattice;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub mod fit;
pub mod littlewood_paley;
pub mod spaces;
pub mod propagator;
pub mod solver;
pub mod verify;
