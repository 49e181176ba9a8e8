//! Pseudo-spectral toolkit for the hydrostatic primitive equations on tori.

// negated comparisons are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod besov;
pub mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod hydrostatic;
pub mod io;
pub mod littlewood_paley;
pub mod pe_solver;
pub mod product;
pub mod rng;
pub mod snapshot;

pub use error::{PeError, Result};
pub use field::{PhysicalField, SpectralField};
pub use grid::{AxisRole, TorusGrid};
