//! Extension operators, scattering matrices and Eisenstein series for
//! rank-one Schottky groups.

pub mod eisenstein;
pub mod error;
pub mod extension;
pub mod intertwine;
pub mod lie_core;
pub mod numerics;
pub mod poincare;
pub mod quotient;
pub mod scattering;
pub mod schottky;
pub mod special;

pub use error::{Error, Result};
pub use lie_core::{BoundaryPoint, GroupElement, Rank, SpectralParam};
