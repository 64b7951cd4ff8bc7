//! Qudit Clifford groups, universality certification and composite-dimension
//! resources.

pub mod adjointrep;
pub mod arith;
pub mod certgeom;
pub mod closure;
pub mod composite;
pub mod diagonalgates;
pub mod error;
pub mod matrix;
pub mod paulicliff;

pub use error::{Error, Result};
pub use matrix::{CMatrix, UnitaryMatrix, C64};
