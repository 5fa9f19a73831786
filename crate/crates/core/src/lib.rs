//! Matrix-valued quantisation of operators on `T^1`, `T^2` and `SU(2)`, with
//! numerical checks of the local Weyl law written in terms of global symbols.

pub mod cli;
pub mod error;
pub mod expr;
pub mod fourier;
pub mod group;
pub mod quantize;
pub mod sum;
pub mod weyl;

pub use error::{Error, Result};
pub use group::{BasisElement, CMatrix, Group, GroupElement, GroupKind, IrrepLabel, QuadratureRule};
