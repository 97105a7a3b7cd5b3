//! Symbolic and numeric tools for the meta-abelian reduction of the elliptic
//! KZB associator.

pub mod assoc;
pub mod error;
pub mod kzbmetab;
pub mod metab;
pub mod modular;
pub mod ncseries;
pub mod numeric;
pub mod periods;
pub mod quad;
pub mod symring;
pub mod verify;

pub use error::{Error, Result};
pub use metab::{BiPoly, MetabElem};
pub use ncseries::{NcSeries, NcWord};
pub use symring::{EichlerIndex, NumContext, Rational, SymCoeff, SymMonomial};
