//! Cellular models and exact homology for coloured configuration spaces of
//! the plane and for complements of multiplicity-stratum closures in
//! symmetric products.

pub mod error;
pub mod foxneuwirth;
pub mod homology;
pub mod oracles;
pub mod partitions;
pub mod strata;
pub mod verify;

pub use error::{Error, Result};
pub use partitions::{ColourVector, Partition};
