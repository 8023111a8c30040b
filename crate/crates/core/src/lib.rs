//! Trace codes over `Fq + uFq` with defining sets built from simplicial complexes:
//! construction, exact Lee weight enumeration, predicted weight tables,
//! Griesmer-bound checks and exact character-sum oracles.

pub mod charsums;
pub mod cli;
pub mod error;
pub mod gf;
pub mod optimality;
pub mod ringcode;
pub mod simplicial;
pub mod spectra;

pub use error::{Error, Result};
