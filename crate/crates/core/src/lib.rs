pub mod bessel;
pub mod cli;
pub mod error;
pub mod kl;
pub mod polys;
pub mod quadrature;
pub mod report;
pub mod suites;
pub mod yor;

pub use error::{Error, Result};
