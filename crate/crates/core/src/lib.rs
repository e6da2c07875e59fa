pub mod analysis;
pub mod arith;
pub mod cli;
pub mod composition;
pub mod error;
pub mod generate;
pub mod io;
pub mod lp;
pub mod principles;
pub mod report;
pub mod selftest;
pub mod system;
pub mod theory;

pub use arith::{int, parse_rational, rat, RMatrix, RVector, Rational};
pub use error::{Error, Result};
