//! Exponential sums of multiplicative functions: sieves, characters, exact
//! phase arithmetic, compensated summation, and the pretentious toolkit.

pub mod acceptance;
pub mod arith;
pub mod characters;
pub mod complexsum;
pub mod error;
pub mod expsum;
pub mod multfun;
pub mod oracles;
pub mod par;
pub mod pretentious;

pub use error::{Error, ErrorKind, Result};
