pub mod error;
pub mod enumerate;
pub mod blowup;
pub mod chart;
pub mod contraction;
pub mod fixtures;
pub mod io;
pub mod level;
pub mod monomial;
pub mod suite;
pub mod tree;
pub mod verdict;

pub use error::{Error, Result};
