pub mod casimir_polder;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod geometry;
pub mod mode_sum;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
