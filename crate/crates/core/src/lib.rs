pub mod analytic;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod numeric;
pub mod oracle;
pub mod witness;

pub use error::{Error, Result};
