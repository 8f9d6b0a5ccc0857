pub mod cli;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod real;
pub mod report;
pub mod series;
pub mod stirling;

pub use error::{Error, Result};
