pub mod cli;
pub mod error;
pub mod hardy;
pub mod means;
pub mod mixed;
pub mod report;
pub mod scalar;
pub mod search;
pub mod symmetric;

pub use error::{Error, Result};
pub use scalar::Scalar;
