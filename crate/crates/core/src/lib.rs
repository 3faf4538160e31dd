pub mod combinatorics;
pub mod error;
pub mod modp;
pub mod operators;
pub mod oracle;
pub mod par;
pub mod report;
pub mod ring;
pub mod skewforms;
pub mod solution;

pub use error::{Error, Result};
