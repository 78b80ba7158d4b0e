pub mod error;
pub mod field;
pub mod laws;
pub mod quad;
pub mod samplers;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
