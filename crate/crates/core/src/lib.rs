//! Enumerated finite groups and the central-extension kernel constructions
//! built on them.

pub mod abelian;
pub mod engine;
mod error;
pub mod lab;
mod limits;

pub use error::{Error, Result};
pub use limits::Limits;
