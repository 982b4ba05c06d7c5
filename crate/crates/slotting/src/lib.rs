//! File formats, command-line front end and benchmark harness for the
//! warehouse slotting QUBO toolkit in [`slotting_core`].

pub mod batch;
pub mod bench;
pub mod cli;
pub mod clock;
mod error;
pub mod instance_file;
pub mod qubo_file;

pub use error::{Error, Result};
