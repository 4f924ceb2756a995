//! Standard-library companion to `lrsdp-core`: SDPA and Gset readers, JSON
//! result documents, CSV traces and the `lrsdp` command-line tool.

pub mod cli;
pub mod clock;
pub mod error;
pub mod gset;
pub mod output;
pub mod sdpa;

pub use clock::StdClock;
pub use error::{Error, Result};
pub use lrsdp_core as core;
