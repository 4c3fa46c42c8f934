//! Command-line front end and on-disk formats for the K3 linear-system
//! toolkit: single computations, certificate generation and verification,
//! oracle runs, batch sweeps, and machine-readable output.

pub mod certificate;
pub mod cli;
pub mod model_file;
pub mod shorthand;
pub mod sweep;

pub use cli::{run, Cli};

/// Usage errors exit with status 1; computation errors with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "usage error: {}", self.0)
    }
}

impl std::error::Error for UsageError {}
