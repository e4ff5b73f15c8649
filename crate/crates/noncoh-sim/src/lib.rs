//! Monte Carlo workbench around `noncoh-core`: scheme configuration, a
//! deterministic BER/SER harness with CSV output, simulation-driven design
//! searches, and JSON serialization of codes and constellations for audit.

pub mod audit;
pub mod config;
pub mod harness;
pub mod schemes;
pub mod searches;

pub use config::{AlphabetSpec, BlockCode, ChannelSpec, Decoder, Scheme, SimConfig, StopRule};
pub use harness::{ebn0_to_rho, read_csv, rho_to_ebn0, run_ber, write_csv, ErrorStats};

use std::path::PathBuf;

/// Errors surfaced by the simulation layer. Configuration problems are
/// reported before any simulation work starts; capability guards refuse
/// parameter combinations whose cost would be unbounded.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("capability guard: {0}")]
    Capability(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<noncoh_core::Error> for SimError {
    fn from(e: noncoh_core::Error) -> Self {
        match e {
            noncoh_core::Error::SearchSpaceTooLarge { requested, limit } => SimError::Capability(
                format!("search space of {requested} exceeds limit {limit}"),
            ),
            other => SimError::Config(other.to_string()),
        }
    }
}
