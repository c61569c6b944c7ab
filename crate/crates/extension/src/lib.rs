//! The extension problem for required pieces: given a window and a set of
//! pairwise disjoint boxes inside it, must they extend to a minimal
//! partition of the window?
//!
//! In the plane the answer is always yes, by a direct construction
//! ([`extend_2d`]). From dimension 3 on it fails: [`obstruction_instance`]
//! pins three boxes admitting no minimal completion. Two finite oracles
//! probe that impossibility honestly:
//!
//! - [`search_minimal_extension`] exhausts every partition whose
//!   coordinates lie on a fixed grid — a resolution-bounded search, not a
//!   proof over real coordinates, and its report says so;
//! - [`trace_obstruction_chain`] takes any candidate completion and either
//!   exhibits a minimality violation or replays the surface-chain argument
//!   to its terminal contradiction, emitting a typed certificate.

pub mod extend2d;
pub mod instance;
pub mod search;
pub mod trace;

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ExtensionError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("off the grid: {0}")]
    OffGrid(String),
    #[error("invalid candidate: {0}")]
    InvalidCandidate(String),
    #[error("search too large: {0}")]
    TooLarge(String),
    #[error("structure promised by theory is absent: {0}")]
    Falsified(String),
}

pub use extend2d::extend_2d;
pub use instance::{obstruction_instance, random_instance_2d, ExtensionInstance};
pub use search::{project_at_height, search_minimal_extension, SearchOutcome};
pub use trace::{trace_obstruction_chain, ObstructionCertificate, TraceOutcome};
