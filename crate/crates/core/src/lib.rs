//! Label semantics over conceptual spaces, concept combination in weighted
//! binary spaces, and a multi-agent language game in which a population of
//! agents converges on shared dimension weights.
//!
//! The crate is organised bottom-up:
//!
//! - [`semantics`]: labels with uncertain thresholds and their appropriateness
//!   measures.
//! - [`combination`]: composite and compound concepts, the weighted Hamming
//!   distance, and an exhaustive binary-space oracle.
//! - [`game`]: the two-dimensional language game, its update rule and the
//!   positive-region analysis for fully reliable speakers.
//! - [`experiment`]: seeded sweeps over reliability values, summaries and CSV
//!   output.
//! - [`verify`]: randomized oracle-equivalence suites shared by the CLI and
//!   the test targets.

pub mod combination;
pub mod error;
pub mod experiment;
pub mod game;
pub mod semantics;
pub mod verify;

pub use error::{Error, Result};
