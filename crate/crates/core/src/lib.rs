//! Weighted sequential pattern mining over uncertain sequence databases,
//! with incremental maintenance as the database grows.

pub mod cli;
pub mod dataio;
pub mod encode;
pub mod error;
pub mod fuws;
pub mod incremental;
pub mod model;
pub mod oracle;
pub mod synth;
pub mod trie;

pub use error::{Error, Result};
pub use model::{
    extend, meets, s_weight, Event, ItemId, Kind, MiningParams, Pattern, ProbItem, ScoredPattern,
    Thresholds, USequence, UncertainDatabase, WeightTable, TOLERANCE,
};
pub use trie::USeqTrie;
