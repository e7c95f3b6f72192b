//! Experiment harness: matches, duels, tournaments, and checkpoint storage.
//!
//! Everything here is deterministic under its seed. Series run their games
//! in parallel, but per-game seeds are derived from the game's index, so
//! results never depend on thread scheduling.

pub mod matches;
pub mod registry;
pub mod tournament;

pub use matches::{duel, play_match, Contender, DuelOutcome, MatchRecord};
pub use registry::{read_checkpoint_file, Registry, RegistryError, SavedCheckpoint};
pub use tournament::{
    ci_half_width, emit_curves, evaluate_marks, round_robin, CellResult, Combination, MatchMode,
    Standing,
};
