//! Self-play reinforcement learning for two-player zero-sum perfect-information games.
//!
//! The engine couples best-first search variants (unbounded best-first minimax,
//! descent, their completed forms, iterative-deepening alpha-beta, and UCT) with
//! a learned state-value function. Searches label the states of their own game
//! trees; the labels become training targets; the improved evaluation guides the
//! next games. No game-specific knowledge beyond the rules is used.
//!
//! Module map:
//! - [`game`]: rules, states, actions, hashing, encodings for the five built-in games
//! - [`eval`]: terminal reward heuristics and the adaptive (learned) evaluation
//! - [`nnet`]: the value network, its optimizer, checkpoints, gradient checking
//! - [`search`]: the search algorithms over a shared transposition table
//! - [`learning`]: action-selection policies, self-play episodes, replay, training loop
//! - [`harness`]: engine-vs-engine matches, tournaments, result curves, checkpoint registry
//! - [`oracle`]: exhaustive minimax reference, independent of the search module
//! - [`verify`]: self-check suites shared by the CLI and the test suite
//!
//! Each major capability has a runnable example under `examples/`; see the README.

pub mod config;
pub mod eval;
pub mod game;
pub mod harness;
pub mod learning;
pub mod nnet;
pub mod oracle;
pub mod search;
pub mod verify;
