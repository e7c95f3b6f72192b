//! Self-play reinforcement learning.
//!
//! [`episode`] plays one self-play game and harvests its training pairs
//! under a data mode; [`policy`] turns searched child values into exploring
//! move choices; [`replay`] is the bounded FIFO training memory; [`train`]
//! ties them into the sequential training loop that alternates self-play
//! and evaluation updates.

pub mod episode;
pub mod policy;
pub mod replay;
pub mod train;

pub use episode::{augment, dedup_keep_last, run_episode, DataMode, Episode, EpisodeConfig};
pub use policy::{
    select_epsilon_greedy, select_ordinal, select_softmax, RootChoices, SelectionPolicy,
};
pub use replay::{Capacity, Pair, ReplayBuffer};
pub use train::{
    train_loop, write_training_log, EpisodeStats, TrainError, TrainHooks, TrainReport,
    TrainSettings,
};
