//! The training loop: self-play, experience replay, evaluation updates.
//!
//! Each round plays one self-play episode, augments its data by the game's
//! symmetries, pushes it into the replay memory, and trains the adaptive
//! evaluation on a fresh sample of that memory. The loop is strictly
//! sequential and single-writer, so a fixed seed reproduces the exact same
//! checkpoints.

use std::fmt;
use std::io;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eval::AdaptiveEval;
use crate::eval::TerminalEval;
use crate::game::{Gain, Game};
use crate::nnet::TrainConfig;

use super::episode::{augment, dedup_keep_last, run_episode, EpisodeConfig};
use super::replay::{Capacity, Pair, ReplayBuffer};

/// Everything the training loop needs beyond the episode recipe.
#[derive(Clone, Debug)]
pub struct TrainSettings {
    /// Self-play games to run.
    pub episodes: u64,
    /// Replay memory bound.
    pub replay: Capacity,
    /// Fraction of the replay capacity trained on per episode.
    pub sigma: f64,
    /// Optimizer settings for network-backed evaluations.
    pub train: TrainConfig,
    /// Emit a checkpoint every this many episodes; 0 disables the periodic
    /// ones. The initial and final evaluations are always checkpointed.
    pub checkpoint_every: u64,
    /// Whether to multiply episode data by the game's symmetries.
    pub augment: bool,
    /// Master seed for exploration and replay sampling.
    pub seed: u64,
    /// Anneal exploration by wall-clock time against this budget instead
    /// of by episodes completed.
    pub wall_clock: Option<Duration>,
}

impl Default for TrainSettings {
    fn default() -> TrainSettings {
        TrainSettings {
            episodes: 1000,
            replay: Capacity::Games(100),
            sigma: 1.0,
            train: TrainConfig::default(),
            checkpoint_every: 100,
            augment: true,
            seed: 0,
            wall_clock: None,
        }
    }
}

/// One row of the training log.
#[derive(Clone, Debug)]
pub struct EpisodeStats {
    /// Episode number, starting at 1.
    pub episode: u64,
    /// Annealing progress handed to the selection policy.
    pub progress: f64,
    /// Moves the game lasted.
    pub plies: u32,
    /// Pairs harvested from the episode, after augmentation.
    pub harvested: usize,
    /// Pairs in the update's training sample.
    pub trained: usize,
    /// Mean squared error of the sample before the update.
    pub loss: f64,
    /// Game result, absent for aborted episodes.
    pub gain: Option<Gain>,
    pub aborted: bool,
    /// Replay memory size after insertion, in pairs.
    pub buffer: usize,
}

/// Why training stopped early.
#[derive(Debug)]
pub enum TrainError {
    /// The loss left the reals. The previous checkpoint is still good; no
    /// checkpoint is written for the poisoned state.
    NonFinite { episode: u64, loss: f64 },
    /// The adaptive evaluation has no trainable backing.
    Untrainable,
    /// A checkpoint hook failed.
    Checkpoint(String),
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::NonFinite { episode, loss } => {
                write!(f, "training diverged at episode {episode} (loss {loss})")
            }
            TrainError::Untrainable => write!(f, "the noise evaluation cannot learn"),
            TrainError::Checkpoint(e) => write!(f, "checkpoint failed: {e}"),
        }
    }
}

impl std::error::Error for TrainError {}

/// What a finished training run reports.
#[derive(Clone, Debug)]
pub struct TrainReport {
    pub episodes_run: u64,
    pub aborted_episodes: u64,
    pub stats: Vec<EpisodeStats>,
}

/// Write the run's log rows as CSV. The formatting is fixed so identical
/// runs produce identical bytes.
pub fn write_training_log(
    report: &TrainReport,
    out: &mut dyn io::Write,
) -> io::Result<()> {
    writeln!(out, "episode,progress,plies,harvested,trained,loss,gain,aborted,buffer")?;
    for row in &report.stats {
        writeln!(
            out,
            "{},{:.6},{},{},{},{:.6},{},{},{}",
            row.episode,
            row.progress,
            row.plies,
            row.harvested,
            row.trained,
            row.loss,
            row.gain.map(|g| g.to_string()).unwrap_or_default(),
            u8::from(row.aborted),
            row.buffer
        )?;
    }
    Ok(())
}

/// Observers for the loop: a log-row consumer and a checkpoint writer.
#[derive(Default)]
pub struct TrainHooks<'a> {
    pub on_episode: Option<Box<dyn FnMut(&EpisodeStats) + 'a>>,
    pub on_checkpoint: Option<Box<dyn FnMut(u64, &AdaptiveEval) -> Result<(), String> + 'a>>,
}

impl TrainHooks<'_> {
    pub fn none() -> TrainHooks<'static> {
        TrainHooks::default()
    }
}

/// Run self-play training to the episode budget.
///
/// Checkpoints go out at episode 0 (the untouched evaluation), every
/// `checkpoint_every` episodes, and after the final episode. A 0-episode
/// budget therefore emits exactly the initial checkpoint and stops.
pub fn train_loop(
    game: &dyn Game,
    adaptive: &mut AdaptiveEval,
    terminal: &TerminalEval,
    episode_cfg: &EpisodeConfig,
    settings: &TrainSettings,
    hooks: &mut TrainHooks,
) -> Result<TrainReport, TrainError> {
    if matches!(adaptive, AdaptiveEval::Noise { .. }) {
        return Err(TrainError::Untrainable);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut buffer = ReplayBuffer::new(settings.replay, settings.sigma);
    let start = Instant::now();
    let mut report = TrainReport { episodes_run: 0, aborted_episodes: 0, stats: Vec::new() };

    checkpoint(hooks, 0, adaptive)?;
    for t in 1..=settings.episodes {
        let progress = match settings.wall_clock {
            Some(budget) => {
                (start.elapsed().as_secs_f64() / budget.as_secs_f64()).clamp(0.0, 1.0)
            }
            None => (t - 1) as f64 / settings.episodes as f64,
        };
        let ep = run_episode(game, adaptive, terminal, episode_cfg, progress, &mut rng, None);
        let mut data = ep.pairs;
        if settings.augment {
            data = dedup_keep_last(augment(game, data));
        }
        let harvested = data.len();
        buffer.push(data);
        let sample = buffer.sample(&mut rng);
        let trained = sample.len();
        let loss = train_once(game, adaptive, &sample, &settings.train);
        if !loss.is_finite() {
            return Err(TrainError::NonFinite { episode: t, loss });
        }

        report.episodes_run = t;
        if ep.aborted {
            report.aborted_episodes += 1;
        }
        let stats = EpisodeStats {
            episode: t,
            progress,
            plies: ep.actions.len() as u32,
            harvested,
            trained,
            loss,
            gain: ep.gain,
            aborted: ep.aborted,
            buffer: buffer.len_pairs(),
        };
        if let Some(h) = hooks.on_episode.as_mut() {
            h(&stats);
        }
        report.stats.push(stats);

        let periodic = settings.checkpoint_every > 0 && t % settings.checkpoint_every == 0;
        if periodic && t != settings.episodes {
            checkpoint(hooks, t, adaptive)?;
        }
    }
    if settings.episodes > 0 {
        checkpoint(hooks, settings.episodes, adaptive)?;
    }
    Ok(report)
}

/// One update on a sample: direct assignment for the table backing, one
/// optimizer pass for the network. Returns the sample's mean squared error
/// before the update.
fn train_once(
    game: &dyn Game,
    adaptive: &mut AdaptiveEval,
    sample: &[Pair],
    cfg: &TrainConfig,
) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    match adaptive {
        AdaptiveEval::Table(table) => {
            let mut err = 0.0;
            for (s, v) in sample {
                let old = table.get(s.key());
                err += (old - v) * (old - v);
                table.assign(s.key(), *v);
            }
            err / sample.len() as f64
        }
        AdaptiveEval::Network(net) => {
            let mut planes = Vec::with_capacity(sample.len() * net.input_len());
            let mut targets = Vec::with_capacity(sample.len());
            for (s, v) in sample {
                game.encode_planes(s, &mut planes);
                targets.push(*v as f32);
            }
            net.train_step(&planes, &targets, cfg)
        }
        AdaptiveEval::Noise { .. } => unreachable!("rejected before the loop"),
    }
}

fn checkpoint(
    hooks: &mut TrainHooks,
    episode: u64,
    adaptive: &AdaptiveEval,
) -> Result<(), TrainError> {
    if let Some(h) = hooks.on_checkpoint.as_mut() {
        h(episode, adaptive).map_err(TrainError::Checkpoint)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::by_name;
    use crate::eval::HeuristicKind;
    use crate::learning::episode::DataMode;
    use crate::learning::policy::SelectionPolicy;
    use crate::nnet::{Architecture, Network};
    use crate::search::{Algorithm, Budget};
    use std::cell::RefCell;

    fn quick_episode() -> EpisodeConfig {
        EpisodeConfig {
            algorithm: Algorithm::Descent,
            budget: Budget::Iterations(6),
            policy: SelectionPolicy::Softmax { temperature: 1.0 },
            data: DataMode::Tree,
            ply_cap: 100,
        }
    }

    fn ttt_net(seed: u64) -> AdaptiveEval {
        let game = by_name("tictactoe", 3, false).unwrap();
        let arch = Architecture::dense_default(game.plane_shape(), true);
        AdaptiveEval::Network(Network::init(arch, seed))
    }

    #[test]
    fn a_zero_episode_budget_only_checkpoints_the_initial_evaluation() {
        let game = by_name("tictactoe", 3, false).unwrap();
        let mut adaptive = ttt_net(1);
        let before = adaptive.as_network().unwrap().params().to_vec();
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let marks = RefCell::new(Vec::new());
        let mut hooks = TrainHooks {
            on_episode: None,
            on_checkpoint: Some(Box::new(|t, _| {
                marks.borrow_mut().push(t);
                Ok(())
            })),
        };
        let settings = TrainSettings { episodes: 0, ..TrainSettings::default() };
        let report = train_loop(
            game.as_ref(),
            &mut adaptive,
            &terminal,
            &quick_episode(),
            &settings,
            &mut hooks,
        )
        .unwrap();
        drop(hooks);
        assert_eq!(report.episodes_run, 0);
        assert_eq!(marks.into_inner(), vec![0]);
        assert_eq!(adaptive.as_network().unwrap().params(), &before[..]);
    }

    #[test]
    fn checkpoints_follow_the_cadence_with_initial_and_final_always_present() {
        let game = by_name("tictactoe", 3, false).unwrap();
        let mut adaptive = AdaptiveEval::zero_table();
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let marks = RefCell::new(Vec::new());
        let mut hooks = TrainHooks {
            on_episode: None,
            on_checkpoint: Some(Box::new(|t, _| {
                marks.borrow_mut().push(t);
                Ok(())
            })),
        };
        let settings = TrainSettings {
            episodes: 10,
            checkpoint_every: 4,
            ..TrainSettings::default()
        };
        train_loop(
            game.as_ref(),
            &mut adaptive,
            &terminal,
            &quick_episode(),
            &settings,
            &mut hooks,
        )
        .unwrap();
        drop(hooks);
        assert_eq!(marks.into_inner(), vec![0, 4, 8, 10]);
    }

    #[test]
    fn a_fixed_seed_reproduces_the_learned_table_exactly() {
        let run = || {
            let game = by_name("tictactoe", 3, false).unwrap();
            let mut adaptive = AdaptiveEval::zero_table();
            let terminal = TerminalEval::new(HeuristicKind::Classic);
            let settings = TrainSettings {
                episodes: 6,
                seed: 77,
                ..TrainSettings::default()
            };
            train_loop(
                game.as_ref(),
                &mut adaptive,
                &terminal,
                &quick_episode(),
                &settings,
                &mut TrainHooks::none(),
            )
            .unwrap();
            let mut entries: Vec<(u64, f64)> = match &adaptive {
                AdaptiveEval::Table(t) => t.iter().map(|(k, v)| (k.0, v)).collect(),
                _ => unreachable!(),
            };
            entries.sort_by(|a, b| a.partial_cmp(b).unwrap());
            entries
        };
        let first = run();
        assert!(!first.is_empty());
        assert_eq!(first, run());
    }

    #[test]
    fn episode_stats_land_in_the_report_and_the_hook() {
        let game = by_name("tictactoe", 3, false).unwrap();
        let mut adaptive = AdaptiveEval::zero_table();
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let rows = RefCell::new(0u64);
        let mut hooks = TrainHooks {
            on_episode: Some(Box::new(|stats: &EpisodeStats| {
                *rows.borrow_mut() += 1;
                assert!(stats.loss.is_finite());
                assert!(stats.trained > 0);
            })),
            on_checkpoint: None,
        };
        let settings = TrainSettings { episodes: 5, ..TrainSettings::default() };
        let report = train_loop(
            game.as_ref(),
            &mut adaptive,
            &terminal,
            &quick_episode(),
            &settings,
            &mut hooks,
        )
        .unwrap();
        drop(hooks);
        assert_eq!(report.episodes_run, 5);
        assert_eq!(report.stats.len(), 5);
        assert_eq!(rows.into_inner(), 5);
        assert_eq!(report.aborted_episodes, 0);
    }

    #[test]
    fn a_diverging_network_aborts_with_the_last_checkpoint_intact() {
        let game = by_name("tictactoe", 3, false).unwrap();
        let mut adaptive = ttt_net(3);
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let marks = RefCell::new(Vec::new());
        let mut hooks = TrainHooks {
            on_episode: None,
            on_checkpoint: Some(Box::new(|t, _| {
                marks.borrow_mut().push(t);
                Ok(())
            })),
        };
        let settings = TrainSettings {
            episodes: 50,
            train: TrainConfig { learning_rate: 1e30, ..TrainConfig::default() },
            checkpoint_every: 1000,
            ..TrainSettings::default()
        };
        let err = train_loop(
            game.as_ref(),
            &mut adaptive,
            &terminal,
            &quick_episode(),
            &settings,
            &mut hooks,
        )
        .unwrap_err();
        drop(hooks);
        match err {
            TrainError::NonFinite { episode, .. } => assert!(episode >= 1),
            other => panic!("expected divergence, got {other}"),
        }
        assert_eq!(marks.into_inner(), vec![0], "no checkpoint of the poisoned state");
    }

    #[test]
    fn noise_evaluations_are_rejected_up_front() {
        let game = by_name("tictactoe", 3, false).unwrap();
        let mut adaptive = AdaptiveEval::Noise { seed: 0, amplitude: 0.5 };
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let err = train_loop(
            game.as_ref(),
            &mut adaptive,
            &terminal,
            &quick_episode(),
            &TrainSettings::default(),
            &mut TrainHooks::none(),
        )
        .unwrap_err();
        assert!(matches!(err, TrainError::Untrainable));
    }
}
