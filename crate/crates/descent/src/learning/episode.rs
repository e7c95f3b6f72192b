//! One self-play game and the training data it yields.
//!
//! Per move the engine searches the current position, a [`SelectionPolicy`]
//! picks among the root's children, and the game advances until a terminal
//! state (or a safety cap on game length). What becomes training data is
//! the [`DataMode`]'s choice: the whole search tree, the visited states
//! with their search values, or the visited states targeted at the final
//! result.

use rand::Rng;

use crate::eval::{AdaptiveEval, TerminalEval};
use crate::game::{Action, Gain, Game, MatchContext, State, StateKey};
use crate::search::{run_search, Algorithm, Budget, SearchContext, SearchTable, TraceSink};

use super::policy::{RootChoices, SelectionPolicy};
use super::replay::Pair;

/// Which positions of an episode become training pairs, and their targets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DataMode {
    /// Every interior or terminal state of the episode's search trees, each
    /// with its final backed-up value.
    Tree,
    /// The states the game visited, each with its search value, plus the
    /// terminal state with its exact value.
    Root,
    /// The states the game visited, every one targeted at the final
    /// state's exact value.
    Terminal,
}

impl DataMode {
    pub fn parse(text: &str) -> Result<DataMode, String> {
        match text {
            "tree" => Ok(DataMode::Tree),
            "root" => Ok(DataMode::Root),
            "terminal" => Ok(DataMode::Terminal),
            _ => Err(format!("unknown data mode `{text}` (use tree, root, or terminal)")),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DataMode::Tree => "tree",
            DataMode::Root => "root",
            DataMode::Terminal => "terminal",
        }
    }
}

/// How one self-play episode runs.
#[derive(Clone, Copy, Debug)]
pub struct EpisodeConfig {
    pub algorithm: Algorithm,
    pub budget: Budget,
    pub policy: SelectionPolicy,
    pub data: DataMode,
    /// Safety bound on game length; a game reaching it is aborted.
    pub ply_cap: u32,
}

/// One finished (or aborted) self-play game.
pub struct Episode {
    /// Harvested training pairs, one entry per state.
    pub pairs: Vec<Pair>,
    /// Keys of the states the game visited, initial state first, terminal
    /// (when reached) last.
    pub trajectory: Vec<StateKey>,
    /// The moves played.
    pub actions: Vec<Action>,
    /// Game result, absent when the episode was aborted.
    pub gain: Option<Gain>,
    /// Whether the ply cap cut the game short.
    pub aborted: bool,
    /// Per-player move availability observed over the game, as the
    /// mobility heuristic saw it.
    pub seen: MatchContext,
}

/// Play one self-play game and harvest its training data.
///
/// `progress` is the annealing clock in [0, 1] handed to the selection
/// policy. The transposition table lives for exactly this one game: it
/// persists across the game's moves and is dropped at the end.
pub fn run_episode(
    game: &dyn Game,
    adaptive: &AdaptiveEval,
    terminal: &TerminalEval,
    cfg: &EpisodeConfig,
    progress: f64,
    rng: &mut impl Rng,
    mut trace: Option<&mut TraceSink>,
) -> Episode {
    let mut table = SearchTable::new();
    let mut s = game.initial_state();
    let mut seen = MatchContext::default();
    let mut visited = vec![s.clone()];
    let mut root_values = Vec::new();
    let mut actions: Vec<Action> = Vec::new();
    let mut aborted = false;

    loop {
        if game.is_terminal(&s) {
            break;
        }
        if actions.len() as u32 >= cfg.ply_cap {
            aborted = true;
            break;
        }
        let outcome = {
            let mut ctx = SearchContext {
                game,
                adaptive,
                terminal,
                table: &mut table,
                trace: trace.as_deref_mut(),
            };
            run_search(cfg.algorithm, &mut ctx, &s, seen, cfg.budget)
        };
        root_values.push(outcome.value);
        let action = match cfg.policy {
            SelectionPolicy::Greedy => outcome.action,
            _ => {
                let choices = RootChoices::from_root(&table, &s);
                choices.actions[cfg.policy.choose(&choices, progress, rng)]
            }
        };
        let options = table.get(s.key()).map_or(0, |r| r.actions.len());
        seen.observe(s.to_move(), options);
        actions.push(action);
        s = game.apply(&s, action);
        visited.push(s.clone());
    }

    let gain = if aborted { None } else { Some(game.gain(&s)) };
    let final_value = if aborted { 0.0 } else { terminal.value(game, &s, &seen) };
    let raw: Vec<Pair> = match cfg.data {
        DataMode::Tree => {
            let mut pairs: Vec<Pair> =
                table.harvest().map(|(st, v)| (st.clone(), v)).collect();
            pairs.sort_by_key(|(st, _)| (st.ply(), st.key().0));
            if !aborted {
                pairs.push((s.clone(), final_value));
            }
            pairs
        }
        DataMode::Root => {
            if aborted {
                Vec::new()
            } else {
                let mut pairs: Vec<Pair> = visited[..visited.len() - 1]
                    .iter()
                    .cloned()
                    .zip(root_values.iter().copied())
                    .collect();
                pairs.push((s.clone(), final_value));
                pairs
            }
        }
        DataMode::Terminal => {
            if aborted {
                Vec::new()
            } else {
                visited.iter().map(|st| (st.clone(), final_value)).collect()
            }
        }
    };

    Episode {
        pairs: dedup_keep_last(raw),
        trajectory: visited.iter().map(State::key).collect(),
        actions,
        gain,
        aborted,
        seen,
    }
}

/// Collapse duplicate states: each state keeps its first position in the
/// list and its last value. Search tables merge transpositions already, so
/// duplicates come from the appended terminal pair and from symmetry
/// augmentation mapping distinct states onto one another.
pub fn dedup_keep_last(pairs: Vec<Pair>) -> Vec<Pair> {
    use std::collections::hash_map::Entry;
    use std::collections::HashMap;

    let mut slot: HashMap<u64, usize> = HashMap::with_capacity(pairs.len());
    let mut out: Vec<Pair> = Vec::with_capacity(pairs.len());
    for (s, v) in pairs {
        match slot.entry(s.key().0) {
            Entry::Occupied(e) => out[*e.get()].1 = v,
            Entry::Vacant(e) => {
                e.insert(out.len());
                out.push((s, v));
            }
        }
    }
    out
}

/// Replace each pair by the value-preserving symmetric variants of its
/// state (the originals are among them), multiplying the data a small
/// network sees per game.
pub fn augment(game: &dyn Game, pairs: Vec<Pair>) -> Vec<Pair> {
    let mut out = Vec::with_capacity(pairs.len() * 2);
    for (s, v) in pairs {
        for sym in game.symmetries(&s) {
            out.push((sym, v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::by_name;
    use crate::eval::HeuristicKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ttt_episode(cfg: &EpisodeConfig, seed: u64) -> Episode {
        let game = by_name("tictactoe", 3, false).unwrap();
        let adaptive = AdaptiveEval::zero_table();
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        run_episode(game.as_ref(), &adaptive, &terminal, cfg, 0.4, &mut rng, None)
    }

    #[test]
    fn terminal_mode_targets_every_state_at_the_final_value() {
        let cfg = EpisodeConfig {
            algorithm: Algorithm::Descent,
            budget: Budget::Iterations(5),
            policy: SelectionPolicy::EpsilonGreedy,
            data: DataMode::Terminal,
            ply_cap: 100,
        };
        let ep = ttt_episode(&cfg, 12);
        assert!(!ep.aborted);
        let result = ep.gain.unwrap() as f64;
        assert_eq!(ep.pairs.len(), ep.actions.len() + 1);
        for (_, v) in &ep.pairs {
            assert_eq!(*v, result);
        }
    }

    #[test]
    fn root_mode_keeps_one_pair_per_position_plus_the_terminal() {
        let cfg = EpisodeConfig {
            algorithm: Algorithm::Ubfm,
            budget: Budget::Iterations(8),
            policy: SelectionPolicy::Softmax { temperature: 0.5 },
            data: DataMode::Root,
            ply_cap: 100,
        };
        let ep = ttt_episode(&cfg, 3);
        assert!(!ep.aborted);
        assert_eq!(ep.pairs.len(), ep.actions.len() + 1);
        assert_eq!(ep.pairs.len(), ep.trajectory.len());
        for (pair, key) in ep.pairs.iter().zip(&ep.trajectory) {
            assert_eq!(pair.0.key(), *key, "pairs follow the played order");
        }
        let last = ep.pairs.last().unwrap();
        assert_eq!(last.1, ep.gain.unwrap() as f64, "terminal pair carries the exact value");
    }

    #[test]
    fn an_exhaustive_tree_episode_proves_the_opening_is_a_draw() {
        let cfg = EpisodeConfig {
            algorithm: Algorithm::CompletedDescent,
            budget: Budget::Iterations(200_000),
            policy: SelectionPolicy::Greedy,
            data: DataMode::Tree,
            ply_cap: 100,
        };
        let ep = ttt_episode(&cfg, 0);
        assert_eq!(ep.gain, Some(0), "proof-guided self-play never blunders");
        let game = by_name("tictactoe", 3, false).unwrap();
        let opening = game.initial_state().key();
        let pair = ep.pairs.iter().find(|(s, _)| s.key() == opening);
        assert_eq!(pair.map(|(_, v)| *v), Some(0.0));
    }

    #[test]
    fn tree_data_always_covers_the_root_trajectory() {
        let base = EpisodeConfig {
            algorithm: Algorithm::Descent,
            budget: Budget::Iterations(6),
            policy: SelectionPolicy::Ordinal,
            data: DataMode::Tree,
            ply_cap: 100,
        };
        let tree = ttt_episode(&base, 21);
        let root = ttt_episode(&EpisodeConfig { data: DataMode::Root, ..base }, 21);
        assert_eq!(tree.trajectory, root.trajectory, "same seed, same game");
        let harvested: std::collections::HashSet<u64> =
            tree.pairs.iter().map(|(s, _)| s.key().0).collect();
        for (s, _) in &root.pairs {
            assert!(harvested.contains(&s.key().0), "missing {}", s.key());
        }
    }

    #[test]
    fn the_ply_cap_aborts_runaway_games() {
        let base = EpisodeConfig {
            algorithm: Algorithm::Descent,
            budget: Budget::Iterations(4),
            policy: SelectionPolicy::EpsilonGreedy,
            data: DataMode::Terminal,
            ply_cap: 3,
        };
        let capped = ttt_episode(&base, 2);
        assert!(capped.aborted);
        assert_eq!(capped.gain, None);
        assert_eq!(capped.trajectory.len(), 4, "initial state plus three moves");
        assert!(capped.pairs.is_empty(), "no final value to target");

        let tree = ttt_episode(&EpisodeConfig { data: DataMode::Tree, ..base }, 2);
        assert!(tree.aborted);
        assert!(!tree.pairs.is_empty(), "search values are kept even without a result");
    }

    #[test]
    fn duplicate_states_keep_their_last_value() {
        let game = by_name("tictactoe", 3, false).unwrap();
        let a = game.initial_state();
        let b = game.apply(&a, Action::Place(4));
        let pairs = vec![(a.clone(), 0.25), (b.clone(), -0.5), (a.clone(), 0.75)];
        let dedup = dedup_keep_last(pairs);
        assert_eq!(dedup.len(), 2);
        assert_eq!(dedup[0].0.key(), a.key());
        assert_eq!(dedup[0].1, 0.75, "later value wins");
        assert_eq!(dedup[1].1, -0.5);
    }

    #[test]
    fn augmentation_multiplies_pairs_by_the_symmetry_group() {
        let game = by_name("hex", 3, false).unwrap();
        let s = game.apply(&game.initial_state(), Action::Place(0));
        let grown = augment(game.as_ref(), vec![(s.clone(), 0.6)]);
        assert_eq!(grown.len(), 2, "a corner stone and its half-turn image");
        assert!(grown.iter().all(|(_, v)| *v == 0.6));
        let keys: std::collections::HashSet<u64> =
            grown.iter().map(|(st, _)| st.key().0).collect();
        assert_eq!(keys.len(), 2);
    }
}
