//! State evaluation: terminal reward heuristics and the learned evaluation.
//!
//! Terminal states are scored by a [`TerminalEval`], one of six reward
//! heuristics; all values are from the first player's point of view. The
//! richer heuristics reward fast wins, big margins, or material dominance,
//! but every one of them preserves the order loss < draw < win, so
//! optimizing for them never trades a win away.
//!
//! Non-terminal states are scored by an [`AdaptiveEval`]: a value network,
//! a plain lookup table (exact for small games), or a deterministic noise
//! source used by diagnostics.

use std::collections::HashMap;

use crate::game::{Game, LengthProfile, MatchContext, State, StateKey};
use crate::nnet::Network;

/// The six terminal reward heuristics.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum HeuristicKind {
    /// Win/draw/loss as +1 / 0 / -1.
    Classic,
    /// Win/loss scaled by how many moves remain: faster wins score higher.
    DepthAdditive,
    /// Win/loss scaled by mean length over actual length.
    DepthMultiplicative,
    /// The game's own score margin (Othello disc differential).
    Score,
    /// Ratio of the players' mean move counts over the match.
    Mobility,
    /// Piece-count difference, clamped to keep wins positive.
    Presence,
}

impl HeuristicKind {
    /// Parse a config value.
    pub fn parse(text: &str) -> Option<HeuristicKind> {
        Some(match text {
            "classic" => HeuristicKind::Classic,
            "depth-additive" => HeuristicKind::DepthAdditive,
            "depth-multiplicative" => HeuristicKind::DepthMultiplicative,
            "score" => HeuristicKind::Score,
            "mobility" => HeuristicKind::Mobility,
            "presence" => HeuristicKind::Presence,
            _ => return None,
        })
    }

    /// Config spelling of the kind.
    pub fn label(self) -> &'static str {
        match self {
            HeuristicKind::Classic => "classic",
            HeuristicKind::DepthAdditive => "depth-additive",
            HeuristicKind::DepthMultiplicative => "depth-multiplicative",
            HeuristicKind::Score => "score",
            HeuristicKind::Mobility => "mobility",
            HeuristicKind::Presence => "presence",
        }
    }

    /// Whether values of this heuristic always lie in [-1, 1] (so a tanh
    /// output layer can represent them).
    pub fn bounded_by_one(self) -> bool {
        self == HeuristicKind::Classic
    }
}

/// Terminal evaluation: a heuristic kind plus a constant positive divisor
/// applied to every value, at search and training time alike.
#[derive(Clone, Copy, Debug)]
pub struct TerminalEval {
    kind: HeuristicKind,
    scale: f64,
}

impl TerminalEval {
    /// The heuristic with no normalization.
    pub fn new(kind: HeuristicKind) -> TerminalEval {
        TerminalEval { kind, scale: 1.0 }
    }

    /// The heuristic with an explicit divisor.
    pub fn with_scale(kind: HeuristicKind, scale: f64) -> TerminalEval {
        assert!(scale > 0.0, "scale must be positive");
        TerminalEval { kind, scale }
    }

    /// The heuristic with the game's default divisor: total game length for
    /// the additive depth heuristic, cell count for score and presence,
    /// 1 otherwise.
    pub fn for_game(kind: HeuristicKind, game: &dyn Game) -> TerminalEval {
        let scale = match kind {
            HeuristicKind::DepthAdditive => match game.length_profile() {
                LengthProfile::Exact(p) => p as f64,
                LengthProfile::Approximate(p) => p,
            },
            HeuristicKind::Score | HeuristicKind::Presence => {
                (game.rows() * game.cols()) as f64
            }
            _ => 1.0,
        };
        TerminalEval { kind, scale }
    }

    pub fn kind(&self) -> HeuristicKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Value of the terminal state `s`, scaled by the divisor.
    pub fn value(&self, game: &dyn Game, s: &State, ctx: &MatchContext) -> f64 {
        self.raw_value(game, s, ctx) / self.scale
    }

    fn raw_value(&self, game: &dyn Game, s: &State, ctx: &MatchContext) -> f64 {
        let gain = game.gain(s) as f64;
        match self.kind {
            HeuristicKind::Classic => gain,
            HeuristicKind::DepthAdditive => {
                if gain == 0.0 {
                    return 0.0;
                }
                gain * self.remaining(game, s)
            }
            HeuristicKind::DepthMultiplicative => {
                if gain == 0.0 {
                    return 0.0;
                }
                let total = match game.length_profile() {
                    LengthProfile::Exact(p) => p as f64,
                    LengthProfile::Approximate(p) => p,
                };
                gain * total / (s.ply().max(1) as f64)
            }
            HeuristicKind::Score => game
                .score(s)
                .expect("score heuristic on a game without a score"),
            HeuristicKind::Mobility => {
                use crate::game::Player;
                let m1 = ctx.mean_moves(Player::First);
                let m2 = ctx.mean_moves(Player::Second);
                if gain > 0.0 {
                    m1 / m2
                } else if gain < 0.0 {
                    -m2 / m1
                } else {
                    0.0
                }
            }
            HeuristicKind::Presence => {
                let (n1, n2) = game.piece_counts(s);
                let diff = n1 as f64 - n2 as f64;
                if gain > 0.0 {
                    diff.max(1.0)
                } else if gain < 0.0 {
                    diff.min(-1.0)
                } else {
                    0.0
                }
            }
        }
    }

    fn remaining(&self, game: &dyn Game, s: &State) -> f64 {
        if let Some(l) = game.remaining_length(s) {
            return l;
        }
        match game.length_profile() {
            LengthProfile::Exact(p) => (p as f64 - s.ply() as f64 + 1.0).max(1.0),
            LengthProfile::Approximate(p) => (p - s.ply() as f64).max(1.0),
        }
    }
}

/// Exact value store for small games: unseen states evaluate to 0.
#[derive(Clone, Default, Debug)]
pub struct ValueTable {
    map: HashMap<u64, f64>,
}

impl ValueTable {
    pub fn new() -> ValueTable {
        ValueTable::default()
    }

    /// Overwrite the value of a state.
    pub fn assign(&mut self, key: StateKey, value: f64) {
        self.map.insert(key.0, value);
    }

    /// Stored value, 0 if the state was never assigned.
    pub fn get(&self, key: StateKey) -> f64 {
        self.map.get(&key.0).copied().unwrap_or(0.0)
    }

    /// Number of states with stored values.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateKey, f64)> + '_ {
        self.map.iter().map(|(&k, &v)| (StateKey(k), v))
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// The learned (or scripted) evaluation of non-terminal states.
#[derive(Clone, Debug)]
pub enum AdaptiveEval {
    /// Lookup table keyed by state; unseen states are 0.
    Table(ValueTable),
    /// Value network over the game's input planes.
    Network(Network),
    /// Deterministic pseudo-random values in (-amplitude, amplitude),
    /// keyed by state hash. A fixed, tie-free stand-in evaluation for
    /// diagnostics and convergence tests.
    Noise { seed: u64, amplitude: f64 },
}

impl AdaptiveEval {
    /// An empty table: the uniform zero evaluation.
    pub fn zero_table() -> AdaptiveEval {
        AdaptiveEval::Table(ValueTable::new())
    }

    /// Evaluate one state.
    pub fn evaluate(&self, game: &dyn Game, s: &State) -> f64 {
        match self {
            AdaptiveEval::Table(t) => t.get(s.key()),
            AdaptiveEval::Network(net) => {
                let mut planes = Vec::new();
                game.encode_planes(s, &mut planes);
                net.forward_batch(&planes, 1)[0] as f64
            }
            AdaptiveEval::Noise { seed, amplitude } => {
                let h = splitmix64(s.key().0 ^ seed);
                let unit = (h >> 11) as f64 / (1u64 << 53) as f64;
                amplitude * (2.0 * unit - 1.0)
            }
        }
    }

    /// Evaluate a batch of sibling states in one pass.
    pub fn evaluate_batch(&self, game: &dyn Game, states: &[&State]) -> Vec<f64> {
        match self {
            AdaptiveEval::Network(net) => {
                if states.is_empty() {
                    return Vec::new();
                }
                let mut planes = Vec::new();
                for s in states {
                    game.encode_planes(s, &mut planes);
                }
                net.forward_batch(&planes, states.len())
                    .into_iter()
                    .map(|v| v as f64)
                    .collect()
            }
            _ => states.iter().map(|s| self.evaluate(game, s)).collect(),
        }
    }

    /// The table backing, if any.
    pub fn as_table_mut(&mut self) -> Option<&mut ValueTable> {
        match self {
            AdaptiveEval::Table(t) => Some(t),
            _ => None,
        }
    }

    /// The network backing, if any.
    pub fn as_network_mut(&mut self) -> Option<&mut Network> {
        match self {
            AdaptiveEval::Network(n) => Some(n),
            _ => None,
        }
    }

    /// The network backing, if any.
    pub fn as_network(&self) -> Option<&Network> {
        match self {
            AdaptiveEval::Network(n) => Some(n),
            _ => None,
        }
    }
}
