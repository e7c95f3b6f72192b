//! Action selection during self-play.
//!
//! A search leaves the root's children scored in the table; these policies
//! turn the scores into an exploring move choice. Exploration is annealed:
//! `progress` runs from 0 at the start of training (explore freely) to 1 at
//! the end (exploit only). Whenever the search proved results, a
//! resolution-aware wrapper runs first: a child proven winning for the
//! mover is played outright, and children proven losing are excluded while
//! any alternative exists.

use rand::Rng;

use crate::game::{Action, Gain, Player, State};
use crate::search::{best_plain, SearchTable};

/// How self-play turns root child values into a move.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SelectionPolicy {
    /// The search's own move choice, no exploration.
    Greedy,
    /// The best child with probability `progress`, otherwise uniform.
    EpsilonGreedy,
    /// Boltzmann sampling over child values at a fixed temperature.
    Softmax { temperature: f64 },
    /// Rank-based sampling that anneals from uniform to best-only.
    Ordinal,
}

impl SelectionPolicy {
    /// Parse a policy name: `greedy`, `epsilon-greedy`, `softmax[:T]`
    /// (temperature 1 when omitted), or `ordinal`.
    pub fn parse(text: &str) -> Result<SelectionPolicy, String> {
        match text {
            "greedy" => return Ok(SelectionPolicy::Greedy),
            "epsilon-greedy" => return Ok(SelectionPolicy::EpsilonGreedy),
            "softmax" => return Ok(SelectionPolicy::Softmax { temperature: 1.0 }),
            "ordinal" => return Ok(SelectionPolicy::Ordinal),
            _ => {}
        }
        if let Some(rest) = text.strip_prefix("softmax:") {
            let temperature: f64 = rest
                .parse()
                .map_err(|_| format!("softmax temperature `{rest}` is not a number"))?;
            if temperature <= 0.0 {
                return Err(format!("softmax temperature must be positive, got {temperature}"));
            }
            return Ok(SelectionPolicy::Softmax { temperature });
        }
        Err(format!(
            "unknown selection policy `{text}` (use greedy, epsilon-greedy, softmax[:T], \
             or ordinal)"
        ))
    }

    pub fn label(&self) -> String {
        match self {
            SelectionPolicy::Greedy => "greedy".into(),
            SelectionPolicy::EpsilonGreedy => "epsilon-greedy".into(),
            SelectionPolicy::Softmax { temperature } => format!("softmax:{temperature}"),
            SelectionPolicy::Ordinal => "ordinal".into(),
        }
    }

    /// Pick a child index. Proven results come first: a child proven
    /// winning for the mover is returned outright, children proven losing
    /// are dropped while anything else remains (when everything is lost the
    /// full set stays, the game being already decided). The policy then
    /// samples from what is left.
    pub fn choose(&self, choices: &RootChoices, progress: f64, rng: &mut impl Rng) -> usize {
        let n = choices.actions.len();
        let win: Gain = if choices.maximize { 1 } else { -1 };
        if let Some(i) = (0..n).find(|&i| choices.resolved[i] && choices.r[i] == win) {
            return i;
        }
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&i| !(choices.resolved[i] && choices.r[i] == -win))
            .collect();
        if candidates.is_empty() {
            candidates = (0..n).collect();
        }
        let values: Vec<f64> = candidates.iter().map(|&i| choices.values[i]).collect();
        let pick = match self {
            SelectionPolicy::Greedy => best_plain(&values, choices.maximize),
            SelectionPolicy::EpsilonGreedy => {
                select_epsilon_greedy(&values, choices.maximize, progress, rng)
            }
            SelectionPolicy::Softmax { temperature } => {
                select_softmax(&values, choices.maximize, *temperature, rng)
            }
            SelectionPolicy::Ordinal => select_ordinal(&values, choices.maximize, progress, rng),
        };
        candidates[pick]
    }
}

/// The searched root's children as a policy sees them: actions, the most
/// informed value per child, and any proven results.
#[derive(Clone, Debug)]
pub struct RootChoices {
    pub actions: Vec<Action>,
    pub values: Vec<f64>,
    pub r: Vec<Gain>,
    pub resolved: Vec<bool>,
    /// Whether the mover prefers high values (first player to move).
    pub maximize: bool,
}

impl RootChoices {
    /// Read the root's children out of the table after a search. Child
    /// values come from the children's own records where those exist
    /// (searches that refine in place, like visit averaging, keep them
    /// fresher than the root's copies) and from the root record otherwise.
    ///
    /// Panics if `root` has no expanded record: choices only exist after a
    /// search.
    pub fn from_root(table: &SearchTable, root: &State) -> RootChoices {
        let rec = table
            .get(root.key())
            .filter(|r| !r.actions.is_empty())
            .expect("move choices requested for an unsearched root");
        let values = (0..rec.actions.len())
            .map(|i| table.get(rec.child_keys[i]).map_or(rec.vprime[i], |c| c.v))
            .collect();
        let (r, resolved) = rec.child_keys.iter().map(|k| table.resolution(*k)).unzip();
        RootChoices {
            actions: rec.actions.clone(),
            values,
            r,
            resolved,
            maximize: root.to_move() == Player::First,
        }
    }
}

/// The best value with probability `progress`, a uniform draw over all
/// candidates otherwise.
pub fn select_epsilon_greedy(
    values: &[f64],
    maximize: bool,
    progress: f64,
    rng: &mut impl Rng,
) -> usize {
    debug_assert!(!values.is_empty());
    if rng.gen::<f64>() < progress {
        best_plain(values, maximize)
    } else {
        rng.gen_range(0..values.len())
    }
}

/// Boltzmann selection: P(i) proportional to exp(value/temperature), with
/// values negated for the minimizing player so better moves are always
/// hotter. Stabilized by subtracting the hottest score before
/// exponentiating.
pub fn select_softmax(
    values: &[f64],
    maximize: bool,
    temperature: f64,
    rng: &mut impl Rng,
) -> usize {
    debug_assert!(!values.is_empty());
    assert!(temperature > 0.0, "softmax needs a positive temperature");
    let sign = if maximize { 1.0 } else { -1.0 };
    let scored: Vec<f64> = values.iter().map(|&v| sign * v / temperature).collect();
    let top = scored.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let weights: Vec<f64> = scored.iter().map(|&s| (s - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut ticket = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        ticket -= w;
        if ticket <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Rank-based selection. Candidates are ranked best-first for the mover
/// (ties keep their original order) and rank j of n is accepted with
/// probability (progress·(n−j−1)+1)/(n−j): a uniform draw at progress 0,
/// always the top rank at progress 1. Only the ordering of the values
/// matters, never their spacing.
pub fn select_ordinal(
    values: &[f64],
    maximize: bool,
    progress: f64,
    rng: &mut impl Rng,
) -> usize {
    debug_assert!(!values.is_empty());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let cmp = values[a].partial_cmp(&values[b]).expect("comparable child values");
        if maximize {
            cmp.reverse()
        } else {
            cmp
        }
    });
    let n = order.len();
    for j in 0..n - 1 {
        let accept = (progress * (n - j - 1) as f64 + 1.0) / (n - j) as f64;
        if rng.gen::<f64>() < accept {
            return order[j];
        }
    }
    order[n - 1]
}
