//! Experience replay.
//!
//! Training pairs from recent episodes are kept in a bounded first-in
//! first-out memory and each update trains on a bounded sample of it, so
//! one episode's positions are revisited under several network versions.
//! Capacity is counted either in pairs (a flat sliding window) or in whole
//! games (the window never splits an episode).

use std::collections::VecDeque;

use rand::Rng;

use crate::game::State;

/// One training example: a position and its value target.
pub type Pair = (State, f64);

/// What the memory bound counts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Capacity {
    /// At most this many pairs, oldest pairs evicted first.
    Pairs(usize),
    /// At most this many episodes, oldest episodes evicted whole.
    Games(usize),
}

impl Capacity {
    /// Parse `pairs:20000` or `games:100`.
    pub fn parse(text: &str) -> Result<Capacity, String> {
        let (kind, amount) = text
            .split_once(':')
            .ok_or_else(|| format!("capacity `{text}` is not of the form kind:amount"))?;
        let n: usize = amount
            .parse()
            .map_err(|_| format!("capacity amount `{amount}` is not a number"))?;
        if n == 0 {
            return Err(format!("capacity must be positive, got `{text}`"));
        }
        match kind {
            "pairs" => Ok(Capacity::Pairs(n)),
            "games" => Ok(Capacity::Games(n)),
            _ => Err(format!("unknown capacity kind `{kind}` (use pairs or games)")),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Capacity::Pairs(n) => format!("pairs:{n}"),
            Capacity::Games(n) => format!("games:{n}"),
        }
    }
}

/// Bounded FIFO memory of training pairs with uniform subsampling.
pub struct ReplayBuffer {
    capacity: Capacity,
    /// Sampling rate: each update sees at most this fraction of capacity.
    sigma: f64,
    pairs: VecDeque<Pair>,
    /// Pair count of each stored episode, oldest first (games mode).
    games: VecDeque<usize>,
}

impl ReplayBuffer {
    pub fn new(capacity: Capacity, sigma: f64) -> ReplayBuffer {
        assert!(sigma > 0.0 && sigma <= 1.0, "sampling rate must be in (0, 1]");
        ReplayBuffer { capacity, sigma, pairs: VecDeque::new(), games: VecDeque::new() }
    }

    pub fn len_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn len_games(&self) -> usize {
        self.games.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Append one episode's pairs, evicting the oldest entries beyond
    /// capacity. An empty episode (an aborted game can harvest nothing)
    /// takes no memory and evicts nothing.
    pub fn push(&mut self, episode: Vec<Pair>) {
        if episode.is_empty() {
            return;
        }
        self.games.push_back(episode.len());
        self.pairs.extend(episode);
        match self.capacity {
            Capacity::Pairs(limit) => {
                while self.pairs.len() > limit {
                    self.pairs.pop_front();
                    let front = self.games.front_mut().expect("game sizes track pairs");
                    *front -= 1;
                    if *front == 0 {
                        self.games.pop_front();
                    }
                }
            }
            Capacity::Games(limit) => {
                while self.games.len() > limit {
                    let dropped = self.games.pop_front().expect("checked non-empty");
                    self.pairs.drain(..dropped);
                }
            }
        }
    }

    /// The training set for one update: everything while the memory is
    /// small, and a uniform sample of sigma times capacity once it is not.
    /// In games mode whole episodes are sampled and their pairs returned.
    /// Pairs come back in insertion order either way.
    pub fn sample(&self, rng: &mut impl Rng) -> Vec<Pair> {
        match self.capacity {
            Capacity::Pairs(limit) => {
                let want = budget(self.sigma, limit);
                if self.pairs.len() <= want {
                    return self.pairs.iter().cloned().collect();
                }
                let picks = choose(self.pairs.len(), want, rng);
                picks.into_iter().map(|i| self.pairs[i].clone()).collect()
            }
            Capacity::Games(limit) => {
                let want = budget(self.sigma, limit);
                if self.games.len() <= want {
                    return self.pairs.iter().cloned().collect();
                }
                let starts: Vec<usize> = self
                    .games
                    .iter()
                    .scan(0, |acc, len| {
                        let start = *acc;
                        *acc += len;
                        Some(start)
                    })
                    .collect();
                let picks = choose(self.games.len(), want, rng);
                let mut out = Vec::new();
                for g in picks {
                    for i in starts[g]..starts[g] + self.games[g] {
                        out.push(self.pairs[i].clone());
                    }
                }
                out
            }
        }
    }
}

/// Sample budget: sigma times capacity, never below one.
fn budget(sigma: f64, limit: usize) -> usize {
    ((sigma * limit as f64) as usize).max(1)
}

/// `count` distinct indices from `0..n`, uniformly, returned in ascending
/// order (a partial Fisher-Yates shuffle).
fn choose(n: usize, count: usize, rng: &mut impl Rng) -> Vec<usize> {
    debug_assert!(count <= n);
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.gen_range(i..n);
        indices.swap(i, j);
    }
    let mut picks = indices[..count].to_vec();
    picks.sort_unstable();
    picks
}
