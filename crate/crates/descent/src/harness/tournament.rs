//! Tournaments: learning curves across training marks and all-play-all
//! standings, with binomial confidence intervals and CSV output.

use std::collections::VecDeque;
use std::io::{self, Write};

use crate::eval::{AdaptiveEval, TerminalEval};
use crate::game::Game;
use crate::harness::matches::{derive_seed, duel, Contender};
use crate::search::{Algorithm, Budget};

/// One training configuration under comparison: a search algorithm with its
/// budget and heuristic, plus the evaluation it had learned at each mark.
pub struct Combination {
    pub label: String,
    pub algorithm: Algorithm,
    pub budget: Budget,
    pub terminal: TerminalEval,
    /// One snapshot per mark, in mark order; the last one is final.
    pub at_mark: Vec<AdaptiveEval>,
}

/// How tournament games are played.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum MatchMode {
    /// One-ply lookahead over the learned evaluation alone, so the curves
    /// measure what was learned rather than search strength.
    GreedyEval,
    /// Each combination's own algorithm and full budget.
    FullSearch,
}

/// Win rate of one combination's snapshot at one mark.
#[derive(Clone, Debug)]
pub struct CellResult {
    pub combination: String,
    pub mark: u64,
    /// Wins over games played, draws counting half.
    pub score: f64,
    /// 95% binomial confidence half-width, same scale as `score`.
    pub ci: f64,
    pub games: u32,
    /// Games that ended by diagnostic (illegal move, resignation, safety
    /// cap) instead of on the board. Nonzero means something is broken.
    pub faults: u32,
}

/// Final standing of one entry in an all-play-all.
#[derive(Clone, Debug)]
pub struct Standing {
    pub label: String,
    pub score: f64,
    pub ci: f64,
    pub games: u32,
}

/// 95% binomial half-width for a proportion estimated from `games` draws.
pub fn ci_half_width(p: f64, games: u32) -> f64 {
    if games == 0 {
        return 0.0;
    }
    1.96 * (p * (1.0 - p) / games as f64).sqrt()
}

fn contender<'a>(combo: &'a Combination, mark_idx: usize, mode: MatchMode) -> Contender<'a> {
    let (algorithm, budget) = match mode {
        MatchMode::GreedyEval => (Algorithm::AlphaBetaId, Budget::Iterations(1)),
        MatchMode::FullSearch => (combo.algorithm, combo.budget),
    };
    Contender::Engine {
        label: combo.label.clone(),
        algorithm,
        budget,
        adaptive: &combo.at_mark[mark_idx],
        terminal: &combo.terminal,
    }
}

/// Measure every combination's snapshot at every mark against every
/// combination's final snapshot: `2 * rounds` games per opponent, colors
/// balanced, seeds derived per pairing. Rows come back grouped by
/// combination with marks ascending, which is the order [`emit_curves`]
/// expects.
pub fn evaluate_marks(
    game: &dyn Game,
    combinations: &[Combination],
    marks: &[u64],
    mode: MatchMode,
    rounds: u32,
    opening_plies: u32,
    seed: u64,
) -> Vec<CellResult> {
    for combo in combinations {
        assert_eq!(
            combo.at_mark.len(),
            marks.len(),
            "combination `{}` must carry one snapshot per mark",
            combo.label
        );
    }
    let last = marks.len().saturating_sub(1);
    let mut cells = Vec::new();
    for (ci, combo) in combinations.iter().enumerate() {
        for (mi, &mark) in marks.iter().enumerate() {
            let evaluated = contender(combo, mi, mode);
            let mut score_sum = 0.0;
            let mut games = 0u32;
            let mut faults = 0u32;
            for (oi, opponent) in combinations.iter().enumerate() {
                let reference = contender(opponent, last, mode);
                let pair_seed =
                    derive_seed(seed, ((ci * marks.len() + mi) * combinations.len() + oi) as u64);
                let out = duel(game, &evaluated, &reference, rounds, opening_plies, pair_seed);
                score_sum += out.score_a * out.games as f64;
                games += out.games;
                faults += out.records.iter().filter(|r| r.diagnostic.is_some()).count() as u32;
            }
            let score = score_sum / games as f64;
            cells.push(CellResult {
                combination: combo.label.clone(),
                mark,
                score,
                ci: ci_half_width(score, games),
                games,
                faults,
            });
        }
    }
    cells
}

/// All-play-all over distinct pairs, both colors, `2 * rounds` games per
/// pairing, each game tallied for both sides. With no draws the standings
/// always average to exactly 50%.
pub fn round_robin(
    game: &dyn Game,
    entries: &[Contender],
    rounds: u32,
    opening_plies: u32,
    seed: u64,
) -> Vec<Standing> {
    assert!(entries.len() >= 2, "an all-play-all needs at least two entries");
    let n = entries.len();
    let mut score = vec![0.0; n];
    let mut games = vec![0u32; n];
    let mut pair = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            let out = duel(game, &entries[i], &entries[j], rounds, opening_plies, derive_seed(seed, pair));
            pair += 1;
            score[i] += out.wins_a as f64 + 0.5 * out.draws as f64;
            score[j] += out.losses_a as f64 + 0.5 * out.draws as f64;
            games[i] += out.games;
            games[j] += out.games;
        }
    }
    (0..n)
        .map(|i| {
            let p = score[i] / games[i] as f64;
            Standing {
                label: entries[i].label().to_string(),
                score: p,
                ci: ci_half_width(p, games[i]),
                games: games[i],
            }
        })
        .collect()
}

/// Write learning-curve cells as CSV. Percentages carry two decimals; the
/// last column is a moving average over the six most recent marks of the
/// same combination, which flattens per-mark noise the way the curves are
/// usually read. Rows must arrive grouped by combination with marks
/// ascending, as [`evaluate_marks`] returns them. An empty slice yields
/// just the header.
pub fn emit_curves(cells: &[CellResult], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "mark,combination,win_pct,ci95_pct,sma6_pct")?;
    let mut window: VecDeque<f64> = VecDeque::new();
    let mut current: Option<&str> = None;
    for cell in cells {
        if current != Some(cell.combination.as_str()) {
            window.clear();
            current = Some(cell.combination.as_str());
        }
        window.push_back(cell.score);
        if window.len() > 6 {
            window.pop_front();
        }
        let sma: f64 = window.iter().sum::<f64>() / window.len() as f64;
        writeln!(
            out,
            "{},{},{:.2},{:.2},{:.2}",
            cell.mark,
            cell.combination,
            100.0 * cell.score,
            100.0 * cell.ci,
            100.0 * sma
        )?;
    }
    Ok(())
}
