//! Reference solvers for tests and verification.
//!
//! [`Solver`] computes exact game results by exhaustive memoized minimax
//! over win/draw/loss, and [`heuristic_minimax`] computes depth-limited
//! minimax values without pruning. Both are deliberately independent of
//! the search module: they share no code with the algorithms they check.

use std::collections::HashMap;

use crate::eval::{AdaptiveEval, TerminalEval};
use crate::game::{Action, Gain, Game, MatchContext, Player, State};

/// Exhaustive win/draw/loss solver with a transposition memo.
pub struct Solver<'a> {
    game: &'a dyn Game,
    memo: HashMap<u64, Gain>,
}

impl<'a> Solver<'a> {
    pub fn new(game: &'a dyn Game) -> Solver<'a> {
        Solver { game, memo: HashMap::new() }
    }

    /// Exact result of `s` under optimal play by both sides.
    pub fn solve(&mut self, s: &State) -> Gain {
        if let Some(&g) = self.memo.get(&s.key().0) {
            return g;
        }
        let result = if self.game.is_terminal(s) {
            self.game.gain(s)
        } else {
            let mover = s.to_move();
            let mut best: Option<Gain> = None;
            for a in self.game.legal_actions(s) {
                let child = self.game.apply(s, a);
                let g = self.solve(&child);
                let better = match best {
                    None => true,
                    Some(b) => match mover {
                        Player::First => g > b,
                        Player::Second => g < b,
                    },
                };
                if better {
                    best = Some(g);
                }
            }
            best.expect("non-terminal state has actions")
        };
        self.memo.insert(s.key().0, result);
        result
    }

    /// All moves that preserve the exact result of `s`.
    pub fn optimal_actions(&mut self, s: &State) -> Vec<Action> {
        let target = self.solve(s);
        self.game
            .legal_actions(s)
            .into_iter()
            .filter(|&a| {
                let child = self.game.apply(s, a);
                self.solve(&child) == target
            })
            .collect()
    }

    /// Number of distinct states solved so far.
    pub fn states_solved(&self) -> usize {
        self.memo.len()
    }
}

/// Depth-limited minimax without pruning: horizon leaves are scored by the
/// adaptive evaluation, terminal states by the terminal evaluation, values
/// folded in canonical action order. Alpha-beta at equal depth must return
/// exactly this value at the root.
pub fn heuristic_minimax(
    game: &dyn Game,
    s: &State,
    depth: u32,
    adaptive: &AdaptiveEval,
    terminal: &TerminalEval,
    seen: MatchContext,
) -> f64 {
    if game.is_terminal(s) {
        return terminal.value(game, s, &seen);
    }
    if depth == 0 {
        return adaptive.evaluate(game, s);
    }
    let actions = game.legal_actions(s);
    let here = seen.observed(s.to_move(), actions.len());
    let maximize = s.to_move() == Player::First;
    let mut value = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    for a in actions {
        let child = game.apply(s, a);
        let v = heuristic_minimax(game, &child, depth - 1, adaptive, terminal, here);
        value = if maximize { value.max(v) } else { value.min(v) };
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::HeuristicKind;
    use crate::game;

    #[test]
    fn the_three_by_three_placement_game_is_a_draw() {
        let g = game::by_name("tictactoe", 3, false).unwrap();
        let mut solver = Solver::new(g.as_ref());
        assert_eq!(solver.solve(&g.initial_state()), 0);
        assert_eq!(solver.states_solved(), 5478);
    }

    #[test]
    fn the_first_player_wins_hex_three() {
        let g = game::by_name("hex", 3, false).unwrap();
        let mut solver = Solver::new(g.as_ref());
        assert_eq!(solver.solve(&g.initial_state()), 1);
    }

    #[test]
    fn immediate_wins_are_found() {
        let g = game::by_name("tictactoe", 3, false).unwrap();
        // x x . / o o . / . . .  with x to move: winning placements exist.
        let s = g.from_fen("xx./oo./... x 4").unwrap();
        let mut solver = Solver::new(g.as_ref());
        assert_eq!(solver.solve(&s), 1);
        let optimal = solver.optimal_actions(&s);
        assert!(optimal.contains(&Action::Place(2)), "completing the row wins");
    }

    #[test]
    fn optimal_actions_keep_the_draw() {
        let g = game::by_name("tictactoe", 3, false).unwrap();
        let s = g.initial_state();
        let mut solver = Solver::new(g.as_ref());
        let optimal = solver.optimal_actions(&s);
        // From the empty board every move still draws.
        assert_eq!(optimal.len(), 9);
    }

    #[test]
    fn memo_is_reused_across_calls() {
        let g = game::by_name("tictactoe", 3, false).unwrap();
        let mut solver = Solver::new(g.as_ref());
        solver.solve(&g.initial_state());
        let before = solver.states_solved();
        solver.solve(&g.initial_state());
        assert_eq!(solver.states_solved(), before);
    }

    #[test]
    fn heuristic_minimax_at_depth_zero_is_the_adaptive_value() {
        let g = game::by_name("tictactoe", 3, false).unwrap();
        let s = g.initial_state();
        let mut table = crate::eval::ValueTable::new();
        table.assign(s.key(), 0.625);
        let adaptive = AdaptiveEval::Table(table);
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let v = heuristic_minimax(g.as_ref(), &s, 0, &adaptive, &terminal, MatchContext::default());
        assert_eq!(v, 0.625);
    }

    #[test]
    fn deep_heuristic_minimax_matches_the_exact_solution() {
        let g = game::by_name("tictactoe", 3, false).unwrap();
        let s = g.from_fen("xox/ox./..o x 6").unwrap();
        let adaptive = AdaptiveEval::zero_table();
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let v = heuristic_minimax(g.as_ref(), &s, 9, &adaptive, &terminal, MatchContext::default());
        let mut solver = Solver::new(g.as_ref());
        assert_eq!(v, solver.solve(&s) as f64);
    }
}
