//! TicTacToe on the 3x3 board. Three in a row, column, or diagonal wins;
//! a full board without a line is a draw. Mostly a correctness workhorse:
//! small enough to solve exhaustively and to enumerate every reachable state.

use crate::eval::HeuristicKind;

use super::{
    cell_name, fen, parse_cell, Action, Extras, Gain, Game, LengthProfile, NotationError, Player,
    State, StateKey, Zobrist, D4,
};

const N: usize = 3;

const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

/// The 3x3 game.
pub struct TicTacToe {
    zobrist: Zobrist,
}

impl TicTacToe {
    pub fn new() -> TicTacToe {
        TicTacToe { zobrist: Zobrist::new(N * N, "tictactoe") }
    }

    fn build(&self, cells: Vec<i8>, to_move: Player, ply: u32) -> State {
        let key = self.zobrist.full(&cells, to_move);
        State::new(cells, to_move, ply, key, Extras::None)
    }

    fn line_winner(cells: &[i8]) -> Option<Player> {
        for line in LINES {
            let s = cells[line[0]] + cells[line[1]] + cells[line[2]];
            if s == 3 {
                return Some(Player::First);
            }
            if s == -3 {
                return Some(Player::Second);
            }
        }
        None
    }
}

impl Default for TicTacToe {
    fn default() -> Self {
        Self::new()
    }
}

impl Game for TicTacToe {
    fn name(&self) -> String {
        "tictactoe".into()
    }

    fn rows(&self) -> usize {
        N
    }

    fn cols(&self) -> usize {
        N
    }

    fn initial_state(&self) -> State {
        self.build(vec![0; N * N], Player::First, 0)
    }

    fn legal_actions(&self, s: &State) -> Vec<Action> {
        assert!(
            !self.is_terminal(s),
            "legal_actions called on terminal state {}",
            s.key()
        );
        s.cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 0)
            .map(|(i, _)| Action::Place(i as u16))
            .collect()
    }

    fn apply(&self, s: &State, a: Action) -> State {
        let idx = match a {
            Action::Place(i) if (i as usize) < N * N && s.cells[i as usize] == 0 => i as usize,
            other => panic!(
                "illegal action {} in state {}",
                self.format_action(other),
                s.key()
            ),
        };
        assert!(!self.is_terminal(s), "apply called on terminal state {}", s.key());
        let mut cells = s.cells.clone();
        cells[idx] = s.to_move.cell();
        let key = s.key ^ self.zobrist.cell(idx, s.to_move) ^ self.zobrist.to_move();
        State::new(cells, s.to_move.other(), s.ply + 1, key, Extras::None)
    }

    fn is_terminal(&self, s: &State) -> bool {
        Self::line_winner(&s.cells).is_some() || s.cells.iter().all(|&v| v != 0)
    }

    fn gain(&self, s: &State) -> Gain {
        assert!(self.is_terminal(s), "gain called on non-terminal state {}", s.key());
        Self::line_winner(&s.cells).map_or(0, Player::sign)
    }

    fn piece_counts(&self, s: &State) -> (u32, u32) {
        let first = s.cells.iter().filter(|&&v| v == 1).count() as u32;
        let second = s.cells.iter().filter(|&&v| v == -1).count() as u32;
        (first, second)
    }

    fn length_profile(&self) -> LengthProfile {
        LengthProfile::Exact((N * N) as u32)
    }

    fn plane_shape(&self) -> (usize, usize, usize) {
        (3, N, N)
    }

    fn encode_planes(&self, s: &State, out: &mut Vec<f32>) {
        out.extend(s.cells.iter().map(|&v| (v == 1) as u8 as f32));
        out.extend(s.cells.iter().map(|&v| (v == -1) as u8 as f32));
        let turn = (s.to_move == Player::First) as u8 as f32;
        out.extend(std::iter::repeat(turn).take(N * N));
    }

    fn symmetries(&self, s: &State) -> Vec<State> {
        let mut out: Vec<State> = Vec::with_capacity(8);
        for op in D4::ALL {
            let cells = op.map_cells(&s.cells, N);
            let t = self.build(cells, s.to_move, s.ply);
            if !out.iter().any(|u| u.key == t.key) {
                out.push(t);
            }
        }
        out
    }

    fn parse_action(&self, text: &str) -> Result<Action, NotationError> {
        parse_cell(text, N, N).map(Action::Place)
    }

    fn format_action(&self, a: Action) -> String {
        match a {
            Action::Place(i) => cell_name(i as usize, N),
            other => panic!("{other:?} is not a tictactoe action"),
        }
    }

    fn to_fen(&self, s: &State) -> String {
        format!(
            "{} {} {}",
            fen::rows_to_text(&s.cells, N, N),
            fen::mover_to_text(s.to_move),
            s.ply
        )
    }

    fn from_fen(&self, text: &str) -> Result<State, NotationError> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(NotationError(format!("expected 3 fields, got '{text}'")));
        }
        let cells = fen::rows_from_text(parts[0], N, N)?;
        let to_move = fen::mover_from_text(parts[1])?;
        let ply = fen::ply_from_text(parts[2])?;
        Ok(self.build(cells, to_move, ply))
    }

    fn supports_heuristic(&self, kind: HeuristicKind) -> bool {
        matches!(
            kind,
            HeuristicKind::Classic
                | HeuristicKind::DepthAdditive
                | HeuristicKind::DepthMultiplicative
                | HeuristicKind::Mobility
        )
    }

    fn recompute_key(&self, s: &State) -> StateKey {
        StateKey(self.zobrist.full(&s.cells, s.to_move))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn reachable_states() -> Vec<State> {
        let g = TicTacToe::new();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![g.initial_state()];
        while let Some(s) = stack.pop() {
            if !seen.insert(s.cells.clone()) {
                continue;
            }
            if !g.is_terminal(&s) {
                for a in g.legal_actions(&s) {
                    stack.push(g.apply(&s, a));
                }
            }
            out.push(s);
        }
        out
    }

    #[test]
    fn opening_has_nine_moves() {
        let g = TicTacToe::new();
        assert_eq!(g.legal_actions(&g.initial_state()).len(), 9);
    }

    #[test]
    fn row_win_is_first_player_gain() {
        let g = TicTacToe::new();
        let s = g.from_fen("xxx/oo./... o 5").unwrap();
        assert!(g.is_terminal(&s));
        assert_eq!(g.gain(&s), 1);
    }

    #[test]
    fn full_board_without_line_is_draw() {
        let g = TicTacToe::new();
        let s = g.from_fen("xox/xox/oxo x 9").unwrap();
        assert!(g.is_terminal(&s));
        assert_eq!(g.gain(&s), 0);
    }

    #[test]
    #[should_panic(expected = "illegal action")]
    fn occupied_cell_rejected() {
        let g = TicTacToe::new();
        let s = g.apply(&g.initial_state(), Action::Place(4));
        g.apply(&s, Action::Place(4));
    }

    #[test]
    #[should_panic(expected = "gain called on non-terminal")]
    fn gain_requires_terminal() {
        let g = TicTacToe::new();
        g.gain(&g.initial_state());
    }

    #[test]
    fn no_key_collisions_over_all_reachable_states() {
        let states = reachable_states();
        assert_eq!(states.len(), 5478);
        let keys: HashSet<u64> = states.iter().map(|s| s.key).collect();
        assert_eq!(keys.len(), states.len());
    }

    #[test]
    fn incremental_key_matches_recompute_everywhere() {
        let g = TicTacToe::new();
        for s in reachable_states() {
            assert_eq!(StateKey(s.key), g.recompute_key(&s));
        }
    }

    #[test]
    fn symmetries_preserve_gain_exhaustively() {
        let g = TicTacToe::new();
        for s in reachable_states() {
            if !g.is_terminal(&s) {
                continue;
            }
            let gain = g.gain(&s);
            for t in g.symmetries(&s) {
                assert!(g.is_terminal(&t));
                assert_eq!(g.gain(&t), gain);
            }
        }
    }

    #[test]
    fn symmetries_dedup_symmetric_positions() {
        let g = TicTacToe::new();
        let s = g.initial_state();
        assert_eq!(g.symmetries(&s).len(), 1);
        let center = g.apply(&s, Action::Place(4));
        assert_eq!(g.symmetries(&center).len(), 1);
        let corner = g.apply(&s, Action::Place(0));
        assert_eq!(g.symmetries(&corner).len(), 4);
    }

    #[test]
    fn fen_round_trips() {
        let g = TicTacToe::new();
        let mut s = g.initial_state();
        for a in [0u16, 4, 8, 2] {
            s = g.apply(&s, Action::Place(a));
            let back = g.from_fen(&g.to_fen(&s)).unwrap();
            assert_eq!(back, s);
        }
    }
}
