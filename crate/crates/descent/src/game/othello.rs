//! Othello on even boards from 4x4 to 8x8.
//!
//! A placement must bracket at least one line of enemy discs, which all flip.
//! A player with no placement passes (the pass is an explicit action, legal
//! exactly when no placement is); when neither player can place, the game is
//! over and the higher disc count wins.

use crate::eval::HeuristicKind;

use super::{
    cell_name, fen, parse_cell, Action, Extras, Gain, Game, LengthProfile, NotationError, Player,
    State, StateKey, Zobrist, D4,
};

const DIRS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// The disc-flipping game.
pub struct Othello {
    n: usize,
    zobrist: Zobrist,
}

impl Othello {
    /// Even board sizes 4 through 8.
    pub fn new(n: usize) -> Result<Othello, NotationError> {
        if !(4..=8).contains(&n) || n % 2 != 0 {
            return Err(NotationError(format!("othello size {n} must be even, 4-8")));
        }
        Ok(Othello { n, zobrist: Zobrist::new(n * n, &format!("othello-{n}")) })
    }

    fn build(&self, cells: Vec<i8>, to_move: Player, ply: u32) -> State {
        let key = self.zobrist.full(&cells, to_move);
        State::new(cells, to_move, ply, key, Extras::None)
    }

    /// Cells flipped by placing `player`'s disc on `idx`, empty if illegal.
    fn flips(&self, cells: &[i8], idx: usize, player: Player) -> Vec<usize> {
        let n = self.n as isize;
        let own = player.cell();
        let (r0, c0) = ((idx / self.n) as isize, (idx % self.n) as isize);
        let mut out = Vec::new();
        for (dr, dc) in DIRS {
            let mut run = Vec::new();
            let (mut r, mut c) = (r0 + dr, c0 + dc);
            while r >= 0 && r < n && c >= 0 && c < n {
                let cell = cells[(r * n + c) as usize];
                if cell == -own {
                    run.push((r * n + c) as usize);
                } else {
                    if cell == own && !run.is_empty() {
                        out.extend(run);
                    }
                    break;
                }
                r += dr;
                c += dc;
            }
        }
        out
    }

    fn placements(&self, cells: &[i8], player: Player) -> Vec<usize> {
        (0..self.n * self.n)
            .filter(|&i| cells[i] == 0 && !self.flips(cells, i, player).is_empty())
            .collect()
    }

    fn disc_diff(&self, s: &State) -> i32 {
        s.cells.iter().map(|&v| v as i32).sum()
    }
}

impl Game for Othello {
    fn name(&self) -> String {
        format!("othello-{}", self.n)
    }

    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn initial_state(&self) -> State {
        let mut cells = vec![0i8; self.n * self.n];
        let m = self.n / 2;
        cells[(m - 1) * self.n + m - 1] = -1;
        cells[(m - 1) * self.n + m] = 1;
        cells[m * self.n + m - 1] = 1;
        cells[m * self.n + m] = -1;
        self.build(cells, Player::First, 0)
    }

    fn legal_actions(&self, s: &State) -> Vec<Action> {
        assert!(
            !self.is_terminal(s),
            "legal_actions called on terminal state {}",
            s.key()
        );
        let placements = self.placements(&s.cells, s.to_move);
        if placements.is_empty() {
            vec![Action::Pass]
        } else {
            placements.into_iter().map(|i| Action::Place(i as u16)).collect()
        }
    }

    fn apply(&self, s: &State, a: Action) -> State {
        assert!(!self.is_terminal(s), "apply called on terminal state {}", s.key());
        match a {
            Action::Place(i) if (i as usize) < s.cells.len() && s.cells[i as usize] == 0 => {
                let idx = i as usize;
                let flips = self.flips(&s.cells, idx, s.to_move);
                if flips.is_empty() {
                    panic!(
                        "illegal action {} in state {}",
                        self.format_action(a),
                        s.key()
                    );
                }
                let mut cells = s.cells.clone();
                let mut key = s.key ^ self.zobrist.cell(idx, s.to_move) ^ self.zobrist.to_move();
                cells[idx] = s.to_move.cell();
                for f in flips {
                    key ^= self.zobrist.cell(f, s.to_move.other());
                    key ^= self.zobrist.cell(f, s.to_move);
                    cells[f] = s.to_move.cell();
                }
                State::new(cells, s.to_move.other(), s.ply + 1, key, Extras::None)
            }
            Action::Pass => {
                if !self.placements(&s.cells, s.to_move).is_empty() {
                    panic!("illegal action pass in state {}", s.key());
                }
                let key = s.key ^ self.zobrist.to_move();
                State::new(s.cells.clone(), s.to_move.other(), s.ply + 1, key, Extras::None)
            }
            other => panic!(
                "illegal action {} in state {}",
                self.format_action(other),
                s.key()
            ),
        }
    }

    fn is_terminal(&self, s: &State) -> bool {
        self.placements(&s.cells, Player::First).is_empty()
            && self.placements(&s.cells, Player::Second).is_empty()
    }

    fn gain(&self, s: &State) -> Gain {
        assert!(self.is_terminal(s), "gain called on non-terminal state {}", s.key());
        self.disc_diff(s).signum() as Gain
    }

    fn piece_counts(&self, s: &State) -> (u32, u32) {
        let first = s.cells.iter().filter(|&&v| v == 1).count() as u32;
        let second = s.cells.iter().filter(|&&v| v == -1).count() as u32;
        (first, second)
    }

    fn score(&self, s: &State) -> Option<f64> {
        Some(self.disc_diff(s) as f64)
    }

    fn length_profile(&self) -> LengthProfile {
        LengthProfile::Exact((self.n * self.n - 4) as u32)
    }

    fn plane_shape(&self) -> (usize, usize, usize) {
        (3, self.n, self.n)
    }

    fn encode_planes(&self, s: &State, out: &mut Vec<f32>) {
        out.extend(s.cells.iter().map(|&v| (v == 1) as u8 as f32));
        out.extend(s.cells.iter().map(|&v| (v == -1) as u8 as f32));
        let turn = (s.to_move == Player::First) as u8 as f32;
        out.extend(std::iter::repeat(turn).take(self.n * self.n));
    }

    fn symmetries(&self, s: &State) -> Vec<State> {
        let mut out: Vec<State> = Vec::with_capacity(8);
        for op in D4::ALL {
            let cells = op.map_cells(&s.cells, self.n);
            let t = self.build(cells, s.to_move, s.ply);
            if !out.iter().any(|u| u.key == t.key) {
                out.push(t);
            }
        }
        out
    }

    fn parse_action(&self, text: &str) -> Result<Action, NotationError> {
        if text == "pass" {
            return Ok(Action::Pass);
        }
        parse_cell(text, self.n, self.n).map(Action::Place)
    }

    fn format_action(&self, a: Action) -> String {
        match a {
            Action::Place(i) => cell_name(i as usize, self.n),
            Action::Pass => "pass".into(),
            other => panic!("{other:?} is not an othello action"),
        }
    }

    fn to_fen(&self, s: &State) -> String {
        format!(
            "{} {} {}",
            fen::rows_to_text(&s.cells, self.n, self.n),
            fen::mover_to_text(s.to_move),
            s.ply
        )
    }

    fn from_fen(&self, text: &str) -> Result<State, NotationError> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(NotationError(format!("expected 3 fields, got '{text}'")));
        }
        let cells = fen::rows_from_text(parts[0], self.n, self.n)?;
        let to_move = fen::mover_from_text(parts[1])?;
        let ply = fen::ply_from_text(parts[2])?;
        Ok(self.build(cells, to_move, ply))
    }

    fn supports_heuristic(&self, _kind: HeuristicKind) -> bool {
        true
    }

    fn recompute_key(&self, s: &State) -> StateKey {
        StateKey(self.zobrist.full(&s.cells, s.to_move))
    }
}
