//! Clobber on square boards (default sizes 4 through 8; 2 and 3 are accepted
//! for diagnostics).
//!
//! The board starts completely filled in a checkerboard pattern. A move takes
//! one of your pieces onto an orthogonally adjacent enemy piece, removing it.
//! The last player able to move wins: if you cannot move, you lose.

use crate::eval::HeuristicKind;

use super::{
    cell_name, fen, mean_random_length, parse_cell, Action, Extras, Gain, Game, LengthProfile,
    NotationError, Player, State, StateKey, Zobrist, D4,
};

/// The capture-or-lose game.
pub struct Clobber {
    n: usize,
    zobrist: Zobrist,
    mean_length: f64,
}

impl Clobber {
    /// Board sizes 2 through 8.
    pub fn new(n: usize) -> Result<Clobber, NotationError> {
        if !(2..=8).contains(&n) {
            return Err(NotationError(format!("clobber size {n} out of range 2-8")));
        }
        let mut g = Clobber {
            n,
            zobrist: Zobrist::new(n * n, &format!("clobber-{n}")),
            mean_length: 0.0,
        };
        g.mean_length = mean_random_length(&g, 1000, 0xc10bb + n as u64);
        Ok(g)
    }

    /// Override the measured mean game length.
    pub fn with_mean_length(mut self, len: f64) -> Clobber {
        self.mean_length = len;
        self
    }

    fn moves_for(&self, cells: &[i8], player: Player) -> Vec<Action> {
        let n = self.n as isize;
        let own = player.cell();
        let mut out = Vec::new();
        for from in 0..cells.len() {
            if cells[from] != own {
                continue;
            }
            let (r, c) = ((from / self.n) as isize, (from % self.n) as isize);
            for (dr, dc) in [(-1isize, 0isize), (0, -1), (0, 1), (1, 0)] {
                let (tr, tc) = (r + dr, c + dc);
                if tr < 0 || tr >= n || tc < 0 || tc >= n {
                    continue;
                }
                let to = (tr * n + tc) as usize;
                if cells[to] == -own {
                    out.push(Action::Step { from: from as u16, to: to as u16 });
                }
            }
        }
        out.sort_by_key(|a| match a {
            Action::Step { from, to } => (*from, *to),
            _ => unreachable!(),
        });
        out
    }

    fn build(&self, cells: Vec<i8>, to_move: Player, ply: u32) -> State {
        let key = self.zobrist.full(&cells, to_move);
        State::new(cells, to_move, ply, key, Extras::None)
    }
}

impl Game for Clobber {
    fn name(&self) -> String {
        format!("clobber-{}", self.n)
    }

    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn initial_state(&self) -> State {
        let cells = (0..self.n * self.n)
            .map(|i| {
                let (r, c) = (i / self.n, i % self.n);
                if (r + c) % 2 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        self.build(cells, Player::First, 0)
    }

    fn legal_actions(&self, s: &State) -> Vec<Action> {
        assert!(
            !self.is_terminal(s),
            "legal_actions called on terminal state {}",
            s.key()
        );
        self.moves_for(&s.cells, s.to_move)
    }

    fn apply(&self, s: &State, a: Action) -> State {
        assert!(!self.is_terminal(s), "apply called on terminal state {}", s.key());
        let (from, to) = match a {
            Action::Step { from, to } => (from as usize, to as usize),
            other => panic!(
                "illegal action {} in state {}",
                self.format_action(other),
                s.key()
            ),
        };
        if !self.moves_for(&s.cells, s.to_move).contains(&a) {
            panic!("illegal action {} in state {}", self.format_action(a), s.key());
        }
        let mut cells = s.cells.clone();
        let key = s.key
            ^ self.zobrist.cell(from, s.to_move)
            ^ self.zobrist.cell(to, s.to_move.other())
            ^ self.zobrist.cell(to, s.to_move)
            ^ self.zobrist.to_move();
        cells[from] = 0;
        cells[to] = s.to_move.cell();
        State::new(cells, s.to_move.other(), s.ply + 1, key, Extras::None)
    }

    fn is_terminal(&self, s: &State) -> bool {
        self.moves_for(&s.cells, s.to_move).is_empty()
    }

    fn gain(&self, s: &State) -> Gain {
        assert!(self.is_terminal(s), "gain called on non-terminal state {}", s.key());
        s.to_move.other().sign()
    }

    fn piece_counts(&self, s: &State) -> (u32, u32) {
        let first = s.cells.iter().filter(|&&v| v == 1).count() as u32;
        let second = s.cells.iter().filter(|&&v| v == -1).count() as u32;
        (first, second)
    }

    fn length_profile(&self) -> LengthProfile {
        LengthProfile::Approximate(self.mean_length)
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
        let (a, b) = text
            .split_once('-')
            .ok_or_else(|| NotationError(format!("expected from-to, got '{text}'")))?;
        Ok(Action::Step {
            from: parse_cell(a, self.n, self.n)?,
            to: parse_cell(b, self.n, self.n)?,
        })
    }

    fn format_action(&self, a: Action) -> String {
        match a {
            Action::Step { from, to } => format!(
                "{}-{}",
                cell_name(from as usize, self.n),
                cell_name(to as usize, self.n)
            ),
            other => panic!("{other:?} is not a clobber action"),
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

    fn supports_heuristic(&self, kind: HeuristicKind) -> bool {
        kind != HeuristicKind::Score
    }

    fn recompute_key(&self, s: &State) -> StateKey {
        StateKey(self.zobrist.full(&s.cells, s.to_move))
    }
}
