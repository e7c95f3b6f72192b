//! Breakthrough on square boards from 5x5 to 8x8.
//!
//! Each side starts with two full rows of pawns; the first player starts at
//! the bottom and pushes toward row 1, the second pushes toward the bottom.
//! Pawns step one row forward, straight only onto an empty cell, diagonally
//! onto an empty cell or capturing an enemy. Reaching the far row or taking
//! the last enemy pawn wins; a player with no move at all loses.

use crate::eval::HeuristicKind;

use super::{
    cell_name, fen, mean_random_length, parse_cell, Action, Extras, Gain, Game, LengthProfile,
    NotationError, Player, State, StateKey, Zobrist, D4,
};

/// The pawn-race game.
pub struct Breakthrough {
    n: usize,
    zobrist: Zobrist,
    mean_length: f64,
}

impl Breakthrough {
    /// Board sizes 5 through 8.
    pub fn new(n: usize) -> Result<Breakthrough, NotationError> {
        if !(5..=8).contains(&n) {
            return Err(NotationError(format!("breakthrough size {n} out of range 5-8")));
        }
        let mut g = Breakthrough {
            n,
            zobrist: Zobrist::new(n * n, &format!("breakthrough-{n}")),
            mean_length: 0.0,
        };
        g.mean_length = mean_random_length(&g, 1000, 0x62726b0 + n as u64);
        Ok(g)
    }

    /// Override the measured mean game length.
    pub fn with_mean_length(mut self, len: f64) -> Breakthrough {
        self.mean_length = len;
        self
    }

    fn forward(&self, player: Player) -> isize {
        match player {
            Player::First => -1,
            Player::Second => 1,
        }
    }

    fn home_row(&self, player: Player) -> usize {
        match player {
            Player::First => 0,
            Player::Second => self.n - 1,
        }
    }

    fn moves_for(&self, cells: &[i8], player: Player) -> Vec<Action> {
        let n = self.n as isize;
        let own = player.cell();
        let dr = self.forward(player);
        let mut out = Vec::new();
        for from in 0..cells.len() {
            if cells[from] != own {
                continue;
            }
            let (r, c) = ((from / self.n) as isize, (from % self.n) as isize);
            let tr = r + dr;
            if tr < 0 || tr >= n {
                continue;
            }
            for dc in [-1isize, 0, 1] {
                let tc = c + dc;
                if tc < 0 || tc >= n {
                    continue;
                }
                let to = (tr * n + tc) as usize;
                let target = cells[to];
                let ok = if dc == 0 { target == 0 } else { target != own };
                if ok {
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

    fn winner(&self, s: &State) -> Option<Player> {
        for c in 0..self.n {
            if s.cells[self.home_row(Player::First) * self.n + c] == 1 {
                return Some(Player::First);
            }
            if s.cells[self.home_row(Player::Second) * self.n + c] == -1 {
                return Some(Player::Second);
            }
        }
        let (first, second) = self.piece_counts(s);
        if second == 0 {
            return Some(Player::First);
        }
        if first == 0 {
            return Some(Player::Second);
        }
        if self.moves_for(&s.cells, s.to_move).is_empty() {
            return Some(s.to_move.other());
        }
        None
    }

    fn build(&self, cells: Vec<i8>, to_move: Player, ply: u32) -> State {
        let key = self.zobrist.full(&cells, to_move);
        State::new(cells, to_move, ply, key, Extras::None)
    }
}

impl Game for Breakthrough {
    fn name(&self) -> String {
        format!("breakthrough-{}", self.n)
    }

    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn initial_state(&self) -> State {
        let mut cells = vec![0i8; self.n * self.n];
        for c in 0..self.n {
            cells[c] = -1;
            cells[self.n + c] = -1;
            cells[(self.n - 2) * self.n + c] = 1;
            cells[(self.n - 1) * self.n + c] = 1;
        }
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
        let mut key = s.key ^ self.zobrist.to_move();
        key ^= self.zobrist.cell(from, s.to_move);
        if cells[to] != 0 {
            key ^= self.zobrist.cell(to, s.to_move.other());
        }
        key ^= self.zobrist.cell(to, s.to_move);
        cells[from] = 0;
        cells[to] = s.to_move.cell();
        State::new(cells, s.to_move.other(), s.ply + 1, key, Extras::None)
    }

    fn is_terminal(&self, s: &State) -> bool {
        self.winner(s).is_some()
    }

    fn gain(&self, s: &State) -> Gain {
        match self.winner(s) {
            Some(p) => p.sign(),
            None => panic!("gain called on non-terminal state {}", s.key()),
        }
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
        let mirrored = self.build(D4::FlipH.map_cells(&s.cells, self.n), s.to_move, s.ply);
        if mirrored.key == s.key {
            vec![s.clone()]
        } else {
            vec![s.clone(), mirrored]
        }
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
            other => panic!("{other:?} is not a breakthrough action"),
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

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn opening_move_count() {
        let g = Breakthrough::new(5).unwrap();
        let actions = g.legal_actions(&g.initial_state());
        assert_eq!(actions.len(), 13);
    }

    #[test]
    fn straight_moves_cannot_capture() {
        let g = Breakthrough::new(5).unwrap();
        let s = g.from_fen("...../...../..o../..x../..... x 8").unwrap();
        let moves = g.legal_actions(&s);
        let from = (3 * 5 + 2) as u16;
        assert!(!moves.contains(&Action::Step { from, to: 2 * 5 + 2 }));
        assert!(moves.contains(&Action::Step { from, to: 2 * 5 + 1 }));
        assert!(moves.contains(&Action::Step { from, to: 2 * 5 + 3 }));
    }

    #[test]
    fn diagonal_capture_removes_the_pawn() {
        let g = Breakthrough::new(5).unwrap();
        let s = g.from_fen("...../...../.o.../..x../..... x 8").unwrap();
        let s2 = g.apply(&s, Action::Step { from: 3 * 5 + 2, to: 2 * 5 + 1 });
        assert_eq!(g.piece_counts(&s2), (1, 0));
        assert!(g.is_terminal(&s2));
        assert_eq!(g.gain(&s2), 1);
        assert_eq!(StateKey(s2.key), g.recompute_key(&s2));
    }

    #[test]
    fn reaching_the_far_row_wins() {
        let g = Breakthrough::new(5).unwrap();
        let s = g.from_fen("...../.x.../...o./...o./..... x 20").unwrap();
        let s2 = g.apply(&s, Action::Step { from: 5 + 1, to: 1 });
        assert!(g.is_terminal(&s2));
        assert_eq!(g.gain(&s2), 1);
    }

    #[test]
    fn facing_walls_still_allow_diagonal_captures() {
        let g = Breakthrough::new(5).unwrap();
        let s = g.from_fen("...../ooooo/xxxxx/...../..... x 10").unwrap();
        assert!(!g.is_terminal(&s));
        let moves = g.legal_actions(&s);
        assert!(!moves.is_empty());
        assert!(moves
            .iter()
            .all(|a| matches!(a, Action::Step { from, to } if from % 5 != to % 5)));
    }

    #[test]
    fn random_games_terminate_and_hash_consistently() {
        let g = Breakthrough::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..80 {
            let mut s = g.initial_state();
            while !g.is_terminal(&s) {
                let actions = g.legal_actions(&s);
                s = g.apply(&s, actions[rng.gen_range(0..actions.len())]);
                assert_eq!(StateKey(s.key), g.recompute_key(&s));
            }
            assert_ne!(g.gain(&s), 0);
        }
    }

    #[test]
    fn mirror_symmetry_preserves_results() {
        let g = Breakthrough::new(5).unwrap();
        let s = g.from_fen("x..../...o./...o./...../..... o 9").unwrap();
        let syms = g.symmetries(&s);
        assert_eq!(syms.len(), 2);
        assert_eq!(g.is_terminal(&syms[1]), g.is_terminal(&s));
        assert_eq!(syms[1].cells[4], 1);
    }

    #[test]
    fn mean_length_is_measured() {
        let g = Breakthrough::new(5).unwrap();
        match g.length_profile() {
            LengthProfile::Approximate(l) => assert!(l > 10.0 && l < 200.0),
            other => panic!("expected approximate profile, got {other:?}"),
        }
    }

    #[test]
    fn move_notation_round_trips() {
        let g = Breakthrough::new(5).unwrap();
        let a = Action::Step { from: 21, to: 16 };
        assert_eq!(g.parse_action(&g.format_action(a)).unwrap(), a);
        assert!(g.parse_action("b9-a1").is_err());
        assert!(g.parse_action("b2b3").is_err());
    }
}
