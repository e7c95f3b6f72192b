//! Hex on boards from 3x3 to 13x13, with an optional pie rule (swap).
//!
//! The first player owns the top and bottom edges, the second player the left
//! and right edges; connecting your edges wins, and a full board always has a
//! winner. Connectivity is maintained incrementally with a union-find over
//! same-color neighbor groups plus four virtual edge groups.
//!
//! The swap is implemented as a board reflection: taking over the opening
//! stone at `(r, c)` replaces it with a second-player stone at `(c, r)`, so
//! each player always keeps their own edge pair. Coordinates entered after a
//! swap refer to the reflected board.

use crate::eval::HeuristicKind;

use super::{
    cell_name, fen, parse_cell, Action, Extras, Gain, Game, LengthProfile, NotationError, Player,
    State, StateKey, Zobrist, D4,
};

/// Union-find with path compression and union by rank.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<u16>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u16).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: u16) -> u16 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u16, b: u16) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (ra, rb) = if self.rank[ra as usize] < self.rank[rb as usize] {
            (rb, ra)
        } else {
            (ra, rb)
        };
        self.parent[rb as usize] = ra;
        if self.rank[ra as usize] == self.rank[rb as usize] {
            self.rank[ra as usize] += 1;
        }
    }

    fn connected(&mut self, a: u16, b: u16) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Connectivity cache carried inside Hex states. Equality ignores the
/// union-find forest shape: the partition is implied by the cells.
#[derive(Clone, Debug)]
pub struct HexExtras {
    uf: UnionFind,
    winner: Option<Player>,
}

impl PartialEq for HexExtras {
    fn eq(&self, other: &Self) -> bool {
        self.winner == other.winner
    }
}

/// The connection game.
pub struct Hex {
    n: usize,
    swap_enabled: bool,
    zobrist: Zobrist,
}

impl Hex {
    /// Board sizes 3 through 13; `swap` enables the pie rule.
    pub fn new(n: usize, swap: bool) -> Result<Hex, NotationError> {
        if !(3..=13).contains(&n) {
            return Err(NotationError(format!("hex size {n} out of range 3-13")));
        }
        let label = if swap { format!("hex-{n}-swap") } else { format!("hex-{n}") };
        Ok(Hex { n, swap_enabled: swap, zobrist: Zobrist::new(n * n, &label) })
    }

    fn top(&self) -> u16 {
        (self.n * self.n) as u16
    }
    fn bottom(&self) -> u16 {
        (self.n * self.n + 1) as u16
    }
    fn left(&self) -> u16 {
        (self.n * self.n + 2) as u16
    }
    fn right(&self) -> u16 {
        (self.n * self.n + 3) as u16
    }

    fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.n;
        let (r, c) = (idx / n, idx % n);
        const DELTAS: [(isize, isize); 6] = [(-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0)];
        DELTAS.into_iter().filter_map(move |(dr, dc)| {
            let (nr, nc) = (r as isize + dr, c as isize + dc);
            if nr >= 0 && nr < n as isize && nc >= 0 && nc < n as isize {
                Some(nr as usize * n + nc as usize)
            } else {
                None
            }
        })
    }

    fn connect_stone(&self, cells: &[i8], uf: &mut UnionFind, idx: usize, player: Player) {
        let v = player.cell();
        for nb in self.neighbors(idx) {
            if cells[nb] == v {
                uf.union(idx as u16, nb as u16);
            }
        }
        let (r, c) = (idx / self.n, idx % self.n);
        match player {
            Player::First => {
                if r == 0 {
                    uf.union(idx as u16, self.top());
                }
                if r == self.n - 1 {
                    uf.union(idx as u16, self.bottom());
                }
            }
            Player::Second => {
                if c == 0 {
                    uf.union(idx as u16, self.left());
                }
                if c == self.n - 1 {
                    uf.union(idx as u16, self.right());
                }
            }
        }
    }

    fn winner_of(&self, uf: &mut UnionFind) -> Option<Player> {
        if uf.connected(self.top(), self.bottom()) {
            Some(Player::First)
        } else if uf.connected(self.left(), self.right()) {
            Some(Player::Second)
        } else {
            None
        }
    }

    fn rebuild_extras(&self, cells: &[i8]) -> HexExtras {
        let mut uf = UnionFind::new(self.n * self.n + 4);
        for (idx, &v) in cells.iter().enumerate() {
            match v {
                1 => self.connect_stone(cells, &mut uf, idx, Player::First),
                -1 => self.connect_stone(cells, &mut uf, idx, Player::Second),
                _ => {}
            }
        }
        let winner = self.winner_of(&mut uf);
        HexExtras { uf, winner }
    }

    fn build(&self, cells: Vec<i8>, to_move: Player, ply: u32) -> State {
        let key = self.zobrist.full(&cells, to_move);
        let extras = self.rebuild_extras(&cells);
        State::new(cells, to_move, ply, key, Extras::Hex(extras))
    }

    fn extras<'a>(&self, s: &'a State) -> &'a HexExtras {
        match &s.extras {
            Extras::Hex(e) => e,
            _ => panic!("state {} is not a hex state", s.key()),
        }
    }

    /// Whether the pie rule is available in `s` (second player, after the
    /// very first stone).
    pub fn swap_available(&self, s: &State) -> bool {
        self.swap_enabled && s.ply == 1 && s.to_move == Player::Second
    }
}

impl Game for Hex {
    fn name(&self) -> String {
        if self.swap_enabled {
            format!("hex-{}-swap", self.n)
        } else {
            format!("hex-{}", self.n)
        }
    }

    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn initial_state(&self) -> State {
        self.build(vec![0; self.n * self.n], Player::First, 0)
    }

    fn legal_actions(&self, s: &State) -> Vec<Action> {
        assert!(
            !self.is_terminal(s),
            "legal_actions called on terminal state {}",
            s.key()
        );
        let mut out: Vec<Action> = s
            .cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 0)
            .map(|(i, _)| Action::Place(i as u16))
            .collect();
        if self.swap_available(s) {
            out.push(Action::Swap);
        }
        out
    }

    fn apply(&self, s: &State, a: Action) -> State {
        assert!(!self.is_terminal(s), "apply called on terminal state {}", s.key());
        match a {
            Action::Place(i) if (i as usize) < s.cells.len() && s.cells[i as usize] == 0 => {
                let idx = i as usize;
                let mut cells = s.cells.clone();
                cells[idx] = s.to_move.cell();
                let mut extras = self.extras(s).clone();
                self.connect_stone(&cells, &mut extras.uf, idx, s.to_move);
                extras.winner = self.winner_of(&mut extras.uf);
                let key = s.key ^ self.zobrist.cell(idx, s.to_move) ^ self.zobrist.to_move();
                State::new(cells, s.to_move.other(), s.ply + 1, key, Extras::Hex(extras))
            }
            Action::Swap if self.swap_available(s) => {
                let idx = s.cells.iter().position(|&v| v == 1).expect("one stone before swap");
                let (r, c) = (idx / self.n, idx % self.n);
                let mirrored = c * self.n + r;
                let mut cells = vec![0i8; self.n * self.n];
                cells[mirrored] = Player::Second.cell();
                let extras = self.rebuild_extras(&cells);
                let key = s.key
                    ^ self.zobrist.cell(idx, Player::First)
                    ^ self.zobrist.cell(mirrored, Player::Second)
                    ^ self.zobrist.to_move();
                State::new(cells, Player::First, 2, key, Extras::Hex(extras))
            }
            other => panic!(
                "illegal action {} in state {}",
                self.format_action(other),
                s.key()
            ),
        }
    }

    fn is_terminal(&self, s: &State) -> bool {
        self.extras(s).winner.is_some()
    }

    fn gain(&self, s: &State) -> Gain {
        match self.extras(s).winner {
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
        let cells = (self.n * self.n) as u32;
        LengthProfile::Exact(if self.swap_enabled { cells + 1 } else { cells })
    }

    fn remaining_length(&self, s: &State) -> Option<f64> {
        let empty = s.cells.iter().filter(|&&v| v == 0).count();
        Some(empty as f64 + 1.0)
    }

    fn plane_shape(&self) -> (usize, usize, usize) {
        (3, self.n + 2, self.n + 2)
    }

    fn encode_planes(&self, s: &State, out: &mut Vec<f32>) {
        let n = self.n;
        let w = n + 2;
        let base = out.len();
        out.resize(base + 3 * w * w, 0.0);
        let (first, rest) = out[base..].split_at_mut(w * w);
        let (second, turn) = rest.split_at_mut(w * w);
        for c in 0..w {
            first[c] = 1.0;
            first[(w - 1) * w + c] = 1.0;
        }
        for r in 0..w {
            second[r * w] = 1.0;
            second[r * w + w - 1] = 1.0;
        }
        for r in 0..n {
            for c in 0..n {
                match s.cells[r * n + c] {
                    1 => first[(r + 1) * w + c + 1] = 1.0,
                    -1 => second[(r + 1) * w + c + 1] = 1.0,
                    _ => {}
                }
            }
        }
        if s.to_move == Player::First {
            turn.fill(1.0);
        }
    }

    fn symmetries(&self, s: &State) -> Vec<State> {
        let rot = self.build(D4::Rot180.map_cells(&s.cells, self.n), s.to_move, s.ply);
        if rot.key == s.key {
            vec![s.clone()]
        } else {
            vec![s.clone(), rot]
        }
    }

    fn parse_action(&self, text: &str) -> Result<Action, NotationError> {
        if text == "swap" {
            return Ok(Action::Swap);
        }
        parse_cell(text, self.n, self.n).map(Action::Place)
    }

    fn format_action(&self, a: Action) -> String {
        match a {
            Action::Place(i) => cell_name(i as usize, self.n),
            Action::Swap => "swap".into(),
            other => panic!("{other:?} is not a hex action"),
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
        matches!(
            kind,
            HeuristicKind::Classic
                | HeuristicKind::DepthAdditive
                | HeuristicKind::DepthMultiplicative
        )
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
    fn hex3_opening_has_nine_placements() {
        let g = Hex::new(3, false).unwrap();
        assert_eq!(g.legal_actions(&g.initial_state()).len(), 9);
    }

    #[test]
    fn swap_is_offered_once() {
        let g = Hex::new(5, true).unwrap();
        let s0 = g.initial_state();
        assert!(!g.legal_actions(&s0).contains(&Action::Swap));
        let s1 = g.apply(&s0, Action::Place(7));
        assert!(g.legal_actions(&s1).contains(&Action::Swap));
        let s2 = g.apply(&s1, Action::Place(3));
        assert!(!g.legal_actions(&s2).contains(&Action::Swap));
    }

    #[test]
    fn swap_reflects_the_stone() {
        let g = Hex::new(5, true).unwrap();
        let s0 = g.initial_state();
        let s1 = g.apply(&s0, Action::Place(1));
        let s2 = g.apply(&s1, Action::Swap);
        assert_eq!(s2.cells[1 * 5 + 0], -1);
        assert_eq!(s2.cells.iter().filter(|&&v| v != 0).count(), 1);
        assert_eq!(s2.to_move, Player::First);
        assert_eq!(s2.ply, 2);
        assert_eq!(StateKey(s2.key), g.recompute_key(&s2));
    }

    #[test]
    fn vertical_chain_wins_for_first() {
        let g = Hex::new(3, false).unwrap();
        let mut s = g.initial_state();
        for (first, second) in [(1usize, 0usize), (4, 3), (7, 6)] {
            s = g.apply(&s, Action::Place(first as u16));
            if !g.is_terminal(&s) {
                s = g.apply(&s, Action::Place(second as u16));
            }
        }
        assert!(g.is_terminal(&s));
        assert_eq!(g.gain(&s), 1);
    }

    #[test]
    fn horizontal_chain_wins_for_second() {
        let g = Hex::new(3, false).unwrap();
        let s = g.from_fen("xx./ooo/x.. x 6").unwrap();
        assert!(g.is_terminal(&s));
        assert_eq!(g.gain(&s), -1);
    }

    #[test]
    fn random_games_always_end_with_a_winner() {
        let g = Hex::new(5, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let mut s = g.initial_state();
            while !g.is_terminal(&s) {
                let actions = g.legal_actions(&s);
                s = g.apply(&s, actions[rng.gen_range(0..actions.len())]);
            }
            assert_ne!(g.gain(&s), 0);
            assert_eq!(StateKey(s.key), g.recompute_key(&s));
        }
    }

    #[test]
    fn winner_matches_rebuilt_connectivity() {
        let g = Hex::new(4, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut s = g.initial_state();
            while !g.is_terminal(&s) {
                let actions = g.legal_actions(&s);
                s = g.apply(&s, actions[rng.gen_range(0..actions.len())]);
                let rebuilt = g.rebuild_extras(&s.cells);
                assert_eq!(g.extras(&s).winner, rebuilt.winner);
            }
        }
    }

    #[test]
    fn bridge_is_not_a_connection() {
        let g = Hex::new(3, false).unwrap();
        let s = g.from_fen(".x./x../... o 2").unwrap();
        assert!(!g.is_terminal(&s));
    }

    #[test]
    fn extended_board_planes_mark_edges() {
        let g = Hex::new(3, false).unwrap();
        let mut planes = Vec::new();
        g.encode_planes(&g.initial_state(), &mut planes);
        let w = 5;
        assert_eq!(planes.len(), 3 * w * w);
        assert_eq!(planes[0], 1.0);
        assert_eq!(planes[2 * w], 0.0);
        assert_eq!(planes[w * w + w], 1.0);
        assert_eq!(planes[w * w + w + 2], 0.0);
        assert!(planes[2 * w * w..].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn rot180_symmetry_is_its_own_game() {
        let g = Hex::new(5, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut s = g.initial_state();
            for _ in 0..rng.gen_range(0..12) {
                if g.is_terminal(&s) {
                    break;
                }
                let actions = g.legal_actions(&s);
                s = g.apply(&s, actions[rng.gen_range(0..actions.len())]);
            }
            for t in g.symmetries(&s) {
                assert_eq!(g.is_terminal(&t), g.is_terminal(&s));
                assert_eq!(t.to_move, s.to_move);
            }
        }
    }

    #[test]
    fn remaining_length_counts_empty_cells() {
        let g = Hex::new(3, true).unwrap();
        let s = g.apply(&g.initial_state(), Action::Place(4));
        assert_eq!(g.remaining_length(&s), Some(9.0));
    }

    #[test]
    fn swap_notation_round_trips() {
        let g = Hex::new(5, true).unwrap();
        assert_eq!(g.parse_action("swap").unwrap(), Action::Swap);
        assert_eq!(g.format_action(Action::Swap), "swap");
        assert_eq!(g.parse_action("c2").unwrap(), Action::Place(7));
        assert_eq!(g.format_action(Action::Place(7)), "c2");
    }

    #[test]
    fn size_range_is_validated() {
        assert!(Hex::new(2, false).is_err());
        assert!(Hex::new(14, false).is_err());
        assert!(Hex::new(13, true).is_ok());
    }
}
