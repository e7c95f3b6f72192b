//! Game rules, states, and actions.
//!
//! Every game implements the [`Game`] trait over a shared [`State`]
//! representation: a row-major cell vector (`0` empty, `1` first player,
//! `-1` second player), the player to move, the ply count, an incrementally
//! maintained 64-bit hash, and rule-specific extras (the Hex swap flag and
//! connectivity structure). Values everywhere in the engine are from the
//! first player's point of view; the first player maximizes, the second
//! minimizes.

use std::fmt;

use crate::eval::HeuristicKind;

pub mod breakthrough;
pub mod clobber;
pub mod hex;
pub mod othello;
pub mod synthetic;
pub mod tictactoe;
mod zobrist;

pub use zobrist::Zobrist;

/// One of the two players. The first player moves first and maximizes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Player {
    First,
    Second,
}

impl Player {
    /// The opponent.
    pub fn other(self) -> Player {
        match self {
            Player::First => Player::Second,
            Player::Second => Player::First,
        }
    }

    /// `+1` for the first player, `-1` for the second.
    pub fn sign(self) -> i8 {
        match self {
            Player::First => 1,
            Player::Second => -1,
        }
    }

    /// Cell value for this player's pieces.
    pub fn cell(self) -> i8 {
        self.sign()
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::First => write!(f, "first"),
            Player::Second => write!(f, "second"),
        }
    }
}

/// Terminal gain from the first player's point of view: win `+1`, draw `0`, loss `-1`.
pub type Gain = i8;

/// A move in any of the supported games.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Action {
    /// Put a piece on the cell with this row-major index.
    Place(u16),
    /// Move a piece between two cells (Breakthrough, Clobber).
    Step { from: u16, to: u16 },
    /// Hex pie rule: take over the opening move as the second player.
    Swap,
    /// Othello: forfeit the turn when no placement is legal.
    Pass,
}

/// Transposition-table key of a state. Equal states produce equal keys;
/// distinct states collide only with 64-bit-hash probability.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateKey(pub u64);

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// Rule-specific state beyond the cell vector.
#[derive(Clone, Debug)]
pub(crate) enum Extras {
    None,
    Hex(hex::HexExtras),
    /// Node id in a hand-built synthetic tree.
    Node(u32),
}

impl PartialEq for Extras {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Extras::None, Extras::None) => true,
            (Extras::Hex(a), Extras::Hex(b)) => a == b,
            (Extras::Node(a), Extras::Node(b)) => a == b,
            _ => false,
        }
    }
}

/// A game position. Cheap to clone; `apply` never mutates its input.
#[derive(Clone, PartialEq, Debug)]
pub struct State {
    pub(crate) cells: Vec<i8>,
    pub(crate) to_move: Player,
    pub(crate) ply: u32,
    pub(crate) key: u64,
    pub(crate) extras: Extras,
}

impl State {
    pub(crate) fn new(cells: Vec<i8>, to_move: Player, ply: u32, key: u64, extras: Extras) -> State {
        State { cells, to_move, ply, key, extras }
    }

    /// Row-major cell contents: `0` empty, `1` first player, `-1` second player.
    pub fn cells(&self) -> &[i8] {
        &self.cells
    }

    /// The player to move.
    pub fn to_move(&self) -> Player {
        self.to_move
    }

    /// Number of moves played to reach this state.
    pub fn ply(&self) -> u32 {
        self.ply
    }

    /// The state's transposition key.
    pub fn key(&self) -> StateKey {
        StateKey(self.key)
    }
}

/// How long games of a rule set run, for the depth-based reward heuristics.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum LengthProfile {
    /// Every game lasts at most this many moves and the bound is tight enough
    /// to count remaining moves exactly.
    Exact(u32),
    /// Mean length of uniformly random games, measured at construction.
    Approximate(f64),
}

/// Per-match bookkeeping for the mobility heuristic: how many moves each
/// player had available, averaged over the turns they actually took.
#[derive(Clone, Copy, Default, Debug)]
pub struct MatchContext {
    moves_first: f64,
    turns_first: u32,
    moves_second: f64,
    turns_second: u32,
}

impl MatchContext {
    /// Record that `player` chose among `available` legal moves.
    pub fn observe(&mut self, player: Player, available: usize) {
        match player {
            Player::First => {
                self.moves_first += available as f64;
                self.turns_first += 1;
            }
            Player::Second => {
                self.moves_second += available as f64;
                self.turns_second += 1;
            }
        }
    }

    /// Copy of this context with one more observation folded in.
    pub fn observed(mut self, player: Player, available: usize) -> MatchContext {
        self.observe(player, available);
        self
    }

    /// Mean number of available moves per turn taken. A player who never
    /// took a turn contributes a neutral mean of 1.
    pub fn mean_moves(&self, player: Player) -> f64 {
        let (sum, turns) = match player {
            Player::First => (self.moves_first, self.turns_first),
            Player::Second => (self.moves_second, self.turns_second),
        };
        if turns == 0 {
            1.0
        } else {
            sum / turns as f64
        }
    }
}

/// Error from parsing a move, a position string, or a game name.
#[derive(Debug, PartialEq)]
pub struct NotationError(pub String);

impl fmt::Display for NotationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for NotationError {}

/// Rules of a two-player zero-sum perfect-information game.
///
/// Contract: `legal_actions` must not be called on terminal states, `gain`
/// only on terminal states, and `apply` only with actions from
/// `legal_actions`. Violations are engine bugs and panic with a message
/// naming the offending call.
pub trait Game: Send + Sync {
    /// Identifier such as `hex-5` or `othello-8`.
    fn name(&self) -> String;

    /// Board height in cells.
    fn rows(&self) -> usize;

    /// Board width in cells.
    fn cols(&self) -> usize;

    /// The starting position.
    fn initial_state(&self) -> State;

    /// Legal moves in canonical order: placements by row-major cell index,
    /// piece moves by (from, to), `Swap` after all placements, `Pass` alone.
    fn legal_actions(&self, s: &State) -> Vec<Action>;

    /// The position after playing `a` in `s`. `s` is unchanged.
    fn apply(&self, s: &State, a: Action) -> State;

    /// Whether the game is over in `s`.
    fn is_terminal(&self, s: &State) -> bool;

    /// Game result from the first player's point of view.
    fn gain(&self, s: &State) -> Gain;

    /// Piece counts `(first, second)` on the board.
    fn piece_counts(&self, s: &State) -> (u32, u32);

    /// Final score margin from the first player's point of view, for games
    /// that define one (Othello's disc differential).
    fn score(&self, s: &State) -> Option<f64> {
        let _ = s;
        None
    }

    /// Game-length profile used by the depth-based heuristics.
    fn length_profile(&self) -> LengthProfile;

    /// Game-specific count of remaining moves for the additive depth
    /// heuristic, when the general formula does not apply (Hex).
    fn remaining_length(&self, s: &State) -> Option<f64> {
        let _ = s;
        None
    }

    /// Shape of the network input as `(planes, rows, cols)`.
    fn plane_shape(&self) -> (usize, usize, usize);

    /// Append the position's input planes (row-major, plane by plane) to `out`.
    fn encode_planes(&self, s: &State, out: &mut Vec<f32>);

    /// All value-preserving symmetric variants of `s`, including `s` itself,
    /// deduplicated by state key.
    fn symmetries(&self, s: &State) -> Vec<State>;

    /// Parse a move in the game's text notation.
    fn parse_action(&self, text: &str) -> Result<Action, NotationError>;

    /// Format a move in the game's text notation.
    fn format_action(&self, a: Action) -> String;

    /// One-line position string; inverse of `from_fen`.
    fn to_fen(&self, s: &State) -> String;

    /// Parse a one-line position string produced by `to_fen`.
    fn from_fen(&self, fen: &str) -> Result<State, NotationError>;

    /// Whether a reward heuristic is meaningful for this game.
    fn supports_heuristic(&self, kind: HeuristicKind) -> bool;

    /// Recompute the state key from scratch (consistency checks).
    fn recompute_key(&self, s: &State) -> StateKey;
}

/// Construct a game by name. `swap` enables the Hex pie rule and is ignored
/// by the other games.
pub fn by_name(name: &str, size: usize, swap: bool) -> Result<Box<dyn Game>, NotationError> {
    match name {
        "tictactoe" => {
            if size != 3 {
                return Err(NotationError("tictactoe is played on size 3".into()));
            }
            Ok(Box::new(tictactoe::TicTacToe::new()))
        }
        "hex" => Ok(Box::new(hex::Hex::new(size, swap)?)),
        "othello" => Ok(Box::new(othello::Othello::new(size)?)),
        "breakthrough" => Ok(Box::new(breakthrough::Breakthrough::new(size)?)),
        "clobber" => Ok(Box::new(clobber::Clobber::new(size)?)),
        other => Err(NotationError(format!(
            "unknown game '{other}' (expected tictactoe, hex, othello, breakthrough, clobber)"
        ))),
    }
}

/// ASCII rendering of a position: column letters on top, 1-based row
/// numbers on the left, `x` and `o` pieces. Hex rows are staggered to show
/// the rhombus.
pub fn render_board(game: &dyn Game, s: &State) -> String {
    let (rows, cols) = (game.rows(), game.cols());
    let stagger = game.name().starts_with("hex");
    let mut out = String::from("   ");
    for c in 0..cols {
        out.push((b'a' + c as u8) as char);
        out.push(' ');
    }
    out.push('\n');
    for r in 0..rows {
        out.push_str(&format!("{:>2} ", r + 1));
        if stagger {
            out.push_str(&" ".repeat(r));
        }
        for c in 0..cols {
            out.push(match s.cells()[r * cols + c] {
                1 => 'x',
                -1 => 'o',
                _ => '.',
            });
            out.push(' ');
        }
        out.push('\n');
    }
    out
}

/// Mean length of `games` uniformly random games under a fixed seed.
pub fn mean_random_length(game: &dyn Game, games: usize, seed: u64) -> f64 {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0u64;
    for _ in 0..games {
        let mut s = game.initial_state();
        while !game.is_terminal(&s) {
            let actions = game.legal_actions(&s);
            let a = actions[rng.gen_range(0..actions.len())];
            s = game.apply(&s, a);
        }
        total += s.ply() as u64;
    }
    total as f64 / games as f64
}

/// Name of a cell in letter-number notation: column letter, 1-based row.
pub(crate) fn cell_name(idx: usize, cols: usize) -> String {
    let row = idx / cols;
    let col = idx % cols;
    format!("{}{}", (b'a' + col as u8) as char, row + 1)
}

/// Parse letter-number cell notation into a row-major index.
pub(crate) fn parse_cell(text: &str, rows: usize, cols: usize) -> Result<u16, NotationError> {
    let bytes = text.as_bytes();
    if bytes.len() < 2 || !bytes[0].is_ascii_lowercase() {
        return Err(NotationError(format!("bad cell '{text}'")));
    }
    let col = (bytes[0] - b'a') as usize;
    let row: usize = text[1..]
        .parse::<usize>()
        .ok()
        .and_then(|r| r.checked_sub(1))
        .ok_or_else(|| NotationError(format!("bad cell '{text}'")))?;
    if row >= rows || col >= cols {
        return Err(NotationError(format!(
            "cell '{text}' is off the {rows}x{cols} board"
        )));
    }
    Ok((row * cols + col) as u16)
}

/// The eight square-board symmetries.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum D4 {
    Identity,
    Rot90,
    Rot180,
    Rot270,
    FlipH,
    FlipV,
    FlipMain,
    FlipAnti,
}

impl D4 {
    pub(crate) const ALL: [D4; 8] = [
        D4::Identity,
        D4::Rot90,
        D4::Rot180,
        D4::Rot270,
        D4::FlipH,
        D4::FlipV,
        D4::FlipMain,
        D4::FlipAnti,
    ];

    /// Image of cell `(r, c)` on an `n` by `n` board.
    pub(crate) fn map(self, r: usize, c: usize, n: usize) -> (usize, usize) {
        let m = n - 1;
        match self {
            D4::Identity => (r, c),
            D4::Rot90 => (c, m - r),
            D4::Rot180 => (m - r, m - c),
            D4::Rot270 => (m - c, r),
            D4::FlipH => (r, m - c),
            D4::FlipV => (m - r, c),
            D4::FlipMain => (c, r),
            D4::FlipAnti => (m - c, m - r),
        }
    }

    /// Transform a whole cell vector.
    pub(crate) fn map_cells(self, cells: &[i8], n: usize) -> Vec<i8> {
        let mut out = vec![0i8; cells.len()];
        for r in 0..n {
            for c in 0..n {
                let (tr, tc) = self.map(r, c, n);
                out[tr * n + tc] = cells[r * n + c];
            }
        }
        out
    }
}

/// Standard FEN-style helpers shared by the games: `<rows>/<...> <x|o> <ply>`.
pub(crate) mod fen {
    use super::{NotationError, Player};

    pub(crate) fn rows_to_text(cells: &[i8], rows: usize, cols: usize) -> String {
        let mut out = String::new();
        for r in 0..rows {
            if r > 0 {
                out.push('/');
            }
            for c in 0..cols {
                out.push(match cells[r * cols + c] {
                    0 => '.',
                    1 => 'x',
                    -1 => 'o',
                    v => panic!("cell value {v} out of range"),
                });
            }
        }
        out
    }

    pub(crate) fn rows_from_text(
        text: &str,
        rows: usize,
        cols: usize,
    ) -> Result<Vec<i8>, NotationError> {
        let mut cells = Vec::with_capacity(rows * cols);
        let parts: Vec<&str> = text.split('/').collect();
        if parts.len() != rows {
            return Err(NotationError(format!(
                "expected {rows} rows, got {}",
                parts.len()
            )));
        }
        for part in parts {
            if part.len() != cols {
                return Err(NotationError(format!(
                    "expected {cols} cells per row, got '{part}'"
                )));
            }
            for ch in part.chars() {
                cells.push(match ch {
                    '.' => 0,
                    'x' => 1,
                    'o' => -1,
                    other => return Err(NotationError(format!("bad cell char '{other}'"))),
                });
            }
        }
        Ok(cells)
    }

    pub(crate) fn mover_to_text(p: Player) -> char {
        match p {
            Player::First => 'x',
            Player::Second => 'o',
        }
    }

    pub(crate) fn mover_from_text(text: &str) -> Result<Player, NotationError> {
        match text {
            "x" => Ok(Player::First),
            "o" => Ok(Player::Second),
            other => Err(NotationError(format!("bad player '{other}'"))),
        }
    }

    pub(crate) fn ply_from_text(text: &str) -> Result<u32, NotationError> {
        text.parse::<u32>()
            .map_err(|_| NotationError(format!("bad ply count '{text}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_names_round_trip() {
        for cols in [3usize, 5, 8, 13] {
            for idx in 0..cols * cols {
                let name = cell_name(idx, cols);
                assert_eq!(parse_cell(&name, cols, cols).unwrap() as usize, idx);
            }
        }
    }

    #[test]
    fn parse_cell_rejects_off_board() {
        assert!(parse_cell("d1", 3, 3).is_err());
        assert!(parse_cell("a4", 3, 3).is_err());
        assert!(parse_cell("a0", 3, 3).is_err());
        assert!(parse_cell("1a", 3, 3).is_err());
    }

    #[test]
    fn d4_ops_are_bijections() {
        let n = 5;
        for op in D4::ALL {
            let mut seen = vec![false; n * n];
            for r in 0..n {
                for c in 0..n {
                    let (tr, tc) = op.map(r, c, n);
                    assert!(!seen[tr * n + tc]);
                    seen[tr * n + tc] = true;
                }
            }
        }
    }

    #[test]
    fn mobility_context_averages_per_turn() {
        let mut ctx = MatchContext::default();
        ctx.observe(Player::First, 4);
        ctx.observe(Player::First, 8);
        ctx.observe(Player::Second, 5);
        assert_eq!(ctx.mean_moves(Player::First), 6.0);
        assert_eq!(ctx.mean_moves(Player::Second), 5.0);
    }

    #[test]
    fn unused_player_has_neutral_mobility() {
        let ctx = MatchContext::default();
        assert_eq!(ctx.mean_moves(Player::Second), 1.0);
    }
}
