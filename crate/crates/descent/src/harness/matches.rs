//! Head-to-head match play.
//!
//! A [`Contender`] is anything that can pick moves: a search engine over an
//! adaptive evaluation, a uniform random player, the exact solver, or the
//! scripted stubs the tests use. [`play_match`] runs one game between two
//! contenders and [`duel`] runs a color-balanced series in parallel, both
//! fully determined by their seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eval::{AdaptiveEval, TerminalEval};
use crate::game::{Action, Gain, Game, MatchContext, Player, State};
use crate::oracle::Solver;
use crate::search::{run_search, Algorithm, Budget, SearchContext, SearchTable};

/// A match participant.
pub enum Contender<'a> {
    /// A search algorithm over an adaptive evaluation.
    Engine {
        label: String,
        algorithm: Algorithm,
        budget: Budget,
        adaptive: &'a AdaptiveEval,
        terminal: &'a TerminalEval,
    },
    /// Uniform random moves.
    Random { label: String },
    /// Exact minimax play from a freshly solved position.
    Oracle { label: String },
    /// Gives up on its first turn (a strength floor for tournaments).
    Resign { label: String },
    /// Plays a fixed move list, resigning once it runs out. Lets tests
    /// drive specific trajectories and trip the illegal-move trap.
    Scripted { label: String, moves: Vec<Action> },
}

impl Contender<'_> {
    pub fn label(&self) -> &str {
        match self {
            Contender::Engine { label, .. }
            | Contender::Random { label }
            | Contender::Oracle { label }
            | Contender::Resign { label }
            | Contender::Scripted { label, .. } => label,
        }
    }
}

/// One finished game between two contenders.
#[derive(Clone, Debug)]
pub struct MatchRecord {
    /// Label of the player who moved first.
    pub first: String,
    /// Label of the player who moved second.
    pub second: String,
    /// Result from the first player's point of view.
    pub result: Gain,
    /// Moves played.
    pub plies: u32,
    /// The seed this game ran under.
    pub seed: u64,
    /// Present when the game ended by a rule violation or resignation
    /// instead of on the board.
    pub diagnostic: Option<String>,
}

/// Per-player state across one match: the engine's transposition table
/// lives for the whole game, the solver memoizes across moves, a script
/// tracks its cursor.
struct SideState<'a> {
    table: SearchTable,
    solver: Option<Solver<'a>>,
    cursor: usize,
}

impl<'a> SideState<'a> {
    fn new() -> SideState<'a> {
        SideState { table: SearchTable::new(), solver: None, cursor: 0 }
    }
}

enum Decision {
    Move(Action),
    Resign,
}

/// Play one game. The first `opening_plies` moves are uniform random (from
/// the match seed) to vary the games of deterministic contenders; pass 0
/// for pure head-to-head determinism.
///
/// An illegal move from a contender is a bug trap: the offender immediately
/// loses and the record carries a diagnostic.
pub fn play_match(
    game: &dyn Game,
    first: &Contender,
    second: &Contender,
    opening_plies: u32,
    seed: u64,
) -> MatchRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = game.initial_state();
    let mut seen = MatchContext::default();
    let mut sides = [SideState::new(), SideState::new()];
    let mut plies = 0u32;
    // All supported games shorten monotonically, so this cap only exists to
    // turn a rules bug into a diagnosable record instead of a hang.
    let cap = (game.rows() * game.cols() * 8 + 64) as u32;

    let record = |result: Gain, plies: u32, diagnostic: Option<String>| MatchRecord {
        first: first.label().to_string(),
        second: second.label().to_string(),
        result,
        plies,
        seed,
        diagnostic,
    };

    loop {
        if game.is_terminal(&s) {
            return record(game.gain(&s), plies, None);
        }
        let mover = s.to_move();
        let (player, side_idx) = match mover {
            Player::First => (first, 0),
            Player::Second => (second, 1),
        };
        if plies >= cap {
            return record(0, plies, Some(format!("game hit the {cap}-ply safety cap")));
        }
        let actions = game.legal_actions(&s);
        let decision = if plies < opening_plies {
            Decision::Move(actions[rng.gen_range(0..actions.len())])
        } else {
            decide(game, player, &mut sides[side_idx], &s, seen, &mut rng)
        };
        let action = match decision {
            Decision::Resign => {
                return record(
                    -mover.sign(),
                    plies,
                    Some(format!("{} resigned", player.label())),
                );
            }
            Decision::Move(a) => a,
        };
        if !actions.contains(&action) {
            return record(
                -mover.sign(),
                plies,
                Some(format!(
                    "{} played illegal {} at {}",
                    player.label(),
                    game.format_action(action),
                    game.to_fen(&s)
                )),
            );
        }
        seen.observe(mover, actions.len());
        s = game.apply(&s, action);
        plies += 1;
    }
}

fn decide<'a>(
    game: &'a dyn Game,
    player: &Contender,
    side: &mut SideState<'a>,
    s: &State,
    seen: MatchContext,
    rng: &mut ChaCha8Rng,
) -> Decision {
    match player {
        Contender::Engine { algorithm, budget, adaptive, terminal, .. } => {
            let mut ctx = SearchContext {
                game,
                adaptive,
                terminal,
                table: &mut side.table,
                trace: None,
            };
            Decision::Move(run_search(*algorithm, &mut ctx, s, seen, *budget).action)
        }
        Contender::Random { .. } => {
            let actions = game.legal_actions(s);
            Decision::Move(actions[rng.gen_range(0..actions.len())])
        }
        Contender::Oracle { .. } => {
            let solver = side.solver.get_or_insert_with(|| Solver::new(game));
            Decision::Move(solver.optimal_actions(s)[0])
        }
        Contender::Resign { .. } => Decision::Resign,
        Contender::Scripted { moves, .. } => {
            let at = side.cursor;
            side.cursor += 1;
            match moves.get(at) {
                Some(a) => Decision::Move(*a),
                None => Decision::Resign,
            }
        }
    }
}

/// A color-balanced series between two contenders.
pub struct DuelOutcome {
    pub records: Vec<MatchRecord>,
    /// Wins for `a`, counting draws half.
    pub score_a: f64,
    pub wins_a: u32,
    pub draws: u32,
    pub losses_a: u32,
    pub games: u32,
}

/// Play `2 * rounds` games in parallel, `a` moving first in the even games
/// and second in the odd ones. Game seeds derive from `seed`, so the series
/// is reproducible regardless of thread scheduling.
pub fn duel(
    game: &dyn Game,
    a: &Contender,
    b: &Contender,
    rounds: u32,
    opening_plies: u32,
    seed: u64,
) -> DuelOutcome {
    let games = 2 * rounds;
    let records: Vec<MatchRecord> = (0..games)
        .into_par_iter()
        .map(|i| {
            let game_seed = derive_seed(seed, i as u64);
            if i % 2 == 0 {
                play_match(game, a, b, opening_plies, game_seed)
            } else {
                play_match(game, b, a, opening_plies, game_seed)
            }
        })
        .collect();
    let mut outcome = DuelOutcome {
        records,
        score_a: 0.0,
        wins_a: 0,
        draws: 0,
        losses_a: 0,
        games,
    };
    for (i, rec) in outcome.records.iter().enumerate() {
        let for_a = if i % 2 == 0 { rec.result } else { -rec.result };
        match for_a {
            1 => outcome.wins_a += 1,
            0 => outcome.draws += 1,
            _ => outcome.losses_a += 1,
        }
    }
    outcome.score_a =
        (outcome.wins_a as f64 + 0.5 * outcome.draws as f64) / outcome.games as f64;
    outcome
}

/// Stable per-game seed derivation (splitmix64 over the master seed and
/// the game's index).
pub(crate) fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut x = master ^ stream.wrapping_mul(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}
