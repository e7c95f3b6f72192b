//! Game-tree search.
//!
//! Six algorithms share one transposition table and one calling convention:
//!
//! * [`best_first`] holds the best-first minimax family: `ubfm` stops each
//!   iteration at the first unexpanded state, `descent` walks every
//!   iteration down to a terminal state, and the completed variants
//!   (`completed_descent`, `ubfm_s`) additionally prove exact results and
//!   never re-enter solved subtrees.
//! * [`alphabeta`] is iterative-deepening alpha-beta with root move
//!   ordering, used as the classical baseline.
//! * [`uct`] is upper-confidence-bound tree search without rollouts; leaf
//!   states are scored by the adaptive evaluation directly.
//!
//! All searches score leaves with an [`AdaptiveEval`] and terminal states
//! with a [`TerminalEval`], and every value is kept from the first player's
//! point of view: the first player maximizes, the second minimizes.

pub mod alphabeta;
pub mod best_first;
pub mod table;
pub mod trace;
pub mod uct;

use std::time::{Duration, Instant};

use crate::eval::{AdaptiveEval, TerminalEval};
use crate::game::{Action, Gain, Game, MatchContext, Player, State};

pub use table::{NodeRecord, SearchTable};
pub use trace::TraceSink;

/// How much work one move decision is allowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Budget {
    /// Search iterations (for alpha-beta: the maximum depth).
    Iterations(u64),
    /// States added to the transposition table.
    Nodes(u64),
    /// Elapsed wall-clock time.
    WallClock(Duration),
}

impl Budget {
    /// Parse `it:500`, `nodes:20000`, or `ms:250`.
    pub fn parse(text: &str) -> Result<Budget, String> {
        let (kind, amount) = text
            .split_once(':')
            .ok_or_else(|| format!("budget `{text}` is not of the form kind:amount"))?;
        let n: u64 = amount
            .parse()
            .map_err(|_| format!("budget amount `{amount}` is not a number"))?;
        if n == 0 {
            return Err(format!("budget amount must be positive, got `{text}`"));
        }
        match kind {
            "it" => Ok(Budget::Iterations(n)),
            "nodes" => Ok(Budget::Nodes(n)),
            "ms" => Ok(Budget::WallClock(Duration::from_millis(n))),
            _ => Err(format!("unknown budget kind `{kind}` (use it, nodes, or ms)")),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Budget::Iterations(n) => format!("it:{n}"),
            Budget::Nodes(n) => format!("nodes:{n}"),
            Budget::WallClock(d) => format!("ms:{}", d.as_millis()),
        }
    }
}

/// Tracks a budget across the iterations of one search call.
pub(crate) struct BudgetClock {
    budget: Budget,
    start: Instant,
    base_expansions: u64,
}

impl BudgetClock {
    pub(crate) fn new(budget: Budget, table: &SearchTable) -> BudgetClock {
        BudgetClock {
            budget,
            start: Instant::now(),
            base_expansions: table.expansions(),
        }
    }

    pub(crate) fn exhausted(&self, iterations_done: u64, table: &SearchTable) -> bool {
        match self.budget {
            Budget::Iterations(n) => iterations_done >= n,
            Budget::Nodes(n) => table.expansions() - self.base_expansions >= n,
            Budget::WallClock(d) => self.start.elapsed() >= d,
        }
    }

    /// Mid-deepening abort check for alpha-beta, driven by its own count
    /// of visited states. Depth budgets never abort a running pass.
    pub(crate) fn deep_abort(&self, visited: u64) -> bool {
        match self.budget {
            Budget::Iterations(_) => false,
            Budget::Nodes(n) => visited >= n,
            Budget::WallClock(d) => visited % 512 == 0 && self.start.elapsed() >= d,
        }
    }
}

/// Which algorithm drives a move decision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Algorithm {
    Ubfm,
    Descent,
    CompletedDescent,
    UbfmS,
    AlphaBetaId,
    Uct { c: f64 },
}

impl Algorithm {
    /// Parse an algorithm name; `uct` takes an optional exploration
    /// constant as `uct:0.4`.
    pub fn parse(text: &str) -> Result<Algorithm, String> {
        match text {
            "ubfm" => return Ok(Algorithm::Ubfm),
            "descent" => return Ok(Algorithm::Descent),
            "completed-descent" => return Ok(Algorithm::CompletedDescent),
            "ubfm-s" => return Ok(Algorithm::UbfmS),
            "alphabeta-id" => return Ok(Algorithm::AlphaBetaId),
            "uct" => return Ok(Algorithm::Uct { c: 0.4 }),
            _ => {}
        }
        if let Some(rest) = text.strip_prefix("uct:") {
            let c: f64 = rest
                .parse()
                .map_err(|_| format!("uct constant `{rest}` is not a number"))?;
            return Ok(Algorithm::Uct { c });
        }
        Err(format!(
            "unknown search algorithm `{text}` (use ubfm, descent, completed-descent, \
             ubfm-s, alphabeta-id, or uct[:c])"
        ))
    }

    pub fn label(&self) -> String {
        match self {
            Algorithm::Ubfm => "ubfm".into(),
            Algorithm::Descent => "descent".into(),
            Algorithm::CompletedDescent => "completed-descent".into(),
            Algorithm::UbfmS => "ubfm-s".into(),
            Algorithm::AlphaBetaId => "alphabeta-id".into(),
            Algorithm::Uct { c } => format!("uct:{c}"),
        }
    }
}

/// Everything a search call borrows: rules, evaluations, table, and an
/// optional trace sink.
pub struct SearchContext<'a> {
    pub game: &'a dyn Game,
    pub adaptive: &'a AdaptiveEval,
    pub terminal: &'a TerminalEval,
    pub table: &'a mut SearchTable,
    pub trace: Option<&'a mut TraceSink>,
}

/// Result of one move decision.
#[derive(Clone, Copy, Debug)]
pub struct SearchOutcome {
    /// The chosen action.
    pub action: Action,
    /// Root value after the search, first-player point of view.
    pub value: f64,
    /// Root resolution value, if proven.
    pub r: Gain,
    /// Whether the root's exact result is proven.
    pub resolved: bool,
    /// Iterations actually spent.
    pub iterations: u64,
}

/// Run one move decision with the given algorithm.
///
/// Panics if `root` is terminal: there is no move to pick.
pub fn run_search(
    algo: Algorithm,
    ctx: &mut SearchContext,
    root: &State,
    seen: MatchContext,
    budget: Budget,
) -> SearchOutcome {
    assert!(
        !ctx.game.is_terminal(root),
        "search called on terminal state {}",
        root.key().0
    );
    let empty = match budget {
        Budget::Iterations(n) | Budget::Nodes(n) => n == 0,
        Budget::WallClock(d) => d.is_zero(),
    };
    assert!(!empty, "search budget must be positive, got {}", budget.label());
    match algo {
        Algorithm::Ubfm => best_first::ubfm(ctx, root, seen, budget),
        Algorithm::Descent => best_first::descent(ctx, root, seen, budget),
        Algorithm::CompletedDescent => best_first::completed_descent(ctx, root, seen, budget),
        Algorithm::UbfmS => best_first::ubfm_s(ctx, root, seen, budget),
        Algorithm::AlphaBetaId => alphabeta::alphabeta_id(ctx, root, seen, budget),
        Algorithm::Uct { c } => uct::uct(ctx, root, seen, budget, c),
    }
}

/// Index of the best child by value alone: argmax for the first player,
/// argmin for the second, ties going to the earliest action.
pub(crate) fn best_plain(vprime: &[f64], maximize: bool) -> usize {
    debug_assert!(!vprime.is_empty());
    let mut best = 0;
    for i in 1..vprime.len() {
        let better = if maximize {
            vprime[i] > vprime[best]
        } else {
            vprime[i] < vprime[best]
        };
        if better {
            best = i;
        }
    }
    best
}

/// Compare two `(r, v)` pairs from the moving player's side. Resolution
/// outranks value: a proven win beats any unproven value and a proven loss
/// loses to any unproven value.
pub(crate) fn lex_better(maximize: bool, cand: (Gain, f64), best: (Gain, f64)) -> bool {
    if cand.0 != best.0 {
        return if maximize {
            cand.0 > best.0
        } else {
            cand.0 < best.0
        };
    }
    if maximize {
        cand.1 > best.1
    } else {
        cand.1 < best.1
    }
}

/// Index of the best child by `(r, v')` lexicographically.
pub(crate) fn lex_best(rec: &NodeRecord, table: &SearchTable, maximize: bool) -> usize {
    debug_assert!(!rec.actions.is_empty());
    let mut best = 0;
    let mut best_pair = (table.resolution(rec.child_keys[0]).0, rec.vprime[0]);
    for i in 1..rec.actions.len() {
        let pair = (table.resolution(rec.child_keys[i]).0, rec.vprime[i]);
        if lex_better(maximize, pair, best_pair) {
            best = i;
            best_pair = pair;
        }
    }
    best
}

/// Index of the best unresolved child by value, or `None` once every child
/// is resolved. Search iterations select from this set so proven subtrees
/// are never walked again.
pub(crate) fn lex_best_unresolved(
    rec: &NodeRecord,
    table: &SearchTable,
    maximize: bool,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in 0..rec.actions.len() {
        if table.resolution(rec.child_keys[i]).1 {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                if maximize {
                    rec.vprime[i] > rec.vprime[b]
                } else {
                    rec.vprime[i] < rec.vprime[b]
                }
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// What a completed backup writes into a record.
pub(crate) struct Backup {
    pub v: f64,
    pub r: Gain,
    pub resolved: bool,
}

/// Back up the lexicographically best child into `(r, v)` and decide
/// whether the state is now resolved: it is once its best child is a proven
/// win for the player to move, or once every child is proven.
pub(crate) fn completed_backup(rec: &NodeRecord, table: &SearchTable, mover: Player) -> Backup {
    let maximize = mover == Player::First;
    let idx = lex_best(rec, table, maximize);
    let (r_best, best_resolved) = table.resolution(rec.child_keys[idx]);
    let win = mover.sign();
    let all_resolved = rec
        .child_keys
        .iter()
        .all(|k| table.resolution(*k).1);
    Backup {
        v: rec.vprime[idx],
        r: r_best,
        resolved: (best_resolved && r_best == win) || all_resolved,
    }
}

/// Make sure a terminal state has a table record and return its value.
/// The first value stored for a terminal wins; later visits reuse it.
pub(crate) fn ensure_terminal(ctx: &mut SearchContext, s: &State, seen: &MatchContext) -> f64 {
    if let Some(rec) = ctx.table.get(s.key()) {
        return rec.v;
    }
    let gain = ctx.game.gain(s);
    let v = ctx.terminal.value(ctx.game, s, seen);
    ctx.table.insert(NodeRecord::terminal(s.clone(), v, gain));
    v
}

/// Expand a non-terminal state: generate its children, score terminal ones
/// with the terminal evaluation (recording them as proven), score the rest
/// with the adaptive evaluation (reusing existing table values), and insert
/// the record with `v` backed from the best child.
pub(crate) fn expand_node(ctx: &mut SearchContext, s: &State, seen: &MatchContext) {
    let actions = ctx.game.legal_actions(s);
    let here = seen.observed(s.to_move(), actions.len());
    let mut child_keys = Vec::with_capacity(actions.len());
    let mut vprime = vec![0.0; actions.len()];
    let mut pending: Vec<(usize, State)> = Vec::new();
    for (i, &a) in actions.iter().enumerate() {
        let child = ctx.game.apply(s, a);
        child_keys.push(child.key());
        if ctx.game.is_terminal(&child) {
            vprime[i] = ensure_terminal(ctx, &child, &here);
        } else if let Some(rec) = ctx.table.get(child.key()) {
            vprime[i] = rec.v;
        } else {
            pending.push((i, child));
        }
    }
    if !pending.is_empty() {
        let states: Vec<&State> = pending.iter().map(|(_, c)| c).collect();
        let values = ctx.adaptive.evaluate_batch(ctx.game, &states);
        for ((i, _), v) in pending.iter().zip(values) {
            vprime[*i] = v;
        }
    }
    let maximize = s.to_move() == Player::First;
    let v = vprime[best_plain(&vprime, maximize)];
    ctx.table
        .insert(NodeRecord::expanded(s.clone(), actions, child_keys, vprime, v));
}

/// Whether a record can drive best-first selection: expanded with its
/// action lists in place (alpha-beta harvest records carry only a value).
pub(crate) fn selectable(rec: &NodeRecord) -> bool {
    rec.expanded && !rec.actions.is_empty()
}
