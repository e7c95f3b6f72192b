//! Iterative-deepening alpha-beta, the classical baseline.
//!
//! Depths 1, 2, 3, ... are searched in turn, each full-width pass ordering
//! the root's moves so the previous best is tried first. Horizon leaves are
//! scored by the adaptive evaluation, terminal states by the terminal
//! evaluation. A [`Budget::Iterations`] budget is read as the maximum
//! depth, so a budget of 1 is the one-ply greedy player; node and time
//! budgets deepen until they run out, discarding the unfinished pass.
//!
//! For training-data harvesting, a state's value is written to the table
//! only when it is exact: terminal states, and interior states whose value
//! fell strictly inside the search window (values clamped by a cutoff are
//! bounds, not minimax values). Horizon leaves are never recorded. Each
//! deepening overwrites the last, so the table ends up with the deepest
//! available value for every recorded state.

use crate::game::{MatchContext, Player, State};

use super::table::NodeRecord;
use super::{ensure_terminal, Budget, BudgetClock, SearchContext, SearchOutcome};

/// Hard ceiling on deepening under node or time budgets.
const MAX_DEPTH: u32 = 512;

pub fn alphabeta_id(
    ctx: &mut SearchContext,
    root: &State,
    seen: MatchContext,
    budget: Budget,
) -> SearchOutcome {
    let max_depth = match budget {
        Budget::Iterations(n) => (n as u32).clamp(1, MAX_DEPTH),
        _ => MAX_DEPTH,
    };
    let clock = BudgetClock::new(budget, ctx.table);
    let actions = ctx.game.legal_actions(root);
    let here = seen.observed(root.to_move(), actions.len());
    let children: Vec<State> = actions.iter().map(|&a| ctx.game.apply(root, a)).collect();
    let maximize = root.to_move() == Player::First;

    let mut order: Vec<usize> = (0..actions.len()).collect();
    let mut best_idx = 0;
    let mut best_value = 0.0;
    let mut deepest = 0u64;
    let mut visited = 0u64;

    for depth in 1..=max_depth {
        let mut recorded: Vec<(State, f64)> = Vec::new();
        let mut aborted = false;
        let mut alpha = f64::NEG_INFINITY;
        let mut beta = f64::INFINITY;
        let mut vprime = vec![0.0; children.len()];
        let mut pass_best = order[0];
        let mut pass_value = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
        // The first deepening is exempt from aborts so a decision exists
        // even under a tiny budget; later passes are discarded when cut
        // short.
        let can_abort = depth > 1;
        for &i in &order {
            let v = ab(
                ctx, &children[i], depth - 1, alpha, beta, here,
                &mut recorded, &clock, can_abort, &mut visited, &mut aborted,
            );
            if aborted {
                break;
            }
            vprime[i] = v;
            let better = if maximize { v > pass_value } else { v < pass_value };
            if better {
                pass_value = v;
                pass_best = i;
            }
            if maximize {
                alpha = alpha.max(pass_value);
            } else {
                beta = beta.min(pass_value);
            }
        }
        if aborted {
            break;
        }
        deepest = depth as u64;
        best_idx = pass_best;
        best_value = pass_value;
        order.retain(|&x| x != best_idx);
        order.insert(0, best_idx);
        for (s, v) in recorded {
            upsert_value(ctx, s, v);
        }
        let child_keys = children.iter().map(|c| c.key()).collect();
        ctx.table.insert(NodeRecord::expanded(
            root.clone(),
            actions.clone(),
            child_keys,
            vprime,
            best_value,
        ));
        if let Some(tr) = ctx.trace.as_deref_mut() {
            tr.deepening(ctx.game, depth, actions[best_idx], best_value);
        }
        if aborted || clock.exhausted(depth as u64, ctx.table) {
            break;
        }
    }

    SearchOutcome {
        action: actions[best_idx],
        value: best_value,
        r: 0,
        resolved: false,
        iterations: deepest,
    }
}

/// Plain alpha-beta on first-player-scale values. Returns the exact value
/// when it lies strictly inside `(alpha, beta)`, otherwise a bound.
#[allow(clippy::too_many_arguments)]
fn ab(
    ctx: &mut SearchContext,
    s: &State,
    depth: u32,
    alpha: f64,
    beta: f64,
    seen: MatchContext,
    recorded: &mut Vec<(State, f64)>,
    clock: &BudgetClock,
    can_abort: bool,
    visited: &mut u64,
    aborted: &mut bool,
) -> f64 {
    *visited += 1;
    if can_abort && clock.deep_abort(*visited) {
        *aborted = true;
        return 0.0;
    }
    if ctx.game.is_terminal(s) {
        return ensure_terminal(ctx, s, &seen);
    }
    if depth == 0 {
        return ctx.adaptive.evaluate(ctx.game, s);
    }
    let actions = ctx.game.legal_actions(s);
    let here = seen.observed(s.to_move(), actions.len());
    let maximize = s.to_move() == Player::First;
    let (mut a, mut b) = (alpha, beta);
    let mut value = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    for &action in &actions {
        let child = ctx.game.apply(s, action);
        let v = ab(
            ctx, &child, depth - 1, a, b, here, recorded, clock, can_abort, visited, aborted,
        );
        if *aborted {
            return 0.0;
        }
        if maximize {
            value = value.max(v);
            a = a.max(value);
        } else {
            value = value.min(v);
            b = b.min(value);
        }
        if a >= b {
            break;
        }
    }
    if alpha < value && value < beta {
        recorded.push((s.clone(), value));
    }
    value
}

/// Write an exact value into the table, overwriting earlier passes.
fn upsert_value(ctx: &mut SearchContext, s: State, v: f64) {
    if let Some(rec) = ctx.table.get_mut(s.key()) {
        rec.v = v;
    } else {
        ctx.table.insert(NodeRecord::valued(s, v));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{AdaptiveEval, HeuristicKind, TerminalEval, ValueTable};
    use crate::game::synthetic::{SyntheticTree, TreeBuilder};
    use crate::game::{Action, Game};
    use crate::search::SearchTable;

    fn scripted(tree: &SyntheticTree) -> AdaptiveEval {
        let mut table = ValueTable::new();
        for (s, v) in tree.seed_table() {
            table.assign(s.key(), v);
        }
        AdaptiveEval::Table(table)
    }

    fn run(tree: &SyntheticTree, depth: u64) -> (SearchOutcome, SearchTable) {
        let adaptive = scripted(tree);
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let mut table = SearchTable::new();
        let outcome = {
            let mut ctx = SearchContext {
                game: tree,
                adaptive: &adaptive,
                terminal: &terminal,
                table: &mut table,
                trace: None,
            };
            alphabeta_id(
                &mut ctx,
                &tree.initial_state(),
                MatchContext::default(),
                Budget::Iterations(depth),
            )
        };
        (outcome, table)
    }

    fn trap_tree() -> SyntheticTree {
        let mut b = TreeBuilder::new();
        let loss = b.terminal(-1);
        let draw = b.terminal(0);
        let shiny = b.node(0.9, vec![loss]);
        let modest = b.node(-0.2, vec![draw]);
        let root = b.node(0.0, vec![shiny, modest]);
        b.finish(root)
    }

    #[test]
    fn depth_one_is_the_greedy_player() {
        let tree = trap_tree();
        let (outcome, _) = run(&tree, 1);
        assert_eq!(outcome.action, Action::Place(0));
        assert_eq!(outcome.value, 0.9);
        assert_eq!(outcome.iterations, 1);
    }

    #[test]
    fn depth_two_sees_the_terminal_refutation() {
        let tree = trap_tree();
        let (outcome, _) = run(&tree, 2);
        assert_eq!(outcome.action, Action::Place(1));
        assert_eq!(outcome.value, 0.0);
        assert_eq!(outcome.iterations, 2);
    }

    #[test]
    fn exact_values_are_recorded_for_harvest() {
        let tree = trap_tree();
        let (_, table) = run(&tree, 2);
        let root = tree.initial_state();
        let shiny = tree.apply(&root, Action::Place(0));
        let modest = tree.apply(&root, Action::Place(1));
        let loss = tree.apply(&shiny, Action::Place(0));
        let draw = tree.apply(&modest, Action::Place(0));
        assert_eq!(table.get(root.key()).unwrap().v, 0.0);
        assert_eq!(table.get(shiny.key()).unwrap().v, -1.0);
        assert_eq!(table.get(modest.key()).unwrap().v, 0.0);
        assert_eq!(table.get(loss.key()).unwrap().v, -1.0);
        assert!(table.get(loss.key()).unwrap().terminal);
        assert_eq!(table.get(draw.key()).unwrap().v, 0.0);
        assert_eq!(table.harvest().count(), 5);
    }

    #[test]
    fn cut_branches_and_horizon_leaves_are_not_recorded() {
        // Root (max) first searches L, worth min(5, 6) = 5. In R, the
        // first reply already refutes it (3 < 5), so the search cuts: R's
        // 3 is only a bound and R must stay out of the table, as must all
        // depth-horizon leaves.
        let mut b = TreeBuilder::new();
        let t = b.terminal(0);
        let la = b.node(5.0, vec![t]);
        let lb = b.node(6.0, vec![t]);
        let ra = b.node(3.0, vec![t]);
        let rb = b.node(9.9, vec![t]);
        let l = b.node(0.0, vec![la, lb]);
        let r = b.node(0.0, vec![ra, rb]);
        let root = b.node(0.0, vec![l, r]);
        let tree = b.finish(root);

        let (outcome, table) = run(&tree, 2);
        assert_eq!(outcome.action, Action::Place(0));
        assert_eq!(outcome.value, 5.0);
        let root_s = tree.initial_state();
        let l_s = tree.apply(&root_s, Action::Place(0));
        let r_s = tree.apply(&root_s, Action::Place(1));
        let la_s = tree.apply(&l_s, Action::Place(0));
        assert!(table.get(l_s.key()).is_some());
        assert!(table.get(r_s.key()).is_none(), "a cut node's value is a bound");
        assert!(table.get(la_s.key()).is_none(), "horizon leaves are estimates");
        assert_eq!(table.harvest().count(), 2, "only the root and L are exact");
    }

    #[test]
    fn tiny_node_budgets_still_produce_a_move() {
        let tree = trap_tree();
        let adaptive = scripted(&tree);
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let mut table = SearchTable::new();
        let mut ctx = SearchContext {
            game: &tree,
            adaptive: &adaptive,
            terminal: &terminal,
            table: &mut table,
            trace: None,
        };
        let outcome = alphabeta_id(
            &mut ctx,
            &tree.initial_state(),
            MatchContext::default(),
            Budget::Nodes(1),
        );
        assert_eq!(outcome.iterations, 1, "the first deepening always completes");
        assert_eq!(outcome.action, Action::Place(0));
    }

    #[test]
    fn pruning_never_changes_the_depth_limited_value() {
        use crate::oracle::heuristic_minimax;
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;

        let game = crate::game::by_name("tictactoe", 3, false).unwrap();
        let adaptive = AdaptiveEval::Noise { seed: 11, amplitude: 0.9 };
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let mut rng = ChaCha8Rng::seed_from_u64(5);

        for trial in 0..25 {
            let mut s = game.initial_state();
            let plies = rng.gen_range(0..7);
            for _ in 0..plies {
                if game.is_terminal(&s) {
                    break;
                }
                let actions = game.legal_actions(&s);
                s = game.apply(&s, actions[rng.gen_range(0..actions.len())]);
            }
            if game.is_terminal(&s) {
                continue;
            }
            for depth in 1..=3u64 {
                let mut table = SearchTable::new();
                let mut ctx = SearchContext {
                    game: game.as_ref(),
                    adaptive: &adaptive,
                    terminal: &terminal,
                    table: &mut table,
                    trace: None,
                };
                let outcome = alphabeta_id(
                    &mut ctx,
                    &s,
                    MatchContext::default(),
                    Budget::Iterations(depth),
                );
                let plain = heuristic_minimax(
                    game.as_ref(),
                    &s,
                    depth as u32,
                    &adaptive,
                    &terminal,
                    MatchContext::default(),
                );
                assert_eq!(
                    outcome.value, plain,
                    "trial {trial} depth {depth} at {}",
                    game.to_fen(&s)
                );
            }
        }
    }
}
