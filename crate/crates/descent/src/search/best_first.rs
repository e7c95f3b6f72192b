//! The best-first minimax family.
//!
//! All four algorithms grow a partial game tree in the transposition table
//! by repeating search iterations until the budget runs out. One iteration
//! walks from the root along best children, extends the tree, and backs the
//! new information up the walked path:
//!
//! * `ubfm` stops each iteration at the first state it has to expand.
//! * `descent` keeps walking best children all the way to a terminal state,
//!   so every iteration ends in a real game result.
//! * `completed_descent` is descent plus resolution: terminal values prove
//!   states, proofs propagate upward, proven subtrees are never walked
//!   again, and the search stops early once the root is proven.
//! * `ubfm_s` is ubfm plus resolution and selection counts; its move at the
//!   root is the safest one (proof first, then most-selected, then value)
//!   rather than the plainly best-valued one.

use crate::game::{Action, MatchContext, Player, State};

use super::table::NodeRecord;
use super::{
    best_plain, completed_backup, ensure_terminal, expand_node, lex_best, lex_best_unresolved,
    selectable, Budget, BudgetClock, SearchContext, SearchOutcome, SearchTable,
};

#[derive(Clone, Copy, PartialEq)]
enum Variant {
    Ubfm,
    Descent,
    CompletedDescent,
    UbfmS,
}

impl Variant {
    fn completed(self) -> bool {
        matches!(self, Variant::CompletedDescent | Variant::UbfmS)
    }
}

/// Best-first minimax: iterations stop at the first expansion.
pub fn ubfm(
    ctx: &mut SearchContext,
    root: &State,
    seen: MatchContext,
    budget: Budget,
) -> SearchOutcome {
    drive(ctx, root, seen, budget, Variant::Ubfm)
}

/// Descent minimax: iterations run down to a terminal state.
pub fn descent(
    ctx: &mut SearchContext,
    root: &State,
    seen: MatchContext,
    budget: Budget,
) -> SearchOutcome {
    drive(ctx, root, seen, budget, Variant::Descent)
}

/// Descent with resolution: proves exact results where it can and stops as
/// soon as the root is proven.
pub fn completed_descent(
    ctx: &mut SearchContext,
    root: &State,
    seen: MatchContext,
    budget: Budget,
) -> SearchOutcome {
    drive(ctx, root, seen, budget, Variant::CompletedDescent)
}

/// Best-first minimax with resolution and selection counts; plays the
/// safest root move instead of the best-valued one.
pub fn ubfm_s(
    ctx: &mut SearchContext,
    root: &State,
    seen: MatchContext,
    budget: Budget,
) -> SearchOutcome {
    drive(ctx, root, seen, budget, Variant::UbfmS)
}

fn drive(
    ctx: &mut SearchContext,
    root: &State,
    seen: MatchContext,
    budget: Budget,
    variant: Variant,
) -> SearchOutcome {
    let clock = BudgetClock::new(budget, ctx.table);
    // Selection counts accumulated before this search (the table persists
    // across the moves of a game); the safest-move rule only trusts counts
    // earned while this state was the root.
    let n0: Option<Vec<u32>> = match variant {
        Variant::UbfmS => ctx
            .table
            .get(root.key())
            .filter(|r| selectable(r))
            .map(|r| r.n.clone()),
        _ => None,
    };
    let mut iterations = 0;
    loop {
        let mut path = Vec::new();
        match variant {
            Variant::Ubfm => plain_iteration(ctx, root, seen, &mut path, false),
            Variant::Descent => plain_iteration(ctx, root, seen, &mut path, true),
            Variant::CompletedDescent => completed_iteration(ctx, root, seen, &mut path, true, false),
            Variant::UbfmS => completed_iteration(ctx, root, seen, &mut path, false, true),
        };
        iterations += 1;
        let (v, r, resolved) = {
            let rec = ctx.table.get(root.key()).expect("root expanded by iteration");
            (rec.v, rec.r, rec.resolved)
        };
        if let Some(tr) = ctx.trace.as_deref_mut() {
            tr.iteration(ctx.game, iterations, &path, root, v, r, resolved);
        }
        #[cfg(debug_assertions)]
        audit_path(ctx, root, &path, variant);
        if (variant.completed() && resolved) || clock.exhausted(iterations, ctx.table) {
            break;
        }
    }
    let rec = ctx.table.get(root.key()).unwrap();
    let maximize = root.to_move() == Player::First;
    let idx = match variant {
        Variant::Ubfm | Variant::Descent => best_plain(&rec.vprime, maximize),
        Variant::CompletedDescent => lex_best(rec, ctx.table, maximize),
        Variant::UbfmS => safest(rec, ctx.table, maximize, n0.as_deref()),
    };
    SearchOutcome {
        action: rec.actions[idx],
        value: rec.v,
        r: rec.r,
        resolved: rec.resolved,
        iterations,
    }
}

/// Debug-build audit: right after an iteration, every state on the walked
/// path must hold a value equal to its best child's under the variant's
/// ranking, and the completed variants' proofs must match a fresh backup.
#[cfg(debug_assertions)]
fn audit_path(ctx: &mut SearchContext, root: &State, path: &[Action], variant: Variant) {
    let mut s = root.clone();
    let mut step = 0;
    loop {
        if let Some(rec) = ctx.table.get(s.key()).filter(|r| selectable(r)) {
            if variant.completed() {
                let b = completed_backup(rec, ctx.table, s.to_move());
                assert!(
                    rec.v == b.v && rec.r == b.r && rec.resolved == b.resolved,
                    "stale completed backup at state {}",
                    s.key().0
                );
            } else {
                let i = best_plain(&rec.vprime, s.to_move() == Player::First);
                assert!(
                    rec.v == rec.vprime[i],
                    "stale backup at state {}",
                    s.key().0
                );
            }
        }
        if step == path.len() {
            break;
        }
        s = ctx.game.apply(&s, path[step]);
        step += 1;
    }
}

/// One iteration of ubfm (`descend` false) or descent (`descend` true):
/// walk best children, expand at the frontier, back values up the path.
/// Returns the value backed up to `s`.
fn plain_iteration(
    ctx: &mut SearchContext,
    s: &State,
    seen: MatchContext,
    path: &mut Vec<Action>,
    descend: bool,
) -> f64 {
    if ctx.game.is_terminal(s) {
        return ensure_terminal(ctx, s, &seen);
    }
    let was_expanded = ctx.table.get(s.key()).is_some_and(selectable);
    if !was_expanded {
        expand_node(ctx, s, &seen);
        if !descend {
            return ctx.table.get(s.key()).unwrap().v;
        }
    }
    let maximize = s.to_move() == Player::First;
    let (i, a, next_seen) = {
        let rec = ctx.table.get(s.key()).unwrap();
        let i = best_plain(&rec.vprime, maximize);
        (i, rec.actions[i], seen.observed(s.to_move(), rec.actions.len()))
    };
    path.push(a);
    let child = ctx.game.apply(s, a);
    let v = plain_iteration(ctx, &child, next_seen, path, descend);
    let rec = ctx.table.get_mut(s.key()).unwrap();
    rec.vprime[i] = v;
    rec.v = rec.vprime[best_plain(&rec.vprime, maximize)];
    rec.v
}

/// One iteration of the completed variants: selection skips proven
/// children, the backup ranks children by proof first and value second,
/// and a state becomes proven once its best child is a proven win for the
/// player to move or all children are proven.
fn completed_iteration(
    ctx: &mut SearchContext,
    s: &State,
    seen: MatchContext,
    path: &mut Vec<Action>,
    descend: bool,
    count: bool,
) -> f64 {
    if ctx.game.is_terminal(s) {
        return ensure_terminal(ctx, s, &seen);
    }
    let was_expanded = ctx.table.get(s.key()).is_some_and(selectable);
    if !was_expanded {
        expand_node(ctx, s, &seen);
    }
    let maximize = s.to_move() == Player::First;
    if was_expanded || descend {
        let sel = {
            let rec = ctx.table.get(s.key()).unwrap();
            lex_best_unresolved(rec, ctx.table, maximize)
                .map(|i| (i, rec.actions[i], seen.observed(s.to_move(), rec.actions.len())))
        };
        if let Some((i, a, next_seen)) = sel {
            if count {
                ctx.table.get_mut(s.key()).unwrap().n[i] += 1;
            }
            path.push(a);
            let child = ctx.game.apply(s, a);
            let v = completed_iteration(ctx, &child, next_seen, path, descend, count);
            ctx.table.get_mut(s.key()).unwrap().vprime[i] = v;
        }
    }
    let backup = {
        let rec = ctx.table.get(s.key()).unwrap();
        completed_backup(rec, ctx.table, s.to_move())
    };
    let rec = ctx.table.get_mut(s.key()).unwrap();
    rec.v = backup.v;
    rec.r = backup.r;
    rec.resolved = backup.resolved;
    backup.v
}

/// Safest root move: proof outranks selection count outranks value. Both
/// players prefer the most-selected move among equally proven ones; counts
/// earned before this state became the root (`n0`) are ignored.
pub(crate) fn safest(
    rec: &NodeRecord,
    table: &SearchTable,
    maximize: bool,
    n0: Option<&[u32]>,
) -> usize {
    let count = |i: usize| rec.n[i] - n0.map_or(0, |base| base[i]);
    let mut best = 0;
    for i in 1..rec.actions.len() {
        let cand = (table.resolution(rec.child_keys[i]).0, count(i), rec.vprime[i]);
        let inc = (table.resolution(rec.child_keys[best]).0, count(best), rec.vprime[best]);
        let better = if cand.0 != inc.0 {
            if maximize { cand.0 > inc.0 } else { cand.0 < inc.0 }
        } else if cand.1 != inc.1 {
            cand.1 > inc.1
        } else if maximize {
            cand.2 > inc.2
        } else {
            cand.2 < inc.2
        };
        if better {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{AdaptiveEval, HeuristicKind, TerminalEval, ValueTable};
    use crate::game::synthetic::{SyntheticTree, TreeBuilder};
    use crate::game::Game;
    use crate::search::TraceSink;

    fn scripted(tree: &SyntheticTree) -> AdaptiveEval {
        let mut table = ValueTable::new();
        for (s, v) in tree.seed_table() {
            table.assign(s.key(), v);
        }
        AdaptiveEval::Table(table)
    }

    fn run(
        tree: &SyntheticTree,
        variant: fn(&mut SearchContext, &State, MatchContext, Budget) -> SearchOutcome,
        iterations: u64,
    ) -> (SearchOutcome, SearchTable) {
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
            variant(
                &mut ctx,
                &tree.initial_state(),
                MatchContext::default(),
                Budget::Iterations(iterations),
            )
        };
        (outcome, table)
    }

    #[test]
    fn ubfm_picks_the_higher_leaf_after_one_iteration() {
        let mut b = TreeBuilder::new();
        let t_low = b.terminal(-1);
        let t_high = b.terminal(1);
        let low = b.node(3.0, vec![t_low]);
        let high = b.node(5.0, vec![t_high]);
        let root = b.node(0.0, vec![low, high]);
        let tree = b.finish(root);
        let (outcome, _) = run(&tree, ubfm, 1);
        assert_eq!(outcome.action, Action::Place(1));
        assert_eq!(outcome.value, 5.0);
        assert_eq!(outcome.iterations, 1);
    }

    /// A trap: the child that looks best (0.9) loses immediately, the
    /// modest one (-0.2) is safe. One descent iteration reaches the loss
    /// and falls back; ubfm needs a second iteration to see it.
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
    fn ubfm_falls_for_the_trap_for_one_iteration() {
        let tree = trap_tree();
        let (outcome, _) = run(&tree, ubfm, 1);
        assert_eq!(outcome.action, Action::Place(0));
        assert_eq!(outcome.value, 0.9);

        let (outcome, _) = run(&tree, ubfm, 2);
        assert_eq!(outcome.action, Action::Place(1));
        assert_eq!(outcome.value, -0.2);
    }

    #[test]
    fn descent_sees_through_the_trap_in_one_iteration() {
        let tree = trap_tree();
        let (outcome, _) = run(&tree, descent, 1);
        assert_eq!(outcome.action, Action::Place(1));
        assert_eq!(outcome.value, -0.2);
        assert_eq!(outcome.iterations, 1);
    }

    #[test]
    fn descent_iterations_end_at_terminal_states() {
        let tree = trap_tree();
        let (_, table) = run(&tree, descent, 1);
        let terminals = table.records().filter(|r| r.terminal).count();
        assert!(terminals >= 1, "descent must reach a terminal state");
    }

    #[test]
    fn completed_descent_proves_the_trap_draw_and_stops() {
        let tree = trap_tree();
        let (outcome, table) = run(&tree, completed_descent, 100);
        assert_eq!(outcome.action, Action::Place(1));
        assert_eq!(outcome.r, 0);
        assert!(outcome.resolved);
        assert_eq!(outcome.value, 0.0);
        assert_eq!(outcome.iterations, 2, "proof must stop the search early");
        let root_rec = table.get(tree.initial_state().key()).unwrap();
        assert!(root_rec.resolved);
    }

    #[test]
    fn completed_descent_plays_a_proven_win_immediately() {
        let mut b = TreeBuilder::new();
        let win = b.terminal(1);
        let lure = b.terminal(-1);
        let deep = b.node(0.7, vec![lure]);
        let root = b.node(0.0, vec![deep, win]);
        let tree = b.finish(root);
        let (outcome, _) = run(&tree, completed_descent, 100);
        assert_eq!(outcome.action, Action::Place(1));
        assert_eq!(outcome.r, 1);
        assert!(outcome.resolved);
        assert_eq!(outcome.iterations, 1, "a terminal win among the root's children is an instant proof");
    }

    #[test]
    fn completed_descent_never_reenters_proven_subtrees() {
        // Left subtree proves a loss in one visit; afterwards every
        // iteration must walk the right subtree only.
        let mut b = TreeBuilder::new();
        let loss = b.terminal(-1);
        let shiny = b.node(0.9, vec![loss]);
        let far = b.terminal(0);
        let mid = b.node(0.1, vec![far]);
        let deep = b.node(-0.1, vec![mid]);
        let root = b.node(0.0, vec![shiny, deep]);
        let tree = b.finish(root);

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
        let root_state = tree.initial_state();
        let mut first_path = Vec::new();
        completed_iteration(&mut ctx, &root_state, MatchContext::default(), &mut first_path, true, false);
        let shiny_state = tree.apply(&root_state, Action::Place(0));
        let (r, resolved) = ctx.table.resolution(shiny_state.key());
        assert_eq!((r, resolved), (-1, true), "first iteration proves the trap");

        let mut path = Vec::new();
        completed_iteration(&mut ctx, &root_state, MatchContext::default(), &mut path, true, false);
        assert_eq!(path[0], Action::Place(1), "second iteration must avoid the proven subtree");
        let (root_r, root_resolved) = ctx.table.resolution(root_state.key());
        assert_eq!((root_r, root_resolved), (0, true), "two iterations solve this tree");
    }

    #[test]
    fn ubfm_s_counts_only_selection_steps() {
        let tree = trap_tree();
        let (outcome, table) = run(&tree, ubfm_s, 100);
        // Iteration 1 expands the root (no selection). Iterations 2 and 3
        // each select one root child; both subtrees resolve on contact.
        assert!(outcome.resolved);
        assert_eq!(outcome.r, 0);
        assert_eq!(outcome.action, Action::Place(1));
        let rec = table.get(tree.initial_state().key()).unwrap();
        assert_eq!(rec.n.iter().sum::<u32>(), 2);
    }

    #[test]
    fn safest_prefers_counts_over_value_and_ignores_stale_counts() {
        let mut b = TreeBuilder::new();
        let t0 = b.terminal(0);
        let t1 = b.terminal(0);
        let a = b.node(5.0, vec![t0]);
        let c = b.node(4.9, vec![t1]);
        let root = b.node(0.0, vec![a, c]);
        let tree = b.finish(root);

        let root_state = tree.initial_state();
        let child_a = tree.apply(&root_state, Action::Place(0));
        let child_c = tree.apply(&root_state, Action::Place(1));
        let mut table = SearchTable::new();
        let mut rec = NodeRecord::expanded(
            root_state.clone(),
            vec![Action::Place(0), Action::Place(1)],
            vec![child_a.key(), child_c.key()],
            vec![5.0, 4.9],
            5.0,
        );
        rec.n = vec![1, 30];
        table.insert(rec);

        let rec = table.get(root_state.key()).unwrap();
        assert_eq!(safest(rec, &table, true, None), 1, "more-searched move wins despite lower value");
        let stale = vec![0u32, 29];
        assert_eq!(
            safest(rec, &table, true, Some(&stale)),
            0,
            "counts from before this root must not sway the choice"
        );
    }

    #[test]
    fn ubfm_s_prefers_a_proof_over_counts_and_value() {
        // Child A keeps a rosy value and collects more selections; child B
        // turns out to be a proven win. The proof must outrank both.
        let mut b = TreeBuilder::new();
        let far = b.terminal(0);
        let mid = b.node(4.8, vec![far]);
        let a = b.node(5.0, vec![mid]);
        let win = b.terminal(1);
        let bb = b.node(0.2, vec![win]);
        let root = b.node(0.0, vec![a, bb]);
        let tree = b.finish(root);

        let (outcome, table) = run(&tree, ubfm_s, 100);
        assert_eq!(outcome.action, Action::Place(1));
        assert_eq!(outcome.r, 1);
        assert!(outcome.resolved);
        let rec = table.get(tree.initial_state().key()).unwrap();
        assert!(rec.n[0] > rec.n[1], "the rosy child must have drawn more selections");
    }

    #[test]
    #[should_panic(expected = "search called on terminal state")]
    fn search_panics_on_terminal_roots() {
        let mut b = TreeBuilder::new();
        let t = b.terminal(1);
        let root = b.node(0.0, vec![t]);
        let tree = b.finish(root);
        let terminal_state = tree.apply(&tree.initial_state(), Action::Place(0));

        let adaptive = scripted(&tree);
        let term = TerminalEval::new(HeuristicKind::Classic);
        let mut table = SearchTable::new();
        let mut ctx = SearchContext {
            game: &tree,
            adaptive: &adaptive,
            terminal: &term,
            table: &mut table,
            trace: None,
        };
        super::super::run_search(
            super::super::Algorithm::Ubfm,
            &mut ctx,
            &terminal_state,
            MatchContext::default(),
            Budget::Iterations(1),
        );
    }

    #[derive(Clone)]
    struct SharedBuf(std::sync::Arc<std::sync::Mutex<Vec<u8>>>);

    impl std::io::Write for SharedBuf {
        fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(buf);
            Ok(buf.len())
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn ubfm_iterations_never_repeat_a_walk_on_a_tie_free_tree() {
        let mut b = TreeBuilder::new();
        let a1 = {
            let w = b.terminal(-1);
            let d = b.terminal(0);
            b.node(0.3, vec![w, d])
        };
        let a2 = {
            let w = b.terminal(1);
            let d = b.terminal(0);
            b.node(0.7, vec![w, d])
        };
        let b1 = {
            let l = b.terminal(-1);
            let d = b.terminal(0);
            b.node(0.4, vec![l, d])
        };
        let b2 = {
            let l = b.terminal(-1);
            let d = b.terminal(0);
            b.node(0.2, vec![l, d])
        };
        let ca = b.node(0.6, vec![a1, a2]);
        let cb = b.node(0.5, vec![b1, b2]);
        let root = b.node(0.0, vec![ca, cb]);
        let tree = b.finish(root);

        let buf = SharedBuf(Default::default());
        let mut sink = TraceSink::new(Box::new(buf.clone()));
        let adaptive = scripted(&tree);
        let term = TerminalEval::new(HeuristicKind::Classic);
        let mut table = SearchTable::new();
        let mut ctx = SearchContext {
            game: &tree,
            adaptive: &adaptive,
            terminal: &term,
            table: &mut table,
            trace: Some(&mut sink),
        };
        ubfm(&mut ctx, &tree.initial_state(), MatchContext::default(), Budget::Iterations(4));

        let text = String::from_utf8(buf.0.lock().unwrap().clone()).unwrap();
        let paths: Vec<&str> = text
            .lines()
            .map(|l| l.split_whitespace().nth(1).expect("path field"))
            .collect();
        assert_eq!(paths.len(), 4);
        for i in 0..paths.len() {
            for j in i + 1..paths.len() {
                assert_ne!(paths[i], paths[j], "iterations {i} and {j} walked the same path");
            }
        }
    }
}
