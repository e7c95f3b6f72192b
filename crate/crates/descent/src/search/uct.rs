//! Upper-confidence-bound tree search without rollouts.
//!
//! Each simulation walks the tree by the UCB rule, adds one state at the
//! frontier, scores it with the adaptive evaluation (the terminal
//! evaluation for terminal states), and backs the score up the walked
//! path. A state's value is the running mean of every score backed up
//! through it; the move played is the root's most-visited child.
//!
//! Unvisited children are tried before any child is revisited, in
//! canonical action order, which keeps the search deterministic.

use crate::game::{MatchContext, Player, State, StateKey};

use super::table::NodeRecord;
use super::{ensure_terminal, Budget, BudgetClock, SearchContext, SearchOutcome, selectable};

pub fn uct(
    ctx: &mut SearchContext,
    root: &State,
    seen: MatchContext,
    budget: Budget,
    c: f64,
) -> SearchOutcome {
    let clock = BudgetClock::new(budget, ctx.table);
    let mut iterations = 0;
    loop {
        let mut path = Vec::new();
        simulate(ctx, root, seen, c, &mut path);
        iterations += 1;
        if let Some(tr) = ctx.trace.as_deref_mut() {
            let rec = ctx.table.get(root.key()).expect("root added by simulation");
            tr.iteration(ctx.game, iterations, &path, root, rec.v, 0, false);
        }
        if clock.exhausted(iterations, ctx.table) {
            break;
        }
    }
    let rec = ctx.table.get(root.key()).unwrap();
    let mut best = 0;
    for i in 1..rec.n.len() {
        if rec.n[i] > rec.n[best] {
            best = i;
        }
    }
    SearchOutcome {
        action: rec.actions[best],
        value: rec.v,
        r: 0,
        resolved: false,
        iterations,
    }
}

/// One simulation: select by UCB to the frontier, add and score one state,
/// back the score up the path.
fn simulate(
    ctx: &mut SearchContext,
    root: &State,
    seen: MatchContext,
    c: f64,
    path: &mut Vec<crate::game::Action>,
) {
    let mut edges: Vec<(StateKey, usize)> = Vec::new();
    let mut s = root.clone();
    let mut here = seen;
    let leaf_value;
    loop {
        if ctx.game.is_terminal(&s) {
            let v = ensure_terminal(ctx, &s, &here);
            let rec = ctx.table.get_mut(s.key()).unwrap();
            rec.visits += 1;
            rec.value_sum += v;
            leaf_value = v;
            break;
        }
        let known = ctx.table.get(s.key()).is_some_and(selectable);
        if !known {
            let v = ctx.adaptive.evaluate(ctx.game, &s);
            let actions = ctx.game.legal_actions(&s);
            let child_keys = actions.iter().map(|&a| ctx.game.apply(&s, a).key()).collect();
            let k = actions.len();
            let mut rec = NodeRecord::expanded(s.clone(), actions, child_keys, vec![0.0; k], v);
            rec.visits = 1;
            rec.value_sum = v;
            ctx.table.insert(rec);
            leaf_value = v;
            break;
        }
        let rec = ctx.table.get(s.key()).unwrap();
        let i = ucb_index(rec, s.to_move() == Player::First, c);
        let a = rec.actions[i];
        here = here.observed(s.to_move(), rec.actions.len());
        edges.push((s.key(), i));
        path.push(a);
        s = ctx.game.apply(&s, a);
    }
    for (key, i) in edges {
        let rec = ctx.table.get_mut(key).unwrap();
        rec.n[i] += 1;
        rec.w[i] += leaf_value;
        rec.visits += 1;
        rec.value_sum += leaf_value;
        rec.v = rec.value_sum / rec.visits as f64;
    }
}

/// UCB child choice: any unvisited child first (canonical order), then the
/// best mean-plus-exploration score from the moving player's side.
fn ucb_index(rec: &NodeRecord, maximize: bool, c: f64) -> usize {
    for (i, &n) in rec.n.iter().enumerate() {
        if n == 0 {
            return i;
        }
    }
    let ln_parent = (rec.visits as f64).ln();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for i in 0..rec.n.len() {
        let mean = rec.w[i] / rec.n[i] as f64;
        let signed = if maximize { mean } else { -mean };
        let score = signed + c * (ln_parent / rec.n[i] as f64).sqrt();
        if score > best_score {
            best_score = score;
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
    use crate::game::{Action, Game};
    use crate::search::SearchTable;

    fn scripted(tree: &SyntheticTree) -> AdaptiveEval {
        let mut table = ValueTable::new();
        for (s, v) in tree.seed_table() {
            table.assign(s.key(), v);
        }
        AdaptiveEval::Table(table)
    }

    fn run(tree: &SyntheticTree, sims: u64) -> (SearchOutcome, SearchTable) {
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
            uct(
                &mut ctx,
                &tree.initial_state(),
                MatchContext::default(),
                Budget::Iterations(sims),
                0.4,
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
    fn repeated_losses_drive_visits_to_the_safe_move() {
        let tree = trap_tree();
        let (outcome, table) = run(&tree, 200);
        assert_eq!(outcome.action, Action::Place(1));
        let rec = table.get(tree.initial_state().key()).unwrap();
        assert!(rec.n[1] > rec.n[0]);
    }

    #[test]
    fn visit_counts_add_up() {
        let tree = trap_tree();
        let sims = 57;
        let (_, table) = run(&tree, sims);
        let rec = table.get(tree.initial_state().key()).unwrap();
        assert_eq!(rec.visits as u64, sims);
        // The first simulation scores the root itself; every later one
        // crosses exactly one root edge.
        assert_eq!(rec.n.iter().map(|&n| n as u64).sum::<u64>(), sims - 1);
    }

    #[test]
    fn terminal_records_keep_their_exact_value() {
        let tree = trap_tree();
        let (_, table) = run(&tree, 100);
        let root = tree.initial_state();
        let shiny = tree.apply(&root, Action::Place(0));
        let loss = tree.apply(&shiny, Action::Place(0));
        let rec = table.get(loss.key()).unwrap();
        assert!(rec.terminal);
        assert_eq!(rec.v, -1.0);
        assert!(rec.visits > 0);
    }

    #[test]
    fn root_value_is_the_mean_of_backed_up_scores() {
        let tree = trap_tree();
        let (outcome, table) = run(&tree, 100);
        let rec = table.get(tree.initial_state().key()).unwrap();
        assert!((rec.v - rec.value_sum / rec.visits as f64).abs() < 1e-12);
        assert_eq!(outcome.value, rec.v);
        assert!(rec.v > -1.0 && rec.v < 0.9);
    }

    #[test]
    fn a_single_legal_action_is_returned_under_any_budget() {
        let mut b = TreeBuilder::new();
        let t = b.terminal(1);
        let root = b.node(0.0, vec![t]);
        let tree = b.finish(root);
        let (outcome, _) = run(&tree, 17);
        assert_eq!(outcome.action, Action::Place(0));
    }

    #[test]
    fn an_immediate_win_collects_the_most_visits() {
        let game = crate::game::by_name("tictactoe", 3, false).unwrap();
        let s = game.from_fen("xx./oo./... x 4").unwrap();
        let adaptive = AdaptiveEval::zero_table();
        let terminal = TerminalEval::new(HeuristicKind::Classic);
        let mut table = SearchTable::new();
        let mut ctx = SearchContext {
            game: game.as_ref(),
            adaptive: &adaptive,
            terminal: &terminal,
            table: &mut table,
            trace: None,
        };
        let outcome = uct(
            &mut ctx,
            &s,
            MatchContext::default(),
            Budget::Iterations(1000),
            0.4,
        );
        assert_eq!(outcome.action, Action::Place(2), "the winning placement");
        let rec = table.get(s.key()).unwrap();
        let winner = rec.actions.iter().position(|a| *a == Action::Place(2)).unwrap();
        for i in 0..rec.actions.len() {
            if i != winner {
                assert!(
                    rec.n[winner] > rec.n[i],
                    "winning move must be visited strictly most"
                );
            }
        }
    }

    #[test]
    fn zero_exploration_commits_to_the_dominant_child() {
        let mut b = TreeBuilder::new();
        let win = b.terminal(1);
        let d1 = b.terminal(0);
        let d2 = b.terminal(0);
        let root = b.node(0.0, vec![win, d1, d2]);
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
        uct(
            &mut ctx,
            &tree.initial_state(),
            MatchContext::default(),
            Budget::Iterations(10),
            0.0,
        );
        let rec = table.get(tree.initial_state().key()).unwrap();
        // Simulation 1 expands the root, 2-4 visit each child once, and the
        // remaining six all follow the winning child's perfect mean.
        assert_eq!(rec.n, vec![7, 1, 1]);
    }
}
