//! Prove the exact result of the small boards two ways: by exhaustive
//! minimax, and by completed descent running until its root is resolved.
//!
//!     cargo run --example solve_small_boards

use descent::eval::{AdaptiveEval, HeuristicKind, TerminalEval};
use descent::game::{by_name, MatchContext};
use descent::oracle::Solver;
use descent::search::{run_search, Algorithm, Budget, SearchContext, SearchTable};

fn main() {
    for (name, size) in [("tictactoe", 3), ("hex", 3)] {
        let game = by_name(name, size, false).unwrap();
        let root = game.initial_state();

        let mut solver = Solver::new(game.as_ref());
        let exact = solver.solve(&root);
        println!(
            "{}: exhaustive minimax says {} over {} distinct states",
            game.name(),
            verdict(exact),
            solver.states_solved(),
        );

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
        // The budget is a ceiling; the search stops the moment the root's
        // result is proven.
        let out = run_search(
            Algorithm::CompletedDescent,
            &mut ctx,
            &root,
            MatchContext::default(),
            Budget::Iterations(1_000_000),
        );
        assert!(out.resolved, "the completion budget should be ample");
        println!(
            "{}: completed descent proves {} in {} iterations ({} states)",
            game.name(),
            verdict(out.r),
            out.iterations,
            table.len(),
        );
        assert_eq!(out.r, exact);
        println!();
    }
}

fn verdict(gain: i8) -> &'static str {
    match gain {
        1 => "a first-player win",
        -1 => "a second-player win",
        _ => "a draw",
    }
}
