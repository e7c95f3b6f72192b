//! Run every search algorithm once from the same opening position and
//! print what each would play.
//!
//!     cargo run --example first_search

use descent::eval::{AdaptiveEval, HeuristicKind, TerminalEval};
use descent::game::{by_name, MatchContext};
use descent::search::{run_search, Algorithm, Budget, SearchContext, SearchTable};

fn main() {
    let game = by_name("hex", 5, false).unwrap();
    let root = game.initial_state();

    // No learning here: a noise evaluation stands in for the value function
    // so ties break deterministically and the algorithms have something to
    // disagree about.
    let adaptive = AdaptiveEval::Noise { seed: 42, amplitude: 0.1 };
    let terminal = TerminalEval::new(HeuristicKind::Classic);

    // One iteration means one leaf expansion for the best-first family and
    // one deepening step for alpha-beta, so the budgets differ.
    let algorithms = [
        (Algorithm::Ubfm, Budget::Iterations(400)),
        (Algorithm::Descent, Budget::Iterations(400)),
        (Algorithm::CompletedDescent, Budget::Iterations(400)),
        (Algorithm::UbfmS, Budget::Iterations(400)),
        (Algorithm::AlphaBetaId, Budget::Iterations(3)),
        (Algorithm::Uct { c: 0.4 }, Budget::Iterations(400)),
    ];

    println!("{} from the opening:", game.name());
    for (algo, budget) in algorithms {
        let mut table = SearchTable::new();
        let mut ctx = SearchContext {
            game: game.as_ref(),
            adaptive: &adaptive,
            terminal: &terminal,
            table: &mut table,
            trace: None,
        };
        let out = run_search(algo, &mut ctx, &root, MatchContext::default(), budget);
        println!(
            "  {:<18} plays {:<4} value {:+.3}  ({} states expanded)",
            algo.label(),
            game.format_action(out.action),
            out.value,
            table.len(),
        );
    }
}
