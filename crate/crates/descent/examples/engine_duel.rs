//! Pit two engines against each other under the match harness: color
//! alternation, varied openings, and per-game seeds are all handled there.
//!
//!     cargo run --release --example engine_duel

use descent::eval::{AdaptiveEval, HeuristicKind, TerminalEval};
use descent::game::by_name;
use descent::harness::{duel, Contender};
use descent::search::{Algorithm, Budget};

fn main() {
    let game = by_name("clobber", 5, false).unwrap();
    let terminal = TerminalEval::new(HeuristicKind::Classic);

    // The same noise evaluation on both sides: any edge belongs to the
    // search algorithm, not the evaluation.
    let adaptive = AdaptiveEval::Noise { seed: 3, amplitude: 0.2 };

    let descent = Contender::Engine {
        label: "descent".into(),
        algorithm: Algorithm::Descent,
        budget: Budget::Iterations(150),
        adaptive: &adaptive,
        terminal: &terminal,
    };
    let uct = Contender::Engine {
        label: "uct".into(),
        algorithm: Algorithm::Uct { c: 0.4 },
        budget: Budget::Iterations(150),
        adaptive: &adaptive,
        terminal: &terminal,
    };

    let outcome = duel(game.as_ref(), &descent, &uct, 50, 2, 2024);
    println!(
        "descent vs uct on {}, {} games with 2 random opening plies:",
        game.name(),
        outcome.games
    );
    println!(
        "  descent scores {:.1}% ({} wins, {} draws, {} losses)",
        100.0 * outcome.score_a,
        outcome.wins_a,
        outcome.draws,
        outcome.losses_a
    );

    let sample = &outcome.records[0];
    println!(
        "  first game: {} opened, {} plies, result {:+}",
        sample.first, sample.plies, sample.result
    );
}
