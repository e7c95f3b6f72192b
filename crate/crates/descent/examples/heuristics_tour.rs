//! Show what each terminal heuristic pays out on finished games, and why
//! the reinforcement variants give the learner more to aim for than
//! win/draw/loss alone.
//!
//!     cargo run --example heuristics_tour

use descent::eval::{HeuristicKind, TerminalEval};
use descent::game::{by_name, Game, MatchContext, State};

fn main() {
    let othello = by_name("othello", 4, false).unwrap();
    // A 4x4 sweep: x holds 15 discs, o holds 1.
    let sweep = othello.from_fen("xxxx/xoxx/xxxx/xxxx o 12").unwrap();
    // A close finish on a full board: 9 discs to 7.
    let close = othello.from_fen("xxoo/xxoo/xxoo/xxox o 12").unwrap();

    println!("othello-4, classic vs score on two finished games:");
    show(othello.as_ref(), &sweep, "15-1 sweep", &[HeuristicKind::Classic, HeuristicKind::Score]);
    show(othello.as_ref(), &close, "9-7 squeaker", &[HeuristicKind::Classic, HeuristicKind::Score]);

    // Depth heuristics read the move counter: the quicker the win, the
    // larger the reward. Both boards below are first-player connections,
    // one in five plies, one that needed the whole board.
    let hex = by_name("hex", 3, false).unwrap();
    let quick = hex.from_fen("x.o/xo./x.. o 5").unwrap();
    let slow = hex.from_fen("xox/xxo/oxo o 9").unwrap();
    println!("hex-3, plain and depth-discounted first-player wins:");
    show(
        hex.as_ref(),
        &quick,
        "win at ply 5",
        &[HeuristicKind::Classic, HeuristicKind::DepthAdditive, HeuristicKind::DepthMultiplicative],
    );
    show(
        hex.as_ref(),
        &slow,
        "win at ply 9",
        &[HeuristicKind::Classic, HeuristicKind::DepthAdditive, HeuristicKind::DepthMultiplicative],
    );

    // Presence counts material but never contradicts the game result.
    let bt = by_name("breakthrough", 5, false).unwrap();
    let outnumbered = bt.from_fen("x..../...o./...o./..o../..... o 21").unwrap();
    println!("breakthrough-5, a lone runner breaks through against three:");
    show(bt.as_ref(), &outnumbered, "1 vs 3 pieces", &[HeuristicKind::Classic, HeuristicKind::Presence]);
}

fn show(game: &dyn Game, s: &State, tag: &str, kinds: &[HeuristicKind]) {
    let ctx = MatchContext::default();
    print!("  {tag:<14}");
    for &kind in kinds {
        let value = TerminalEval::new(kind).value(game, s, &ctx);
        print!("  {} {:+.3}", kind.label(), value);
    }
    println!();
}
