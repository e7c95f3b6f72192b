//! Learn tic-tac-toe from scratch with a value table, then show the
//! learned values are enough to play perfectly with a one-ply lookahead.
//!
//!     cargo run --release --example train_tabular

use descent::eval::{AdaptiveEval, HeuristicKind, TerminalEval};
use descent::game::by_name;
use descent::harness::{duel, Contender};
use descent::learning::{
    train_loop, Capacity, DataMode, EpisodeConfig, SelectionPolicy, TrainHooks, TrainSettings,
};
use descent::search::{Algorithm, Budget};

fn main() {
    let game = by_name("tictactoe", 3, false).unwrap();
    let terminal = TerminalEval::new(HeuristicKind::Classic);
    let mut adaptive = AdaptiveEval::zero_table();

    let episode = EpisodeConfig {
        algorithm: Algorithm::CompletedDescent,
        budget: Budget::Iterations(60),
        policy: SelectionPolicy::Ordinal,
        data: DataMode::Tree,
        ply_cap: 100,
    };
    let settings = TrainSettings {
        episodes: 600,
        replay: Capacity::Games(50),
        checkpoint_every: 0,
        seed: 11,
        ..TrainSettings::default()
    };

    let mut hooks = TrainHooks::none();
    let every = 100;
    hooks.on_episode = Some(Box::new(move |stats| {
        if stats.episode % every == 0 {
            println!(
                "episode {:>4}: {} pairs harvested, sample loss {:.4}",
                stats.episode, stats.harvested, stats.loss
            );
        }
    }));

    let report = train_loop(game.as_ref(), &mut adaptive, &terminal, &episode, &settings, &mut hooks)
        .unwrap();
    let states = match &adaptive {
        AdaptiveEval::Table(t) => t.len(),
        _ => unreachable!(),
    };
    println!("{} episodes done, table holds {} states", report.episodes_run, states);

    // A 1-iteration alpha-beta deepening is a plain one-ply greedy lookup:
    // whatever strength shows here lives in the table, not in the search.
    let greedy = Contender::Engine {
        label: "greedy-table".into(),
        algorithm: Algorithm::AlphaBetaId,
        budget: Budget::Iterations(1),
        adaptive: &adaptive,
        terminal: &terminal,
    };
    let random = Contender::Random { label: "random".into() };
    let outcome = duel(game.as_ref(), &greedy, &random, 500, 0, 99);
    println!(
        "greedy table vs random over {} games: {} wins, {} draws, {} losses",
        outcome.games, outcome.wins_a, outcome.draws, outcome.losses_a
    );
}
