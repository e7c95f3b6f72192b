//! Train two algorithm combinations, snapshot their evaluations at fixed
//! episode marks, and print the learning-curve CSV the tournament harness
//! produces.
//!
//!     cargo run --release --example tournament_curves

use descent::eval::{AdaptiveEval, HeuristicKind, TerminalEval};
use descent::game::by_name;
use descent::harness::{emit_curves, evaluate_marks, round_robin, Combination, Contender, MatchMode};
use descent::learning::{
    train_loop, Capacity, DataMode, EpisodeConfig, SelectionPolicy, TrainHooks, TrainSettings,
};
use descent::search::{Algorithm, Budget};

fn main() {
    let game = by_name("tictactoe", 3, false).unwrap();
    let terminal = TerminalEval::new(HeuristicKind::Classic);
    let marks: Vec<u64> = vec![10, 20, 40, 80];

    let mut combinations = Vec::new();
    for (label, algorithm) in [("descent", Algorithm::Descent), ("ubfm", Algorithm::Ubfm)] {
        let episode = EpisodeConfig {
            algorithm,
            budget: Budget::Iterations(40),
            policy: SelectionPolicy::Ordinal,
            data: DataMode::Tree,
            ply_cap: 100,
        };
        let settings = TrainSettings {
            episodes: *marks.last().unwrap(),
            replay: Capacity::Games(40),
            checkpoint_every: 1,
            seed: 5,
            ..TrainSettings::default()
        };

        let mut adaptive = AdaptiveEval::zero_table();
        let mut at_mark = Vec::new();
        let mut hooks = TrainHooks::none();
        hooks.on_checkpoint = Some(Box::new(|mark, snapshot| {
            if marks.contains(&mark) {
                at_mark.push(snapshot.clone());
            }
            Ok(())
        }));
        train_loop(game.as_ref(), &mut adaptive, &terminal, &episode, &settings, &mut hooks)
            .unwrap();
        drop(hooks);

        combinations.push(Combination {
            label: label.into(),
            algorithm,
            budget: Budget::Iterations(40),
            terminal,
            at_mark,
        });
    }

    // Each snapshot plays every final evaluation, greedily: the curve
    // tracks evaluation quality over training, search strength held fixed.
    let cells = evaluate_marks(game.as_ref(), &combinations, &marks, MatchMode::GreedyEval, 4, 1, 42);
    let mut csv = Vec::new();
    emit_curves(&cells, &mut csv).unwrap();
    print!("{}", String::from_utf8(csv).unwrap());

    let finals: Vec<Contender> = combinations
        .iter()
        .map(|combo| Contender::Engine {
            label: combo.label.clone(),
            algorithm: combo.algorithm,
            budget: combo.budget,
            adaptive: combo.at_mark.last().unwrap(),
            terminal: &combo.terminal,
        })
        .collect();
    let standings = round_robin(game.as_ref(), &finals, 20, 1, 43);
    println!("\nfinal snapshots, all-play-all:");
    for s in &standings {
        println!("  {:<10} {:5.1}% +-{:.1} over {} games", s.label, 100.0 * s.score, 100.0 * s.ci, s.games);
    }
}
