//! Train a small value network on tic-tac-toe and watch the loss fall.
//! The gradients are checked against finite differences before training.
//!
//!     cargo run --release --example train_network

use descent::eval::{AdaptiveEval, HeuristicKind, TerminalEval};
use descent::game::by_name;
use descent::learning::{
    train_loop, Capacity, DataMode, EpisodeConfig, SelectionPolicy, TrainHooks, TrainSettings,
};
use descent::nnet::{grad_check, Architecture, Network};
use descent::search::{Algorithm, Budget};

fn main() {
    let game = by_name("tictactoe", 3, false).unwrap();
    let arch = Architecture::dense_default(game.plane_shape(), true);
    println!("architecture: {}", arch.descriptor());

    let check = grad_check(&arch, 7, 200);
    println!(
        "gradient check: max relative error {:.2e} over {} probes of {} parameters",
        check.max_rel_err, check.checked, check.param_count
    );
    assert!(check.max_rel_err < 1e-4);

    let terminal = TerminalEval::new(HeuristicKind::Classic);
    let mut adaptive = AdaptiveEval::Network(Network::init(arch, 7));

    let episode = EpisodeConfig {
        algorithm: Algorithm::Descent,
        budget: Budget::Iterations(30),
        policy: SelectionPolicy::Ordinal,
        data: DataMode::Terminal,
        ply_cap: 100,
    };
    let settings = TrainSettings {
        episodes: 150,
        replay: Capacity::Pairs(4096),
        sigma: 0.25,
        checkpoint_every: 0,
        seed: 7,
        ..TrainSettings::default()
    };

    let mut losses: Vec<f64> = Vec::new();
    let mut hooks = TrainHooks::none();
    hooks.on_episode = Some(Box::new(|stats| {
        if stats.episode % 25 == 0 {
            println!(
                "episode {:>3}: loss {:.4} on {} sampled pairs",
                stats.episode, stats.loss, stats.trained
            );
        }
    }));
    let report = train_loop(game.as_ref(), &mut adaptive, &terminal, &episode, &settings, &mut hooks)
        .unwrap();
    losses.extend(report.stats.iter().map(|s| s.loss));

    let early: f64 = losses[..10].iter().sum::<f64>() / 10.0;
    let late: f64 = losses[losses.len() - 10..].iter().sum::<f64>() / 10.0;
    println!("mean loss, first 10 episodes: {early:.4}");
    println!("mean loss, last 10 episodes:  {late:.4}");
    assert!(late < early, "training should reduce the loss");
}
