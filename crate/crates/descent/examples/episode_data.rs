//! Run one self-play episode and compare what the three data modes
//! harvest from it, then push everything through a bounded replay buffer.
//!
//!     cargo run --example episode_data

use descent::eval::{AdaptiveEval, HeuristicKind, TerminalEval};
use descent::game::by_name;
use descent::learning::{run_episode, Capacity, DataMode, EpisodeConfig, ReplayBuffer};
use descent::search::{Algorithm, Budget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let game = by_name("tictactoe", 3, false).unwrap();
    let adaptive = AdaptiveEval::Noise { seed: 1, amplitude: 0.05 };
    let terminal = TerminalEval::new(HeuristicKind::Classic);

    println!("one 50-iteration descent episode, by data mode:");
    for data in [DataMode::Tree, DataMode::Root, DataMode::Terminal] {
        let cfg = EpisodeConfig {
            algorithm: Algorithm::Descent,
            budget: Budget::Iterations(50),
            policy: descent::learning::SelectionPolicy::Ordinal,
            data,
            ply_cap: 100,
        };
        // The same seed replays the same game; only the harvest differs.
        let mut rng = ChaCha8Rng::seed_from_u64(500);
        let episode = run_episode(game.as_ref(), &adaptive, &terminal, &cfg, 0.5, &mut rng, None);
        let targets: Vec<f64> = episode.pairs.iter().take(4).map(|(_, target)| *target).collect();
        println!(
            "  {:<9} {:>4} pairs from a {}-ply game, first targets {:?}",
            cfg.data.label(),
            episode.pairs.len(),
            episode.trajectory.len() - 1,
            targets,
        );
    }

    // The replay buffer bounds memory; eviction is strictly oldest-first.
    let mut buffer = ReplayBuffer::new(Capacity::Games(3), 1.0);
    let cfg = EpisodeConfig {
        algorithm: Algorithm::Descent,
        budget: Budget::Iterations(20),
        policy: descent::learning::SelectionPolicy::Ordinal,
        data: DataMode::Root,
        ply_cap: 100,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    println!("\nfilling a 3-game replay buffer:");
    for n in 1..=5 {
        let episode = run_episode(game.as_ref(), &adaptive, &terminal, &cfg, 0.5, &mut rng, None);
        buffer.push(episode.pairs);
        println!(
            "  after episode {n}: {} pairs from {} games",
            buffer.len_pairs(),
            buffer.len_games()
        );
    }
}
