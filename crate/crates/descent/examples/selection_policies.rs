//! Sample each action-selection policy at several annealing stages and
//! print the empirical pick frequencies. Early in training the policies
//! explore; by the end they all commit to the best move.
//!
//!     cargo run --example selection_policies

use descent::learning::{select_epsilon_greedy, select_ordinal, select_softmax};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let values = [0.7, 0.2, -0.1, -0.4];
    let draws = 100_000;
    println!("four maximizer moves valued {values:?}, {draws} draws each\n");

    println!("progress  epsilon-greedy           ordinal                  softmax (T = 1 - progress)");
    for progress in [0.0f64, 0.5, 0.9] {
        let eps = frequencies(values.len(), draws, 10 + progress.to_bits(), |rng| {
            select_epsilon_greedy(&values, true, progress, rng)
        });
        let ord = frequencies(values.len(), draws, 20 + progress.to_bits(), |rng| {
            select_ordinal(&values, true, progress, rng)
        });
        // Softmax does not anneal by itself; cooling the temperature as
        // training progresses has the same effect.
        let temperature = 1.0 - 0.9 * progress;
        let soft = frequencies(values.len(), draws, 30 + progress.to_bits(), |rng| {
            select_softmax(&values, true, temperature, rng)
        });
        println!("{:>8.1}  {}  {}  {}", progress, row(&eps), row(&ord), row(&soft));
    }

    println!("\nordinal never reads the value gaps, only the ranking:");
    let stretched = [700.0, 0.2, -0.1, -400.0];
    let plain = frequencies(4, draws, 7, |rng| select_ordinal(&values, true, 0.5, rng));
    let wide = frequencies(4, draws, 7, |rng| select_ordinal(&stretched, true, 0.5, rng));
    println!("  values {:?}: {}", values, row(&plain));
    println!("  values {:?}: {}", stretched, row(&wide));
}

fn frequencies(
    n: usize,
    draws: usize,
    seed: u64,
    mut pick: impl FnMut(&mut ChaCha8Rng) -> usize,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; n];
    for _ in 0..draws {
        counts[pick(&mut rng)] += 1;
    }
    counts.iter().map(|&c| c as f64 / draws as f64).collect()
}

fn row(freq: &[f64]) -> String {
    let cells: Vec<String> = freq.iter().map(|f| format!("{f:.3}")).collect();
    cells.join(" ")
}
