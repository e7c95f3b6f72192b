//! Tour the built-in games: play a few random moves in each, render the
//! board, and list the per-game facts the learner relies on.
//!
//!     cargo run --example game_gallery

use descent::game::{by_name, render_board, LengthProfile};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (name, size, swap) in [
        ("tictactoe", 3, false),
        ("hex", 5, true),
        ("othello", 6, false),
        ("breakthrough", 6, false),
        ("clobber", 5, false),
    ] {
        let game = by_name(name, size, swap).unwrap();
        let mut s = game.initial_state();
        for _ in 0..4 {
            if game.is_terminal(&s) {
                break;
            }
            let actions = game.legal_actions(&s);
            s = game.apply(&s, *actions.choose(&mut rng).unwrap());
        }

        let (planes, rows, cols) = game.plane_shape();
        let length = match game.length_profile() {
            LengthProfile::Exact(p) => format!("always {p} plies"),
            LengthProfile::Approximate(p) => format!("about {p:.0} plies"),
        };
        println!("{}: {length}, {planes}x{rows}x{cols} input planes", game.name());
        println!("{}", render_board(game.as_ref(), &s));
        println!(
            "  after 4 random plies: {} legal moves, {} symmetric encodings, fen {}",
            game.legal_actions(&s).len(),
            game.symmetries(&s).len(),
            game.to_fen(&s),
        );
        println!();
    }
}
