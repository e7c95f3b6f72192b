//! Incremental position hashing.
//!
//! Each game owns a key table seeded deterministically from the game name and
//! board size, so keys are stable across runs and processes. The hash of a
//! state is the XOR of the keys of its occupied cells, a side-to-move key when
//! the second player moves, and any rule-flag keys (the Hex swap right).

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Player;

/// Zobrist key table for one game and board size.
#[derive(Clone, Debug)]
pub struct Zobrist {
    cell_keys: Vec<[u64; 2]>,
    to_move_key: u64,
    flag_keys: [u64; 2],
}

impl Zobrist {
    /// Build a table with one key pair per cell, seeded from `label`.
    pub fn new(cells: usize, label: &str) -> Zobrist {
        let mut seed = [0u8; 32];
        for (i, b) in label.bytes().enumerate() {
            seed[i % 32] ^= b.wrapping_add(i as u8);
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        let cell_keys = (0..cells)
            .map(|_| [rng.next_u64(), rng.next_u64()])
            .collect();
        Zobrist {
            cell_keys,
            to_move_key: rng.next_u64(),
            flag_keys: [rng.next_u64(), rng.next_u64()],
        }
    }

    /// Key of `player`'s piece on `cell`.
    pub fn cell(&self, cell: usize, player: Player) -> u64 {
        match player {
            Player::First => self.cell_keys[cell][0],
            Player::Second => self.cell_keys[cell][1],
        }
    }

    /// Key XORed in while the second player is to move.
    pub fn to_move(&self) -> u64 {
        self.to_move_key
    }

    /// Key of a rule flag (flag 0: Hex swap available).
    pub fn flag(&self, idx: usize) -> u64 {
        self.flag_keys[idx]
    }

    /// Hash a cell vector plus side to move from scratch.
    pub fn full(&self, cells: &[i8], to_move: Player) -> u64 {
        let mut h = 0u64;
        for (i, &v) in cells.iter().enumerate() {
            match v {
                1 => h ^= self.cell(i, Player::First),
                -1 => h ^= self.cell(i, Player::Second),
                _ => {}
            }
        }
        if to_move == Player::Second {
            h ^= self.to_move_key;
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_label_same_keys() {
        let a = Zobrist::new(9, "hex-3");
        let b = Zobrist::new(9, "hex-3");
        assert_eq!(a.cell(4, Player::First), b.cell(4, Player::First));
        assert_eq!(a.to_move(), b.to_move());
    }

    #[test]
    fn different_labels_differ() {
        let a = Zobrist::new(9, "hex-3");
        let b = Zobrist::new(9, "tictactoe");
        assert_ne!(a.cell(0, Player::First), b.cell(0, Player::First));
    }

    #[test]
    fn incremental_matches_full() {
        let z = Zobrist::new(9, "test");
        let mut cells = vec![0i8; 9];
        let mut h = z.full(&cells, Player::First);
        cells[3] = 1;
        h ^= z.cell(3, Player::First);
        h ^= z.to_move();
        assert_eq!(h, z.full(&cells, Player::Second));
    }
}
