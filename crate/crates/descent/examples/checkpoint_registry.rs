//! Save an evaluation to the content-addressed registry, reload it, export
//! it as a standalone file, and show that tampering is caught.
//!
//!     cargo run --example checkpoint_registry

use std::fs;

use descent::eval::AdaptiveEval;
use descent::game::by_name;
use descent::harness::{read_checkpoint_file, Registry};
use descent::nnet::{Architecture, Network};

fn main() {
    let dir = std::env::temp_dir().join("descent-registry-example");
    let _ = fs::remove_dir_all(&dir);
    let registry = Registry::open(&dir).unwrap();

    let game = by_name("hex", 5, false).unwrap();
    let arch = Architecture::desk_default(game.plane_shape(), true);
    let net = AdaptiveEval::Network(Network::init(arch, 21));

    let saved = registry.save("fresh", &net, "game=hex\nsize=5\n").unwrap();
    println!("saved {} ({}, {})", saved.id, saved.kind, saved.descriptor);

    // Identical content gets the identical id: saving twice stores one file.
    let again = registry.save("fresh-twin", &net, "game=hex\nsize=5\n").unwrap();
    assert_eq!(saved.id, again.id);
    println!("the twin deduplicated to the same id");

    let loaded = registry.load(&saved.id, Some(&saved.descriptor)).unwrap();
    assert!(matches!(loaded, AdaptiveEval::Network(_)));
    println!("reloaded and architecture-checked");

    let standalone = dir.join("exported.ckpt");
    registry.export(&saved.id, &standalone).unwrap();
    read_checkpoint_file(&standalone).unwrap();
    println!("exported to {} and read back", standalone.display());

    // Flip one payload byte; the reload must refuse the file.
    let payload = dir.join(format!("{}.ckpt", saved.id));
    let mut bytes = fs::read(&payload).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    fs::write(&payload, bytes).unwrap();
    let err = registry.load(&saved.id, None).unwrap_err();
    println!("tampered payload rejected: {err}");

    for entry in registry.list().unwrap() {
        println!("index entry: {} {} {}", &entry.id[..12], entry.label, entry.kind);
    }
}
