//! Content-addressed checkpoint store.
//!
//! Every saved evaluation is written under the hex SHA-256 of its payload,
//! next to a snapshot of the configuration that produced it, and appended
//! to an index that preserves save order. Addressing by content makes
//! tampering self-evident: a payload that no longer hashes to its own id
//! is refused at load time.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::eval::{AdaptiveEval, ValueTable};
use crate::game::StateKey;
use crate::nnet::{read_network, write_network};

const TABLE_MAGIC: &[u8; 4] = b"VTAB";
const TABLE_VERSION: u32 = 1;
const INDEX: &str = "index.tsv";

#[derive(Debug)]
pub struct RegistryError(pub String);

impl std::fmt::Display for RegistryError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for RegistryError {}

impl From<io::Error> for RegistryError {
    fn from(e: io::Error) -> RegistryError {
        RegistryError(e.to_string())
    }
}

/// A directory of saved evaluations plus their index.
pub struct Registry {
    dir: PathBuf,
}

/// One index entry.
#[derive(Clone, Debug, PartialEq)]
pub struct SavedCheckpoint {
    /// Hex SHA-256 of the payload; also the payload's file stem.
    pub id: String,
    /// Caller-chosen tag, typically the episode mark.
    pub label: String,
    /// `network` or `table`.
    pub kind: String,
    /// Architecture descriptor for networks, `table` for tables.
    pub descriptor: String,
}

impl Registry {
    /// Open (creating if needed) a registry at `dir`.
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Registry> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Registry { dir })
    }

    pub fn dir(&self) -> &std::path::Path {
        &self.dir
    }

    /// Save an evaluation with the configuration text that produced it.
    /// Re-saving identical content reuses the payload file but still adds
    /// an index entry, so `list` reflects every save event.
    pub fn save(
        &self,
        label: &str,
        adaptive: &AdaptiveEval,
        config: &str,
    ) -> Result<SavedCheckpoint, RegistryError> {
        let (kind, descriptor, payload) = encode(adaptive)?;
        let id = hex_digest(&payload);
        let ckpt = self.dir.join(format!("{id}.ckpt"));
        if !ckpt.exists() {
            fs::write(&ckpt, &payload)?;
        }
        fs::write(self.dir.join(format!("{id}.config")), config)?;
        let entry = SavedCheckpoint {
            id,
            label: label.replace(['\t', '\n'], " "),
            kind: kind.to_string(),
            descriptor,
        };
        let mut index = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.dir.join(INDEX))?;
        writeln!(index, "{}\t{}\t{}\t{}", entry.id, entry.label, entry.kind, entry.descriptor)?;
        Ok(entry)
    }

    /// Load a saved evaluation, verifying the payload still matches its id
    /// and, when given, that a network's architecture descriptor matches
    /// the expected one.
    pub fn load(
        &self,
        id: &str,
        expect_descriptor: Option<&str>,
    ) -> Result<AdaptiveEval, RegistryError> {
        let path = self.dir.join(format!("{id}.ckpt"));
        let payload = fs::read(&path)
            .map_err(|e| RegistryError(format!("checkpoint {id}: {e}")))?;
        if hex_digest(&payload) != id {
            return Err(RegistryError(format!(
                "checkpoint {id} does not hash to its own id; the file was altered"
            )));
        }
        let adaptive = decode(&payload)?;
        if let Some(expect) = expect_descriptor {
            let found = match &adaptive {
                AdaptiveEval::Network(net) => net.architecture().descriptor(),
                _ => "table".to_string(),
            };
            if found != expect {
                return Err(RegistryError(format!(
                    "checkpoint {id} holds `{found}` but `{expect}` was expected"
                )));
            }
        }
        Ok(adaptive)
    }

    /// The configuration snapshot stored with a checkpoint.
    pub fn config_of(&self, id: &str) -> Result<String, RegistryError> {
        Ok(fs::read_to_string(self.dir.join(format!("{id}.config")))?)
    }

    /// Copy a verified checkpoint payload to a standalone file that
    /// [`read_checkpoint_file`] can load back.
    pub fn export(&self, id: &str, dest: &std::path::Path) -> Result<(), RegistryError> {
        self.load(id, None)?;
        fs::copy(self.dir.join(format!("{id}.ckpt")), dest)?;
        Ok(())
    }

    /// All index entries in save order.
    pub fn list(&self) -> Result<Vec<SavedCheckpoint>, RegistryError> {
        let path = self.dir.join(INDEX);
        if !path.exists() {
            return Ok(Vec::new());
        }
        let text = fs::read_to_string(path)?;
        let mut out = Vec::new();
        for line in text.lines() {
            let mut fields = line.splitn(4, '\t');
            match (fields.next(), fields.next(), fields.next(), fields.next()) {
                (Some(id), Some(label), Some(kind), Some(descriptor)) => {
                    out.push(SavedCheckpoint {
                        id: id.to_string(),
                        label: label.to_string(),
                        kind: kind.to_string(),
                        descriptor: descriptor.to_string(),
                    });
                }
                _ => return Err(RegistryError(format!("malformed index line `{line}`"))),
            }
        }
        Ok(out)
    }
}

/// Load an exported checkpoint file (outside any registry, so there is no
/// id to verify against; the payload's own framing is still validated).
pub fn read_checkpoint_file(path: &std::path::Path) -> Result<AdaptiveEval, RegistryError> {
    let payload =
        fs::read(path).map_err(|e| RegistryError(format!("{}: {e}", path.display())))?;
    decode(&payload)
}

fn hex_digest(payload: &[u8]) -> String {
    let digest = Sha256::digest(payload);
    let mut id = String::with_capacity(64);
    for byte in digest {
        id.push_str(&format!("{byte:02x}"));
    }
    id
}

fn encode(adaptive: &AdaptiveEval) -> Result<(&'static str, String, Vec<u8>), RegistryError> {
    match adaptive {
        AdaptiveEval::Network(net) => {
            let mut payload = Vec::new();
            write_network(&mut payload, net)?;
            Ok(("network", net.architecture().descriptor(), payload))
        }
        AdaptiveEval::Table(table) => {
            let mut entries: Vec<(u64, f64)> = table.iter().map(|(k, v)| (k.0, v)).collect();
            entries.sort_unstable_by_key(|&(k, _)| k);
            let mut payload = Vec::with_capacity(16 + entries.len() * 16);
            payload.extend_from_slice(TABLE_MAGIC);
            payload.extend_from_slice(&TABLE_VERSION.to_le_bytes());
            payload.extend_from_slice(&(entries.len() as u64).to_le_bytes());
            for (k, v) in entries {
                payload.extend_from_slice(&k.to_le_bytes());
                payload.extend_from_slice(&v.to_le_bytes());
            }
            Ok(("table", "table".to_string(), payload))
        }
        AdaptiveEval::Noise { .. } => {
            Err(RegistryError("noise evaluations have nothing to checkpoint".to_string()))
        }
    }
}

fn decode(payload: &[u8]) -> Result<AdaptiveEval, RegistryError> {
    if payload.starts_with(TABLE_MAGIC) {
        return decode_table(payload);
    }
    let net = read_network(&mut &payload[..])
        .map_err(|e| RegistryError(format!("network payload: {}", e.0)))?;
    Ok(AdaptiveEval::Network(net))
}

fn decode_table(payload: &[u8]) -> Result<AdaptiveEval, RegistryError> {
    let bad = |what: &str| RegistryError(format!("table payload: {what}"));
    if payload.len() < 16 {
        return Err(bad("truncated header"));
    }
    let version = u32::from_le_bytes(payload[4..8].try_into().unwrap());
    if version != TABLE_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let count = u64::from_le_bytes(payload[8..16].try_into().unwrap()) as usize;
    let body = &payload[16..];
    if body.len() != count * 16 {
        return Err(bad("entry count disagrees with payload length"));
    }
    let mut table = ValueTable::new();
    for chunk in body.chunks_exact(16) {
        let key = u64::from_le_bytes(chunk[..8].try_into().unwrap());
        let value = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        table.assign(StateKey(key), value);
    }
    Ok(AdaptiveEval::Table(table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnet::{Architecture, Network};

    fn temp_registry(tag: &str) -> Registry {
        let dir = std::env::temp_dir().join(format!("descent-registry-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        Registry::open(dir).unwrap()
    }

    #[test]
    fn a_network_round_trips_bit_for_bit() {
        let reg = temp_registry("net");
        let arch = Architecture::dense_default((3, 3, 3), true);
        let net = Network::init(arch, 3);
        let descriptor = net.architecture().descriptor();
        let saved = reg
            .save("ep100", &AdaptiveEval::Network(net.clone()), "game=tictactoe\n")
            .unwrap();
        assert_eq!(saved.kind, "network");
        let loaded = reg.load(&saved.id, Some(&descriptor)).unwrap();
        let loaded = loaded.as_network().unwrap();
        assert_eq!(loaded.params(), net.params());
        assert_eq!(loaded.architecture().descriptor(), descriptor);
        assert_eq!(reg.config_of(&saved.id).unwrap(), "game=tictactoe\n");
    }

    #[test]
    fn a_value_table_round_trips_bit_for_bit() {
        let reg = temp_registry("tab");
        let mut table = ValueTable::new();
        table.assign(StateKey(42), 0.25);
        table.assign(StateKey(7), -0.125);
        let saved = reg.save("ep1", &AdaptiveEval::Table(table.clone()), "").unwrap();
        let loaded = reg.load(&saved.id, None).unwrap();
        match loaded {
            AdaptiveEval::Table(got) => {
                assert_eq!(got.get(StateKey(42)), 0.25);
                assert_eq!(got.get(StateKey(7)), -0.125);
                assert_eq!(got.get(StateKey(999)), 0.0);
            }
            _ => panic!("expected a table"),
        }
    }

    #[test]
    fn the_index_lists_saves_in_order() {
        let reg = temp_registry("order");
        let mut table = ValueTable::new();
        let mut ids = Vec::new();
        for mark in [100u64, 200, 300] {
            table.assign(StateKey(mark), mark as f64);
            let saved = reg
                .save(&format!("ep{mark}"), &AdaptiveEval::Table(table.clone()), "")
                .unwrap();
            ids.push(saved.id);
        }
        let listed = reg.list().unwrap();
        assert_eq!(listed.len(), 3);
        assert_eq!(listed.iter().map(|e| e.id.as_str()).collect::<Vec<_>>(), ids);
        assert_eq!(listed[0].label, "ep100");
        assert_eq!(listed[2].label, "ep300");
    }

    #[test]
    fn identical_content_gets_an_identical_id() {
        let reg = temp_registry("dedup");
        let mut table = ValueTable::new();
        table.assign(StateKey(1), 1.0);
        let a = reg.save("first", &AdaptiveEval::Table(table.clone()), "").unwrap();
        let b = reg.save("again", &AdaptiveEval::Table(table), "").unwrap();
        assert_eq!(a.id, b.id);
        assert_eq!(reg.list().unwrap().len(), 2, "both save events are indexed");
    }

    #[test]
    fn a_tampered_payload_is_refused() {
        let reg = temp_registry("tamper");
        let mut table = ValueTable::new();
        table.assign(StateKey(5), 0.5);
        let saved = reg.save("ep1", &AdaptiveEval::Table(table), "").unwrap();
        let path = reg.dir().join(format!("{}.ckpt", saved.id));
        let mut bytes = fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0x01;
        fs::write(&path, bytes).unwrap();
        let err = reg.load(&saved.id, None).unwrap_err();
        assert!(err.0.contains("altered"), "{err}");
    }

    #[test]
    fn a_mismatched_architecture_is_refused() {
        let reg = temp_registry("arch");
        let net = Network::init(Architecture::dense_default((3, 3, 3), true), 1);
        let saved = reg.save("ep1", &AdaptiveEval::Network(net), "").unwrap();
        let err = reg.load(&saved.id, Some("in:9x9x9;dense:1;tanh")).unwrap_err();
        assert!(err.0.contains("expected"), "{err}");
    }

    #[test]
    fn an_exported_file_loads_outside_the_registry() {
        let reg = temp_registry("export");
        let mut table = ValueTable::new();
        table.assign(StateKey(11), 0.75);
        let saved = reg.save("ep9", &AdaptiveEval::Table(table), "").unwrap();
        let dest = reg.dir().join("standalone.ckpt");
        reg.export(&saved.id, &dest).unwrap();
        match read_checkpoint_file(&dest).unwrap() {
            AdaptiveEval::Table(got) => assert_eq!(got.get(StateKey(11)), 0.75),
            _ => panic!("expected a table"),
        }
    }

    #[test]
    fn noise_has_nothing_to_save() {
        let reg = temp_registry("noise");
        let err = reg
            .save("ep1", &AdaptiveEval::Noise { seed: 1, amplitude: 0.5 }, "")
            .unwrap_err();
        assert!(err.0.contains("noise"), "{err}");
    }
}
