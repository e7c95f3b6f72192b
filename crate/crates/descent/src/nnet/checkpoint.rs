//! Versioned binary network checkpoints.
//!
//! Layout, all integers and floats little-endian:
//! magic `VNET`, format version (u32), architecture descriptor (u32 length +
//! UTF-8 text), parameter count (u64), the f32 parameters, the two Adam
//! moment vectors (f32 each, same length), and the optimizer step counter
//! (u64). Parameters round-trip bit for bit.

use std::io::{self, Read, Write};

use super::{Adam, Architecture, Net, NetError, Network};

const MAGIC: &[u8; 4] = b"VNET";
const VERSION: u32 = 1;

/// Serialize a network with its optimizer state.
pub fn write_network(w: &mut dyn Write, net: &Network) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    let descriptor = net.architecture().descriptor();
    w.write_all(&(descriptor.len() as u32).to_le_bytes())?;
    w.write_all(descriptor.as_bytes())?;
    w.write_all(&(net.param_count() as u64).to_le_bytes())?;
    for &p in net.params() {
        w.write_all(&p.to_le_bytes())?;
    }
    for &m in &net.adam.m {
        w.write_all(&m.to_le_bytes())?;
    }
    for &v in &net.adam.v {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&net.adam.step.to_le_bytes())?;
    Ok(())
}

/// Deserialize a network written by [`write_network`].
pub fn read_network(r: &mut dyn Read) -> Result<Network, NetError> {
    let mut magic = [0u8; 4];
    read_exact(r, &mut magic)?;
    if &magic != MAGIC {
        return Err(NetError("not a network checkpoint (bad magic)".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(NetError(format!(
            "unsupported checkpoint version {version} (expected {VERSION})"
        )));
    }
    let desc_len = read_u32(r)? as usize;
    if desc_len > 1 << 16 {
        return Err(NetError("unreasonable descriptor length".into()));
    }
    let mut desc = vec![0u8; desc_len];
    read_exact(r, &mut desc)?;
    let descriptor = String::from_utf8(desc)
        .map_err(|_| NetError("descriptor is not valid UTF-8".into()))?;
    let arch = Architecture::parse(&descriptor)?;
    let count = read_u64(r)? as usize;
    let mut net: Net<f32> = Net::zeros(arch);
    if net.param_count() != count {
        return Err(NetError(format!(
            "checkpoint has {count} parameters but the architecture needs {}",
            net.param_count()
        )));
    }
    read_f32_into(r, net.params_mut())?;
    let mut adam = Adam::new(count);
    read_f32_into(r, &mut adam.m)?;
    read_f32_into(r, &mut adam.v)?;
    adam.step = read_u64(r)?;
    Ok(Network::from_parts(net, adam))
}

fn read_exact(r: &mut dyn Read, buf: &mut [u8]) -> Result<(), NetError> {
    r.read_exact(buf)
        .map_err(|e| NetError(format!("truncated checkpoint: {e}")))
}

fn read_u32(r: &mut dyn Read) -> Result<u32, NetError> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut dyn Read) -> Result<u64, NetError> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f32_into(r: &mut dyn Read, out: &mut [f32]) -> Result<(), NetError> {
    let mut b = [0u8; 4];
    for slot in out {
        read_exact(r, &mut b)?;
        *slot = f32::from_le_bytes(b);
    }
    Ok(())
}
