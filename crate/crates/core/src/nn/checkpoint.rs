//! Binary checkpoint format.
//!
//! ```text
//! offset  size       field
//! 0       8          magic "PINNCKPT"
//! 8       4          format version (u32 LE, currently 1)
//! 12      1          activation tag (0 gelu, 1 tanh, 2 sigmoid, 3 relu)
//! 13      4          number of layer sizes S (u32 LE)
//! 17      8·S        layer sizes (u64 LE each), input first
//! ...     8·P        parameters (f64 LE): per layer, weights row-major then biases
//! ```

use std::fs;
use std::path::Path;

use super::activation::Activation;
use super::network::{param_count_for, validate_sizes, Network};
use crate::error::{CheckpointError, PinnError, Result};

pub const MAGIC: &[u8; 8] = b"PINNCKPT";
pub const VERSION: u32 = 1;

pub fn encode(net: &Network) -> Vec<u8> {
    let sizes = net.sizes();
    let mut out = Vec::with_capacity(17 + 8 * sizes.len() + 8 * net.param_count());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(net.activation().tag());
    out.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
    for &s in sizes {
        out.extend_from_slice(&(s as u64).to_le_bytes());
    }
    for v in net.flat_params() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn take<'a>(bytes: &mut &'a [u8], n: usize, what: &str) -> Result<&'a [u8], CheckpointError> {
    if bytes.len() < n {
        return Err(CheckpointError::MalformedHeader(format!(
            "file ends inside the {what}"
        )));
    }
    let (head, tail) = bytes.split_at(n);
    *bytes = tail;
    Ok(head)
}

pub fn decode(mut bytes: &[u8]) -> Result<Network, CheckpointError> {
    let magic = take(&mut bytes, 8, "magic number")?;
    if magic != MAGIC {
        return Err(CheckpointError::MalformedHeader("bad magic number".into()));
    }
    let version = u32::from_le_bytes(take(&mut bytes, 4, "version")?.try_into().unwrap());
    if version != VERSION {
        return Err(CheckpointError::UnsupportedVersion(version));
    }
    let tag = take(&mut bytes, 1, "activation tag")?[0];
    let activation = Activation::from_tag(tag)
        .ok_or_else(|| CheckpointError::MalformedHeader(format!("unknown activation tag {tag}")))?;
    let count = u32::from_le_bytes(take(&mut bytes, 4, "layer count")?.try_into().unwrap()) as usize;
    if count > 4096 {
        return Err(CheckpointError::MalformedHeader(format!(
            "implausible layer count {count}"
        )));
    }
    let mut sizes = Vec::with_capacity(count);
    for _ in 0..count {
        let raw = u64::from_le_bytes(take(&mut bytes, 8, "layer sizes")?.try_into().unwrap());
        sizes.push(usize::try_from(raw).map_err(|_| {
            CheckpointError::ShapeMismatch(format!("layer size {raw} does not fit in memory"))
        })?);
    }
    validate_sizes(&sizes).map_err(|e| CheckpointError::ShapeMismatch(e.to_string()))?;
    let params = param_count_for(&sizes);
    let expected = params * 8;
    if bytes.len() < expected {
        return Err(CheckpointError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(CheckpointError::ShapeMismatch(format!(
            "{} trailing bytes after {params} parameters for sizes {sizes:?}",
            bytes.len() - expected
        )));
    }
    let flat: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let mut net = Network::init_glorot(&sizes, activation, 0)
        .map_err(|e| CheckpointError::ShapeMismatch(e.to_string()))?;
    net.set_flat_params(&flat)
        .map_err(|e| CheckpointError::ShapeMismatch(e.to_string()))?;
    Ok(net)
}

pub fn save_checkpoint(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(net)).map_err(|e| PinnError::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| PinnError::io(path, e))?;
    Ok(decode(&bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::layer_sizes;

    fn sample() -> Network {
        Network::init_glorot(&layer_sizes(3, 6), Activation::Tanh, 77).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let net = sample();
        let back = decode(&encode(&net)).unwrap();
        assert_eq!(back, net);
        let bits = |n: &Network| n.flat_params().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&net));
    }

    #[test]
    fn empty_file_is_malformed() {
        assert!(matches!(decode(&[]), Err(CheckpointError::MalformedHeader(_))));
    }

    #[test]
    fn bad_magic_is_malformed() {
        let mut bytes = encode(&sample());
        bytes[0] = b'X';
        assert!(matches!(decode(&bytes), Err(CheckpointError::MalformedHeader(_))));
    }

    #[test]
    fn wrong_version_is_reported() {
        let mut bytes = encode(&sample());
        bytes[8] = 9;
        assert!(matches!(decode(&bytes), Err(CheckpointError::UnsupportedVersion(9))));
    }

    #[test]
    fn truncated_payload() {
        let bytes = encode(&sample());
        let cut = &bytes[..bytes.len() - 5];
        assert!(matches!(decode(cut), Err(CheckpointError::Truncated { .. })));
    }

    #[test]
    fn trailing_bytes_and_bad_sizes_are_shape_mismatches() {
        let mut bytes = encode(&sample());
        bytes.extend_from_slice(&[0u8; 8]);
        assert!(matches!(decode(&bytes), Err(CheckpointError::ShapeMismatch(_))));

        let mut bytes = encode(&sample());
        // first layer size (input width) overwritten with 3
        bytes[17] = 3;
        assert!(matches!(decode(&bytes), Err(CheckpointError::ShapeMismatch(_))));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        let net = sample();
        save_checkpoint(&net, &path).unwrap();
        assert_eq!(load_checkpoint(&path).unwrap(), net);
        std::fs::write(&path, b"").unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(PinnError::Checkpoint(CheckpointError::MalformedHeader(_)))
        ));
    }
}
