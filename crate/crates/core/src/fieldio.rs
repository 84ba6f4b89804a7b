//! Deterministic binary serialization of real fields.
//!
//! Layout (all little-endian):
//!
//! ```text
//! magic   4 bytes  "JMGT"
//! version u32      currently 1
//! dim     u32
//! n       u32      points per axis
//! L       f64      domain side length
//! data    n^dim f64, row-major
//! ```

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::grid::GridSpec;

pub const MAGIC: &[u8; 4] = b"JMGT";
pub const VERSION: u32 = 1;

pub fn serialize_field(f: &RealField) -> Vec<u8> {
    let spec = f.spec();
    let mut out = Vec::with_capacity(20 + 8 * f.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(spec.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(spec.points_per_axis() as u32).to_le_bytes());
    out.extend_from_slice(&spec.len().to_le_bytes());
    for v in f.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn deserialize_field(blob: &[u8]) -> Result<RealField> {
    if blob.len() < 20 {
        return Err(Error::format(format!("field blob truncated at {} bytes", blob.len())));
    }
    if &blob[0..4] != MAGIC {
        return Err(Error::format("bad magic; not a field blob"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(blob[o..o + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::format(format!(
            "unsupported field format version {version} (expected {VERSION})"
        )));
    }
    let dim = u32_at(8) as usize;
    let n = u32_at(12) as usize;
    let len = f64::from_le_bytes(blob[16..24].try_into().unwrap());
    let spec = GridSpec::new(dim, n, len)?;
    let total = spec.total_points();
    let expect = 24 + 8 * total;
    if blob.len() != expect {
        return Err(Error::format(format!(
            "field blob has {} bytes, expected {expect} for a {n}^{dim} grid",
            blob.len()
        )));
    }
    let mut data = Vec::with_capacity(total);
    for i in 0..total {
        let o = 24 + 8 * i;
        data.push(f64::from_le_bytes(blob[o..o + 8].try_into().unwrap()));
    }
    RealField::from_data(&spec, data)
}

pub fn write_field(path: &std::path::Path, f: &RealField) -> Result<()> {
    std::fs::write(path, serialize_field(f))?;
    Ok(())
}

pub fn read_field(path: &std::path::Path) -> Result<RealField> {
    let blob = std::fs::read(path)?;
    deserialize_field(&blob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roundtrip_is_bit_exact() {
        let spec = GridSpec::new(3, 8, 1.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let data: Vec<f64> = (0..spec.total_points())
            .map(|_| rng.random_range(-5.0..5.0))
            .collect();
        let f = RealField::from_data(&spec, data).unwrap();
        let back = deserialize_field(&serialize_field(&f)).unwrap();
        assert_eq!(f.spec(), back.spec());
        for (a, b) in f.data().iter().zip(back.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn truncated_and_corrupt_blobs_are_rejected() {
        let spec = GridSpec::new(1, 8, 1.0).unwrap();
        let f = RealField::zeros(&spec);
        let blob = serialize_field(&f);
        assert!(deserialize_field(&blob[..blob.len() - 1]).is_err());
        assert!(deserialize_field(&blob[..10]).is_err());
        let mut bad_magic = blob.clone();
        bad_magic[0] = b'X';
        assert!(deserialize_field(&bad_magic).is_err());
        let mut bad_version = blob.clone();
        bad_version[4] = 9;
        assert!(deserialize_field(&bad_version).is_err());
    }
}
