//! Flat binary and JSON encodings of [`CubeFunction`].
//!
//! Binary layout, all little-endian:
//!
//! | offset | size      | content                 |
//! |--------|-----------|-------------------------|
//! | 0      | 4         | magic `b"CUBF"`         |
//! | 4      | 4         | format version (`u32`)  |
//! | 8      | 4         | dimension `n` (`u32`)   |
//! | 12     | `8 * 2^n` | values as `f64`         |

use std::io::{Read, Write};
use std::path::Path;

use super::{check_dimension, CubeFunction};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"CUBF";
pub const FORMAT_VERSION: u32 = 1;

impl CubeFunction {
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.dim() as u32).to_le_bytes())?;
        for v in self.values() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 12];
        r.read_exact(&mut header)?;
        if &header[..4] != MAGIC {
            return Err(Error::Format("missing CUBF magic".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported CUBF version {version}")));
        }
        let n = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        check_dimension(n)?;
        let mut values = Vec::with_capacity(1usize << n);
        let mut buf = [0u8; 8];
        for _ in 0..1usize << n {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after CUBF payload".into()));
        }
        Self::new(n, values)
    }

    pub fn to_binary_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 8 * self.len());
        self.write_binary(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Loads either encoding; the binary form is recognized by its magic.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if bytes.starts_with(MAGIC) {
            Self::read_binary(bytes.as_slice())
        } else {
            let text = std::str::from_utf8(&bytes)
                .map_err(|_| Error::Format("neither CUBF binary nor UTF-8 JSON".into()))?;
            Self::from_json(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let f = CubeFunction::delta(2).unwrap();
        let bytes = f.to_binary_bytes();
        assert_eq!(bytes.len(), 12 + 32);
        assert_eq!(&bytes[..4], b"CUBF");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &[2, 0, 0, 0]);
        assert_eq!(&bytes[12..20], &1.0f64.to_le_bytes());
    }

    #[test]
    fn rejects_corrupt_input() {
        let mut bytes = CubeFunction::delta(3).unwrap().to_binary_bytes();
        assert!(CubeFunction::read_binary(&bytes[..bytes.len() - 1]).is_err());
        bytes.push(0);
        assert!(CubeFunction::read_binary(bytes.as_slice()).is_err());
        bytes.pop();
        bytes[0] = b'X';
        assert!(CubeFunction::read_binary(bytes.as_slice()).is_err());
    }

    #[test]
    fn load_detects_format() {
        let dir = tempfile::tempdir().unwrap();
        let f = CubeFunction::from_fn(4, |x| x as f64 / 3.0).unwrap();
        let bin = dir.path().join("f.cubf");
        std::fs::write(&bin, f.to_binary_bytes()).unwrap();
        let json = dir.path().join("f.json");
        std::fs::write(&json, f.to_json().unwrap()).unwrap();
        assert_eq!(CubeFunction::load(&bin).unwrap(), f);
        assert_eq!(CubeFunction::load(&json).unwrap(), f);
    }

    proptest! {
        #[test]
        fn binary_round_trip_is_bit_exact(n in 1usize..8, seed in any::<u64>()) {
            let f = CubeFunction::from_fn(n, |x| ((x as u64 ^ seed).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11) as f64 * 1e-3).unwrap();
            let back = CubeFunction::read_binary(f.to_binary_bytes().as_slice()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
