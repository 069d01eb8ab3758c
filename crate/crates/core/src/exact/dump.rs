//! Opt-in binary dump of state vectors for debugging.
//!
//! Layout, all little-endian:
//!
//! | offset | size | field                          |
//! |--------|------|--------------------------------|
//! | 0      | 4    | magic `GHSV`                   |
//! | 4      | 4    | format version, `u32` = 1      |
//! | 8      | 4    | qubit count `n`, `u32`         |
//! | 12     | 4    | reserved, zero                 |
//! | 16     | 16·2^n | amplitudes as `(re, im)` `f64` pairs, basis order |

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{GhError, Result};

use super::StateVector;

pub const MAGIC: &[u8; 4] = b"GHSV";
pub const VERSION: u32 = 1;

pub fn write_state<W: Write>(state: &StateVector, mut w: W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(state.n_qubits() as u32).to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    for a in state.amplitudes() {
        w.write_all(&a.re.to_le_bytes())?;
        w.write_all(&a.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_state<R: Read>(mut r: R) -> Result<StateVector> {
    let io = |e: std::io::Error| GhError::Parse(format!("state dump: {e}"));
    let mut head = [0u8; 16];
    r.read_exact(&mut head).map_err(io)?;
    if &head[0..4] != MAGIC {
        return Err(GhError::Parse("state dump: bad magic".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(GhError::Parse(format!("state dump: unsupported version {version}")));
    }
    let n = u32::from_le_bytes(head[8..12].try_into().expect("4 bytes")) as usize;
    if n > super::MAX_STATE_QUBITS {
        return Err(GhError::StateTooLarge {
            n,
            limit: super::MAX_STATE_QUBITS,
        });
    }
    let mut buf = vec![0u8; 16 << n];
    r.read_exact(&mut buf).map_err(io)?;
    let amps = buf
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..16].try_into().expect("8 bytes")),
            )
        })
        .collect();
    StateVector::from_amplitudes(n, amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = StateVector::from_amplitudes(
            2,
            vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.0, -0.5),
                Complex64::new(-0.5, 0.0),
                Complex64::new(0.25, 0.25),
            ],
        )
        .unwrap();
        let mut bytes = Vec::new();
        write_state(&s, &mut bytes).unwrap();
        assert_eq!(bytes.len(), 16 + 4 * 16);
        assert_eq!(read_state(bytes.as_slice()).unwrap(), s);
        bytes[0] = b'X';
        assert!(read_state(bytes.as_slice()).is_err());
    }
}
