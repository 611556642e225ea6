//! Binary checkpoints.
//!
//! Layout, all little-endian:
//!
//! | field   | type   |
//! |---------|--------|
//! | magic   | `b"MLAF"` |
//! | version | u32    |
//! | n       | u32    |
//! | L, nu, alpha | f64 ×3 |
//! | kind    | u32 (0 ml-alpha, 1 leray-alpha, 2 nse) |
//! | t       | f64    |
//! | seed    | u64    |
//! | dt      | f64    |
//! | step    | u64    |
//!
//! followed by the three velocity components, each as the half lattice
//! `l = 0..=n/2` in `(i, j, l)` order with `(re, im)` pairs. The other half
//! is rebuilt from Hermitian symmetry, which the integrator enforces
//! exactly, so `load(save(x))` is bit-identical.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;
use thiserror::Error;

use crate::field::SpectralVectorField;
use crate::grid::TorusGrid;
use crate::model::ModelKind;

pub const MAGIC: &[u8; 4] = b"MLAF";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("checkpoint format version {found} is not supported (expected {VERSION})")]
    Version { found: u32 },
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
    #[error("checkpoint does not match the run: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub kind: ModelKind,
    pub nu: f64,
    pub alpha: f64,
    pub t: f64,
    pub seed: u64,
    pub dt: f64,
    pub step: u64,
    pub u: SpectralVectorField,
}

impl Checkpoint {
    pub fn grid(&self) -> &TorusGrid {
        self.u.grid()
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<(), CheckpointError> {
        let g = self.grid();
        let n = g.n();
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(n as u32).to_le_bytes())?;
        for x in [g.length(), self.nu, self.alpha] {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(&self.kind.code().to_le_bytes())?;
        w.write_all(&self.t.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.dt.to_le_bytes())?;
        w.write_all(&self.step.to_le_bytes())?;
        for c in 0..3 {
            let comp = self.u.component(c);
            for i in 0..n {
                for j in 0..n {
                    for l in 0..=n / 2 {
                        let z = comp[g.flat(i, j, l)];
                        w.write_all(&z.re.to_le_bytes())?;
                        w.write_all(&z.im.to_le_bytes())?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, CheckpointError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let version = read_u32(r)?;
        if version != VERSION {
            return Err(CheckpointError::Version { found: version });
        }
        let n = read_u32(r)? as usize;
        let length = read_f64(r)?;
        let nu = read_f64(r)?;
        let alpha = read_f64(r)?;
        let code = read_u32(r)?;
        let kind = ModelKind::from_code(code).ok_or_else(|| CheckpointError::Corrupt(format!("model kind code {code}")))?;
        let t = read_f64(r)?;
        let seed = read_u64(r)?;
        let dt = read_f64(r)?;
        let step = read_u64(r)?;
        let grid = TorusGrid::new(n, length).map_err(|e| CheckpointError::Corrupt(e.to_string()))?;
        let mut u = SpectralVectorField::zeros(grid);
        for c in 0..3 {
            let comp = u.component_mut(c);
            for i in 0..n {
                for j in 0..n {
                    for l in 0..=n / 2 {
                        let re = read_f64(r)?;
                        let im = read_f64(r)?;
                        comp[grid.flat(i, j, l)] = Complex64::new(re, im);
                    }
                }
            }
            for idx in 0..grid.len() {
                let (_, _, l) = grid.split(idx);
                if l > n / 2 {
                    comp[idx] = comp[grid.conjugate_index(idx)].conj();
                }
            }
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(CheckpointError::Corrupt("trailing bytes".into()));
        }
        Ok(Self {
            kind,
            nu,
            alpha,
            t,
            seed,
            dt,
            step,
            u,
        })
    }

    /// Writes to a temporary sibling, then renames over `path`.
    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            self.write_to(&mut w)?;
            w.flush()?;
            w.get_ref().sync_all()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        let mut r = BufReader::new(File::open(path)?);
        Self::read_from(&mut r)
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32, CheckpointError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64, CheckpointError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64, CheckpointError> {
    Ok(f64::from_bits(read_u64(r)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::project_solenoidal;

    fn sample() -> Checkpoint {
        let g = TorusGrid::new(8, 2.0).unwrap();
        let mut u = project_solenoidal(&SpectralVectorField::random_smooth(g, 2, 4, 0));
        u.canonicalize_hermitian();
        Checkpoint {
            kind: ModelKind::LerayAlpha,
            nu: 0.01,
            alpha: 0.2,
            t: 1.25,
            seed: 99,
            dt: 0.005,
            step: 250,
            u,
        }
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let c = sample();
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let back = Checkpoint::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, c);
        for comp in 0..3 {
            for (a, b) in back.u.component(comp).iter().zip(c.u.component(comp)) {
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn version_and_magic_are_checked() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        let mut bad = buf.clone();
        bad[4..8].copy_from_slice(&7u32.to_le_bytes());
        assert!(matches!(
            Checkpoint::read_from(&mut bad.as_slice()),
            Err(CheckpointError::Version { found: 7 })
        ));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(Checkpoint::read_from(&mut bad.as_slice()), Err(CheckpointError::BadMagic)));
        buf.truncate(buf.len() - 3);
        assert!(Checkpoint::read_from(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn save_and_load_through_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.bin");
        let c = sample();
        c.save(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap(), c);
        assert!(!path.with_extension("tmp").exists());
    }
}
