//! Time-independent body force supported on one exact lattice shell.
//!
//! Every forced mode has `|m|² = shell_m²`, so `|k| = k0·shell_m` on the whole
//! support and `‖∇ⁿf‖ = ℓ⁻ⁿ‖f‖` holds exactly with `ℓ = 1/(k0·shell_m)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{is_positive_representative, SpectralVectorField};
use crate::grid::TorusGrid;

/// Random stream reserved for forcing phases.
pub const FORCING_STREAM: u64 = 0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForcingError {
    #[error("forcing.shell_m = {shell_m} is outside [2, {max}] (dealias cut minus one)")]
    ShellOutOfRange { shell_m: i64, max: i64 },
    #[error("forcing.amplitude must be non-negative and finite, got {0}")]
    BadAmplitude(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingSpec {
    pub shell_m: i64,
    /// Target `f_rms = L^{-3/2}‖f‖`.
    pub amplitude: f64,
    pub seed: u64,
}

impl ForcingSpec {
    pub fn validate(&self, grid: &TorusGrid) -> Result<(), ForcingError> {
        let max = grid.dealias_cut() as i64 - 1;
        if self.shell_m < 2 || self.shell_m > max {
            return Err(ForcingError::ShellOutOfRange {
                shell_m: self.shell_m,
                max,
            });
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(ForcingError::BadAmplitude(self.amplitude));
        }
        Ok(())
    }

    /// `ℓ = 1/(k0·shell_m)`.
    pub fn length_scale(&self, grid: &TorusGrid) -> f64 {
        1.0 / (grid.k0() * self.shell_m as f64)
    }
}

/// Lattice points with `|m|² = s²`, one per `±m` pair, in a fixed order.
pub fn shell_modes(s: i64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for a in -s..=s {
        for b in -s..=s {
            for c in -s..=s {
                let m = [a, b, c];
                if a * a + b * b + c * c == s * s && is_positive_representative(m) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Builds the force. Mode order and random draws do not depend on `n`, so a
/// given spec yields the same continuum field on every admissible grid.
pub fn narrowband_force(grid: &TorusGrid, spec: &ForcingSpec) -> Result<SpectralVectorField, ForcingError> {
    spec.validate(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(FORCING_STREAM);
    let mut out = SpectralVectorField::zeros(*grid);
    let mut total = 0.0;
    for m in shell_modes(spec.shell_m) {
        let k = m.map(|c| c as f64);
        let kk = k.iter().map(|c| c * c).sum::<f64>();
        let v = loop {
            let mut v = [Complex64::new(0.0, 0.0); 3];
            for z in v.iter_mut() {
                *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            let kv = v[0] * k[0] + v[1] * k[1] + v[2] * k[2];
            for (z, kc) in v.iter_mut().zip(k) {
                *z -= kv * (kc / kk);
            }
            if v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6 {
                break v;
            }
        };
        total += 2.0 * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        out.set_mode_pair(m, v);
    }
    let scale = spec.amplitude / total.sqrt();
    Ok(out.scaled(scale))
}

/// `f_rms = L^{-3/2}‖f‖`.
pub fn f_rms(f: &SpectralVectorField) -> f64 {
    f.coeff_sum_sq().sqrt()
}

/// `Gr = ℓ³ f_rms / ν²`.
pub fn grashof(f: &SpectralVectorField, ell: f64, nu: f64) -> f64 {
    ell.powi(3) * f_rms(f) / (nu * nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::sobolev_moments;
    use std::f64::consts::PI;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(n, 2.0 * PI).unwrap()
    }

    fn spec() -> ForcingSpec {
        ForcingSpec { shell_m: 3, amplitude: 0.7, seed: 11 }
    }

    #[test]
    fn shell_identity_is_exact() {
        let g = TorusGrid::new(32, 3.0).unwrap();
        let f = narrowband_force(&g, &spec()).unwrap();
        let ell = spec().length_scale(&g);
        let phi = sobolev_moments(&f, 6).unwrap();
        for (n, p) in phi.iter().enumerate() {
            let expect = ell.powi(-2 * n as i32) * phi[0];
            assert!((p - expect).abs() <= 1e-12 * expect);
        }
    }

    #[test]
    fn force_is_solenoidal_real_and_normalized() {
        let g = grid(16);
        let f = narrowband_force(&g, &spec()).unwrap();
        assert!(f.divergence_ratio() <= 1e-13);
        assert_eq!(f.hermitian_defect(), 0.0);
        assert_eq!(f.at(0), [Complex64::new(0.0, 0.0); 3]);
        assert!((f_rms(&f) - 0.7).abs() <= 1e-14);
        for idx in 0..g.len() {
            if f.at(idx).iter().any(|z| z.norm() > 0.0) {
                assert_eq!(g.lattice_norm2(idx), 9);
            }
        }
    }

    #[test]
    fn seeded_and_grid_independent() {
        let a = narrowband_force(&grid(16), &spec()).unwrap();
        let b = narrowband_force(&grid(16), &spec()).unwrap();
        assert_eq!(a, b);
        let c = narrowband_force(&grid(32), &spec()).unwrap();
        for m in shell_modes(3) {
            assert_eq!(a.mode(m), c.mode(m));
        }
        let d = narrowband_force(&grid(16), &ForcingSpec { seed: 12, ..spec() }).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn shell_bounds() {
        let g = grid(16); // cut 5
        assert!(narrowband_force(&g, &ForcingSpec { shell_m: 4, ..spec() }).is_ok());
        assert_eq!(
            narrowband_force(&g, &ForcingSpec { shell_m: 5, ..spec() }),
            Err(ForcingError::ShellOutOfRange { shell_m: 5, max: 4 })
        );
        assert!(narrowband_force(&g, &ForcingSpec { shell_m: 1, ..spec() }).is_err());
        assert!(narrowband_force(&g, &ForcingSpec { amplitude: -1.0, ..spec() }).is_err());
    }

    #[test]
    fn grashof_formula() {
        let g = grid(16);
        let f = narrowband_force(&g, &spec()).unwrap();
        let ell = spec().length_scale(&g);
        let gr = grashof(&f, ell, 0.1);
        assert!((gr - ell.powi(3) * 0.7 / 0.01).abs() <= 1e-12 * gr);
        assert!((grashof(&f, ell, 0.2) - gr / 4.0).abs() <= 1e-12 * gr);
    }

    #[test]
    fn zero_amplitude_gives_zero_force() {
        let f = narrowband_force(&grid(16), &ForcingSpec { amplitude: 0.0, ..spec() }).unwrap();
        assert_eq!(f, SpectralVectorField::zeros(grid(16)));
    }
}
