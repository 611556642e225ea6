//! Initial velocity fields.

use serde::{Deserialize, Serialize};

use crate::field::{PhysicalVectorField, SpectralVectorField};
use crate::grid::TorusGrid;
use crate::spectral::{project_solenoidal, Spectral};

/// Random stream reserved for random initial data.
pub const INIT_STREAM: u64 = 1;

/// Radius (in lattice units) of the random initial spectrum. Fixed so the
/// same seed gives the same field on every grid with `dealias_cut >= 4`.
pub const RANDOM_RADIUS: i64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    TaylorGreen,
    Random,
    Rest,
}

impl InitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InitKind::TaylorGreen => "taylor-green",
            InitKind::Random => "random",
            InitKind::Rest => "rest",
        }
    }
}

/// `A (sin x cos y cos z, -cos x sin y cos z, 0)` in units of `k0 x`.
pub fn taylor_green(spectral: &Spectral, amplitude: f64) -> SpectralVectorField {
    let grid = *spectral.grid();
    let k0 = grid.k0();
    let phys = PhysicalVectorField::from_fn(grid, |x| {
        let (sx, cx) = (k0 * x[0]).sin_cos();
        let (sy, cy) = (k0 * x[1]).sin_cos();
        let cz = (k0 * x[2]).cos();
        [amplitude * sx * cy * cz, -amplitude * cx * sy * cz, 0.0]
    });
    let mut u = spectral.to_spectral(&phys).expect("same grid");
    // Drop the roundoff dust left by the transform on unforced modes.
    let keep = |m: [i64; 3]| m.iter().all(|c| c.abs() == 1);
    u.map_modes(|idx, v| if keep(grid.lattice(idx)) { v } else { Default::default() });
    u.canonicalize_hermitian();
    u
}

/// Random smooth solenoidal field with `L^{-3/2}‖u‖ = amplitude`.
pub fn random_solenoidal(grid: TorusGrid, amplitude: f64, seed: u64) -> SpectralVectorField {
    let radius = RANDOM_RADIUS.min(grid.dealias_cut() as i64);
    let u = project_solenoidal(&SpectralVectorField::random_smooth(grid, radius, seed, INIT_STREAM));
    let rms = u.coeff_sum_sq().sqrt();
    if rms == 0.0 {
        return u;
    }
    u.scaled(amplitude / rms)
}

pub fn initial_field(spectral: &Spectral, kind: InitKind, amplitude: f64, seed: u64) -> SpectralVectorField {
    match kind {
        InitKind::TaylorGreen => taylor_green(spectral, amplitude),
        InitKind::Random => random_solenoidal(*spectral.grid(), amplitude, seed),
        InitKind::Rest => SpectralVectorField::zeros(*spectral.grid()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::sobolev_moments;

    #[test]
    fn taylor_green_energy_and_support() {
        let g = TorusGrid::new(16, 2.0).unwrap();
        let sp = Spectral::new(g);
        let u = taylor_green(&sp, 1.5);
        // Mean of sin²cos²cos² is 1/8, two components.
        let h = sobolev_moments(&u, 1).unwrap();
        assert!((h[0] - 1.5 * 1.5 / 4.0 * g.volume()).abs() <= 1e-12 * h[0]);
        assert!((h[1] - 3.0 * g.k0().powi(2) * h[0]).abs() <= 1e-12 * h[1]);
        assert!(u.divergence_ratio() <= 1e-14);
        assert_eq!(u.hermitian_defect(), 0.0);
    }

    #[test]
    fn random_field_is_normalized_and_solenoidal() {
        let g = TorusGrid::new(16, 2.0).unwrap();
        let u = random_solenoidal(g, 0.3, 5);
        assert!((u.coeff_sum_sq().sqrt() - 0.3).abs() <= 1e-14);
        assert!(u.divergence_ratio() <= 1e-13);
        assert_eq!(u.hermitian_defect(), 0.0);
        let fine = random_solenoidal(TorusGrid::new(32, 2.0).unwrap(), 0.3, 5);
        for idx in 0..g.len() {
            let m = g.lattice(idx);
            for (a, b) in u.mode(m).iter().zip(fine.mode(m)) {
                assert!((a - b).norm() <= 1e-16);
            }
        }
    }
}
