//! Per-sample functionals of the state.

use serde::{Deserialize, Serialize};

use crate::integrator::SimState;
use crate::model::{helmholtz_filter, rhs_unchecked};
use crate::norms::{sobolev_moments, weighted_moments};
use crate::spectral::Spectral;

use super::DiagnosticsError;

/// One output sample. `H`, `Hbar`, `Phi` run over `N = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub h: Vec<f64>,
    pub hbar: Vec<f64>,
    pub phi: Vec<f64>,
    pub sup_ubar: f64,
    pub sup_grad_ubar: f64,
    /// `⟨f, ū⟩`.
    pub inj: f64,
    /// `ν(H̄_1 + α²H̄_2)`.
    pub visc: f64,
    /// `d/dt ½(H̄_0 + α²H̄_1)` from the right-hand side.
    pub de_dt: f64,
    /// `-⟨P(a·∇)b, ū⟩`; zero up to roundoff for the modified Leray-α pairing.
    pub nonlinear: f64,
    /// `dH̄_N/dt` from the right-hand side, `N = 0..=n_max`.
    pub dhbar_dt: Vec<f64>,
}

impl DiagnosticsRecord {
    pub fn n_max(&self) -> usize {
        self.h.len() - 1
    }

    /// `dE/dt + visc - inj`, which the exact energy balance sets to zero.
    pub fn energy_residual(&self) -> f64 {
        self.de_dt + self.visc - self.inj
    }

    /// Largest magnitude among the terms of the energy balance.
    pub fn energy_scale(&self) -> f64 {
        self.de_dt.abs().max(self.visc.abs()).max(self.inj.abs())
    }

    /// `Y_N = H̄_N + α²H̄_{N+1}`.
    pub fn y(&self, n: usize, alpha: f64) -> f64 {
        self.hbar[n] + alpha * alpha * self.hbar[n + 1]
    }

    /// `½ dY_N/dt`.
    pub fn half_dy_dt(&self, n: usize, alpha: f64) -> f64 {
        0.5 * (self.dhbar_dt[n] + alpha * alpha * self.dhbar_dt[n + 1])
    }

    /// `E = ½(H̄_0 + α²H̄_1)`.
    pub fn energy(&self, alpha: f64) -> f64 {
        0.5 * self.y(0, alpha)
    }
}

/// Evaluates every per-sample functional; `n_max >= 2`.
pub fn record(spectral: &Spectral, state: &SimState, n_max: usize) -> Result<DiagnosticsRecord, DiagnosticsError> {
    if n_max < 2 {
        return Err(DiagnosticsError::NMaxTooSmall(n_max));
    }
    let grid = *state.grid();
    let alpha = state.params.effective_alpha();
    let a2 = alpha * alpha;
    let u = &state.u;
    let ubar = helmholtz_filter(u, alpha);

    let h = sobolev_moments(u, n_max)?;
    let hbar = weighted_moments(u, n_max, |k2| (1.0 + a2 * k2).powi(-2))?;
    let phi = sobolev_moments(&state.f, n_max)?;
    let sup = spectral.sup_norms(&ubar)?;

    let tendency = rhs_unchecked(spectral, u, &state.params, &state.f)?;
    let total = tendency.total();

    let mut dhbar = vec![0.0; n_max + 1];
    for idx in 0..grid.len() {
        let ub = ubar.at(idx);
        let tv = total.at(idx);
        let mut dot = 0.0;
        for c in 0..3 {
            dot += (ub[c].conj() * tv[c]).re;
        }
        if dot == 0.0 {
            continue;
        }
        let k2 = grid.k2(idx);
        let mut term = 2.0 * dot / (1.0 + a2 * k2);
        for d in dhbar.iter_mut() {
            *d += term;
            term *= k2;
        }
    }
    let vol = grid.volume();
    dhbar.iter_mut().for_each(|d| *d *= vol);

    Ok(DiagnosticsRecord {
        t: state.t,
        inj: state.f.inner(&ubar)?,
        visc: state.params.nu() * (hbar[1] + a2 * hbar[2]),
        de_dt: total.inner(&ubar)?,
        nonlinear: tendency.advection.inner(&ubar)?,
        sup_ubar: sup.value,
        sup_grad_ubar: sup.gradient,
        h,
        hbar,
        phi,
        dhbar_dt: dhbar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralVectorField;
    use crate::grid::TorusGrid;
    use crate::model::{ModelKind, ModelParams};
    use rustfft::num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn zero_state_gives_zero_record() {
        let g = TorusGrid::new(8, 2.0 * PI).unwrap();
        let params = ModelParams::new(ModelKind::MlAlpha, 0.1, 0.3).unwrap();
        let s = SimState::new(0.0, SpectralVectorField::zeros(g), params, SpectralVectorField::zeros(g)).unwrap();
        let r = record(&Spectral::new(g), &s, 4).unwrap();
        assert!(r.h.iter().chain(&r.hbar).chain(&r.phi).chain(&r.dhbar_dt).all(|&x| x == 0.0));
        assert_eq!([r.sup_ubar, r.sup_grad_ubar, r.inj, r.visc, r.de_dt, r.nonlinear], [0.0; 6]);
    }

    #[test]
    fn single_mode_decay_rates() {
        let g = TorusGrid::new(8, 2.0 * PI).unwrap();
        let params = ModelParams::new(ModelKind::MlAlpha, 0.2, 0.5).unwrap();
        let mut u = SpectralVectorField::zeros(g);
        u.set_mode_pair([0, 0, 1], [Complex64::new(0.3, 0.1), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        let s = SimState::new(0.0, u, params, SpectralVectorField::zeros(g)).unwrap();
        let r = record(&Spectral::new(g), &s, 3).unwrap();
        // Single mode with |k| = 1: dH̄_N/dt = -2ν H̄_N, no nonlinear transfer.
        for n in 0..=3 {
            assert!((r.dhbar_dt[n] + 2.0 * 0.2 * r.hbar[n]).abs() <= 1e-14 * r.hbar[n]);
            assert!((r.hbar[n] - r.h[n] / 1.25f64.powi(2)).abs() <= 1e-14 * r.hbar[n]);
        }
        assert!(r.energy_residual().abs() <= 1e-14 * r.energy_scale());
        assert_eq!(r.nonlinear, 0.0);
    }
}
