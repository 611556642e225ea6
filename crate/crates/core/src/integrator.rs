//! Integrating-factor Runge–Kutta time stepping.
//!
//! Writing `u = exp(νΔt) v` removes the stiff viscous term; the remaining
//! equation for `v` is advanced with the three-stage, third-order
//! Shu–Osher scheme. Mapped back to `u`, one step reads
//!
//! ```text
//! v1 = u0 + dt N(u0),                      u1 = E(dt) v1
//! u2 = E(dt/2) (3/4 u0 + 1/4 v1) + 1/4 dt E(-dt/2) N(u1)
//! u3 = 1/3 E(dt) u0 + 2/3 E(dt/2) (u2 + dt N(u2))
//! ```
//!
//! with `E(h) = exp(-ν|k|² h)` per mode and `N` the advective plus forcing
//! tendency. A linear mode therefore decays by exactly `E(dt)`.

use thiserror::Error;

use crate::field::{check_same_grid, FieldError, SpectralVectorField};
use crate::grid::TorusGrid;
use crate::model::{check_forcing, helmholtz_filter, nonlinear_term, ModelError, ModelParams};
use crate::spectral::Spectral;

/// Courant number in [`Stepper::cfl_dt`].
pub const CFL_NUMBER: f64 = 0.4;

/// Fraction of the initial CFL step used for a whole run.
pub const CFL_SAFETY: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("time step {dt:e} violates the CFL limit; admissible dt <= {admissible:e}")]
    Cfl { dt: f64, admissible: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Time, velocity, parameters and (time-independent) forcing.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub u: SpectralVectorField,
    pub params: ModelParams,
    pub f: SpectralVectorField,
}

impl SimState {
    /// Validates the forcing and grids; `u` is projected and made exactly Hermitian.
    pub fn new(
        t: f64,
        u: SpectralVectorField,
        params: ModelParams,
        f: SpectralVectorField,
    ) -> Result<Self, StepError> {
        check_same_grid(u.grid(), f.grid())?;
        check_forcing(&f)?;
        let mut u = crate::spectral::project_solenoidal(&u);
        u.truncate_to_mask();
        u.canonicalize_hermitian();
        Ok(Self { t, u, params, f })
    }

    pub fn grid(&self) -> &TorusGrid {
        self.u.grid()
    }

    pub fn ubar(&self) -> SpectralVectorField {
        helmholtz_filter(&self.u, self.params.effective_alpha())
    }
}

/// IF-RK3 stepper bound to one grid.
#[derive(Debug, Clone)]
pub struct Stepper {
    spectral: Spectral,
    with_advection: bool,
}

impl Stepper {
    pub fn new(spectral: Spectral) -> Self {
        Self {
            spectral,
            with_advection: true,
        }
    }

    /// Drops the advective term: only viscosity and forcing remain.
    #[doc(hidden)]
    pub fn linear_only(mut self) -> Self {
        self.with_advection = false;
        self
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    /// `CFL_NUMBER · Δx / max(‖u‖_∞, 1e-12 ν/L)`.
    pub fn cfl_dt(&self, state: &SimState) -> Result<f64, FieldError> {
        let grid = state.grid();
        let sup = self.spectral.sup_value(&state.u)?;
        let floor = 1e-12 * state.params.nu() / grid.length();
        Ok(CFL_NUMBER * grid.spacing() / sup.max(floor))
    }

    /// One checked step: `dt` must be positive and within the CFL limit.
    pub fn step(&self, state: &mut SimState, dt: f64) -> Result<(), StepError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(StepError::BadStep(dt));
        }
        let admissible = self.cfl_dt(state)?;
        if dt > admissible {
            return Err(StepError::Cfl { dt, admissible });
        }
        self.advance(state, dt)?;
        Ok(())
    }

    /// One step without CFL checks. Negative `dt` integrates backwards,
    /// which is only sensible for very short intervals.
    pub fn advance(&self, state: &mut SimState, dt: f64) -> Result<(), FieldError> {
        let grid = *state.grid();
        let nu = state.params.nu();
        let full: Vec<f64> = (0..grid.len()).map(|i| (-nu * grid.k2(i) * dt).exp()).collect();
        let half: Vec<f64> = (0..grid.len()).map(|i| (-nu * grid.k2(i) * 0.5 * dt).exp()).collect();

        let u0 = &state.u;
        let n0 = self.explicit(state, u0)?;
        let mut v1 = u0.clone();
        v1.axpy(dt, &n0)?;
        let mut u1 = v1.clone();
        u1.scale_modes(|i| full[i]);

        let n1 = self.explicit(state, &u1)?;
        let mut u2 = u0.scaled(0.75);
        u2.axpy(0.25, &v1)?;
        u2.scale_modes(|i| half[i]);
        let mut growth = n1;
        growth.scale_modes(|i| 0.25 * dt / half[i]);
        u2.axpy(1.0, &growth)?;

        let n2 = self.explicit(state, &u2)?;
        let mut w = u2;
        w.axpy(dt, &n2)?;
        w.scale_modes(|i| 2.0 / 3.0 * half[i]);
        let mut u3 = u0.clone();
        u3.scale_modes(|i| full[i] / 3.0);
        u3.axpy(1.0, &w)?;

        let mut u3 = self.spectral.project(&u3);
        u3.zero_mean();
        u3.canonicalize_hermitian();
        state.u = u3;
        state.t += dt;
        Ok(())
    }

    /// `-P[(a·∇)b] + f`.
    fn explicit(&self, state: &SimState, u: &SpectralVectorField) -> Result<SpectralVectorField, FieldError> {
        if !self.with_advection {
            return Ok(state.f.clone());
        }
        let ubar = helmholtz_filter(u, state.params.effective_alpha());
        let mut t = nonlinear_term(&self.spectral, state.params.kind(), u, &ubar)?;
        t = t.scaled(-1.0);
        t.axpy(1.0, &state.f)?;
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKind;
    use crate::spectral::project_solenoidal;
    use rustfft::num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn linear_mode_decays_exactly() {
        let g = grid(8);
        let stepper = Stepper::new(Spectral::new(g)).linear_only();
        let mut u = SpectralVectorField::zeros(g);
        let v = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.7, 0.2)];
        u.set_mode_pair([1, 1, 0], v);
        let params = ModelParams::new(ModelKind::MlAlpha, 0.3, 0.1).unwrap();
        let mut s = SimState::new(0.0, u, params, SpectralVectorField::zeros(g)).unwrap();
        let dt = 0.05;
        stepper.advance(&mut s, dt).unwrap();
        let expect = v[2] * (-0.3 * 2.0 * dt).exp();
        assert!((s.u.mode([1, 1, 0])[2] - expect).norm() <= 1e-14);
    }

    #[test]
    fn rest_without_forcing_is_a_fixed_point() {
        let g = grid(8);
        let stepper = Stepper::new(Spectral::new(g));
        let params = ModelParams::new(ModelKind::MlAlpha, 1e-300, 0.1).unwrap();
        let mut s = SimState::new(0.0, SpectralVectorField::zeros(g), params, SpectralVectorField::zeros(g)).unwrap();
        stepper.step(&mut s, 0.1).unwrap();
        assert_eq!(s.u, SpectralVectorField::zeros(g));
    }

    #[test]
    fn cfl_formula() {
        let params = ModelParams::new(ModelKind::MlAlpha, 0.1, 0.1).unwrap();
        let zero = |n| {
            let g = grid(n);
            SimState::new(0.0, SpectralVectorField::zeros(g), params, SpectralVectorField::zeros(g)).unwrap()
        };
        let s = zero(32);
        let stepper = Stepper::new(Spectral::new(*s.grid()));
        let dt0 = stepper.cfl_dt(&s).unwrap();
        assert!(dt0.is_finite() && dt0 > 1e9);

        // Unit-amplitude shear has ‖u‖_∞ = 1 at a collocation point.
        let mut shear = zero(32);
        shear.u.set_mode_pair([0, 0, 1], [Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        let dt = stepper.cfl_dt(&shear).unwrap();
        assert!((dt - 0.4 * (2.0 * PI / 32.0)).abs() < 1e-15);

        let mut fine = zero(64);
        fine.u.set_mode_pair([0, 0, 1], [Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        let dt_fine = Stepper::new(Spectral::new(*fine.grid())).cfl_dt(&fine).unwrap();
        assert!((dt_fine - dt / 2.0).abs() < 1e-15);

        assert!(matches!(
            stepper.step(&mut shear, dt * 1.01),
            Err(StepError::Cfl { .. })
        ));
        assert!(matches!(stepper.step(&mut shear, -1.0), Err(StepError::BadStep(_))));
    }

    #[test]
    fn step_keeps_the_state_solenoidal_and_hermitian() {
        let g = grid(16);
        let stepper = Stepper::new(Spectral::new(g));
        let u = project_solenoidal(&SpectralVectorField::random_smooth(g, 4, 2, 0));
        let params = ModelParams::new(ModelKind::MlAlpha, 0.05, 0.2).unwrap();
        let mut s = SimState::new(0.0, u, params, SpectralVectorField::zeros(g)).unwrap();
        for _ in 0..20 {
            stepper.advance(&mut s, 0.01).unwrap();
        }
        assert!(s.u.divergence_ratio() <= 1e-13);
        assert_eq!(s.u.hermitian_defect(), 0.0);
        assert!((s.t - 0.2).abs() < 1e-14);
    }
}
