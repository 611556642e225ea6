//! The Helmholtz filter and right-hand-side assembly for the modified
//! Leray-α, Leray-α and Navier–Stokes systems.
//!
//! All three share `∂_t u + P[(a·∇)b] = νΔu + f` with `ū = (1 - α²Δ)^{-1} u`:
//!
//! | kind          | a   | b   |
//! |---------------|-----|-----|
//! | `MlAlpha`     | `u` | `ū` |
//! | `LerayAlpha`  | `ū` | `u` |
//! | `Nse`         | `u` | `u` |
//!
//! The pressure never appears: `P` removes `∇p`, and the filter pressure is
//! constant for solenoidal input.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, SpectralVectorField};
use crate::spectral::Spectral;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("model.nu must be positive and finite, got {0}")]
    BadViscosity(f64),
    #[error("model.alpha must be non-negative and finite, got {0}")]
    BadAlpha(f64),
    #[error("unknown model kind {0:?} (expected ml-alpha, leray-alpha or nse)")]
    UnknownKind(String),
    #[error("forcing is not solenoidal (divergence ratio {0:e})")]
    ForcingNotSolenoidal(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Relative divergence above which a forcing field is rejected.
pub const SOLENOIDAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    MlAlpha,
    LerayAlpha,
    Nse,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::MlAlpha => "ml-alpha",
            ModelKind::LerayAlpha => "leray-alpha",
            ModelKind::Nse => "nse",
        }
    }

    pub(crate) fn code(&self) -> u32 {
        match self {
            ModelKind::MlAlpha => 0,
            ModelKind::LerayAlpha => 1,
            ModelKind::Nse => 2,
        }
    }

    pub(crate) fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(ModelKind::MlAlpha),
            1 => Some(ModelKind::LerayAlpha),
            2 => Some(ModelKind::Nse),
            _ => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ml-alpha" => Ok(ModelKind::MlAlpha),
            "leray-alpha" => Ok(ModelKind::LerayAlpha),
            "nse" => Ok(ModelKind::Nse),
            other => Err(ModelError::UnknownKind(other.to_string())),
        }
    }
}

/// Viscosity, filter width and model variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    nu: f64,
    alpha: f64,
    kind: ModelKind,
}

impl ModelParams {
    pub fn new(kind: ModelKind, nu: f64, alpha: f64) -> Result<Self, ModelError> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(ModelError::BadViscosity(nu));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(ModelError::BadAlpha(alpha));
        }
        Ok(Self { nu, alpha, kind })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Filter width as configured.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Filter width actually applied: zero for `Nse`.
    pub fn effective_alpha(&self) -> f64 {
        match self.kind {
            ModelKind::Nse => 0.0,
            _ => self.alpha,
        }
    }
}

/// `ū(k) = û(k) / (1 + α²|k|²)`.
pub fn helmholtz_filter(u: &SpectralVectorField, alpha: f64) -> SpectralVectorField {
    if alpha == 0.0 {
        return u.clone();
    }
    let grid = *u.grid();
    let a2 = alpha * alpha;
    let mut out = u.clone();
    out.scale_modes(|idx| 1.0 / (1.0 + a2 * grid.k2(idx)));
    out
}

/// `u = ū - α²Δū`, the inverse of [`helmholtz_filter`].
pub fn unfilter(ubar: &SpectralVectorField, alpha: f64) -> SpectralVectorField {
    if alpha == 0.0 {
        return ubar.clone();
    }
    let grid = *ubar.grid();
    let a2 = alpha * alpha;
    let mut out = ubar.clone();
    out.scale_modes(|idx| 1.0 + a2 * grid.k2(idx));
    out
}

/// `P[(a·∇)b]` for the pair `(a, b)` selected by `kind`; dealiased, zero mean.
pub fn nonlinear_term(
    spectral: &Spectral,
    kind: ModelKind,
    u: &SpectralVectorField,
    ubar: &SpectralVectorField,
) -> Result<SpectralVectorField, FieldError> {
    match kind {
        ModelKind::MlAlpha => spectral.advect(u, ubar),
        ModelKind::LerayAlpha => spectral.advect(ubar, u),
        ModelKind::Nse => spectral.advect(u, u),
    }
}

/// `νΔu`.
pub fn viscous_term(u: &SpectralVectorField, nu: f64) -> SpectralVectorField {
    let grid = *u.grid();
    let mut out = u.clone();
    out.scale_modes(|idx| -nu * grid.k2(idx));
    out
}

/// The three parts of `∂_t u`, kept apart so integrators can treat the
/// viscous part exactly.
#[derive(Debug, Clone)]
pub struct Tendency {
    /// `-P[(a·∇)b]`.
    pub advection: SpectralVectorField,
    /// `νΔu`.
    pub viscous: SpectralVectorField,
    pub forcing: SpectralVectorField,
}

impl Tendency {
    /// Everything except the viscous part.
    pub fn explicit(&self) -> SpectralVectorField {
        let mut t = self.advection.clone();
        t.axpy(1.0, &self.forcing).expect("tendency parts share a grid");
        t
    }

    pub fn total(&self) -> SpectralVectorField {
        let mut t = self.explicit();
        t.axpy(1.0, &self.viscous).expect("tendency parts share a grid");
        t
    }
}

/// Rejects forcing that is not divergence-free.
pub fn check_forcing(f: &SpectralVectorField) -> Result<(), ModelError> {
    let d = f.divergence_ratio();
    if d > SOLENOIDAL_TOL {
        Err(ModelError::ForcingNotSolenoidal(d))
    } else {
        Ok(())
    }
}

/// `∂_t u = -P[(a·∇)b] + νΔu + f`.
pub fn rhs(
    spectral: &Spectral,
    u: &SpectralVectorField,
    params: &ModelParams,
    f: &SpectralVectorField,
) -> Result<Tendency, ModelError> {
    check_forcing(f)?;
    Ok(rhs_unchecked(spectral, u, params, f)?)
}

pub(crate) fn rhs_unchecked(
    spectral: &Spectral,
    u: &SpectralVectorField,
    params: &ModelParams,
    f: &SpectralVectorField,
) -> Result<Tendency, FieldError> {
    let ubar = helmholtz_filter(u, params.effective_alpha());
    let advection = nonlinear_term(spectral, params.kind(), u, &ubar)?.scaled(-1.0);
    Ok(Tendency {
        advection,
        viscous: viscous_term(u, params.nu()),
        forcing: f.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::norms::{sobolev_moments, weighted_moments};
    use crate::spectral::project_solenoidal;
    use rustfft::num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(n, 2.0 * PI).unwrap()
    }

    fn random(g: TorusGrid, seed: u64) -> SpectralVectorField {
        project_solenoidal(&SpectralVectorField::random_smooth(g, g.dealias_cut() as i64, seed, 0))
    }

    #[test]
    fn params_validate() {
        assert_eq!(ModelParams::new(ModelKind::MlAlpha, -1.0, 0.1), Err(ModelError::BadViscosity(-1.0)));
        assert_eq!(ModelParams::new(ModelKind::MlAlpha, 1.0, -0.1), Err(ModelError::BadAlpha(-0.1)));
        let p = ModelParams::new(ModelKind::Nse, 1.0, 0.3).unwrap();
        assert_eq!(p.effective_alpha(), 0.0);
        assert_eq!("leray-alpha".parse::<ModelKind>().unwrap(), ModelKind::LerayAlpha);
        assert!("bardina".parse::<ModelKind>().is_err());
    }

    #[test]
    fn filter_halves_the_fundamental_at_alpha_one_over_k0() {
        let g = TorusGrid::new(8, 5.0).unwrap();
        let mut u = SpectralVectorField::zeros(g);
        let v = [Complex64::new(0.0, 0.0), Complex64::new(1.5, -0.5), Complex64::new(0.0, 0.0)];
        u.set_mode_pair([1, 0, 0], v);
        let alpha = 1.0 / g.k0();
        let ubar = helmholtz_filter(&u, alpha);
        let got = ubar.mode([1, 0, 0])[1];
        assert!((got - v[1] * 0.5).norm() <= 1e-12 * v[1].norm());
        let back = unfilter(&ubar, alpha);
        assert!((back.mode([1, 0, 0])[1] - v[1]).norm() <= 1e-12);
        let doubled = unfilter(&u, alpha);
        assert!((doubled.mode([1, 0, 0])[1] - v[1] * 2.0).norm() <= 1e-12);
    }

    #[test]
    fn zero_alpha_filter_is_identity() {
        let u = random(grid(8), 4);
        assert_eq!(helmholtz_filter(&u, 0.0), u);
        assert_eq!(unfilter(&u, 0.0), u);
        assert_eq!(unfilter(&SpectralVectorField::zeros(grid(8)), 0.3), SpectralVectorField::zeros(grid(8)));
    }

    #[test]
    fn filter_round_trip() {
        let u = random(grid(16), 5);
        let back = unfilter(&helmholtz_filter(&u, 0.37), 0.37);
        assert!(back.sub(&u).unwrap().max_abs() <= 1e-13 * u.max_abs());
    }

    #[test]
    fn filtered_moments_agree_across_routes() {
        let g = grid(16);
        let u = random(g, 6);
        let alpha = 0.21;
        let direct = sobolev_moments(&helmholtz_filter(&u, alpha), 6).unwrap();
        let a2 = alpha * alpha;
        let weighted = weighted_moments(&u, 6, |k2| 1.0 / ((1.0 + a2 * k2) * (1.0 + a2 * k2))).unwrap();
        for (d, w) in direct.iter().zip(&weighted) {
            assert!((d - w).abs() <= 1e-12 * d, "{d} vs {w}");
        }
    }

    #[test]
    fn poincare_sandwich_holds() {
        // α²‖ū‖_{H²} ≤ ‖u‖ ≤ (L²/4π² + α²)‖ū‖_{H²}, with ‖ū‖_{H²} = ‖Δū‖.
        for seed in 0..5 {
            let g = TorusGrid::new(16, 3.0).unwrap();
            let u = random(g, seed);
            for alpha in [0.05, 0.3, 2.0] {
                let ubar = helmholtz_filter(&u, alpha);
                let h2 = sobolev_moments(&ubar, 2).unwrap()[2].sqrt();
                let l2 = u.norm();
                let len = g.length();
                assert!(alpha * alpha * h2 <= l2 * (1.0 + 1e-12));
                assert!(l2 <= (len * len / (4.0 * PI * PI) + alpha * alpha) * h2 * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn nse_matches_ml_alpha_at_zero_alpha() {
        let g = grid(8);
        let sp = Spectral::new(g);
        let u = random(g, 1);
        let ml = ModelParams::new(ModelKind::MlAlpha, 0.1, 0.0).unwrap();
        let ns = ModelParams::new(ModelKind::Nse, 0.1, 0.5).unwrap();
        let f = SpectralVectorField::zeros(g);
        let a = rhs(&sp, &u, &ml, &f).unwrap().total();
        let b = rhs(&sp, &u, &ns, &f).unwrap().total();
        assert_eq!(a, b);
    }

    #[test]
    fn rhs_of_rest_is_the_forcing() {
        let g = grid(8);
        let sp = Spectral::new(g);
        let f = random(g, 3);
        let p = ModelParams::new(ModelKind::MlAlpha, 0.1, 0.2).unwrap();
        let t = rhs(&sp, &SpectralVectorField::zeros(g), &p, &f).unwrap().total();
        assert_eq!(t, f);
    }

    #[test]
    fn non_solenoidal_forcing_is_rejected() {
        let g = grid(8);
        let sp = Spectral::new(g);
        let f = SpectralVectorField::random_smooth(g, 2, 1, 0);
        let p = ModelParams::new(ModelKind::MlAlpha, 0.1, 0.2).unwrap();
        assert!(matches!(
            rhs(&sp, &SpectralVectorField::zeros(g), &p, &f),
            Err(ModelError::ForcingNotSolenoidal(_))
        ));
    }

    #[test]
    fn advection_is_skew_against_the_filtered_field() {
        let g = grid(16);
        let sp = Spectral::new(g);
        for seed in 0..3 {
            let u = random(g, seed);
            let ubar = helmholtz_filter(&u, 0.3);
            let n = nonlinear_term(&sp, ModelKind::MlAlpha, &u, &ubar).unwrap();
            let grad = sobolev_moments(&ubar, 1).unwrap()[1].sqrt();
            let scale = u.norm() * grad * ubar.norm() / g.volume().sqrt();
            let r = n.inner(&ubar).unwrap().abs();
            assert!(r <= 1e-11 * scale, "{r} vs {scale}");
        }
    }

    #[test]
    fn energy_injection_vanishes_without_viscosity_or_forcing() {
        // ν must be positive, so take it tiny and drop the viscous part.
        let g = grid(16);
        let sp = Spectral::new(g);
        let u = random(g, 8);
        let p = ModelParams::new(ModelKind::MlAlpha, 1e-300, 0.2).unwrap();
        let f = SpectralVectorField::zeros(g);
        let t = rhs(&sp, &u, &p, &f).unwrap();
        let ubar = helmholtz_filter(&u, 0.2);
        let inj = t.explicit().inner(&ubar).unwrap().abs();
        let scale = t.advection.norm() * ubar.norm();
        assert!(inj <= 1e-12 * scale);
    }

    #[test]
    fn alpha_continuity_is_second_order() {
        let g = grid(16);
        let sp = Spectral::new(g);
        let u = project_solenoidal(&SpectralVectorField::random_smooth(g, 3, 11, 0));
        let reference = nonlinear_term(&sp, ModelKind::Nse, &u, &u).unwrap();
        let err = |alpha: f64| {
            let n = nonlinear_term(&sp, ModelKind::MlAlpha, &u, &helmholtz_filter(&u, alpha)).unwrap();
            n.sub(&reference).unwrap().norm()
        };
        let alpha = 0.05;
        let (e1, e2, e3) = (err(alpha), err(alpha / 2.0), err(alpha / 4.0));
        for ratio in [e1 / e2, e2 / e3] {
            assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
        }
    }
}
