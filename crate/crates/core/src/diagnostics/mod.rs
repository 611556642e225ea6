//! Diagnostics: per-sample functionals, long-time averages, ladder checks,
//! and Reynolds-number bounds.

pub mod average;
pub mod bounds;
pub mod ladder;
pub mod record;
pub mod table;

use thiserror::Error;

use crate::field::FieldError;
use crate::norms::OrderError;

pub use average::{time_average, AverageAccumulator};
pub use bounds::{bound_suite, BoundReport, RunContext};
pub use ladder::{j_ladder, ladder_check, FdCheck, JLadderReport, LadderReport};
pub use record::{record, DiagnosticsRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("diagnostics.N_max must be at least 2, got {0}")]
    NMaxTooSmall(usize),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("τ undefined: Gr ≤ 1 (Gr = {0})")]
    TauUndefined(f64),
    #[error("moment index {index} exceeds N_max = {n_max}")]
    Index { index: usize, n_max: usize },
    #[error("κ_{{N,r}} needs N > r, got N = {n}, r = {r}")]
    KappaOrder { n: usize, r: usize },
    #[error("J-form depletion index needs 1 <= p <= N, got N = {n}, p = {p}")]
    DepletionIndex { n: usize, p: usize },
    #[error("κ_{{N,r}} undefined: J_{0} is not positive")]
    KappaDenominator(usize),
    #[error("no samples with t >= spinup = {0}")]
    EmptyWindow(f64),
    #[error("ladder check needs at least one sample")]
    InsufficientSamples,
}

/// `τ = ℓ² ν⁻¹ (Gr ln Gr)^{-1/2}`, defined for `Gr > 1`.
pub fn tau(gr: f64, ell: f64, nu: f64) -> Result<f64, DiagnosticsError> {
    if !(gr > 1.0) {
        return Err(DiagnosticsError::TauUndefined(gr));
    }
    Ok(ell * ell / nu / (gr * gr.ln()).sqrt())
}

/// `J_N = F̄_N + 2α² F̄_{N+1}` with `F̄_N = H̄_N + τΦ_N`.
pub fn j_moment(rec: &DiagnosticsRecord, n: usize, tau: f64, alpha: f64) -> Result<f64, DiagnosticsError> {
    let n_max = rec.n_max();
    if n + 1 > n_max {
        return Err(DiagnosticsError::Index { index: n + 1, n_max });
    }
    let f = |k: usize| rec.hbar[k] + tau * rec.phi[k];
    Ok(f(n) + 2.0 * alpha * alpha * f(n + 1))
}

/// `[J_0, ..., J_{N_max - 1}]`.
pub fn j_moments(rec: &DiagnosticsRecord, tau: f64, alpha: f64) -> Vec<f64> {
    (0..rec.n_max())
        .map(|n| j_moment(rec, n, tau, alpha).expect("index in range"))
        .collect()
}

/// `dJ_N/dt` (the forcing is time independent).
pub fn j_rate(rec: &DiagnosticsRecord, n: usize, alpha: f64) -> f64 {
    rec.dhbar_dt[n] + 2.0 * alpha * alpha * rec.dhbar_dt[n + 1]
}

/// `κ_{N,r} = (J_N / J_r)^{1/(2(N-r))}`.
pub fn kappa(j: &[f64], n: usize, r: usize) -> Result<f64, DiagnosticsError> {
    if n <= r {
        return Err(DiagnosticsError::KappaOrder { n, r });
    }
    if n >= j.len() {
        return Err(DiagnosticsError::Index { index: n, n_max: j.len() });
    }
    if !(j[r] > 0.0) {
        return Err(DiagnosticsError::KappaDenominator(r));
    }
    Ok((j[n] / j[r]).powf(0.5 / (n - r) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn rec(hbar: Vec<f64>, phi: Vec<f64>) -> DiagnosticsRecord {
        let n = hbar.len();
        DiagnosticsRecord {
            t: 0.0,
            h: vec![0.0; n],
            hbar,
            phi,
            sup_ubar: 0.0,
            sup_grad_ubar: 0.0,
            inj: 0.0,
            visc: 0.0,
            de_dt: 0.0,
            nonlinear: 0.0,
            dhbar_dt: vec![0.0; n],
        }
    }

    #[test]
    fn tau_formula() {
        assert!((tau(E, 1.0, 1.0).unwrap() - E.powf(-0.5)).abs() < 1e-15);
        assert_eq!(tau(1.0, 1.0, 1.0), Err(DiagnosticsError::TauUndefined(1.0)));
        let t1 = tau(5.0, 0.3, 0.1).unwrap();
        let t2 = tau(5.0, 0.6, 0.1).unwrap();
        assert!((t2 - 4.0 * t1).abs() < 1e-14 * t2);
    }

    #[test]
    fn j_limits() {
        let r = rec(vec![1.0, 2.0, 3.0, 5.0], vec![0.5, 0.25, 0.125, 0.0625]);
        assert_eq!(j_moment(&r, 1, 0.0, 0.0).unwrap(), 2.0);
        assert_eq!(j_moment(&r, 1, 0.0, 0.5).unwrap(), 2.0 + 2.0 * 0.25 * 3.0);
        let with_tau = j_moment(&r, 0, 2.0, 1.0).unwrap();
        assert_eq!(with_tau, (1.0 + 1.0) + 2.0 * (2.0 + 0.5));
        assert!(j_moment(&r, 3, 0.0, 0.0).is_err());
    }

    #[test]
    fn kappa_of_geometric_moments() {
        let a: f64 = 7.0;
        let j: Vec<f64> = (0..5).map(|n| 3.0 * a.powi(n)).collect();
        for n in 1..5 {
            for r in 0..n {
                assert!((kappa(&j, n, r).unwrap() - a.sqrt()).abs() < 1e-14);
            }
        }
        assert!(kappa(&j, 1, 1).is_err());
        assert!(kappa(&[0.0, 1.0], 1, 0).is_err());
    }
}
