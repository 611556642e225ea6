//! Sobolev moments `H_N = ∫|∇^N u|² dx`, evaluated as lattice sums
//! `L³ Σ_k |k|^{2N} |û(k)|²`.

use thiserror::Error;

use crate::field::SpectralVectorField;

/// Highest moment order any caller may request. Diagnostics use a lower,
/// configurable `N_max` (default [`DEFAULT_MAX_ORDER`]).
pub const ORDER_LIMIT: usize = 12;

/// Default `N_max`: enough for ladder checks up to `N = 4`, which need `H_{N+2}`.
pub const DEFAULT_MAX_ORDER: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("moment order {order} exceeds the configured maximum {max}")]
pub struct OrderError {
    pub order: usize,
    pub max: usize,
}

/// `H_N` for a single `N`.
pub fn sobolev_moment(field: &SpectralVectorField, order: usize) -> Result<f64, OrderError> {
    Ok(sobolev_moments(field, order)?[order])
}

/// `[H_0, ..., H_{max_order}]` in one pass.
pub fn sobolev_moments(field: &SpectralVectorField, max_order: usize) -> Result<Vec<f64>, OrderError> {
    weighted_moments(field, max_order, |_| 1.0)
}

/// `L³ Σ_k |k|^{2N} w(k) |û(k)|²` for `N = 0..=max_order`.
///
/// With `w = (1 + α²|k|²)^{-2}` this yields the moments of the filtered field
/// without forming it.
pub fn weighted_moments(
    field: &SpectralVectorField,
    max_order: usize,
    weight: impl Fn(f64) -> f64,
) -> Result<Vec<f64>, OrderError> {
    if max_order > ORDER_LIMIT {
        return Err(OrderError {
            order: max_order,
            max: ORDER_LIMIT,
        });
    }
    let grid = field.grid();
    let mut sums = vec![0.0; max_order + 1];
    for idx in 0..grid.len() {
        let a: f64 = field.at(idx).iter().map(|z| z.norm_sqr()).sum();
        if a == 0.0 {
            continue;
        }
        let k2 = grid.k2(idx);
        let mut term = a * weight(k2);
        for s in sums.iter_mut() {
            *s += term;
            term *= k2;
        }
    }
    let vol = grid.volume();
    Ok(sums.into_iter().map(|s| s * vol).collect())
}
