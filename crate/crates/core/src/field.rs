//! Fourier coefficients of real, periodic 3-vector fields.
//!
//! A coefficient `c(m)` multiplies `exp(i k0 m·x)`, so the field at `x` is
//! `Σ_m c(m) exp(i k0 m·x)` and `∫|u|² dx = L³ Σ_m |c(m)|²`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use thiserror::Error;

use crate::grid::TorusGrid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },
    #[error("shape mismatch: expected {expected} samples per component, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
}

pub(crate) fn check_same_grid(a: &TorusGrid, b: &TorusGrid) -> Result<(), FieldError> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(FieldError::GridMismatch {
            left: format!("n={} L={}", a.n(), a.length()),
            right: format!("n={} L={}", b.n(), b.length()),
        })
    }
}

/// Spectral coefficients of a 3-component velocity-like field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVectorField {
    grid: TorusGrid,
    comps: [Vec<Complex64>; 3],
}

/// Collocation-point samples of a real 3-component field.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalVectorField {
    grid: TorusGrid,
    comps: [Vec<f64>; 3],
}

impl PhysicalVectorField {
    pub fn zeros(grid: TorusGrid) -> Self {
        let len = grid.len();
        Self {
            grid,
            comps: [vec![0.0; len], vec![0.0; len], vec![0.0; len]],
        }
    }

    pub fn from_components(grid: TorusGrid, comps: [Vec<f64>; 3]) -> Result<Self, FieldError> {
        for c in &comps {
            if c.len() != grid.len() {
                return Err(FieldError::ShapeMismatch {
                    expected: grid.len(),
                    got: c.len(),
                });
            }
        }
        Ok(Self { grid, comps })
    }

    /// Samples `g(x)` at every collocation point.
    pub fn from_fn(grid: TorusGrid, g: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = g(grid.point(idx));
            for (c, val) in out.comps.iter_mut().zip(v) {
                c[idx] = val;
            }
        }
        out
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<f64>; 3] {
        self.comps
    }

    /// Largest pointwise Euclidean magnitude.
    pub fn max_magnitude(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                let s: f64 = self.comps.iter().map(|c| c[i] * c[i]).sum();
                s.sqrt()
            })
            .fold(0.0, f64::max)
    }
}

impl SpectralVectorField {
    pub fn zeros(grid: TorusGrid) -> Self {
        let len = grid.len();
        let z = Complex64::new(0.0, 0.0);
        Self {
            grid,
            comps: [vec![z; len], vec![z; len], vec![z; len]],
        }
    }

    pub fn from_components(
        grid: TorusGrid,
        comps: [Vec<Complex64>; 3],
    ) -> Result<Self, FieldError> {
        for c in &comps {
            if c.len() != grid.len() {
                return Err(FieldError::ShapeMismatch {
                    expected: grid.len(),
                    got: c.len(),
                });
            }
        }
        Ok(Self { grid, comps })
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    #[inline]
    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    /// Coefficient vector at flat index `idx`.
    #[inline]
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: [Complex64; 3]) {
        for (c, val) in self.comps.iter_mut().zip(v) {
            c[idx] = val;
        }
    }

    /// Coefficient vector at lattice vector `m` (zero if not representable).
    pub fn mode(&self, m: [i64; 3]) -> [Complex64; 3] {
        match self.grid.index_of(m) {
            Some(idx) => self.at(idx),
            None => [Complex64::new(0.0, 0.0); 3],
        }
    }

    /// Sets `c(m) = v` and `c(-m) = conj(v)`, keeping the field real.
    ///
    /// Panics if `m` is not representable or lies on the Nyquist plane.
    pub fn set_mode_pair(&mut self, m: [i64; 3], v: [Complex64; 3]) {
        let idx = self.grid.index_of(m).expect("mode outside lattice");
        let neg = self
            .grid
            .index_of([-m[0], -m[1], -m[2]])
            .expect("Nyquist mode has no conjugate partner");
        if idx == neg {
            // m = 0: a real mean.
            self.set(idx, [v[0].re.into(), v[1].re.into(), v[2].re.into()]);
        } else {
            self.set(idx, v);
            self.set(neg, [v[0].conj(), v[1].conj(), v[2].conj()]);
        }
    }

    /// Applies `op(idx, coeffs)` to every mode in place.
    pub fn map_modes(&mut self, mut op: impl FnMut(usize, [Complex64; 3]) -> [Complex64; 3]) {
        for idx in 0..self.grid.len() {
            let v = op(idx, self.at(idx));
            self.set(idx, v);
        }
    }

    /// Multiplies each mode by a real, mode-dependent factor.
    pub fn scale_modes(&mut self, factor: impl Fn(usize) -> f64) {
        for idx in 0..self.grid.len() {
            let s = factor(idx);
            for c in self.comps.iter_mut() {
                c[idx] *= s;
            }
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale_modes(|_| s);
        out
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &SpectralVectorField) -> Result<(), FieldError> {
        check_same_grid(&self.grid, &other.grid)?;
        for (a, b) in self.comps.iter_mut().zip(other.comps.iter()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * s;
            }
        }
        Ok(())
    }

    pub fn sub(&self, other: &SpectralVectorField) -> Result<SpectralVectorField, FieldError> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Zeroes every mode outside the dealias mask.
    pub fn truncate_to_mask(&mut self) {
        let grid = self.grid;
        let zero = Complex64::new(0.0, 0.0);
        for idx in 0..grid.len() {
            if !grid.in_mask(idx) {
                for c in self.comps.iter_mut() {
                    c[idx] = zero;
                }
            }
        }
    }

    pub fn zero_mean(&mut self) {
        let zero = Complex64::new(0.0, 0.0);
        for c in self.comps.iter_mut() {
            c[0] = zero;
        }
    }

    /// Overwrites every mode with `m_z < 0` (off the Nyquist plane) by the
    /// conjugate of its partner, so the stored half determines the field
    /// bit for bit.
    pub fn canonicalize_hermitian(&mut self) {
        let grid = self.grid;
        let n = grid.n();
        for idx in 0..grid.len() {
            let l = idx % n;
            if l > n / 2 {
                let src = grid.conjugate_index(idx);
                for c in self.comps.iter_mut() {
                    c[idx] = c[src].conj();
                }
            }
        }
    }

    /// `∫|u|² dx = L³ Σ|c|²`.
    pub fn norm_sq(&self) -> f64 {
        self.grid.volume() * self.coeff_sum_sq()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `Σ|c|²` without the volume factor.
    pub fn coeff_sum_sq(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Real `L²` inner product `∫ u·v dx = L³ Re Σ conj(u)·v`.
    pub fn inner(&self, other: &SpectralVectorField) -> Result<f64, FieldError> {
        check_same_grid(&self.grid, &other.grid)?;
        let mut s = 0.0;
        for (a, b) in self.comps.iter().zip(other.comps.iter()) {
            for (x, y) in a.iter().zip(b) {
                s += x.re * y.re + x.im * y.im;
            }
        }
        Ok(s * self.grid.volume())
    }

    /// Largest coefficient magnitude, `max_m |c(m)|`.
    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len())
            .map(|idx| {
                self.comps
                    .iter()
                    .map(|c| c[idx].norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max_m |k·c(m)| / (k_max · max_m |c(m)|)`, zero for the zero field.
    pub fn divergence_ratio(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        let mut kmax: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.wavevector(idx);
            kmax = kmax.max(self.grid.k2(idx).sqrt());
            let d = self.comps[0][idx] * k[0] + self.comps[1][idx] * k[1] + self.comps[2][idx] * k[2];
            worst = worst.max(d.norm());
        }
        worst / (kmax * scale)
    }

    /// Largest `|c(-m) - conj(c(m))|` over all modes off the Nyquist planes.
    pub fn hermitian_defect(&self) -> f64 {
        let grid = self.grid;
        let half = (grid.n() / 2) as i64;
        let mut worst: f64 = 0.0;
        for idx in 0..grid.len() {
            if grid.lattice(idx).iter().any(|&m| m == -half) {
                continue;
            }
            let neg = grid.conjugate_index(idx);
            for c in &self.comps {
                worst = worst.max((c[neg] - c[idx].conj()).norm());
            }
        }
        worst
    }

    /// Smooth random field: independent random coefficients on the modes
    /// `0 < |m|² <= radius²`, conjugate-paired so the field is real, with a
    /// `|m|^-2` amplitude taper. Not projected and not normalized.
    ///
    /// Modes are visited in a fixed lattice order that does not depend on the
    /// grid, so the same seed yields the same field on every resolution that
    /// can represent it.
    pub fn random_smooth(grid: TorusGrid, radius: i64, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut out = Self::zeros(grid);
        for m0 in -radius..=radius {
            for m1 in -radius..=radius {
                for m2 in -radius..=radius {
                    let m = [m0, m1, m2];
                    let m2sum = m0 * m0 + m1 * m1 + m2 * m2;
                    // One representative per ±m pair; skip m = 0.
                    if m2sum == 0 || m2sum > radius * radius || !is_positive_representative(m) {
                        continue;
                    }
                    let taper = 1.0 / m2sum as f64;
                    let mut v = [Complex64::new(0.0, 0.0); 3];
                    for z in v.iter_mut() {
                        *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * taper;
                    }
                    if grid.index_of(m).is_some() {
                        out.set_mode_pair(m, v);
                    }
                }
            }
        }
        out
    }
}

/// True for exactly one member of each `{m, -m}` pair with `m != 0`.
pub(crate) fn is_positive_representative(m: [i64; 3]) -> bool {
    for &c in &m {
        if c != 0 {
            return c > 0;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new(8, 2.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn random_fields_are_hermitian_and_seeded() {
        let a = SpectralVectorField::random_smooth(grid(), 2, 7, 0);
        let b = SpectralVectorField::random_smooth(grid(), 2, 7, 0);
        let c = SpectralVectorField::random_smooth(grid(), 2, 8, 0);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.hermitian_defect(), 0.0);
        assert_eq!(a.at(0), [Complex64::new(0.0, 0.0); 3]);
    }

    #[test]
    fn random_field_is_resolution_independent() {
        let coarse = SpectralVectorField::random_smooth(grid(), 2, 3, 1);
        let fine_grid = TorusGrid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let fine = SpectralVectorField::random_smooth(fine_grid, 2, 3, 1);
        for idx in 0..coarse.grid().len() {
            let m = coarse.grid().lattice(idx);
            assert_eq!(coarse.at(idx), fine.mode(m));
        }
    }

    #[test]
    fn inner_product_matches_norm() {
        let a = SpectralVectorField::random_smooth(grid(), 2, 1, 0);
        let n2 = a.inner(&a).unwrap();
        assert!((n2 - a.norm_sq()).abs() <= 1e-14 * n2);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = SpectralVectorField::zeros(grid());
        let b = SpectralVectorField::zeros(TorusGrid::new(10, 1.0).unwrap());
        assert!(matches!(a.inner(&b), Err(FieldError::GridMismatch { .. })));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let z = Complex64::new(0.0, 0.0);
        let r = SpectralVectorField::from_components(grid(), [vec![z; 3], vec![z; 3], vec![z; 3]]);
        assert!(matches!(r, Err(FieldError::ShapeMismatch { .. })));
    }
}
