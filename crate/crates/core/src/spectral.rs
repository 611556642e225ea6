//! Spectral calculus on the torus: transforms, Leray projection, dealiased
//! products and the advective term `P[(a·∇)b]`.
//!
//! Real fields are transformed two at a time by packing them as `a + i b`
//! into one complex FFT. Unpacking in spectral space makes the result
//! Hermitian exactly, not just to roundoff.

use std::borrow::Cow;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::fft::Fft3;
use crate::field::{check_same_grid, FieldError, PhysicalVectorField, SpectralVectorField};
use crate::grid::TorusGrid;

/// Deliberate defects used to check that the verification suite catches them.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    pub skip_dealias: bool,
    pub skip_projection: bool,
}

/// `(‖v‖_∞, ‖∇v‖_∞)` over the collocation points; the gradient norm is the
/// pointwise Frobenius norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNorms {
    pub value: f64,
    pub gradient: f64,
}

/// Leray projection `û - k (k·û)/|k|²`, mean mode zeroed.
pub fn project_solenoidal(field: &SpectralVectorField) -> SpectralVectorField {
    let grid = *field.grid();
    let mut out = field.clone();
    out.map_modes(|idx, v| {
        if idx == 0 {
            return [Complex64::new(0.0, 0.0); 3];
        }
        let k = grid.wavevector(idx);
        let k2 = grid.k2(idx);
        let kdotv = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
        [v[0] - kdotv * k[0], v[1] - kdotv * k[1], v[2] - kdotv * k[2]]
    });
    out
}

/// Transform plans plus the operations that need them, bound to one grid.
#[derive(Debug, Clone)]
pub struct Spectral {
    grid: TorusGrid,
    fft: Fft3,
    faults: Faults,
    tables: Arc<Tables>,
}

/// Per-index lookups that would otherwise cost integer divisions in every
/// pass over the lattice.
#[derive(Debug)]
struct Tables {
    k: Vec<[f64; 3]>,
    mask: Vec<bool>,
    conj: Vec<usize>,
}

impl Tables {
    fn new(grid: &TorusGrid) -> Self {
        let len = grid.len();
        Self {
            k: (0..len).map(|i| grid.wavevector(i)).collect(),
            mask: (0..len).map(|i| grid.in_mask(i)).collect(),
            conj: (0..len).map(|i| grid.conjugate_index(i)).collect(),
        }
    }
}

/// One input of a packed inverse transform: coefficients, or the
/// coefficients of their derivative along an axis.
#[derive(Clone, Copy)]
enum Source<'a> {
    Plain(&'a [Complex64]),
    Deriv(&'a [Complex64], usize),
}

impl Spectral {
    pub fn new(grid: TorusGrid) -> Self {
        Self {
            grid,
            fft: Fft3::new(grid.n()),
            faults: Faults::default(),
            tables: Arc::new(Tables::new(&grid)),
        }
    }

    #[doc(hidden)]
    pub fn with_faults(grid: TorusGrid, faults: Faults) -> Self {
        Self {
            faults,
            ..Self::new(grid)
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[doc(hidden)]
    pub fn faults(&self) -> Faults {
        self.faults
    }

    fn check_len(&self, got: usize) -> Result<(), FieldError> {
        if got == self.grid.len() {
            Ok(())
        } else {
            Err(FieldError::ShapeMismatch {
                expected: self.grid.len(),
                got,
            })
        }
    }

    /// Evaluates `Σ_m c(m) exp(i k0 m·x_j)` at every collocation point.
    pub fn scalar_to_physical(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>, FieldError> {
        self.check_len(coeffs.len())?;
        let mut d = coeffs.to_vec();
        self.fft.inverse(&mut d);
        Ok(d)
    }

    /// Inverse of [`Spectral::scalar_to_physical`].
    pub fn scalar_to_spectral(&self, samples: &[Complex64]) -> Result<Vec<Complex64>, FieldError> {
        self.check_len(samples.len())?;
        let mut d = samples.to_vec();
        self.fft.forward(&mut d);
        let inv = 1.0 / self.grid.len() as f64;
        d.iter_mut().for_each(|z| *z *= inv);
        Ok(d)
    }

    /// Physical samples of one or two real fields given by Hermitian coefficients.
    fn pair_to_physical(&self, a: Source, b: Option<Source>) -> (Vec<f64>, Vec<f64>) {
        let k = &self.tables.k;
        let value = |src: Source, idx: usize| match src {
            Source::Plain(c) => c[idx],
            Source::Deriv(c, axis) => {
                let (z, kj) = (c[idx], k[idx][axis]);
                Complex64::new(-kj * z.im, kj * z.re)
            }
        };
        let mut z: Vec<Complex64> = vec![Complex64::default(); self.grid.len()];
        z.par_iter_mut().enumerate().for_each(|(idx, out)| {
            let x = value(a, idx);
            *out = match b {
                Some(b) => {
                    let y = value(b, idx);
                    Complex64::new(x.re - y.im, x.im + y.re)
                }
                None => x,
            };
        });
        self.fft.inverse(&mut z);
        let re = z.iter().map(|c| c.re).collect();
        let im = if b.is_some() {
            z.iter().map(|c| c.im).collect()
        } else {
            Vec::new()
        };
        (re, im)
    }

    /// Spectral coefficients of one or two real sample arrays.
    fn pair_to_spectral(&self, p: &[f64], q: Option<&[f64]>) -> (Vec<Complex64>, Vec<Complex64>) {
        let grid = self.grid;
        let mut z: Vec<Complex64> = match q {
            Some(q) => p
                .par_iter()
                .zip(q.par_iter())
                .map(|(&x, &y)| Complex64::new(x, y))
                .collect(),
            None => p.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        };
        self.fft.forward(&mut z);
        let inv = 1.0 / grid.len() as f64;
        let len = grid.len();
        let mut a = vec![Complex64::default(); len];
        let mut b = if q.is_some() {
            vec![Complex64::default(); len]
        } else {
            Vec::new()
        };
        let conj = &self.tables.conj;
        for idx in 0..len {
            let zk = z[idx] * inv;
            let zn = z[conj[idx]].conj() * inv;
            let s = zk + zn;
            a[idx] = Complex64::new(0.5 * s.re, 0.5 * s.im);
            if q.is_some() {
                let d = zk - zn;
                b[idx] = Complex64::new(0.5 * d.im, -0.5 * d.re);
            }
        }
        (a, b)
    }

    /// Physical samples of a batch of real fields.
    fn batch_to_physical(&self, fields: &[Source]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(fields.len());
        for pair in fields.chunks(2) {
            let (p, q) = self.pair_to_physical(pair[0], pair.get(1).copied());
            out.push(p);
            if pair.len() == 2 {
                out.push(q);
            }
        }
        out
    }

    fn batch_to_spectral(&self, samples: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let mut out = Vec::with_capacity(samples.len());
        for pair in samples.chunks(2) {
            let (a, b) = self.pair_to_spectral(pair[0], pair.get(1).copied());
            out.push(a);
            if pair.len() == 2 {
                out.push(b);
            }
        }
        out
    }

    /// Samples of a real vector field at the collocation points.
    pub fn to_physical(&self, field: &SpectralVectorField) -> Result<PhysicalVectorField, FieldError> {
        check_same_grid(&self.grid, field.grid())?;
        let c = field.components();
        let mut v = self
            .batch_to_physical(&[Source::Plain(&c[0]), Source::Plain(&c[1]), Source::Plain(&c[2])])
            .into_iter();
        let comps = [v.next().unwrap(), v.next().unwrap(), v.next().unwrap()];
        PhysicalVectorField::from_components(self.grid, comps)
    }

    /// Coefficients of a real vector field from its samples. The result is
    /// exactly Hermitian.
    pub fn to_spectral(&self, samples: &PhysicalVectorField) -> Result<SpectralVectorField, FieldError> {
        check_same_grid(&self.grid, samples.grid())?;
        let c = samples.components();
        let mut v = self.batch_to_spectral(&[&c[0], &c[1], &c[2]]).into_iter();
        let comps = [v.next().unwrap(), v.next().unwrap(), v.next().unwrap()];
        SpectralVectorField::from_components(self.grid, comps)
    }

    /// Leray projection, unless the projection fault is injected.
    pub fn project(&self, field: &SpectralVectorField) -> SpectralVectorField {
        if self.faults.skip_projection {
            field.clone()
        } else {
            project_solenoidal(field)
        }
    }

    fn masked<'a>(&self, c: &'a [Complex64]) -> Cow<'a, [Complex64]> {
        if self.faults.skip_dealias {
            return Cow::Borrowed(c);
        }
        let mask = &self.tables.mask;
        Cow::Owned(
            c.iter()
                .zip(mask)
                .map(|(&z, &keep)| if keep { z } else { Complex64::default() })
                .collect(),
        )
    }

    fn truncate(&self, c: &mut [Complex64]) {
        if self.faults.skip_dealias {
            return;
        }
        for (z, &keep) in c.iter_mut().zip(&self.tables.mask) {
            if !keep {
                *z = Complex64::default();
            }
        }
    }

    /// Product of two (possibly complex) scalar fields: inputs truncated to
    /// the dealias mask, product formed at the collocation points, result
    /// truncated to the mask. Equals the exact convolution of the truncated
    /// inputs on every retained mode.
    pub fn dealiased_product(&self, a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>, FieldError> {
        self.check_len(a.len())?;
        self.check_len(b.len())?;
        let pa = self.scalar_to_physical(&self.masked(a))?;
        let pb = self.scalar_to_physical(&self.masked(b))?;
        let prod: Vec<Complex64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
        let mut out = self.scalar_to_spectral(&prod)?;
        self.truncate(&mut out);
        Ok(out)
    }

    /// Physical samples of the `extra` fields followed by the nine gradient
    /// entries `∂_j v_i` (index `3i + j`).
    fn gradient_samples(&self, v: &SpectralVectorField, extra: &[&[Complex64]]) -> Vec<Vec<f64>> {
        let mut sources: Vec<Source> = extra.iter().map(|c| Source::Plain(c)).collect();
        for i in 0..3 {
            for j in 0..3 {
                sources.push(Source::Deriv(v.component(i), j));
            }
        }
        self.batch_to_physical(&sources)
    }

    /// `P[(a·∇)b]`, dealiased by the 2/3 rule, mean mode zeroed.
    pub fn advect(&self, a: &SpectralVectorField, b: &SpectralVectorField) -> Result<SpectralVectorField, FieldError> {
        check_same_grid(&self.grid, a.grid())?;
        check_same_grid(&self.grid, b.grid())?;
        let a_m: Vec<Cow<[Complex64]>> = (0..3).map(|c| self.masked(a.component(c))).collect();
        let b_m = if self.faults.skip_dealias {
            b.clone()
        } else {
            let mut t = b.clone();
            t.truncate_to_mask();
            t
        };
        let samples = self.gradient_samples(&b_m, &[&a_m[0], &a_m[1], &a_m[2]]);
        let (av, grad) = samples.split_at(3);
        let len = self.grid.len();
        let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        let [o0, o1, o2] = &mut out;
        o0.par_iter_mut()
            .zip(o1.par_iter_mut())
            .zip(o2.par_iter_mut())
            .enumerate()
            .for_each(|(x, ((c0, c1), c2))| {
                let (a0, a1, a2) = (av[0][x], av[1][x], av[2][x]);
                *c0 = a0 * grad[0][x] + a1 * grad[1][x] + a2 * grad[2][x];
                *c1 = a0 * grad[3][x] + a1 * grad[4][x] + a2 * grad[5][x];
                *c2 = a0 * grad[6][x] + a1 * grad[7][x] + a2 * grad[8][x];
            });
        let mut spec = self.batch_to_spectral(&[&out[0], &out[1], &out[2]]).into_iter();
        let mut comps = [spec.next().unwrap(), spec.next().unwrap(), spec.next().unwrap()];
        for c in comps.iter_mut() {
            self.truncate(c);
        }
        let mut field = SpectralVectorField::from_components(self.grid, comps)?;
        field.zero_mean();
        Ok(self.project(&field))
    }

    /// Sup norms of a real vector field and of its gradient at the
    /// collocation points.
    pub fn sup_norms(&self, field: &SpectralVectorField) -> Result<SupNorms, FieldError> {
        check_same_grid(&self.grid, field.grid())?;
        let c = field.components();
        let samples = self.gradient_samples(field, &[&c[0], &c[1], &c[2]]);
        let (v, g) = samples.split_at(3);
        let mut value: f64 = 0.0;
        let mut gradient: f64 = 0.0;
        for x in 0..self.grid.len() {
            let s = v[0][x] * v[0][x] + v[1][x] * v[1][x] + v[2][x] * v[2][x];
            value = value.max(s);
            let gs: f64 = g.iter().map(|e| e[x] * e[x]).sum();
            gradient = gradient.max(gs);
        }
        Ok(SupNorms {
            value: value.sqrt(),
            gradient: gradient.sqrt(),
        })
    }

    /// `‖v‖_∞` alone.
    pub fn sup_value(&self, field: &SpectralVectorField) -> Result<f64, FieldError> {
        Ok(self.to_physical(field)?.max_magnitude())
    }
}
