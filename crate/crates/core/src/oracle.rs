//! Brute-force reference implementations for small grids.
//!
//! Nothing here calls the FFT path, the projection or the filter of the main
//! solver; coefficients are only copied in and out through public accessors.
//! Convolutions are literal triple loops, point values are direct Fourier
//! sums, and time integration is classical RK4.

use rustfft::num_complex::Complex64;
use thiserror::Error;

use crate::field::SpectralVectorField;
use crate::grid::TorusGrid;
use crate::model::ModelKind;

/// Largest grid accepted by the dense routines.
pub const MAX_N: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle grids are limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("oracle operands have different grids")]
    Mismatch,
}

type V3 = [Complex64; 3];

const ZERO: V3 = [Complex64 { re: 0.0, im: 0.0 }; 3];

/// All coefficients of a vector field on an `n³` lattice, indexed by signed
/// mode `m` with `-n/2 <= m_i < n/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseField {
    n: usize,
    length: f64,
    coeffs: Vec<V3>,
}

impl DenseField {
    pub fn zeros(n: usize, length: f64) -> Result<Self, OracleError> {
        if n > MAX_N {
            return Err(OracleError::TooLarge { n, max: MAX_N });
        }
        Ok(Self {
            n,
            length,
            coeffs: vec![ZERO; n * n * n],
        })
    }

    pub fn from_spectral(u: &SpectralVectorField) -> Result<Self, OracleError> {
        let g = u.grid();
        let mut out = Self::zeros(g.n(), g.length())?;
        for m in out.modes() {
            let v = u.mode(m);
            out.set(m, v);
        }
        Ok(out)
    }

    pub fn to_spectral(&self, grid: TorusGrid) -> SpectralVectorField {
        let mut out = SpectralVectorField::zeros(grid);
        for m in self.modes() {
            if let Some(idx) = grid.index_of(m) {
                out.set(idx, self.get(m));
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn k0(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Largest `K` with `3K < n`: products of modes with `|m_i| <= K` never alias back.
    pub fn cut(&self) -> i64 {
        ((self.n - 1) / 3) as i64
    }

    fn half(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Signed modes `-n/2 <= m_i < n/2`.
    pub fn modes(&self) -> Vec<[i64; 3]> {
        let h = self.half();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in -h..h {
            for b in -h..h {
                for c in -h..h {
                    out.push([a, b, c]);
                }
            }
        }
        out
    }

    fn slot(&self, m: [i64; 3]) -> Option<usize> {
        let h = self.half();
        let n = self.n as i64;
        if m.iter().any(|&c| c < -h || c >= h) {
            return None;
        }
        let w = |c: i64| c.rem_euclid(n) as usize;
        Some((w(m[0]) * self.n + w(m[1])) * self.n + w(m[2]))
    }

    pub fn get(&self, m: [i64; 3]) -> V3 {
        self.slot(m).map_or(ZERO, |s| self.coeffs[s])
    }

    pub fn set(&mut self, m: [i64; 3], v: V3) {
        let s = self.slot(m).expect("mode in range");
        self.coeffs[s] = v;
    }

    fn in_mask(&self, m: [i64; 3]) -> bool {
        let k = self.cut();
        m.iter().all(|c| c.abs() <= k)
    }

    fn wave(&self, m: [i64; 3]) -> [f64; 3] {
        let k0 = self.k0();
        m.map(|c| k0 * c as f64)
    }

    fn map(&self, f: impl Fn([i64; 3], V3) -> V3) -> Self {
        let mut out = self.clone();
        for m in self.modes() {
            let v = f(m, self.get(m));
            out.set(m, v);
        }
        out
    }

    /// Removes the component along `k` mode by mode; clears the mean.
    pub fn project(&self) -> Self {
        self.map(|m, v| {
            if m == [0, 0, 0] {
                return ZERO;
            }
            let k = self.wave(m);
            let kk: f64 = k.iter().map(|x| x * x).sum();
            let kv = v[0] * k[0] + v[1] * k[1] + v[2] * k[2];
            [v[0] - kv * (k[0] / kk), v[1] - kv * (k[1] / kk), v[2] - kv * (k[2] / kk)]
        })
    }

    /// `(1 + α²|k|²)^{-1} u`.
    pub fn filter(&self, alpha: f64) -> Self {
        self.map(|m, v| {
            let k = self.wave(m);
            let s = 1.0 / (1.0 + alpha * alpha * k.iter().map(|x| x * x).sum::<f64>());
            v.map(|z| z * s)
        })
    }

    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        self.map(|m, v| {
            let w = other.get(m);
            [v[0] + w[0] * s, v[1] + w[1] * s, v[2] + w[2] * s]
        })
    }

    /// `L³ Re Σ conj(a)·b`.
    pub fn inner(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for m in self.modes() {
            let (a, b) = (self.get(m), other.get(m));
            for c in 0..3 {
                s += (a[c].conj() * b[c]).re;
            }
        }
        s * self.length.powi(3)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flat_map(|v| v.iter()).fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `L³ Σ |k|^{2N} |û|²`.
    pub fn moment(&self, order: u32) -> f64 {
        let mut s = 0.0;
        for m in self.modes() {
            let k2: f64 = self.wave(m).iter().map(|x| x * x).sum();
            s += k2.powi(order as i32) * self.get(m).iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        s * self.length.powi(3)
    }
}

/// `P[(a·∇)b]` on the dealias mask by direct convolution
/// `Σ_{p+q=k} i(â(p)·q) b̂(q)`.
pub fn dense_nonlinear(a: &DenseField, b: &DenseField) -> Result<DenseField, OracleError> {
    if a.n != b.n || a.length != b.length {
        return Err(OracleError::Mismatch);
    }
    let mut out = DenseField::zeros(a.n, a.length)?;
    let k = a.cut();
    let modes = a.modes();
    for &kk in &modes {
        if !out.in_mask(kk) || kk == [0, 0, 0] {
            continue;
        }
        let mut acc = ZERO;
        for &p in &modes {
            if !a.in_mask(p) {
                continue;
            }
            let q = [kk[0] - p[0], kk[1] - p[1], kk[2] - p[2]];
            if q.iter().any(|c| c.abs() > k) {
                continue;
            }
            let ap = a.get(p);
            let bq = b.get(q);
            let qv = a.wave(q);
            let adotq = ap[0] * qv[0] + ap[1] * qv[1] + ap[2] * qv[2];
            let factor = Complex64::new(0.0, 1.0) * adotq;
            for c in 0..3 {
                acc[c] += factor * bq[c];
            }
        }
        out.set(kk, acc);
    }
    Ok(out.project())
}

/// Parameters of the dense reference model.
#[derive(Debug, Clone, Copy)]
pub struct DenseModel {
    pub kind: ModelKind,
    pub nu: f64,
    pub alpha: f64,
}

/// `-P[(a·∇)b] - ν|k|²u + f`.
pub fn dense_rhs(model: &DenseModel, u: &DenseField, f: &DenseField) -> Result<DenseField, OracleError> {
    let alpha = if model.kind == ModelKind::Nse { 0.0 } else { model.alpha };
    let ubar = u.filter(alpha);
    let adv = match model.kind {
        ModelKind::MlAlpha => dense_nonlinear(u, &ubar)?,
        ModelKind::LerayAlpha => dense_nonlinear(&ubar, u)?,
        ModelKind::Nse => dense_nonlinear(u, u)?,
    };
    let visc = u.map(|m, v| {
        let k2: f64 = u.wave(m).iter().map(|x| x * x).sum();
        v.map(|z| z * (-model.nu * k2))
    });
    Ok(adv.map(|_, v| v.map(|z| -z)).add_scaled(1.0, &visc).add_scaled(1.0, f))
}

/// Classical RK4 with fixed step on the dense representation.
pub fn reference_integrate(
    model: &DenseModel,
    u0: &DenseField,
    f: &DenseField,
    dt: f64,
    steps: usize,
) -> Result<DenseField, OracleError> {
    let mut u = u0.clone();
    for _ in 0..steps {
        let k1 = dense_rhs(model, &u, f)?;
        let k2 = dense_rhs(model, &u.add_scaled(0.5 * dt, &k1), f)?;
        let k3 = dense_rhs(model, &u.add_scaled(0.5 * dt, &k2), f)?;
        let k4 = dense_rhs(model, &u.add_scaled(dt, &k3), f)?;
        u = u
            .add_scaled(dt / 6.0, &k1)
            .add_scaled(dt / 3.0, &k2)
            .add_scaled(dt / 3.0, &k3)
            .add_scaled(dt / 6.0, &k4);
    }
    Ok(u)
}

/// Nonzero coefficients of a field with their wavevectors.
fn support(u: &SpectralVectorField) -> Vec<([f64; 3], V3)> {
    let g = u.grid();
    let k0 = g.k0();
    (0..g.len())
        .filter(|&i| u.at(i).iter().any(|z| z.norm() > 0.0))
        .map(|i| (g.lattice(i).map(|c| k0 * c as f64), u.at(i)))
        .collect()
}

/// Direct Fourier sum of `u` at a point; exact for any field, any `n`.
pub fn naive_eval(u: &SpectralVectorField, x: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, v) in support(u) {
        let phase = Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
        for c in 0..3 {
            out[c] += (v[c] * phase).re;
        }
    }
    out
}

/// `max |u|` and `max |∇u|_F` over an `m³` sampling lattice, by direct sums.
pub fn naive_sup_norms(u: &SpectralVectorField, m: usize) -> (f64, f64) {
    let sup = support(u);
    let h = u.grid().length() / m as f64;
    let mut best = (0.0f64, 0.0f64);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let x = [a as f64 * h, b as f64 * h, c as f64 * h];
                let mut val = [0.0; 3];
                let mut grad = [[0.0; 3]; 3];
                for (k, v) in &sup {
                    let phase = Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
                    for i in 0..3 {
                        let z = v[i] * phase;
                        val[i] += z.re;
                        for (j, kj) in k.iter().enumerate() {
                            // ∂_j of Re(z) is Re(i k_j z) = -k_j Im(z).
                            grad[i][j] -= kj * z.im;
                        }
                    }
                }
                let vn = val.iter().map(|x| x * x).sum::<f64>().sqrt();
                let gn = grad.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
                best = (best.0.max(vn), best.1.max(gn));
            }
        }
    }
    best
}

/// `∫|∇^N u|²` by summing every `N`-fold partial derivative squared over an
/// `m³` quadrature lattice. Exact when `m` exceeds twice the largest mode.
pub fn quadrature_moment(u: &SpectralVectorField, order: u32, m: usize) -> f64 {
    let sup = support(u);
    let h = u.grid().length() / m as f64;
    let tuples = 3usize.pow(order);
    let mut total = 0.0;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let x = [a as f64 * h, b as f64 * h, c as f64 * h];
                for t in 0..tuples {
                    // Decode the derivative directions of this tuple.
                    let mut dirs = Vec::with_capacity(order as usize);
                    let mut code = t;
                    for _ in 0..order {
                        dirs.push(code % 3);
                        code /= 3;
                    }
                    let mut val = [0.0; 3];
                    for (k, v) in &sup {
                        let mut factor = Complex64::new(1.0, 0.0);
                        for &d in &dirs {
                            factor *= Complex64::new(0.0, k[d]);
                        }
                        let phase = Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
                        for i in 0..3 {
                            val[i] += (v[i] * factor * phase).re;
                        }
                    }
                    total += val.iter().map(|x| x * x).sum::<f64>();
                }
            }
        }
    }
    total * h * h * h
}
