//! Discretization of the periodic box `[0, L)^3`.
//!
//! Lattice index `m` in `[-n/2, n/2)^3` is stored in FFT order: array index
//! `i < n/2` holds `m = i`, the rest hold `m = i - n`. The flat index of
//! `(i, j, l)` is `(i * n + j) * n + l`, with `l` (the z axis) contiguous.

use std::f64::consts::PI;

use thiserror::Error;

/// Smallest admissible resolution.
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid.n must be an even integer >= {MIN_POINTS}, got {0}")]
    BadResolution(usize),
    #[error("grid.L must be a positive finite length, got {0}")]
    BadLength(f64),
}

/// Uniform periodic grid with `n` points per dimension and period `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    n: usize,
    length: f64,
    k0: f64,
    dealias_cut: usize,
}

impl TorusGrid {
    pub fn new(n: usize, length: f64) -> Result<Self, GridError> {
        if n < MIN_POINTS || !n.is_multiple_of(2) {
            return Err(GridError::BadResolution(n));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(GridError::BadLength(length));
        }
        Ok(Self {
            n,
            length,
            k0: 2.0 * PI / length,
            // Largest cut K with 3K < n: quadratic products of retained modes
            // then never alias back onto a retained mode.
            dealias_cut: (n - 1) / 3,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Box period `L`.
    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Fundamental wavenumber `2π/L`.
    #[inline]
    pub fn k0(&self) -> f64 {
        self.k0
    }

    /// Retained modes satisfy `max_i |m_i| <= dealias_cut`.
    #[inline]
    pub fn dealias_cut(&self) -> usize {
        self.dealias_cut
    }

    /// Number of lattice points, `n^3`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical grid spacing `L/n`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Box volume `L^3`.
    #[inline]
    pub fn volume(&self) -> f64 {
        self.length * self.length * self.length
    }

    /// Signed lattice coordinate of array index `i` along one axis.
    #[inline]
    pub fn signed(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Array index along one axis for the signed coordinate `m`, if representable.
    #[inline]
    pub fn unsigned(&self, m: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m < -half || m >= half {
            return None;
        }
        Some(m.rem_euclid(self.n as i64) as usize)
    }

    #[inline]
    pub fn flat(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n + j) * self.n + l
    }

    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Lattice vector `m` of a flat index.
    #[inline]
    pub fn lattice(&self, idx: usize) -> [i64; 3] {
        let (i, j, l) = self.split(idx);
        [self.signed(i), self.signed(j), self.signed(l)]
    }

    /// Flat index of the lattice vector `m`, if it lies in `[-n/2, n/2)^3`.
    pub fn index_of(&self, m: [i64; 3]) -> Option<usize> {
        Some(self.flat(
            self.unsigned(m[0])?,
            self.unsigned(m[1])?,
            self.unsigned(m[2])?,
        ))
    }

    /// Flat index of `-m` (the Nyquist plane maps onto itself).
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i, j, l) = self.split(idx);
        self.flat((n - i) % n, (n - j) % n, (n - l) % n)
    }

    /// Wavevector `k0 * m`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.lattice(idx);
        [
            self.k0 * m[0] as f64,
            self.k0 * m[1] as f64,
            self.k0 * m[2] as f64,
        ]
    }

    /// `|m|^2` as an integer.
    #[inline]
    pub fn lattice_norm2(&self, idx: usize) -> i64 {
        let m = self.lattice(idx);
        m[0] * m[0] + m[1] * m[1] + m[2] * m[2]
    }

    /// `|k|^2 = k0^2 |m|^2`. Computed from the integer `|m|^2`, so every mode
    /// of a lattice shell gets a bit-identical value.
    #[inline]
    pub fn k2(&self, idx: usize) -> f64 {
        self.k0 * self.k0 * self.lattice_norm2(idx) as f64
    }

    #[inline]
    pub fn in_mask(&self, idx: usize) -> bool {
        let cut = self.dealias_cut as i64;
        self.lattice(idx).iter().all(|m| m.abs() <= cut)
    }

    /// Physical coordinate of the collocation point `(i, j, l)`.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let (i, j, l) = self.split(idx);
        let h = self.spacing();
        [i as f64 * h, j as f64 * h, l as f64 * h]
    }

    /// True when `other` describes the same discretization.
    pub fn same_as(&self, other: &TorusGrid) -> bool {
        self.n == other.n && self.length == other.length
    }
}
