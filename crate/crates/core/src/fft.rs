//! Complex 3-D FFT on an `n^3` cube built from 1-D rustfft plans.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse plan pair for cubes of side `n`.
///
/// Plans are immutable and shared; per-call scratch is allocated per worker,
/// so one `Fft3` may be used from many threads at once.
#[derive(Clone)]
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalized `Σ_x a(x) exp(-i m·x 2π/n)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Unnormalized `Σ_m a(m) exp(+i m·x 2π/n)`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let plane = n * n;
        assert_eq!(data.len(), plane * n, "buffer is not an n^3 cube");
        let scratch_len = plan.get_inplace_scratch_len();

        // z lines are contiguous.
        data.par_chunks_mut(plane).for_each_init(
            || vec![Complex64::default(); scratch_len],
            |scratch, chunk| plan.process_with_scratch(chunk, scratch),
        );

        // y lines: transpose each x-plane, transform rows, transpose back.
        data.par_chunks_mut(plane).for_each_init(
            || {
                (
                    vec![Complex64::default(); plane],
                    vec![Complex64::default(); scratch_len],
                )
            },
            |(tmp, scratch), chunk| {
                transpose(chunk, tmp, n);
                plan.process_with_scratch(tmp, scratch);
                transpose(tmp, chunk, n);
            },
        );

        // x lines: view the cube as an n × n² matrix, transpose it in column
        // blocks so both sides stay cache friendly, transform, transpose back.
        let mut gathered = vec![Complex64::default(); plane * n];
        {
            let src: &[Complex64] = data;
            gathered
                .par_chunks_mut(BLOCK * n)
                .enumerate()
                .for_each(|(b, out)| {
                    let jl0 = b * BLOCK;
                    let width = out.len() / n;
                    for i in 0..n {
                        let row = &src[i * plane + jl0..i * plane + jl0 + width];
                        for (k, v) in row.iter().enumerate() {
                            out[k * n + i] = *v;
                        }
                    }
                });
        }
        gathered.par_chunks_mut(plane).for_each_init(
            || vec![Complex64::default(); scratch_len],
            |scratch, chunk| plan.process_with_scratch(chunk, scratch),
        );
        for (b, block) in gathered.chunks(BLOCK * n).enumerate() {
            let jl0 = b * BLOCK;
            let width = block.len() / n;
            for i in 0..n {
                let row = &mut data[i * plane + jl0..i * plane + jl0 + width];
                for (k, v) in row.iter_mut().enumerate() {
                    *v = block[k * n + i];
                }
            }
        }
    }
}

/// Columns moved together in the x-line transpose.
const BLOCK: usize = 16;

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in 0..n {
            dst[c * n + r] = src[r * n + c];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(data: &[Complex64], n: usize, sign: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = Complex64::default();
                    for i in 0..n {
                        for j in 0..n {
                            for l in 0..n {
                                let phase = sign * 2.0 * PI * ((a * i + b * j + c * l) % n) as f64
                                    / n as f64;
                                s += data[(i * n + j) * n + l] * Complex64::from_polar(1.0, phase);
                            }
                        }
                    }
                    out[(a * n + b) * n + c] = s;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let n = 6;
        let data: Vec<Complex64> = (0..n * n * n)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let fft = Fft3::new(n);
        for (sign, inverse) in [(-1.0, false), (1.0, true)] {
            let mut d = data.clone();
            if inverse {
                fft.inverse(&mut d);
            } else {
                fft.forward(&mut d);
            }
            let expect = naive_dft(&data, n, sign);
            for (x, y) in d.iter().zip(&expect) {
                assert!((x - y).norm() < 1e-11, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn round_trip_scales_by_volume() {
        let n = 8;
        let data: Vec<Complex64> = (0..n * n * n)
            .map(|k| Complex64::new(k as f64, -(k as f64) * 0.5))
            .collect();
        let fft = Fft3::new(n);
        let mut d = data.clone();
        fft.forward(&mut d);
        fft.inverse(&mut d);
        let vol = (n * n * n) as f64;
        for (x, y) in d.iter().zip(&data) {
            assert!((x / vol - y).norm() < 1e-10);
        }
    }
}
