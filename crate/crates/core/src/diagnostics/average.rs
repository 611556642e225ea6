//! Finite-window long-time averages: trapezoidal in `t` over samples with
//! `t >= spinup`.

use super::DiagnosticsError;

/// Running trapezoidal averages of a fixed number of quantities.
#[derive(Debug, Clone)]
pub struct AverageAccumulator {
    spinup: f64,
    width: usize,
    first: Option<(f64, Vec<f64>)>,
    last: Option<(f64, Vec<f64>)>,
    sums: Vec<f64>,
    count: usize,
}

impl AverageAccumulator {
    pub fn new(spinup: f64, width: usize) -> Self {
        Self {
            spinup,
            width,
            first: None,
            last: None,
            sums: vec![0.0; width],
            count: 0,
        }
    }

    pub fn spinup(&self) -> f64 {
        self.spinup
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Adds a sample; samples before the spinup are ignored. Times must increase.
    pub fn push(&mut self, t: f64, values: &[f64]) {
        assert_eq!(values.len(), self.width, "sample width");
        if t < self.spinup {
            return;
        }
        if let Some((t0, v0)) = &self.last {
            assert!(t > *t0, "sample times must increase");
            let dt = t - t0;
            for ((s, a), b) in self.sums.iter_mut().zip(v0).zip(values) {
                *s += 0.5 * dt * (a + b);
            }
        } else {
            self.first = Some((t, values.to_vec()));
        }
        self.last = Some((t, values.to_vec()));
        self.count += 1;
    }

    /// Window means. A single sample averages to itself.
    pub fn means(&self) -> Result<Vec<f64>, DiagnosticsError> {
        let (Some((t0, v0)), Some((t1, _))) = (&self.first, &self.last) else {
            return Err(DiagnosticsError::EmptyWindow(self.spinup));
        };
        if self.count == 1 {
            return Ok(v0.clone());
        }
        let span = t1 - t0;
        Ok(self.sums.iter().map(|s| s / span).collect())
    }
}

/// Trapezoidal mean of `ys(ts)` over `t >= spinup`.
pub fn time_average(ts: &[f64], ys: &[f64], spinup: f64) -> Result<f64, DiagnosticsError> {
    let mut acc = AverageAccumulator::new(spinup, 1);
    for (&t, &y) in ts.iter().zip(ys) {
        acc.push(t, &[y]);
    }
    Ok(acc.means()?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series() {
        let ts: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let ys = vec![2.5; 10];
        assert!((time_average(&ts, &ys, 0.0).unwrap() - 2.5).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn linear_series_averages_to_midpoint() {
        let ts: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 3.0 * t + 1.0).collect();
        let m = time_average(&ts, &ys, 0.0).unwrap();
        assert!((m - 16.0).abs() < 1e-12);
        let late = time_average(&ts, &ys, 5.0).unwrap();
        assert!((late - 23.5).abs() < 1e-12);
    }

    #[test]
    fn linearity() {
        let ts = [0.0, 0.1, 0.4, 1.0];
        let a = [1.0, -2.0, 0.5, 4.0];
        let b = [0.3, 0.7, 0.2, -1.0];
        let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
        let lhs = time_average(&ts, &ab, 0.0).unwrap();
        let rhs = 2.0 * time_average(&ts, &a, 0.0).unwrap() - 3.0 * time_average(&ts, &b, 0.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn empty_window_is_an_error() {
        assert!(matches!(
            time_average(&[0.0, 1.0], &[1.0, 1.0], 2.0),
            Err(DiagnosticsError::EmptyWindow(_))
        ));
        assert_eq!(time_average(&[0.0, 1.0], &[1.0, 7.0], 1.0).unwrap(), 7.0);
    }
}
