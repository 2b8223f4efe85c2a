use nalgebra::DMatrix;

use crate::{Error, Result};

/// Sampled signal on a uniform grid `t_k = t0 + k dt`; `values` is
/// samples x channels. Inputs are interpreted as held constant on
/// `[t_k, t_{k+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    t0: f64,
    dt: f64,
    values: DMatrix<f64>,
}

impl Signal {
    pub fn uniform(dt: f64, values: DMatrix<f64>) -> Result<Self> {
        Self::uniform_from(0.0, dt, values)
    }

    pub fn uniform_from(t0: f64, dt: f64, values: DMatrix<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::dims(format!("grid step must be positive, got {dt}")));
        }
        if !(t0 >= 0.0 && t0.is_finite()) {
            return Err(Error::dims(format!(
                "start time must be nonnegative, got {t0}"
            )));
        }
        Ok(Self { t0, dt, values })
    }

    /// Builds a signal from explicit sample times, which must be strictly
    /// increasing and uniformly spaced.
    pub fn from_samples(times: &[f64], values: DMatrix<f64>) -> Result<Self> {
        if times.len() != values.nrows() {
            return Err(Error::dims(format!(
                "{} sample times for {} samples",
                times.len(),
                values.nrows()
            )));
        }
        if times.len() < 2 {
            return Err(Error::dims(
                "need at least two samples to infer the grid step",
            ));
        }
        let dt = times[1] - times[0];
        for w in times.windows(2) {
            let step = w[1] - w[0];
            if step <= 0.0 {
                return Err(Error::dims("sample times must be strictly increasing"));
            }
            if (step - dt).abs() > 1e-9 * dt.max(1.0) {
                return Err(Error::dims("sample times must be uniformly spaced"));
            }
        }
        Self::uniform_from(times[0], dt, values)
    }

    pub fn zeros(dt: f64, samples: usize, channels: usize) -> Result<Self> {
        Self::uniform(dt, DMatrix::zeros(samples, channels))
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn channels(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    /// `sqrt(sum_k |v_k|^2 dt)`, exact for piecewise-constant signals.
    pub fn l2_norm(&self) -> f64 {
        (self.values.norm_squared() * self.dt).sqrt()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.is_empty() || self.min_value() >= -tol
    }
}
