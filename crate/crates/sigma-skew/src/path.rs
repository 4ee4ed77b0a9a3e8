//! Discretized sample paths on a uniform time grid.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SigmaError};
use crate::rng::{keyed_rng, STREAM_PATH};

/// A sample path on the uniform grid `t0 + i * dt`, `i = 0..=n_steps`.
///
/// The grid is implicit: only `t0` and `dt` are stored, never per-sample
/// times.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
    pub label: String,
}

impl Path {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if !t0.is_finite() {
            return Err(SigmaError::param("t0", "must be finite"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(SigmaError::param("dt", format!("must be positive and finite, got {dt}")));
        }
        if values.is_empty() {
            return Err(SigmaError::param("values", "must be nonempty"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(SigmaError::param("values", format!("non-finite sample {v}")));
        }
        Ok(Path { t0, dt, values, label: label.into() })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of grid cells (`len() - 1`).
    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn terminal_time(&self) -> f64 {
        self.time(self.n_steps())
    }

    pub fn terminal_value(&self) -> f64 {
        *self.values.last().expect("paths are nonempty")
    }

    /// Grid index closest to time `t`.
    pub fn index_at(&self, t: f64) -> Result<usize> {
        let raw = (t - self.t0) / self.dt;
        let i = raw.round();
        if i < 0.0 || i as usize >= self.len() {
            return Err(SigmaError::IndexOutOfRange {
                index: i.max(0.0) as usize,
                len: self.len(),
            });
        }
        Ok(i as usize)
    }

    /// True when the grids of `self` and `other` coincide.
    pub fn same_grid(&self, other: &Path) -> bool {
        self.t0 == other.t0 && self.dt == other.dt && self.len() == other.len()
    }
}

/// Generates a standard Brownian path: `values[0] = 0`, i.i.d. Gaussian
/// increments of variance `dt`, fully determined by the seed.
pub fn generate_bm(n_steps: usize, dt: f64, seed: u64) -> Result<Path> {
    if n_steps < 1 {
        return Err(SigmaError::param("n_steps", "must be at least 1"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(SigmaError::param("dt", format!("must be positive and finite, got {dt}")));
    }
    let mut rng = keyed_rng(seed, STREAM_PATH, 0);
    let scale = dt.sqrt();
    let mut values = Vec::with_capacity(n_steps + 1);
    values.push(0.0);
    let mut acc = 0.0;
    for _ in 0..n_steps {
        let z: f64 = rng.sample(StandardNormal);
        acc += z * scale;
        values.push(acc);
    }
    Path::new(0.0, dt, values, format!("bm(seed={seed})"))
}

/// Cumulative sum of squared increments; zero at index 0, nondecreasing.
pub fn realized_qv(p: &Path) -> Path {
    let mut values = Vec::with_capacity(p.len());
    values.push(0.0);
    let mut acc = 0.0;
    for w in p.values.windows(2) {
        let d = w[1] - w[0];
        acc += d * d;
        values.push(acc);
    }
    Path {
        t0: p.t0,
        dt: p.dt,
        values,
        label: format!("qv({})", p.label),
    }
}
