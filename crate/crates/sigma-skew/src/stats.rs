//! Numerical helpers shared by the verification harness.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Result, SigmaError};

/// Compensated (Kahan) summation.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in iter {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

pub fn mean(xs: &[f64]) -> f64 {
    kahan_sum(xs.iter().copied()) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    kahan_sum(xs.iter().map(|&x| (x - m) * (x - m))) / (xs.len() as f64 - 1.0)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaNs in statistics"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
}

/// Two-sided Kolmogorov-Smirnov distance between the sample and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaNs in KS samples"));
    let n = v.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    sup
}

/// Asymptotic KS critical value `c(level) / sqrt(n)` with
/// `c(level) = sqrt(-ln(level / 2) / 2)`; `c(0.01) = 1.6276`.
pub fn ks_critical(level: f64, n: usize) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// CDF of the skew Brownian motion marginal at time `t`, parameter `alpha`,
/// started at 0: mass `1 - alpha` folded onto the negative axis and `alpha`
/// onto the positive axis.
pub fn skew_bm_cdf(y: f64, alpha: f64, t: f64) -> f64 {
    let phi = normal_cdf(y / t.sqrt());
    if y <= 0.0 {
        2.0 * (1.0 - alpha) * phi
    } else {
        (1.0 - alpha) + alpha * (2.0 * phi - 1.0)
    }
}

/// Outcome of regressing ensemble increments on `(1, level)`.
pub struct IncrementRegression {
    pub t_intercept: f64,
    pub t_slope: Option<f64>,
}

/// Cross-sectional OLS of `dy` on `(1, y)` with normal-approximation
/// t-statistics. Falls back to an intercept-only mean test when the
/// regressor is degenerate (e.g. all paths start at the same level).
pub fn increment_regression(y: &[f64], dy: &[f64]) -> IncrementRegression {
    let n = y.len() as f64;
    let my = mean(y);
    let md = mean(dy);
    let sxx = kahan_sum(y.iter().map(|&v| (v - my) * (v - my)));
    if sxx <= f64::EPSILON * n * my * my + f64::MIN_POSITIVE {
        // Degenerate regressor: test the increment mean only.
        let var = kahan_sum(dy.iter().map(|&v| (v - md) * (v - md))) / (n - 1.0);
        let se = (var / n).sqrt();
        let t = if se == 0.0 {
            if md == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            md / se
        };
        return IncrementRegression { t_intercept: t, t_slope: None };
    }
    let sxy = kahan_sum(y.iter().zip(dy).map(|(&a, &b)| (a - my) * (b - md)));
    let slope = sxy / sxx;
    let intercept = md - slope * my;
    let rss = kahan_sum(
        y.iter()
            .zip(dy)
            .map(|(&a, &b)| {
                let r = b - intercept - slope * a;
                r * r
            }),
    );
    let s2 = rss / (n - 2.0);
    let se_slope = (s2 / sxx).sqrt();
    let se_intercept = (s2 * (1.0 / n + my * my / sxx)).sqrt();
    let tb = |est: f64, se: f64| {
        if se == 0.0 {
            if est == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            est / se
        }
    };
    IncrementRegression {
        t_intercept: tb(intercept, se_intercept),
        t_slope: Some(tb(slope, se_slope)),
    }
}

/// A piecewise-constant function of time, closed-left intervals
/// `[t_i, t_{i+1})`, first breakpoint at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFn {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepFn {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(SigmaError::param("step function", "must have at least one piece"));
        }
        if pairs[0].0 != 0.0 {
            return Err(SigmaError::param("step function", "first breakpoint must be 0"));
        }
        for w in pairs.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(SigmaError::param("step function", "breakpoints must be strictly increasing"));
            }
        }
        if pairs.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(SigmaError::param("step function", "entries must be finite"));
        }
        let (times, values) = pairs.into_iter().unzip();
        Ok(StepFn { times, values })
    }

    pub fn constant(v: f64) -> Result<Self> {
        StepFn::new(vec![(0.0, v)])
    }

    /// Index of the interval containing `t` (clamped below by the first).
    pub fn interval_index(&self, t: f64) -> usize {
        match self.times.iter().rposition(|&b| b <= t) {
            Some(i) => i,
            None => 0,
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.values[self.interval_index(t)]
    }

    /// Parses `"0:1,1:-1"` into time:value pieces.
    pub fn parse(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for piece in s.split(',') {
            let (t, v) = piece
                .split_once(':')
                .ok_or_else(|| SigmaError::param("step function", format!("expected time:value, got `{piece}`")))?;
            let t: f64 = t
                .trim()
                .parse()
                .map_err(|_| SigmaError::param("step function", format!("bad time `{t}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| SigmaError::param("step function", format!("bad value `{v}`")))?;
            pairs.push((t, v));
        }
        StepFn::new(pairs)
    }
}
