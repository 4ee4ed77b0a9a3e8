//! Bernoulli excursion-sign processes.
//!
//! Each excursion of the underlying path receives an independent ±1 sign:
//! +1 with probability α (constant case), or with probability α_i separately
//! for every schedule interval [t_i, t_{i+1}) the excursion meets
//! (inhomogeneous case). Signs are a pure function of
//! (seed, interval ordinal, excursion ordinal).

use crate::error::{Result, SigmaError};
use crate::excursions::ExcursionDecomposition;
use crate::path::Path;
use crate::rng::keyed_uniform;
use crate::stats::StepFn;

/// Piecewise-constant α: levels in [0,1] on closed-left intervals with the
/// first breakpoint at time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSchedule {
    step: StepFn,
}

impl AlphaSchedule {
    pub fn new(step: StepFn) -> Result<Self> {
        if step.values.iter().any(|&a| !(0.0..=1.0).contains(&a)) {
            return Err(SigmaError::param("alpha", "out of [0,1]"));
        }
        Ok(AlphaSchedule { step })
    }

    pub fn constant(alpha: f64) -> Result<Self> {
        AlphaSchedule::new(StepFn::constant(alpha)?)
    }

    /// Parses `"0:0.3,1:0.8"`.
    pub fn parse(s: &str) -> Result<Self> {
        AlphaSchedule::new(StepFn::parse(s)?)
    }

    pub fn is_constant(&self) -> bool {
        self.step.values.len() == 1
    }

    pub fn alpha_at(&self, t: f64) -> f64 {
        self.step.value_at(t)
    }

    pub fn interval_index(&self, t: f64) -> usize {
        self.step.interval_index(t)
    }

    pub fn levels(&self) -> &[f64] {
        &self.step.values
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.step.times
    }
}

/// The drawn sign ζ^i_n for schedule interval `i`, excursion `n`.
#[inline]
pub fn zeta(seed: u64, interval: usize, excursion: usize, alpha: f64) -> i8 {
    if keyed_uniform(seed, interval as u64, excursion as u64) < alpha {
        1
    } else {
        -1
    }
}

/// A realization of Z^α (or its inhomogeneous variant) on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SignPath {
    /// Per-index sign in {−1, 0, +1}; 0 exactly on the zero mask.
    pub values: Vec<i8>,
    /// Drawn signs as (excursion n, schedule interval i, ζ) rows.
    pub excursion_signs: Vec<(usize, usize, i8)>,
    pub schedule: AlphaSchedule,
    pub seed: u64,
}

/// Constant-α sign process: one ζ_n per excursion (Bernoulli(α) on +1).
pub fn sample_z_alpha(
    dec: &ExcursionDecomposition,
    alpha: f64,
    seed: u64,
) -> Result<SignPath> {
    sample_z_alpha_schedule(dec, &AlphaSchedule::constant(alpha)?, seed)
}

/// Inhomogeneous sign process: independent ζ^i_n per (interval, excursion);
/// the sign may switch inside one excursion at a schedule breakpoint.
pub fn sample_z_alpha_schedule(
    dec: &ExcursionDecomposition,
    schedule: &AlphaSchedule,
    seed: u64,
) -> Result<SignPath> {
    let n = dec.len();
    let mut values = vec![0i8; n];
    for j in 0..n {
        if dec.zero_mask[j] {
            continue;
        }
        let owner = dec
            .sign_owner(j)
            .expect("nonzero indices belong to an excursion");
        let i = schedule.interval_index(dec.time(j));
        values[j] = zeta(seed, i, owner, schedule.levels()[i]);
    }
    let mut excursion_signs = Vec::new();
    for (n_exc, e) in dec.intervals.iter().enumerate() {
        let lo = schedule.interval_index(dec.time(e.g));
        let hi = schedule.interval_index(dec.time(e.d));
        for i in lo..=hi {
            excursion_signs.push((n_exc, i, zeta(seed, i, n_exc, schedule.levels()[i])));
        }
    }
    Ok(SignPath {
        values,
        excursion_signs,
        schedule: schedule.clone(),
        seed,
    })
}

/// Closed-left/open-right companion k_t = Σ ζ_n 1_{[g_n, d_n)}: each left
/// endpoint g_n carries its excursion's sign, so k_{γ_t}·x_t = Z_t·x_t
/// pointwise on the grid.
pub fn to_cadlag_k(sp: &SignPath, dec: &ExcursionDecomposition) -> Path {
    let values = (0..dec.len())
        .map(|j| match dec.cadlag_owner(j) {
            Some(owner) => {
                let i = sp.schedule.interval_index(dec.time(j));
                zeta(sp.seed, i, owner, sp.schedule.levels()[i]) as f64
            }
            None => 0.0,
        })
        .collect();
    Path {
        t0: dec.t0,
        dt: dec.dt,
        values,
        label: "cadlag-k".to_string(),
    }
}
