//! Candidate weak solutions of the skew Brownian motion equation, built by
//! flipping excursion signs of a class-(Σ) source — directly when the
//! martingale part is already a Brownian clock, or after the
//! quadratic-variation time change otherwise.

use crate::error::{Result, SigmaError};
use crate::excursions::{decompose_process, ExcursionDecomposition};
use crate::path::Path;
use crate::process::{make_sigma_process, time_change, ProcessKind, SigmaProcess};
use crate::rng::{derive_key, STREAM_PATH, STREAM_SIGN};
use crate::sign::{sample_z_alpha_schedule, AlphaSchedule, SignPath};
use crate::stats::StepFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Direct,
    TimeChanged,
}

/// A constructed solution Y = Z·X with its source and sign realization.
///
/// `source` is the process the signs were drawn on: the original one for the
/// direct construction, its time-changed image otherwise, so that
/// |y| = source.x holds pointwise exactly in both cases.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewSolution {
    pub y: Path,
    pub source: SigmaProcess,
    pub dec: ExcursionDecomposition,
    pub sign: SignPath,
    pub schedule: AlphaSchedule,
    pub construction: Construction,
}

/// Relative slack allowed between the realized clock and the identity before
/// a source is rejected as non-Brownian.
const QV_CLOCK_SLACK: f64 = 0.05;

/// Flips excursion signs without the Brownian-clock precondition. Useful for
/// membership tests, where only the local-martingale property of Z·X matters
/// and the clock may be arbitrary.
pub fn flip_signs(
    src: SigmaProcess,
    schedule: &AlphaSchedule,
    seed: u64,
    construction: Construction,
) -> Result<SkewSolution> {
    let dec = decompose_process(&src)?;
    let sign = sample_z_alpha_schedule(&dec, schedule, seed)?;
    let values = sign
        .values
        .iter()
        .zip(&src.x.values)
        .map(|(&z, &x)| z as f64 * x)
        .collect();
    let y = Path {
        t0: src.x.t0,
        dt: src.x.dt,
        values,
        label: format!("skew({})", src.x.label),
    };
    Ok(SkewSolution {
        y,
        source: src,
        dec,
        sign,
        schedule: schedule.clone(),
        construction,
    })
}

/// Direct construction Y = Z^α X: requires the source's martingale part to
/// run on (approximately) the identity clock.
pub fn build_direct(src: SigmaProcess, schedule: &AlphaSchedule, seed: u64) -> Result<SkewSolution> {
    let horizon = src.x.terminal_time() - src.x.t0;
    let attained = src.qv.terminal_value();
    // Realized QV of an honest Brownian driver fluctuates around the
    // horizon with standard deviation sqrt(2·dt·horizon); allow 6 sigma of
    // sampling noise on top of the systematic slack so that only genuinely
    // scaled clocks are rejected.
    let noise = 6.0 * (2.0 * src.x.dt * horizon).sqrt();
    if (attained - horizon).abs() > QV_CLOCK_SLACK * horizon + noise {
        return Err(SigmaError::NotBrownianDriver { attained, horizon });
    }
    flip_signs(src, schedule, seed, Construction::Direct)
}

/// General construction: time-change the source onto the Brownian clock
/// first, then decompose the time-changed path and draw signs on ITS
/// excursions (the order is essential).
pub fn build_time_changed(
    src: &SigmaProcess,
    schedule: &AlphaSchedule,
    seed: u64,
    horizon: f64,
) -> Result<SkewSolution> {
    let tc = time_change(src, horizon)?;
    flip_signs(tc, schedule, seed, Construction::TimeChanged)
}

/// Cumulative drift D_t = Σ (2α(t_{j-1}) − 1)·ΔL_j accumulated against a
/// nondecreasing local-time estimate, with α read at the left endpoint of
/// each grid cell.
pub fn drift_ledger(schedule: &AlphaSchedule, lt: &Path) -> Result<Path> {
    if lt.values.windows(2).any(|w| w[1] < w[0]) {
        return Err(SigmaError::param("lt", "must be nondecreasing"));
    }
    let mut values = Vec::with_capacity(lt.len());
    values.push(0.0);
    let mut acc = 0.0;
    for j in 1..lt.len() {
        let alpha = schedule.alpha_at(lt.time(j - 1));
        acc += (2.0 * alpha - 1.0) * (lt.values[j] - lt.values[j - 1]);
        values.push(acc);
    }
    Ok(Path {
        t0: lt.t0,
        dt: lt.dt,
        values,
        label: "drift-ledger".to_string(),
    })
}

impl SkewSolution {
    pub fn drift_ledger(&self, lt: &Path) -> Result<Path> {
        drift_ledger(&self.schedule, lt)
    }
}

/// Everything needed to rebuild one replicate of a campaign.
#[derive(Debug, Clone)]
pub struct BuildSpec {
    pub kind: ProcessKind,
    pub n_steps: usize,
    pub dt: f64,
    pub sigma: Option<StepFn>,
    pub schedule: AlphaSchedule,
    pub construction: Construction,
    /// New-clock horizon for the time-changed construction.
    pub horizon: f64,
}

/// Builds replicate `r`: the driver path and the excursion signs draw their
/// seeds from disjoint streams of the master seed, so replicates are
/// independent and order-insensitive.
pub fn build_replicate(spec: &BuildSpec, master_seed: u64, r: u64) -> Result<SkewSolution> {
    let path_seed = derive_key(master_seed, STREAM_PATH, r);
    let sign_seed = derive_key(master_seed, STREAM_SIGN, r);
    let src = make_sigma_process(spec.kind, spec.n_steps, spec.dt, path_seed, spec.sigma.as_ref())?;
    match spec.construction {
        Construction::Direct => build_direct(src, &spec.schedule, sign_seed),
        Construction::TimeChanged => {
            build_time_changed(&src, &spec.schedule, sign_seed, spec.horizon)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs_bm(n_steps: usize, dt: f64, seed: u64) -> SigmaProcess {
        make_sigma_process(ProcessKind::AbsBm, n_steps, dt, seed, None).unwrap()
    }

    #[test]
    fn alpha_one_reproduces_the_reflected_path() {
        let src = abs_bm(1024, 1.0 / 1024.0, 5);
        let sol = build_direct(src.clone(), &AlphaSchedule::constant(1.0).unwrap(), 9).unwrap();
        assert_eq!(sol.y.values, src.x.values);
    }

    #[test]
    fn magnitude_matches_the_source_bit_exactly() {
        for seed in [1u64, 2, 3] {
            let sol = build_direct(
                abs_bm(2048, 1.0 / 2048.0, seed),
                &AlphaSchedule::constant(0.7).unwrap(),
                seed + 100,
            )
            .unwrap();
            for (y, x) in sol.y.values.iter().zip(&sol.source.x.values) {
                assert_eq!(y.abs(), *x);
            }
        }
    }

    #[test]
    fn direct_rejects_a_scaled_clock() {
        let sigma = StepFn::constant(2.0).unwrap();
        let src = make_sigma_process(ProcessKind::ScaledAbs, 512, 1.0 / 512.0, 4, Some(&sigma))
            .unwrap();
        match build_direct(src, &AlphaSchedule::constant(0.5).unwrap(), 1) {
            Err(SigmaError::NotBrownianDriver { attained, horizon }) => {
                assert!((attained - 4.0).abs() < 1e-9);
                assert!((horizon - 1.0).abs() < 1e-9);
            }
            other => panic!("expected clock rejection, got {other:?}"),
        }
    }

    #[test]
    fn unit_sigma_time_change_equals_the_direct_build() {
        let sigma = StepFn::constant(1.0).unwrap();
        let schedule = AlphaSchedule::constant(0.7).unwrap();
        let src = make_sigma_process(ProcessKind::ScaledAbs, 1024, 1.0 / 1024.0, 8, Some(&sigma))
            .unwrap();
        let direct = build_direct(src.clone(), &schedule, 42).unwrap();
        let tc = build_time_changed(&src, &schedule, 42, 1.0).unwrap();
        assert_eq!(direct.y.values, tc.y.values);
        assert_eq!(direct.sign.values, tc.sign.values);
    }

    #[test]
    fn occupation_fraction_tracks_alpha() {
        // Light binomial check: 20,000 replicates, 512 steps, alpha = 0.7;
        // 3-sigma of the positive fraction is just under 0.01.
        let spec = BuildSpec {
            kind: ProcessKind::AbsBm,
            n_steps: 512,
            dt: 1.0 / 512.0,
            sigma: None,
            schedule: AlphaSchedule::constant(0.7).unwrap(),
            construction: Construction::Direct,
            horizon: 1.0,
        };
        let n = 20_000u64;
        let (mut pos, mut nonzero) = (0u64, 0u64);
        for r in 0..n {
            let sol = build_replicate(&spec, 7171, r).unwrap();
            let v = sol.y.terminal_value();
            if v != 0.0 {
                nonzero += 1;
                if v > 0.0 {
                    pos += 1;
                }
            }
        }
        let frac = pos as f64 / nonzero as f64;
        assert!((frac - 0.7).abs() < 0.012, "positive fraction {frac}");
    }

    #[test]
    fn time_changed_occupation_tracks_alpha_for_scaled_clock() {
        // sigma = 2 quadruples the clock; signs are drawn on the
        // time-changed excursions, so the law at the new-clock time 1 keeps
        // P(Y > 0) = alpha.
        let spec = BuildSpec {
            kind: ProcessKind::ScaledAbs,
            n_steps: 2048,
            dt: 1.0 / 512.0,
            sigma: Some(StepFn::constant(2.0).unwrap()),
            schedule: AlphaSchedule::constant(0.7).unwrap(),
            construction: Construction::TimeChanged,
            horizon: 1.0,
        };
        let n = 10_000u64;
        let (mut pos, mut nonzero) = (0u64, 0u64);
        for r in 0..n {
            let sol = build_replicate(&spec, 8282, r).unwrap();
            let v = sol.y.terminal_value();
            if v != 0.0 {
                nonzero += 1;
                if v > 0.0 {
                    pos += 1;
                }
            }
        }
        let frac = pos as f64 / nonzero as f64;
        assert!((frac - 0.7).abs() < 0.016, "positive fraction {frac}");
    }

    #[test]
    fn drift_ledger_degenerate_alphas() {
        let lt = Path::new(0.0, 0.5, vec![0.0, 0.3, 0.3, 0.9, 1.0], "lt").unwrap();
        let half = drift_ledger(&AlphaSchedule::constant(0.5).unwrap(), &lt).unwrap();
        assert!(half.values.iter().all(|&v| v == 0.0));
        let one = drift_ledger(&AlphaSchedule::constant(1.0).unwrap(), &lt).unwrap();
        for (d, l) in one.values.iter().zip(&lt.values) {
            assert!((d - l).abs() < 1e-12);
        }
    }

    #[test]
    fn drift_ledger_splits_at_the_breakpoint() {
        // Schedule {0:0.3, 1:0.8}: D_2 = -0.4 L_1 + 0.6 (L_2 - L_1).
        let dt = 0.25;
        let lt_vals: Vec<f64> = (0..=8).map(|i| (i as f64 * dt).sqrt()).collect();
        let lt = Path::new(0.0, dt, lt_vals.clone(), "lt").unwrap();
        let schedule = AlphaSchedule::parse("0:0.3,1:0.8").unwrap();
        let d = drift_ledger(&schedule, &lt).unwrap();
        let l1 = lt_vals[4];
        let l2 = lt_vals[8];
        assert!((d.values[4] - (-0.4 * l1)).abs() < 1e-12);
        assert!((d.values[8] - (-0.4 * l1 + 0.6 * (l2 - l1))).abs() < 1e-12);
    }

    #[test]
    fn drift_ledger_rejects_decreasing_input() {
        let lt = Path::new(0.0, 1.0, vec![0.0, 0.5, 0.4], "bad").unwrap();
        assert!(drift_ledger(&AlphaSchedule::constant(0.7).unwrap(), &lt).is_err());
    }

    #[test]
    fn replicates_are_deterministic_and_distinct() {
        let spec = BuildSpec {
            kind: ProcessKind::AbsBm,
            n_steps: 256,
            dt: 1.0 / 256.0,
            sigma: None,
            schedule: AlphaSchedule::constant(0.7).unwrap(),
            construction: Construction::Direct,
            horizon: 1.0,
        };
        let a = build_replicate(&spec, 1, 0).unwrap();
        let b = build_replicate(&spec, 1, 0).unwrap();
        assert_eq!(a.y.values, b.y.values);
        let c = build_replicate(&spec, 1, 1).unwrap();
        assert_ne!(a.y.values, c.y.values);
    }

    #[test]
    fn sign_independence_from_magnitude() {
        // Same driver, different sign seeds: magnitudes agree, signs differ.
        let src = abs_bm(512, 1.0 / 512.0, 10);
        let schedule = AlphaSchedule::constant(0.5).unwrap();
        let a = build_direct(src.clone(), &schedule, 1).unwrap();
        let b = build_direct(src, &schedule, 2).unwrap();
        assert_ne!(a.y.values, b.y.values);
        for (u, v) in a.y.values.iter().zip(&b.y.values) {
            assert_eq!(u.abs(), v.abs());
        }
    }
}
