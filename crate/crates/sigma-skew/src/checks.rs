//! Statistical verification of the constructed solutions.
//!
//! Every test consumes a replicate generator `r -> result` instead of a
//! materialized ensemble, so campaigns of hundreds of thousands of paths run
//! in bounded memory. Generators are pure functions of the replicate index;
//! per-path summaries are extracted in parallel and aggregated sequentially
//! in replicate order, which makes every statistic independent of the thread
//! count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SigmaError};
use crate::excursions::decompose_process;
use crate::local_time::{default_eps, lt_band, lt_tanaka, LocalTimeEstimate, LtMethod};
use crate::path::{realized_qv, Path};
use crate::process::SigmaProcess;
use crate::sign::AlphaSchedule;
use crate::skew::{drift_ledger, SkewSolution};
use crate::stats::{
    increment_regression, kahan_sum, ks_critical, ks_statistic, median, normal_quantile,
    skew_bm_cdf, StepFn,
};

/// Outcome of one named statistical test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub p_value: Option<f64>,
    pub pass: bool,
    pub n_paths: u64,
    pub n_steps: usize,
    pub seed: u64,
    pub notes: String,
}

impl TestReport {
    fn distance(
        name: &str,
        statistic: f64,
        threshold: f64,
        n_paths: u64,
        n_steps: usize,
        seed: u64,
        notes: String,
    ) -> TestReport {
        TestReport {
            name: name.to_string(),
            statistic,
            threshold,
            p_value: None,
            pass: statistic <= threshold,
            n_paths,
            n_steps,
            seed,
            notes,
        }
    }
}

/// Generates all per-replicate summaries in parallel, preserving replicate
/// order.
fn collect_summaries<S, F>(n_paths: u64, f: F) -> Result<Vec<S>>
where
    S: Send,
    F: Fn(u64) -> Result<S> + Sync + Send,
{
    (0..n_paths).into_par_iter().map(f).collect()
}

struct MartingaleSummary {
    boundary_values: Vec<f64>,
    boundary_qv: Vec<f64>,
}

/// Cross-sectional martingale test: at each block boundary the forward
/// increment is regressed on (1, current level) across the ensemble; all
/// intercepts and slopes are tested jointly zero with a Bonferroni-corrected
/// normal threshold. The linearity of the ensemble-mean realized quadratic
/// variation is recorded in the notes but does not gate the verdict.
pub fn martingale_increment_test<F>(
    name: &str,
    n_paths: u64,
    gen: F,
    block: usize,
    level: f64,
    seed: u64,
) -> Result<TestReport>
where
    F: Fn(u64) -> Result<Path> + Sync,
{
    if n_paths < 1_000 {
        return Err(SigmaError::param("n_paths", "martingale test needs at least 1000 paths"));
    }
    if block < 1 {
        return Err(SigmaError::param("block", "must be at least 1"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(SigmaError::param("level", "must be in (0,1)"));
    }
    let summaries = collect_summaries(n_paths, |r| {
        let p = gen(r)?;
        if p.n_steps() % block != 0 {
            return Err(SigmaError::param("block", "must divide the number of steps"));
        }
        let qv = realized_qv(&p);
        let idx: Vec<usize> = (0..=p.n_steps() / block).map(|k| k * block).collect();
        Ok(MartingaleSummary {
            boundary_values: idx.iter().map(|&i| p.values[i]).collect(),
            boundary_qv: idx.iter().map(|&i| qv.values[i]).collect(),
        })
    })?;
    let nb = summaries[0].boundary_values.len();
    if summaries.iter().any(|s| s.boundary_values.len() != nb) {
        return Err(SigmaError::Misaligned("replicates disagree on the grid".into()));
    }
    let n_steps = (nb - 1) * block;

    let mut max_t = 0.0f64;
    let mut m = 0usize;
    for b in 0..nb - 1 {
        let y: Vec<f64> = summaries.iter().map(|s| s.boundary_values[b]).collect();
        let dy: Vec<f64> = summaries
            .iter()
            .map(|s| s.boundary_values[b + 1] - s.boundary_values[b])
            .collect();
        let reg = increment_regression(&y, &dy);
        max_t = max_t.max(reg.t_intercept.abs());
        m += 1;
        if let Some(t) = reg.t_slope {
            max_t = max_t.max(t.abs());
            m += 1;
        }
    }
    let threshold = normal_quantile(1.0 - level / (2.0 * m as f64));

    // Ensemble-mean realized QV against the best linear-through-origin fit.
    let n = n_paths as f64;
    let mean_qv: Vec<f64> = (0..nb)
        .map(|b| kahan_sum(summaries.iter().map(|s| s.boundary_qv[b])) / n)
        .collect();
    let slope = mean_qv[nb - 1] / (nb - 1) as f64;
    let qv_dev = (1..nb)
        .map(|b| {
            let fit = slope * b as f64;
            if fit == 0.0 {
                0.0
            } else {
                ((mean_qv[b] - fit) / fit).abs()
            }
        })
        .fold(0.0f64, f64::max);

    Ok(TestReport {
        name: name.to_string(),
        statistic: max_t,
        threshold,
        p_value: None,
        pass: max_t <= threshold,
        n_paths,
        n_steps,
        seed,
        notes: format!(
            "max |t| over {m} coefficients at {} boundaries, Bonferroni level {level}; \
             max relative QV nonlinearity {qv_dev:.4}",
            nb - 1
        ),
    })
}

/// Testable implication of class-(Σ) membership: the α = 1/2 excursion flip
/// of the process must be a local martingale.
pub fn sigma_membership_test<F>(
    name: &str,
    n_paths: u64,
    gen: F,
    block: usize,
    level: f64,
    seed: u64,
) -> Result<TestReport>
where
    F: Fn(u64) -> Result<SkewSolution> + Sync,
{
    martingale_increment_test(name, n_paths, |r| Ok(gen(r)?.y), block, level, seed)
}

/// Compares the empirical positive fraction of y_t (among nonzero samples)
/// with α(t) at each requested time; the statistic is the worst deviation.
pub fn occupation_probability_test<F>(
    name: &str,
    n_paths: u64,
    gen: F,
    schedule: &AlphaSchedule,
    times: &[f64],
    tol: f64,
    seed: u64,
) -> Result<TestReport>
where
    F: Fn(u64) -> Result<Path> + Sync,
{
    if times.is_empty() {
        return Err(SigmaError::param("times", "must be nonempty"));
    }
    let summaries = collect_summaries(n_paths, |r| {
        let p = gen(r)?;
        times
            .iter()
            .map(|&t| {
                let v = p.values[p.index_at(t)?];
                Ok((v != 0.0, v > 0.0))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut n_steps = 0;
    if let Ok(p) = gen(0) {
        n_steps = p.n_steps();
    }
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let nonzero = summaries.iter().filter(|s| s[k].0).count();
        let pos = summaries.iter().filter(|s| s[k].1).count();
        if nonzero < 100 {
            return Err(SigmaError::TooFewSamples { t, count: nonzero });
        }
        let frac = pos as f64 / nonzero as f64;
        let dev = (frac - schedule.alpha_at(t)).abs();
        worst = worst.max(dev);
        notes.push(format!("t={t}: frac={frac:.4} vs alpha={}", schedule.alpha_at(t)));
    }
    Ok(TestReport::distance(name, worst, tol, n_paths, n_steps, seed, notes.join("; ")))
}

/// Two-sided KS test of the terminal marginal against the constant-α skew
/// Brownian motion law.
pub fn skew_marginal_ks_test<F>(
    name: &str,
    n_paths: u64,
    gen: F,
    alpha: f64,
    t: f64,
    level: f64,
    seed: u64,
) -> Result<TestReport>
where
    F: Fn(u64) -> Result<Path> + Sync,
{
    if !(0.0..=1.0).contains(&alpha) {
        return Err(SigmaError::param("alpha", "out of [0,1]"));
    }
    let samples = collect_summaries(n_paths, |r| {
        let p = gen(r)?;
        Ok(p.values[p.index_at(t)?])
    })?;
    let mut n_steps = 0;
    if let Ok(p) = gen(0) {
        n_steps = p.n_steps();
    }
    let stat = ks_statistic(&samples, |y| skew_bm_cdf(y, alpha, t));
    let threshold = ks_critical(level, samples.len());
    Ok(TestReport::distance(
        name,
        stat,
        threshold,
        n_paths,
        n_steps,
        seed,
        format!("KS vs skew-BM CDF (alpha={alpha}, t={t}) at level {level}"),
    ))
}

/// Local-time estimate used inside the SDE-residual and balayage tests.
///
/// The estimate is clocked by the SOURCE of the construction: the band reads
/// |y| (= source x) against the source's bracket increments, the Tanaka
/// residual reads the source's signed companion. The sign flip leaves the
/// level-0 local time unchanged, while the flipped path's own squared
/// increments systematically under-measure the bracket near its zeros.
fn source_local_time(
    src: &SigmaProcess,
    method: LtMethod,
    eps: Option<f64>,
) -> Result<LocalTimeEstimate> {
    match method {
        LtMethod::Band => {
            let eps = eps.unwrap_or_else(|| default_eps(src.x.dt, src.qv.terminal_value()));
            lt_band(&src.x, &src.qv, eps)
        }
        LtMethod::Tanaka => {
            let signed = src.signed.as_ref().ok_or_else(|| {
                SigmaError::Degenerate("tanaka local time needs a signed companion path".into())
            })?;
            Ok(lt_tanaka(signed))
        }
    }
}

/// Residual check of the skew SDE: W = Y − ∫(2α−1)dL̂ must start at 0, carry
/// a unit-rate clock, and be Gaussian at the horizon. The statistic is the
/// worst component expressed as a fraction of its own tolerance (pass ⇔ ≤ 1).
#[allow(clippy::too_many_arguments)]
pub fn sde_residual_test<F>(
    name: &str,
    n_paths: u64,
    gen: F,
    lt_method: LtMethod,
    eps: Option<f64>,
    tol_qv: f64,
    level: f64,
    seed: u64,
) -> Result<TestReport>
where
    F: Fn(u64) -> Result<SkewSolution> + Sync,
{
    if !(tol_qv > 0.0) {
        return Err(SigmaError::param("tol_qv", "must be positive"));
    }
    let summaries = collect_summaries(n_paths, |r| {
        let sol = gen(r)?;
        let lt = source_local_time(&sol.source, lt_method, eps)?;
        let d = drift_ledger(&sol.schedule, &lt.lt)?;
        if !d.same_grid(&sol.y) {
            return Err(SigmaError::Misaligned("drift ledger off the solution grid".into()));
        }
        let w = Path {
            t0: sol.y.t0,
            dt: sol.y.dt,
            values: sol
                .y
                .values
                .iter()
                .zip(&d.values)
                .map(|(&y, &dv)| y - dv)
                .collect(),
            label: "residual".to_string(),
        };
        let horizon = w.terminal_time() - w.t0;
        Ok((w.values[0], realized_qv(&w).terminal_value(), w.terminal_value(), horizon, w.n_steps()))
    })?;
    let horizon = summaries[0].3;
    let n_steps = summaries[0].4;
    let w0_max = summaries.iter().map(|s| s.0.abs()).fold(0.0f64, f64::max);
    let mean_qv = kahan_sum(summaries.iter().map(|s| s.1)) / n_paths as f64;
    let terminals: Vec<f64> = summaries.iter().map(|s| s.2).collect();
    let ks = ks_statistic(&terminals, |y| {
        crate::stats::normal_cdf(y / horizon.sqrt())
    });
    let ks_crit = ks_critical(level, terminals.len());

    let start_ratio = if w0_max == 0.0 { 0.0 } else { f64::INFINITY };
    let qv_ratio = (mean_qv - horizon).abs() / (tol_qv * horizon);
    let ks_ratio = ks / ks_crit;
    let statistic = start_ratio.max(qv_ratio).max(ks_ratio);
    Ok(TestReport::distance(
        name,
        statistic,
        1.0,
        n_paths,
        n_steps,
        seed,
        format!(
            "components as tolerance fractions: start {start_ratio:.3}, \
             qv {qv_ratio:.3} (mean qv {mean_qv:.4} vs horizon {horizon}), \
             ks {ks_ratio:.3} (D={ks:.5}, crit={ks_crit:.5})"
        ),
    ))
}

/// Azéma–Yor style multiplicative identity for nonnegative sources:
/// with M = (1 + x)·e^{−L̂} and I its running infimum, M/I − 1 must
/// reproduce x. The statistic is the ensemble median of the pathwise
/// sup-error.
pub fn azema_yor_identity_test<F>(
    name: &str,
    n_paths: u64,
    gen: F,
    tol: f64,
    seed: u64,
) -> Result<TestReport>
where
    F: Fn(u64) -> Result<(Path, Path)> + Sync,
{
    let sups = collect_summaries(n_paths, |r| {
        let (x, lt) = gen(r)?;
        if !x.same_grid(&lt) {
            return Err(SigmaError::Misaligned("x and local time off one grid".into()));
        }
        let mut inf = f64::INFINITY;
        let mut sup_err = 0.0f64;
        for (&xv, &lv) in x.values.iter().zip(&lt.values) {
            let m = (1.0 + xv) * (-lv).exp();
            inf = inf.min(m);
            sup_err = sup_err.max((m / inf - 1.0 - xv).abs());
        }
        Ok(sup_err)
    })?;
    let mut n_steps = 0;
    if let Ok((x, _)) = gen(0) {
        n_steps = x.n_steps();
    }
    Ok(TestReport::distance(
        name,
        median(&sups),
        tol,
        n_paths,
        n_steps,
        seed,
        "median over paths of sup_t |M_t/I_t - 1 - x_t|".to_string(),
    ))
}

/// The two shipped transform pairs (f, F) with F' = f.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// f ≡ 1, F(a) = a: tests x_t − A_t (the Tanaka martingale for |B|).
    One,
    /// f(a) = e^{−a}, F(a) = 1 − e^{−a}: tests e^{−A}(x + 1) − 1.
    ExpNeg,
}

impl Transform {
    pub fn f(self, a: f64) -> f64 {
        match self {
            Transform::One => 1.0,
            Transform::ExpNeg => (-a).exp(),
        }
    }

    pub fn antiderivative(self, a: f64) -> f64 {
        match self {
            Transform::One => a,
            Transform::ExpNeg => 1.0 - (-a).exp(),
        }
    }
}

/// Martingale test of f(A_t)·x_t − F(A_t) for a nonnegative class-(Σ) path
/// with nondecreasing part A.
pub fn transform_martingale_test<F>(
    name: &str,
    n_paths: u64,
    gen: F,
    transform: Transform,
    block: usize,
    level: f64,
    seed: u64,
) -> Result<TestReport>
where
    F: Fn(u64) -> Result<(Path, Path)> + Sync,
{
    martingale_increment_test(
        name,
        n_paths,
        |r| {
            let (x, a) = gen(r)?;
            if !x.same_grid(&a) {
                return Err(SigmaError::Misaligned("x and A off one grid".into()));
            }
            Path::new(
                x.t0,
                x.dt,
                x.values
                    .iter()
                    .zip(&a.values)
                    .map(|(&xv, &av)| transform.f(av) * xv - transform.antiderivative(av))
                    .collect(),
                "transformed",
            )
        },
        block,
        level,
        seed,
    )
}

/// Balayage check: K_{γ_t}·x_t − Σ K(t_{j−1})·ΔL̂_j must be a martingale for
/// a bounded piecewise-constant K.
#[allow(clippy::too_many_arguments)]
pub fn balayage_identity_test<F>(
    name: &str,
    n_paths: u64,
    gen: F,
    k: &StepFn,
    lt_method: LtMethod,
    eps: Option<f64>,
    block: usize,
    level: f64,
    seed: u64,
) -> Result<TestReport>
where
    F: Fn(u64) -> Result<SigmaProcess> + Sync,
{
    martingale_increment_test(
        name,
        n_paths,
        |r| {
            let src = gen(r)?;
            let dec = decompose_process(&src)?;
            let lt = source_local_time(&src, lt_method, eps)?;
            let mut comp = 0.0;
            let mut values = Vec::with_capacity(src.x.len());
            for j in 0..src.x.len() {
                if j > 0 {
                    comp += k.value_at(src.x.time(j - 1)) * (lt.lt.values[j] - lt.lt.values[j - 1]);
                }
                let kg = k.value_at(src.x.time(dec.gamma[j]));
                values.push(kg * src.x.values[j] - comp);
            }
            Path::new(src.x.t0, src.x.dt, values, "balayage")
        },
        block,
        level,
        seed,
    )
}

/// Number of indices where |y| fails to reproduce the source magnitude
/// bit-exactly.
pub fn abs_mismatch_count(sol: &SkewSolution) -> usize {
    sol.y
        .values
        .iter()
        .zip(&sol.source.x.values)
        .filter(|(y, x)| y.abs() != **x)
        .count()
}

/// Bit-exactness of |y| = source x over an ensemble; the statistic is the
/// total mismatch count and must be 0.
pub fn abs_match_test<F>(name: &str, n_paths: u64, gen: F, seed: u64) -> Result<TestReport>
where
    F: Fn(u64) -> Result<SkewSolution> + Sync,
{
    let counts = collect_summaries(n_paths, |r| {
        let sol = gen(r)?;
        Ok((abs_mismatch_count(&sol), sol.y.n_steps()))
    })?;
    let total: usize = counts.iter().map(|c| c.0).sum();
    Ok(TestReport::distance(
        name,
        total as f64,
        0.0,
        n_paths,
        counts[0].1,
        seed,
        "count of grid points with |y| != x".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::generate_bm;
    use crate::process::{make_sigma_process, ProcessKind};
    use crate::rng::{derive_key, STREAM_PATH};
    use crate::skew::{build_direct, build_replicate, BuildSpec, Construction};

    fn bm_gen(master: u64, n_steps: usize, dt: f64) -> impl Fn(u64) -> Result<Path> + Sync {
        move |r| generate_bm(n_steps, dt, derive_key(master, STREAM_PATH, r))
    }

    fn abs_bm_spec(alpha: f64, n_steps: usize, dt: f64) -> BuildSpec {
        BuildSpec {
            kind: ProcessKind::AbsBm,
            n_steps,
            dt,
            sigma: None,
            schedule: AlphaSchedule::constant(alpha).unwrap(),
            construction: Construction::Direct,
            horizon: 1.0,
        }
    }

    #[test]
    fn martingale_test_accepts_brownian_motion() {
        let rep =
            martingale_increment_test("bm", 2_000, bm_gen(11, 256, 1.0 / 256.0), 16, 0.01, 11)
                .unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn martingale_test_rejects_reflected_brownian_motion() {
        let gen = |r| {
            let b = generate_bm(256, 1.0 / 256.0, derive_key(12, STREAM_PATH, r))?;
            Path::new(0.0, b.dt, b.values.iter().map(|v| v.abs()).collect(), "abs")
        };
        let rep = martingale_increment_test("abs-bm", 4_000, gen, 16, 0.01, 12).unwrap();
        assert!(!rep.pass, "reflected BM must fail: {rep:?}");
    }

    #[test]
    fn martingale_test_calibration_soundness() {
        // 50 independent null runs at level 0.01 must pass at rate >= 0.98.
        let passes = (0..50u64)
            .filter(|&k| {
                martingale_increment_test(
                    "null",
                    2_000,
                    bm_gen(100 + k, 128, 1.0 / 128.0),
                    16,
                    0.01,
                    100 + k,
                )
                .unwrap()
                .pass
            })
            .count();
        assert!(passes >= 49, "only {passes}/50 null runs passed");
    }

    #[test]
    fn martingale_test_validates_inputs() {
        assert!(martingale_increment_test("x", 10, bm_gen(1, 16, 0.1), 4, 0.01, 1).is_err());
        assert!(martingale_increment_test("x", 1000, bm_gen(1, 16, 0.1), 5, 0.01, 1).is_err());
        assert!(martingale_increment_test("x", 1000, bm_gen(1, 16, 0.1), 4, 1.5, 1).is_err());
    }

    #[test]
    fn half_flip_is_a_martingale() {
        let spec = abs_bm_spec(0.5, 256, 1.0 / 256.0);
        let rep = sigma_membership_test(
            "half-flip",
            3_000,
            |r| build_replicate(&spec, 21, r),
            16,
            0.01,
            21,
        )
        .unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn occupation_test_is_exact_for_degenerate_alpha() {
        for alpha in [0.0, 1.0] {
            let spec = abs_bm_spec(alpha, 128, 1.0 / 128.0);
            let rep = occupation_probability_test(
                "degenerate",
                1_000,
                |r| Ok(build_replicate(&spec, 31, r)?.y),
                &AlphaSchedule::constant(alpha).unwrap(),
                &[0.5, 1.0],
                0.0,
                31,
            )
            .unwrap();
            assert_eq!(rep.statistic, 0.0);
            assert!(rep.pass);
        }
    }

    #[test]
    fn occupation_test_flags_starved_times() {
        // All paths are zero at t = 0... but index 0 is time 0 where y = 0,
        // so the nonzero count is 0 and the test errors out.
        let spec = abs_bm_spec(0.7, 64, 1.0 / 64.0);
        let err = occupation_probability_test(
            "starved",
            1_000,
            |r| Ok(build_replicate(&spec, 5, r)?.y),
            &AlphaSchedule::constant(0.7).unwrap(),
            &[0.0],
            0.01,
            5,
        );
        assert!(matches!(err, Err(SigmaError::TooFewSamples { .. })));
    }

    #[test]
    fn ks_test_calibration_on_exact_normals() {
        // Terminal value of a one-step BM is exactly N(0,1); alpha = 1/2
        // makes the skew CDF the standard normal. 50 null runs at level
        // 0.01 must pass at rate >= 0.98.
        let passes = (0..50u64)
            .filter(|&k| {
                skew_marginal_ks_test(
                    "null",
                    2_000,
                    bm_gen(4000 + k, 1, 1.0),
                    0.5,
                    1.0,
                    0.01,
                    4000 + k,
                )
                .unwrap()
                .pass
            })
            .count();
        assert!(passes >= 49, "only {passes}/50 null runs passed");
    }

    #[test]
    fn ks_test_rejects_a_wrong_alpha() {
        let spec = abs_bm_spec(0.7, 256, 1.0 / 256.0);
        let gen = |r| Ok(build_replicate(&spec, 61, r)?.y);
        let good = skew_marginal_ks_test("right", 5_000, gen, 0.7, 1.0, 0.01, 61).unwrap();
        assert!(good.pass, "{good:?}");
        let bad = skew_marginal_ks_test("wrong", 5_000, gen, 0.5, 1.0, 0.01, 61).unwrap();
        assert!(!bad.pass, "{bad:?}");
    }

    #[test]
    fn sde_residual_half_alpha_reduces_to_brownianity() {
        let spec = abs_bm_spec(0.5, 1024, 1.0 / 1024.0);
        let rep = sde_residual_test(
            "residual-half",
            2_000,
            |r| build_replicate(&spec, 71, r),
            LtMethod::Tanaka,
            None,
            0.05,
            0.01,
            71,
        )
        .unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn azema_yor_trivial_cases_are_exact() {
        // x = 0 with L = 0: M = I = 1, error 0.
        let zero = Path::new(0.0, 1.0, vec![0.0; 8], "zero").unwrap();
        let rep = azema_yor_identity_test(
            "ay-zero",
            100,
            |_| Ok((zero.clone(), zero.clone())),
            1e-15,
            1,
        )
        .unwrap();
        assert_eq!(rep.statistic, 0.0);

        // Deterministic tent with L = 0 off zeros: identity exact by
        // telescoping, since I only moves at the zeros of x.
        let tent = Path::new(0.0, 0.25, vec![0.0, 1.0, 2.0, 1.0, 0.0], "tent").unwrap();
        let lt = Path::new(0.0, 0.25, vec![0.0; 5], "flat").unwrap();
        let rep = azema_yor_identity_test("ay-tent", 100, |_| Ok((tent.clone(), lt.clone())), 1e-12, 1)
            .unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn transform_tests_pass_on_abs_bm() {
        let gen = |r| {
            let src = make_sigma_process(
                ProcessKind::AbsBm,
                512,
                1.0 / 512.0,
                derive_key(81, STREAM_PATH, r),
                None,
            )?;
            let a = src.fv_part();
            Ok((src.x, a))
        };
        for tr in [Transform::One, Transform::ExpNeg] {
            let rep =
                transform_martingale_test("transform", 3_000, gen, tr, 16, 0.01, 81).unwrap();
            assert!(rep.pass, "{tr:?}: {rep:?}");
        }
    }

    #[test]
    fn transform_on_the_zero_path_is_trivially_clean() {
        let zero = Path::new(0.0, 1.0 / 16.0, vec![0.0; 17], "zero").unwrap();
        let gen = |_| Ok((zero.clone(), zero.clone()));
        for tr in [Transform::One, Transform::ExpNeg] {
            let rep = transform_martingale_test("zero", 1_000, gen, tr, 4, 0.01, 1).unwrap();
            assert!(rep.pass);
            assert_eq!(rep.statistic, 0.0);
        }
    }

    #[test]
    fn balayage_constant_k_matches_the_tanaka_martingale() {
        let gen = |r| {
            make_sigma_process(
                ProcessKind::AbsBm,
                512,
                1.0 / 512.0,
                derive_key(91, STREAM_PATH, r),
                None,
            )
        };
        let k1 = StepFn::constant(1.0).unwrap();
        let rep = balayage_identity_test(
            "balayage-one",
            3_000,
            gen,
            &k1,
            LtMethod::Tanaka,
            None,
            16,
            0.01,
            91,
        )
        .unwrap();
        assert!(rep.pass, "{rep:?}");

        let k0 = StepFn::constant(0.0).unwrap();
        let rep = balayage_identity_test(
            "balayage-zero",
            1_000,
            gen,
            &k0,
            LtMethod::Tanaka,
            None,
            16,
            0.01,
            91,
        )
        .unwrap();
        assert!(rep.pass);
        assert_eq!(rep.statistic, 0.0);
    }

    #[test]
    fn abs_match_detects_a_mutated_path() {
        let src = make_sigma_process(ProcessKind::AbsBm, 128, 1.0 / 128.0, 3, None).unwrap();
        let sol =
            build_direct(src, &AlphaSchedule::constant(0.5).unwrap(), 4).unwrap();
        assert_eq!(abs_mismatch_count(&sol), 0);
        let mut bad = sol.clone();
        bad.y.values[64] *= 1.5;
        assert_eq!(abs_mismatch_count(&bad), 1);

        let spec = abs_bm_spec(0.7, 128, 1.0 / 128.0);
        let rep = abs_match_test("abs-match", 500, |r| build_replicate(&spec, 2, r), 2).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.statistic, 0.0);
    }

    #[test]
    fn reports_are_reproducible_and_thread_invariant() {
        let spec = abs_bm_spec(0.7, 128, 1.0 / 128.0);
        let gen = |r| Ok(build_replicate(&spec, 99, r)?.y);
        let a = martingale_increment_test("rep", 1_500, gen, 16, 0.01, 99).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| martingale_increment_test("rep", 1_500, gen, 16, 0.01, 99).unwrap());
        assert_eq!(a.statistic.to_bits(), b.statistic.to_bits());
    }
}
