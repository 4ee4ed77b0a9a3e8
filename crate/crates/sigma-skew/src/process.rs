//! Class-(Σ) example processes and the quadratic-variation time change.
//!
//! Every shipped generator produces a nonnegative path X together with the
//! martingale part of its decomposition X = M + A and the realized bracket
//! ⟨M,M⟩. The finite-variation part A is recovered as X − M and moves only
//! on the zero set of X.

use crate::error::{Result, SigmaError};
use crate::path::{generate_bm, realized_qv, Path};
use crate::rng::{derive_key, STREAM_COMPONENT};
use crate::stats::StepFn;

/// Sign with the grid convention sgn(0) := +1.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    AbsBm,
    Drawdown,
    ScaledAbs,
    ProductAbs,
    Custom,
}

impl ProcessKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "abs-bm" | "abs_bm" => Ok(ProcessKind::AbsBm),
            "drawdown" => Ok(ProcessKind::Drawdown),
            "scaled-abs" | "scaled_abs" => Ok(ProcessKind::ScaledAbs),
            "product-abs" | "product_abs" => Ok(ProcessKind::ProductAbs),
            other => Err(SigmaError::param("process", format!("unknown kind `{other}`"))),
        }
    }
}

/// A nonnegative class-(Σ) sample path with its martingale part and clock.
///
/// `signed` carries a signed companion path whose absolute value equals `x`
/// and whose sign changes locate the excursion boundaries of `x`; it is
/// absent for generators (drawdown) whose zeros are exact on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaProcess {
    pub x: Path,
    pub driver: Path,
    pub qv: Path,
    pub kind: ProcessKind,
    pub signed: Option<Path>,
}

impl SigmaProcess {
    fn validate(self) -> Result<Self> {
        if self.x.values[0] != 0.0 {
            return Err(SigmaError::NonVanishingStart { value: self.x.values[0], tol: 0.0 });
        }
        if !self.x.same_grid(&self.driver) || !self.x.same_grid(&self.qv) {
            return Err(SigmaError::Misaligned("x, driver and qv must share one grid".into()));
        }
        if self.qv.values[0] != 0.0 || self.qv.values.windows(2).any(|w| w[1] < w[0]) {
            return Err(SigmaError::param("qv", "must be nondecreasing from 0"));
        }
        Ok(self)
    }

    /// The finite-variation part A = X − M of the decomposition.
    pub fn fv_part(&self) -> Path {
        let values = self
            .x
            .values
            .iter()
            .zip(&self.driver.values)
            .map(|(&x, &m)| x - m)
            .collect();
        Path {
            t0: self.x.t0,
            dt: self.x.dt,
            values,
            label: format!("fv({})", self.x.label),
        }
    }

    /// The signed companion if present, otherwise the process itself.
    pub fn zero_reference(&self) -> &Path {
        self.signed.as_ref().unwrap_or(&self.x)
    }
}

/// Discrete Tanaka sum of a signed path: Σ sgn(s_j) Δs, evaluated at the
/// left endpoint of each cell.
fn tanaka_driver(signed: &Path, label: &str) -> Path {
    let mut values = Vec::with_capacity(signed.len());
    values.push(0.0);
    let mut acc = 0.0;
    for w in signed.values.windows(2) {
        acc += sgn(w[0]) * (w[1] - w[0]);
        values.push(acc);
    }
    Path {
        t0: signed.t0,
        dt: signed.dt,
        values,
        label: label.to_string(),
    }
}

/// X = |B| from a supplied signed driver path.
pub fn abs_bm_from(b: Path) -> Result<SigmaProcess> {
    let x = Path::new(
        b.t0,
        b.dt,
        b.values.iter().map(|v| v.abs()).collect(),
        format!("abs({})", b.label),
    )?;
    let driver = tanaka_driver(&b, "tanaka-driver");
    let qv = realized_qv(&driver);
    SigmaProcess {
        x,
        driver,
        qv,
        kind: ProcessKind::AbsBm,
        signed: Some(b),
    }
    .validate()
}

/// Drawdown X = max_{s≤t} B_s − B_t from a supplied driver path.
pub fn drawdown_from(b: Path) -> Result<SigmaProcess> {
    let mut running = f64::NEG_INFINITY;
    let values: Vec<f64> = b
        .values
        .iter()
        .map(|&v| {
            running = running.max(v);
            running - v
        })
        .collect();
    let x = Path::new(b.t0, b.dt, values, format!("drawdown({})", b.label))?;
    let driver = Path {
        t0: b.t0,
        dt: b.dt,
        values: b.values.iter().map(|v| -v).collect(),
        label: "neg-driver".to_string(),
    };
    let qv = realized_qv(&driver);
    SigmaProcess {
        x,
        driver,
        qv,
        kind: ProcessKind::Drawdown,
        signed: None,
    }
    .validate()
}

/// X = |M| with M = ∫ σ dB for a piecewise-constant deterministic σ.
///
/// The stored clock is the deterministic bracket Σ σ(t_j)² dt, so a σ ≡ 1
/// process carries exactly the identity clock.
pub fn scaled_abs_from(b: Path, sigma: &StepFn) -> Result<SigmaProcess> {
    if sigma.values.iter().any(|&v| v <= 0.0) {
        return Err(SigmaError::param("sigma", "must be strictly positive"));
    }
    let mut m_values = Vec::with_capacity(b.len());
    m_values.push(0.0);
    let mut qv_values = Vec::with_capacity(b.len());
    qv_values.push(0.0);
    let mut m_acc = 0.0;
    let mut qv_acc = 0.0;
    for (i, w) in b.values.windows(2).enumerate() {
        let s = sigma.value_at(b.time(i));
        m_acc += s * (w[1] - w[0]);
        qv_acc += s * s * b.dt;
        m_values.push(m_acc);
        qv_values.push(qv_acc);
    }
    let m = Path::new(b.t0, b.dt, m_values, "scaled-driver")?;
    let x = Path::new(
        b.t0,
        b.dt,
        m.values.iter().map(|v| v.abs()).collect(),
        format!("scaled_abs({})", b.label),
    )?;
    let driver = tanaka_driver(&m, "tanaka-driver");
    let qv = Path::new(b.t0, b.dt, qv_values, "sigma^2-clock")?;
    SigmaProcess {
        x,
        driver,
        qv,
        kind: ProcessKind::ScaledAbs,
        signed: Some(m),
    }
    .validate()
}

/// X = |B¹|·|B²| from two independent drivers.
pub fn product_abs_from(b1: Path, b2: Path) -> Result<SigmaProcess> {
    if !b1.same_grid(&b2) {
        return Err(SigmaError::Misaligned("product components must share one grid".into()));
    }
    let x = Path::new(
        b1.t0,
        b1.dt,
        b1.values
            .iter()
            .zip(&b2.values)
            .map(|(&a, &b)| a.abs() * b.abs())
            .collect(),
        "product_abs",
    )?;
    // Martingale part of |B¹||B²| by the product rule (the cross bracket
    // vanishes for independent drivers): |B²| d(∫sgn(B¹)dB¹) + symmetric.
    let mut driver_values = Vec::with_capacity(b1.len());
    driver_values.push(0.0);
    let mut acc = 0.0;
    for i in 0..b1.n_steps() {
        let d1 = b1.values[i + 1] - b1.values[i];
        let d2 = b2.values[i + 1] - b2.values[i];
        acc += b2.values[i].abs() * sgn(b1.values[i]) * d1
            + b1.values[i].abs() * sgn(b2.values[i]) * d2;
        driver_values.push(acc);
    }
    let driver = Path::new(b1.t0, b1.dt, driver_values, "product-driver")?;
    let qv = realized_qv(&driver);
    let signed = Path::new(
        b1.t0,
        b1.dt,
        b1.values.iter().zip(&b2.values).map(|(&a, &b)| a * b).collect(),
        "product-signed",
    )?;
    SigmaProcess {
        x,
        driver,
        qv,
        kind: ProcessKind::ProductAbs,
        signed: Some(signed),
    }
    .validate()
}

/// Generates one seeded class-(Σ) path of the requested kind.
///
/// `sigma` is consulted only for `ScaledAbs` and must be `None` otherwise.
pub fn make_sigma_process(
    kind: ProcessKind,
    n_steps: usize,
    dt: f64,
    seed: u64,
    sigma: Option<&StepFn>,
) -> Result<SigmaProcess> {
    if sigma.is_some() && kind != ProcessKind::ScaledAbs {
        return Err(SigmaError::param("sigma", "only meaningful for scaled_abs"));
    }
    match kind {
        ProcessKind::AbsBm => abs_bm_from(generate_bm(n_steps, dt, seed)?),
        ProcessKind::Drawdown => drawdown_from(generate_bm(n_steps, dt, seed)?),
        ProcessKind::ScaledAbs => {
            let sigma =
                sigma.ok_or_else(|| SigmaError::param("sigma", "required for scaled_abs"))?;
            scaled_abs_from(generate_bm(n_steps, dt, seed)?, sigma)
        }
        ProcessKind::ProductAbs => {
            let b1 = generate_bm(n_steps, dt, derive_key(seed, STREAM_COMPONENT, 0))?;
            let b2 = generate_bm(n_steps, dt, derive_key(seed, STREAM_COMPONENT, 1))?;
            product_abs_from(b1, b2)
        }
        ProcessKind::Custom => Err(SigmaError::param(
            "kind",
            "custom processes must be injected via the *_from constructors",
        )),
    }
}

/// Time change Y_t = X_{τ_t} with τ_t the right-continuous inverse of the
/// quadratic-variation clock: τ_t is the first original grid index whose
/// qv reaches t. The new grid keeps the original dt and runs to `horizon`.
pub fn time_change(p: &SigmaProcess, horizon: f64) -> Result<SigmaProcess> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(SigmaError::param("horizon", format!("must be positive and finite, got {horizon}")));
    }
    let attained = p.qv.terminal_value();
    // Accumulated rounding in the clock can leave the terminal qv a few ulps
    // short of a nominally attainable horizon; allow that much slack.
    let round_off = 1e-9 * attained.max(1.0);
    if horizon > attained + round_off {
        return Err(SigmaError::InsufficientQuadraticVariation { requested: horizon, attained });
    }
    let dt = p.x.dt;
    let n_new = (horizon / dt).round() as usize;
    if n_new < 1 {
        return Err(SigmaError::param("horizon", "must cover at least one grid step"));
    }
    let qv = &p.qv.values;
    let mut tau = Vec::with_capacity(n_new + 1);
    for k in 0..=n_new {
        let t = k as f64 * dt;
        let mut j = qv.partition_point(|&v| v < t);
        if j >= qv.len() {
            if t <= attained + round_off {
                j = qv.len() - 1;
            } else {
                return Err(SigmaError::InsufficientQuadraticVariation { requested: t, attained });
            }
        }
        tau.push(j);
    }
    let reindex = |src: &Path, label: String| Path {
        t0: 0.0,
        dt,
        values: tau.iter().map(|&j| src.values[j]).collect(),
        label,
    };
    let x = reindex(&p.x, format!("tc({})", p.x.label));
    let driver = reindex(&p.driver, format!("tc({})", p.driver.label));
    let qv = reindex(&p.qv, format!("tc({})", p.qv.label));
    let signed = p.signed.as_ref().map(|s| reindex(s, format!("tc({})", s.label)));
    SigmaProcess { x, driver, qv, kind: p.kind, signed }.validate()
}
