//! Campaign configuration: validated once, echoed verbatim into the
//! manifest so that any run can be reproduced byte-for-byte.

use serde::Serialize;

use sigma_skew::{
    AlphaSchedule, BuildSpec, Construction, ProcessKind, Result, SigmaError, StepFn,
};

/// Fully validated campaign settings. Everything that influences the output
/// bytes lives here; thread count and output location deliberately do not.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignConfig {
    pub process: ProcessKind,
    /// Constant α, when no schedule was given.
    pub alpha: Option<f64>,
    /// Breakpoint schedule in `t:level` form, when given.
    pub alpha_schedule: Option<String>,
    /// Piecewise σ in `t:value` form (scaled-abs only).
    pub sigma: Option<String>,
    pub paths: u64,
    pub steps: usize,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub eps: Option<f64>,
    pub format: String,
    pub construction: Construction,
}

pub struct RawConfig {
    pub process: String,
    pub alpha: Option<f64>,
    pub alpha_schedule: Option<String>,
    pub sigma: Option<String>,
    pub paths: u64,
    pub steps: usize,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub seed: u64,
    pub eps: Option<f64>,
    pub format: String,
}

impl CampaignConfig {
    pub fn from_raw(raw: RawConfig) -> Result<CampaignConfig> {
        let process = ProcessKind::parse(&raw.process)?;
        if raw.alpha.is_some() && raw.alpha_schedule.is_some() {
            return Err(SigmaError::param(
                "alpha",
                "give either --alpha or --alpha-schedule, not both",
            ));
        }
        if let Some(a) = raw.alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(SigmaError::param("alpha", "out of [0,1]"));
            }
        }
        if let Some(s) = &raw.alpha_schedule {
            // Parse now so bad schedules die before any work happens.
            AlphaSchedule::parse(s)?;
        }
        if raw.sigma.is_some() && process != ProcessKind::ScaledAbs {
            return Err(SigmaError::param("sigma", "only meaningful for scaled-abs"));
        }
        if process == ProcessKind::ScaledAbs {
            let s = raw
                .sigma
                .as_deref()
                .ok_or_else(|| SigmaError::param("sigma", "required for scaled-abs"))?;
            StepFn::parse(s)?;
        }
        if raw.paths < 1 {
            return Err(SigmaError::param("paths", "must be at least 1"));
        }
        if raw.steps < 1 {
            return Err(SigmaError::param("steps", "must be at least 1"));
        }
        let dt = raw.dt.unwrap_or(1.0 / raw.steps as f64);
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(SigmaError::param("dt", "must be positive and finite"));
        }
        let span = raw.steps as f64 * dt;
        let horizon = raw.horizon.unwrap_or(span);
        if !(horizon > 0.0) || horizon > span * 4.0 + 1e-12 {
            // A scaled clock can stretch the reachable horizon; anything
            // beyond is caught again, exactly, by the time change itself.
            return Err(SigmaError::param(
                "horizon",
                format!("must be in (0, {}] for this grid", span * 4.0),
            ));
        }
        if let Some(e) = raw.eps {
            if !(e > 0.0) {
                return Err(SigmaError::param("eps", "must be positive"));
            }
        }
        if raw.format != "csv" && raw.format != "json" {
            return Err(SigmaError::param("format", "must be csv or json"));
        }
        let construction = if process == ProcessKind::ScaledAbs {
            Construction::TimeChanged
        } else {
            Construction::Direct
        };
        if construction == Construction::Direct && horizon > span + 1e-12 {
            return Err(SigmaError::param("horizon", "exceeds steps * dt"));
        }
        Ok(CampaignConfig {
            process,
            alpha: raw.alpha.or(if raw.alpha_schedule.is_none() { Some(0.5) } else { None }),
            alpha_schedule: raw.alpha_schedule,
            sigma: raw.sigma,
            paths: raw.paths,
            steps: raw.steps,
            dt,
            horizon,
            seed: raw.seed,
            eps: raw.eps,
            format: raw.format,
            construction,
        })
    }

    pub fn schedule(&self) -> Result<AlphaSchedule> {
        match &self.alpha_schedule {
            Some(s) => AlphaSchedule::parse(s),
            None => AlphaSchedule::constant(self.alpha.expect("constant alpha set by validation")),
        }
    }

    pub fn build_spec(&self) -> Result<BuildSpec> {
        Ok(BuildSpec {
            kind: self.process,
            n_steps: self.steps,
            dt: self.dt,
            sigma: self.sigma.as_deref().map(StepFn::parse).transpose()?,
            schedule: self.schedule()?,
            construction: self.construction,
            horizon: self.horizon,
        })
    }
}
