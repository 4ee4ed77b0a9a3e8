//! Plot-ready CSV and JSON serialization.
//!
//! All floating-point output uses 17 significant digits so that files
//! round-trip bit-exactly and re-runs can be compared byte for byte.

use std::io::Write;

use crate::error::Result;
use crate::checks::TestReport;
use crate::excursions::ExcursionDecomposition;
use crate::local_time::{LocalTimeEstimate, LtMethod};
use crate::path::Path;
use crate::sign::SignPath;

/// One float, 17 significant digits, locale-independent.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_path_csv<W: Write>(w: &mut W, p: &Path) -> Result<()> {
    writeln!(w, "t,value")?;
    for (i, &v) in p.values.iter().enumerate() {
        writeln!(w, "{},{}", fmt_f64(p.time(i)), fmt_f64(v))?;
    }
    Ok(())
}

pub fn write_ensemble_header<W: Write>(w: &mut W) -> Result<()> {
    writeln!(w, "replicate,t,value")?;
    Ok(())
}

pub fn write_ensemble_rows<W: Write>(w: &mut W, replicate: u64, p: &Path) -> Result<()> {
    for (i, &v) in p.values.iter().enumerate() {
        writeln!(w, "{},{},{}", replicate, fmt_f64(p.time(i)), fmt_f64(v))?;
    }
    Ok(())
}

pub fn write_decomposition_csv<W: Write>(w: &mut W, dec: &ExcursionDecomposition) -> Result<()> {
    writeln!(w, "n,g_index,d_index,unfinished")?;
    for (n, e) in dec.intervals.iter().enumerate() {
        writeln!(w, "{},{},{},{}", n, e.g, e.d, e.unfinished)?;
    }
    Ok(())
}

pub fn write_sign_csv<W: Write>(w: &mut W, sp: &SignPath) -> Result<()> {
    writeln!(w, "index,sign")?;
    for (i, &s) in sp.values.iter().enumerate() {
        writeln!(w, "{i},{s}")?;
    }
    Ok(())
}

pub fn write_excursion_signs_csv<W: Write>(w: &mut W, sp: &SignPath) -> Result<()> {
    writeln!(w, "n,i,zeta")?;
    for &(n, i, z) in &sp.excursion_signs {
        writeln!(w, "{n},{i},{z}")?;
    }
    Ok(())
}

pub fn write_local_time_csv<W: Write>(w: &mut W, est: &LocalTimeEstimate) -> Result<()> {
    writeln!(w, "t,lt,method,eps")?;
    let method = match est.method {
        LtMethod::Band => "band",
        LtMethod::Tanaka => "tanaka",
    };
    let eps = est.eps.map(fmt_f64).unwrap_or_default();
    for (i, &v) in est.lt.values.iter().enumerate() {
        writeln!(w, "{},{},{},{}", fmt_f64(est.lt.time(i)), fmt_f64(v), method, eps)?;
    }
    Ok(())
}

pub fn write_reports_json<W: Write>(w: &mut W, reports: &[TestReport]) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, reports)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_reports_json(data: &str) -> Result<Vec<TestReport>> {
    Ok(serde_json::from_str(data)?)
}

pub fn write_reports_csv<W: Write>(w: &mut W, reports: &[TestReport]) -> Result<()> {
    writeln!(w, "name,statistic,threshold,pass")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{}",
            r.name,
            fmt_f64(r.statistic),
            fmt_f64(r.threshold),
            r.pass
        )?;
    }
    Ok(())
}
