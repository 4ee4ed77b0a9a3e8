//! Campaign front end: simulate ensembles, verify them against the skew
//! Brownian motion oracles, and merge report files.

mod config;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{CampaignConfig, RawConfig};
use sigma_skew::checks::TestReport;
use sigma_skew::io as skio;
use sigma_skew::rng::{derive_key, STREAM_PATH, STREAM_SIGN};
use sigma_skew::{
    abs_match_test, azema_yor_identity_test, balayage_identity_test, flip_signs, lt_band,
    lt_tanaka, make_sigma_process, martingale_increment_test, occupation_probability_test,
    sde_residual_test, sigma_membership_test, skew_marginal_ks_test, transform_martingale_test,
    AlphaSchedule, Construction, LtMethod, Path, ProcessKind, Result, SigmaError, SigmaProcess,
    StepFn, Transform,
};

#[derive(Parser)]
#[command(name = "sigma-skew", version, about = "Skew Brownian motion construction and verification campaigns")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a solution ensemble and persist it with a manifest.
    Simulate(RunArgs),
    /// Simulate inline and run the configured statistical tests.
    Verify(VerifyArgs),
    /// Merge report JSON files into one digest CSV on stdout.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Generator kind: abs-bm | drawdown | scaled-abs | product-abs.
    #[arg(long, default_value = "abs-bm")]
    process: String,
    /// Constant skew parameter in [0,1] (default 0.5 when no schedule).
    #[arg(long)]
    alpha: Option<f64>,
    /// Piecewise alpha as `t:level` pairs, e.g. "0:0.3,1:0.8".
    #[arg(long)]
    alpha_schedule: Option<String>,
    /// Piecewise sigma as `t:value` pairs (scaled-abs only).
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long, default_value_t = 1000)]
    paths: u64,
    #[arg(long, default_value_t = 4096)]
    steps: usize,
    /// Grid step (default 1/steps).
    #[arg(long)]
    dt: Option<f64>,
    /// Campaign horizon on the solution clock (default steps * dt).
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Band half-width for local-time estimation (default: Tanaka method).
    #[arg(long)]
    eps: Option<f64>,
    /// Output directory.
    #[arg(long, env = "SIGMA_SKEW_OUT", default_value = "out")]
    out: PathBuf,
    /// Ensemble file format: csv | json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker cap for ensemble generation (0 = all cores). Output bytes are
    /// identical for every value.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated test names: occupation, ks, martingale, membership,
    /// residual, azema-yor, transform, balayage, abs-match.
    #[arg(long, default_value = "occupation,ks,residual,abs-match")]
    tests: String,
    #[arg(long, default_value_t = 0.01)]
    level: f64,
    /// Tests whose FAILURE is the expected outcome (comma-separated names);
    /// their verdicts are inverted when deciding the exit code.
    #[arg(long)]
    expect_fail: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Report JSON files to merge.
    files: Vec<PathBuf>,
}

fn to_config(a: &RunArgs) -> Result<CampaignConfig> {
    CampaignConfig::from_raw(RawConfig {
        process: a.process.clone(),
        alpha: a.alpha,
        alpha_schedule: a.alpha_schedule.clone(),
        sigma: a.sigma.clone(),
        paths: a.paths,
        steps: a.steps,
        dt: a.dt,
        horizon: a.horizon,
        seed: a.seed,
        eps: a.eps,
        format: a.format.clone(),
    })
}

#[derive(serde::Serialize)]
struct Manifest<'a> {
    version: &'a str,
    config: &'a CampaignConfig,
    seed_derivation: &'a str,
}

fn write_manifest(cfg: &CampaignConfig, out: &std::path::Path) -> Result<()> {
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        seed_derivation:
            "per replicate r: driver path keyed by (seed, stream 0, r), excursion signs keyed by (seed, stream 1, r)",
    };
    let mut w = BufWriter::new(fs::File::create(out.join("manifest.json"))?);
    serde_json::to_writer_pretty(&mut w, &manifest).map_err(SigmaError::from)?;
    writeln!(w)?;
    Ok(())
}

/// Generates the ensemble in parallel chunks, writing rows in replicate
/// order so that the output bytes never depend on scheduling.
fn for_each_path_in_order(
    cfg: &CampaignConfig,
    mut sink: impl FnMut(u64, &Path) -> Result<()>,
) -> Result<()> {
    use rayon::prelude::*;
    let spec = cfg.build_spec()?;
    const CHUNK: u64 = 512;
    let mut start = 0;
    while start < cfg.paths {
        let end = (start + CHUNK).min(cfg.paths);
        let chunk: Vec<Path> = (start..end)
            .into_par_iter()
            .map(|r| Ok(sigma_skew::build_replicate(&spec, cfg.seed, r)?.y))
            .collect::<Result<_>>()?;
        for (offset, y) in chunk.iter().enumerate() {
            sink(start + offset as u64, y)?;
        }
        start = end;
    }
    Ok(())
}

fn cmd_simulate(cfg: &CampaignConfig, out: &std::path::Path) -> Result<()> {
    fs::create_dir_all(out)?;
    write_manifest(cfg, out)?;
    if cfg.format == "csv" {
        let mut w = BufWriter::new(fs::File::create(out.join("ensemble.csv"))?);
        skio::write_ensemble_header(&mut w)?;
        for_each_path_in_order(cfg, |r, y| skio::write_ensemble_rows(&mut w, r, y))?;
        w.flush()?;
    } else {
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(cfg.paths as usize);
        for_each_path_in_order(cfg, |_, y| {
            values.push(y.values.clone());
            Ok(())
        })?;
        let doc = serde_json::json!({ "t0": 0.0, "dt": cfg.dt, "values": values });
        let mut w = BufWriter::new(fs::File::create(out.join("ensemble.json"))?);
        serde_json::to_writer(&mut w, &doc).map_err(SigmaError::from)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}

fn source_gen(cfg: &CampaignConfig) -> impl Fn(u64) -> Result<SigmaProcess> + Sync + '_ {
    let sigma = cfg.sigma.as_deref().map(StepFn::parse).transpose().unwrap();
    move |r| {
        make_sigma_process(
            cfg.process,
            cfg.steps,
            cfg.dt,
            derive_key(cfg.seed, STREAM_PATH, r),
            sigma.as_ref(),
        )
    }
}

fn lt_method_for(cfg: &CampaignConfig) -> (LtMethod, Option<f64>) {
    if cfg.eps.is_some() {
        (LtMethod::Band, cfg.eps)
    } else if cfg.process == ProcessKind::Drawdown {
        (LtMethod::Band, None)
    } else {
        (LtMethod::Tanaka, None)
    }
}

/// Local-time path for one source, using the campaign's method choice.
fn source_lt(src: &SigmaProcess, method: LtMethod, eps: Option<f64>) -> Result<Path> {
    Ok(match method {
        LtMethod::Band => {
            let eps =
                eps.unwrap_or_else(|| sigma_skew::default_eps(src.x.dt, src.qv.terminal_value()));
            lt_band(&src.x, &src.qv, eps)?.lt
        }
        LtMethod::Tanaka => {
            let signed = src.signed.as_ref().ok_or_else(|| {
                SigmaError::Degenerate("tanaka local time needs a signed companion".into())
            })?;
            lt_tanaka(signed).lt
        }
    })
}

/// Occupation check times: the midpoint of every schedule interval that
/// intersects the horizon, plus the horizon itself.
fn occupation_times(schedule: &AlphaSchedule, horizon: f64) -> Vec<f64> {
    let bps = schedule.breakpoints();
    let mut times = Vec::new();
    for (i, &lo) in bps.iter().enumerate() {
        if lo >= horizon {
            break;
        }
        let hi = bps.get(i + 1).copied().unwrap_or(horizon).min(horizon);
        times.push(0.5 * (lo + hi));
    }
    if times.last() != Some(&horizon) {
        times.push(horizon);
    }
    times
}

fn block_for(n_steps: usize) -> usize {
    if n_steps % 16 == 0 {
        n_steps / 16
    } else {
        1
    }
}

fn run_one_test(cfg: &CampaignConfig, name: &str, level: f64) -> Result<Vec<TestReport>> {
    let spec = cfg.build_spec()?;
    let schedule = cfg.schedule()?;
    let seed = cfg.seed;
    let sol_gen = |r| sigma_skew::build_replicate(&spec, seed, r);
    let y_gen = |r| Ok(sol_gen(r)?.y);
    let y_steps = (cfg.horizon / cfg.dt).round() as usize;
    let block = block_for(y_steps);
    let src_gen = source_gen(cfg);
    let (lt_method, eps) = lt_method_for(cfg);

    match name {
        "occupation" => {
            let times = occupation_times(&schedule, cfg.horizon);
            let tol = (2.0 / (cfg.paths as f64).sqrt()).max(0.005);
            Ok(vec![occupation_probability_test(
                "occupation", cfg.paths, y_gen, &schedule, &times, tol, seed,
            )?])
        }
        "ks" => {
            let alpha = cfg.alpha.ok_or_else(|| {
                SigmaError::param("tests", "ks requires a constant alpha; use occupation instead")
            })?;
            Ok(vec![skew_marginal_ks_test(
                "ks", cfg.paths, y_gen, alpha, cfg.horizon, level, seed,
            )?])
        }
        "martingale" => Ok(vec![martingale_increment_test(
            "martingale", cfg.paths, y_gen, block, level, seed,
        )?]),
        "membership" => {
            let half = AlphaSchedule::constant(0.5)?;
            Ok(vec![sigma_membership_test(
                "membership",
                cfg.paths,
                |r| {
                    flip_signs(
                        src_gen(r)?,
                        &half,
                        derive_key(seed, STREAM_SIGN, r),
                        Construction::Direct,
                    )
                },
                block_for(cfg.steps),
                level,
                seed,
            )?])
        }
        "residual" => Ok(vec![sde_residual_test(
            "residual", cfg.paths, sol_gen, lt_method, eps, 0.02, level, seed,
        )?]),
        "azema-yor" => Ok(vec![azema_yor_identity_test(
            "azema-yor",
            cfg.paths,
            |r| {
                let src = src_gen(r)?;
                let lt = source_lt(&src, lt_method, eps)?;
                Ok((src.x, lt))
            },
            0.05,
            seed,
        )?]),
        "transform" => {
            let gen = |r| {
                let src = src_gen(r)?;
                let a = src.fv_part();
                Ok((src.x, a))
            };
            Ok(vec![
                transform_martingale_test(
                    "transform-one", cfg.paths, gen, Transform::One, block_for(cfg.steps), level, seed,
                )?,
                transform_martingale_test(
                    "transform-exp", cfg.paths, gen, Transform::ExpNeg, block_for(cfg.steps), level, seed,
                )?,
            ])
        }
        "balayage" => {
            let k = StepFn::new(vec![(0.0, 1.0), (cfg.horizon / 2.0, -1.0)])?;
            Ok(vec![balayage_identity_test(
                "balayage",
                cfg.paths,
                &src_gen,
                &k,
                lt_method,
                eps,
                block_for(cfg.steps),
                level,
                seed,
            )?])
        }
        "abs-match" => Ok(vec![abs_match_test("abs-match", cfg.paths, sol_gen, seed)?]),
        other => Err(SigmaError::param("tests", format!("unknown test `{other}`"))),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let cfg = to_config(&args.run)?;
    if !(0.0 < args.level && args.level < 1.0) {
        return Err(SigmaError::param("level", "must be in (0,1)"));
    }
    let names: Vec<&str> = args.tests.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(SigmaError::param("tests", "no tests selected"));
    }
    let expect_fail: Vec<&str> = args
        .expect_fail
        .as_deref()
        .map(|s| s.split(',').map(str::trim).collect())
        .unwrap_or_default();
    for name in &expect_fail {
        if !names.contains(name) {
            return Err(SigmaError::param(
                "expect-fail",
                format!("`{name}` is not among the selected tests"),
            ));
        }
    }

    let mut reports = Vec::new();
    for name in &names {
        reports.extend(run_one_test(&cfg, name, args.level)?);
    }

    let out = &args.run.out;
    fs::create_dir_all(out)?;
    let mut w = BufWriter::new(fs::File::create(out.join("report.json"))?);
    skio::write_reports_json(&mut w, &reports)?;
    w.flush()?;
    let mut w = BufWriter::new(fs::File::create(out.join("report.csv"))?);
    skio::write_reports_csv(&mut w, &reports)?;
    w.flush()?;

    let mut all_ok = true;
    for r in &reports {
        // Expected-fail applies by test-group name prefix (transform emits
        // two reports).
        let inverted = expect_fail.iter().any(|n| r.name.starts_with(n));
        let effective = if inverted { !r.pass } else { r.pass };
        println!(
            "{}: {} (statistic {:.6}, threshold {:.6}){}",
            r.name,
            if effective { "pass" } else { "FAIL" },
            r.statistic,
            r.threshold,
            if inverted { " [expected-fail]" } else { "" }
        );
        all_ok &= effective;
    }
    Ok(all_ok)
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    if args.files.is_empty() {
        return Err(SigmaError::param("files", "at least one report file required"));
    }
    let mut all = Vec::new();
    for f in &args.files {
        let data = fs::read_to_string(f)?;
        all.extend(skio::read_reports_json(&data)?);
    }
    all.sort_by(|a, b| a.name.cmp(&b.name));
    let mut out = Vec::new();
    skio::write_reports_csv(&mut out, &all)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<bool> = match &cli.cmd {
        Cmd::Simulate(a) => {
            sigma_skew::init_threads(a.threads);
            to_config(a).and_then(|cfg| cmd_simulate(&cfg, &a.out)).map(|()| true)
        }
        Cmd::Verify(a) => {
            sigma_skew::init_threads(a.run.threads);
            cmd_verify(a)
        }
        Cmd::Report(a) => cmd_report(a).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
