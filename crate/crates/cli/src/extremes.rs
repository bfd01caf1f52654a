use std::fmt::Write;
use std::path::PathBuf;

use serde::Serialize;

use csl_core::engine::{run_simulation, sig10, FamilyFilter, SimConfig, Tracked};
use csl_core::extremes::{tail_scan, FrechetFit, ScanReport};
use csl_core::BallConfig;

use crate::common::{ball, RunOpts};
use crate::failure::{CmdResult, Failure};
use crate::manifest::Outputs;

/// Bins of the empirical density written next to each fitted curve.
const CURVE_BINS: usize = 200;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[arg(short = 'd', default_value_t = 2)]
    pub d: usize,
    #[arg(short = 'n', default_value_t = 2)]
    pub n: usize,
    /// Number of events (all families).
    #[arg(short = 'N', default_value_t = 20_000_000)]
    pub events: u64,
    #[command(flatten)]
    pub run: RunOpts,
    /// Block sizes.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "25,50,75,100,125,150,175,200"
    )]
    pub k_list: Vec<u64>,
    /// Upper truncation of the fitted law.
    #[arg(long, default_value_t = 250.0)]
    pub omega_max: f64,
    /// Histogram bins for the log-spaced circumradius histogram.
    #[arg(long, default_value_t = 1000)]
    pub bins: usize,
    #[arg(long, default_value = "csl-extremes")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct ExtremesOutput<'a> {
    cfg: BallConfig,
    n_events: u64,
    seed: u64,
    omega_max: f64,
    report: &'a ScanReport,
}

/// Empirical and fitted densities of the maxima, CSV `x,empirical_density,fitted_density`.
fn curve_csv(maxima: &[f64], fit: &FrechetFit) -> String {
    let hi = fit.mle.omega_max;
    let w = hi / CURVE_BINS as f64;
    let mut counts = vec![0u64; CURVE_BINS];
    for &x in maxima {
        if x < hi {
            counts[((x / w) as usize).min(CURVE_BINS - 1)] += 1;
        }
    }
    let n = maxima.len() as f64;
    let mut s = String::from("x,empirical_density,fitted_density\n");
    for (i, &c) in counts.iter().enumerate() {
        let x = (i as f64 + 0.5) * w;
        let _ = writeln!(
            s,
            "{},{},{}",
            sig10(x),
            sig10(c as f64 / (n * w)),
            sig10(fit.mle.truncated_pdf(x))
        );
    }
    s
}

pub fn run(args: Args, argv: &[String]) -> CmdResult {
    let cfg = ball(args.d, args.n)?;
    if args.k_list.is_empty() {
        return Err(Failure::usage("--k-list is empty"));
    }
    if let Some(&k) = args.k_list.iter().find(|&&k| k > args.events) {
        return Err(Failure::usage(format!(
            "block size {k} exceeds -N {}",
            args.events
        )));
    }
    if !(args.omega_max > 0.0) {
        return Err(Failure::usage("--omega-max must be positive"));
    }
    let sim = SimConfig::new(cfg, args.events, args.run.seed)
        .with_workers(args.run.workers()?)
        .with_bins(args.bins)
        .with_filter(FamilyFilter::All)
        .with_tracked(vec![Tracked::OmegaAll])
        .with_block_maxima(args.k_list.clone());
    let res = run_simulation(&sim)?;

    let samples: Vec<(u64, Vec<f64>)> = args
        .k_list
        .iter()
        .map(|&k| res.block_maxima(k).map(|seg| (k, seg.maxima.clone())))
        .collect::<Result<_, _>>()?;
    let mut report = tail_scan(&samples, args.omega_max)?;
    if let Some(ps) = res.power_sums.get(Tracked::OmegaAll.name()) {
        report.moment_ratios = ps.moment_ratios()?;
    }
    report.omega_max_seen = res.max_history.last().map(|m| m.omega);

    let mut out = Outputs::create(&args.out, argv, "extremes", &sim, Some(args.run.seed))?;
    out.write("scan.csv", &report.to_csv())?;
    let doc = ExtremesOutput {
        cfg,
        n_events: res.n_events,
        seed: args.run.seed,
        omega_max: args.omega_max,
        report: &report,
    };
    out.write("scan.json", &serde_json::to_string_pretty(&doc)?)?;
    for ((k, maxima), row) in samples.iter().zip(&report.rows) {
        if let Some(fit) = &row.fit {
            out.write(&format!("fit_k{k}.csv"), &curve_csv(maxima, fit))?;
        }
    }
    out.finish()?;

    println!(
        "{:>5}  {:>8}  {:>10}  {:>8}  {:>10}  {:>8}",
        "k", "a", "s", "m", "mode", "maxima"
    );
    for r in &report.rows {
        match &r.fit {
            Some(f) => println!(
                "{:>5}  {:>8.4}  {:>10.4}  {:>8.4}  {:>10.4}  {:>8}",
                r.k, f.mle.a, f.mle.s, f.mle.m, r.empirical_mode, r.n_maxima
            ),
            None => println!(
                "{:>5}  fit failed: {}",
                r.k,
                r.error.as_deref().unwrap_or("")
            ),
        }
    }
    if let Some(f) = report.scale_fit {
        println!(
            "s_k = {:.5} k + {:.4}  (R^2 {:.5})",
            f.slope, f.intercept, f.r2
        );
    }
    if let Some(f) = report.mode_fit {
        println!(
            "mode_k = {:.5} k + {:.4}  (R^2 {:.5})",
            f.slope, f.intercept, f.r2
        );
    }
    if let (Some(r), Some(m)) = (report.moment_ratios.last(), report.omega_max_seen) {
        println!(
            "rho_{} / omega_max = {:.4}",
            report.moment_ratios.len(),
            r / m
        );
    }
    if report.rows.iter().all(|r| r.fit.is_none()) {
        return Err(Failure::Numerical(anyhow::anyhow!(
            "no block size produced a fit"
        )));
    }
    Ok(())
}
