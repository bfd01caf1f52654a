use std::fmt::Write;
use std::path::PathBuf;

use anyhow::Context;
use serde::Serialize;

use csl_core::analytic::Var;
use csl_core::engine::{sig10, FamilyFilter, Histogram, SimResult, Tracked};
use csl_core::stats::{chi_square, ks_binned, ks_critical, BinnedKs, ChiSquare};
use csl_core::BallConfig;

use crate::common::ball;
use crate::failure::{CmdResult, Failure};
use crate::manifest::Outputs;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// SimResult JSON written by `simulate`.
    #[arg(long)]
    pub result: PathBuf,
    /// Analytic target dimension; defaults to the result's.
    #[arg(short = 'd')]
    pub d: Option<usize>,
    #[arg(short = 'n')]
    pub n: Option<usize>,
    /// Variables to compare, comma separated; default every tracked one with a law.
    #[arg(long = "var", value_delimiter = ',')]
    pub vars: Vec<String>,
    /// KS significance level.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Largest accepted |z| for the moments k = 1..4.
    #[arg(long, default_value_t = 4.0)]
    pub z_max: f64,
    /// Write report.json and per-variable residual CSVs here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentCheck {
    pub k: usize,
    pub sample: f64,
    pub se: Option<f64>,
    pub analytic: f64,
    pub z: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VarReport {
    pub var: String,
    pub n: u64,
    pub ks: BinnedKs,
    pub ks_critical: f64,
    pub chi_square: Option<ChiSquare>,
    /// Largest |empirical - analytic| bin-averaged density.
    pub max_abs_density_residual: f64,
    pub max_residual_bin: [f64; 2],
    pub moments: Vec<MomentCheck>,
    pub pass: bool,
    #[serde(skip)]
    pub residual_csv: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub result_config: BallConfig,
    pub target_config: BallConfig,
    pub n_events: u64,
    pub alpha: f64,
    pub z_max: f64,
    pub variables: Vec<VarReport>,
    pub pass: bool,
}

pub fn compare_variable(
    res: &SimResult,
    var: Var,
    target: BallConfig,
    alpha: f64,
    z_max: f64,
) -> csl_core::Result<VarReport> {
    let t = Tracked::from_var(var);
    let h: &Histogram = res.histogram(t)?;
    let edges = h.edges();
    let cdf = var.cdf_on_edges(&edges, target)?;
    let ks = ks_binned(&h.counts, h.underflow, h.overflow, &cdf)?;
    let n = ks.n;
    let crit = ks_critical(alpha, n as usize);
    let probs: Vec<f64> = cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
    let chi = chi_square(&h.counts, &probs, 5.0).ok();

    let nf = n as f64;
    let mut csv = String::from("bin_left,bin_right,count,expected,residual\n");
    let (mut worst, mut worst_bin) = (0.0f64, [edges[0], edges[1]]);
    for (i, (&c, &p)) in h.counts.iter().zip(&probs).enumerate() {
        let (lo, hi) = (edges[i], edges[i + 1]);
        let expected = nf * p;
        let resid = if expected > 0.0 {
            (c as f64 - expected) / expected.sqrt()
        } else {
            0.0
        };
        let _ = writeln!(
            csv,
            "{},{},{c},{},{}",
            sig10(lo),
            sig10(hi),
            sig10(expected),
            sig10(resid)
        );
        let diff = ((c as f64 - expected) / (nf * (hi - lo))).abs();
        if diff > worst {
            worst = diff;
            worst_bin = [lo, hi];
        }
    }

    let mut moments = Vec::new();
    let mut moments_ok = true;
    for k in 1..=4 {
        let Ok(est) = res.moment(t, k) else { continue };
        let analytic = var.moment(k as f64, target)?;
        let z = est
            .se
            .filter(|&s| s > 0.0)
            .map(|s| (est.mean - analytic) / s);
        if z.is_some_and(|z| z.abs() > z_max) {
            moments_ok = false;
        }
        moments.push(MomentCheck {
            k,
            sample: est.mean,
            se: est.se,
            analytic,
            z,
        });
    }
    Ok(VarReport {
        var: var.name().into(),
        n,
        pass: ks.d_edges <= crit && moments_ok,
        ks,
        ks_critical: crit,
        chi_square: chi,
        max_abs_density_residual: worst,
        max_residual_bin: worst_bin,
        moments,
        residual_csv: csv,
    })
}

pub fn run(args: Args, argv: &[String]) -> CmdResult {
    let text = std::fs::read_to_string(&args.result)
        .with_context(|| format!("reading {}", args.result.display()))
        .map_err(Failure::Usage)?;
    let res = SimResult::from_json(&text)?;
    let rc = res.config.cfg;
    let target = ball(args.d.unwrap_or(rc.d), args.n.unwrap_or(rc.n))?;
    if res.config.family_filter != FamilyFilter::C {
        return Err(Failure::usage(format!(
            "the analytic laws describe family C events, but the result was filtered on {}",
            res.config.family_filter
        )));
    }
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Failure::usage("--alpha must lie in (0, 1)"));
    }
    let vars: Vec<Var> = if args.vars.is_empty() {
        res.config
            .tracked
            .iter()
            .filter_map(|t| t.as_var())
            .filter(|v| v.defined_for(target))
            .collect()
    } else {
        let vs = args
            .vars
            .iter()
            .map(|s| s.parse::<Var>())
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(v) = vs.iter().find(|v| !v.defined_for(target)) {
            return Err(Failure::usage(format!(
                "{} has no law for {target}",
                v.name()
            )));
        }
        vs
    };
    if vars.is_empty() {
        return Err(Failure::usage("no comparable variables in the result"));
    }
    let variables = vars
        .iter()
        .map(|&v| compare_variable(&res, v, target, args.alpha, args.z_max))
        .collect::<Result<Vec<_>, _>>()?;
    let report = CompareReport {
        result_config: rc,
        target_config: target,
        n_events: res.n_events,
        alpha: args.alpha,
        z_max: args.z_max,
        pass: variables.iter().all(|v| v.pass),
        variables,
    };
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(dir) = &args.out {
        let mut out = Outputs::create(dir, argv, "compare", &args, Some(res.config.seed))?;
        out.write("report.json", &json)?;
        for v in &report.variables {
            out.write(&format!("residuals_{}.csv", v.var), &v.residual_csv)?;
        }
        out.finish()?;
    }
    println!("{json}");
    if report.pass {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .variables
            .iter()
            .filter(|v| !v.pass)
            .map(|v| v.var.as_str())
            .collect();
        Err(Failure::Verdict(format!(
            "{} against {target}",
            failed.join(", ")
        )))
    }
}
