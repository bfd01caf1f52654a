use std::fmt::Write;
use std::path::PathBuf;

use serde::Serialize;

use csl_core::analytic::prob_contained_detailed;
use csl_core::engine::{run_simulation, sig10, SimConfig};
use csl_core::geometry::Family;
use csl_core::BallConfig;

use crate::common::RunOpts;
use crate::failure::{CmdResult, Failure};
use crate::manifest::Outputs;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Events per dimension.
    #[arg(short = 'N', default_value_t = 20_000_000)]
    pub events: u64,
    #[command(flatten)]
    pub run: RunOpts,
    /// Exit with status 3 if any estimate is more than 4 standard errors off.
    #[arg(long)]
    pub check: bool,
    /// Write table1.csv, table1.json and a manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub d: usize,
    pub exact: Option<String>,
    pub exact_value: f64,
    pub estimate: f64,
    pub abs_error: f64,
    pub se: f64,
}

pub fn run(args: Args, argv: &[String]) -> CmdResult {
    if args.events == 0 {
        return Err(Failure::usage("-N must be positive"));
    }
    let workers = args.run.workers()?;
    let mut rows = Vec::new();
    for d in 2..=9 {
        let cfg = BallConfig::new(d, 2)?;
        let sim = SimConfig::new(cfg, args.events, args.run.seed)
            .with_workers(workers)
            .with_tracked(Vec::new());
        let res = run_simulation(&sim)?;
        let est = res.family_fraction(Family::C)?;
        let exact = prob_contained_detailed(cfg);
        rows.push(Row {
            d,
            exact: exact.exact,
            exact_value: exact.value,
            estimate: est.p,
            abs_error: (est.p - exact.value).abs(),
            se: est.se,
        });
        log::info!("d = {d} done");
    }

    println!(
        "{:>2}  {:>18}  {:>12}  {:>12}  {:>10}  {:>10}",
        "d", "exact", "value", "estimate", "|error|", "se"
    );
    let mut csv = String::from("d,exact,exact_value,estimate,abs_error,se\n");
    for r in &rows {
        let ex = r.exact.clone().unwrap_or_default();
        println!(
            "{:>2}  {:>18}  {:>12.8}  {:>12.8}  {:>10.2e}  {:>10.2e}",
            r.d, ex, r.exact_value, r.estimate, r.abs_error, r.se
        );
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.d,
            ex,
            sig10(r.exact_value),
            sig10(r.estimate),
            sig10(r.abs_error),
            sig10(r.se)
        );
    }
    if let Some(dir) = &args.out {
        let mut out = Outputs::create(dir, argv, "table1", &args, Some(args.run.seed))?;
        out.write("table1.csv", &csv)?;
        out.write("table1.json", &serde_json::to_string_pretty(&rows)?)?;
        out.finish()?;
    }
    if args.check {
        let bad: Vec<String> = rows
            .iter()
            .filter(|r| r.abs_error > 4.0 * r.se)
            .map(|r| r.d.to_string())
            .collect();
        if !bad.is_empty() {
            return Err(Failure::Verdict(format!(
                "estimates beyond 4 SE for d = {}",
                bad.join(", ")
            )));
        }
    }
    Ok(())
}
