use std::path::PathBuf;

use serde::Serialize;

use csl_core::engine::{run_simulation, FamilyFilter, SimConfig, Tracked};
use csl_core::geometry::Family;

use crate::common::{ball, RunOpts};
use crate::failure::{CmdResult, Failure};
use crate::manifest::Outputs;

pub const RESULT_FILE: &str = "result.json";

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Dimension of the ball.
    #[arg(short = 'd')]
    pub d: usize,
    /// Simplex dimension (n + 1 points).
    #[arg(short = 'n')]
    pub n: usize,
    /// Number of events.
    #[arg(short = 'N')]
    pub events: u64,
    #[command(flatten)]
    pub run: RunOpts,
    /// Histogram bins per variable.
    #[arg(long, default_value_t = 1000)]
    pub bins: usize,
    /// Events entering histograms and moments: C, D, E or all.
    #[arg(long, default_value = "C")]
    pub family: String,
    /// Tracked variables, comma separated (omega, delta, h, delta_c, sigma, r, omega_all).
    #[arg(long = "var", value_delimiter = ',')]
    pub vars: Vec<String>,
    /// Block sizes for block maxima of the circumradius over all events.
    #[arg(long, value_delimiter = ',')]
    pub k_list: Vec<u64>,
    /// Output directory.
    #[arg(long, default_value = "csl-out")]
    pub out: PathBuf,
}

pub fn run(args: Args, argv: &[String]) -> CmdResult {
    let cfg = ball(args.d, args.n)?;
    if args.events == 0 {
        return Err(Failure::usage("-N must be positive"));
    }
    let filter: FamilyFilter = args.family.parse()?;
    let mut sim = SimConfig::new(cfg, args.events, args.run.seed)
        .with_workers(args.run.workers()?)
        .with_bins(args.bins)
        .with_filter(filter)
        .with_block_maxima(args.k_list.clone());
    if !args.vars.is_empty() {
        let tracked = args
            .vars
            .iter()
            .map(|v| v.parse::<Tracked>())
            .collect::<Result<Vec<_>, _>>()?;
        sim = sim.with_tracked(tracked);
    }
    if let Some(&k) = args.k_list.iter().find(|&&k| k > args.events) {
        return Err(Failure::usage(format!(
            "block size {k} exceeds -N {}",
            args.events
        )));
    }
    sim.validate()?;
    let result = run_simulation(&sim)?;

    let mut out = Outputs::create(&args.out, argv, "simulate", &sim, Some(args.run.seed))?;
    out.write(RESULT_FILE, &result.to_json()?)?;
    for (name, h) in &result.histograms {
        out.write(&format!("hist_{name}.csv"), &h.to_csv())?;
    }
    out.finish()?;

    println!("{} events, {cfg}, seed {}", result.n_events, args.run.seed);
    for f in [Family::C, Family::D, Family::E] {
        let e = result.family_fraction(f)?;
        println!("  family {f}: {:.6} +- {:.6}", e.p, e.se);
    }
    if result.degenerate_resamples > 0 {
        println!(
            "  degenerate draws resampled: {}",
            result.degenerate_resamples
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}
