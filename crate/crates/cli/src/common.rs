use clap::Args;
use serde::Serialize;

use csl_core::BallConfig;

use crate::failure::Failure;

/// Seed used when neither `--seed` nor `CSL_DEFAULT_SEED` is given.
pub const FALLBACK_SEED: u64 = 1;

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunOpts {
    /// Random seed.
    #[arg(long, env = "CSL_DEFAULT_SEED", default_value_t = FALLBACK_SEED)]
    pub seed: u64,
    /// Worker threads; results depend on (seed, workers).
    #[arg(long)]
    pub workers: Option<usize>,
}

impl RunOpts {
    pub fn workers(&self) -> Result<usize, Failure> {
        match self.workers {
            Some(0) => Err(Failure::usage("--workers must be at least 1")),
            Some(w) => Ok(w),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }
}

pub fn ball(d: usize, n: usize) -> Result<BallConfig, Failure> {
    Ok(BallConfig::new(d, n)?)
}
