use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::specfun::{ln_beta, ln_gamma_pos};
use crate::BallConfig;

/// Normalising constants of the densities, stored as natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdfConstants {
    /// Joint density of (delta, omega).
    pub ln_k: f64,
    /// Marginal density of delta.
    pub ln_d: f64,
    /// Marginal density of omega.
    pub ln_w: f64,
    /// Marginal density of delta_c; `None` when n = d.
    pub ln_e: Option<f64>,
    /// Joint density of (sigma, y = delta - omega); equals K 2^-(n + nd - 1)
    /// from the unit-Jacobian-halving change of variables.
    pub ln_z: f64,
    /// Joint density of the rescaled (sigma_r, y_r).
    pub ln_j: f64,
}

impl PdfConstants {
    pub fn compute(cfg: BallConfig) -> Self {
        let (d, n) = (cfg.df(), cfg.nf());
        let lg = ln_gamma_pos;
        let half_ln_pi = 0.5 * PI.ln();
        let common = lg((n * (d + 1.0) + 1.0) / 2.0) + lg((n + 1.0) * d / 2.0 + 1.0);
        let ln_k =
            (n + n * d) * LN_2 - half_ln_pi + common - lg(n) - lg(n * d) - lg((d - n + 2.0) / 2.0);
        let ln_d = common - lg(n) - lg(n * d + (d - n) / 2.0 + 1.0);
        let ln_w = common - lg(n * d) - lg((n + d) / 2.0 + 1.0);
        let ln_e = (cfg.n < cfg.d).then(|| {
            LN_2 - ln_beta((d - n) / 2.0, n * (d + 1.0) / 2.0 + 1.0).unwrap()
                - ln_beta(n, n * d + 1.0).unwrap()
        });
        let ln_z = LN_2 - half_ln_pi + common - lg(n) - lg(n * d) - lg((d - n) / 2.0 + 1.0);
        let ln_j = (n * (d + 1.0)).ln() - (n * d + n - 1.0) * LN_2 - ln_beta(n, n * d).unwrap();
        Self {
            ln_k,
            ln_d,
            ln_w,
            ln_e,
            ln_z,
            ln_j,
        }
    }

    pub fn k(&self) -> f64 {
        self.ln_k.exp()
    }
}

/// Cached constants for `cfg`; safe for concurrent use.
pub fn constants(cfg: BallConfig) -> PdfConstants {
    static CACHE: OnceLock<RwLock<HashMap<BallConfig, PdfConstants>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(c) = cache.read().expect("constant cache poisoned").get(&cfg) {
        return *c;
    }
    let c = PdfConstants::compute(cfg);
    cache
        .write()
        .expect("constant cache poisoned")
        .insert(cfg, c);
    c
}
