use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::consts::constants;
use crate::quad::{integrate, QuadOptions};
use crate::rational::{prob_contained_exact, prob_origin_outside_exact, to_f64};
use crate::specfun::{ln_beta, ln_gamma_pos};
use crate::{BallConfig, Error, Result};

/// A probability with its exact form when one fits in 128-bit rationals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probability {
    pub value: f64,
    /// e.g. `12π^2/245` or `3/16`.
    pub exact: Option<String>,
}

/// Probability that the circumsphere lies entirely inside the unit ball,
/// evaluated in log space.
pub fn prob_contained(cfg: BallConfig) -> f64 {
    if cfg.n == 1 {
        return 1.0;
    }
    let (d, n) = (cfg.df(), cfg.nf());
    let lg = ln_gamma_pos;
    let lb = |a: f64, b: f64| ln_beta(a, b).expect("positive beta arguments");
    let ln_p = (d - 1.0).ln() + n * d.ln() + (n - 1.0) / 2.0 * PI.ln() - (2.0 * (n + 1.0)).ln()
        + lb((n + 1.0) / 2.0, n * d / 2.0)
        + lb((d - 1.0) / 2.0, (n * d + 1.0) / 2.0)
        - lb((d - n + 1.0) / 2.0, n * d / 2.0)
        + (n + 1.0) * (lg(d / 2.0) - lg((d + 1.0) / 2.0));
    ln_p.exp()
}

/// Containment probability with its exact representation.
pub fn prob_contained_detailed(cfg: BallConfig) -> Probability {
    let exact = prob_contained_exact(cfg).ok();
    Probability {
        value: exact
            .as_ref()
            .map_or_else(|| prob_contained(cfg), |q| q.value()),
        exact: exact.map(|q| q.to_string()),
    }
}

/// Large-d limit of the containment probability at fixed n.
pub fn prob_contained_limit(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("need n >= 1"));
    }
    let nf = n as f64;
    Ok(
        (nf / 2.0 * (4.0 / nf).ln() + (nf - 1.0) / 2.0 * PI.ln() + ln_gamma_pos((nf + 1.0) / 2.0)
            - (nf + 1.0) / 2.0 * (nf + 1.0).ln())
        .exp(),
    )
}

/// Probability that the foot of the perpendicular from the centre to the
/// flat lies outside the circumsphere, given that the circumsphere is inside
/// the ball.
pub fn prob_origin_outside(cfg: BallConfig) -> f64 {
    if let Ok(q) = prob_origin_outside_exact(cfg) {
        return to_f64(&q);
    }
    // binomial tail 2^-(N-1) sum_{k<n} C(N-1, k), with N = n(d+1)
    let m = (cfg.n * (cfg.d + 1) - 1) as f64;
    let lg = ln_gamma_pos;
    (0..cfg.n)
        .map(|k| {
            let k = k as f64;
            (lg(m + 1.0) - lg(k + 1.0) - lg(m - k + 1.0) - m * std::f64::consts::LN_2).exp()
        })
        .sum()
}

pub fn prob_origin_outside_detailed(cfg: BallConfig) -> Probability {
    let exact = prob_origin_outside_exact(cfg).ok();
    Probability {
        value: prob_origin_outside(cfg),
        exact: exact.map(|q| q.to_string()),
    }
}

/// P(Delta_r > Omega_r) by quadrature of the rescaled (sigma_r, y_r) density
/// over y_r > 0; an independent route to [`prob_origin_outside`].
pub fn prob_origin_outside_quadrature(cfg: BallConfig) -> Result<f64> {
    let (d, n) = (cfg.df(), cfg.nf());
    let ln_j = constants(cfg).ln_j;
    let opts = QuadOptions::with_tol(0.0, 1e-12);
    let mut failure = None;
    let v = integrate(
        |s: f64| {
            let inner = integrate(
                |y: f64| (ln_j + (n - 1.0) * (s + y).ln() + (n * d - 1.0) * (s - y).ln()).exp(),
                0.0,
                s,
                &opts,
            );
            match inner {
                Ok(r) => r.value,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        &opts,
    )?
    .value;
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}
