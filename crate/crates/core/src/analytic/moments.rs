use std::f64::consts::LN_2;

use crate::quad::{integrate, QuadOptions};
use crate::rational::{delta_c_moment_exact, to_f64};
use crate::specfun::{gauss_2f1, ln_beta, ln_gamma_ratio, pochhammer};
use crate::{BallConfig, Error, Result};

fn check_order(k: f64) -> Result<()> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::domain(format!(
            "moment order must be finite and >= 0, got {k}"
        )));
    }
    Ok(())
}

/// Shared factor of E[Delta^k] and E[Omega^k] in log space.
fn ln_common(k: f64, cfg: BallConfig) -> Result<f64> {
    let (d, n) = (cfg.df(), cfg.nf());
    Ok(-k * LN_2
        - ln_gamma_ratio(((n + 1.0) * d + 2.0) / 2.0, k / 2.0)?
        - ln_gamma_ratio((n * (d + 1.0) + 1.0) / 2.0, k / 2.0)?)
}

/// E[Delta^k] for real k >= 0.
pub fn moment_delta(k: f64, cfg: BallConfig) -> Result<f64> {
    check_order(k)?;
    Ok((ln_gamma_ratio(cfg.nf(), k)? + ln_common(k, cfg)?).exp())
}

/// E[Omega^k] for real k >= 0.
pub fn moment_omega(k: f64, cfg: BallConfig) -> Result<f64> {
    check_order(k)?;
    Ok((ln_gamma_ratio(cfg.nf() * cfg.df(), k)? + ln_common(k, cfg)?).exp())
}

/// E[Sigma^k] for real k >= 0.
pub fn moment_sigma(k: f64, cfg: BallConfig) -> Result<f64> {
    check_order(k)?;
    let (d, n) = (cfg.df(), cfg.nf());
    Ok((ln_gamma_ratio(n * (d + 1.0) / 2.0, k / 2.0)?
        - ln_gamma_ratio(((n + 1.0) * d + 2.0) / 2.0, k / 2.0)?)
    .exp())
}

/// E[Delta^(2p)] from the Pochhammer form, used to cross-check the gamma ratios.
pub fn moment_delta_even_pochhammer(p: u32, cfg: BallConfig) -> Result<f64> {
    let (d, n) = (cfg.df(), cfg.nf());
    let p = p as f64;
    Ok(pochhammer(n / 2.0, p)? * pochhammer((n + 1.0) / 2.0, p)?
        / (pochhammer((n * (d + 1.0) + 1.0) / 2.0, p)?
            * pochhammer(((n + 1.0) * d + 2.0) / 2.0, p)?))
}

/// E[Omega^(2p)] from the Pochhammer form.
pub fn moment_omega_even_pochhammer(p: u32, cfg: BallConfig) -> Result<f64> {
    let (d, n) = (cfg.df(), cfg.nf());
    let p = p as f64;
    Ok(
        pochhammer(n * d / 2.0, p)? * pochhammer((n * d + 1.0) / 2.0, p)?
            / (pochhammer((n * (d + 1.0) + 1.0) / 2.0, p)?
                * pochhammer(((n + 1.0) * d + 2.0) / 2.0, p)?),
    )
}

/// E[H^2] = (d - n) / ((n + 1) d + 2).
pub fn moment_h2(cfg: BallConfig) -> f64 {
    (cfg.df() - cfg.nf()) / ((cfg.nf() + 1.0) * cfg.df() + 2.0)
}

/// E[Delta_c^k] by quadrature over x ~ Be(n, nd + 1).
///
/// For even k the hypergeometric factor is a polynomial in 1 - x^2; odd and
/// non-integer orders go through the general series and are not backed by a
/// closed form.
pub fn moment_delta_c(k: f64, cfg: BallConfig) -> Result<f64> {
    check_order(k)?;
    let (d, n) = (cfg.df(), cfg.nf());
    let even = k == k.round() && (k as u64) % 2 == 0;
    if !even {
        log::debug!("E[Delta_c^{k}] has no closed form; using quadrature for {cfg}");
    }
    let ln_b = ln_beta(n, n * d + 1.0)?;
    let (a, b, c) = (
        n * (d + 1.0) / 2.0 + 1.0,
        -k / 2.0,
        d * (n + 1.0) / 2.0 + 1.0,
    );
    let mut failure = None;
    let v = integrate(
        |x: f64| {
            if x <= 0.0 || x >= 1.0 {
                return 0.0;
            }
            match gauss_2f1(a, b, c, 1.0 - x * x) {
                Ok(f) => ((n - 1.0) * x.ln() + n * d * (-x).ln_1p() - ln_b).exp() * f,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        &QuadOptions::with_tol(0.0, 1e-13),
    )?
    .value;
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// E[Delta_c^k] for even k >= 2: exact for k = 2, 4 and for n = d, by
/// quadrature otherwise.
pub fn moment_delta_c_even(k: u32, cfg: BallConfig) -> Result<f64> {
    if k < 2 || k % 2 != 0 {
        return moment_delta_c(k as f64, cfg);
    }
    if cfg.n == cfg.d {
        let d = cfg.df();
        return Ok(
            (ln_gamma_ratio(d, k as f64)? - ln_gamma_ratio(d * d + d + 1.0, k as f64)?).exp(),
        );
    }
    if k <= 4 {
        if let Ok(q) = delta_c_moment_exact(cfg, k) {
            return Ok(to_f64(&q));
        }
    }
    moment_delta_c(k as f64, cfg)
}

/// E[(1 - Delta_c^2)^k] for integer k >= 0.
pub fn moment_one_minus_delta_c2(k: u32, cfg: BallConfig) -> Result<f64> {
    let (d, n) = (cfg.df(), cfg.nf());
    let kf = k as f64;
    let front = pochhammer(1.0 + n * (d + 1.0) / 2.0, kf)?
        / pochhammer(1.0 + d * (n + 1.0) / 2.0, kf)?
        * pochhammer(n * d + 1.0, n)?
        / pochhammer(n * d + 1.0 + kf, n)?;
    Ok(front * gauss_2f1(-kf, n, n * (d + 1.0) + kf + 1.0, -1.0)?)
}

/// Large-d limits of (E[Delta^k], E[Omega^k], E[Sigma^k]) at fixed n.
pub fn asymptotic_moment_limits(k: f64, n: usize) -> Result<(f64, f64, f64)> {
    if n < 1 || !(k >= 1.0) {
        return Err(Error::domain(format!(
            "need n >= 1 and k >= 1, got n = {n}, k = {k}"
        )));
    }
    let nf = n as f64;
    let l = (nf / (nf + 1.0)).powf(k / 2.0);
    Ok((0.0, l, l))
}
