use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::sync::{OnceLock, RwLock};

use super::consts::constants;
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{beta_fn, gauss_2f1, ln_beta, reg_inc_beta};
use crate::{BallConfig, Error, Result};

fn open_unit(x: f64, what: &str) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!("{what} must lie in (0, 1), got {x}")));
    }
    Ok(())
}

fn half_ln_pi() -> f64 {
    0.5 * PI.ln()
}

/// Joint density of (delta, omega); zero outside the triangle
/// delta, omega > 0, delta + omega < 1.
pub fn joint_pdf_delta_omega(delta: f64, omega: f64, cfg: BallConfig) -> f64 {
    if !(delta > 0.0 && omega > 0.0 && delta + omega < 1.0) {
        return 0.0;
    }
    let (d, n) = (cfg.df(), cfg.nf());
    let s = delta + omega;
    (constants(cfg).ln_k
        + (n - 1.0) * delta.ln()
        + (n * d - 1.0) * omega.ln()
        + (d - n) / 2.0 * (-s * s).ln_1p())
    .exp()
}

/// Density of the rescaled pair (delta / r, omega / r), a Dir(n, nd, 1) marginal.
pub fn rescaled_joint_pdf(delta_r: f64, omega_r: f64, cfg: BallConfig) -> Result<f64> {
    if !(delta_r > 0.0 && omega_r > 0.0 && delta_r + omega_r < 1.0) {
        return Err(Error::domain(format!(
            "rescaled pair must satisfy 0 < delta_r, omega_r and delta_r + omega_r < 1, got ({delta_r}, {omega_r})"
        )));
    }
    let (d, n) = (cfg.df(), cfg.nf());
    Ok(((n * (d + 1.0)).ln() - ln_beta(n, n * d)?
        + (n - 1.0) * delta_r.ln()
        + (n * d - 1.0) * omega_r.ln())
    .exp())
}

/// Conditional density of delta_r given omega_r: n delta_r^(n-1) / (1 - omega_r)^n.
pub fn conditional_pdf_delta_r_given_omega_r(
    delta_r: f64,
    omega_r: f64,
    cfg: BallConfig,
) -> Result<f64> {
    open_unit(omega_r, "omega_r")?;
    if !(delta_r > 0.0 && delta_r < 1.0 - omega_r) {
        return Err(Error::domain(format!(
            "delta_r must lie in (0, 1 - omega_r) = (0, {}), got {delta_r}",
            1.0 - omega_r
        )));
    }
    let n = cfg.nf();
    Ok(n * delta_r.powi(cfg.n as i32 - 1) / (1.0 - omega_r).powi(cfg.n as i32))
}

fn require_codim(cfg: BallConfig) -> Result<()> {
    if cfg.n == cfg.d {
        return Err(Error::domain(
            "for n = d the flat is the whole space and h = 0",
        ));
    }
    Ok(())
}

/// Density of h, the distance from the centre of the ball to the flat.
pub fn pdf_h(h: f64, cfg: BallConfig) -> Result<f64> {
    require_codim(cfg)?;
    open_unit(h, "h")?;
    let (d, n) = (cfg.df(), cfg.nf());
    let lb = ln_beta((d - n) / 2.0, 1.0 + n * (d + 1.0) / 2.0)?;
    Ok((LN_2 - lb + (d - n - 1.0) * h.ln() + n * (d + 1.0) / 2.0 * (-h * h).ln_1p()).exp())
}

/// Density of r = sqrt(1 - h^2), the radius of the flat's section of the ball.
pub fn pdf_r(r: f64, cfg: BallConfig) -> Result<f64> {
    require_codim(cfg)?;
    open_unit(r, "r")?;
    let (d, n) = (cfg.df(), cfg.nf());
    let lb = ln_beta((d - n) / 2.0, 1.0 + n * (d + 1.0) / 2.0)?;
    Ok((LN_2 - lb + (n * (d + 1.0) + 1.0) * r.ln() + (d - n - 2.0) / 2.0 * (-r * r).ln_1p()).exp())
}

/// Marginal density of delta from the (1 - delta) / 2 hypergeometric form.
pub fn pdf_delta(delta: f64, cfg: BallConfig) -> Result<f64> {
    open_unit(delta, "delta")?;
    let (d, n) = (cfg.df(), cfg.nf());
    let c = constants(cfg);
    let front = ((d + n) / 2.0 + n * d) * LN_2 - half_ln_pi()
        + c.ln_d
        + (n - 1.0) * delta.ln()
        + (n * d + (d - n) / 2.0) * (-delta).ln_1p();
    let f = gauss_2f1(
        (d - n) / 2.0 + 1.0,
        (n - d) / 2.0,
        n * d + (d - n) / 2.0 + 1.0,
        (1.0 - delta) / 2.0,
    )?;
    Ok(front.exp() * f)
}

/// Marginal density of delta from the 1 - delta^2 hypergeometric form.
pub fn pdf_delta_alt(delta: f64, cfg: BallConfig) -> Result<f64> {
    open_unit(delta, "delta")?;
    let (d, n) = (cfg.df(), cfg.nf());
    let c = constants(cfg);
    let front = n * LN_2 - half_ln_pi()
        + c.ln_d
        + (n - 1.0) * delta.ln()
        + (n * d + (d - n) / 2.0) * (-delta * delta).ln_1p();
    let f = gauss_2f1(
        n * d / 2.0,
        (n * d - n + d + 1.0) / 2.0,
        n * d + (d - n) / 2.0 + 1.0,
        1.0 - delta * delta,
    )?;
    Ok(front.exp() * f)
}

/// Marginal density of the circumradius from the (1 - omega) / 2 form.
pub fn pdf_omega(omega: f64, cfg: BallConfig) -> Result<f64> {
    open_unit(omega, "omega")?;
    let (d, n) = (cfg.df(), cfg.nf());
    let c = constants(cfg);
    let front = ((d + n) / 2.0 + n * d) * LN_2 - half_ln_pi()
        + c.ln_w
        + (n * d - 1.0) * omega.ln()
        + (d + n) / 2.0 * (-omega).ln_1p();
    let f = gauss_2f1(
        (d - n) / 2.0 + 1.0,
        (n - d) / 2.0,
        (d + n) / 2.0 + 1.0,
        (1.0 - omega) / 2.0,
    )?;
    Ok(front.exp() * f)
}

/// Marginal density of the circumradius from the 1 - omega^2 form.
pub fn pdf_omega_alt(omega: f64, cfg: BallConfig) -> Result<f64> {
    open_unit(omega, "omega")?;
    let (d, n) = (cfg.df(), cfg.nf());
    let c = constants(cfg);
    let front = n * d * LN_2 - half_ln_pi()
        + c.ln_w
        + (n * d - 1.0) * omega.ln()
        + (d + n) / 2.0 * (-omega * omega).ln_1p();
    let f = gauss_2f1(
        n / 2.0,
        (d + 1.0) / 2.0,
        (d + n) / 2.0 + 1.0,
        1.0 - omega * omega,
    )?;
    Ok(front.exp() * f)
}

/// Half-length density of a random chord through two uniform points:
/// 2^d d omega^(d-1) I_(1-omega^2)((d+1)/2, 1/2).
pub fn pdf_segment_half_length(omega: f64, d: usize) -> Result<f64> {
    open_unit(omega, "omega")?;
    let df = d as f64;
    Ok((df * LN_2 + df.ln() + (df - 1.0) * omega.ln()).exp()
        * reg_inc_beta(1.0 - omega * omega, (df + 1.0) / 2.0, 0.5)?)
}

/// Density of sigma = delta + omega.
pub fn pdf_sigma(sigma: f64, cfg: BallConfig) -> Result<f64> {
    open_unit(sigma, "sigma")?;
    let (d, n) = (cfg.df(), cfg.nf());
    let lb = ln_beta(n * (d + 1.0) / 2.0, 1.0 + (d - n) / 2.0)?;
    Ok(
        (LN_2 - lb + (n + n * d - 1.0) * sigma.ln() + (d - n) / 2.0 * (-sigma * sigma).ln_1p())
            .exp(),
    )
}

/// Joint density of (sigma, y) with y = delta - omega in (-sigma, sigma).
pub fn joint_pdf_sigma_y(sigma: f64, y: f64, cfg: BallConfig) -> f64 {
    if !(sigma > 0.0 && sigma < 1.0 && y > -sigma && y < sigma) {
        return 0.0;
    }
    let (d, n) = (cfg.df(), cfg.nf());
    (constants(cfg).ln_z
        + (n - 1.0) * (sigma + y).ln()
        + (n * d - 1.0) * (sigma - y).ln()
        + (d - n) / 2.0 * (-sigma * sigma).ln_1p())
    .exp()
}

/// Joint density of the rescaled (sigma_r, y_r).
pub fn joint_pdf_sigma_y_rescaled(sigma_r: f64, y_r: f64, cfg: BallConfig) -> f64 {
    if !(sigma_r > 0.0 && sigma_r < 1.0 && y_r > -sigma_r && y_r < sigma_r) {
        return 0.0;
    }
    let (d, n) = (cfg.df(), cfg.nf());
    (constants(cfg).ln_j + (n - 1.0) * (sigma_r + y_r).ln() + (n * d - 1.0) * (sigma_r - y_r).ln())
        .exp()
}

/// Density of delta_c, the distance from the centre of the ball to the
/// circumcentre.
///
/// For n < d this is a one-dimensional integral evaluated with the
/// substitution x = delta_c sin t, which removes the endpoint singularity of
/// (delta_c^2 - x^2)^((d-n-2)/2). For n = d it is the Be(d, d^2 + 1) density.
pub fn pdf_delta_c(delta_c: f64, cfg: BallConfig) -> Result<f64> {
    open_unit(delta_c, "delta_c")?;
    let (d, n) = (cfg.df(), cfg.nf());
    let Some(ln_e) = constants(cfg).ln_e else {
        return Ok(((d - 1.0) * delta_c.ln() + d * d * (-delta_c).ln_1p()
            - ln_beta(d, d * d + 1.0)?)
        .exp());
    };
    let (pn, pm) = (cfg.n as i32 - 1, (cfg.d - cfg.n) as i32 - 1);
    let (e1, e2) = (d * (n - 1.0) / 2.0, d * (n + 1.0) / 2.0);
    let inner = integrate(
        |t: f64| {
            let (s, c) = t.sin_cos();
            let x = delta_c * s;
            s.powi(pn) * c.max(0.0).powi(pm) * ((-x).ln_1p() * e1 - x.ln_1p() * e2).exp()
        },
        0.0,
        FRAC_PI_2,
        &QuadOptions::with_tol(0.0, 1e-12),
    )?
    .value;
    // x^(n-1) (delta_c^2 - x^2)^((d-n-2)/2) dx = delta_c^(d-2) sin^(n-1) cos^(d-n-1) dt
    Ok(
        (ln_e + (d - 1.0) * delta_c.ln() + n * (d + 1.0) / 2.0 * (-delta_c * delta_c).ln_1p())
            .exp()
            * inner,
    )
}

/// Unnormalised joint density of (delta_c, omega) on the quarter disk.
fn joint_delta_c_omega_unnormalised(delta_c: f64, omega: f64, cfg: BallConfig) -> f64 {
    let (d, n) = (cfg.df(), cfg.nf());
    let base = ((d - 1.0) * delta_c.ln() + (n * d - 1.0) * omega.ln()).exp();
    if cfg.n == cfg.d {
        // delta_c = delta, and the joint law lives on delta + omega < 1
        return if delta_c + omega < 1.0 { base } else { 0.0 };
    }
    let (p, q) = ((d - n) / 2.0, n / 2.0);
    let b = beta_fn(p, q).unwrap_or(f64::NAN);
    if delta_c + omega <= 1.0 {
        return base * b;
    }
    let dm = delta_c - omega;
    let dp = delta_c + omega;
    let beta = ((1.0 - dm * dm) * (dp * dp - 1.0) / (4.0 * omega * omega * delta_c * delta_c))
        .clamp(0.0, 1.0);
    // 1 - I_beta(p, q) = I_(1 - beta)(q, p), without the cancellation near beta = 1
    base * b * reg_inc_beta(1.0 - beta, q, p).unwrap_or(f64::NAN)
}

/// Integral over (a, b) after x = a + (b - a)(1 - cos t) / 2, which
/// smooths algebraic endpoint singularities such as sqrt(x - a).
pub(crate) fn integrate_cosine_map<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let half = 0.5 * (b - a);
    Ok(integrate(
        |t: f64| f(a + half * (1.0 - t.cos())) * half * t.sin(),
        0.0,
        PI,
        opts,
    )?
    .value)
}

fn joint_delta_c_omega_norm(cfg: BallConfig) -> Result<f64> {
    static CACHE: OnceLock<RwLock<HashMap<BallConfig, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().expect("norm cache poisoned").get(&cfg) {
        return Ok(*v);
    }
    // mass of the part below delta_c + omega = 1, known in closed form,
    // sets the absolute tolerance scale
    let (d, n) = (cfg.df(), cfg.nf());
    let mut ln_scale = ln_beta(d, n * d)? - (d + n * d).ln();
    if cfg.n < cfg.d {
        ln_scale += ln_beta((d - n) / 2.0, n / 2.0)?;
    }
    let scale = ln_scale.exp();
    let inner_opts = QuadOptions::with_tol(1e-15 * scale, 1e-12);
    let opts = QuadOptions::with_tol(1e-13 * scale, 1e-10);
    let mut failure = None;
    let total = integrate_cosine_map(
        |omega: f64| {
            let upper = (1.0 - omega * omega).max(0.0).sqrt();
            let split = (1.0 - omega).clamp(0.0, upper);
            let mut s = 0.0;
            for (a, b) in [(0.0, split), (split, upper)] {
                match integrate_cosine_map(
                    |x| joint_delta_c_omega_unnormalised(x, omega, cfg),
                    a,
                    b,
                    &inner_opts,
                ) {
                    Ok(v) => s += v,
                    Err(e) => failure = Some(e),
                }
            }
            s
        },
        0.0,
        1.0,
        &opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    cache
        .write()
        .expect("norm cache poisoned")
        .insert(cfg, total);
    Ok(total)
}

/// Joint density of (delta_c, omega) on the quarter disk delta_c^2 + omega^2 <= 1,
/// normalised numerically (the constant has no known closed form).
pub fn joint_pdf_delta_c_omega(delta_c: f64, omega: f64, cfg: BallConfig) -> Result<f64> {
    if !(delta_c > 0.0
        && delta_c < 1.0
        && omega > 0.0
        && omega < 1.0
        && delta_c * delta_c + omega * omega <= 1.0)
    {
        return Err(Error::domain(format!(
            "(delta_c, omega) = ({delta_c}, {omega}) is outside the open quarter disk"
        )));
    }
    Ok(joint_delta_c_omega_unnormalised(delta_c, omega, cfg) / joint_delta_c_omega_norm(cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::quad;

    fn cfg(d: usize, n: usize) -> BallConfig {
        BallConfig::new(d, n).unwrap()
    }

    fn all_cfgs(max_d: usize) -> Vec<BallConfig> {
        (1..=max_d)
            .flat_map(|d| (1..=d).map(move |n| cfg(d, n)))
            .collect()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn joint_density_special_cases() {
        let c11 = cfg(1, 1);
        assert!((joint_pdf_delta_omega(0.2, 0.3, c11) - 2.0).abs() < 1e-14);
        assert_eq!(joint_pdf_delta_omega(0.6, 0.6, c11), 0.0);
        for d in 1..=6 {
            let c = cfg(d, d);
            let df = d as f64;
            for (x, y) in [(0.1, 0.2), (0.3, 0.5), (0.05, 0.9)] {
                let dir = (((df * (df + 1.0)).ln() - ln_beta(df, df * df).unwrap())
                    + (df - 1.0) * f64::ln(x)
                    + (df * df - 1.0) * f64::ln(y))
                .exp();
                let v = joint_pdf_delta_omega(x, y, c);
                assert!((v - dir).abs() < 1e-12 * dir.max(1.0), "d = {d}");
            }
        }
    }

    #[test]
    fn joint_density_normalised() {
        for c in all_cfgs(6) {
            let total = quad(
                |w: f64| quad(|x| joint_pdf_delta_omega(x, w, c), 0.0, 1.0 - w).unwrap(),
                0.0,
                1.0,
            )
            .unwrap();
            assert!((total - 1.0).abs() < 1e-8, "{c}: {total}");
        }
    }

    #[test]
    fn rescaled_density_cases() {
        for d in 1..=5 {
            let df = d as f64;
            let v = rescaled_joint_pdf(0.3, 0.4, cfg(d, 1)).unwrap();
            assert!(close(v, df * (df + 1.0) * 0.4f64.powi(d as i32 - 1), 1e-13));
            if d >= 2 {
                // normalised Dir(2, 2d, 1) constant 2d (2d + 1) (2d + 2)
                let v = rescaled_joint_pdf(0.3, 0.4, cfg(d, 2)).unwrap();
                let k = 4.0 * df * (df + 1.0) * (2.0 * df + 1.0);
                assert!(close(v, k * 0.3 * 0.4f64.powi(2 * d as i32 - 1), 1e-13));
            }
        }
        for c in all_cfgs(5) {
            let total = quad(
                |w: f64| quad(|x| rescaled_joint_pdf(x, w, c).unwrap(), 0.0, 1.0 - w).unwrap(),
                0.0,
                1.0,
            )
            .unwrap();
            assert!((total - 1.0).abs() < 1e-10, "{c}");
        }
        assert!(rescaled_joint_pdf(0.6, 0.6, cfg(2, 1)).is_err());
    }

    #[test]
    fn conditional_is_bayes_quotient() {
        for c in all_cfgs(5) {
            let (d, n) = (c.df(), c.nf());
            for (x, w) in [(0.1, 0.2), (0.3, 0.6), (0.45, 0.5)] {
                let joint = rescaled_joint_pdf(x, w, c).unwrap();
                // omega_r ~ Be(nd, n + 1)
                let marg = crate::specfun::beta_pdf(w, n * d, n + 1.0).unwrap();
                let v = conditional_pdf_delta_r_given_omega_r(x, w, c).unwrap();
                assert!(close(v, joint / marg, 1e-10), "{c}");
            }
            let total = quad(
                |x| conditional_pdf_delta_r_given_omega_r(x, 0.3, c).unwrap(),
                0.0,
                0.7,
            )
            .unwrap();
            assert!((total - 1.0).abs() < 1e-12);
        }
        assert!(conditional_pdf_delta_r_given_omega_r(0.5, 0.6, cfg(2, 1)).is_err());
    }

    #[test]
    fn h_and_r_densities() {
        let c = cfg(3, 2);
        let scale = pdf_h(0.5, c).unwrap() / (1.0 - 0.25f64).powi(4);
        for h in [0.01, 0.2, 0.7, 0.95] {
            assert!(close(
                pdf_h(h, c).unwrap(),
                scale * (1.0 - h * h).powi(4),
                1e-13
            ));
        }
        for c in all_cfgs(8).into_iter().filter(|c| c.n < c.d) {
            let th = quad(|h| pdf_h(h, c).unwrap(), 0.0, 1.0).unwrap();
            assert!((th - 1.0).abs() < 1e-8, "{c}: {th}");
            if c.d - c.n != 1 {
                let tr = quad(|r| pdf_r(r, c).unwrap(), 0.0, 1.0).unwrap();
                assert!((tr - 1.0).abs() < 1e-8, "{c}: {tr}");
            }
            for r in [0.2f64, 0.5, 0.9] {
                let h = (1.0 - r * r).sqrt();
                let v = pdf_h(h, c).unwrap() * r / h;
                assert!(close(pdf_r(r, c).unwrap(), v, 1e-10), "{c}");
            }
        }
        assert!(pdf_h(0.5, cfg(3, 3)).is_err());
    }

    #[test]
    fn delta_density_forms() {
        for x in [0.1, 0.5, 0.9] {
            assert!(close(
                pdf_delta(x, cfg(1, 1)).unwrap(),
                2.0 * (1.0 - x),
                1e-13
            ));
        }
        for c in all_cfgs(8) {
            for i in 1..100 {
                let x = i as f64 / 100.0;
                let a = pdf_delta(x, c).unwrap();
                let b = pdf_delta_alt(x, c).unwrap();
                assert!(
                    (a - b).abs() <= 1e-9 * a.abs().max(1.0),
                    "{c} at {x}: {a} vs {b}"
                );
            }
        }
        assert!(pdf_delta(0.0, cfg(2, 1)).is_err());
        assert!(pdf_delta(1.0, cfg(2, 1)).is_err());
    }

    #[test]
    fn omega_density_forms() {
        for c in all_cfgs(8) {
            for i in 1..100 {
                let x = i as f64 / 100.0;
                let a = pdf_omega(x, c).unwrap();
                let b = pdf_omega_alt(x, c).unwrap();
                assert!(
                    (a - b).abs() <= 1e-9 * a.abs().max(1.0),
                    "{c} at {x}: {a} vs {b}"
                );
            }
        }
        for d in 1..=8 {
            for x in [0.05, 0.3, 0.77, 0.99] {
                let a = pdf_omega(x, cfg(d, 1)).unwrap();
                let b = pdf_segment_half_length(x, d).unwrap();
                assert!(close(a, b, 1e-12), "d = {d} at {x}: {a} vs {b}");
            }
        }
        assert!((pdf_omega(0.5, cfg(2, 2)).unwrap() - 1.875).abs() < 1e-13);
    }

    #[test]
    fn marginals_integrate_joint_density() {
        for c in [cfg(2, 1), cfg(3, 2), cfg(5, 3), cfg(4, 4), cfg(6, 2)] {
            for x in [0.1, 0.3, 0.5, 0.7] {
                let md = quad(|w| joint_pdf_delta_omega(x, w, c), 0.0, 1.0 - x).unwrap();
                assert!(
                    (md - pdf_delta(x, c).unwrap()).abs() < 1e-7 * md.max(1.0),
                    "{c} delta {x}"
                );
                let mw = quad(|y| joint_pdf_delta_omega(y, x, c), 0.0, 1.0 - x).unwrap();
                assert!(
                    (mw - pdf_omega(x, c).unwrap()).abs() < 1e-7 * mw.max(1.0),
                    "{c} omega {x}"
                );
            }
        }
    }

    #[test]
    fn sigma_y_density_normalised() {
        for c in [cfg(1, 1), cfg(2, 1), cfg(3, 2), cfg(4, 4), cfg(6, 3)] {
            let t = quad(
                |s: f64| quad(|y| joint_pdf_sigma_y(s, y, c), -s, s).unwrap(),
                0.0,
                1.0,
            )
            .unwrap();
            assert!((t - 1.0).abs() < 1e-8, "{c}: {t}");
            let t = quad(
                |s: f64| quad(|y| joint_pdf_sigma_y_rescaled(s, y, c), -s, s).unwrap(),
                0.0,
                1.0,
            )
            .unwrap();
            assert!((t - 1.0).abs() < 1e-8, "{c}: {t}");
            // sigma_r ~ Be(n(d + 1), 1)
            let m = c.nf() * (c.df() + 1.0);
            let s = 0.7f64;
            let v = quad(|y| joint_pdf_sigma_y_rescaled(s, y, c), -s, s).unwrap();
            assert!((v - m * s.powf(m - 1.0)).abs() < 1e-9 * v.max(1.0), "{c}");
        }
    }

    #[test]
    fn sigma_density() {
        for d in 1..=6 {
            let df = d as f64;
            for s in [0.2, 0.6, 0.95] {
                let v = pdf_sigma(s, cfg(d, d)).unwrap();
                assert!(close(
                    v,
                    df * (df + 1.0) * f64::powf(s, df * (df + 1.0) - 1.0),
                    1e-12
                ));
            }
        }
        for c in all_cfgs(8) {
            let t = quad(|s| pdf_sigma(s, c).unwrap(), 0.0, 1.0).unwrap();
            assert!((t - 1.0).abs() < 1e-10, "{c}");
            for s in [0.3, 0.8] {
                let m = quad(|y| joint_pdf_sigma_y(s, y, c), -s, s).unwrap();
                assert!(
                    (m - pdf_sigma(s, c).unwrap()).abs() < 1e-8 * m.max(1.0),
                    "{c}"
                );
            }
        }
    }

    #[test]
    fn delta_c_density() {
        for d in 2..=7 {
            for x in [0.05, 0.3, 0.6, 0.9] {
                let a = pdf_delta_c(x, cfg(d, 1)).unwrap();
                let b = pdf_omega(x, cfg(d, 1)).unwrap();
                assert!(
                    (a - b).abs() < 1e-8 * b.max(1.0),
                    "d = {d} at {x}: {a} vs {b}"
                );
            }
        }
        for x in [0.1, 0.4, 0.8] {
            let v = pdf_delta_c(x, cfg(2, 2)).unwrap();
            assert!(close(v, 30.0 * x * (1.0 - x).powi(4), 1e-13));
        }
        for c in all_cfgs(8) {
            let t = quad(|x| pdf_delta_c(x, c).unwrap(), 0.0, 1.0).unwrap();
            assert!((t - 1.0).abs() < 1e-6, "{c}: {t}");
        }
    }

    #[test]
    fn delta_c_omega_joint_density() {
        for c in [cfg(3, 2), cfg(4, 1), cfg(5, 3), cfg(3, 3)] {
            // marginals reproduce the univariate laws
            for x in [0.2f64, 0.5, 0.8] {
                let upper = (1.0 - x * x).sqrt();
                let split = 1.0 - x;
                let opts = QuadOptions::with_tol(0.0, 1e-10);
                let f = |y: f64| joint_pdf_delta_c_omega(y, x, c).unwrap_or(0.0);
                let mw = integrate_cosine_map(f, 0.0, split, &opts).unwrap()
                    + integrate_cosine_map(f, split, upper, &opts).unwrap();
                let ew = pdf_omega(x, c).unwrap();
                assert!(
                    (mw - ew).abs() < 1e-6 * ew.max(1.0),
                    "{c} omega {x}: {mw} vs {ew}"
                );
                let g = |w: f64| joint_pdf_delta_c_omega(x, w, c).unwrap_or(0.0);
                let md = integrate_cosine_map(g, 0.0, split, &opts).unwrap()
                    + integrate_cosine_map(g, split, upper, &opts).unwrap();
                let ed = pdf_delta_c(x, c).unwrap();
                assert!(
                    (md - ed).abs() < 1e-6 * ed.max(1.0),
                    "{c} delta_c {x}: {md} vs {ed}"
                );
            }
            // below the line delta_c + omega = 1 the slice at fixed omega is ~ delta_c^(d-1)
            let w = 0.4;
            let r1 = joint_pdf_delta_c_omega(0.2, w, c).unwrap()
                / joint_pdf_delta_c_omega(0.5, w, c).unwrap();
            assert!(close(r1, (0.2f64 / 0.5).powi(c.d as i32 - 1), 1e-12));
        }
        assert!(joint_pdf_delta_c_omega(0.9, 0.9, cfg(3, 2)).is_err());
    }
}
