use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::moments::{moment_delta, moment_delta_c, moment_omega, moment_sigma};
use super::pdf::{pdf_delta, pdf_delta_c, pdf_h, pdf_omega, pdf_r, pdf_sigma};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::reg_inc_beta;
use crate::{BallConfig, Error, Result};

/// Scalar circumsphere quantities with a univariate law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Var {
    Omega,
    Delta,
    H,
    DeltaC,
    Sigma,
    R,
}

impl Var {
    pub const ALL: [Var; 6] = [
        Var::Omega,
        Var::Delta,
        Var::H,
        Var::DeltaC,
        Var::Sigma,
        Var::R,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Var::Omega => "omega",
            Var::Delta => "delta",
            Var::H => "h",
            Var::DeltaC => "delta_c",
            Var::Sigma => "sigma",
            Var::R => "r",
        }
    }

    /// Whether the law is non-degenerate for `cfg` (h and r need n < d).
    pub fn defined_for(self, cfg: BallConfig) -> bool {
        !matches!(self, Var::H | Var::R) || cfg.n < cfg.d
    }

    pub fn pdf(self, x: f64, cfg: BallConfig) -> Result<f64> {
        match self {
            Var::Omega => pdf_omega(x, cfg),
            Var::Delta => pdf_delta(x, cfg),
            Var::H => pdf_h(x, cfg),
            Var::DeltaC => pdf_delta_c(x, cfg),
            Var::Sigma => pdf_sigma(x, cfg),
            Var::R => pdf_r(x, cfg),
        }
    }

    /// Closed-form cdf when the law is a transformed beta.
    fn cdf_closed(self, x: f64, cfg: BallConfig) -> Option<Result<f64>> {
        let (d, n) = (cfg.df(), cfg.nf());
        match self {
            Var::Sigma => Some(reg_inc_beta(
                x * x,
                n * (d + 1.0) / 2.0,
                1.0 + (d - n) / 2.0,
            )),
            Var::H if cfg.n < cfg.d => Some(reg_inc_beta(
                x * x,
                (d - n) / 2.0,
                1.0 + n * (d + 1.0) / 2.0,
            )),
            Var::R if cfg.n < cfg.d => Some(reg_inc_beta(
                x * x,
                1.0 + n * (d + 1.0) / 2.0,
                (d - n) / 2.0,
            )),
            Var::DeltaC if cfg.n == cfg.d => Some(reg_inc_beta(x, d, d * d + 1.0)),
            _ => None,
        }
    }

    /// P(X <= x); 0 below the support and 1 above it.
    pub fn cdf(self, x: f64, cfg: BallConfig) -> Result<f64> {
        if !self.defined_for(cfg) {
            return Err(Error::domain(format!(
                "{} is degenerate for {cfg}",
                self.name()
            )));
        }
        if x.is_nan() {
            return Err(Error::domain("cdf argument is NaN"));
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x >= 1.0 {
            return Ok(1.0);
        }
        if let Some(v) = self.cdf_closed(x, cfg) {
            return v;
        }
        self.integrate_pdf(0.0, x, cfg)
    }

    fn integrate_pdf(self, a: f64, b: f64, cfg: BallConfig) -> Result<f64> {
        let mut failure = None;
        let v = integrate(
            |t| match self.pdf(t, cfg) {
                Ok(p) => p,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            a,
            b,
            &QuadOptions::with_tol(1e-15, 1e-11),
        )?
        .value;
        match failure {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    /// Cdf at each of the ascending `edges`, built from per-interval
    /// integrals when no closed form exists.
    pub fn cdf_on_edges(self, edges: &[f64], cfg: BallConfig) -> Result<Vec<f64>> {
        if edges.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::domain("edges must be ascending"));
        }
        if !self.defined_for(cfg) {
            return Err(Error::domain(format!(
                "{} is degenerate for {cfg}",
                self.name()
            )));
        }
        if self.cdf_closed(0.5, cfg).is_some() {
            return edges.iter().map(|&x| self.cdf(x, cfg)).collect();
        }
        let mut out = Vec::with_capacity(edges.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &x in edges {
            let c = x.clamp(0.0, 1.0);
            if c > prev {
                acc += self.integrate_pdf(prev, c, cfg)?;
                prev = c;
            }
            out.push(if x <= 0.0 {
                0.0
            } else if x >= 1.0 {
                1.0
            } else {
                acc.min(1.0)
            });
        }
        Ok(out)
    }

    /// Analytic E[X^k] where available.
    pub fn moment(self, k: f64, cfg: BallConfig) -> Result<f64> {
        match self {
            Var::Omega => moment_omega(k, cfg),
            Var::Delta => moment_delta(k, cfg),
            Var::Sigma => moment_sigma(k, cfg),
            Var::DeltaC => moment_delta_c(k, cfg),
            Var::H | Var::R => {
                if !self.defined_for(cfg) {
                    return Err(Error::domain(format!(
                        "{} is degenerate for {cfg}",
                        self.name()
                    )));
                }
                // H^2 and R^2 are beta variates
                let (d, n) = (cfg.df(), cfg.nf());
                let (a, b) = if self == Var::H {
                    ((d - n) / 2.0, 1.0 + n * (d + 1.0) / 2.0)
                } else {
                    (1.0 + n * (d + 1.0) / 2.0, (d - n) / 2.0)
                };
                let lg = crate::specfun::ln_gamma_ratio;
                Ok((lg(a, k / 2.0)? - lg(a + b, k / 2.0)?).exp())
            }
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Var::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain(format!("unknown variable '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::quad;

    fn cfg(d: usize, n: usize) -> BallConfig {
        BallConfig::new(d, n).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for v in Var::ALL {
            assert_eq!(v.name().parse::<Var>().unwrap(), v);
        }
        assert!("nope".parse::<Var>().is_err());
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for c in [cfg(3, 2), cfg(5, 3), cfg(4, 4), cfg(6, 1)] {
            for v in Var::ALL.into_iter().filter(|v| v.defined_for(c)) {
                for x in [0.2, 0.5, 0.85] {
                    let a = v.cdf(x, c).unwrap();
                    let b = v.integrate_pdf(0.0, x, c).unwrap();
                    assert!((a - b).abs() < 1e-8, "{v} {c} at {x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn edges_accumulate() {
        let c = cfg(4, 2);
        let edges: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
        for v in [Var::Omega, Var::Delta, Var::H] {
            let e = v.cdf_on_edges(&edges, c).unwrap();
            assert_eq!(e[0], 0.0);
            assert_eq!(*e.last().unwrap(), 1.0);
            assert!((e[49] - 1.0).abs() < 1e-3 || e[49] < 1.0);
            for (x, y) in edges.iter().zip(&e).step_by(7) {
                assert!((v.cdf(*x, c).unwrap() - y).abs() < 1e-10, "{v} at {x}");
            }
        }
        let e = Var::Omega.cdf_on_edges(&[-1.0, 0.5, 2.0], c).unwrap();
        assert_eq!(e[0], 0.0);
        assert_eq!(e[2], 1.0);
        assert!(Var::Omega.cdf_on_edges(&[0.5, 0.2], c).is_err());
    }

    #[test]
    fn moments_match_densities() {
        let c = cfg(5, 2);
        for v in Var::ALL {
            for k in 1..=3 {
                let q = quad(|x| x.powi(k) * v.pdf(x, c).unwrap(), 0.0, 1.0).unwrap();
                let m = v.moment(k as f64, c).unwrap();
                assert!((q - m).abs() < 1e-7, "{v} k = {k}");
            }
        }
    }

    #[test]
    fn degenerate_variables() {
        let c = cfg(3, 3);
        assert!(Var::H.cdf(0.5, c).is_err());
        assert!(Var::R.moment(1.0, c).is_err());
    }
}
