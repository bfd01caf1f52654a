use serde::{Deserialize, Serialize};

use super::dist::BetaSampler;
use super::RngStream;
use crate::specfun::{gauss_2f1, ln_beta};
use crate::{BallConfig, Error, Result};

/// Shape parameters of a beta law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaShape {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaShape {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::domain(format!(
                "beta shapes must be positive, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }
}

/// Two independent beta laws whose product is the variable of interest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaPair {
    pub first: BetaShape,
    pub second: BetaShape,
}

impl BetaPair {
    pub fn new(first: (f64, f64), second: (f64, f64)) -> Result<Self> {
        Ok(Self {
            first: BetaShape::new(first.0, first.1)?,
            second: BetaShape::new(second.0, second.1)?,
        })
    }

    pub fn sampler(&self) -> Result<BetaProductSampler> {
        Ok(BetaProductSampler {
            first: BetaSampler::new(self.first.alpha, self.first.beta)?,
            second: BetaSampler::new(self.second.alpha, self.second.beta)?,
        })
    }

    /// Raw moment E[(X1 X2)^k].
    pub fn moment(&self, k: f64) -> f64 {
        let m = |s: &BetaShape| {
            (ln_beta(s.alpha + k, s.beta).unwrap_or(f64::NAN)
                - ln_beta(s.alpha, s.beta).unwrap_or(f64::NAN))
            .exp()
        };
        m(&self.first) * m(&self.second)
    }
}

/// Draws X1 X2 for a [`BetaPair`].
#[derive(Debug, Clone, Copy)]
pub struct BetaProductSampler {
    first: BetaSampler,
    second: BetaSampler,
}

impl BetaProductSampler {
    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        self.first.sample(stream) * self.second.sample(stream)
    }
}

/// Density of X1 X2 with X1 ~ Be(p1) and X2 ~ Be(p2) independent.
pub fn beta_product_pdf(x: f64, p1: BetaShape, p2: BetaShape) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!(
            "beta product density needs x in (0, 1), got {x}"
        )));
    }
    let (a1, b1, a2, b2) = (p1.alpha, p1.beta, p2.alpha, p2.beta);
    let ln_front = ln_beta(b1, b2)? - ln_beta(a1, b1)? - ln_beta(a2, b2)?
        + (a1 - 1.0) * x.ln()
        + (b1 + b2 - 1.0) * (-x).ln_1p();
    Ok(ln_front.exp() * gauss_2f1(a1 + b1 - a2, b2, b1 + b2, 1.0 - x)?)
}

/// Both beta-product representations of a density proportional to
/// x^(s-1) (1-x)^(c-1) 2F1(a, b; c; 1-x).
pub fn invert_beta_product(a: f64, b: f64, c: f64, s: f64) -> Result<(BetaPair, BetaPair)> {
    let ok = a > 0.0 && b > 0.0 && c > 0.0 && s > 0.0 && c > a && c > b && c + s > a + b && a != b;
    if !ok || ![a, b, c, s].iter().all(|v| v.is_finite()) {
        return Err(Error::domain(format!(
            "beta-product inversion needs a, b, c, s > 0, c > a, c > b, c + s > a + b, a != b; got a={a}, b={b}, c={c}, s={s}"
        )));
    }
    let e = c + s - a - b;
    Ok((
        BetaPair::new((s, c - b), (e, b))?,
        BetaPair::new((s, c - a), (e, a))?,
    ))
}

/// Which of the two product representations of Delta^2 to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DeltaRep {
    #[default]
    R1,
    R2,
}

/// Which of the two product representations of Omega^2 to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OmegaRep {
    #[default]
    S1,
    S2,
}

/// Beta pairs whose product is distributed as Delta^2.
pub fn delta_pair(cfg: BallConfig, rep: DeltaRep) -> BetaPair {
    let (d, n) = (cfg.df(), cfg.nf());
    let pair = match rep {
        DeltaRep::R1 => BetaPair::new(
            (n / 2.0, (n * d - n + d + 2.0) / 2.0),
            ((n + 1.0) / 2.0, n * d / 2.0),
        ),
        DeltaRep::R2 => BetaPair::new(
            (n / 2.0, (n * d + 1.0) / 2.0),
            ((n + 1.0) / 2.0, (n * d - n + d + 1.0) / 2.0),
        ),
    };
    pair.expect("shapes are positive for 1 <= n <= d")
}

/// Beta pairs whose product is distributed as Omega^2.
pub fn omega_pair(cfg: BallConfig, rep: OmegaRep) -> BetaPair {
    let (d, n) = (cfg.df(), cfg.nf());
    let pair = match rep {
        OmegaRep::S1 => BetaPair::new(
            (n * d / 2.0, (n + 1.0) / 2.0),
            ((n * d + 1.0) / 2.0, (d + 1.0) / 2.0),
        ),
        OmegaRep::S2 => BetaPair::new(
            (n * d / 2.0, (d + 2.0) / 2.0),
            ((n * d + 1.0) / 2.0, n / 2.0),
        ),
    };
    pair.expect("shapes are positive for 1 <= n <= d")
}

/// Draws Delta as the geometric mean of the R1 pair.
pub fn sample_delta(cfg: BallConfig, stream: &mut RngStream) -> f64 {
    sample_delta_with(cfg, DeltaRep::R1, stream)
}

pub fn sample_delta_with(cfg: BallConfig, rep: DeltaRep, stream: &mut RngStream) -> f64 {
    delta_pair(cfg, rep)
        .sampler()
        .expect("valid shapes")
        .sample(stream)
        .sqrt()
}

/// Draws Omega as the geometric mean of the S1 pair.
pub fn sample_omega(cfg: BallConfig, stream: &mut RngStream) -> f64 {
    sample_omega_with(cfg, OmegaRep::S1, stream)
}

pub fn sample_omega_with(cfg: BallConfig, rep: OmegaRep, stream: &mut RngStream) -> f64 {
    omega_pair(cfg, rep)
        .sampler()
        .expect("valid shapes")
        .sample(stream)
        .sqrt()
}

/// Half the distance between two uniform points on the unit sphere of
/// R^(d+2); its square is Be((d+1)/2, (d+1)/2).
pub fn sample_chord_half_surface(d: usize, stream: &mut RngStream) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("chord sampler needs d >= 2"));
    }
    let h = (d as f64 + 1.0) / 2.0;
    Ok(BetaSampler::new(h, h)?.sample(stream).sqrt())
}

/// Draws Delta_C^2 = Z + Delta_r^2 (1 - Z) with Z ~ Be((d-n)/2, 1 + n(d+1)/2)
/// and Delta_r ~ Be(n, nd+1) independent.
pub fn sample_delta_c_squared(cfg: BallConfig, stream: &mut RngStream) -> Result<f64> {
    Ok(DeltaCSquaredSampler::new(cfg)?.sample(stream))
}

#[derive(Debug, Clone, Copy)]
pub struct DeltaCSquaredSampler {
    z: BetaSampler,
    r: BetaSampler,
}

impl DeltaCSquaredSampler {
    pub fn new(cfg: BallConfig) -> Result<Self> {
        if cfg.n == cfg.d {
            return Err(Error::domain(
                "Delta_C^2 decomposition needs n < d; for n = d Delta_C ~ Be(d, d^2 + 1)",
            ));
        }
        let (d, n) = (cfg.df(), cfg.nf());
        Ok(Self {
            z: BetaSampler::new((d - n) / 2.0, 1.0 + n * (d + 1.0) / 2.0)?,
            r: BetaSampler::new(n, n * d + 1.0)?,
        })
    }

    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        let z = self.z.sample(stream);
        let r = self.r.sample(stream);
        z + r * r * (1.0 - z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, quad, QuadOptions};
    use crate::specfun::{gauss_2f1, reg_inc_beta};
    use crate::stats::{ks_critical, ks_one_sample, ks_two_sample};

    const N: usize = 1_000_000;

    fn cfg(d: usize, n: usize) -> BallConfig {
        BallConfig::new(d, n).unwrap()
    }

    fn shape(a: f64, b: f64) -> BetaShape {
        BetaShape::new(a, b).unwrap()
    }

    #[test]
    fn uniform_product_density_is_minus_log() {
        for x in [1e-6, 0.01, 0.2, 0.5, 0.9, 0.999] {
            let v = beta_product_pdf(x, shape(1.0, 1.0), shape(1.0, 1.0)).unwrap();
            // oracle: P(U1 U2 in dx) = int_x^1 du / u
            let o = quad(|u: f64| 1.0 / u, x, 1.0).unwrap();
            assert!((v - o).abs() < 1e-10 * o.max(1.0), "x = {x}: {v} vs {o}");
        }
    }

    #[test]
    fn product_density_normalised_and_symmetric() {
        let pairs = [
            ((2.0, 3.0), (1.5, 0.7)),
            ((0.5, 2.5), (3.0, 1.0)),
            ((1.0, 3.5), (1.5, 4.0)),
        ];
        for (p, q) in pairs {
            let (p, q) = (shape(p.0, p.1), shape(q.0, q.1));
            let total = integrate(
                |t: f64| {
                    // x = t^4 tames the x^(alpha-1) endpoint behaviour
                    let x = t.powi(4);
                    if x <= 0.0 || x >= 1.0 {
                        return 0.0;
                    }
                    4.0 * t.powi(3) * beta_product_pdf(x, p, q).unwrap()
                },
                0.0,
                1.0,
                &QuadOptions::with_tol(1e-12, 1e-11),
            )
            .unwrap()
            .value;
            assert!((total - 1.0).abs() < 1e-8, "{p:?} {q:?}: {total}");
            for x in [0.05, 0.3, 0.6, 0.95] {
                let a = beta_product_pdf(x, p, q).unwrap();
                let b = beta_product_pdf(x, q, p).unwrap();
                assert!(
                    (a - b).abs() < 1e-10 * a.abs().max(1.0),
                    "x = {x}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn inversion_examples() {
        let (p, q) = invert_beta_product(3.0, 4.0, 9.0, 1.0).unwrap();
        assert_eq!(p, BetaPair::new((1.0, 5.0), (3.0, 4.0)).unwrap());
        assert_eq!(q, BetaPair::new((1.0, 6.0), (3.0, 3.0)).unwrap());
        let (p, q) = invert_beta_product(1.0, 2.0, 4.5, 3.0).unwrap();
        assert_eq!(p, BetaPair::new((3.0, 2.5), (4.5, 2.0)).unwrap());
        assert_eq!(q, BetaPair::new((3.0, 3.5), (4.5, 1.0)).unwrap());
        assert!(invert_beta_product(2.0, 2.0, 5.0, 1.0).is_err());
        assert!(invert_beta_product(3.0, 1.0, 2.5, 1.0).is_err());
        assert!(invert_beta_product(1.0, 2.0, 3.0, 0.0).is_err());
    }

    #[test]
    fn inversion_reproduces_the_delta_and_omega_pairs() {
        // The squared-variable densities have the form x^(s-1)(1-x)^(c-1) 2F1(a,b;c;1-x)
        for d in 2..=8 {
            for n in 1..=d {
                let c = cfg(d, n);
                let (df, nf) = (d as f64, n as f64);
                let (r1, r2) = invert_beta_product(
                    nf * df / 2.0,
                    (nf * df - nf + df + 1.0) / 2.0,
                    nf * df + (df - nf) / 2.0 + 1.0,
                    nf / 2.0,
                )
                .unwrap();
                assert_eq!(r1, delta_pair(c, DeltaRep::R2), "{c}");
                assert_eq!(r2, delta_pair(c, DeltaRep::R1), "{c}");
                let (s1, s2) = invert_beta_product(
                    nf / 2.0,
                    (df + 1.0) / 2.0,
                    (df + nf + 2.0) / 2.0,
                    nf * df / 2.0,
                )
                .unwrap();
                assert_eq!(s1, omega_pair(c, OmegaRep::S1), "{c}");
                assert_eq!(s2, omega_pair(c, OmegaRep::S2), "{c}");
            }
        }
    }

    #[test]
    fn product_density_matches_hypergeometric_form() {
        // Delta^2 of (3, 2): s = 1, a = 3, b = 4, c = 7.5
        let (s, a, b, c) = (1.0f64, 3.0, 4.0, 7.5f64);
        let pair = delta_pair(cfg(3, 2), DeltaRep::R1);
        let norm = quad(
            |x: f64| {
                x.powf(s - 1.0) * (1.0 - x).powf(c - 1.0) * gauss_2f1(a, b, c, 1.0 - x).unwrap()
            },
            0.0,
            1.0,
        )
        .unwrap();
        for x in [0.1f64, 0.4, 0.8] {
            let direct =
                x.powf(s - 1.0) * (1.0 - x).powf(c - 1.0) * gauss_2f1(a, b, c, 1.0 - x).unwrap()
                    / norm;
            let v = beta_product_pdf(x, pair.first, pair.second).unwrap();
            assert!(
                (v - direct).abs() < 1e-10 * direct,
                "x = {x}: {v} vs {direct}"
            );
        }
    }

    #[test]
    fn representations_agree_in_law() {
        let c = cfg(3, 2);
        let mut s = RngStream::new(101, 0);
        let crit = ks_critical(0.01, N) * 2f64.sqrt();
        let mut a: Vec<f64> = (0..N)
            .map(|_| sample_delta_with(c, DeltaRep::R1, &mut s))
            .collect();
        let mut b: Vec<f64> = (0..N)
            .map(|_| sample_delta_with(c, DeltaRep::R2, &mut s))
            .collect();
        assert!(ks_two_sample(&mut a, &mut b) < crit);
        let mut a: Vec<f64> = (0..N)
            .map(|_| sample_omega_with(c, OmegaRep::S1, &mut s))
            .collect();
        let mut b: Vec<f64> = (0..N)
            .map(|_| sample_omega_with(c, OmegaRep::S2, &mut s))
            .collect();
        assert!(ks_two_sample(&mut a, &mut b) < crit);
    }

    #[test]
    fn omega_for_full_dimension_is_beta() {
        for d in [2usize, 3] {
            let mut s = RngStream::new(7, d as u64);
            let sampler = omega_pair(cfg(d, d), OmegaRep::S1).sampler().unwrap();
            let mut xs: Vec<f64> = (0..N).map(|_| sampler.sample(&mut s).sqrt()).collect();
            let df = d as f64;
            let dist = ks_one_sample(&mut xs, |x| reg_inc_beta(x, df * df, df + 1.0).unwrap());
            assert!(dist < ks_critical(0.01, N), "d = {d}: {dist}");
        }
    }

    #[test]
    fn even_moments_of_representations() {
        let c = cfg(4, 2);
        let mut s = RngStream::new(8, 8);
        let dp = delta_pair(c, DeltaRep::R1).sampler().unwrap();
        let op = omega_pair(c, OmegaRep::S1).sampler().unwrap();
        let xs: Vec<f64> = (0..N).map(|_| dp.sample(&mut s)).collect();
        let ys: Vec<f64> = (0..N).map(|_| op.sample(&mut s)).collect();
        for p in 1..=2u32 {
            for (v, exact) in [
                (&xs, crate::rational::delta_even_moment_exact(c, p).unwrap()),
                (&ys, crate::rational::omega_even_moment_exact(c, p).unwrap()),
            ] {
                let e = crate::rational::to_f64(&exact);
                let m = v.iter().map(|x| x.powi(p as i32)).sum::<f64>() / N as f64;
                let m2 = v.iter().map(|x| x.powi(2 * p as i32)).sum::<f64>() / N as f64;
                let se = ((m2 - m * m) / N as f64).sqrt();
                assert!((m - e).abs() < 4.0 * se, "p = {p}: {m} vs {e}");
            }
        }
    }

    #[test]
    fn chord_half_length_matches_geometry() {
        let d = 3;
        let mut s = RngStream::new(99, 0);
        let mut u = vec![0.0; d + 2];
        let mut v = vec![0.0; d + 2];
        let mut geo: Vec<f64> = (0..N)
            .map(|_| {
                crate::randvar::sample_unit_sphere_into(&mut u, &mut s);
                crate::randvar::sample_unit_sphere_into(&mut v, &mut s);
                0.5 * u
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let mut rep: Vec<f64> = (0..N)
            .map(|_| sample_chord_half_surface(d, &mut s).unwrap())
            .collect();
        assert!(ks_two_sample(&mut geo, &mut rep) < ks_critical(0.01, N) * 2f64.sqrt());
        let mut sq: Vec<f64> = rep.iter().map(|x| x * x).collect();
        sq.sort_by(f64::total_cmp);
        assert!((sq[N / 2] - 0.5).abs() < 0.005);
        assert!(sample_chord_half_surface(1, &mut s).is_err());
    }

    #[test]
    fn segment_radius_composition() {
        // n = 1: Omega has the law of U^(1/d) times the half chord on S^(d+1)
        let d = 4;
        let c = cfg(d, 1);
        let mut s = RngStream::new(5, 55);
        let mut a: Vec<f64> = (0..N).map(|_| sample_omega(c, &mut s)).collect();
        let mut b: Vec<f64> = (0..N)
            .map(|_| {
                s.uniform_open().powf(1.0 / d as f64)
                    * sample_chord_half_surface(d, &mut s).unwrap()
            })
            .collect();
        assert!(ks_two_sample(&mut a, &mut b) < ks_critical(0.01, N) * 2f64.sqrt());
    }

    #[test]
    fn delta_c_squared_moments() {
        let c = cfg(3, 2);
        let mut s = RngStream::new(3, 2);
        let sampler = DeltaCSquaredSampler::new(c).unwrap();
        let xs: Vec<f64> = (0..N).map(|_| sampler.sample(&mut s)).collect();
        let mean = xs.iter().sum::<f64>() / N as f64;
        let m2 = xs.iter().map(|x| x * x).sum::<f64>() / N as f64;
        let se = ((m2 - mean * mean) / N as f64).sqrt();
        assert!((mean - 15.0 / 99.0).abs() < 4.0 * se);
        assert!(DeltaCSquaredSampler::new(cfg(3, 3)).is_err());
    }
}
