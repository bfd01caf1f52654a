//! Exact rational values for the closed-form probabilities and moments.
//!
//! Numbers of the form q * pi^(k/2) with q rational are closed under products
//! and quotients of gamma functions at half-integers, which covers the
//! containment probability and the beta-function constants. Arithmetic is
//! checked i128; overflow is reported rather than wrapped.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{BallConfig, Error, Result};

pub type Frac = Ratio<i128>;

fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

fn mul(a: &Frac, b: &Frac, what: &str) -> Result<Frac> {
    a.checked_mul(b).ok_or_else(|| overflow(what))
}

fn div(a: &Frac, b: &Frac, what: &str) -> Result<Frac> {
    if b.is_zero() {
        return Err(Error::domain(format!("division by zero in {what}")));
    }
    a.checked_div(b).ok_or_else(|| overflow(what))
}

fn add(a: &Frac, b: &Frac, what: &str) -> Result<Frac> {
    a.checked_add(b).ok_or_else(|| overflow(what))
}

fn int(v: i128) -> Frac {
    Frac::from_integer(v)
}

/// Converts a fraction to the nearest f64 without overflowing on the way.
pub fn to_f64(q: &Frac) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => f64::NAN,
    }
}

/// `q * pi^(half_power / 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiMultiple {
    pub coeff: Frac,
    pub half_power: i32,
}

impl PiMultiple {
    pub fn rational(q: Frac) -> Self {
        Self {
            coeff: q,
            half_power: 0,
        }
    }

    pub fn value(&self) -> f64 {
        to_f64(&self.coeff) * std::f64::consts::PI.powf(self.half_power as f64 / 2.0)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            coeff: mul(&self.coeff, &o.coeff, "pi-multiple product")?,
            half_power: self.half_power + o.half_power,
        })
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            coeff: div(&self.coeff, &o.coeff, "pi-multiple quotient")?,
            half_power: self.half_power - o.half_power,
        })
    }

    pub fn checked_pow(&self, e: u32) -> Result<Self> {
        let mut r = Self::rational(Frac::one());
        for _ in 0..e {
            r = r.checked_mul(self)?;
        }
        Ok(r)
    }
}

impl std::fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (n, d) = (self.coeff.numer(), self.coeff.denom());
        let pi = match self.half_power {
            0 => String::new(),
            2 => "π".to_string(),
            k if k % 2 == 0 => format!("π^{}", k / 2),
            k => format!("π^({k}/2)"),
        };
        match (pi.is_empty(), *d == 1) {
            (true, true) => write!(f, "{n}"),
            (true, false) => write!(f, "{n}/{d}"),
            (false, true) => write!(f, "{n}{pi}"),
            (false, false) => write!(f, "{n}{pi}/{d}"),
        }
    }
}

fn factorial(k: u32) -> Result<i128> {
    let mut f: i128 = 1;
    for j in 2..=k as i128 {
        f = f.checked_mul(j).ok_or_else(|| overflow("factorial"))?;
    }
    Ok(f)
}

/// Gamma(m / 2) for an integer m >= 1.
pub fn gamma_half(m: u32) -> Result<PiMultiple> {
    if m == 0 {
        return Err(Error::domain("Gamma has a pole at 0"));
    }
    if m % 2 == 0 {
        return Ok(PiMultiple::rational(int(factorial(m / 2 - 1)?)));
    }
    // Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
    let k = (m - 1) / 2;
    let num = int(factorial(2 * k)?);
    let four_k = 4i128.checked_pow(k).ok_or_else(|| overflow("4^k"))?;
    let den = int(four_k
        .checked_mul(factorial(k)?)
        .ok_or_else(|| overflow("4^k k!"))?);
    Ok(PiMultiple {
        coeff: div(&num, &den, "half-integer gamma")?,
        half_power: 1,
    })
}

/// B(p / 2, q / 2) for integers p, q >= 1.
pub fn beta_half(p: u32, q: u32) -> Result<PiMultiple> {
    gamma_half(p)?
        .checked_mul(&gamma_half(q)?)?
        .checked_div(&gamma_half(p + q)?)
}

/// Binomial coefficient C(n, k).
pub fn binomial(n: u32, k: u32) -> Result<i128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut c: i128 = 1;
    for j in 0..k as i128 {
        // c * (n - j) is divisible by (j + 1) after the multiplication
        c = c
            .checked_mul(n as i128 - j)
            .ok_or_else(|| overflow("binomial"))?
            / (j + 1);
    }
    Ok(c)
}

/// Probability that the circumsphere lies inside the unit ball, exactly.
///
/// All gamma arguments are half-integers, so the value is q * pi^(k/2).
pub fn prob_contained_exact(cfg: BallConfig) -> Result<PiMultiple> {
    let (d, n) = (cfg.d as u32, cfg.n as u32);
    if n == 1 {
        return Ok(PiMultiple::rational(Frac::one()));
    }
    let d_pow_n = (d as i128).checked_pow(n).ok_or_else(|| overflow("d^n"))?;
    let front = PiMultiple {
        coeff: div(
            &int((d as i128 - 1) * d_pow_n),
            &int(2 * (n as i128 + 1)),
            "containment prefactor",
        )?,
        half_power: n as i32 - 1,
    };
    let b1 = beta_half(n + 1, n * d)?;
    let b2 = beta_half(d - 1, n * d + 1)?;
    let b3 = beta_half(d - n + 1, n * d)?;
    let ratio = gamma_half(d)?.checked_div(&gamma_half(d + 1)?)?;
    front
        .checked_mul(&b1)?
        .checked_mul(&b2)?
        .checked_div(&b3)?
        .checked_mul(&ratio.checked_pow(n + 1)?)
}

/// Probability that the foot O' of the perpendicular from the centre lies
/// outside the circumsphere, given containment:
/// 2^-(N-1) * sum_{k<n} C(N-1, k) with N = n(d+1).
pub fn prob_origin_outside_exact(cfg: BallConfig) -> Result<Frac> {
    let big_n = (cfg.n * (cfg.d + 1)) as u32;
    let mut s: i128 = 0;
    for k in 0..cfg.n as u32 {
        s = s
            .checked_add(binomial(big_n - 1, k)?)
            .ok_or_else(|| overflow("binomial sum"))?;
    }
    let den = 1i128
        .checked_shl(big_n - 1)
        .filter(|_| big_n - 1 < 127)
        .ok_or_else(|| overflow("2^(N-1)"))?;
    Ok(Frac::new(s, den))
}

/// The explicit polynomial-over-exponential forms for n = 1..=5.
pub fn origin_outside_polynomial(n: usize, d: usize) -> Result<Frac> {
    let di = d as i128;
    let p = |base: i128, e: u32| base.checked_pow(e).ok_or_else(|| overflow("power"));
    let d32 = d as u32;
    let q = match n {
        1 => Frac::new(1, p(2, d32)?),
        2 => Frac::new(1 + di, p(4, d32)?),
        3 => Frac::new(8 + 15 * di + 9 * di * di, p(8, d32 + 1)?),
        4 => Frac::new(3 + 8 * di + 9 * di * di + 4 * di * di * di, 3 * p(16, d32)?),
        5 => Frac::new(
            384 + 1310 * di + 2075 * di * di + 1750 * di.pow(3) + 625 * di.pow(4),
            384 * p(32, d32)?,
        ),
        _ => return Err(Error::domain("explicit forms exist for n = 1..=5")),
    };
    Ok(q)
}

/// Even moment E[Delta^(2p)] as a ratio of Pochhammer symbols.
pub fn delta_even_moment_exact(cfg: BallConfig, p: u32) -> Result<Frac> {
    let (d, n) = (cfg.d as i128, cfg.n as i128);
    pochhammer_ratio(
        &[Frac::new(n, 2), Frac::new(n + 1, 2)],
        &[Frac::new(n * (d + 1) + 1, 2), Frac::new((n + 1) * d + 2, 2)],
        p,
    )
}

/// Even moment E[Omega^(2p)] as a ratio of Pochhammer symbols.
pub fn omega_even_moment_exact(cfg: BallConfig, p: u32) -> Result<Frac> {
    let (d, n) = (cfg.d as i128, cfg.n as i128);
    pochhammer_ratio(
        &[Frac::new(n * d, 2), Frac::new(n * d + 1, 2)],
        &[Frac::new(n * (d + 1) + 1, 2), Frac::new((n + 1) * d + 2, 2)],
        p,
    )
}

fn pochhammer_ratio(top: &[Frac], bottom: &[Frac], p: u32) -> Result<Frac> {
    let mut r = Frac::one();
    for j in 0..p as i128 {
        for a in top {
            r = mul(&r, &add(a, &int(j), "pochhammer")?, "pochhammer")?;
        }
        for b in bottom {
            r = div(&r, &add(b, &int(j), "pochhammer")?, "pochhammer")?;
        }
    }
    Ok(r)
}

/// E[H^2] = (d - n) / ((n + 1) d + 2).
pub fn h_second_moment_exact(cfg: BallConfig) -> Frac {
    let (d, n) = (cfg.d as i128, cfg.n as i128);
    Frac::new(d - n, (n + 1) * d + 2)
}

/// E[Delta_C^k] for k = 2 or 4 from the explicit rational forms.
pub fn delta_c_moment_exact(cfg: BallConfig, k: u32) -> Result<Frac> {
    let (d, n) = (cfg.d as i128, cfg.n as i128);
    let a = n * (d + 1) + 1;
    let b = (n + 1) * d + 2;
    match k {
        2 => Ok(Frac::new(d * (n * d - n * n + n + 1), a * b)),
        4 => {
            let num = d
                * (d.pow(3) * n * n - 2 * d * d * (n.pow(3) - 2 * n * n - 2 * n)
                    + d * (n.pow(4) - 4 * n.pow(3) - n * n + 12 * n + 3)
                    - 2 * n.pow(3)
                    - 6 * n * n
                    + 8 * n
                    + 6);
            Ok(Frac::new(num, a * (a + 2) * b * (b + 2)))
        }
        _ => Err(Error::domain(
            "exact Delta_C moments are available for k = 2 and 4",
        )),
    }
}

/// Raw moment E[X^k] of X ~ Be(p, q) for rational shapes.
pub fn beta_moment_exact(p: &Frac, q: &Frac, k: u32) -> Result<Frac> {
    let s = add(p, q, "beta moment")?;
    pochhammer_ratio(std::slice::from_ref(p), std::slice::from_ref(&s), k)
}

/// 1 - q, checked.
pub fn complement(q: &Frac) -> Result<Frac> {
    Frac::one()
        .checked_sub(q)
        .ok_or_else(|| overflow("complement"))
}
