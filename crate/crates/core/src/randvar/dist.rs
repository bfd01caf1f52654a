use super::RngStream;
use crate::{Error, Result};

/// Standard normal draw.
pub fn sample_std_normal(stream: &mut RngStream) -> f64 {
    stream.std_normal()
}

/// Fills `out` with a point uniform on the unit sphere S^(len-1).
pub fn sample_unit_sphere_into(out: &mut [f64], stream: &mut RngStream) {
    loop {
        let mut ss = 0.0;
        for x in out.iter_mut() {
            *x = stream.std_normal();
            ss += *x * *x;
        }
        if ss > 0.0 {
            let inv = 1.0 / ss.sqrt();
            for x in out.iter_mut() {
                *x *= inv;
            }
            return;
        }
    }
}

/// Fills `out` with a point uniform in the open unit ball of R^len.
///
/// A Gaussian direction is scaled by U^(1/d).
pub fn sample_uniform_ball_into(out: &mut [f64], stream: &mut RngStream) {
    let d = out.len() as f64;
    sample_unit_sphere_into(out, stream);
    let r = loop {
        let r = stream.uniform_open().powf(1.0 / d);
        if r < 1.0 {
            break r;
        }
    };
    for x in out.iter_mut() {
        *x *= r;
    }
}

/// A point uniform in the unit ball of R^d.
pub fn sample_uniform_ball(d: usize, stream: &mut RngStream) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::domain("ball dimension must be at least 1"));
    }
    let mut v = vec![0.0; d];
    sample_uniform_ball_into(&mut v, stream);
    Ok(v)
}

/// Gamma(shape, 1) sampler.
///
/// Marsaglia-Tsang squeeze/rejection for shape >= 1; smaller shapes draw
/// Gamma(shape + 1) and multiply by U^(1/shape).
#[derive(Debug, Clone, Copy)]
pub struct GammaSampler {
    shape: f64,
    d: f64,
    c: f64,
    boost: bool,
}

impl GammaSampler {
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::domain(format!(
                "gamma shape must be finite and > 0, got {shape}"
            )));
        }
        let boost = shape < 1.0;
        let d = if boost { shape + 1.0 } else { shape } - 1.0 / 3.0;
        Ok(Self {
            shape,
            d,
            c: 1.0 / (9.0 * d).sqrt(),
            boost,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        let g = loop {
            let x = stream.std_normal();
            let v = 1.0 + self.c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = stream.uniform_open();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                break self.d * v;
            }
            if u.ln() < 0.5 * x2 + self.d * (1.0 - v + v.ln()) {
                break self.d * v;
            }
        };
        if self.boost {
            // U^(1/q) computed in log space so tiny shapes do not underflow to 0 early
            g * (stream.uniform_open().ln() / self.shape).exp()
        } else {
            g
        }
    }
}

/// Gamma(q, 1) draw.
pub fn sample_gamma(q: f64, stream: &mut RngStream) -> Result<f64> {
    Ok(GammaSampler::new(q)?.sample(stream))
}

/// Be(q1, q2) sampler built from two gamma samplers.
#[derive(Debug, Clone, Copy)]
pub struct BetaSampler {
    g1: GammaSampler,
    g2: GammaSampler,
}

impl BetaSampler {
    pub fn new(q1: f64, q2: f64) -> Result<Self> {
        Ok(Self {
            g1: GammaSampler::new(q1)?,
            g2: GammaSampler::new(q2)?,
        })
    }

    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        loop {
            let x1 = self.g1.sample(stream);
            let x2 = self.g2.sample(stream);
            let s = x1 + x2;
            if s > 0.0 {
                return x1 / s;
            }
        }
    }
}

/// Be(q1, q2) draw as X1 / (X1 + X2) with independent gamma variates.
pub fn sample_beta(q1: f64, q2: f64, stream: &mut RngStream) -> Result<f64> {
    Ok(BetaSampler::new(q1, q2)?.sample(stream))
}

/// Dirichlet draw from normalised gamma variates.
///
/// The last component is set to one minus the sum of the others, so the
/// components sum to one in floating point.
pub fn sample_dirichlet(q: &[f64], stream: &mut RngStream) -> Result<Vec<f64>> {
    if q.len() < 2 {
        return Err(Error::domain("Dirichlet needs at least two shapes"));
    }
    let samplers = q
        .iter()
        .map(|&s| GammaSampler::new(s))
        .collect::<Result<Vec<_>>>()?;
    loop {
        let g: Vec<f64> = samplers.iter().map(|s| s.sample(stream)).collect();
        let total: f64 = g.iter().sum();
        if !(total > 0.0) {
            continue;
        }
        let k = g.len();
        let mut out: Vec<f64> = g.iter().map(|x| x / total).collect();
        let head: f64 = out[..k - 1].iter().sum();
        if head > 1.0 {
            continue;
        }
        out[k - 1] = 1.0 - head;
        return Ok(out);
    }
}
