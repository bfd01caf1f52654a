//! Block maxima of circumradii and truncated Frechet fits.
//!
//! The Frechet law with shape a, location m and scale s has cdf
//! F(x) = exp(-((x - m) / s)^-a) for x > m. Fits are made to the law
//! truncated to (m, omega_max), whose density is f(x) / F(omega_max).

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::engine::sig10;
use crate::randvar::RngStream;
use crate::{Error, Result};

/// Maxima of consecutive blocks of `k` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMaxSample {
    pub k: usize,
    pub maxima: Vec<f64>,
    /// Values in the incomplete final block.
    pub discarded: usize,
}

pub fn block_maxima(values: &[f64], k: usize) -> Result<BlockMaxSample> {
    if k < 2 {
        return Err(Error::domain(format!(
            "block size must be at least 2, got {k}"
        )));
    }
    if values.len() < k {
        return Err(Error::InsufficientData(format!(
            "{} values for blocks of {k}",
            values.len()
        )));
    }
    let maxima = values
        .chunks_exact(k)
        .map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok(BlockMaxSample {
        k,
        maxima,
        discarded: values.len() % k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrechetParams {
    pub a: f64,
    pub m: f64,
    pub s: f64,
    /// Upper truncation bound.
    pub omega_max: f64,
}

impl FrechetParams {
    pub fn new(a: f64, m: f64, s: f64, omega_max: f64) -> Result<Self> {
        let p = Self { a, m, s, omega_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.s > 0.0 && self.m >= 0.0 && self.omega_max > self.m) {
            return Err(Error::domain(format!(
                "invalid Frechet parameters {self:?}"
            )));
        }
        Ok(())
    }

    /// ((x - m) / s)^-a.
    fn tail_power(&self, x: f64) -> f64 {
        ((x - self.m) / self.s).powf(-self.a)
    }

    /// Untruncated density.
    pub fn pdf(&self, x: f64) -> f64 {
        if x <= self.m {
            return 0.0;
        }
        let z = (x - self.m) / self.s;
        let t = z.powf(-self.a);
        self.a / self.s * t / z * (-t).exp()
    }

    /// Untruncated cdf.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.m {
            return 0.0;
        }
        (-self.tail_power(x)).exp()
    }

    /// Density of the law truncated to (m, omega_max); 0 outside.
    pub fn truncated_pdf(&self, x: f64) -> f64 {
        if !(x > self.m && x < self.omega_max) {
            return 0.0;
        }
        self.pdf(x) * self.tail_power(self.omega_max).exp()
    }

    pub fn truncated_cdf(&self, x: f64) -> f64 {
        if x >= self.omega_max {
            return 1.0;
        }
        self.cdf(x) / self.cdf(self.omega_max)
    }

    /// Mode of the untruncated law, m + s (a / (1 + a))^(1/a).
    pub fn mode(&self) -> f64 {
        self.m + self.s * (self.a / (1.0 + self.a)).powf(1.0 / self.a)
    }

    /// Inverse-cdf draws from the truncated law.
    pub fn sample_truncated(&self, n: usize, stream: &mut RngStream) -> Vec<f64> {
        let ln_fmax = -self.tail_power(self.omega_max);
        (0..n)
            .map(|_| {
                let u = stream.uniform_open();
                // F(x) = u F(omega_max)  =>  ((x - m)/s)^-a = -ln u - ln F(omega_max)
                let t = -(u.ln() + ln_fmax);
                (self.m + self.s * t.powf(-1.0 / self.a)).min(self.omega_max)
            })
            .collect()
    }
}

/// Truncated density of the free-standing form, as a function.
pub fn frechet_truncated_pdf(x: f64, p: &FrechetParams) -> f64 {
    p.truncated_pdf(x)
}

/// Minimal Nelder-Mead simplex search.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iter: usize,
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iter: 4000,
            f_tol: 1e-12,
            x_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl NelderMead {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(
        &self,
        mut f: F,
        start: &[f64],
        step: &[f64],
    ) -> Minimum {
        let n = start.len();
        let mut pts: Vec<Vec<f64>> = vec![start.to_vec()];
        for i in 0..n {
            let mut p = start.to_vec();
            p[i] += step[i];
            pts.push(p);
        }
        let mut vals: Vec<f64> = pts.iter().map(|p| nan_to_inf(f(p))).collect();
        let mut it = 0;
        let mut converged = false;
        while it < self.max_iter {
            it += 1;
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();
            let spread = (vals[n] - vals[0]).abs();
            let size = pts[1..]
                .iter()
                .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= self.f_tol * (1.0 + vals[0].abs()) && size <= self.x_tol {
                converged = true;
                break;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                (0..n)
                    .map(|j| centroid[j] + t * (pts[n][j] - centroid[j]))
                    .collect()
            };
            let xr = along(-1.0);
            let fr = nan_to_inf(f(&xr));
            if fr < vals[0] {
                let xe = along(-2.0);
                let fe = nan_to_inf(f(&xe));
                if fe < fr {
                    pts[n] = xe;
                    vals[n] = fe;
                } else {
                    pts[n] = xr;
                    vals[n] = fr;
                }
                continue;
            }
            if fr < vals[n - 1] {
                pts[n] = xr;
                vals[n] = fr;
                continue;
            }
            let (xc, fc) = if fr < vals[n] {
                let x = along(-0.5);
                let v = nan_to_inf(f(&x));
                (x, v)
            } else {
                let x = along(0.5);
                let v = nan_to_inf(f(&x));
                (x, v)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
                continue;
            }
            // shrink towards the best vertex
            let (best, rest) = pts.split_at_mut(1);
            for (p, v) in rest.iter_mut().zip(&mut vals[1..]) {
                for (x, b) in p.iter_mut().zip(&best[0]) {
                    *x = b + 0.5 * (*x - b);
                }
                *v = nan_to_inf(f(p));
            }
        }
        let best = (0..=n)
            .min_by(|&i, &j| vals[i].total_cmp(&vals[j]))
            .expect("non-empty simplex");
        Minimum {
            x: pts[best].clone(),
            f: vals[best],
            iterations: it,
            converged,
        }
    }
}

fn nan_to_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

const A_MIN: f64 = 0.05;
const A_MAX: f64 = 20.0;
/// Minimum number of maxima for a fit.
pub const MIN_MAXIMA: usize = 100;

/// Unconstrained coordinates: (ln a, ln s, logit(m / x_min)).
fn unpack(theta: &[f64], x_min: f64, omega_max: f64) -> Option<FrechetParams> {
    let a = theta[0].exp();
    let s = theta[1].exp();
    let m = x_min / (1.0 + (-theta[2]).exp());
    if !(a > A_MIN && a < A_MAX && s.is_finite() && s > 0.0) {
        return None;
    }
    Some(FrechetParams { a, m, s, omega_max })
}

fn pack(p: &FrechetParams, x_min: f64) -> Vec<f64> {
    let r = (p.m / x_min).clamp(1e-9, 1.0 - 1e-9);
    vec![p.a.ln(), p.s.ln(), (r / (1.0 - r)).ln()]
}

/// Mean negative log-likelihood of the truncated law.
pub fn truncated_nll(p: &FrechetParams, xs: &[f64]) -> f64 {
    let (ln_a, ln_s) = (p.a.ln(), p.s.ln());
    let mut acc = 0.0;
    for &x in xs {
        let z = (x - p.m) / p.s;
        if !(z > 0.0) {
            return f64::INFINITY;
        }
        let ln_z = z.ln();
        acc += ln_a - ln_s - (1.0 + p.a) * ln_z - (-p.a * ln_z).exp();
    }
    let log_norm = p.tail_power(p.omega_max);
    -(acc / xs.len() as f64 + log_norm)
}

/// Parameters from a fit with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrechetFit {
    /// Maximum-likelihood estimate (primary).
    pub mle: FrechetParams,
    pub mean_nll: f64,
    /// Weighted least squares on the binned density (cross-check).
    pub wls: Option<FrechetParams>,
    /// Neyman chi-square of the WLS fit.
    pub wls_sse: Option<f64>,
    /// Largest relative difference between the MLE and WLS a and s.
    pub discrepancy: Option<f64>,
    /// Maxima inside (0, omega_max) used by the fit.
    pub n_used: usize,
    /// Maxima at or above omega_max, left out.
    pub n_above: usize,
    pub iterations: usize,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Truncated-Frechet fit to block maxima below `omega_max`.
///
/// The likelihood is minimised from a data-driven start and from five
/// deterministic perturbations of it; the best end point is polished by a
/// final restart. Fails if fewer than [`MIN_MAXIMA`] maxima lie below
/// `omega_max`, if they are all equal, or if no start converges.
pub fn fit_frechet(maxima: &[f64], omega_max: f64) -> Result<FrechetFit> {
    let mut xs: Vec<f64> = maxima
        .iter()
        .copied()
        .filter(|&x| x > 0.0 && x < omega_max)
        .collect();
    let n_above = maxima.iter().filter(|&&x| x >= omega_max).count();
    if xs.len() < MIN_MAXIMA {
        return Err(Error::InsufficientData(format!(
            "{} maxima below omega_max = {omega_max}, need {MIN_MAXIMA}",
            xs.len()
        )));
    }
    xs.sort_by(f64::total_cmp);
    let x_min = xs[0];
    if xs[xs.len() - 1] - x_min <= 1e-12 * x_min.abs().max(1.0) {
        return Err(Error::eval(
            "all maxima are equal; the Frechet fit is undefined",
        ));
    }
    let med = median(&xs);
    let objective = |theta: &[f64]| match unpack(theta, x_min, omega_max) {
        Some(p) => truncated_nll(&p, &xs),
        None => f64::INFINITY,
    };
    let nm = NelderMead::default();
    let mut starts = Vec::new();
    let m0 = 0.5 * x_min;
    for a0 in [1.0, 0.5, 2.0] {
        // median of the untruncated law is m + s (ln 2)^(-1/a)
        let s0 = (med - m0).max(1e-6 * med) * std::f64::consts::LN_2.powf(1.0 / a0);
        starts.push(FrechetParams {
            a: a0,
            m: m0,
            s: s0,
            omega_max,
        });
    }
    let mut rng = RngStream::new(0x5eed_f7ec, 0);
    let base = starts[0];
    for _ in 0..5 {
        starts.push(FrechetParams {
            a: base.a * (1.5 * rng.uniform() - 0.75).exp(),
            m: x_min * rng.uniform(),
            s: base.s * (rng.uniform() - 0.5).exp(),
            omega_max,
        });
    }
    let mut best: Option<Minimum> = None;
    let mut iterations = 0;
    for st in &starts {
        let r = nm.minimize(objective, &pack(st, x_min), &[0.3, 0.3, 1.0]);
        iterations += r.iterations;
        if r.f.is_finite() && best.as_ref().map_or(true, |b| r.f < b.f) {
            best = Some(r);
        }
    }
    let best =
        best.ok_or_else(|| Error::eval("no Frechet fit start produced a finite likelihood"))?;
    let polished = nm.minimize(objective, &best.x, &[0.05, 0.05, 0.2]);
    iterations += polished.iterations;
    let fin = if polished.f <= best.f { polished } else { best };
    if !fin.converged {
        log::warn!(
            "Frechet MLE stopped at the iteration limit (mean NLL {})",
            fin.f
        );
    }
    let mle = unpack(&fin.x, x_min, omega_max)
        .ok_or_else(|| Error::eval("MLE left the parameter bounds"))?;
    let wls = fit_binned(&xs, &mle);
    let (wls_p, wls_sse) = match wls {
        Some((p, s)) => (Some(p), Some(s)),
        None => (None, None),
    };
    let discrepancy = wls_p.map(|w| {
        ((w.a - mle.a) / mle.a)
            .abs()
            .max(((w.s - mle.s) / mle.s).abs())
    });
    Ok(FrechetFit {
        mle,
        mean_nll: fin.f,
        wls: wls_p,
        wls_sse,
        discrepancy,
        n_used: xs.len(),
        n_above,
        iterations,
    })
}

/// Neyman chi-square fit of the truncated law to a 100-bin histogram
/// spanning the sample up to its 99.5% quantile.
fn fit_binned(sorted: &[f64], start: &FrechetParams) -> Option<(FrechetParams, f64)> {
    let n = sorted.len();
    let lo = sorted[0];
    let hi = sorted[((n as f64 * 0.995) as usize).min(n - 1)];
    if !(hi > lo) {
        return None;
    }
    let bins = 100;
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in sorted {
        if x < hi {
            counts[(((x - lo) / w) as usize).min(bins - 1)] += 1;
        }
    }
    let x_min = lo;
    let omega_max = start.omega_max;
    let sse = |theta: &[f64]| -> f64 {
        let Some(p) = unpack(theta, x_min, omega_max) else {
            return f64::INFINITY;
        };
        let norm = p.cdf(omega_max);
        let mut s = 0.0;
        let mut prev = p.cdf(lo) / norm;
        for (i, &c) in counts.iter().enumerate() {
            let next = p.cdf(lo + (i + 1) as f64 * w) / norm;
            let e = n as f64 * (next - prev);
            s += (c as f64 - e).powi(2) / (c.max(1)) as f64;
            prev = next;
        }
        s
    };
    let nm = NelderMead::default();
    let r = nm.minimize(sse, &pack(start, x_min), &[0.1, 0.1, 0.5]);
    unpack(&r.x, x_min, omega_max).map(|p| (p, r.f))
}

/// Half-sample mode (Bickel): repeatedly keep the densest half of the
/// sorted sample.
pub fn half_sample_mode(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InsufficientData("mode of an empty sample".into()));
    }
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mut s = &v[..];
    while s.len() > 3 {
        let h = s.len().div_ceil(2);
        let (mut best, mut width) = (0, f64::INFINITY);
        for i in 0..=s.len() - h {
            let wd = s[i + h - 1] - s[i];
            if wd < width {
                width = wd;
                best = i;
            }
        }
        s = &s[best..best + h];
    }
    Ok(match s.len() {
        3 => {
            if s[1] - s[0] < s[2] - s[1] {
                0.5 * (s[0] + s[1])
            } else if s[1] - s[0] > s[2] - s[1] {
                0.5 * (s[1] + s[2])
            } else {
                s[1]
            }
        }
        2 => 0.5 * (s[0] + s[1]),
        _ => s[0],
    })
}

/// Ordinary least squares y = slope x + intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientData(
            "linear fit needs at least two points".into(),
        ));
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::eval("linear fit with constant abscissa"));
    }
    let slope = sxy / sxx;
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r2: if syy == 0.0 {
            1.0
        } else {
            sxy * sxy / (sxx * syy)
        },
    })
}

/// One row of a tail scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: u64,
    pub n_maxima: usize,
    /// Fitted parameters; `None` when the fit failed.
    pub fit: Option<FrechetFit>,
    pub error: Option<String>,
    /// Half-sample mode of the maxima.
    pub empirical_mode: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// s_k regressed on k.
    pub scale_fit: Option<LinearFit>,
    /// Empirical mode regressed on k.
    pub mode_fit: Option<LinearFit>,
    /// Fewer than three fits succeeded.
    pub incomplete: bool,
    /// <Omega^(j+1)> / <Omega^j>, j = 1..=11, over all events.
    pub moment_ratios: Vec<f64>,
    /// Largest circumradius seen.
    pub omega_max_seen: Option<f64>,
}

/// Fits every block-maxima sample and regresses s_k and the mode on k.
pub fn tail_scan(samples: &[(u64, Vec<f64>)], omega_max: f64) -> Result<ScanReport> {
    use rayon::prelude::*;
    let rows: Vec<ScanRow> = samples
        .par_iter()
        .map(|(k, maxima)| {
            let empirical_mode = half_sample_mode(maxima).unwrap_or(f64::NAN);
            let (fit, error) = match fit_frechet(maxima, omega_max) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ScanRow {
                k: *k,
                n_maxima: maxima.len(),
                fit,
                error,
                empirical_mode,
            }
        })
        .collect();
    let ok: Vec<&ScanRow> = rows.iter().filter(|r| r.fit.is_some()).collect();
    let incomplete = ok.len() < 3;
    let ks: Vec<f64> = ok.iter().map(|r| r.k as f64).collect();
    let ss: Vec<f64> = ok
        .iter()
        .map(|r| r.fit.as_ref().expect("filtered").mle.s)
        .collect();
    let modes: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.empirical_mode.is_finite())
        .map(|r| (r.k as f64, r.empirical_mode))
        .collect();
    let (mk, mv): (Vec<f64>, Vec<f64>) = modes.into_iter().unzip();
    Ok(ScanReport {
        scale_fit: if incomplete {
            None
        } else {
            linear_fit(&ks, &ss).ok()
        },
        mode_fit: linear_fit(&mk, &mv).ok(),
        rows,
        incomplete,
        moment_ratios: Vec::new(),
        omega_max_seen: None,
    })
}

impl ScanReport {
    /// CSV with header `k,a,s,m,mode,sse,n_maxima`; failed fits leave the
    /// parameter columns empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,a,s,m,mode,sse,n_maxima\n");
        for r in &self.rows {
            let (a, s, m, sse) = match &r.fit {
                Some(f) => (
                    sig10(f.mle.a),
                    sig10(f.mle.s),
                    sig10(f.mle.m),
                    f.wls_sse.map(sig10).unwrap_or_default(),
                ),
                None => Default::default(),
            };
            let _ = writeln!(
                out,
                "{},{a},{s},{m},{},{sse},{}",
                r.k,
                sig10(r.empirical_mode),
                r.n_maxima
            );
        }
        out
    }
}
