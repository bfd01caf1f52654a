//! Goodness-of-fit statistics: Kolmogorov-Smirnov (raw and binned) and a
//! binned chi-square test.

use serde::{Deserialize, Serialize};

use crate::specfun::chi2_sf;
use crate::{Error, Result};

/// Asymptotic one-sample KS critical value sqrt(-ln(alpha/2)/2) / sqrt(n).
pub fn ks_critical(alpha: f64, n: usize) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}

/// Asymptotic two-sample KS critical value.
pub fn ks_critical_two_sample(alpha: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (-0.5 * (alpha / 2.0).ln()).sqrt() * ((n + m) / (n * m)).sqrt()
}

/// One-sample KS distance; sorts `xs` in place.
pub fn ks_one_sample(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Two-sample KS distance; sorts both slices in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// KS comparison of a histogram with a continuous law.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BinnedKs {
    /// Largest cdf discrepancy over the bin edges.
    pub d_edges: f64,
    /// Upper bound on the distance to the unbinned sample.
    pub d_bound: f64,
    /// Largest analytic probability of a single bin.
    pub max_bin_mass: f64,
    pub n: u64,
}

/// Binned KS statistic.
///
/// `cdf_edges[i]` is the analytic cdf at edge `i` (one more entry than
/// `counts`); `below` is the number of observations under the first edge.
/// Between edges both cdfs are monotone, so the raw-sample distance is at
/// most `d_edges` plus the largest analytic bin mass.
pub fn ks_binned(counts: &[u64], below: u64, above: u64, cdf_edges: &[f64]) -> Result<BinnedKs> {
    if cdf_edges.len() != counts.len() + 1 {
        return Err(Error::ShapeMismatch(format!(
            "{} edges for {} bins",
            cdf_edges.len(),
            counts.len()
        )));
    }
    let n = below + above + counts.iter().sum::<u64>();
    if n == 0 {
        return Err(Error::InsufficientData("empty histogram".into()));
    }
    let nf = n as f64;
    let mut cum = below;
    let mut d = (cum as f64 / nf - cdf_edges[0]).abs();
    let mut max_mass = cdf_edges[0].max(1.0 - cdf_edges[counts.len()]);
    for (i, &c) in counts.iter().enumerate() {
        cum += c;
        d = d.max((cum as f64 / nf - cdf_edges[i + 1]).abs());
        max_mass = max_mass.max(cdf_edges[i + 1] - cdf_edges[i]);
    }
    Ok(BinnedKs {
        d_edges: d,
        d_bound: d + max_mass,
        max_bin_mass: max_mass,
        n,
    })
}

/// Result of a binned chi-square test.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of observed counts against bin probabilities.
///
/// Adjacent bins are merged until each expected count is at least
/// `min_expected`; a trailing remainder is merged into the last group.
pub fn chi_square(observed: &[u64], probs: &[f64], min_expected: f64) -> Result<ChiSquare> {
    if observed.len() != probs.len() {
        return Err(Error::ShapeMismatch(
            "observed and expected lengths differ".into(),
        ));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(Error::InsufficientData("no observations".into()));
    }
    let nf = n as f64;
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&c, &p) in observed.iter().zip(probs) {
        o += c as f64;
        e += p * nf;
        if e >= min_expected {
            groups.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match groups.last_mut() {
            Some(g) => {
                g.0 += o;
                g.1 += e;
            }
            None => groups.push((o, e)),
        }
    }
    if groups.len() < 2 {
        return Err(Error::InsufficientData(
            "fewer than two bins after merging".into(),
        ));
    }
    let statistic: f64 = groups.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = groups.len() - 1;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: chi2_sf(statistic, dof as f64)?,
    })
}
