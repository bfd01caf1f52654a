use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Fixed-bin histogram on [lo, hi) with under- and overflow counters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub spacing: Spacing,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize, spacing: Spacing) -> Result<Self> {
        if bins < 1 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!(
                "invalid histogram range [{lo}, {hi}) with {bins} bins"
            )));
        }
        if spacing == Spacing::Log && lo <= 0.0 {
            return Err(Error::domain("log-spaced histograms need lo > 0"));
        }
        Ok(Self {
            lo,
            hi,
            spacing,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    fn position(&self, x: f64) -> f64 {
        match self.spacing {
            Spacing::Linear => (x - self.lo) / (self.hi - self.lo),
            Spacing::Log => (x / self.lo).ln() / (self.hi / self.lo).ln(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if !(x >= self.lo) {
            self.underflow += 1;
            return;
        }
        if x >= self.hi {
            self.overflow += 1;
            return;
        }
        let n = self.counts.len();
        let i = ((self.position(x) * n as f64) as usize).min(n - 1);
        self.counts[i] += 1;
    }

    /// Left edge of bin `i`; `edge(bins())` is `hi`.
    pub fn edge(&self, i: usize) -> f64 {
        let n = self.counts.len();
        if i == 0 {
            return self.lo;
        }
        if i >= n {
            return self.hi;
        }
        let t = i as f64 / n as f64;
        match self.spacing {
            Spacing::Linear => self.lo + (self.hi - self.lo) * t,
            Spacing::Log => self.lo * ((self.hi / self.lo).ln() * t).exp(),
        }
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.counts.len()).map(|i| self.edge(i)).collect()
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Events routed into the histogram, including under- and overflow.
    pub fn total(&self) -> u64 {
        self.in_range() + self.underflow + self.overflow
    }

    /// count / (total * width); integrates to the in-range fraction.
    pub fn densities(&self) -> Vec<f64> {
        let total = self.total() as f64;
        (0..self.counts.len())
            .map(|i| {
                if total == 0.0 {
                    0.0
                } else {
                    self.counts[i] as f64 / (total * (self.edge(i + 1) - self.edge(i)))
                }
            })
            .collect()
    }

    pub fn same_shape(&self, other: &Histogram) -> bool {
        self.lo == other.lo
            && self.hi == other.hi
            && self.spacing == other.spacing
            && self.bins() == other.bins()
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch(
                "histograms with different binning".into(),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        Ok(())
    }

    /// CSV with header `bin_left,bin_mid,bin_right,count,density`.
    pub fn to_csv(&self) -> String {
        let dens = self.densities();
        let mut out = String::from("bin_left,bin_mid,bin_right,count,density\n");
        for (i, (c, p)) in self.counts.iter().zip(dens).enumerate() {
            let (l, r) = (self.edge(i), self.edge(i + 1));
            let mid = match self.spacing {
                Spacing::Linear => 0.5 * (l + r),
                Spacing::Log => (l * r).sqrt(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{c},{}",
                sig10(l),
                sig10(mid),
                sig10(r),
                sig10(p)
            );
        }
        out
    }
}

/// Ten significant digits, plain notation for moderate exponents.
pub fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.9e}");
    let (mant, exp) = s.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        return format!("{}", s.parse::<f64>().expect("round trip"));
    }
    let mant = mant.trim_end_matches('0').trim_end_matches('.');
    format!("{mant}e{exp}")
}
