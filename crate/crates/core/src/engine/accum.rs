use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Floating-point sum kept exactly as non-overlapping partials, so that
/// merging in any order yields the same correctly rounded value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    /// Correctly rounded value of the exact sum.
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // round half to even across the remaining partials
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

impl Serialize for ExactSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        let mut s = ExactSum::new();
        if v != 0.0 {
            s.add(v);
        }
        Ok(s)
    }
}

/// Compensated (Neumaier) running sum used inside a block.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn into_exact(self) -> ExactSum {
        let mut e = ExactSum::new();
        e.add(self.sum);
        e.add(self.comp);
        e
    }
}

/// Highest power kept in [`PowerSums`].
pub const MAX_POWER: usize = 12;

/// Count and power sums sum x^j, j = 1..=12.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerSums {
    pub count: u64,
    pub sums: Vec<ExactSum>,
}

/// Per-block accumulator for [`PowerSums`].
#[derive(Debug, Clone, Default)]
pub(crate) struct PowerAccum {
    count: u64,
    sums: [Neumaier; MAX_POWER],
}

impl PowerAccum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        self.count += 1;
        let mut p = x;
        for s in self.sums.iter_mut() {
            s.add(p);
            p *= x;
        }
    }

    pub fn finish(self) -> PowerSums {
        PowerSums {
            count: self.count,
            sums: self.sums.into_iter().map(Neumaier::into_exact).collect(),
        }
    }
}

/// Sample moment with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub k: usize,
    pub mean: f64,
    /// sqrt((m_2k - m_k^2) / N), for k up to 6.
    pub se: Option<f64>,
}

impl PowerSums {
    pub fn empty() -> Self {
        Self {
            count: 0,
            sums: vec![ExactSum::new(); MAX_POWER],
        }
    }

    pub fn merge(&mut self, other: &PowerSums) {
        self.count += other.count;
        if self.sums.len() < other.sums.len() {
            self.sums.resize(other.sums.len(), ExactSum::new());
        }
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.merge(b);
        }
    }

    /// Raw sample moment (1/N) sum x^k.
    pub fn raw_moment(&self, k: usize) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::InsufficientData("no samples".into()));
        }
        if k == 0 {
            return Ok(1.0);
        }
        let s = self
            .sums
            .get(k - 1)
            .ok_or_else(|| Error::domain(format!("moments are kept up to order {MAX_POWER}")))?;
        Ok(s.value() / self.count as f64)
    }

    pub fn estimate(&self, k: usize) -> Result<MomentEstimate> {
        let mean = self.raw_moment(k)?;
        let se = if 2 * k <= self.sums.len() && self.count > 1 {
            let m2 = self.raw_moment(2 * k)?;
            Some(((m2 - mean * mean).max(0.0) / self.count as f64).sqrt())
        } else {
            None
        };
        Ok(MomentEstimate { k, mean, se })
    }

    /// Ratios <x^(j+1)> / <x^j> for j = 1..=11.
    pub fn moment_ratios(&self) -> Result<Vec<f64>> {
        (1..self.sums.len())
            .map(|j| Ok(self.raw_moment(j + 1)? / self.raw_moment(j)?))
            .collect()
    }
}
