//! Adaptive Gauss-Legendre quadrature on finite intervals.
//!
//! Each interval carries a 15-point estimate over the whole interval and over
//! its two halves; the difference is the error estimate. The interval with the
//! largest estimate is bisected until the global tolerance is met.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::{Error, Result};

const ORDER: usize = 15;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
///
/// Nodes come out in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn fixed<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let (x, w) = rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        s += wi * f(c + h * xi);
    }
    s * h
}

fn segment<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64) -> Segment {
    let m = 0.5 * (a + b);
    let left = fixed(f, a, m);
    let right = fixed(f, m, b);
    Segment {
        a,
        b,
        left,
        right,
        err: (left + right - whole).abs(),
    }
}

/// Integrates `f` over `[a, b]`.
///
/// Fails with [`Error::Evaluation`] if the tolerance is not met within
/// `max_intervals` bisections or if `f` returns a non-finite value.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    if a > b {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    let whole = fixed(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    let first = segment(&mut f, a, b, whole);
    let (mut value, mut error) = (first.left + first.right, first.err);
    heap.push(first);
    loop {
        if !value.is_finite() {
            return Err(Error::eval("integrand produced a non-finite value"));
        }
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            // the running totals drift; confirm with exact sums
            value = heap.iter().map(|s| s.left + s.right).sum();
            error = heap.iter().map(|s| s.err).sum();
            if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
                return Ok(QuadResult {
                    value,
                    error,
                    intervals: heap.len(),
                });
            }
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::eval(format!(
                "quadrature on [{a}, {b}] stopped at {} intervals with error {error:e} (value {value})",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        value -= worst.left + worst.right;
        error -= worst.err;
        if m <= worst.a || m >= worst.b {
            // interval cannot be split further in floating point
            value += worst.left + worst.right;
            heap.push(Segment { err: 0.0, ..worst });
            continue;
        }
        for s in [
            segment(&mut f, worst.a, m, worst.left),
            segment(&mut f, m, worst.b, worst.right),
        ] {
            value += s.left + s.right;
            error += s.err;
            heap.push(s);
        }
    }
}

/// [`integrate`] with default tolerances, returning only the value.
pub fn quad<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate(f, a, b, &QuadOptions::default()).map(|r| r.value)
}

/// Integrates over `[a, b]` split at the interior `breaks` (sorted or not).
pub fn quad_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<f64> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.insert(0, a);
    pts.push(b);
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += integrate(&mut f, w[0], w[1], opts)?.value;
    }
    Ok(total)
}
