//! Random simplices spanned by uniform points in the unit ball, and the
//! circumscribed spheres they define.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: log-gamma, beta, incomplete beta/gamma and Gauss `2F1`.
//! - [`quad`]: adaptive Gauss-Legendre quadrature.
//! - [`rational`]: exact rational arithmetic for closed-form probabilities.
//! - [`randvar`]: reproducible random streams, ball/sphere samplers, gamma,
//!   beta and Dirichlet variates, and the beta-product representations.
//! - [`geometry`]: circumcentre and circumradius of an n-simplex in R^d.
//! - [`analytic`]: exact densities, moments and probabilities.
//! - [`engine`]: the parallel Monte Carlo engine and its mergeable results.
//! - [`extremes`]: block maxima and truncated Frechet fits.
//! - [`stats`]: goodness-of-fit statistics used to compare the two.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analytic;
pub mod engine;
mod error;
pub mod extremes;
pub mod geometry;
pub mod quad;
pub mod randvar;
pub mod rational;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Shape of the problem: an `n`-simplex (`n + 1` points) in the unit ball of R^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BallConfig {
    pub d: usize,
    pub n: usize,
}

impl BallConfig {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 1 || n < 1 || n > d {
            return Err(Error::Domain(format!(
                "need 1 <= n <= d, got d = {d}, n = {n}"
            )));
        }
        Ok(Self { d, n })
    }

    pub fn df(&self) -> f64 {
        self.d as f64
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Number of points, `n + 1`.
    pub fn points(&self) -> usize {
        self.n + 1
    }

    /// Codimension `d - n` of the flat spanned by the points.
    pub fn codim(&self) -> usize {
        self.d - self.n
    }
}

impl std::fmt::Display for BallConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(d={}, n={})", self.d, self.n)
    }
}
