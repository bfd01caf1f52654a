//! Circumcentre and circumradius of an n-simplex embedded in R^d.
//!
//! The edge vectors v_k = A_(k+1) - A_1 are orthonormalised by Gram-Schmidt
//! with one re-orthogonalisation pass, giving v = E R with R upper
//! triangular. R^T R is the Gram matrix of the edges, so the equidistance
//! system G alpha = b (b_k = |v_k|^2 / 2) splits into two triangular solves;
//! the first one, R^T c = b, already yields the centre in frame coordinates.

use serde::{Deserialize, Serialize};

use crate::{BallConfig, Error, Result};

/// Default threshold on Gram-Schmidt pivots below which a flat is degenerate.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-12;

/// Where the circumsphere lies relative to the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Entirely inside the ball.
    C,
    /// Crosses the unit sphere, centre inside the ball.
    D,
    /// Crosses the unit sphere, centre outside the ball.
    E,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::C, Family::D, Family::E];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::C => "C",
            Family::D => "D",
            Family::E => "E",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            "E" | "e" => Ok(Family::E),
            _ => Err(Error::domain(format!("unknown family {s:?}"))),
        }
    }
}

/// `n + 1` points of R^d stored row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexSample {
    cfg: BallConfig,
    points: Vec<f64>,
}

impl SimplexSample {
    pub fn new(points: &[Vec<f64>]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::domain("a simplex needs at least two points"));
        }
        let d = points[0].len();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::ShapeMismatch(
                "points of different dimensions".into(),
            ));
        }
        let cfg = BallConfig::new(d, points.len() - 1)?;
        Ok(Self {
            cfg,
            points: points.concat(),
        })
    }

    pub fn from_flat(cfg: BallConfig, points: Vec<f64>) -> Result<Self> {
        if points.len() != cfg.points() * cfg.d {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for {} points in R^{}",
                points.len(),
                cfg.points(),
                cfg.d
            )));
        }
        Ok(Self { cfg, points })
    }

    pub fn cfg(&self) -> BallConfig {
        self.cfg
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.cfg.d..(i + 1) * self.cfg.d]
    }

    pub fn coords(&self) -> &[f64] {
        &self.points
    }

    /// True if every point lies strictly inside the unit ball.
    pub fn in_unit_ball(&self) -> bool {
        (0..self.cfg.points()).all(|i| dot(self.point(i), self.point(i)) < 1.0)
    }
}

/// Circumsphere of a simplex and the derived lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircumRecord {
    /// Circumradius.
    pub omega: f64,
    /// Distance from O' (foot of the perpendicular from O on the flat) to the centre.
    pub delta: f64,
    /// Distance from O to the flat.
    pub h: f64,
    /// Distance from O to the centre.
    pub delta_c: f64,
    /// delta + omega.
    pub sigma: f64,
    /// Radius sqrt(1 - h^2) of the ball's section by the flat.
    pub r: f64,
    pub family: Family,
    /// Smallest Gram-Schmidt pivot, a near-degeneracy indicator.
    pub min_pivot: f64,
}

impl CircumRecord {
    /// O' lies outside the circumsphere.
    pub fn origin_outside(&self) -> bool {
        self.delta > self.omega
    }
}

/// Family of a circumsphere from sigma, h and delta_c.
pub fn classify(sigma: f64, h: f64, delta_c: f64) -> Family {
    if sigma < (1.0 - h * h).sqrt() {
        Family::C
    } else if delta_c < 1.0 {
        Family::D
    } else {
        Family::E
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal frame spanning the given vectors.
pub fn gram_schmidt(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    gram_schmidt_tol(vectors, DEFAULT_PIVOT_TOL)
}

pub fn gram_schmidt_tol(vectors: &[Vec<f64>], tol: f64) -> Result<Vec<Vec<f64>>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let d = first.len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::ShapeMismatch(
            "vectors of different dimensions".into(),
        ));
    }
    if vectors.len() > d {
        return Err(Error::DegenerateFlat { pivot: 0.0, tol });
    }
    let n = vectors.len();
    let mut frame = vec![0.0; n * d];
    let mut r = vec![0.0; n * n];
    for (k, v) in vectors.iter().enumerate() {
        frame[k * d..(k + 1) * d].copy_from_slice(v);
        orthonormalise_column(&mut frame, &mut r, d, n, k, tol)?;
    }
    Ok(frame.chunks(d).map(<[f64]>::to_vec).collect())
}

/// Orthogonalises row `k` of `frame` against rows `0..k` (two passes),
/// accumulating the coefficients in column `k` of `r`, then normalises it.
/// Returns the pivot norm.
fn orthonormalise_column(
    frame: &mut [f64],
    r: &mut [f64],
    d: usize,
    n: usize,
    k: usize,
    tol: f64,
) -> Result<f64> {
    for j in 0..k {
        r[j * n + k] = 0.0;
    }
    let (done, rest) = frame.split_at_mut(k * d);
    let w = &mut rest[..d];
    for _ in 0..2 {
        for j in 0..k {
            let e = &done[j * d..(j + 1) * d];
            let p = dot(e, w);
            r[j * n + k] += p;
            for (wi, ei) in w.iter_mut().zip(e) {
                *wi -= p * ei;
            }
        }
    }
    let norm = dot(w, w).sqrt();
    if !(norm >= tol) {
        return Err(Error::DegenerateFlat { pivot: norm, tol });
    }
    r[k * n + k] = norm;
    let inv = 1.0 / norm;
    for wi in w.iter_mut() {
        *wi *= inv;
    }
    Ok(norm)
}

/// Reusable workspace for repeated circumsphere computations of one shape.
#[derive(Debug, Clone)]
pub struct CircumSolver {
    cfg: BallConfig,
    tol: f64,
    frame: Vec<f64>,
    r: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    alpha: Vec<f64>,
    center: Vec<f64>,
}

impl CircumSolver {
    pub fn new(cfg: BallConfig) -> Self {
        Self::with_tol(cfg, DEFAULT_PIVOT_TOL)
    }

    pub fn with_tol(cfg: BallConfig, tol: f64) -> Self {
        let (d, n) = (cfg.d, cfg.n);
        Self {
            cfg,
            tol,
            frame: vec![0.0; n * d],
            r: vec![0.0; n * n],
            b: vec![0.0; n],
            c: vec![0.0; n],
            alpha: vec![0.0; n],
            center: vec![0.0; d],
        }
    }

    pub fn cfg(&self) -> BallConfig {
        self.cfg
    }

    /// Computes the circumsphere of `points` (`(n + 1) * d` coordinates).
    pub fn solve(&mut self, points: &[f64]) -> Result<CircumRecord> {
        let (d, n) = (self.cfg.d, self.cfg.n);
        if points.len() != (n + 1) * d {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coordinates, got {}",
                (n + 1) * d,
                points.len()
            )));
        }
        let a1 = &points[..d];
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let ak = &points[(k + 1) * d..(k + 2) * d];
            let row = &mut self.frame[k * d..(k + 1) * d];
            let mut len2 = 0.0;
            for ((x, p), q) in row.iter_mut().zip(ak).zip(a1) {
                *x = p - q;
                len2 += *x * *x;
            }
            self.b[k] = 0.5 * len2;
            let pivot = orthonormalise_column(&mut self.frame, &mut self.r, d, n, k, self.tol)?;
            min_pivot = min_pivot.min(pivot);
        }
        // R^T c = b
        for k in 0..n {
            let mut s = self.b[k];
            for j in 0..k {
                s -= self.r[j * n + k] * self.c[j];
            }
            self.c[k] = s / self.r[k * n + k];
        }
        // R alpha = c
        for k in (0..n).rev() {
            let mut s = self.c[k];
            for j in k + 1..n {
                s -= self.r[k * n + j] * self.alpha[j];
            }
            self.alpha[k] = s / self.r[k * n + k];
        }
        let omega = dot(&self.c, &self.c).sqrt();
        self.center.copy_from_slice(a1);
        let mut par2 = 0.0;
        for k in 0..n {
            let e = &self.frame[k * d..(k + 1) * d];
            let s = dot(a1, e) + self.c[k];
            par2 += s * s;
            for (x, ei) in self.center.iter_mut().zip(e) {
                *x += self.c[k] * ei;
            }
        }
        let delta_c = dot(&self.center, &self.center).sqrt();
        let (delta, h) = if n == d {
            (delta_c, 0.0)
        } else {
            // component of OA_1 orthogonal to the flat
            let mut perp2 = 0.0;
            for i in 0..d {
                let mut x = a1[i];
                for k in 0..n {
                    let e = &self.frame[k * d..(k + 1) * d];
                    x -= dot(a1, e) * e[i];
                }
                perp2 += x * x;
            }
            (par2.sqrt(), perp2.sqrt())
        };
        let sigma = delta + omega;
        let r = (1.0 - h * h).sqrt();
        Ok(CircumRecord {
            omega,
            delta,
            h,
            delta_c,
            sigma,
            r,
            family: classify(sigma, h, delta_c),
            min_pivot,
        })
    }

    /// Centre of the last solved circumsphere.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Barycentric weights alpha_2..alpha_(n+1) of the last solve, with
    /// C = A_1 + sum_k alpha_k (A_k - A_1).
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Orthonormal frame of the last solve, one vector per row.
    pub fn frame(&self) -> &[f64] {
        &self.frame
    }
}

/// Circumsphere of a sample with the default pivot tolerance.
pub fn circumsphere(sample: &SimplexSample) -> Result<CircumRecord> {
    CircumSolver::new(sample.cfg()).solve(sample.coords())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randvar::{sample_uniform_ball_into, RngStream};
    use proptest::prelude::*;

    fn sample(points: &[&[f64]]) -> SimplexSample {
        SimplexSample::new(&points.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn frame_examples() {
        let f = gram_schmidt(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(f, vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let f = gram_schmidt(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(f, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(
            gram_schmidt(&[vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(Error::DegenerateFlat { .. })
        ));
    }

    #[test]
    fn right_triangle() {
        let s = sample(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let mut solver = CircumSolver::new(s.cfg());
        let rec = solver.solve(s.coords()).unwrap();
        assert!((rec.omega - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(dist(solver.center(), &[0.5, 0.5]) < 1e-15);
        assert_eq!(rec.h, 0.0);
        assert_eq!(rec.delta, rec.delta_c);
        for i in 0..3 {
            assert!((dist(solver.center(), s.point(i)) - rec.omega).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_segment() {
        let p = [0.3, -0.2, 0.5];
        let q: Vec<f64> = p.iter().map(|x| -x).collect();
        let rec = circumsphere(&sample(&[&p, &q])).unwrap();
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((rec.omega - norm).abs() < 1e-15);
        assert!(rec.delta < 1e-15 && rec.delta_c < 1e-15);
    }

    #[test]
    fn segment_midpoint() {
        let (a, b) = ([0.1, 0.2, -0.3], [0.5, -0.4, 0.2]);
        let mut solver = CircumSolver::new(BallConfig::new(3, 1).unwrap());
        let rec = solver.solve(&[a, b].concat()).unwrap();
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        assert!(dist(solver.center(), &mid) < 1e-15);
        assert!((rec.omega - dist(&a, &b) / 2.0).abs() < 1e-15);
    }

    /// Vertices e_1 .. e_(n+1) of R^(n+1) scaled by `scale`.
    fn regular(n: usize, scale: f64) -> Vec<f64> {
        let d = n + 1;
        let mut pts = vec![0.0; (n + 1) * d];
        for i in 0..=n {
            pts[i * d + i] = scale;
        }
        pts
    }

    #[test]
    fn regular_simplex_radius() {
        for n in 1..=8 {
            let pts = regular(n, 1.0);
            let cfg = BallConfig::new(n + 1, n).unwrap();
            let rec = CircumSolver::new(cfg).solve(&pts).unwrap();
            let a0 = 2f64.sqrt();
            let expect = a0 / 2f64.sqrt() * (n as f64 / (n as f64 + 1.0)).sqrt();
            assert!((rec.omega - expect).abs() < 1e-14, "n = {n}");
        }
        let rec = CircumSolver::new(BallConfig::new(3, 2).unwrap())
            .solve(&regular(2, 1.0))
            .unwrap();
        assert!((rec.omega - 0.816_496_580_927_726).abs() < 1e-14);
    }

    #[test]
    fn regular_simplex_distance_relation() {
        // (n+1)(a_0^4 + sum a_k^4) = (a_0^2 + sum a_k^2)^2 for points of the flat
        for n in 1..=6 {
            let d = n + 1;
            let pts = regular(n, 0.7);
            let mut solver = CircumSolver::new(BallConfig::new(d, n).unwrap());
            solver.solve(&pts).unwrap();
            let a0 = 0.7 * 2f64.sqrt();
            let check = |p: &[f64]| {
                let mut s2 = a0 * a0;
                let mut s4 = a0.powi(4);
                for i in 0..=n {
                    let a = dist(p, &pts[i * d..(i + 1) * d]);
                    s2 += a * a;
                    s4 += a.powi(4);
                }
                ((n as f64 + 1.0) * s4 - s2 * s2).abs() / (s2 * s2)
            };
            assert!(check(solver.center()) < 1e-9, "centre, n = {n}");
            // an affine combination of the vertices
            let w: Vec<f64> = (0..=n).map(|i| 0.1 + i as f64).collect();
            let total: f64 = w.iter().sum();
            let mut p = vec![0.0; d];
            for i in 0..=n {
                for j in 0..d {
                    p[j] += w[i] / total * pts[i * d + j];
                }
            }
            assert!(check(&p) < 1e-9, "interior point, n = {n}");
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(0.3, 0.0, 0.1), Family::C);
        assert_eq!(classify(1.5, 0.0, 0.9), Family::D);
        assert_eq!(classify(3.0, 0.0, 2.5), Family::E);
        assert_eq!(classify(0.9, 0.5, 0.6), Family::D);
    }

    #[test]
    fn shape_errors() {
        let mut solver = CircumSolver::new(BallConfig::new(3, 2).unwrap());
        assert!(matches!(
            solver.solve(&[0.0; 8]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(SimplexSample::new(&[vec![0.0, 0.0], vec![0.0]]).is_err());
    }

    #[test]
    fn collinear_triangle_is_degenerate() {
        let s = sample(&[&[0.0, 0.0, 0.0], &[0.1, 0.1, 0.1], &[0.2, 0.2, 0.2]]);
        assert!(matches!(
            circumsphere(&s),
            Err(Error::DegenerateFlat { .. })
        ));
    }

    fn random_points(cfg: BallConfig, seed: u64) -> Vec<f64> {
        let mut s = RngStream::new(seed, 0);
        let mut pts = vec![0.0; cfg.points() * cfg.d];
        for p in pts.chunks_mut(cfg.d) {
            sample_uniform_ball_into(p, &mut s);
        }
        pts
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn record_invariants(seed in any::<u64>(), d in 1usize..10, n_off in 0usize..10) {
            let n = 1 + n_off % d;
            let cfg = BallConfig::new(d, n).unwrap();
            let pts = random_points(cfg, seed);
            let mut solver = CircumSolver::new(cfg);
            let rec = solver.solve(&pts).unwrap();
            let c = solver.center().to_vec();
            // equidistance
            for i in 0..=n {
                let e = (dist(&c, &pts[i * d..(i + 1) * d]) - rec.omega).abs();
                prop_assert!(e <= 1e-9 * rec.omega.max(1.0));
            }
            // barycentric form of the centre
            let mut bc = pts[..d].to_vec();
            for (k, a) in solver.alpha().iter().enumerate() {
                for j in 0..d {
                    bc[j] += a * (pts[(k + 1) * d + j] - pts[j]);
                }
            }
            prop_assert!(dist(&bc, &c) <= 1e-9 * rec.omega.max(1.0));
            // Pythagoras in the right triangle O O' C
            let lhs = rec.delta_c * rec.delta_c;
            let rhs = rec.delta * rec.delta + rec.h * rec.h;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1e-300) + 1e-15);
            prop_assert!(rec.omega >= 0.0 && rec.delta >= 0.0 && rec.h >= 0.0);
            if n == d {
                prop_assert_eq!(rec.h, 0.0);
                prop_assert_eq!(rec.delta, rec.delta_c);
            }
            if rec.family == Family::C {
                prop_assert!(rec.sigma < rec.r);
                prop_assert!(rec.delta_c + rec.omega <= 2f64.sqrt() + 1e-9);
            }
        }

        #[test]
        fn frame_is_orthonormal(seed in any::<u64>(), d in 2usize..10, n_off in 0usize..10) {
            let n = 1 + n_off % d;
            let mut s = RngStream::new(seed, 1);
            let vs: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| s.std_normal()).collect()).collect();
            let f = gram_schmidt(&vs).unwrap();
            for i in 0..n {
                prop_assert!((dot(&f[i], &f[i]) - 1.0).abs() <= 1e-12);
                for j in 0..i {
                    prop_assert!(dot(&f[i], &f[j]).abs() <= 1e-10);
                }
            }
            // each input is reproduced by its projection on the frame
            for v in &vs {
                let mut p = vec![0.0; d];
                for e in &f {
                    let c = dot(v, e);
                    for j in 0..d {
                        p[j] += c * e[j];
                    }
                }
                prop_assert!(dist(&p, v) <= 1e-10 * dot(v, v).sqrt().max(1.0));
            }
            // the perpendicular part of a random point is orthogonal to the frame
            let x: Vec<f64> = (0..d).map(|_| s.std_normal()).collect();
            let mut perp = x.clone();
            for e in &f {
                let c = dot(&x, e);
                for j in 0..d {
                    perp[j] -= c * e[j];
                }
            }
            for e in &f {
                prop_assert!(dot(&perp, e).abs() <= 1e-9);
            }
        }
    }
}
