//! Parallel Monte Carlo driver.
//!
//! `N` events are split into `workers` contiguous blocks, block `i` drawing
//! from stream `first_stream + i` of the seed. Each block fills its own
//! accumulators; the blocks are then merged. All sums are kept exactly, so a
//! merged result does not depend on how the events were grouped, and a run
//! can be reassembled bit for bit from separately computed pieces.

mod accum;
mod blockmax;
mod histogram;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use accum::{ExactSum, MomentEstimate, PowerSums, MAX_POWER};
pub use blockmax::BlockMaxSegment;
pub use histogram::{sig10, Histogram, Spacing};

use crate::analytic::Var;
use crate::geometry::{CircumRecord, CircumSolver, Family, DEFAULT_PIVOT_TOL};
use crate::randvar::{sample_uniform_ball_into, RngStream};
use crate::{BallConfig, Error, Result};
use accum::PowerAccum;
use blockmax::BlockMaxAccum;

/// Consecutive degenerate draws after which a block gives up.
const MAX_DEGENERATE_STREAK: u64 = 1_000_000;

/// Which events feed the filtered histograms and moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyFilter {
    C,
    D,
    E,
    #[serde(rename = "all")]
    All,
}

impl FamilyFilter {
    pub fn accepts(self, f: Family) -> bool {
        match self {
            FamilyFilter::C => f == Family::C,
            FamilyFilter::D => f == Family::D,
            FamilyFilter::E => f == Family::E,
            FamilyFilter::All => true,
        }
    }
}

impl fmt::Display for FamilyFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyFilter::C => "C",
            FamilyFilter::D => "D",
            FamilyFilter::E => "E",
            FamilyFilter::All => "all",
        })
    }
}

impl FromStr for FamilyFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" | "ALL" | "All" => Ok(FamilyFilter::All),
            _ => s.parse::<Family>().map(|f| match f {
                Family::C => FamilyFilter::C,
                Family::D => FamilyFilter::D,
                Family::E => FamilyFilter::E,
            }),
        }
    }
}

/// Quantities that can be histogrammed. `OmegaAll` is the circumradius of
/// every event regardless of the family filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tracked {
    Omega,
    Delta,
    H,
    DeltaC,
    Sigma,
    R,
    OmegaAll,
}

impl Tracked {
    pub fn name(self) -> &'static str {
        match self {
            Tracked::OmegaAll => "omega_all",
            t => t.as_var().expect("filtered variable").name(),
        }
    }

    pub fn as_var(self) -> Option<Var> {
        Some(match self {
            Tracked::Omega => Var::Omega,
            Tracked::Delta => Var::Delta,
            Tracked::H => Var::H,
            Tracked::DeltaC => Var::DeltaC,
            Tracked::Sigma => Var::Sigma,
            Tracked::R => Var::R,
            Tracked::OmegaAll => return None,
        })
    }

    pub fn from_var(v: Var) -> Self {
        match v {
            Var::Omega => Tracked::Omega,
            Var::Delta => Tracked::Delta,
            Var::H => Tracked::H,
            Var::DeltaC => Tracked::DeltaC,
            Var::Sigma => Tracked::Sigma,
            Var::R => Tracked::R,
        }
    }

    #[inline]
    pub fn value(self, rec: &CircumRecord) -> f64 {
        match self {
            Tracked::Omega | Tracked::OmegaAll => rec.omega,
            Tracked::Delta => rec.delta,
            Tracked::H => rec.h,
            Tracked::DeltaC => rec.delta_c,
            Tracked::Sigma => rec.sigma,
            Tracked::R => rec.r,
        }
    }

    /// Histogram range used for this variable under `filter`.
    pub fn default_range(self, filter: FamilyFilter) -> (f64, f64, Spacing) {
        const LOG: (f64, f64, Spacing) = (1e-3, 1e9, Spacing::Log);
        match (self, filter) {
            (Tracked::OmegaAll, _) => LOG,
            (Tracked::H | Tracked::R, _) | (_, FamilyFilter::C) => (0.0, 1.0, Spacing::Linear),
            (Tracked::Omega, FamilyFilter::D) => (0.0, 2.0, Spacing::Linear),
            (Tracked::Sigma, FamilyFilter::D) => (0.0, 3.0, Spacing::Linear),
            (Tracked::Delta | Tracked::DeltaC, FamilyFilter::D) => (0.0, 1.0, Spacing::Linear),
            _ => LOG,
        }
    }
}

impl fmt::Display for Tracked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tracked {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("omega_all") {
            return Ok(Tracked::OmegaAll);
        }
        s.parse::<Var>().map(Tracked::from_var)
    }
}

/// Family-C events whose circumradius lies in [center - half_width,
/// center + half_width]; their delta_c values are histogrammed on (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaSlice {
    pub center: f64,
    pub half_width: f64,
}

/// Everything that must agree for two results to be mergeable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimShape {
    pub cfg: BallConfig,
    pub seed: u64,
    pub bins: usize,
    pub family_filter: FamilyFilter,
    pub tracked: Vec<Tracked>,
    pub block_max_ks: Vec<u64>,
    pub slice: Option<OmegaSlice>,
    pub pivot_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(flatten)]
    pub shape: SimShape,
    pub n_events: u64,
    pub workers: usize,
    pub first_stream: u64,
    pub first_event: u64,
}

impl SimConfig {
    /// Family C, 1000 bins, the five filtered variables (h only when n < d),
    /// one worker per available core.
    pub fn new(cfg: BallConfig, n_events: u64, seed: u64) -> Self {
        let mut tracked = vec![
            Tracked::Omega,
            Tracked::Delta,
            Tracked::DeltaC,
            Tracked::Sigma,
        ];
        if cfg.n < cfg.d {
            tracked.insert(2, Tracked::H);
        }
        Self {
            shape: SimShape {
                cfg,
                seed,
                bins: 1000,
                family_filter: FamilyFilter::C,
                tracked,
                block_max_ks: Vec::new(),
                slice: None,
                pivot_tol: DEFAULT_PIVOT_TOL,
            },
            n_events,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            first_stream: 0,
            first_event: 0,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_bins(mut self, bins: usize) -> Self {
        self.shape.bins = bins;
        self
    }

    pub fn with_filter(mut self, filter: FamilyFilter) -> Self {
        self.shape.family_filter = filter;
        self
    }

    pub fn with_tracked(mut self, tracked: Vec<Tracked>) -> Self {
        self.shape.tracked = tracked;
        self
    }

    pub fn with_block_maxima(mut self, ks: Vec<u64>) -> Self {
        self.shape.block_max_ks = ks;
        self
    }

    pub fn with_slice(mut self, slice: OmegaSlice) -> Self {
        self.shape.slice = Some(slice);
        self
    }

    /// Places this run at streams `first_stream..` and global events
    /// `first_event..`, to be merged with runs covering the other events.
    pub fn with_offset(mut self, first_stream: u64, first_event: u64) -> Self {
        self.first_stream = first_stream;
        self.first_event = first_event;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.shape;
        BallConfig::new(s.cfg.d, s.cfg.n)?;
        if self.n_events < 1 {
            return Err(Error::domain("need at least one event"));
        }
        if self.workers < 1 {
            return Err(Error::domain("need at least one worker"));
        }
        if s.bins < 2 {
            return Err(Error::domain(format!(
                "need at least 2 bins, got {}",
                s.bins
            )));
        }
        if let Some(&k) = s.block_max_ks.iter().find(|&&k| k < 2) {
            return Err(Error::domain(format!(
                "block size must be at least 2, got {k}"
            )));
        }
        if let Some(sl) = s.slice {
            if !(sl.half_width > 0.0) {
                return Err(Error::domain("slice half-width must be positive"));
            }
        }
        if !(s.pivot_tol >= 0.0) {
            return Err(Error::domain("pivot tolerance must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCounts {
    pub c: u64,
    pub d: u64,
    pub e: u64,
}

impl FamilyCounts {
    pub fn get(&self, f: Family) -> u64 {
        match f {
            Family::C => self.c,
            Family::D => self.d,
            Family::E => self.e,
        }
    }

    fn bump(&mut self, f: Family) {
        match f {
            Family::C => self.c += 1,
            Family::D => self.d += 1,
            Family::E => self.e += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.c + self.d + self.e
    }
}

/// A new running maximum of the circumradius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxRecord {
    /// 1-based global event index at which the maximum was reached.
    pub event: u64,
    pub omega: f64,
    /// Smallest Gram-Schmidt pivot of that event.
    pub min_pivot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceResult {
    pub count: u64,
    pub histogram: Histogram,
}

/// Binomial proportion with its standard error sqrt(p (1 - p) / n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p: f64,
    pub se: f64,
}

impl BinomialEstimate {
    pub fn new(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InsufficientData("no trials".into()));
        }
        let p = successes as f64 / trials as f64;
        Ok(Self {
            successes,
            trials,
            p,
            se: (p * (1.0 - p) / trials as f64).sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimShape,
    pub first_event: u64,
    pub n_events: u64,
    pub family_counts: FamilyCounts,
    pub degenerate_resamples: u64,
    /// Family-C events with delta > omega.
    pub origin_outside_c: u64,
    /// Set when a block stopped early; `n_events` counts only what was simulated.
    pub truncated: bool,
    pub histograms: BTreeMap<String, Histogram>,
    pub power_sums: BTreeMap<String, PowerSums>,
    pub max_history: Vec<MaxRecord>,
    pub block_maxima: Vec<BlockMaxSegment>,
    pub slice: Option<SliceResult>,
}

#[derive(Serialize)]
struct JsonView<'a> {
    #[serde(flatten)]
    result: &'a SimResult,
    moments: BTreeMap<String, Vec<MomentEstimate>>,
}

impl SimResult {
    /// Result with no events, the identity of [`merge`].
    pub fn empty(shape: &SimShape, first_event: u64) -> Result<Self> {
        let mut histograms = BTreeMap::new();
        let mut power_sums = BTreeMap::new();
        for &t in &shape.tracked {
            let (lo, hi, sp) = t.default_range(shape.family_filter);
            histograms.insert(
                t.name().to_string(),
                Histogram::new(lo, hi, shape.bins, sp)?,
            );
            power_sums.insert(t.name().to_string(), PowerSums::empty());
        }
        let slice = match shape.slice {
            Some(_) => Some(SliceResult {
                count: 0,
                histogram: Histogram::new(0.0, 1.0, shape.bins, Spacing::Linear)?,
            }),
            None => None,
        };
        Ok(Self {
            config: shape.clone(),
            first_event,
            n_events: 0,
            family_counts: FamilyCounts::default(),
            degenerate_resamples: 0,
            origin_outside_c: 0,
            truncated: false,
            histograms,
            power_sums,
            max_history: Vec::new(),
            block_maxima: shape
                .block_max_ks
                .iter()
                .map(|&k| BlockMaxSegment::empty(k, first_event))
                .collect(),
            slice,
        })
    }

    pub fn family_fraction(&self, f: Family) -> Result<BinomialEstimate> {
        BinomialEstimate::new(self.family_counts.get(f), self.n_events)
    }

    /// Sample moments k = 1..=6 of every tracked variable.
    pub fn moment_table(&self) -> BTreeMap<String, Vec<MomentEstimate>> {
        self.power_sums
            .iter()
            .filter(|(_, p)| p.count > 0)
            .map(|(name, p)| {
                (
                    name.clone(),
                    (1..=6).filter_map(|k| p.estimate(k).ok()).collect(),
                )
            })
            .collect()
    }

    pub fn moment(&self, t: Tracked, k: usize) -> Result<MomentEstimate> {
        self.power_sums
            .get(t.name())
            .ok_or_else(|| Error::domain(format!("{t} is not tracked")))?
            .estimate(k)
    }

    pub fn histogram(&self, t: Tracked) -> Result<&Histogram> {
        self.histograms
            .get(t.name())
            .ok_or_else(|| Error::domain(format!("{t} is not tracked")))
    }

    pub fn block_maxima(&self, k: u64) -> Result<&BlockMaxSegment> {
        self.block_maxima
            .iter()
            .find(|s| s.k == k)
            .ok_or_else(|| Error::domain(format!("block maxima for k = {k} were not collected")))
    }

    /// Conditional delta_c histogram of the omega slice.
    pub fn conditional_histogram(&self) -> Result<&SliceResult> {
        self.slice
            .as_ref()
            .ok_or_else(|| Error::domain("no omega slice was configured"))
    }

    /// Canonical JSON: the result plus its derived moment table. Floats are
    /// written in shortest round-trip form.
    pub fn to_json(&self) -> Result<String> {
        let view = JsonView {
            result: self,
            moments: self.moment_table(),
        };
        serde_json::to_string_pretty(&view)
            .map_err(|e| Error::eval(format!("JSON encoding failed: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::domain(format!("invalid result JSON: {e}")))
    }
}

/// Probability that O' lies outside the circumsphere, among family-C events.
pub fn estimate_origin_outside(result: &SimResult) -> Result<BinomialEstimate> {
    if result.family_counts.c == 0 {
        return Err(Error::InsufficientData("no family-C events".into()));
    }
    BinomialEstimate::new(result.origin_outside_c, result.family_counts.c)
}

/// Draws simplices of uniform points and their circumspheres from one stream.
pub struct EventGenerator {
    cfg: BallConfig,
    stream: RngStream,
    solver: CircumSolver,
    points: Vec<f64>,
    degenerate: u64,
}

impl EventGenerator {
    pub fn new(cfg: BallConfig, seed: u64, stream_id: u64, pivot_tol: f64) -> Self {
        Self {
            cfg,
            stream: RngStream::new(seed, stream_id),
            solver: CircumSolver::with_tol(cfg, pivot_tol),
            points: vec![0.0; cfg.points() * cfg.d],
            degenerate: 0,
        }
    }

    /// Next non-degenerate event; degenerate draws are resampled and counted.
    pub fn next_event(&mut self) -> Result<CircumRecord> {
        let d = self.cfg.d;
        let mut streak = 0;
        loop {
            for p in self.points.chunks_exact_mut(d) {
                sample_uniform_ball_into(p, &mut self.stream);
            }
            match self.solver.solve(&self.points) {
                Ok(rec) => return Ok(rec),
                Err(Error::DegenerateFlat { .. }) => {
                    self.degenerate += 1;
                    streak += 1;
                    if streak >= MAX_DEGENERATE_STREAK {
                        return Err(Error::eval(format!(
                            "{streak} consecutive degenerate simplices"
                        )));
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }

    /// Coordinates of the last event, point by point.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn degenerate_count(&self) -> u64 {
        self.degenerate
    }

    /// Collects `count` values of `t` from events accepted by `filter`.
    pub fn collect(&mut self, t: Tracked, filter: FamilyFilter, count: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let rec = self.next_event()?;
            if t == Tracked::OmegaAll || filter.accepts(rec.family) {
                out.push(t.value(&rec));
            }
        }
        Ok(out)
    }
}

fn run_block(shape: &SimShape, stream_id: u64, first_event: u64, count: u64) -> Result<SimResult> {
    let mut res = SimResult::empty(shape, first_event)?;
    let filtered: Vec<Tracked> = shape
        .tracked
        .iter()
        .copied()
        .filter(|&t| t != Tracked::OmegaAll)
        .collect();
    let all_idx = shape.tracked.iter().position(|&t| t == Tracked::OmegaAll);
    let names: Vec<&str> = shape.tracked.iter().map(|t| t.name()).collect();
    let mut hists: Vec<Histogram> = names.iter().map(|n| res.histograms[*n].clone()).collect();
    let mut powers: Vec<PowerAccum> = vec![PowerAccum::default(); names.len()];
    let filtered_idx: Vec<(usize, Tracked)> = filtered
        .iter()
        .map(|t| {
            (
                shape.tracked.iter().position(|x| x == t).expect("tracked"),
                *t,
            )
        })
        .collect();
    let mut blocks: Vec<BlockMaxAccum> = shape
        .block_max_ks
        .iter()
        .map(|&k| BlockMaxAccum::new(k, first_event))
        .collect();
    let mut gen = EventGenerator::new(shape.cfg, shape.seed, stream_id, shape.pivot_tol);
    let mut running_max = f64::NEG_INFINITY;
    let mut done = 0;
    for i in 0..count {
        let rec = match gen.next_event() {
            Ok(r) => r,
            Err(e) => {
                log::error!("stream {stream_id} stopped after {i} events: {e}");
                res.truncated = true;
                break;
            }
        };
        done += 1;
        res.family_counts.bump(rec.family);
        if rec.family == Family::C && rec.origin_outside() {
            res.origin_outside_c += 1;
        }
        if shape.family_filter.accepts(rec.family) {
            for &(j, t) in &filtered_idx {
                let v = t.value(&rec);
                hists[j].add(v);
                powers[j].add(v);
            }
            if let (Some(sl), Some(sr)) = (shape.slice, res.slice.as_mut()) {
                if rec.family == Family::C && (rec.omega - sl.center).abs() <= sl.half_width {
                    sr.count += 1;
                    sr.histogram.add(rec.delta_c);
                }
            }
        }
        if let Some(j) = all_idx {
            hists[j].add(rec.omega);
            powers[j].add(rec.omega);
        }
        if rec.omega > running_max {
            running_max = rec.omega;
            res.max_history.push(MaxRecord {
                event: first_event + i + 1,
                omega: rec.omega,
                min_pivot: rec.min_pivot,
            });
        }
        for b in blocks.iter_mut() {
            b.push(rec.omega);
        }
    }
    res.n_events = done;
    res.degenerate_resamples = gen.degenerate_count();
    for ((name, h), p) in names.iter().zip(hists).zip(powers) {
        res.histograms.insert(name.to_string(), h);
        res.power_sums.insert(name.to_string(), p.finish());
    }
    res.block_maxima = blocks.into_iter().map(BlockMaxAccum::finish).collect();
    Ok(res)
}

/// Runs the simulation described by `sim`; deterministic in (seed, workers,
/// first_stream, first_event).
pub fn run_simulation(sim: &SimConfig) -> Result<SimResult> {
    sim.validate()?;
    let w = sim.workers as u64;
    let (base, rem) = (sim.n_events / w, sim.n_events % w);
    let plan: Vec<(u64, u64, u64)> = (0..w)
        .scan(sim.first_event, |start, i| {
            let count = base + u64::from(i < rem);
            let item = (sim.first_stream + i, *start, count);
            *start += count;
            Some(item)
        })
        .collect();
    let parts: Vec<SimResult> = plan
        .par_iter()
        .map(|&(stream, start, count)| run_block(&sim.shape, stream, start, count))
        .collect::<Result<_>>()?;
    merge(&parts)
}

/// Merges results with identical shape; associative and commutative.
///
/// Block maxima require the results to cover adjacent event ranges.
pub fn merge(results: &[SimResult]) -> Result<SimResult> {
    let first = results
        .first()
        .ok_or_else(|| Error::InsufficientData("nothing to merge".into()))?;
    if let Some(r) = results.iter().find(|r| r.config != first.config) {
        return Err(Error::ShapeMismatch(format!(
            "cannot merge results of different shape: {:?} vs {:?}",
            first.config, r.config
        )));
    }
    let mut parts: Vec<&SimResult> = results.iter().filter(|r| r.n_events > 0).collect();
    if parts.is_empty() {
        return Ok(first.clone());
    }
    parts.sort_by_key(|r| r.first_event);
    let mut out = SimResult::empty(&first.config, parts[0].first_event)?;
    let mut history: Vec<MaxRecord> = Vec::new();
    for (idx, r) in parts.iter().enumerate() {
        out.n_events += r.n_events;
        out.family_counts.c += r.family_counts.c;
        out.family_counts.d += r.family_counts.d;
        out.family_counts.e += r.family_counts.e;
        out.degenerate_resamples += r.degenerate_resamples;
        out.origin_outside_c += r.origin_outside_c;
        out.truncated |= r.truncated;
        for (name, h) in &r.histograms {
            out.histograms
                .get_mut(name)
                .ok_or_else(|| Error::ShapeMismatch(format!("unexpected histogram {name}")))?
                .merge(h)?;
        }
        for (name, p) in &r.power_sums {
            out.power_sums
                .get_mut(name)
                .ok_or_else(|| Error::ShapeMismatch(format!("unexpected moments {name}")))?
                .merge(p);
        }
        history.extend_from_slice(&r.max_history);
        if let (Some(a), Some(b)) = (out.slice.as_mut(), r.slice.as_ref()) {
            a.count += b.count;
            a.histogram.merge(&b.histogram)?;
        }
        if idx == 0 {
            out.block_maxima = r.block_maxima.clone();
        } else {
            out.block_maxima = out
                .block_maxima
                .iter()
                .zip(&r.block_maxima)
                .map(|(a, b)| a.join(b))
                .collect::<Result<_>>()?;
        }
    }
    history.sort_by_key(|r| r.event);
    let mut best = f64::NEG_INFINITY;
    for rec in history {
        if rec.omega > best {
            best = rec.omega;
            out.max_history.push(rec);
        }
    }
    Ok(out)
}
