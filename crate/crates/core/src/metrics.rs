//! Overlap metrics, summary statistics and timing.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::SessionRecord;
use crate::raster::BinaryMask;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iou: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub compute_seconds: f64,
    pub interaction_seconds: f64,
}

struct Counts {
    gt: usize,
    pred: usize,
    inter: usize,
    union: usize,
}

fn counts(gt: &BinaryMask, pred: &BinaryMask) -> Result<Counts> {
    pred.ensure_same_dims(gt.dims())?;
    let mut c = Counts {
        gt: 0,
        pred: 0,
        inter: 0,
        union: 0,
    };
    for (&g, &p) in gt.labels().iter().zip(pred.labels()) {
        c.gt += g as usize;
        c.pred += p as usize;
        c.inter += (g && p) as usize;
        c.union += (g || p) as usize;
    }
    Ok(c)
}

/// `|GT ∩ P| / |GT ∪ P|`; two empty masks agree perfectly (1.0).
pub fn iou(gt: &BinaryMask, pred: &BinaryMask) -> Result<f64> {
    let c = counts(gt, pred)?;
    if c.union == 0 {
        return Ok(1.0);
    }
    Ok(c.inter as f64 / c.union as f64)
}

/// Expansion factor `|GT ∪ P| / |GT|` and area ratio `|P| / |GT|`.
pub fn alpha_beta(gt: &BinaryMask, pred: &BinaryMask) -> Result<(f64, f64)> {
    let c = counts(gt, pred)?;
    if c.gt == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    Ok((c.union as f64 / c.gt as f64, c.pred as f64 / c.gt as f64))
}

/// Refined minus initial IoU of a session.
pub fn iou_improvement(rec: &SessionRecord) -> Result<f64> {
    if rec.masks.is_empty() || rec.iou_trace.is_empty() {
        return Err(Error::EmptyRecord);
    }
    Ok(rec.refined_iou - rec.initial_iou)
}

/// Quantile with linear interpolation between closest ranks: position
/// `(n - 1) * q` in the sorted sample.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = libm::floor(pos) as usize;
    let hi = libm::ceil(pos) as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Box-plot statistics of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumber {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v: Vec<f64> = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Self {
            min: v[0],
            q1: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q3: quantile(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Monotonic time source in seconds. The std crate provides one backed by
/// `std::time::Instant`.
pub trait Clock {
    fn now(&self) -> f64;
}

/// A clock that never advances; sessions timed with it report zero compute.
#[derive(Clone, Copy, Debug, Default)]
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn now(&self) -> f64 {
        0.0
    }
}

/// Runs `f` and returns its result with the elapsed seconds.
pub fn time_block<R>(clock: &dyn Clock, f: impl FnOnce() -> R) -> (R, f64) {
    let start = clock.now();
    let out = f();
    let elapsed = (clock.now() - start).max(0.0);
    (out, elapsed)
}
