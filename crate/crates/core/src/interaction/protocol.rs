use alloc::string::String;
use alloc::vec::Vec;

use super::segmenters::{AutoSegmenter, GraphCutRefiner, SeededSegmenter};
use super::user::{plan_correction, simulate_initial_seeds, Correction};
use super::{InteractionEvent, InteractionKind, SessionRecord, SimulatedUserParams};
use crate::error::{Error, Result};
use crate::graphcut::GraphCutParams;
use crate::metrics::{iou, time_block, Clock};
use crate::morphology::erode_l1;
use crate::raster::{Annotation, BinaryMask, LabelRaster, Raster, Seed};

/// Identifiers copied into the produced [`SessionRecord`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SessionIds {
    pub image: String,
    pub algorithm: String,
    pub protocol: String,
    pub external: bool,
}

/// How corrections reach the mask in the algorithm-assists-user protocol.
#[derive(Clone, Debug, PartialEq)]
pub enum RefineMode {
    /// The corrective disk is written straight into the mask.
    Paint,
    /// Graph cut re-segments from auto-seeds plus every corrective stroke.
    GraphCutRefine(GraphCutParams),
}

/// Seeds derived from a mask: its interior eroded by `erosion` pixels is
/// foreground, the eroded complement is background.
pub fn auto_seeds(mask: &BinaryMask, erosion: u32) -> LabelRaster {
    let (w, h) = mask.dims();
    let fg = erode_l1(mask, erosion);
    let bg = erode_l1(&mask.complement(), erosion);
    let values = fg
        .labels()
        .iter()
        .zip(bg.labels())
        .map(|(&f, &b)| match (f, b) {
            (true, _) => Seed::Fg,
            (_, true) => Seed::Bg,
            _ => Seed::Unknown,
        })
        .collect();
    LabelRaster::from_values(w, h, values).expect("same size")
}

/// Accumulates events, masks and IoU while a protocol runs.
struct Session<'a> {
    gt: &'a BinaryMask,
    p: &'a SimulatedUserParams,
    clock: &'a dyn Clock,
    events: Vec<InteractionEvent>,
    masks: Vec<BinaryMask>,
    compute_times: Vec<f64>,
    iou_trace: Vec<f64>,
}

impl<'a> Session<'a> {
    fn new(gt: &'a BinaryMask, p: &'a SimulatedUserParams, clock: &'a dyn Clock) -> Self {
        Self {
            gt,
            p,
            clock,
            events: Vec::new(),
            masks: Vec::new(),
            compute_times: Vec::new(),
            iou_trace: Vec::new(),
        }
    }

    fn event(&mut self, kind: InteractionKind, annotation: Annotation) {
        self.events.push(InteractionEvent {
            index: self.events.len(),
            kind,
            annotation,
            simulated_time: self.p.seconds_per_interaction,
        });
    }

    fn compute(&mut self, f: impl FnOnce() -> Result<BinaryMask>) -> Result<BinaryMask> {
        let (mask, secs) = time_block(self.clock, f);
        self.compute_times.push(secs);
        mask
    }

    fn record_mask(&mut self, mask: BinaryMask) -> Result<()> {
        self.iou_trace.push(iou(self.gt, &mask)?);
        self.masks.push(mask);
        Ok(())
    }

    fn current(&self) -> &BinaryMask {
        self.masks.last().expect("initial mask recorded")
    }

    fn done(&self, corrections: usize, budget: usize) -> bool {
        corrections >= budget || *self.iou_trace.last().expect("trace") >= self.p.target_iou
    }

    fn finish(self, ids: &SessionIds) -> SessionRecord {
        let interaction_seconds = self.p.seconds_per_interaction * self.events.len() as f64;
        SessionRecord {
            image_id: ids.image.clone(),
            algorithm_id: ids.algorithm.clone(),
            protocol_id: ids.protocol.clone(),
            external: ids.external,
            events: self.events,
            initial_iou: self.iou_trace[0],
            refined_iou: *self.iou_trace.last().expect("trace"),
            masks: self.masks,
            compute_times: self.compute_times,
            iou_trace: self.iou_trace,
            interaction_seconds,
        }
    }
}

fn check_dims(img: &Raster, gt: &BinaryMask) -> Result<()> {
    gt.ensure_same_dims(img.dims())
}

/// Writes the corrective disk into the mask, restricted to the error
/// component it targets.
fn paint(current: &BinaryMask, c: &Correction) -> Result<BinaryMask> {
    let mut next = current.clone();
    let fg = c.stroke.label.is_fg();
    let disk = Annotation {
        strokes: alloc::vec![c.stroke.clone()],
    }
    .rasterize(current.width(), current.height())?;
    for &i in &c.component {
        if disk.values()[i] != Seed::Unknown {
            next.labels_mut()[i] = fg;
        }
    }
    Ok(next)
}

/// Corrections re-segment from auto-seeds of the current mask overlaid with
/// the stroke pool, until a stop rule fires. A correction the refiner cannot
/// use because a seed class is still missing is painted instead.
fn refine_loop(
    s: &mut Session<'_>,
    img: &Raster,
    refiner: &dyn SeededSegmenter,
    pool: &mut Annotation,
    budget: usize,
) -> Result<()> {
    let (w, h) = img.dims();
    let mut corrections = 0;
    while !s.done(corrections, budget) {
        let Some(c) = plan_correction(s.gt, s.current(), s.p)? else {
            break;
        };
        let stroke = Annotation {
            strokes: alloc::vec![c.stroke.clone()],
        };
        pool.extend(&stroke);
        s.event(InteractionKind::Correction, stroke);
        let mut seeds = auto_seeds(s.current(), s.p.auto_seed_erosion);
        seeds.overlay(&pool.rasterize(w, h)?);
        let next = match s.compute(|| refiner.segment(img, &seeds)) {
            Err(Error::MissingSeedClass(_) | Error::NoSeeds | Error::InsufficientLabels) => paint(s.current(), &c)?,
            other => other?,
        };
        s.record_mask(next)?;
        corrections += 1;
    }
    Ok(())
}

/// The algorithm segments first; the simulated user then corrects it, either
/// by painting or by steering a graph-cut re-segmentation.
pub fn run_algorithm_assists_user(
    segmenter: &dyn AutoSegmenter,
    img: &Raster,
    gt: &BinaryMask,
    p: &SimulatedUserParams,
    mode: &RefineMode,
    ids: &SessionIds,
    clock: &dyn Clock,
) -> Result<SessionRecord> {
    check_dims(img, gt)?;
    let mut s = Session::new(gt, p, clock);
    let initial = s.compute(|| segmenter.segment(img))?;
    initial.ensure_same_dims(img.dims())?;
    s.record_mask(initial)?;
    match mode {
        RefineMode::Paint => {
            let mut corrections = 0;
            while !s.done(corrections, p.max_interactions) {
                let Some(c) = plan_correction(gt, s.current(), p)? else {
                    break;
                };
                let next = paint(s.current(), &c)?;
                s.event(
                    InteractionKind::DirectPaint,
                    Annotation {
                        strokes: alloc::vec![c.stroke],
                    },
                );
                s.record_mask(next)?;
                corrections += 1;
            }
        }
        RefineMode::GraphCutRefine(params) => {
            let refiner = GraphCutRefiner(params.clone());
            refine_loop(&mut s, img, &refiner, &mut Annotation::new(), p.max_interactions)?;
        }
    }
    Ok(s.finish(ids))
}

/// The user seeds first and the refiner segments from the seeds; further
/// corrective strokes join the seed set and the refiner re-runs on all of
/// them. The seeding counts against the budget.
pub fn run_user_assists_algorithm(
    refiner: &dyn SeededSegmenter,
    img: &Raster,
    gt: &BinaryMask,
    p: &SimulatedUserParams,
    ids: &SessionIds,
    clock: &dyn Clock,
) -> Result<SessionRecord> {
    check_dims(img, gt)?;
    let (w, h) = img.dims();
    let mut s = Session::new(gt, p, clock);
    let mut pool = simulate_initial_seeds(gt, p)?;
    s.event(InteractionKind::InitialSeeding, pool.clone());
    let seeds = pool.rasterize(w, h)?;
    let initial = s.compute(|| refiner.segment(img, &seeds))?;
    s.record_mask(initial)?;
    let budget = p.max_interactions.saturating_sub(1);
    let mut corrections = 0;
    while !s.done(corrections, budget) {
        let Some(c) = plan_correction(gt, s.current(), p)? else {
            break;
        };
        let stroke = Annotation {
            strokes: alloc::vec![c.stroke.clone()],
        };
        pool.extend(&stroke);
        s.event(InteractionKind::Correction, stroke);
        let seeds = pool.rasterize(w, h)?;
        let next = s.compute(|| refiner.segment(img, &seeds))?;
        s.record_mask(next)?;
        corrections += 1;
    }
    Ok(s.finish(ids))
}

/// Automatic initial mask, then corrective strokes with re-segmentation by
/// `refiner` from auto-seeds plus the stroke pool. Without a segmenter the
/// initial mask comes from the simulated user's seeds and the refiner; that
/// seeding is logged as an event and kept in the pool.
pub fn run_hybrid(
    segmenter: Option<&dyn AutoSegmenter>,
    refiner: &dyn SeededSegmenter,
    img: &Raster,
    gt: &BinaryMask,
    p: &SimulatedUserParams,
    ids: &SessionIds,
    clock: &dyn Clock,
) -> Result<SessionRecord> {
    check_dims(img, gt)?;
    let (w, h) = img.dims();
    let mut s = Session::new(gt, p, clock);
    let mut pool = Annotation::new();
    let budget = match segmenter {
        Some(seg) => {
            let initial = s.compute(|| seg.segment(img))?;
            initial.ensure_same_dims(img.dims())?;
            s.record_mask(initial)?;
            p.max_interactions
        }
        None => {
            pool = simulate_initial_seeds(gt, p)?;
            s.event(InteractionKind::InitialSeeding, pool.clone());
            let seeds = pool.rasterize(w, h)?;
            let initial = s.compute(|| refiner.segment(img, &seeds))?;
            s.record_mask(initial)?;
            p.max_interactions.saturating_sub(1)
        }
    };
    refine_loop(&mut s, img, refiner, &mut pool, budget)?;
    Ok(s.finish(ids))
}
