//! The run matrix: every (algorithm, protocol, image) cell, then aggregation.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use segbench_core::forest::{extract_features, Forest, TrainingSet};
use segbench_core::graphcut::GraphCutParams;
use segbench_core::interaction::{
    run_algorithm_assists_user, run_hybrid, run_user_assists_algorithm, AutoSegmenter, FixedMask,
    ForestAutoSegmenter, ForestRefiner, GrabCutRefiner, GraphCutRefiner, OtsuSegmenter, RefineMode,
    RegionGrowRefiner, SeededSegmenter, SessionIds, SessionRecord,
};
use segbench_core::metrics::{alpha_beta, Clock, FiveNumber};

use crate::config::{AlgorithmKind, AlgorithmParams, PaintMode, Prepared, PreparedAlgorithm, ProtocolSpec};
use crate::dataset::Sample;
use crate::error::{BenchError, Result};

/// Monotonic wall clock.
pub struct WallClock(Instant);

impl WallClock {
    pub fn new() -> Self {
        Self(Instant::now())
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// FNV-1a over the run seed and the cell's ids, each id terminated by 0xff.
pub fn cell_seed(rng_seed: u64, algorithm: &str, protocol: &str, image: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    feed(&rng_seed.to_le_bytes());
    for s in [algorithm, protocol, image] {
        feed(s.as_bytes());
        feed(&[0xff]);
    }
    h
}

/// Pixels per class drawn for leave-one-out forest training.
pub const BATCH_PIXELS_PER_CLASS: usize = 2000;

/// Trains a forest on every sample except `held_out`, drawing up to
/// `per_class` pixels of each class from the pooled ground truth.
pub fn train_leave_one_out(samples: &[Sample], held_out: &str, refiner: &ForestRefiner, seed: u64) -> Result<Forest> {
    let others: Vec<&Sample> = samples.iter().filter(|s| s.id != held_out).collect();
    if others.is_empty() {
        return Err(BenchError::Config("ml_forest needs at least two images for leave-one-out training".into()));
    }
    let stacks: Vec<_> = others.iter().map(|s| extract_features(&s.image)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = TrainingSet::new(stacks[0].n_features());
    for class in [true, false] {
        let pool: Vec<(usize, usize)> = others
            .iter()
            .enumerate()
            .flat_map(|(k, s)| {
                s.gt.labels()
                    .iter()
                    .enumerate()
                    .filter(move |(_, &v)| v == class)
                    .map(move |(i, _)| (k, i))
            })
            .collect();
        let take = pool.len().min(refiner.max_per_class);
        for j in rand::seq::index::sample(&mut rng, pool.len(), take) {
            let (k, i) = pool[j];
            set.push_pixel(&stacks[k], i, class);
        }
    }
    let params = segbench_core::forest::ForestParams {
        rng_seed: seed,
        ..refiner.params.clone()
    };
    Ok(Forest::fit(&set, &params)?)
}

/// An automatic segmenter with the seconds spent loading its mask, if any.
type Auto = (Box<dyn AutoSegmenter>, Option<f64>);

fn auto_segmenter(alg: &PreparedAlgorithm, sample: &Sample, samples: &[Sample], seed: u64) -> Result<Option<Auto>> {
    Ok(Some(match &alg.params {
        AlgorithmParams::Otsu => (Box::new(OtsuSegmenter), None),
        AlgorithmParams::Canny(c) => (Box::new(*c) as Box<dyn AutoSegmenter>, None),
        AlgorithmParams::Forest(f) => {
            let forest = train_leave_one_out(samples, &sample.id, f, seed)?;
            (Box::new(ForestAutoSegmenter(forest)), None)
        }
        AlgorithmParams::External(ext) => {
            let m = ext.get(&sample.id)?;
            (Box::new(FixedMask(m.mask.clone())), Some(m.load_seconds))
        }
        AlgorithmParams::RegionGrow(_) | AlgorithmParams::GraphCut(_) | AlgorithmParams::GrabCut(_) => return Ok(None),
    }))
}

/// The refiner of `kind`, taking the algorithm's own parameters when it is
/// of that kind and defaults otherwise.
fn refiner(kind: AlgorithmKind, alg: &PreparedAlgorithm, seed: u64) -> Result<Box<dyn SeededSegmenter>> {
    let own = (alg.kind == kind).then_some(&alg.params);
    Ok(match kind {
        AlgorithmKind::NaiveRegiongrow => Box::new(match own {
            Some(AlgorithmParams::RegionGrow(r)) => *r,
            _ => RegionGrowRefiner::default(),
        }),
        AlgorithmKind::MlForest => {
            let mut r = match own {
                Some(AlgorithmParams::Forest(f)) => f.clone(),
                _ => ForestRefiner::default(),
            };
            r.params.rng_seed = seed;
            Box::new(r)
        }
        AlgorithmKind::Graphcut => Box::new(GraphCutRefiner(match own {
            Some(AlgorithmParams::GraphCut(p)) => p.clone(),
            _ => GraphCutParams::default(),
        })),
        AlgorithmKind::Grabcut => {
            let mut p = match own {
                Some(AlgorithmParams::GrabCut(p)) => p.clone(),
                _ => Default::default(),
            };
            p.rng_seed = seed;
            Box::new(GrabCutRefiner(p))
        }
        other => return Err(BenchError::Config(format!("{} cannot refine from seeds", other.name()))),
    })
}

/// Runs one cell of the matrix.
pub fn run_cell(prepared: &Prepared, alg: &PreparedAlgorithm, protocol: ProtocolSpec, sample: &Sample) -> Result<SessionRecord> {
    let protocol_id = protocol.to_string();
    let seed = cell_seed(prepared.rng_seed, &alg.id, &protocol_id, &sample.id);
    let mut user = prepared.user.clone();
    user.rng_seed = seed;
    let ids = SessionIds {
        image: sample.id.clone(),
        algorithm: alg.id.clone(),
        protocol: protocol_id,
        external: alg.kind == AlgorithmKind::External,
    };
    let clock = WallClock::new();
    let auto = auto_segmenter(alg, sample, &prepared.samples, seed)?;
    let (img, gt) = (&sample.image, &sample.gt);
    let mut record = match protocol {
        ProtocolSpec::AlgorithmAssistsUser(mode) => {
            let (seg, _) = auto.as_ref().ok_or_else(|| BenchError::Config(format!("{} needs seeds", alg.id)))?;
            let mode = match mode {
                PaintMode::Paint => RefineMode::Paint,
                PaintMode::GraphcutRefine => RefineMode::GraphCutRefine(GraphCutParams::default()),
            };
            run_algorithm_assists_user(seg.as_ref(), img, gt, &user, &mode, &ids, &clock)?
        }
        ProtocolSpec::UserAssistsAlgorithm => {
            let r = refiner(alg.kind, alg, seed)?;
            run_user_assists_algorithm(r.as_ref(), img, gt, &user, &ids, &clock)?
        }
        ProtocolSpec::Hybrid(over) => {
            let r = refiner(over.unwrap_or(alg.kind.default_refiner()), alg, seed)?;
            run_hybrid(auto.as_ref().map(|(s, _)| s.as_ref()), r.as_ref(), img, gt, &user, &ids, &clock)?
        }
    };
    if let Some((_, Some(load))) = auto {
        if let Some(first) = record.compute_times.first_mut() {
            *first = load;
        }
    }
    Ok(record)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailedCell {
    pub algorithm: String,
    pub protocol: String,
    pub image: String,
    pub error: String,
}

/// One summary row: an algorithm (or algorithm@protocol) over its images.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub n_images: usize,
    pub iou_improvement: f64,
    pub initial_iou_mean: f64,
    pub refined_iou_mean: f64,
    pub compute_s_mean: f64,
    pub interaction_s_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRow {
    pub algorithm: String,
    #[serde(flatten)]
    pub stats: FiveNumber,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaBetaPoint {
    pub algorithm: String,
    pub image: String,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub rows: Vec<SummaryRow>,
    pub boxplot_initial: Vec<BoxRow>,
    pub boxplot_refined: Vec<BoxRow>,
    /// Expansion factor and area ratio of each initial mask.
    pub alpha_beta: Vec<AlphaBetaPoint>,
    pub failed_cells: Vec<FailedCell>,
}

#[derive(Clone, Debug)]
pub struct MatrixResult {
    /// Sorted by (algorithm, protocol, image).
    pub records: Vec<SessionRecord>,
    pub summary: RunSummary,
}

/// Worker count: `SEGBENCH_THREADS` when set to a positive integer, else
/// the number of CPUs.
pub fn threads_from_env() -> usize {
    std::env::var("SEGBENCH_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs every cell on a pool of `threads` workers. Cell failures are
/// collected, never propagated. Results are ordered by the position of the
/// algorithm, protocol and image in the configuration.
pub fn run_matrix(prepared: &Prepared, threads: usize) -> MatrixResult {
    let mut cells = Vec::new();
    for (ai, alg) in prepared.algorithms.iter().enumerate() {
        for (pi, &p) in prepared.protocols.iter().enumerate() {
            for (si, s) in prepared.samples.iter().enumerate() {
                cells.push(((ai, pi, si), alg, p, s));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool");
    let mut results: Vec<_> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(order, alg, p, s)| (order, (alg.id.clone(), p.to_string(), s.id.clone()), run_cell(prepared, alg, p, s)))
            .collect()
    });
    results.sort_by_key(|r| r.0);
    let multi = prepared.protocols.len() > 1;
    let mut records = Vec::new();
    let mut failed = Vec::new();
    for (_, (algorithm, protocol, image), r) in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failed.push(FailedCell {
                algorithm,
                protocol,
                image,
                error: e.to_string(),
            }),
        }
    }
    let summary = summarize(&records, &prepared.samples, failed, multi);
    MatrixResult { records, summary }
}

/// Row label: the algorithm id, suffixed with `@protocol` when a run mixes
/// protocols.
pub fn row_label(rec: &SessionRecord, multi_protocol: bool) -> String {
    if multi_protocol {
        format!("{}@{}", rec.algorithm_id, rec.protocol_id)
    } else {
        rec.algorithm_id.clone()
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Aggregates records into per-label rows; rows follow the order in which
/// labels first appear.
pub fn summarize(records: &[SessionRecord], samples: &[Sample], failed_cells: Vec<FailedCell>, multi_protocol: bool) -> RunSummary {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<&SessionRecord>> = BTreeMap::new();
    for r in records {
        let label = row_label(r, multi_protocol);
        if !groups.contains_key(&label) {
            order.push(label.clone());
        }
        groups.entry(label).or_default().push(r);
    }
    let gts: BTreeMap<&str, &Sample> = samples.iter().map(|s| (s.id.as_str(), s)).collect();
    let mut summary = RunSummary {
        rows: Vec::new(),
        boxplot_initial: Vec::new(),
        boxplot_refined: Vec::new(),
        alpha_beta: Vec::new(),
        failed_cells,
    };
    for label in order {
        let g = &groups[&label];
        summary.rows.push(SummaryRow {
            algorithm: label.clone(),
            n_images: g.len(),
            iou_improvement: mean(g.iter().map(|r| r.iou_improvement())),
            initial_iou_mean: mean(g.iter().map(|r| r.initial_iou)),
            refined_iou_mean: mean(g.iter().map(|r| r.refined_iou)),
            compute_s_mean: mean(g.iter().map(|r| r.compute_times.iter().sum::<f64>())),
            interaction_s_mean: mean(g.iter().map(|r| r.interaction_seconds)),
        });
        let initial: Vec<f64> = g.iter().map(|r| r.initial_iou).collect();
        let refined: Vec<f64> = g.iter().map(|r| r.refined_iou).collect();
        if let (Some(i), Some(f)) = (FiveNumber::of(&initial), FiveNumber::of(&refined)) {
            summary.boxplot_initial.push(BoxRow {
                algorithm: label.clone(),
                stats: i,
            });
            summary.boxplot_refined.push(BoxRow {
                algorithm: label.clone(),
                stats: f,
            });
        }
        for r in g {
            let (Some(s), Some(first)) = (gts.get(r.image_id.as_str()), r.masks.first()) else {
                continue;
            };
            if let Ok((alpha, beta)) = alpha_beta(&s.gt, first) {
                summary.alpha_beta.push(AlphaBetaPoint {
                    algorithm: label.clone(),
                    image: r.image_id.clone(),
                    alpha,
                    beta,
                });
            }
        }
    }
    summary
}
