use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::forest::{extract_features, predict_forest, Forest, ForestParams, TrainingSet};
use crate::grabcut::{grabcut, GrabCutInit, GrabCutParams};
use crate::graphcut::{graph_cut_segment, GraphCutParams};
use crate::naive::{canny, edges_to_mask_with, histogram, otsu_threshold, region_grow, threshold_segment};
use crate::raster::{BinaryMask, LabelRaster, Raster, Seed};

/// Produces a mask from the image alone.
pub trait AutoSegmenter: Sync {
    fn segment(&self, img: &Raster) -> Result<BinaryMask>;
}

/// Produces a mask from the image and a seed map.
pub trait SeededSegmenter: Sync {
    fn segment(&self, img: &Raster, seeds: &LabelRaster) -> Result<BinaryMask>;
}

/// Otsu threshold on the gray image; brighter pixels are foreground.
#[derive(Clone, Copy, Debug, Default)]
pub struct OtsuSegmenter;

impl AutoSegmenter for OtsuSegmenter {
    fn segment(&self, img: &Raster) -> Result<BinaryMask> {
        let gray = img.to_gray();
        let t = otsu_threshold(&histogram(&gray)?)?;
        threshold_segment(&gray, t)
    }
}

/// Canny edges filled into a region mask.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CannySegmenter {
    pub sigma: f64,
    pub low: f64,
    pub high: f64,
    pub closing_iters: usize,
}

impl Default for CannySegmenter {
    fn default() -> Self {
        Self {
            sigma: 1.4,
            low: 40.0,
            high: 100.0,
            closing_iters: 2,
        }
    }
}

impl AutoSegmenter for CannySegmenter {
    fn segment(&self, img: &Raster) -> Result<BinaryMask> {
        let edges = canny(&img.to_gray(), self.sigma, self.low, self.high)?;
        Ok(edges_to_mask_with(&edges, self.closing_iters))
    }
}

/// Returns a precomputed mask, e.g. one supplied by an external model.
#[derive(Clone, Debug)]
pub struct FixedMask(pub BinaryMask);

impl AutoSegmenter for FixedMask {
    fn segment(&self, img: &Raster) -> Result<BinaryMask> {
        self.0.ensure_same_dims(img.dims())?;
        Ok(self.0.clone())
    }
}

/// A forest trained ahead of time, applied without seeds.
#[derive(Clone, Debug)]
pub struct ForestAutoSegmenter(pub Forest);

impl AutoSegmenter for ForestAutoSegmenter {
    fn segment(&self, img: &Raster) -> Result<BinaryMask> {
        Ok(predict_forest(&self.0, &extract_features(img))?.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegionGrowRefiner {
    pub tau: f64,
}

impl Default for RegionGrowRefiner {
    fn default() -> Self {
        Self { tau: 25.0 }
    }
}

impl SeededSegmenter for RegionGrowRefiner {
    fn segment(&self, img: &Raster, seeds: &LabelRaster) -> Result<BinaryMask> {
        region_grow(&img.to_gray(), seeds, self.tau)
    }
}

#[derive(Clone, Debug, Default)]
pub struct GraphCutRefiner(pub GraphCutParams);

impl SeededSegmenter for GraphCutRefiner {
    fn segment(&self, img: &Raster, seeds: &LabelRaster) -> Result<BinaryMask> {
        graph_cut_segment(img, seeds, &self.0)
    }
}

/// GrabCut initialized from the seeds: seeds are hard, the rest starts as
/// probable background.
#[derive(Clone, Debug, Default)]
pub struct GrabCutRefiner(pub GrabCutParams);

impl SeededSegmenter for GrabCutRefiner {
    fn segment(&self, img: &Raster, seeds: &LabelRaster) -> Result<BinaryMask> {
        grabcut(img, &GrabCutInit::Seeds(seeds.clone()), &self.0)
    }
}

/// Trains a forest on the seeded pixels (at most `max_per_class` per class,
/// drawn without replacement) and predicts every pixel; seeded pixels keep
/// their seed label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestRefiner {
    #[serde(flatten)]
    pub params: ForestParams,
    pub max_per_class: usize,
}

impl Default for ForestRefiner {
    fn default() -> Self {
        Self {
            params: ForestParams::default(),
            max_per_class: 2000,
        }
    }
}

impl SeededSegmenter for ForestRefiner {
    fn segment(&self, img: &Raster, seeds: &LabelRaster) -> Result<BinaryMask> {
        img.ensure_dims(seeds.dims())?;
        let stack = extract_features(img);
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.rng_seed);
        let mut set = TrainingSet::new(stack.n_features());
        for class in [Seed::Fg, Seed::Bg] {
            let mut idx: Vec<usize> = (0..seeds.values().len())
                .filter(|&i| seeds.values()[i] == class)
                .collect();
            if idx.len() > self.max_per_class {
                idx.shuffle(&mut rng);
                idx.truncate(self.max_per_class);
                idx.sort_unstable();
            }
            for i in idx {
                set.push_pixel(&stack, i, class == Seed::Fg);
            }
        }
        let forest = Forest::fit(&set, &self.params)?;
        let (_, mut mask) = predict_forest(&forest, &stack)?;
        for (m, &s) in mask.labels_mut().iter_mut().zip(seeds.values()) {
            match s {
                Seed::Fg => *m = true,
                Seed::Bg => *m = false,
                Seed::Unknown => {}
            }
        }
        Ok(mask)
    }
}
