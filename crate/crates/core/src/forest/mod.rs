//! Per-pixel features and a random-forest foreground classifier.

mod features;
mod tree;

pub use features::{extract_features, FeatureStack, FEATURE_NAMES};
pub use tree::{DecisionTree, Node};

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, LabelRaster, Seed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Features tried per node; `None` means `ceil(sqrt(F))`.
    pub features_per_split: Option<usize>,
    pub rng_seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 50,
            max_depth: 12,
            min_samples_leaf: 5,
            features_per_split: None,
            rng_seed: 0,
        }
    }
}

/// Row-major sample matrix with binary labels (`true` = foreground).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingSet {
    n_features: usize,
    values: Vec<f64>,
    labels: Vec<bool>,
}

impl TrainingSet {
    pub fn new(n_features: usize) -> Self {
        Self {
            n_features,
            values: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn push(&mut self, sample: &[f64], label: bool) {
        assert_eq!(sample.len(), self.n_features, "sample width");
        self.values.extend_from_slice(sample);
        self.labels.push(label);
    }

    /// Adds pixel `idx` of `stack` as a sample.
    pub fn push_pixel(&mut self, stack: &FeatureStack, idx: usize, label: bool) {
        assert_eq!(stack.n_features(), self.n_features, "stack width");
        for f in 0..self.n_features {
            self.values.push(stack.value(f, idx));
        }
        self.labels.push(label);
    }

    /// Every seeded pixel of `labels` becomes a sample.
    pub fn from_seeds(stack: &FeatureStack, labels: &LabelRaster) -> Result<Self> {
        if labels.dims() != stack.dims() {
            return Err(Error::DimensionMismatch {
                expected: stack.dims(),
                actual: labels.dims(),
            });
        }
        let mut set = Self::new(stack.n_features());
        for (i, &s) in labels.values().iter().enumerate() {
            match s {
                Seed::Fg => set.push_pixel(stack, i, true),
                Seed::Bg => set.push_pixel(stack, i, false),
                Seed::Unknown => {}
            }
        }
        Ok(set)
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn label(&self, i: usize) -> bool {
        self.labels[i]
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }
}

/// An ensemble of decision trees; the foreground probability is the mean of
/// the trees' leaf probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub params: ForestParams,
    pub n_features: usize,
    pub trees: Vec<DecisionTree>,
}

impl Forest {
    /// Trains one tree per bootstrap sample; tree `k` draws from a generator
    /// seeded with `rng_seed + k`.
    pub fn fit(set: &TrainingSet, params: &ForestParams) -> Result<Self> {
        if params.n_trees == 0 {
            return Err(Error::InvalidParameter("n_trees must be >= 1"));
        }
        if params.min_samples_leaf == 0 {
            return Err(Error::InvalidParameter("min_samples_leaf must be >= 1"));
        }
        let has_fg = set.labels.iter().any(|&l| l);
        let has_bg = set.labels.iter().any(|&l| !l);
        if !has_fg || !has_bg {
            return Err(Error::InsufficientLabels);
        }
        let f = set.n_features();
        let per_split = params
            .features_per_split
            .unwrap_or_else(|| libm::ceil(libm::sqrt(f as f64)) as usize)
            .clamp(1, f.max(1));
        let n = set.len();
        let trees = (0..params.n_trees)
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed.wrapping_add(k as u64));
                let sample = tree::bootstrap(n, &mut rng);
                DecisionTree::fit(set, &sample, params.max_depth, params.min_samples_leaf, per_split, &mut rng)
            })
            .collect();
        Ok(Self {
            params: params.clone(),
            n_features: f,
            trees,
        })
    }

    pub fn predict_sample(&self, sample: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(sample)).sum();
        sum / self.trees.len() as f64
    }
}

/// Trains on exactly the seeded pixels of `labels`.
pub fn train_forest(stack: &FeatureStack, labels: &LabelRaster, params: &ForestParams) -> Result<Forest> {
    let set = TrainingSet::from_seeds(stack, labels)?;
    Forest::fit(&set, params)
}

/// Foreground probability per pixel and the mask `prob >= 0.5`.
pub fn predict_forest(forest: &Forest, stack: &FeatureStack) -> Result<(Vec<f64>, BinaryMask)> {
    if stack.n_features() != forest.n_features {
        return Err(Error::FeatureMismatch {
            expected: forest.n_features,
            actual: stack.n_features(),
        });
    }
    let (w, h) = stack.dims();
    let mut sample = Vec::with_capacity(stack.n_features());
    let mut prob = Vec::with_capacity(w * h);
    for i in 0..w * h {
        sample.clear();
        sample.extend((0..stack.n_features()).map(|f| stack.value(f, i)));
        prob.push(forest.predict_sample(&sample));
    }
    let labels = prob.iter().map(|&p| p >= 0.5).collect();
    let mask = BinaryMask::from_labels(w, h, labels)?;
    Ok((prob, mask))
}
