use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TrainingSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    /// Samples with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        prob: f64,
    },
}

/// Flattened binary tree; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

pub(super) fn bootstrap(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

fn gini(fg: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = fg as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    set: &'a TrainingSet,
    max_depth: usize,
    min_leaf: usize,
    per_split: usize,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl Builder<'_> {
    fn leaf(&mut self, samples: &[usize]) -> usize {
        let fg = samples.iter().filter(|&&i| self.set.label(i)).count();
        let prob = if samples.is_empty() {
            0.0
        } else {
            fg as f64 / samples.len() as f64
        };
        self.nodes.push(Node::Leaf { prob });
        self.nodes.len() - 1
    }

    fn build(&mut self, samples: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let n = samples.len();
        let fg = samples.iter().filter(|&&i| self.set.label(i)).count();
        if depth >= self.max_depth || fg == 0 || fg == n || n < 2 * self.min_leaf {
            return self.leaf(&samples);
        }
        let parent = gini(fg, n);
        let Some(best) = self.best_split(&samples, rng) else {
            return self.leaf(&samples);
        };
        if best.impurity >= parent {
            return self.leaf(&samples);
        }
        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&i| self.set.sample(i)[best.feature] <= best.threshold);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { prob: 0.0 });
        let l = self.build(left, depth + 1, rng);
        let r = self.build(right, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: l,
            right: r,
        };
        id
    }

    /// Lowest weighted Gini over the sampled features, thresholds at
    /// midpoints between consecutive distinct values. Ties keep the first
    /// candidate found.
    fn best_split(&self, samples: &[usize], rng: &mut ChaCha8Rng) -> Option<BestSplit> {
        let f = self.set.n_features();
        let mut order: Vec<usize> = (0..f).collect();
        for k in 0..self.per_split.min(f) {
            let j = rng.random_range(k..f);
            order.swap(k, j);
        }
        let n = samples.len();
        let total_fg = samples.iter().filter(|&&i| self.set.label(i)).count();
        let mut best: Option<BestSplit> = None;
        let mut column: Vec<(f64, bool)> = Vec::with_capacity(n);
        for &feature in &order[..self.per_split.min(f)] {
            column.clear();
            column.extend(samples.iter().map(|&i| (self.set.sample(i)[feature], self.set.label(i))));
            column.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_fg = 0;
            for k in 0..n - 1 {
                if column[k].1 {
                    left_fg += 1;
                }
                let nl = k + 1;
                let nr = n - nl;
                if column[k].0 == column[k + 1].0 || nl < self.min_leaf || nr < self.min_leaf {
                    continue;
                }
                let impurity = (nl as f64 * gini(left_fg, nl) + nr as f64 * gini(total_fg - left_fg, nr)) / n as f64;
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let (lo, hi) = (column[k].0, column[k + 1].0);
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(BestSplit {
                        feature,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        best
    }
}

impl DecisionTree {
    /// Grows a tree on `samples` (indices into `set`, repeats allowed).
    pub fn fit(
        set: &TrainingSet,
        samples: &[usize],
        max_depth: usize,
        min_samples_leaf: usize,
        features_per_split: usize,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let mut b = Builder {
            set,
            max_depth,
            min_leaf: min_samples_leaf.max(1),
            per_split: features_per_split.max(1),
            nodes: Vec::new(),
        };
        b.build(samples.to_vec(), 0, rng);
        DecisionTree { nodes: b.nodes }
    }

    pub fn predict(&self, sample: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { prob } => return *prob,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if sample[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        let mut deepest = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((node, d)) = stack.pop() {
            deepest = deepest.max(d);
            if let Node::Split { left, right, .. } = &self.nodes[node] {
                stack.push((*left, d + 1));
                stack.push((*right, d + 1));
            }
        }
        deepest
    }
}
