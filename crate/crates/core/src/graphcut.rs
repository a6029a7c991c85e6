//! Seeded graph cut on the 4-connected pixel grid.
//!
//! The energy is
//! `E(l) = sum_p D_p(l_p) + sum_{p~q} lambda * B_pq * [l_p != l_q]`
//! with data terms from per-class color histograms of the seed pixels and a
//! Gaussian contrast penalty `B_pq = exp(-(I_p - I_q)^2 / (2 sigma_b^2))` on
//! gray intensity.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{max_flow, FlowNetwork};
use crate::raster::{BinaryMask, LabelRaster, Raster, Seed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphCutParams {
    pub lambda: f64,
    /// Contrast scale on the 0..=255 gray scale. `None` uses the image's mean
    /// absolute 4-neighbor difference, floored at 1.
    pub sigma_b: Option<f64>,
    pub hist_bins: usize,
}

impl Default for GraphCutParams {
    fn default() -> Self {
        Self {
            lambda: 50.0,
            sigma_b: None,
            hist_bins: 32,
        }
    }
}

impl GraphCutParams {
    fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter("lambda must be finite and >= 0"));
        }
        if let Some(s) = self.sigma_b {
            if !(s > 0.0) {
                return Err(Error::InvalidParameter("sigma_b must be > 0"));
            }
        }
        if self.hist_bins == 0 || self.hist_bins > 256 {
            return Err(Error::InvalidParameter("hist_bins must be in 1..=256"));
        }
        Ok(())
    }
}

/// A binary labeling energy over a pixel grid with optional hard labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Energy {
    pub width: usize,
    pub height: usize,
    /// `[cost of background, cost of foreground]` per pixel.
    pub unary: Vec<[f64; 2]>,
    /// `(p, q, weight)` paid when `p` and `q` disagree.
    pub pairs: Vec<(usize, usize, f64)>,
    /// Pixels whose label is fixed.
    pub hard: Vec<Option<bool>>,
}

impl Energy {
    pub fn evaluate(&self, labels: &[bool]) -> f64 {
        let data: f64 = self
            .unary
            .iter()
            .zip(labels)
            .map(|(c, &l)| c[l as usize])
            .sum();
        let smooth: f64 = self
            .pairs
            .iter()
            .filter(|(p, q, _)| labels[*p] != labels[*q])
            .map(|(_, _, w)| w)
            .sum();
        data + smooth
    }

    pub fn respects_hard(&self, labels: &[bool]) -> bool {
        self.hard
            .iter()
            .zip(labels)
            .all(|(h, &l)| h.is_none_or(|v| v == l))
    }

    /// Global minimizer among labelings that honor the hard labels.
    pub fn minimize(&self) -> BinaryMask {
        let n = self.width * self.height;
        let mut net = FlowNetwork::new(n);
        let mut tlinks = Vec::with_capacity(n);
        let mut total = 0.0;
        for c in &self.unary {
            let m = c[0].min(c[1]);
            // source side is foreground: cutting source->p labels p background
            let (from_source, to_sink) = (c[0] - m, c[1] - m);
            total += from_source + to_sink;
            tlinks.push((from_source, to_sink));
        }
        for &(_, _, w) in &self.pairs {
            total += 2.0 * w;
        }
        // strictly larger than any cut that avoids hard links
        let hard_capacity = 1.0 + total;
        for (p, &(s, t)) in tlinks.iter().enumerate() {
            match self.hard[p] {
                Some(true) => net.add_tlinks(p, hard_capacity, 0.0),
                Some(false) => net.add_tlinks(p, 0.0, hard_capacity),
                None => net.add_tlinks(p, s, t),
            }
        }
        for &(p, q, w) in &self.pairs {
            if w > 0.0 {
                net.add_edge(p, q, w, w);
            }
        }
        let cut = max_flow(net);
        BinaryMask::from_labels(self.width, self.height, cut.source_side).expect("grid size")
    }
}

/// Default contrast scale: mean absolute gray difference over 4-neighbor
/// pairs, floored at 1.
pub fn default_sigma(gray: &Raster) -> f64 {
    let (w, h) = gray.dims();
    let g = gray.data();
    let (mut sum, mut n) = (0.0f64, 0usize);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                sum += (g[i] as f64 - g[i + 1] as f64).abs();
                n += 1;
            }
            if y + 1 < h {
                sum += (g[i] as f64 - g[i + w] as f64).abs();
                n += 1;
            }
        }
    }
    if n == 0 {
        1.0
    } else {
        (sum / n as f64).max(1.0)
    }
}

/// `lambda * B_pq` for every right and down neighbor pair.
pub fn contrast_pairs(img: &Raster, params: &GraphCutParams) -> Vec<(usize, usize, f64)> {
    let gray = img.to_gray();
    let sigma = params.sigma_b.unwrap_or_else(|| default_sigma(&gray));
    let (w, h) = gray.dims();
    let g = gray.data();
    let weight = |a: usize, b: usize| {
        let d = g[a] as f64 - g[b] as f64;
        params.lambda * libm::exp(-(d * d) / (2.0 * sigma * sigma))
    };
    let mut pairs = Vec::with_capacity(2 * w * h);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                pairs.push((i, i + 1, weight(i, i + 1)));
            }
            if y + 1 < h {
                pairs.push((i, i + w, weight(i, i + w)));
            }
        }
    }
    pairs
}

/// Per-channel color histograms of one seed class, add-one smoothed. The
/// likelihood of a pixel is the product of its channel bin frequencies.
struct ColorModel {
    bins: usize,
    counts: Vec<Vec<u32>>,
    total: u32,
}

impl ColorModel {
    fn fit(img: &Raster, seeds: &LabelRaster, class: Seed, bins: usize) -> Self {
        let channels = img.channels();
        let mut counts = alloc::vec![alloc::vec![0u32; bins]; channels];
        let mut total = 0;
        for (i, &s) in seeds.values().iter().enumerate() {
            if s != class {
                continue;
            }
            for (c, &v) in img.pixel(i).iter().enumerate() {
                counts[c][v as usize * bins / 256] += 1;
            }
            total += 1;
        }
        Self { bins, counts, total }
    }

    fn likelihood(&self, pixel: &[u8]) -> f64 {
        let denom = (self.total as usize + self.bins) as f64;
        pixel
            .iter()
            .enumerate()
            .map(|(c, &v)| (self.counts[c][v as usize * self.bins / 256] + 1) as f64 / denom)
            .product()
    }
}

/// The graph-cut energy for `img` under `seeds`.
pub fn build_energy(img: &Raster, seeds: &LabelRaster, params: &GraphCutParams) -> Result<Energy> {
    params.validate()?;
    if seeds.dims() != img.dims() {
        return Err(Error::DimensionMismatch {
            expected: img.dims(),
            actual: seeds.dims(),
        });
    }
    if !seeds.has_fg() {
        return Err(Error::MissingSeedClass("foreground"));
    }
    if !seeds.has_bg() {
        return Err(Error::MissingSeedClass("background"));
    }
    let fg = ColorModel::fit(img, seeds, Seed::Fg, params.hist_bins);
    let bg = ColorModel::fit(img, seeds, Seed::Bg, params.hist_bins);
    let unary = (0..img.len())
        .map(|i| {
            let px = img.pixel(i);
            [
                -libm::log(bg.likelihood(px) + 1e-8),
                -libm::log(fg.likelihood(px) + 1e-8),
            ]
        })
        .collect();
    let hard = seeds
        .values()
        .iter()
        .map(|s| match s {
            Seed::Fg => Some(true),
            Seed::Bg => Some(false),
            Seed::Unknown => None,
        })
        .collect();
    Ok(Energy {
        width: img.width(),
        height: img.height(),
        unary,
        pairs: contrast_pairs(img, params),
        hard,
    })
}

/// Minimum-energy segmentation consistent with every seed.
pub fn graph_cut_segment(img: &Raster, seeds: &LabelRaster, params: &GraphCutParams) -> Result<BinaryMask> {
    Ok(build_energy(img, seeds, params)?.minimize())
}
