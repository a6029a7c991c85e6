//! Pixel containers shared by every segmenter.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An 8-bit image, row-major with interleaved channels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions { width, height });
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidChannels(channels));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(Error::DataLength {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn gray(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 1, data)
    }

    pub fn rgb(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 3, data)
    }

    /// Single-channel image built from a per-pixel function.
    pub fn from_fn_gray(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        assert!(width > 0 && height > 0, "empty raster");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            channels: 1,
            data,
        }
    }

    pub fn from_fn_rgb(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Self {
        assert!(width > 0 && height > 0, "empty raster");
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            channels: 3,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn is_gray(&self) -> bool {
        self.channels == 1
    }

    /// Channel values of pixel `idx` (row-major index).
    pub fn pixel(&self, idx: usize) -> &[u8] {
        &self.data[idx * self.channels..(idx + 1) * self.channels]
    }

    pub fn at(&self, x: usize, y: usize) -> &[u8] {
        self.pixel(y * self.width + x)
    }

    /// RGB triple of a pixel; gray images replicate their single channel.
    pub fn rgb_at(&self, idx: usize) -> [u8; 3] {
        if self.channels == 1 {
            let v = self.data[idx];
            [v, v, v]
        } else {
            let p = self.pixel(idx);
            [p[0], p[1], p[2]]
        }
    }

    /// ITU-R 601 luma, rounded half up. Gray input is returned unchanged.
    pub fn to_gray(&self) -> Raster {
        if self.channels == 1 {
            return self.clone();
        }
        let data = self
            .data
            .chunks_exact(3)
            .map(|p| luma(p[0], p[1], p[2]))
            .collect();
        Raster {
            width: self.width,
            height: self.height,
            channels: 1,
            data,
        }
    }

    /// `DimensionMismatch` unless `other` equals this raster's size.
    pub fn ensure_dims(&self, other: (usize, usize)) -> Result<()> {
        if self.dims() == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other,
            })
        }
    }

    pub(crate) fn require_gray(&self) -> Result<()> {
        if self.channels == 1 {
            Ok(())
        } else {
            Err(Error::NotGrayscale)
        }
    }
}

/// round(0.299 R + 0.587 G + 0.114 B) in exact integer arithmetic.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let weighted = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((weighted + 500) / 1000) as u8
}

/// Per-pixel foreground/background labeling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MaskRuns", into = "MaskRuns")]
pub struct BinaryMask {
    width: usize,
    height: usize,
    labels: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            labels: vec![false; width * height],
        }
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Self {
            width,
            height,
            labels: vec![value; width * height],
        }
    }

    pub fn from_labels(width: usize, height: usize, labels: Vec<bool>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::DataLength {
                expected: width * height,
                actual: labels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut labels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                labels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            labels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn labels_mut(&mut self) -> &mut [bool] {
        &mut self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.labels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.labels[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.labels.iter().filter(|&&v| v).count()
    }

    pub fn complement(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            labels: self.labels.iter().map(|&v| !v).collect(),
        }
    }

    pub fn ensure_same_dims(&self, other: (usize, usize)) -> Result<()> {
        if self.dims() == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: other,
                actual: self.dims(),
            })
        }
    }
}

/// Run-length form used when masks are serialized: alternating run lengths,
/// the first run is background (possibly zero-length).
#[derive(Clone, Serialize, Deserialize)]
struct MaskRuns {
    width: usize,
    height: usize,
    runs: Vec<usize>,
}

impl From<BinaryMask> for MaskRuns {
    fn from(mask: BinaryMask) -> Self {
        let mut runs = Vec::new();
        let mut current = false;
        let mut len = 0usize;
        for &v in &mask.labels {
            if v == current {
                len += 1;
            } else {
                runs.push(len);
                current = v;
                len = 1;
            }
        }
        runs.push(len);
        MaskRuns {
            width: mask.width,
            height: mask.height,
            runs,
        }
    }
}

impl TryFrom<MaskRuns> for BinaryMask {
    type Error = &'static str;

    fn try_from(repr: MaskRuns) -> core::result::Result<Self, Self::Error> {
        let mut labels = Vec::with_capacity(repr.width * repr.height);
        let mut value = false;
        for run in repr.runs {
            labels.extend(core::iter::repeat_n(value, run));
            value = !value;
        }
        if labels.len() != repr.width * repr.height {
            return Err("mask runs do not cover width*height pixels");
        }
        Ok(BinaryMask {
            width: repr.width,
            height: repr.height,
            labels,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrokeLabel {
    Fg,
    Bg,
}

impl StrokeLabel {
    pub fn from_bool(fg: bool) -> Self {
        if fg {
            StrokeLabel::Fg
        } else {
            StrokeLabel::Bg
        }
    }

    pub fn is_fg(self) -> bool {
        self == StrokeLabel::Fg
    }
}

/// A labeled brush path. Points are `[x, y]` pixel coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stroke {
    pub label: StrokeLabel,
    pub radius: u32,
    pub points: Vec<[i64; 2]>,
}

impl Stroke {
    pub fn point(label: StrokeLabel, x: usize, y: usize, radius: u32) -> Self {
        Self {
            label,
            radius,
            points: vec![[x as i64, y as i64]],
        }
    }
}

/// Ordered scribble strokes; serializes as `{"strokes":[...]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub strokes: Vec<Stroke>,
}

impl Annotation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, stroke: Stroke) {
        self.strokes.push(stroke);
    }

    pub fn extend(&mut self, other: &Annotation) {
        self.strokes.extend(other.strokes.iter().cloned());
    }

    pub fn is_empty(&self) -> bool {
        self.strokes.is_empty()
    }

    /// Checks every point against the image bounds and every radius against 0.
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        for (si, stroke) in self.strokes.iter().enumerate() {
            if stroke.radius == 0 {
                return Err(Error::InvalidRadius { stroke: si });
            }
            for (pi, &[x, y]) in stroke.points.iter().enumerate() {
                if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
                    return Err(Error::OutOfBounds {
                        stroke: si,
                        point: pi,
                        x,
                        y,
                    });
                }
            }
        }
        Ok(())
    }

    /// Paints the strokes into a seed raster. Each stroke covers every pixel
    /// within `radius` of its polyline (a lone point is a disk); later strokes
    /// overwrite earlier ones.
    pub fn rasterize(&self, width: usize, height: usize) -> Result<LabelRaster> {
        self.validate(width, height)?;
        let mut out = LabelRaster::new(width, height);
        for stroke in &self.strokes {
            let seed = match stroke.label {
                StrokeLabel::Fg => Seed::Fg,
                StrokeLabel::Bg => Seed::Bg,
            };
            let pts = &stroke.points;
            if pts.len() == 1 {
                paint_capsule(&mut out, pts[0], pts[0], stroke.radius, seed);
            }
            for pair in pts.windows(2) {
                paint_capsule(&mut out, pair[0], pair[1], stroke.radius, seed);
            }
        }
        Ok(out)
    }
}

fn paint_capsule(out: &mut LabelRaster, a: [i64; 2], b: [i64; 2], radius: u32, seed: Seed) {
    let r = radius as i64;
    let x0 = (a[0].min(b[0]) - r).max(0);
    let x1 = (a[0].max(b[0]) + r).min(out.width as i64 - 1);
    let y0 = (a[1].min(b[1]) - r).max(0);
    let y1 = (a[1].max(b[1]) + r).min(out.height as i64 - 1);
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let seg_len2 = dx * dx + dy * dy;
    let r2 = (r * r) as f64;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let (px, py) = (x - a[0], y - a[1]);
            let inside = if seg_len2 == 0 {
                px * px + py * py <= r * r
            } else {
                let t = ((px * dx + py * dy) as f64 / seg_len2 as f64).clamp(0.0, 1.0);
                let cx = px as f64 - t * dx as f64;
                let cy = py as f64 - t * dy as f64;
                cx * cx + cy * cy <= r2
            };
            if inside {
                out.values[y as usize * out.width + x as usize] = seed;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Seed {
    #[default]
    Unknown,
    Fg,
    Bg,
}

/// Per-pixel seed labels produced by rasterizing an [`Annotation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelRaster {
    width: usize,
    height: usize,
    values: Vec<Seed>,
}

impl LabelRaster {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![Seed::Unknown; width * height],
        }
    }

    pub fn from_values(width: usize, height: usize, values: Vec<Seed>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DataLength {
                expected: width * height,
                actual: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[Seed] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> Seed {
        self.values[y * self.width + x]
    }

    pub fn set_index(&mut self, idx: usize, seed: Seed) {
        self.values[idx] = seed;
    }

    pub fn count(&self, seed: Seed) -> usize {
        self.values.iter().filter(|&&s| s == seed).count()
    }

    pub fn has_fg(&self) -> bool {
        self.values.contains(&Seed::Fg)
    }

    pub fn has_bg(&self) -> bool {
        self.values.contains(&Seed::Bg)
    }

    /// Overlays `top` onto `self`: known seeds in `top` win.
    pub fn overlay(&mut self, top: &LabelRaster) {
        for (dst, &src) in self.values.iter_mut().zip(&top.values) {
            if src != Seed::Unknown {
                *dst = src;
            }
        }
    }
}
