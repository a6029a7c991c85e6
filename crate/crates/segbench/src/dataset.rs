//! Synthetic datasets with exact ground truth, and dataset directories.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use segbench_core::{BinaryMask, Raster};

use crate::error::{BenchError, Result};
use crate::io::{load_image, load_mask, read_json, save_image, save_mask, write_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Disk,
    Rectangle,
    /// A disk with a smoothly wobbling radius.
    Blob,
}

/// A gray level or an RGB triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Color {
    Gray(u8),
    Rgb([u8; 3]),
}

impl Color {
    fn rgb(self) -> [u8; 3] {
        match self {
            Color::Gray(v) => [v; 3],
            Color::Rgb(c) => c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n_images: usize,
    /// Side length of the square images.
    pub size: usize,
    /// Image `i` uses `shapes[i % shapes.len()]`.
    pub shapes: Vec<Shape>,
    pub fg: Color,
    pub bg: Color,
    /// Standard deviation of additive Gaussian noise, per channel.
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_images: 10,
            size: 64,
            shapes: vec![Shape::Disk, Shape::Rectangle, Shape::Blob],
            fg: Color::Gray(170),
            bg: Color::Gray(70),
            noise_sigma: 12.0,
            rng_seed: 0,
        }
    }
}

impl SyntheticSpec {
    /// Noiseless gray disks, 200 on 30.
    pub fn bimodal_disk() -> Self {
        Self {
            shapes: vec![Shape::Disk],
            fg: Color::Gray(200),
            bg: Color::Gray(30),
            noise_sigma: 0.0,
            rng_seed: 1,
            ..Self::default()
        }
    }

    /// Gray disks, 200 on 30, with noise of sigma 10.
    pub fn noisy_disk() -> Self {
        Self {
            noise_sigma: 10.0,
            rng_seed: 2,
            ..Self::bimodal_disk()
        }
    }

    /// Red disks on blue with noise of sigma 8.
    pub fn colored_disk() -> Self {
        Self {
            shapes: vec![Shape::Disk],
            fg: Color::Rgb([200, 40, 40]),
            bg: Color::Rgb([30, 30, 120]),
            noise_sigma: 8.0,
            rng_seed: 3,
            ..Self::default()
        }
    }

    /// The single image shipped as `data/disk_64.png`.
    pub fn disk_64() -> Self {
        Self {
            n_images: 1,
            ..Self::bimodal_disk()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default()),
            "bimodal_disk" => Some(Self::bimodal_disk()),
            "noisy_disk" => Some(Self::noisy_disk()),
            "colored_disk" => Some(Self::colored_disk()),
            "disk_64" => Some(Self::disk_64()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_images == 0 {
            return Err(BenchError::Config("n_images must be >= 1".into()));
        }
        if !(16..=4096).contains(&self.size) {
            return Err(BenchError::Config("size must be in 16..=4096".into()));
        }
        if self.shapes.is_empty() {
            return Err(BenchError::Config("shapes must not be empty".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(BenchError::Config("noise_sigma must be finite and >= 0".into()));
        }
        Ok(())
    }

    fn is_gray(&self) -> bool {
        matches!((self.fg, self.bg), (Color::Gray(_), Color::Gray(_)))
    }
}

/// One image with its ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub id: String,
    pub image: Raster,
    pub gt: BinaryMask,
}

fn shape_mask(shape: Shape, size: usize, rng: &mut ChaCha8Rng) -> BinaryMask {
    let s = size as f64;
    match shape {
        Shape::Disk => {
            let r = rng.random_range(0.22 * s..0.32 * s);
            let cx = rng.random_range(r + 2.0..s - r - 2.0);
            let cy = rng.random_range(r + 2.0..s - r - 2.0);
            BinaryMask::from_fn(size, size, |x, y| {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                dx * dx + dy * dy <= r * r
            })
        }
        Shape::Rectangle => {
            let w = rng.random_range(size / 4..=size / 2);
            let h = rng.random_range(size / 4..=size / 2);
            let x0 = rng.random_range(2..=size - w - 2);
            let y0 = rng.random_range(2..=size - h - 2);
            BinaryMask::from_fn(size, size, |x, y| (x0..x0 + w).contains(&x) && (y0..y0 + h).contains(&y))
        }
        Shape::Blob => {
            let r0 = rng.random_range(0.2 * s..0.26 * s);
            let (a2, a3) = (rng.random_range(0.05..0.15), rng.random_range(0.05..0.12));
            let (p2, p3) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
            let reach = r0 * (1.0 + a2 + a3);
            let cx = rng.random_range(reach + 2.0..s - reach - 2.0);
            let cy = rng.random_range(reach + 2.0..s - reach - 2.0);
            BinaryMask::from_fn(size, size, |x, y| {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                let t = dy.atan2(dx);
                let r = r0 * (1.0 + a2 * (2.0 * t + p2).sin() + a3 * (3.0 * t + p3).sin());
                dx * dx + dy * dy <= r * r
            })
        }
    }
}

/// Generates the dataset in memory. Images are drawn in order from one
/// generator seeded with `rng_seed`.
pub fn generate(spec: &SyntheticSpec) -> Result<Vec<Sample>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let noise = Normal::new(0.0, spec.noise_sigma.max(f64::MIN_POSITIVE)).expect("finite sigma");
    let n = spec.size * spec.size;
    let mut out = Vec::with_capacity(spec.n_images);
    for i in 0..spec.n_images {
        let gt = shape_mask(spec.shapes[i % spec.shapes.len()], spec.size, &mut rng);
        let channels = if spec.is_gray() { 1 } else { 3 };
        let (fg, bg) = (spec.fg.rgb(), spec.bg.rgb());
        let mut data = Vec::with_capacity(n * channels);
        for &inside in gt.labels() {
            let base = if inside { fg } else { bg };
            for &v in &base[..channels] {
                let noisy = if spec.noise_sigma > 0.0 {
                    (v as f64 + noise.sample(&mut rng)).round().clamp(0.0, 255.0) as u8
                } else {
                    v
                };
                data.push(noisy);
            }
        }
        let image = Raster::new(spec.size, spec.size, channels, data)?;
        out.push(Sample {
            id: format!("{i:03}"),
            image,
            gt,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub image: PathBuf,
    pub gt: PathBuf,
}

/// `manifest.json` of a dataset directory; paths are relative to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SyntheticSpec>,
    pub images: Vec<ManifestEntry>,
}

/// Writes `img_XXX.png`, `gt_XXX.png` and `manifest.json` into `out_dir`.
pub fn write_dataset(spec: &SyntheticSpec, out_dir: impl AsRef<Path>) -> Result<Manifest> {
    let out = out_dir.as_ref();
    let mut entries = Vec::new();
    for s in generate(spec)? {
        let entry = ManifestEntry {
            image: format!("img_{}.png", s.id).into(),
            gt: format!("gt_{}.png", s.id).into(),
            id: s.id,
        };
        save_image(&s.image, out.join(&entry.image))?;
        save_mask(&s.gt, out.join(&entry.gt))?;
        entries.push(entry);
    }
    let manifest = Manifest {
        spec: Some(spec.clone()),
        images: entries,
    };
    write_json(&manifest, out.join("manifest.json"))?;
    Ok(manifest)
}

/// Loads every image and ground truth listed in `dir/manifest.json`.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Vec<Sample>> {
    let dir = dir.as_ref();
    let manifest: Manifest = read_json(dir.join("manifest.json"))?;
    manifest
        .images
        .into_iter()
        .map(|e| {
            let image = load_image(dir.join(&e.image))?;
            let gt = load_mask(dir.join(&e.gt))?;
            gt.ensure_same_dims(image.dims())?;
            Ok(Sample { id: e.id, image, gt })
        })
        .collect()
}
