//! Precomputed masks standing in for a deep-learning segmenter.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use segbench_core::BinaryMask;

use crate::dataset::Sample;
use crate::error::{BenchError, Result};
use crate::io::load_mask;

/// `{"provider": "unet", "masks": {"000": "masks/000.png", ...}}`; mask
/// paths are relative to the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExternalMaskManifest {
    pub provider: String,
    pub masks: BTreeMap<String, PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExternalMask {
    pub mask: BinaryMask,
    /// Time spent reading and decoding the file.
    pub load_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExternalMasks {
    pub provider: String,
    pub masks: BTreeMap<String, ExternalMask>,
}

impl ExternalMasks {
    pub fn get(&self, image_id: &str) -> Result<&ExternalMask> {
        self.masks
            .get(image_id)
            .ok_or_else(|| BenchError::MissingMask(image_id.to_string()))
    }
}

/// Loads the mask of every sample, failing on the first image without one
/// or with a mask of the wrong size.
pub fn load_external_masks(manifest: &ExternalMaskManifest, dir: &Path, samples: &[Sample]) -> Result<ExternalMasks> {
    let mut masks = BTreeMap::new();
    for s in samples {
        let rel = manifest
            .masks
            .get(&s.id)
            .ok_or_else(|| BenchError::MissingMask(s.id.clone()))?;
        let start = Instant::now();
        let mask = load_mask(dir.join(rel))?;
        let load_seconds = start.elapsed().as_secs_f64();
        mask.ensure_same_dims(s.image.dims())?;
        masks.insert(s.id.clone(), ExternalMask { mask, load_seconds });
    }
    Ok(ExternalMasks {
        provider: manifest.provider.clone(),
        masks,
    })
}

/// Writes one mask per sample (named `<id>.png`) plus `manifest.json`.
pub fn write_external_masks(
    provider: &str,
    samples: &[Sample],
    dir: &Path,
    mut mask_for: impl FnMut(&Sample) -> BinaryMask,
) -> Result<ExternalMaskManifest> {
    let mut masks = BTreeMap::new();
    for s in samples {
        let rel = PathBuf::from(format!("{}.png", s.id));
        crate::io::save_mask(&mask_for(s), dir.join(&rel))?;
        masks.insert(s.id.clone(), rel);
    }
    let manifest = ExternalMaskManifest {
        provider: provider.to_string(),
        masks,
    };
    crate::io::write_json(&manifest, dir.join("manifest.json"))?;
    Ok(manifest)
}
