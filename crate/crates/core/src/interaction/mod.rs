//! Simulated user and the three human/algorithm interaction protocols.

mod protocol;
mod segmenters;
mod user;

pub use protocol::{
    auto_seeds, run_algorithm_assists_user, run_hybrid, run_user_assists_algorithm, RefineMode,
    SessionIds,
};
pub use segmenters::{
    AutoSegmenter, CannySegmenter, FixedMask, ForestAutoSegmenter, ForestRefiner, GrabCutRefiner,
    GraphCutRefiner, OtsuSegmenter, RegionGrowRefiner, SeededSegmenter,
};
pub use user::{next_correction, plan_correction, simulate_initial_seeds, Correction};

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::raster::{Annotation, BinaryMask};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulatedUserParams {
    pub brush_radius: u32,
    pub seconds_per_interaction: f64,
    pub max_interactions: usize,
    pub target_iou: f64,
    pub rng_seed: u64,
    /// Erosion applied to the current mask when deriving automatic seeds for
    /// re-segmentation.
    pub auto_seed_erosion: u32,
}

impl Default for SimulatedUserParams {
    fn default() -> Self {
        Self {
            brush_radius: 4,
            seconds_per_interaction: 2.0,
            max_interactions: 10,
            target_iou: 0.95,
            rng_seed: 0,
            auto_seed_erosion: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    InitialSeeding,
    Correction,
    DirectPaint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub index: usize,
    pub kind: InteractionKind,
    pub annotation: Annotation,
    pub simulated_time: f64,
}

/// Everything one protocol run produced for one image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub image_id: String,
    pub algorithm_id: String,
    pub protocol_id: String,
    /// Set when the initial mask came from an external provider.
    #[serde(default)]
    pub external: bool,
    pub events: Vec<InteractionEvent>,
    /// The first algorithmic mask followed by one mask per later event.
    pub masks: Vec<BinaryMask>,
    /// Wall-clock seconds of each algorithm invocation.
    pub compute_times: Vec<f64>,
    pub initial_iou: f64,
    pub refined_iou: f64,
    pub iou_trace: Vec<f64>,
    pub interaction_seconds: f64,
}

impl SessionRecord {
    pub fn final_mask(&self) -> Option<&BinaryMask> {
        self.masks.last()
    }

    pub fn iou_improvement(&self) -> f64 {
        self.refined_iou - self.initial_iou
    }
}
