//! Iterated graph cut with Gaussian-mixture color models.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmm::{fit_gmm, gmm_neg_loglik, Gmm};
use crate::graphcut::{contrast_pairs, Energy, GraphCutParams};
use crate::raster::{Annotation, BinaryMask, LabelRaster, Raster, Seed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrabCutParams {
    pub k: usize,
    pub gc: GraphCutParams,
    pub max_rounds: usize,
    pub em_iters: usize,
    pub rng_seed: u64,
}

impl Default for GrabCutParams {
    fn default() -> Self {
        Self {
            k: 5,
            gc: GraphCutParams::default(),
            max_rounds: 5,
            em_iters: 20,
            rng_seed: 0,
        }
    }
}

/// Half-open pixel rectangle `[x0, x1) x [y0, y1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GrabCutInit {
    /// Inside is probably foreground, outside is certainly background.
    Rect(Rect),
    /// Seeds are hard labels, everything else starts as probable background.
    Annotation(Annotation),
    /// Like `Annotation`, from an already rasterized seed map.
    Seeds(LabelRaster),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trimap {
    HardBg,
    HardFg,
    ProbBg,
    ProbFg,
}

impl Trimap {
    fn hard(self) -> Option<bool> {
        match self {
            Trimap::HardBg => Some(false),
            Trimap::HardFg => Some(true),
            _ => None,
        }
    }
}

fn seed_trimap(seeds: &LabelRaster) -> Result<Vec<Trimap>> {
    if !seeds.has_fg() || !seeds.has_bg() {
        return Err(Error::DegenerateInit("annotation needs both classes"));
    }
    Ok(seeds
        .values()
        .iter()
        .map(|s| match s {
            Seed::Fg => Trimap::HardFg,
            Seed::Bg => Trimap::HardBg,
            Seed::Unknown => Trimap::ProbBg,
        })
        .collect())
}

/// Round-by-round GrabCut state. Only probable pixels change label.
#[derive(Clone, Debug)]
pub struct GrabCut<'a> {
    img: &'a Raster,
    params: GrabCutParams,
    trimap: Vec<Trimap>,
    pixels: Vec<[f64; 3]>,
    pairs: Vec<(usize, usize, f64)>,
    mask: BinaryMask,
    rounds: usize,
    converged: bool,
}

impl<'a> GrabCut<'a> {
    pub fn new(img: &'a Raster, init: &GrabCutInit, params: &GrabCutParams) -> Result<Self> {
        if params.k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1"));
        }
        let (w, h) = img.dims();
        let trimap: Vec<Trimap> = match init {
            GrabCutInit::Rect(r) => {
                if r.x0 >= r.x1 || r.y0 >= r.y1 || r.x1 > w || r.y1 > h {
                    return Err(Error::DegenerateInit("rectangle is empty or leaves the image"));
                }
                if r.x0 == 0 && r.y0 == 0 && r.x1 == w && r.y1 == h {
                    return Err(Error::DegenerateInit("rectangle has no exterior"));
                }
                (0..w * h)
                    .map(|i| {
                        let (x, y) = (i % w, i / w);
                        if (r.x0..r.x1).contains(&x) && (r.y0..r.y1).contains(&y) {
                            Trimap::ProbFg
                        } else {
                            Trimap::HardBg
                        }
                    })
                    .collect()
            }
            GrabCutInit::Annotation(a) => seed_trimap(&a.rasterize(w, h)?)?,
            GrabCutInit::Seeds(seeds) => {
                if seeds.dims() != (w, h) {
                    return Err(Error::DimensionMismatch {
                        expected: (w, h),
                        actual: seeds.dims(),
                    });
                }
                seed_trimap(seeds)?
            }
        };
        let mask = BinaryMask::from_labels(
            w,
            h,
            trimap
                .iter()
                .map(|t| matches!(t, Trimap::HardFg | Trimap::ProbFg))
                .collect(),
        )?;
        let pixels = (0..w * h)
            .map(|i| img.rgb_at(i).map(|v| v as f64 / 255.0))
            .collect();
        Ok(Self {
            img,
            params: params.clone(),
            trimap,
            pixels,
            pairs: contrast_pairs(img, &params.gc),
            mask,
            rounds: 0,
            converged: false,
        })
    }

    pub fn mask(&self) -> &BinaryMask {
        &self.mask
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    fn fit_side(&self, fg: bool) -> Result<Gmm> {
        let side: Vec<[f64; 3]> = self
            .pixels
            .iter()
            .zip(self.mask.labels())
            .filter(|(_, &m)| m == fg)
            .map(|(p, _)| *p)
            .collect();
        if side.is_empty() {
            return Err(Error::DegenerateInit(if fg {
                "foreground collapsed to zero pixels"
            } else {
                "background collapsed to zero pixels"
            }));
        }
        let k = self.params.k.min(side.len()).max(1);
        Ok(fit_gmm(&side, k, self.params.em_iters, self.params.rng_seed)?.gmm)
    }

    /// One round: refit both mixtures on the current labeling, then cut.
    /// Returns whether the mask changed.
    pub fn step(&mut self) -> Result<bool> {
        let fg = self.fit_side(true)?;
        let bg = self.fit_side(false)?;
        let unary = self
            .pixels
            .iter()
            .map(|p| [gmm_neg_loglik(&bg, p), gmm_neg_loglik(&fg, p)])
            .collect();
        let energy = Energy {
            width: self.img.width(),
            height: self.img.height(),
            unary,
            pairs: self.pairs.clone(),
            hard: self.trimap.iter().map(|t| t.hard()).collect(),
        };
        let next = energy.minimize();
        let changed = next != self.mask;
        for (t, &m) in self.trimap.iter_mut().zip(next.labels()) {
            if matches!(t, Trimap::ProbBg | Trimap::ProbFg) {
                *t = if m { Trimap::ProbFg } else { Trimap::ProbBg };
            }
        }
        self.mask = next;
        self.rounds += 1;
        if !changed {
            self.converged = true;
        }
        Ok(changed)
    }

    /// Steps until the mask stops changing or `max_rounds` is reached.
    pub fn run(mut self) -> Result<BinaryMask> {
        while self.rounds < self.params.max_rounds && !self.converged {
            self.step()?;
        }
        Ok(self.mask)
    }
}

pub fn grabcut(img: &Raster, init: &GrabCutInit, params: &GrabCutParams) -> Result<BinaryMask> {
    GrabCut::new(img, init, params)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{Stroke, StrokeLabel};

    fn two_tone(w: usize, h: usize) -> Raster {
        Raster::from_fn_rgb(w, h, |x, y| {
            let (dx, dy) = (x as i64 - 12, y as i64 - 12);
            if dx * dx + dy * dy <= 36 {
                [200, 40, 40]
            } else {
                [30, 30, 120]
            }
        })
    }

    #[test]
    fn exterior_stays_background() {
        let img = two_tone(24, 24);
        let r = Rect {
            x0: 4,
            y0: 5,
            x1: 20,
            y1: 19,
        };
        let m = grabcut(&img, &GrabCutInit::Rect(r), &GrabCutParams::default()).unwrap();
        for y in 0..24 {
            for x in 0..24 {
                if !((4..20).contains(&x) && (5..19).contains(&y)) {
                    assert!(!m.get(x, y));
                }
            }
        }
        assert!(m.get(12, 12));
    }

    #[test]
    fn degenerate_rectangles() {
        let img = two_tone(10, 10);
        let p = GrabCutParams::default();
        let empty = Rect { x0: 3, y0: 3, x1: 3, y1: 8 };
        assert!(matches!(grabcut(&img, &GrabCutInit::Rect(empty), &p), Err(Error::DegenerateInit(_))));
        let all = Rect { x0: 0, y0: 0, x1: 10, y1: 10 };
        assert!(matches!(grabcut(&img, &GrabCutInit::Rect(all), &p), Err(Error::DegenerateInit(_))));
    }

    #[test]
    fn fixed_point_is_stable() {
        let img = two_tone(24, 24);
        let init = GrabCutInit::Rect(Rect { x0: 3, y0: 3, x1: 21, y1: 21 });
        let params = GrabCutParams {
            max_rounds: 20,
            ..Default::default()
        };
        let mut gc = GrabCut::new(&img, &init, &params).unwrap();
        while !gc.converged() && gc.rounds() < 20 {
            gc.step().unwrap();
        }
        assert!(gc.converged());
        let settled = gc.mask().clone();
        assert!(!gc.step().unwrap());
        assert_eq!(gc.mask(), &settled);
    }

    #[test]
    fn from_scribbles() {
        let img = two_tone(24, 24);
        let mut a = Annotation::new();
        a.push(Stroke::point(StrokeLabel::Fg, 12, 12, 2));
        a.push(Stroke::point(StrokeLabel::Bg, 2, 2, 2));
        let m = grabcut(&img, &GrabCutInit::Annotation(a), &GrabCutParams::default()).unwrap();
        let truth = BinaryMask::from_fn(24, 24, |x, y| {
            let (dx, dy) = (x as i64 - 12, y as i64 - 12);
            dx * dx + dy * dy <= 36
        });
        assert_eq!(m, truth);
    }
}
