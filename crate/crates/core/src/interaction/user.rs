use alloc::vec;
use alloc::vec::Vec;

use super::{InteractionEvent, InteractionKind, SimulatedUserParams};
use crate::error::{Error, Result};
use crate::morphology::{components4, distance_l1};
use crate::raster::{Annotation, BinaryMask, Stroke, StrokeLabel};

/// Deepest pixel of `region` (city-block depth, frame counts as outside);
/// ties go to the row-major first pixel.
fn deepest(width: usize, height: usize, region: &[bool]) -> (usize, u32) {
    let depth = distance_l1(width, height, region, true);
    let mut best = (0, 0);
    for (i, &d) in depth.iter().enumerate() {
        if d > best.1 {
            best = (i, d);
        }
    }
    best
}

fn disk_fits(width: usize, height: usize, region: &[bool], center: usize, radius: u32) -> bool {
    let (cx, cy) = ((center % width) as i64, (center / width) as i64);
    let r = radius as i64;
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy > r * r {
                continue;
            }
            let (x, y) = (cx + dx, cy + dy);
            if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
                continue;
            }
            if !region[(y * width as i64 + x) as usize] {
                return false;
            }
        }
    }
    true
}

/// Largest radius `<= start` (at least 1) whose disk stays inside `region`.
fn fitted_radius(width: usize, height: usize, region: &[bool], center: usize, start: u32) -> u32 {
    let mut r = start.max(1);
    while r > 1 && !disk_fits(width, height, region, center, r) {
        r -= 1;
    }
    r
}

fn stroke_in(width: usize, height: usize, region: &[bool], label: StrokeLabel, brush: u32, margin: u32) -> Stroke {
    let (center, depth) = deepest(width, height, region);
    let start = brush.min(depth.saturating_sub(margin));
    let radius = fitted_radius(width, height, region, center, start);
    Stroke::point(label, center % width, center / width, radius)
}

/// One foreground point at the deepest ground-truth foreground pixel and one
/// background point at the deepest background pixel. Radii are capped at
/// `depth - 1` and shrunk until the disk stays on its side of the boundary.
pub fn simulate_initial_seeds(gt: &BinaryMask, p: &SimulatedUserParams) -> Result<Annotation> {
    let (w, h) = gt.dims();
    let fg: Vec<bool> = gt.labels().to_vec();
    let bg: Vec<bool> = gt.labels().iter().map(|&v| !v).collect();
    if !fg.contains(&true) {
        return Err(Error::DegenerateGt("foreground"));
    }
    if !bg.contains(&true) {
        return Err(Error::DegenerateGt("background"));
    }
    let mut ann = Annotation::new();
    ann.push(stroke_in(w, h, &fg, StrokeLabel::Fg, p.brush_radius, 1));
    ann.push(stroke_in(w, h, &bg, StrokeLabel::Bg, p.brush_radius, 1));
    Ok(ann)
}

/// A planned corrective stroke and the error component it targets.
#[derive(Clone, Debug, PartialEq)]
pub struct Correction {
    pub stroke: Stroke,
    /// Pixel indices of the targeted error component.
    pub component: Vec<usize>,
}

/// Picks the largest 4-connected error component (pixels where `current`
/// disagrees with `gt`, grouped by their true label; ties go to the component
/// found first in row-major order) and places a stroke with the true label at
/// its deepest pixel. `None` when the masks agree.
pub fn plan_correction(gt: &BinaryMask, current: &BinaryMask, p: &SimulatedUserParams) -> Result<Option<Correction>> {
    current.ensure_same_dims(gt.dims())?;
    let (w, h) = gt.dims();
    let keys: Vec<Option<bool>> = gt
        .labels()
        .iter()
        .zip(current.labels())
        .map(|(&g, &c)| (g != c).then_some(g))
        .collect();
    let comps = components4(w, h, &keys);
    let Some(target) = comps
        .members
        .iter()
        .enumerate()
        .fold(None::<(usize, usize)>, |best, (i, m)| match best {
            Some((_, size)) if size >= m.len() => best,
            _ => Some((i, m.len())),
        })
        .map(|(i, _)| i)
    else {
        return Ok(None);
    };
    let members = &comps.members[target];
    let mut region = vec![false; w * h];
    for &i in members {
        region[i] = true;
    }
    let label = StrokeLabel::from_bool(gt.labels()[members[0]]);
    let (center, depth) = deepest(w, h, &region);
    let radius = fitted_radius(w, h, &region, center, p.brush_radius.min(depth));
    let mut component = members.clone();
    component.sort_unstable();
    Ok(Some(Correction {
        stroke: Stroke::point(label, center % w, center / w, radius),
        component,
    }))
}

/// The simulated user's next corrective interaction, or `None` once the
/// current mask equals the ground truth.
pub fn next_correction(gt: &BinaryMask, current: &BinaryMask, p: &SimulatedUserParams) -> Result<Option<InteractionEvent>> {
    Ok(plan_correction(gt, current, p)?.map(|c| InteractionEvent {
        index: 0,
        kind: InteractionKind::Correction,
        annotation: Annotation {
            strokes: vec![c.stroke],
        },
        simulated_time: p.seconds_per_interaction,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Seed;

    fn disk(w: usize, h: usize, cx: i64, cy: i64, r: i64) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            let (dx, dy) = (x as i64 - cx, y as i64 - cy);
            dx * dx + dy * dy <= r * r
        })
    }

    #[test]
    fn seeds_on_centered_disk() {
        let gt = disk(64, 64, 32, 32, 15);
        let p = SimulatedUserParams::default();
        let ann = simulate_initial_seeds(&gt, &p).unwrap();
        let fg = &ann.strokes[0];
        assert_eq!(fg.label, StrokeLabel::Fg);
        let [x, y] = fg.points[0];
        assert!((x - 32).abs() <= 1 && (y - 32).abs() <= 1, "{x},{y}");
        let bg = &ann.strokes[1];
        let [bx, by] = bg.points[0];
        assert!(!gt.get(bx as usize, by as usize));
        // distance-transform oracle: the BG point is as deep as any BG pixel
        let bg_region: Vec<bool> = gt.labels().iter().map(|&v| !v).collect();
        let d = distance_l1(64, 64, &bg_region, true);
        assert_eq!(d[by as usize * 64 + bx as usize], *d.iter().max().unwrap());

        let lr = ann.rasterize(64, 64).unwrap();
        for (i, s) in lr.values().iter().enumerate() {
            match s {
                Seed::Fg => assert!(gt.labels()[i]),
                Seed::Bg => assert!(!gt.labels()[i]),
                Seed::Unknown => {}
            }
        }
    }

    #[test]
    fn full_frame_gt_is_degenerate() {
        let gt = BinaryMask::filled(8, 8, true);
        assert_eq!(
            simulate_initial_seeds(&gt, &SimulatedUserParams::default()),
            Err(Error::DegenerateGt("background"))
        );
    }

    #[test]
    fn no_correction_when_equal() {
        let gt = disk(20, 20, 10, 10, 5);
        assert_eq!(next_correction(&gt, &gt, &SimulatedUserParams::default()).unwrap(), None);
    }

    #[test]
    fn erased_block_gets_fg_stroke() {
        let gt = BinaryMask::from_fn(30, 30, |x, y| (5..25).contains(&x) && (5..25).contains(&y));
        let mut cur = gt.clone();
        for y in 10..15 {
            for x in 12..17 {
                cur.set(x, y, false);
            }
        }
        let ev = next_correction(&gt, &cur, &SimulatedUserParams::default()).unwrap().unwrap();
        let s = &ev.annotation.strokes[0];
        assert_eq!(s.label, StrokeLabel::Fg);
        assert_eq!(s.points[0], [14, 12]);
        assert_eq!(ev.kind, InteractionKind::Correction);
    }

    #[test]
    fn largest_component_wins() {
        let gt = BinaryMask::new(40, 40);
        // 3x3 = 9 px component first in row-major order, 10x10 = 100 px later
        let cur = BinaryMask::from_fn(40, 40, |x, y| {
            ((1..4).contains(&x) && (1..4).contains(&y)) || ((20..30).contains(&x) && (20..30).contains(&y))
        });
        let c = plan_correction(&gt, &cur, &SimulatedUserParams::default()).unwrap().unwrap();
        assert_eq!(c.component.len(), 100);
        assert_eq!(c.stroke.label, StrokeLabel::Bg);
        let [x, y] = c.stroke.points[0];
        assert!((20..30).contains(&x) && (20..30).contains(&y));
    }

    #[test]
    fn correction_disk_stays_in_component() {
        let gt = disk(50, 50, 25, 25, 18);
        let cur = disk(50, 50, 22, 25, 18);
        let p = SimulatedUserParams::default();
        let c = plan_correction(&gt, &cur, &p).unwrap().unwrap();
        let lr = Annotation {
            strokes: vec![c.stroke.clone()],
        }
        .rasterize(50, 50)
        .unwrap();
        for (i, s) in lr.values().iter().enumerate() {
            if *s != Seed::Unknown && c.stroke.radius > 1 {
                assert!(c.component.binary_search(&i).is_ok());
            }
        }
    }
}
