//! Pick affordances, object silhouettes and place scoring over the pose grid.

use super::kernels::{component_normalized_distance, component_of, label_components, MASK_THRESHOLD};
use super::{ExecError, Pose2, PoseGrid};
use crate::grounding::GroundingMap;

/// Fraction of a component lying on the goal kernel above which the
/// component counts as already satisfying the goal.
pub const SATISFIED_FRACTION: f64 = 0.9;

/// Level above which an upsampled object map is backed by grounding samples
/// on every side, so the pixel is reliably on the object.
pub const CORE_THRESHOLD: f64 = 0.95;

/// Pick score: the object map weighted by per-component distance transforms
/// of its mask and of its high-confidence core, so each object peaks deep
/// inside its footprint. Components already lying on `satisfied` (goal
/// kernel > 0) are suppressed unless that would suppress everything.
pub fn pick_affordance(object: &GroundingMap, satisfied: Option<&GroundingMap>) -> GroundingMap {
    let (h, w) = object.dims();
    let mask = object.threshold(MASK_THRESHOLD);
    let dt = component_normalized_distance(h, w, &mask);
    let core = component_normalized_distance(h, w, &object.threshold(CORE_THRESHOLD));
    let mut values: Vec<f64> = object
        .values()
        .iter()
        .zip(dt.iter().zip(&core))
        .map(|(&o, (&d, &c))| o * (d + c) / 2.0)
        .collect();
    if let Some(goal) = satisfied {
        let (labels, n) = label_components(h, w, &mask);
        let mut size = vec![0usize; n + 1];
        let mut on_goal = vec![0usize; n + 1];
        for (p, &l) in labels.iter().enumerate() {
            size[l] += 1;
            if goal.values()[p] > 0.0 {
                on_goal[l] += 1;
            }
        }
        let done: Vec<bool> = (0..=n)
            .map(|l| l > 0 && on_goal[l] as f64 >= SATISFIED_FRACTION * size[l] as f64)
            .collect();
        if (1..=n).any(|l| !done[l]) {
            for (v, &l) in values.iter_mut().zip(&labels) {
                if done[l] {
                    *v = 0.0;
                }
            }
        }
    }
    GroundingMap::new(h, w, values).expect("products of values in [0, 1]")
}

/// Row-major argmax of the pick map at rotation 0.
pub fn select_pick(pick_map: &GroundingMap, path: &str) -> Result<Pose2, ExecError> {
    if pick_map.max() <= 0.0 {
        return Err(ExecError::EmptyGrounding(path.to_string()));
    }
    let p = pick_map.argmax();
    Ok(Pose2::new(p / pick_map.width(), p % pick_map.width(), 0))
}

/// Pixel set of the picked object relative to its centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct Silhouette {
    /// Centroid in pixel-centre coordinates `(row, col)`.
    pub centroid: (f64, f64),
    /// `(d_row, d_col)` of each pixel from the centroid.
    pub offsets: Vec<(f64, f64)>,
}

impl Silhouette {
    /// The 8-connected component of the thresholded `object` map containing
    /// pixel `(u, v)`. A pick off the mask yields the single pick pixel.
    pub fn extract(object: &GroundingMap, u: usize, v: usize) -> Silhouette {
        let (h, w) = object.dims();
        let mask = object.threshold(MASK_THRESHOLD);
        let mut pixels = component_of(h, w, &mask, u * w + v);
        if pixels.is_empty() {
            pixels.push(u * w + v);
        }
        let n = pixels.len() as f64;
        let cr = pixels.iter().map(|&p| (p / w) as f64 + 0.5).sum::<f64>() / n;
        let cc = pixels.iter().map(|&p| (p % w) as f64 + 0.5).sum::<f64>() / n;
        let offsets = pixels
            .iter()
            .map(|&p| ((p / w) as f64 + 0.5 - cr, (p % w) as f64 + 0.5 - cc))
            .collect();
        Silhouette {
            centroid: (cr, cc),
            offsets,
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Integer offsets after rotating by `theta` (same sense as object
    /// angles), deduplicated.
    pub fn rotated(&self, theta: f64) -> Vec<(isize, isize)> {
        let (s, c) = theta.sin_cos();
        let mut out: Vec<(isize, isize)> = self
            .offsets
            .iter()
            .map(|&(dy, dx)| {
                let x = c * dx - s * dy;
                let y = s * dx + c * dy;
                (y.round() as isize, x.round() as isize)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Pixel diameter: twice the largest centroid distance plus one pixel.
    pub fn diameter(&self) -> f64 {
        let r = self
            .offsets
            .iter()
            .map(|&(dy, dx)| (dy * dy + dx * dx).sqrt())
            .fold(0.0, f64::max);
        2.0 * r + 1.0
    }
}

/// One place map per rotation: `reference · frac · mean`, where `frac` is
/// the share of the rotated silhouette on `kernel > 0` and `mean` its mean
/// kernel value. Pixels outside the reference support score zero.
pub fn place_maps(
    reference: &GroundingMap,
    kernel: &GroundingMap,
    silhouette: &Silhouette,
    grid: &PoseGrid,
) -> Vec<GroundingMap> {
    let (h, w) = reference.dims();
    assert_eq!((h, w), (grid.height, grid.width), "reference map must be at pose-grid resolution");
    (0..grid.rotations)
        .map(|r| {
            let offsets = silhouette.rotated(grid.angle(r));
            let n = offsets.len().max(1) as f64;
            let mut values = vec![0.0; h * w];
            for u in 0..h {
                for v in 0..w {
                    let up = reference.get(u, v);
                    if up <= 0.0 {
                        continue;
                    }
                    let (mut hits, mut sum) = (0usize, 0.0);
                    for &(dy, dx) in &offsets {
                        let (pr, pc) = (u as isize + dy, v as isize + dx);
                        if pr < 0 || pc < 0 || pr as usize >= h || pc as usize >= w {
                            continue;
                        }
                        let k = kernel.get(pr as usize, pc as usize);
                        if k > 0.0 {
                            hits += 1;
                            sum += k;
                        }
                    }
                    values[u * w + v] = up * (hits as f64 / n) * (sum / n);
                }
            }
            GroundingMap::new(h, w, values).expect("products of values in [0, 1]")
        })
        .collect()
}

/// Maximum over all rotations; ties go to the lowest rotation index, then
/// row-major order.
pub fn select_place(maps: &[GroundingMap]) -> Result<Pose2, ExecError> {
    let mut best: Option<(f64, Pose2)> = None;
    for (r, m) in maps.iter().enumerate() {
        let p = m.argmax();
        let v = m.values()[p];
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, Pose2::new(p / m.width(), p % m.width(), r)));
        }
    }
    match best {
        Some((v, pose)) if v > 0.0 => Ok(pose),
        _ => Err(ExecError::NoFeasiblePlace),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(h: usize, w: usize, r0: usize, c0: usize, side: usize) -> GroundingMap {
        GroundingMap::from_fn(h, w, |r, c| {
            if (r0..r0 + side).contains(&r) && (c0..c0 + side).contains(&c) {
                1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn pick_peaks_at_component_centre() {
        let obj = square(16, 16, 2, 2, 5);
        let pick = pick_affordance(&obj, None);
        assert_eq!(select_pick(&pick, "0").unwrap(), Pose2::new(4, 4, 0));
        assert!(matches!(
            select_pick(&GroundingMap::zeros(4, 4), "0.1"),
            Err(ExecError::EmptyGrounding(p)) if p == "0.1"
        ));
    }

    #[test]
    fn satisfied_components_are_suppressed() {
        let obj = square(16, 16, 2, 2, 5).union(&square(16, 16, 9, 9, 5)).unwrap();
        let goal = square(16, 16, 8, 8, 8);
        let pick = pick_affordance(&obj, Some(&goal));
        assert_eq!(select_pick(&pick, "0").unwrap(), Pose2::new(4, 4, 0));
        let all = square(16, 16, 0, 0, 16);
        let pick = pick_affordance(&obj, Some(&all));
        assert_eq!(select_pick(&pick, "0").unwrap(), Pose2::new(4, 4, 0));
    }

    #[test]
    fn silhouette_rotation_preserves_square() {
        let obj = square(16, 16, 2, 2, 5);
        let s = Silhouette::extract(&obj, 3, 3);
        assert_eq!(s.len(), 25);
        assert_eq!(s.centroid, (4.5, 4.5));
        let quarter = s.rotated(std::f64::consts::FRAC_PI_2);
        let ident = s.rotated(0.0);
        assert_eq!(ident.len(), 25);
        assert_eq!(quarter, ident);
    }

    #[test]
    fn place_prefers_kernel_centre() {
        let grid = PoseGrid::new(16, 16, 4);
        let obj = square(16, 16, 1, 1, 3);
        let s = Silhouette::extract(&obj, 2, 2);
        let reference = square(16, 16, 6, 6, 9);
        let kernel = super::super::kernels::relation_kernel(
            &reference,
            super::super::RelationKind::Inside,
            &Default::default(),
            None,
        );
        let maps = place_maps(&reference, &kernel, &s, &grid);
        assert_eq!(maps.len(), 4);
        let pose = select_place(&maps).unwrap();
        assert_eq!((pose.u, pose.v, pose.r), (10, 10, 0));
        let none = place_maps(&GroundingMap::zeros(16, 16), &kernel, &s, &grid);
        assert_eq!(select_place(&none), Err(ExecError::NoFeasiblePlace));
    }
}
