use super::generate::{Episode, GoalPredicate};
use super::BenchError;
use crate::executor::ControlParams;
use crate::grounding::GroundingMap;
use crate::world::{Scene, SceneObject};

/// Share of an object's footprint that must fall in a region's interior.
pub const INSIDE_FRACTION: f64 = 0.9;

/// `object` counts as inside `region` when its centroid lies in the
/// region's interior and at least [`INSIDE_FRACTION`] of its footprint
/// pixels (at the scene raster) do too.
pub fn is_inside(scene: &Scene, object: &SceneObject, region: &SceneObject) -> bool {
    if !region.interior_contains(object.x, object.y) {
        return false;
    }
    let (h, w) = (scene.height as usize, scene.width as usize);
    let pixels = object.footprint_pixels(scene, h, w);
    if pixels.is_empty() {
        return true;
    }
    let sx = scene.width as f64 / w as f64;
    let sy = scene.height as f64 / h as f64;
    let inside = pixels
        .iter()
        .filter(|&&p| region.interior_contains(((p % w) as f64 + 0.5) * sx, ((p / w) as f64 + 0.5) * sy))
        .count();
    inside as f64 >= INSIDE_FRACTION * pixels.len() as f64
}

/// Task score of `final_scene` in `[0, 1]`. Objects missing from the scene
/// count as failures.
pub fn score_success(episode: &Episode, final_scene: &Scene) -> f64 {
    match &episode.goal {
        GoalPredicate::Inside { object, region } => {
            match (final_scene.object(*object), final_scene.object(*region)) {
                (Some(o), Some(r)) if is_inside(final_scene, o, r) => 1.0,
                _ => 0.0,
            }
        }
        GoalPredicate::BlocksInBowls { blocks, bowls } => {
            if blocks.is_empty() {
                return 1.0;
            }
            // Each bowl holds at most one block.
            let filled = bowls
                .iter()
                .filter_map(|&b| final_scene.object(b))
                .filter(|bowl| {
                    blocks
                        .iter()
                        .filter_map(|&k| final_scene.object(k))
                        .any(|blk| is_inside(final_scene, blk, bowl))
                })
                .count();
            filled.min(blocks.len()) as f64 / blocks.len() as f64
        }
        GoalPredicate::BlocksInZone { blocks, zone } => {
            let Some(z) = final_scene.object(*zone) else {
                return 0.0;
            };
            if blocks.is_empty() {
                return 1.0;
            }
            let n = blocks
                .iter()
                .filter_map(|&k| final_scene.object(k))
                .filter(|b| z.interior_contains(b.x, b.y))
                .count();
            n as f64 / blocks.len() as f64
        }
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// `-ln softmax(logits)[index]`, computed with a max shift.
pub fn softmax_cross_entropy(logits: &[f64], index: usize) -> f64 {
    log_sum_exp(logits.iter().copied()) - logits[index]
}

/// Cross-entropy of the expert poses under softmax distributions with the
/// maps as logits: over all pick cells, and jointly over all place cells of
/// every rotation.
pub fn imitation_loss(pick_map: &GroundingMap, place_maps: &[GroundingMap], expert: &ControlParams) -> Result<f64, BenchError> {
    let (h, w) = pick_map.dims();
    if expert.pick.u >= h || expert.pick.v >= w {
        return Err(BenchError::OutOfGrid);
    }
    let place = place_maps.get(expert.place.r).ok_or(BenchError::OutOfGrid)?;
    let (ph, pw) = place.dims();
    if expert.place.u >= ph || expert.place.v >= pw || place_maps.iter().any(|m| m.dims() != (ph, pw)) {
        return Err(BenchError::OutOfGrid);
    }
    let pick_term = softmax_cross_entropy(pick_map.values(), expert.pick.u * w + expert.pick.v);
    let all_place: Vec<f64> = place_maps.iter().flat_map(|m| m.values().iter().copied()).collect();
    let place_term = softmax_cross_entropy(&all_place, (expert.place.r * ph + expert.place.u) * pw + expert.place.v);
    Ok(pick_term + place_term)
}
