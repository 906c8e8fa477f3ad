//! Seeded scene layouts, instructions and ground-truth expert actions.

use std::f64::consts::FRAC_PI_2;
use std::ops::Range;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::score_success;
use super::tasks::{TaskName, TaskSpec};
use super::BenchError;
use crate::executor::{ControlParams, Pose2, PoseGrid, Primitive, DEFAULT_ROTATIONS};
use crate::world::{apply_action, NamedColor, ObjectKind, Scene, SceneObject, ShapeKind, DEFAULT_HEIGHT, DEFAULT_WIDTH};

/// Sampling attempts per object, and whole-episode restarts.
pub const MAX_ATTEMPTS: usize = 1000;
/// Minimum gap between bounding circles of sampled objects.
pub const CLEARANCE: f64 = 4.0;
/// Minimum gap between an object's bounding circle and the workspace edge.
pub const EDGE_MARGIN: f64 = 2.0;
/// Gap kept between a referent and the half-plane through another object's
/// centroid, so relation kernels never split an object.
pub const RELATION_MARGIN: f64 = 3.0;

/// Machine-checkable success condition over object ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GoalPredicate {
    /// Binary: `object` lies inside `region` (a box, bowl or zone).
    Inside { object: u32, region: u32 },
    /// Fraction of `blocks` in distinct bowls among `bowls`.
    BlocksInBowls { blocks: Vec<u32>, bowls: Vec<u32> },
    /// Fraction of `blocks` whose centroid lies in `zone`.
    BlocksInZone { blocks: Vec<u32>, zone: u32 },
}

/// A generated demonstration: scene, instruction and expert actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub task: TaskSpec,
    pub seed: u64,
    pub scene: Scene,
    pub instruction: String,
    pub expert: Vec<ControlParams>,
    pub goal: GoalPredicate,
    pub max_steps: usize,
}

impl Episode {
    /// The grid expert actions are expressed on.
    pub fn grid(&self) -> PoseGrid {
        PoseGrid::for_scene(&self.scene, DEFAULT_ROTATIONS)
    }

    /// The scene after applying the first `steps` expert actions.
    pub fn replay(&self, steps: usize) -> Scene {
        let grid = self.grid();
        self.expert
            .iter()
            .take(steps)
            .fold(self.scene.clone(), |s, a| apply_action(&s, a, &grid).scene)
    }
}

/// Ground-truth action for `step`, given that the first `step` expert
/// actions have been applied.
pub fn expert_policy(episode: &Episode, step: usize) -> Result<ControlParams, BenchError> {
    if step >= episode.max_steps {
        return Err(BenchError::StepOutOfRange(step));
    }
    let state = episode.replay(step);
    if score_success(episode, &state) >= 1.0 {
        return Err(BenchError::AlreadySolved);
    }
    episode.expert.get(step).copied().ok_or(BenchError::AlreadySolved)
}

fn episode_rng(task: &TaskSpec, seed: u64, attempt: usize) -> ChaCha8Rng {
    let salt = (task.name as u64) << 8 | task.split as u64;
    let mixed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt.wrapping_mul(0xC2B2_AE3D_27D4_EB4F) ^ attempt as u64;
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Deterministic episode for `(task, seed)`. The expert actions are replayed
/// before returning; layouts they do not solve are resampled.
pub fn generate_episode(task: &TaskSpec, seed: u64) -> Result<Episode, BenchError> {
    task.validate()?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = episode_rng(task, seed, attempt);
        let Some(ep) = layout(task, seed, &mut rng) else {
            continue;
        };
        if score_success(&ep, &ep.replay(ep.expert.len())) >= 1.0 && ep.expert.len() <= ep.max_steps {
            return Ok(ep);
        }
    }
    Err(BenchError::GenerationFailure {
        task: task.name.to_string(),
        seed,
    })
}

struct Builder<'r> {
    scene: Scene,
    rng: &'r mut ChaCha8Rng,
}

impl Builder<'_> {
    fn width(&self) -> f64 {
        self.scene.width as f64
    }

    fn height(&self) -> f64 {
        self.scene.height as f64
    }

    fn fits(&self, obj: &SceneObject) -> bool {
        let r = obj.bounding_radius();
        let (w, h) = (self.width(), self.height());
        if obj.x - r < EDGE_MARGIN || obj.x + r > w - EDGE_MARGIN || obj.y - r < EDGE_MARGIN || obj.y + r > h - EDGE_MARGIN {
            return false;
        }
        // Positional attributes flip at the workspace centre lines.
        if (obj.x - w / 2.0).abs() < 0.5 || (obj.y - h / 2.0).abs() < 0.5 {
            return false;
        }
        self.scene.objects.iter().all(|o| {
            let d = ((o.x - obj.x).powi(2) + (o.y - obj.y).powi(2)).sqrt();
            d >= o.bounding_radius() + r + CLEARANCE
        })
    }

    /// Samples a collision-free pose with centre in `xs × ys` and adds the
    /// object; `accept` adds task-specific constraints.
    fn place(
        &mut self,
        kind: ObjectKind,
        shape: ShapeKind,
        color: NamedColor,
        xs: Range<f64>,
        ys: Range<f64>,
        accept: impl Fn(&SceneObject) -> bool,
    ) -> Option<u32> {
        if xs.is_empty() || ys.is_empty() {
            return None;
        }
        for _ in 0..MAX_ATTEMPTS {
            let x = self.rng.random_range(xs.clone());
            let y = self.rng.random_range(ys.clone());
            let angle = if matches!(shape, ShapeKind::Bowl) {
                0.0
            } else {
                self.rng.random_range(0.0..FRAC_PI_2)
            };
            let obj = SceneObject::new(kind, shape, color, x, y, angle, 1.0);
            if self.fits(&obj) && accept(&obj) {
                return Some(self.scene.add(obj));
            }
        }
        None
    }

    fn anywhere(&self) -> (Range<f64>, Range<f64>) {
        (0.0..self.width(), 0.0..self.height())
    }

    fn item(&mut self, shape: ShapeKind, color: NamedColor) -> Option<u32> {
        let (xs, ys) = self.anywhere();
        self.place(ObjectKind::Item, shape, color, xs, ys, |_| true)
    }

    fn color(&mut self, pool: &[NamedColor]) -> NamedColor {
        *pool.choose(self.rng).expect("nonempty color pool")
    }

    fn distinct_colors(&mut self, pool: &[NamedColor], n: usize) -> Vec<NamedColor> {
        let mut v = pool.to_vec();
        v.shuffle(self.rng);
        v.truncate(n);
        v
    }

    fn obj(&self, id: u32) -> &SceneObject {
        self.scene.object(id).expect("placed object")
    }
}

/// Footprint pixel nearest the object's centroid: the expert's pick point
/// (a ring's centroid lies in its hole).
fn grasp_pixel(scene: &Scene, grid: &PoseGrid, id: u32) -> Pose2 {
    let obj = scene.object(id).expect("object");
    let pixels = obj.footprint_pixels(scene, grid.height, grid.width);
    let best = pixels
        .iter()
        .copied()
        .min_by(|&a, &b| {
            let d = |p: usize| {
                let (x, y) = grid.pixel_center(scene, p / grid.width, p % grid.width);
                (x - obj.x).powi(2) + (y - obj.y).powi(2)
            };
            d(a).total_cmp(&d(b)).then(a.cmp(&b))
        })
        .expect("objects cover at least one pixel");
    Pose2::new(best / grid.width, best % grid.width, 0)
}

fn centre_pose(scene: &Scene, grid: &PoseGrid, id: u32) -> Pose2 {
    let o = scene.object(id).expect("object");
    let (u, v) = grid.pixel_of(scene, o.x, o.y);
    Pose2::new(u, v, 0)
}

fn pick_place(scene: &Scene, grid: &PoseGrid, object: u32, target: u32) -> ControlParams {
    ControlParams {
        pick: grasp_pixel(scene, grid, object),
        place: centre_pose(scene, grid, target),
        primitive: Primitive::PickPlace,
    }
}

/// Push from just behind `object` (on the far side from the zone) to the
/// zone centre.
fn push_to(scene: &Scene, grid: &PoseGrid, object: u32, zone: u32) -> ControlParams {
    let o = scene.object(object).expect("object");
    let z = scene.object(zone).expect("zone");
    let (dx, dy) = (z.x - o.x, z.y - o.y);
    let len = (dx * dx + dy * dy).sqrt().max(1e-9);
    let back = o.bounding_radius() + 1.0;
    let (sx, sy) = (o.x - back * dx / len, o.y - back * dy / len);
    let (u, v) = grid.pixel_of(scene, sx, sy);
    ControlParams {
        pick: Pose2::new(u, v, 0),
        place: centre_pose(scene, grid, zone),
        primitive: Primitive::Push,
    }
}

fn side(x: f64, w: f64) -> &'static str {
    if x < w / 2.0 {
        "left"
    } else {
        "right"
    }
}

/// Samples one candidate layout; `None` when placement fails.
fn layout(task: &TaskSpec, seed: u64, rng: &mut ChaCha8Rng) -> Option<Episode> {
    let mut b = Builder {
        scene: Scene::new(DEFAULT_WIDTH, DEFAULT_HEIGHT, seed),
        rng,
    };
    let grid = PoseGrid::for_scene(&b.scene, DEFAULT_ROTATIONS);
    let colors = task.split.colors();
    let (w, h) = (b.width(), b.height());

    let (instruction, goal, max_steps) = match task.name {
        TaskName::PackingShapes
        | TaskName::PackingColorBox
        | TaskName::PackingLocationBox
        | TaskName::PackingPrepositions
        | TaskName::PackingNestedPrepositions => {
            let mut shapes = task.split.shapes().to_vec();
            shapes.shuffle(b.rng);
            shapes.truncate(task.distractors + 1);
            let target_shape = shapes[0];
            let (instruction, target_box, ids) = packing_layout(task, &mut b, &shapes)?;
            let target = ids[0];
            debug_assert_eq!(b.obj(target).shape, target_shape);
            (instruction, GoalPredicate::Inside { object: target, region: target_box }, 1)
        }
        TaskName::PutBlocksInBowls => {
            let picked = b.distinct_colors(colors, 2);
            let (block_color, bowl_color) = if b.rng.random_bool(0.3) {
                (picked[0], picked[0])
            } else {
                (picked[0], picked[1])
            };
            let n_target = b.rng.random_range(1..=3usize);
            let n_bowls = n_target + b.rng.random_range(0..=1usize);
            let mut bowls = Vec::new();
            for _ in 0..n_bowls {
                let (xs, ys) = b.anywhere();
                bowls.push(b.place(ObjectKind::Container, ShapeKind::Bowl, bowl_color, xs, ys, |_| true)?);
            }
            let others: Vec<NamedColor> = colors.iter().copied().filter(|&c| c != bowl_color).collect();
            for _ in 0..b.rng.random_range(0..=2usize) {
                let c = b.color(&others);
                let (xs, ys) = b.anywhere();
                b.place(ObjectKind::Container, ShapeKind::Bowl, c, xs, ys, |_| true)?;
            }
            let mut blocks = Vec::new();
            for _ in 0..n_target {
                blocks.push(b.item(ShapeKind::Block, block_color)?);
            }
            let other_blocks: Vec<NamedColor> = colors.iter().copied().filter(|&c| c != block_color).collect();
            for _ in 0..b.rng.random_range(0..=3usize) {
                let c = b.color(&other_blocks);
                b.item(ShapeKind::Block, c)?;
            }
            let instruction = format!("put the {} blocks in a {} bowl", block_color, bowl_color);
            (instruction, GoalPredicate::BlocksInBowls { blocks, bowls }, n_target)
        }
        TaskName::SeparatingPiles | TaskName::SeparatingLocationPiles => {
            let block_color = b.color(colors);
            let (target_zone, instruction) = if task.name == TaskName::SeparatingPiles {
                let zc = b.distinct_colors(colors, 2);
                let (xs, ys) = b.anywhere();
                let z0 = b.place(ObjectKind::Zone, ShapeKind::Zone, zc[0], xs.clone(), ys.clone(), |_| true)?;
                b.place(ObjectKind::Zone, ShapeKind::Zone, zc[1], xs, ys, |_| true)?;
                (z0, format!("push the pile of {} blocks into the {} square", block_color, zc[0]))
            } else {
                let zc = b.color(colors);
                let left = b.place(ObjectKind::Zone, ShapeKind::Zone, zc, 0.0..w / 2.0, 0.0..h, |_| true)?;
                let right = b.place(ObjectKind::Zone, ShapeKind::Zone, zc, w / 2.0..w, 0.0..h, |_| true)?;
                let target = if b.rng.random_bool(0.5) { left } else { right };
                let loc = side(b.obj(target).x, w);
                (target, format!("push the pile of {} blocks into the {} square", block_color, loc))
            };
            let mut blocks = Vec::new();
            for _ in 0..task.pile_size {
                blocks.push(b.item(ShapeKind::Block, block_color)?);
            }
            (instruction, GoalPredicate::BlocksInZone { blocks, zone: target_zone }, task.pile_size)
        }
        TaskName::PushingShapes => {
            let zc = b.distinct_colors(colors, 2);
            let left = b.place(ObjectKind::Zone, ShapeKind::Zone, zc[0], 0.0..w / 2.0, 0.0..h, |_| true)?;
            let right = b.place(ObjectKind::Zone, ShapeKind::Zone, zc[1], w / 2.0..w, 0.0..h, |_| true)?;
            let zone = if b.rng.random_bool(0.5) { left } else { right };
            // "square" names the zones, so square items are left out.
            let shapes: Vec<ShapeKind> = task
                .split
                .shapes()
                .iter()
                .copied()
                .filter(|&s| s != ShapeKind::Square)
                .collect();
            let mut combos = Vec::new();
            for &s in &shapes {
                for &c in colors {
                    combos.push((s, c));
                }
            }
            combos.shuffle(b.rng);
            let mut target = None;
            for &(s, c) in combos.iter().take(task.distractors + 1) {
                let id = b.item(s, c)?;
                target.get_or_insert(id);
            }
            let target = target?;
            let t = b.obj(target);
            let z = b.obj(zone);
            let instruction = format!(
                "push the {} {} into the {} {} square",
                t.color,
                t.shape,
                side(z.x, w),
                z.color
            );
            (instruction, GoalPredicate::Inside { object: target, region: zone }, 3)
        }
    };

    let scene = b.scene;
    let mut ep = Episode {
        task: *task,
        seed,
        scene,
        instruction,
        expert: Vec::new(),
        goal,
        max_steps,
    };
    ep.expert = expert_actions(&ep, &grid)?;
    Some(ep)
}

/// Returns the instruction, the correct box and the item ids (target first).
fn packing_layout(task: &TaskSpec, b: &mut Builder, shapes: &[ShapeKind]) -> Option<(String, u32, Vec<u32>)> {
    let colors = task.split.colors();
    let (w, h) = (b.width(), b.height());
    let target_shape = shapes[0];
    let brown = NamedColor::Brown;
    let mut ids = vec![0u32; shapes.len()];
    let place_items = |b: &mut Builder, ids: &mut Vec<u32>, skip: &[usize]| -> Option<()> {
        for (i, &s) in shapes.iter().enumerate() {
            if skip.contains(&i) {
                continue;
            }
            let c = b.color(colors);
            ids[i] = b.item(s, c)?;
        }
        Some(())
    };
    let box_shape = ShapeKind::Box;
    let kind = ObjectKind::Container;
    match task.name {
        TaskName::PackingShapes => {
            let (xs, ys) = b.anywhere();
            let bx = b.place(kind, box_shape, brown, xs, ys, |_| true)?;
            place_items(b, &mut ids, &[])?;
            Some((format!("pack the {} in the brown box", target_shape), bx, ids))
        }
        TaskName::PackingColorBox => {
            let bc = b.distinct_colors(colors, 2);
            let (xs, ys) = b.anywhere();
            let b0 = b.place(kind, box_shape, bc[0], xs.clone(), ys.clone(), |_| true)?;
            b.place(kind, box_shape, bc[1], xs, ys, |_| true)?;
            place_items(b, &mut ids, &[])?;
            Some((format!("pack the {} in the {} box", target_shape, bc[0]), b0, ids))
        }
        TaskName::PackingLocationBox => {
            let left = b.place(kind, box_shape, brown, 0.0..w / 2.0, 0.0..h, |_| true)?;
            let right = b.place(kind, box_shape, brown, w / 2.0..w, 0.0..h, |_| true)?;
            let (target, loc) = if b.rng.random_bool(0.5) { (left, "left") } else { (right, "right") };
            place_items(b, &mut ids, &[])?;
            Some((format!("pack the {} into the {} brown box", target_shape, loc), target, ids))
        }
        TaskName::PackingPrepositions => {
            // shapes[1] is the reference; one box lies wholly on each side.
            let c = b.color(colors);
            let reference = b.place(ObjectKind::Item, shapes[1], c, 0.3 * w..0.7 * w, 0.0..h, |_| true)?;
            ids[1] = reference;
            let rx = b.obj(reference).x;
            let left = b.place(kind, box_shape, brown, 0.0..w, 0.0..h, |o| {
                o.x + o.bounding_radius() + RELATION_MARGIN < rx
            })?;
            let right = b.place(kind, box_shape, brown, 0.0..w, 0.0..h, |o| {
                o.x - o.bounding_radius() - RELATION_MARGIN > rx
            })?;
            let (target, rel) = if b.rng.random_bool(0.5) { (left, "left") } else { (right, "right") };
            place_items(b, &mut ids, &[1])?;
            Some((
                format!("pack the {} into the brown box {} of the {}", target_shape, rel, shapes[1]),
                target,
                ids,
            ))
        }
        TaskName::PackingNestedPrepositions => {
            // The box is r1 of shapes[1], which is r2 of shapes[2].
            let c = b.color(colors);
            let s2 = b.place(ObjectKind::Item, shapes[1], c, 0.3 * w..0.7 * w, 0.0..h, |_| true)?;
            ids[1] = s2;
            let (x2, y2, br2) = {
                let o = b.obj(s2);
                (o.x, o.y, o.bounding_radius())
            };
            let left = b.place(kind, box_shape, brown, 0.0..w, 0.0..h, |o| {
                o.x + o.bounding_radius() + RELATION_MARGIN < x2
            })?;
            let right = b.place(kind, box_shape, brown, 0.0..w, 0.0..h, |o| {
                o.x - o.bounding_radius() - RELATION_MARGIN > x2
            })?;
            let (target, r1) = if b.rng.random_bool(0.5) { (left, "left") } else { (right, "right") };
            let r2 = *["left", "right", "front", "back"].choose(b.rng).expect("relations");
            let c3 = b.color(colors);
            // shapes[1] must lie wholly on the r2 side of shapes[2]'s centroid.
            let s3 = b.place(ObjectKind::Item, shapes[2], c3, 0.0..w, 0.0..h, move |o| match r2 {
                "left" => x2 + br2 + RELATION_MARGIN < o.x,
                "right" => x2 - br2 - RELATION_MARGIN > o.x,
                "front" => y2 - br2 - RELATION_MARGIN > o.y,
                _ => y2 + br2 + RELATION_MARGIN < o.y,
            })?;
            ids[2] = s3;
            place_items(b, &mut ids, &[1, 2])?;
            Some((
                format!(
                    "pack the {} into the brown box {} of the {} {} of the {}",
                    target_shape, r1, shapes[1], r2, shapes[2]
                ),
                target,
                ids,
            ))
        }
        _ => unreachable!("packing task"),
    }
}

/// Ground-truth actions, simulated forward so later actions see earlier
/// effects.
fn expert_actions(ep: &Episode, grid: &PoseGrid) -> Option<Vec<ControlParams>> {
    let mut scene = ep.scene.clone();
    let mut out = Vec::new();
    match &ep.goal {
        GoalPredicate::Inside { object, region } => {
            let action = if ep.task.name.is_push_task() {
                push_to(&scene, grid, *object, *region)
            } else {
                pick_place(&scene, grid, *object, *region)
            };
            out.push(action);
        }
        GoalPredicate::BlocksInBowls { blocks, bowls } => {
            for (&block, &bowl) in blocks.iter().zip(bowls) {
                let a = pick_place(&scene, grid, block, bowl);
                scene = apply_action(&scene, &a, grid).scene;
                out.push(a);
            }
        }
        GoalPredicate::BlocksInZone { blocks, zone } => {
            let z = scene.object(*zone)?.clone();
            for &block in blocks {
                let o = scene.object(block)?;
                if z.interior_contains(o.x, o.y) {
                    continue;
                }
                let a = push_to(&scene, grid, block, *zone);
                scene = apply_action(&scene, &a, grid).scene;
                out.push(a);
            }
        }
    }
    Some(out)
}

/// Words of `instruction` split on whitespace.
pub fn instruction_words(instruction: &str) -> Vec<&str> {
    instruction.split_whitespace().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::tasks::{Split, ALL_TASKS};
    use crate::ccg::Lexicon;

    #[test]
    fn packing_shapes_seed_7() {
        let ep = generate_episode(&TaskSpec::new(TaskName::PackingShapes, Split::Seen), 7).unwrap();
        let items: Vec<_> = ep.scene.objects.iter().filter(|o| o.kind == ObjectKind::Item).collect();
        assert_eq!(items.len(), 5);
        let mut shapes: Vec<_> = items.iter().map(|o| o.shape).collect();
        shapes.sort();
        shapes.dedup();
        assert_eq!(shapes.len(), 5);
        let boxes: Vec<_> = ep.scene.objects.iter().filter(|o| o.kind == ObjectKind::Container).collect();
        assert_eq!(boxes.len(), 1);
        assert_eq!(boxes[0].color, NamedColor::Brown);
        let named: Vec<_> = items.iter().filter(|o| ep.instruction.contains(o.shape.name())).collect();
        assert_eq!(named.len(), 1);
        assert!(ep.scene.validate().is_ok());
    }

    #[test]
    fn generation_is_deterministic() {
        for t in ALL_TASKS {
            let spec = TaskSpec::new(t, Split::Unseen);
            assert_eq!(generate_episode(&spec, 11).unwrap(), generate_episode(&spec, 11).unwrap());
        }
    }

    #[test]
    fn pushing_shapes_template() {
        for seed in 0..20 {
            let ep = generate_episode(&TaskSpec::new(TaskName::PushingShapes, Split::Unseen), seed).unwrap();
            let w = instruction_words(&ep.instruction);
            assert_eq!(w.len(), 9, "{}", ep.instruction);
            assert_eq!((w[0], w[1], w[4], w[5], w[8]), ("push", "the", "into", "the", "square"));
            assert!(["left", "right"].contains(&w[6]));
        }
    }

    #[test]
    fn expert_policy_steps_then_reports_solved() {
        let ep = generate_episode(&TaskSpec::new(TaskName::PackingShapes, Split::Seen), 3).unwrap();
        assert_eq!(expert_policy(&ep, 0).unwrap(), ep.expert[0]);
        assert_eq!(score_success(&ep, &ep.scene), 0.0);
        let mut solved = ep.clone();
        solved.scene = ep.replay(1);
        assert_eq!(expert_policy(&solved, 0), Err(BenchError::AlreadySolved));
        assert_eq!(expert_policy(&ep, 1), Err(BenchError::StepOutOfRange(1)));
    }

    #[test]
    fn separating_piles_needs_at_most_ten_pushes() {
        for seed in 0..10 {
            let ep = generate_episode(&TaskSpec::new(TaskName::SeparatingPiles, Split::Seen), seed).unwrap();
            assert!(ep.expert.len() <= 10);
            assert_eq!(score_success(&ep, &ep.replay(ep.expert.len())), 1.0);
        }
    }

    #[test]
    fn split_discipline() {
        let lexicon = Lexicon::default_lexicon();
        for t in ALL_TASKS {
            for seed in 0..10 {
                let ep = generate_episode(&TaskSpec::new(t, Split::Unseen), seed).unwrap();
                for word in instruction_words(&ep.instruction) {
                    if lexicon.contains(word) {
                        assert!(Split::Unseen.allows_known_word(word), "{word} in {:?}", ep.instruction);
                    }
                }
            }
        }
    }
}
