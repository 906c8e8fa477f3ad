use super::scene::{ObjectKind, Scene};
use super::shapes::{ShapeKind, BOWL_RADIUS, BOX_HALF};
use crate::executor::{ControlParams, PoseGrid, Primitive};

/// Push corridor half-width in workspace units.
pub const DEFAULT_PUSH_HALF_WIDTH: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ActionOutcome {
    pub scene: Scene,
    /// Set when nothing moved (missed grasp, empty corridor).
    pub noop: bool,
    pub moved: Vec<u32>,
}

/// Dispatches on `params.primitive`.
pub fn apply_action(scene: &Scene, params: &ControlParams, grid: &PoseGrid) -> ActionOutcome {
    match params.primitive {
        Primitive::PickPlace => apply_pick_place(scene, params, grid),
        Primitive::Push => apply_push(scene, params, grid, DEFAULT_PUSH_HALF_WIDTH),
    }
}

/// Moves the topmost item under the pick pixel centre to the place pixel
/// centre and rotates it by the place angle, then settles it clear of
/// container walls and inside the workspace.
pub fn apply_pick_place(scene: &Scene, params: &ControlParams, grid: &PoseGrid) -> ActionOutcome {
    let (px, py) = grid.pixel_center(scene, params.pick.u, params.pick.v);
    let picked = scene
        .objects
        .iter()
        .rposition(|o| o.kind == ObjectKind::Item && o.contains(px, py));
    let Some(idx) = picked else {
        return ActionOutcome {
            scene: scene.clone(),
            noop: true,
            moved: vec![],
        };
    };
    let mut next = scene.clone();
    let (qx, qy) = grid.pixel_center(scene, params.place.u, params.place.v);
    let obj = &mut next.objects[idx];
    obj.x = qx;
    obj.y = qy;
    obj.angle += grid.angle(params.place.r);
    let id = obj.id;
    settle(&mut next, idx);
    ActionOutcome {
        scene: next,
        noop: false,
        moved: vec![id],
    }
}

/// Sweeps the segment from the pre-push to the post-push pixel centre. Items
/// whose centroid lies within `half_width` of the segment (and between its
/// ends) slide along it to the post-push end, keeping their lateral offset.
pub fn apply_push(scene: &Scene, params: &ControlParams, grid: &PoseGrid, half_width: f64) -> ActionOutcome {
    let (ax, ay) = grid.pixel_center(scene, params.pick.u, params.pick.v);
    let (bx, by) = grid.pixel_center(scene, params.place.u, params.place.v);
    let len = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
    let mut next = scene.clone();
    let mut moved = Vec::new();
    if len > 1e-9 {
        let (ux, uy) = ((bx - ax) / len, (by - ay) / len);
        let (nx, ny) = (-uy, ux);
        for idx in 0..next.objects.len() {
            let o = &next.objects[idx];
            if o.kind != ObjectKind::Item {
                continue;
            }
            let (dx, dy) = (o.x - ax, o.y - ay);
            let t = dx * ux + dy * uy;
            let lateral = dx * nx + dy * ny;
            if lateral.abs() <= half_width && (0.0..=len).contains(&t) {
                let o = &mut next.objects[idx];
                o.x = ax + len * ux + lateral * nx;
                o.y = ay + len * uy + lateral * ny;
                moved.push(o.id);
                settle(&mut next, idx);
            }
        }
    }
    ActionOutcome {
        scene: next,
        noop: moved.is_empty(),
        moved,
    }
}

/// Resolves wall overlap for the item at `idx`: a centroid on a container's
/// footprint is pulled into its interior, a centroid just outside is pushed
/// clear of the wall. Finally the item is clamped into the workspace.
pub fn settle(scene: &mut Scene, idx: usize) {
    let item_r = scene.objects[idx].bounding_radius();
    let containers: Vec<usize> = (0..scene.objects.len())
        .filter(|&i| i != idx && scene.objects[i].kind == ObjectKind::Container)
        .collect();
    for ci in containers {
        let c = scene.objects[ci].clone();
        let (x, y) = (scene.objects[idx].x, scene.objects[idx].y);
        let (lx, ly) = c.to_local(x, y);
        let (nlx, nly) = match c.shape {
            ShapeKind::Box => {
                let half = BOX_HALF * c.size;
                if lx.abs() <= half && ly.abs() <= half {
                    let lim = (c.shape.interior_radius(c.size) - item_r).max(0.0);
                    (lx.clamp(-lim, lim), ly.clamp(-lim, lim))
                } else if lx.abs() < half + item_r && ly.abs() < half + item_r {
                    if lx.abs() >= ly.abs() {
                        ((half + item_r).copysign(lx), ly)
                    } else {
                        (lx, (half + item_r).copysign(ly))
                    }
                } else {
                    continue;
                }
            }
            ShapeKind::Bowl => {
                let outer = BOWL_RADIUS * c.size;
                let d = (lx * lx + ly * ly).sqrt();
                let target = if d <= outer {
                    d.min((c.shape.interior_radius(c.size) - item_r).max(0.0))
                } else if d < outer + item_r {
                    outer + item_r
                } else {
                    continue;
                };
                if d < 1e-12 {
                    (lx, ly)
                } else {
                    (lx * target / d, ly * target / d)
                }
            }
            _ => continue,
        };
        let (s, cth) = c.angle.sin_cos();
        let o = &mut scene.objects[idx];
        o.x = c.x + cth * nlx - s * nly;
        o.y = c.y + s * nlx + cth * nly;
    }
    let (w, h) = (scene.width as f64, scene.height as f64);
    let o = &mut scene.objects[idx];
    let (ex, ey) = o.extent();
    o.x = o.x.clamp(ex.min(w / 2.0), (w - ex).max(w / 2.0));
    o.y = o.y.clamp(ey.min(h / 2.0), (h - ey).max(h / 2.0));
}

#[cfg(test)]
mod tests {
    use super::super::scene::{NamedColor, SceneObject};
    use super::*;
    use crate::executor::Pose2;

    fn grid() -> PoseGrid {
        PoseGrid::new(64, 128, 12)
    }

    fn pp(pick: (usize, usize), place: (usize, usize, usize)) -> ControlParams {
        ControlParams {
            pick: Pose2::new(pick.0, pick.1, 0),
            place: Pose2::new(place.0, place.1, place.2),
            primitive: Primitive::PickPlace,
        }
    }

    fn scene() -> Scene {
        let mut s = Scene::new(128, 64, 0);
        s.add(SceneObject::new(ObjectKind::Container, ShapeKind::Box, NamedColor::Orange, 90.5, 32.5, 0.0, 1.0));
        s.add(SceneObject::item(ShapeKind::Hexagon, NamedColor::Blue, 30.5, 32.5, 0.0));
        s
    }

    #[test]
    fn pick_place_moves_item_into_box() {
        let out = apply_pick_place(&scene(), &pp((32, 30), (32, 90, 3)), &grid());
        assert!(!out.noop);
        let hex = out.scene.object(2).unwrap();
        assert_eq!((hex.x, hex.y), (90.5, 32.5));
        assert!((hex.angle - 2.0 * std::f64::consts::PI * 3.0 / 12.0).abs() < 1e-15);
        assert!(out.scene.object(1).unwrap().interior_contains(hex.x, hex.y));
    }

    #[test]
    fn pick_on_background_is_noop() {
        let s = scene();
        let out = apply_pick_place(&s, &pp((5, 5), (32, 90, 0)), &grid());
        assert!(out.noop);
        assert_eq!(out.scene, s);
    }

    #[test]
    fn placement_on_wall_is_pulled_inside() {
        let out = apply_pick_place(&scene(), &pp((32, 30), (32, 80, 0)), &grid());
        let hex = out.scene.object(2).unwrap();
        assert!((hex.x - (90.5 - 9.0 + 4.5)).abs() < 1e-9, "x = {}", hex.x);
    }

    #[test]
    fn push_translates_corridor_items() {
        let mut s = Scene::new(128, 64, 0);
        let a = s.add(SceneObject::item(ShapeKind::Block, NamedColor::Red, 20.5, 30.5, 0.0));
        let b = s.add(SceneObject::item(ShapeKind::Block, NamedColor::Red, 20.5, 50.5, 0.0));
        let params = ControlParams {
            pick: Pose2::new(30, 15, 0),
            place: Pose2::new(30, 25, 0),
            primitive: Primitive::Push,
        };
        let out = apply_push(&s, &params, &grid(), 4.0);
        assert_eq!(out.moved, vec![a]);
        assert_eq!(out.scene.object(a).unwrap().x, 25.5);
        assert_eq!(out.scene.object(b).unwrap(), s.object(b).unwrap());
        assert_eq!(out.scene.objects.len(), s.objects.len());
    }
}
