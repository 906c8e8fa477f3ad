use std::collections::BTreeMap;

use super::affordance::{pick_affordance, place_maps, select_pick, select_place, Silhouette};
use super::kernels::{relation_kernel, weighted_centroid, RelationConfig, RelationKind};
use super::{ControlParams, ExecError, Pose2, PoseGrid, Primitive, DEFAULT_ROTATIONS};
use crate::dsl::{path_string, type_check, ConceptToken, ProgramNode, SemanticType};
use crate::grounding::{normalize, GroundingBackend, GroundingMap, Resolution};
use crate::world::{ObjectKind, Scene};

/// Everything evaluation depends on besides the program.
#[derive(Clone)]
pub struct ExecutionContext<'a> {
    pub scene: &'a Scene,
    pub backend: &'a dyn GroundingBackend,
    pub grid: PoseGrid,
    /// Resolution at which concepts are grounded.
    pub resolution: Resolution,
    pub relations: RelationConfig,
    /// Action words executed as pushes; all others are pick-and-place.
    pub push_actions: Vec<String>,
}

impl<'a> ExecutionContext<'a> {
    /// Pose grid at the scene raster with the default rotation count;
    /// grounding at half resolution.
    pub fn new(scene: &'a Scene, backend: &'a dyn GroundingBackend) -> Self {
        ExecutionContext {
            scene,
            backend,
            grid: PoseGrid::for_scene(scene, DEFAULT_ROTATIONS),
            resolution: Resolution::half_of(scene),
            relations: RelationConfig::default(),
            push_actions: vec!["push".to_string()],
        }
    }

    pub fn with_rotations(mut self, rotations: usize) -> Self {
        self.grid = PoseGrid::for_scene(self.scene, rotations);
        self
    }

    pub fn with_resolution(mut self, resolution: Resolution) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn primitive_for(&self, action: &ConceptToken) -> Primitive {
        if self.push_actions.iter().any(|a| a == action.word()) {
            Primitive::Push
        } else {
            Primitive::PickPlace
        }
    }
}

/// Chosen parameters of one goal together with the maps they maximize.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalPlan {
    pub params: ControlParams,
    pub pick_map: GroundingMap,
    /// Per-rotation place maps; for pushes, the single goal kernel whose
    /// weighted centroid is the push end point.
    pub place_maps: Vec<GroundingMap>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionResult {
    /// Parameters of the first step.
    pub params: ControlParams,
    /// All steps in execution order.
    pub steps: Vec<GoalPlan>,
    /// Grounding map of every object-typed node, keyed by node path.
    pub intermediates: BTreeMap<String, GroundingMap>,
}

impl ExecutionResult {
    pub fn plan(&self) -> Vec<ControlParams> {
        self.steps.iter().map(|s| s.params).collect()
    }

    pub fn pick_map(&self) -> &GroundingMap {
        &self.steps[0].pick_map
    }

    pub fn place_maps(&self) -> &[GroundingMap] {
        &self.steps[0].place_maps
    }
}

/// Evaluates a plan-typed program.
pub fn execute(program: &ProgramNode, ctx: &ExecutionContext) -> Result<ExecutionResult, ExecError> {
    let ty = type_check(program)?;
    if ty != SemanticType::Plan {
        return Err(ExecError::Type(crate::dsl::DslError::TypeMismatch {
            path: path_string(&[]),
            expected: SemanticType::Plan,
            found: ty,
        }));
    }
    let mut intermediates = BTreeMap::new();
    let mut steps = Vec::new();
    let mut path = Vec::new();
    eval_plan(program, ctx, &mut path, &mut intermediates, &mut steps)?;
    Ok(ExecutionResult {
        params: steps[0].params,
        steps,
        intermediates,
    })
}

fn eval_plan(
    node: &ProgramNode,
    ctx: &ExecutionContext,
    path: &mut Vec<usize>,
    intermediates: &mut BTreeMap<String, GroundingMap>,
    steps: &mut Vec<GoalPlan>,
) -> Result<(), ExecError> {
    match node {
        ProgramNode::ActionConcat(a, b) => {
            for (i, child) in [a, b].into_iter().enumerate() {
                path.push(i);
                eval_plan(child, ctx, path, intermediates, steps)?;
                path.pop();
            }
            Ok(())
        }
        ProgramNode::Do { goals, action } => {
            let primitive = ctx.primitive_for(action);
            for (i, goal) in goals.iter().enumerate() {
                let ProgramNode::Goal { object, reference, rel } = goal else {
                    unreachable!("type-checked goal slot");
                };
                path.push(i);
                path.push(0);
                let obj = eval_object(object, ctx, path, intermediates)?;
                let obj_path = path_string(path);
                path.pop();
                path.push(1);
                let reference_map = eval_object(reference, ctx, path, intermediates)?;
                let ref_path = path_string(path);
                path.pop();
                path.pop();
                steps.push(eval_goal(ctx, &obj, &reference_map, rel, primitive, (&obj_path, &ref_path))?);
            }
            Ok(())
        }
        _ => unreachable!("type-checked plan node"),
    }
}

/// Grounding map of an object-typed node at `ctx.resolution`; every
/// evaluated node is recorded in `intermediates`.
pub fn eval_object(
    node: &ProgramNode,
    ctx: &ExecutionContext,
    path: &mut Vec<usize>,
    intermediates: &mut BTreeMap<String, GroundingMap>,
) -> Result<GroundingMap, ExecError> {
    let res = ctx.resolution;
    let map = match node {
        ProgramNode::Scene => GroundingMap::ones(res.height, res.width),
        ProgramNode::Filter { child, prop } => {
            path.push(0);
            let c = eval_object(child, ctx, path, intermediates)?;
            path.pop();
            let g = ctx.backend.ground(ctx.scene, prop, res)?;
            c.intersect(&g)?
        }
        ProgramNode::Relate { target, reference, rel } => {
            path.push(0);
            let t = eval_object(target, ctx, path, intermediates)?;
            path.pop();
            path.push(1);
            let r = eval_object(reference, ctx, path, intermediates)?;
            path.pop();
            eval_relate(&t, &r, rel, &ctx.relations)?
        }
        ProgramNode::ObjUnion(a, b) => {
            path.push(0);
            let x = eval_object(a, ctx, path, intermediates)?;
            path.pop();
            path.push(1);
            let y = eval_object(b, ctx, path, intermediates)?;
            path.pop();
            x.union(&y)?
        }
        _ => unreachable!("type-checked object node"),
    };
    intermediates.insert(path_string(path), map.clone());
    Ok(map)
}

/// `normalize(target ∧ K(reference, rel))`.
pub fn eval_relate(
    target: &GroundingMap,
    reference: &GroundingMap,
    rel: &ConceptToken,
    relations: &RelationConfig,
) -> Result<GroundingMap, ExecError> {
    let kind = relations.classify(rel)?;
    let k = relation_kernel(reference, kind, relations, None);
    let (h, w) = target.dims();
    Ok(normalize(h, w, target.intersect(&k)?.values())?)
}

/// Index of the topmost item whose footprint contains workspace point
/// `(x, y)`.
pub fn topmost_item_at(scene: &Scene, x: f64, y: f64) -> Option<usize> {
    scene
        .objects
        .iter()
        .rposition(|o| o.kind == ObjectKind::Item && o.contains(x, y))
}

/// Pose-grid pixels covered by items other than `exclude`.
pub fn item_occupancy(scene: &Scene, grid: &PoseGrid, exclude: Option<usize>) -> Vec<bool> {
    let mut occ = vec![false; grid.height * grid.width];
    for (i, o) in scene.objects.iter().enumerate() {
        if o.kind != ObjectKind::Item || Some(i) == exclude {
            continue;
        }
        for p in o.footprint_pixels(scene, grid.height, grid.width) {
            occ[p] = true;
        }
    }
    occ
}

/// Turns one goal into control parameters. `paths` name the object and
/// reference nodes for error reporting.
pub fn eval_goal(
    ctx: &ExecutionContext,
    object: &GroundingMap,
    reference: &GroundingMap,
    rel: &ConceptToken,
    primitive: Primitive,
    paths: (&str, &str),
) -> Result<GoalPlan, ExecError> {
    let kind = ctx.relations.classify(rel)?;
    let grid = ctx.grid;
    let up_obj = object.resample(grid.height, grid.width);
    let up_ref = reference.resample(grid.height, grid.width);
    if up_ref.is_zero() {
        return Err(ExecError::EmptyGrounding(paths.1.to_string()));
    }
    let base = relation_kernel(&up_ref, kind, &ctx.relations, None);
    let pick_map = pick_affordance(&up_obj, Some(&base));
    let pick = select_pick(&pick_map, paths.0)?;
    let silhouette = Silhouette::extract(&up_obj, pick.u, pick.v);

    let kernel = if kind == RelationKind::Inside {
        let (px, py) = grid.pixel_center(ctx.scene, pick.u, pick.v);
        let occ = item_occupancy(ctx.scene, &grid, topmost_item_at(ctx.scene, px, py));
        let k = relation_kernel(&up_ref, kind, &ctx.relations, Some(&occ));
        if k.is_zero() {
            base
        } else {
            k
        }
    } else {
        base
    };

    let (place, place_maps, pick) = match primitive {
        Primitive::PickPlace => {
            let maps = place_maps(&up_ref, &kernel, &silhouette, &grid);
            (select_place(&maps)?, maps, pick)
        }
        Primitive::Push => {
            let (pr, pc) = weighted_centroid(&kernel).ok_or(ExecError::NoFeasiblePlace)?;
            let (cr, cc) = silhouette.centroid;
            let (dr, dc) = (pr - cr, pc - cc);
            let len = (dr * dr + dc * dc).sqrt();
            let back = if len > 1e-9 { silhouette.diameter() / 2.0 / len } else { 0.0 };
            let to_pixel = |r: f64, c: f64| {
                Pose2::new(
                    r.floor().clamp(0.0, (grid.height - 1) as f64) as usize,
                    c.floor().clamp(0.0, (grid.width - 1) as f64) as usize,
                    0,
                )
            };
            let pre = to_pixel(cr - back * dr, cc - back * dc);
            (to_pixel(pr, pc), vec![kernel], pre)
        }
    };
    Ok(GoalPlan {
        params: ControlParams {
            pick,
            place,
            primitive,
        },
        pick_map,
        place_maps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_program;
    use crate::grounding::OracleBackend;
    use crate::world::{apply_action, NamedColor, SceneObject, ShapeKind};

    fn packing_scene() -> Scene {
        let mut s = Scene::new(128, 64, 7);
        s.add(SceneObject::new(ObjectKind::Container, ShapeKind::Box, NamedColor::Brown, 96.0, 32.0, 0.0, 1.0));
        s.add(SceneObject::item(ShapeKind::Star, NamedColor::Red, 24.0, 20.0, 0.0));
        s.add(SceneObject::item(ShapeKind::Hexagon, NamedColor::Blue, 40.0, 44.0, 0.3));
        s
    }

    #[test]
    fn packing_moves_the_named_shape_into_the_box() {
        let scene = packing_scene();
        let program = parse_program("do(goal(filter(filter(scene(), shape), star), filter(scene(), box), into), pack)").unwrap();
        let backend = OracleBackend;
        let ctx = ExecutionContext::new(&scene, &backend);
        let result = execute(&program, &ctx).unwrap();
        assert_eq!(result.params.primitive, Primitive::PickPlace);
        assert_eq!(result.place_maps().len(), DEFAULT_ROTATIONS);
        assert!(result.intermediates.contains_key("0.0"));
        assert!(result.intermediates.contains_key("0.1"));
        let out = apply_action(&scene, &result.params, &ctx.grid);
        let star = out.scene.object(2).unwrap();
        let bx = out.scene.object(1).unwrap();
        assert!(bx.interior_contains(star.x, star.y), "star at ({}, {})", star.x, star.y);
        assert_eq!(out.scene.object(3), scene.object(3));
    }

    #[test]
    fn params_are_argmaxes_of_recorded_maps() {
        let scene = packing_scene();
        let program = parse_program("do(goal(filter(scene(), hexagon), filter(scene(), box), in), put)").unwrap();
        let backend = OracleBackend;
        let ctx = ExecutionContext::new(&scene, &backend).with_rotations(4);
        let r = execute(&program, &ctx).unwrap();
        let p = r.pick_map().argmax();
        assert_eq!((r.params.pick.u, r.params.pick.v), (p / 128, p % 128));
        let best = r.place_maps()[r.params.place.r].get(r.params.place.u, r.params.place.v);
        assert!(r.place_maps().iter().all(|m| m.max() <= best));
    }

    #[test]
    fn empty_object_reports_its_path() {
        let scene = packing_scene();
        let program = parse_program("do(goal(filter(scene(), flower), filter(scene(), box), into), pack)").unwrap();
        let backend = OracleBackend;
        let err = execute(&program, &ExecutionContext::new(&scene, &backend)).unwrap_err();
        assert_eq!(err, ExecError::EmptyGrounding("0.0".into()));
        let program = parse_program("do(goal(filter(scene(), star), filter(scene(), box), between), pack)").unwrap();
        let err = execute(&program, &ExecutionContext::new(&scene, &backend)).unwrap_err();
        assert_eq!(err, ExecError::UnknownRelation("between".into()));
    }

    #[test]
    fn relate_selects_the_left_object() {
        let scene = packing_scene();
        let backend = OracleBackend;
        let ctx = ExecutionContext::new(&scene, &backend);
        let program = parse_program("relate(filter(scene(), shape), filter(scene(), hexagon), left)").unwrap();
        let mut inter = BTreeMap::new();
        let m = eval_object(&program, &ctx, &mut vec![], &mut inter).unwrap();
        let (r, c) = (20 / 2, 24 / 2);
        assert_eq!(m.get(r, c), 1.0);
        assert_eq!(m.get(44 / 2, 40 / 2), 0.0);
        assert!(inter.contains_key("root"));
    }

    #[test]
    fn push_moves_block_into_zone() {
        let mut scene = Scene::new(128, 64, 1);
        let zone = scene.add(SceneObject::new(ObjectKind::Zone, ShapeKind::Zone, NamedColor::Green, 100.0, 32.0, 0.0, 1.0));
        let block = scene.add(SceneObject::item(ShapeKind::Block, NamedColor::Red, 30.0, 20.0, 0.0));
        let program = parse_program("do(goal(filter(scene(), block), filter(scene(), zone), into), push)").unwrap();
        let backend = OracleBackend;
        let ctx = ExecutionContext::new(&scene, &backend);
        let r = execute(&program, &ctx).unwrap();
        assert_eq!(r.params.primitive, Primitive::Push);
        let out = apply_action(&scene, &r.params, &ctx.grid);
        assert!(!out.noop);
        let b = out.scene.object(block).unwrap();
        assert!(out.scene.object(zone).unwrap().interior_contains(b.x, b.y));
    }

    #[test]
    fn concatenated_plans_yield_ordered_steps() {
        let scene = packing_scene();
        let backend = OracleBackend;
        let ctx = ExecutionContext::new(&scene, &backend).with_rotations(1);
        let program = parse_program(
            "actionconcat(do(goal(filter(scene(), star), filter(scene(), box), in), put), do(goal(filter(scene(), hexagon), filter(scene(), box), in), put))",
        )
        .unwrap();
        let r = execute(&program, &ctx).unwrap();
        assert_eq!(r.steps.len(), 2);
        let (x, y) = ctx.grid.pixel_center(&scene, r.steps[0].params.pick.u, r.steps[0].params.pick.v);
        assert_eq!(topmost_item_at(&scene, x, y), Some(1));
        assert!(r.intermediates.contains_key("1.0.0"));
        let object = parse_program("filter(scene(), star)").unwrap();
        assert!(matches!(execute(&object, &ctx), Err(ExecError::Type(_))));
    }
}
