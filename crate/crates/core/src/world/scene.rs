use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::shapes::{ShapeKind, ITEM_SHAPES};
use super::WorldError;
use crate::grounding::{GroundingMap, Resolution};

pub const DEFAULT_WIDTH: u32 = 128;
pub const DEFAULT_HEIGHT: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedColor {
    Red,
    Green,
    Blue,
    Yellow,
    Orange,
    Gray,
    Purple,
    Pink,
    White,
    Cyan,
    Brown,
}

pub const ALL_COLORS: [NamedColor; 11] = [
    NamedColor::Red,
    NamedColor::Green,
    NamedColor::Blue,
    NamedColor::Yellow,
    NamedColor::Orange,
    NamedColor::Gray,
    NamedColor::Purple,
    NamedColor::Pink,
    NamedColor::White,
    NamedColor::Cyan,
    NamedColor::Brown,
];

pub const BACKGROUND_RGB: [u8; 3] = [40, 40, 40];

impl NamedColor {
    pub fn name(self) -> &'static str {
        match self {
            NamedColor::Red => "red",
            NamedColor::Green => "green",
            NamedColor::Blue => "blue",
            NamedColor::Yellow => "yellow",
            NamedColor::Orange => "orange",
            NamedColor::Gray => "gray",
            NamedColor::Purple => "purple",
            NamedColor::Pink => "pink",
            NamedColor::White => "white",
            NamedColor::Cyan => "cyan",
            NamedColor::Brown => "brown",
        }
    }

    pub fn rgb(self) -> [u8; 3] {
        match self {
            NamedColor::Red => [230, 60, 60],
            NamedColor::Green => [60, 180, 75],
            NamedColor::Blue => [50, 100, 220],
            NamedColor::Yellow => [240, 220, 50],
            NamedColor::Orange => [245, 130, 48],
            NamedColor::Gray => [128, 128, 128],
            NamedColor::Purple => [145, 30, 180],
            NamedColor::Pink => [250, 160, 200],
            NamedColor::White => [250, 250, 250],
            NamedColor::Cyan => [70, 210, 230],
            NamedColor::Brown => [140, 90, 45],
        }
    }
}

impl fmt::Display for NamedColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedColor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_COLORS
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown color {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    Zone,
    Container,
    Item,
}

impl ObjectKind {
    /// Painter's-order layer: zones first, items last.
    pub fn layer(self) -> u8 {
        match self {
            ObjectKind::Zone => 0,
            ObjectKind::Container => 1,
            ObjectKind::Item => 2,
        }
    }
}

/// Words derived from position rather than stored: `left`/`right` by the
/// vertical midline, `back`/`front` by the horizontal one (front is the
/// larger row).
pub const POSITIONAL_ATTRIBUTES: [&str; 4] = ["left", "right", "front", "back"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    /// Nonzero; 0 is the background label.
    pub id: u32,
    pub kind: ObjectKind,
    pub shape: ShapeKind,
    pub color: NamedColor,
    pub attributes: BTreeSet<String>,
    /// Centroid in workspace units; x grows rightward, y downward.
    pub x: f64,
    pub y: f64,
    /// Radians, counterclockwise on screen with y down.
    pub angle: f64,
    pub size: f64,
}

impl SceneObject {
    /// An object with its default attributes: the shape and color names plus
    /// a category word (`shape` for item shapes, `container` for boxes and
    /// bowls, `square` for zones).
    pub fn new(kind: ObjectKind, shape: ShapeKind, color: NamedColor, x: f64, y: f64, angle: f64, size: f64) -> Self {
        let mut attributes = BTreeSet::from([shape.name().to_string(), color.name().to_string()]);
        if shape.is_item_shape() {
            attributes.insert("shape".into());
        }
        if shape.is_container() {
            attributes.insert("container".into());
        }
        if shape == ShapeKind::Zone {
            attributes.insert("square".into());
        }
        SceneObject {
            id: 0,
            kind,
            shape,
            color,
            attributes,
            x,
            y,
            angle,
            size,
        }
    }

    pub fn item(shape: ShapeKind, color: NamedColor, x: f64, y: f64, angle: f64) -> Self {
        Self::new(ObjectKind::Item, shape, color, x, y, angle, 1.0)
    }

    /// World point → object-local coordinates.
    pub fn to_local(&self, wx: f64, wy: f64) -> (f64, f64) {
        let (dx, dy) = (wx - self.x, wy - self.y);
        let (s, c) = self.angle.sin_cos();
        (c * dx + s * dy, -s * dx + c * dy)
    }

    pub fn contains(&self, wx: f64, wy: f64) -> bool {
        let (lx, ly) = self.to_local(wx, wy);
        self.shape.contains(self.size, lx, ly)
    }

    pub fn interior_contains(&self, wx: f64, wy: f64) -> bool {
        let (lx, ly) = self.to_local(wx, wy);
        self.shape.interior_contains(self.size, lx, ly)
    }

    pub fn extent(&self) -> (f64, f64) {
        self.shape.extent(self.size, self.angle)
    }

    pub fn bounding_radius(&self) -> f64 {
        self.shape.bounding_radius(self.size)
    }

    /// Row-major indices of the pixels of an `h×w` raster over the workspace
    /// whose centres fall on the footprint.
    pub fn footprint_pixels(&self, scene: &Scene, h: usize, w: usize) -> Vec<usize> {
        let sx = scene.width as f64 / w as f64;
        let sy = scene.height as f64 / h as f64;
        let (ex, ey) = self.extent();
        let c0 = (((self.x - ex) / sx - 0.5).floor().max(0.0)) as usize;
        let c1 = (((self.x + ex) / sx - 0.5).ceil().max(0.0) as usize).min(w.saturating_sub(1));
        let r0 = (((self.y - ey) / sy - 0.5).floor().max(0.0)) as usize;
        let r1 = (((self.y + ey) / sy - 0.5).ceil().max(0.0) as usize).min(h.saturating_sub(1));
        let mut out = Vec::new();
        for r in r0..=r1 {
            for c in c0..=c1 {
                if self.contains((c as f64 + 0.5) * sx, (r as f64 + 0.5) * sy) {
                    out.push(r * w + c);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub width: u32,
    pub height: u32,
    pub seed: u64,
    pub objects: Vec<SceneObject>,
}

impl Scene {
    pub fn new(width: u32, height: u32, seed: u64) -> Self {
        Scene {
            width,
            height,
            seed,
            objects: Vec::new(),
        }
    }

    /// Adds `obj` with the next free id and returns the id.
    pub fn add(&mut self, mut obj: SceneObject) -> u32 {
        let id = self.objects.iter().map(|o| o.id).max().unwrap_or(0) + 1;
        obj.id = id;
        self.objects.push(obj);
        id
    }

    pub fn object(&self, id: u32) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn object_mut(&mut self, id: u32) -> Option<&mut SceneObject> {
        self.objects.iter_mut().find(|o| o.id == id)
    }

    /// Objects in painter's order: zones, containers, items, each in
    /// insertion order.
    pub fn painter_order(&self) -> Vec<&SceneObject> {
        let mut objs: Vec<&SceneObject> = self.objects.iter().collect();
        objs.sort_by_key(|o| o.kind.layer());
        objs
    }

    /// Stored attributes plus the positional words that hold for the
    /// object's current centroid.
    pub fn effective_attributes(&self, obj: &SceneObject) -> BTreeSet<String> {
        let mut attrs = obj.attributes.clone();
        let (mx, my) = (self.width as f64 / 2.0, self.height as f64 / 2.0);
        if obj.x < mx {
            attrs.insert("left".into());
        } else if obj.x > mx {
            attrs.insert("right".into());
        }
        if obj.y < my {
            attrs.insert("back".into());
        } else if obj.y > my {
            attrs.insert("front".into());
        }
        attrs
    }

    pub fn in_bounds(&self, obj: &SceneObject) -> bool {
        let (ex, ey) = obj.extent();
        let eps = 1e-9;
        obj.x - ex >= -eps
            && obj.x + ex <= self.width as f64 + eps
            && obj.y - ey >= -eps
            && obj.y + ey <= self.height as f64 + eps
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        if self.width == 0 || self.height == 0 {
            return Err(WorldError::InvalidScene("workspace must be nonempty".into()));
        }
        let mut ids = HashSet::new();
        for o in &self.objects {
            if o.id == 0 || !ids.insert(o.id) {
                return Err(WorldError::InvalidScene(format!("duplicate or zero id {}", o.id)));
            }
            if !(o.size.is_finite() && o.size > 0.0 && o.x.is_finite() && o.y.is_finite() && o.angle.is_finite()) {
                return Err(WorldError::InvalidScene(format!("object {} has a non-finite or empty pose", o.id)));
            }
            if !o.attributes.contains(o.shape.name()) || !o.attributes.contains(o.color.name()) {
                return Err(WorldError::InvalidScene(format!(
                    "object {} must carry its shape and color names as attributes",
                    o.id
                )));
            }
            if !self.in_bounds(o) {
                return Err(WorldError::OutOfBounds(o.id));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, WorldError> {
        let scene: Scene = serde_json::from_str(text).map_err(|e| WorldError::Json(e.to_string()))?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Self, WorldError> {
        let text = std::fs::read_to_string(path).map_err(|e| WorldError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), WorldError> {
        std::fs::write(path, self.to_json()).map_err(|e| WorldError::Io(format!("{}: {e}", path.display())))
    }
}

/// Every word any generated object can carry: colors, shapes, category
/// words and positional words, sorted.
pub fn attribute_vocabulary() -> Vec<String> {
    let mut v: BTreeSet<String> = ALL_COLORS.iter().map(|c| c.name().to_string()).collect();
    v.extend(ITEM_SHAPES.iter().map(|s| s.name().to_string()));
    for w in ["shape", "block", "box", "bowl", "container", "zone", "square"] {
        v.insert(w.to_string());
    }
    v.extend(POSITIONAL_ATTRIBUTES.iter().map(|s| s.to_string()));
    v.into_iter().collect()
}

/// Union of the footprints of objects whose effective attributes include
/// all of `predicate`, at resolution `res`.
pub fn ground_truth_mask(scene: &Scene, predicate: &BTreeSet<String>, res: Resolution) -> GroundingMap {
    let mut mask = vec![false; res.height * res.width];
    for obj in &scene.objects {
        if predicate.is_subset(&scene.effective_attributes(obj)) {
            for p in obj.footprint_pixels(scene, res.height, res.width) {
                mask[p] = true;
            }
        }
    }
    GroundingMap::from_mask(res.height, res.width, &mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon_scene() -> Scene {
        let mut s = Scene::new(DEFAULT_WIDTH, DEFAULT_HEIGHT, 0);
        s.add(SceneObject::item(ShapeKind::Hexagon, NamedColor::Blue, 30.0, 32.0, 0.0));
        s.add(SceneObject::new(ObjectKind::Container, ShapeKind::Box, NamedColor::Orange, 90.0, 32.0, 0.0, 1.0));
        s
    }

    #[test]
    fn default_attributes() {
        let s = hexagon_scene();
        let hex = &s.objects[0];
        assert_eq!(hex.id, 1);
        let a: Vec<String> = s.effective_attributes(hex).into_iter().collect();
        assert_eq!(a, ["blue", "hexagon", "left", "shape"]);
        assert!(s.objects[1].attributes.contains("container"));
    }

    #[test]
    fn json_round_trip() {
        let s = hexagon_scene();
        let back = Scene::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(s.to_json().contains("\"kind\": \"container\""));
    }

    #[test]
    fn validation_catches_bad_scenes() {
        let mut s = hexagon_scene();
        s.objects[0].x = 1.0;
        assert_eq!(s.validate(), Err(WorldError::OutOfBounds(1)));
        let mut s = hexagon_scene();
        s.objects[1].id = 1;
        assert!(s.validate().is_err());
    }

    #[test]
    fn masks_by_predicate() {
        let s = hexagon_scene();
        let res = Resolution::new(32, 64);
        let hex = ground_truth_mask(&s, &BTreeSet::from(["hexagon".to_string()]), res);
        let footprint = s.objects[0].footprint_pixels(&s, 32, 64);
        assert_eq!(hex.values().iter().filter(|&&v| v == 1.0).count(), footprint.len());
        let none = ground_truth_mask(&s, &BTreeSet::from(["blue".to_string(), "box".to_string()]), res);
        assert!(none.is_zero());
        let all = ground_truth_mask(&s, &BTreeSet::new(), res);
        let both = footprint.len() + s.objects[1].footprint_pixels(&s, 32, 64).len();
        assert_eq!(all.values().iter().filter(|&&v| v == 1.0).count(), both);
    }

    #[test]
    fn vocabulary_is_sorted_and_complete() {
        let v = attribute_vocabulary();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        for w in ["brown", "letter-l", "square", "left", "container"] {
            assert!(v.iter().any(|x| x == w));
        }
    }
}
