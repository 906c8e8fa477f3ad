//! Parametric 2D footprints in object-local coordinates (x right, y down),
//! centred on the area centroid.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Base radius of an item shape at size 1.
pub const ITEM_RADIUS: f64 = 4.5;
pub const BLOCK_HALF: f64 = 2.5;
pub const BOX_HALF: f64 = 11.0;
pub const BOX_WALL: f64 = 2.0;
pub const BOWL_RADIUS: f64 = 6.0;
pub const BOWL_INTERIOR: f64 = 4.5;
pub const ZONE_HALF: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShapeKind {
    #[serde(rename = "hexagon")]
    Hexagon,
    #[serde(rename = "star")]
    Star,
    #[serde(rename = "ring")]
    Ring,
    #[serde(rename = "flower")]
    Flower,
    #[serde(rename = "diamond")]
    Diamond,
    #[serde(rename = "triangle")]
    Triangle,
    #[serde(rename = "square")]
    Square,
    #[serde(rename = "disc")]
    Disc,
    #[serde(rename = "letter-l")]
    LetterL,
    #[serde(rename = "letter-t")]
    LetterT,
    #[serde(rename = "block")]
    Block,
    #[serde(rename = "box")]
    Box,
    #[serde(rename = "bowl")]
    Bowl,
    #[serde(rename = "zone")]
    Zone,
}

/// The ten item shapes.
pub const ITEM_SHAPES: [ShapeKind; 10] = [
    ShapeKind::Hexagon,
    ShapeKind::Star,
    ShapeKind::Ring,
    ShapeKind::Flower,
    ShapeKind::Diamond,
    ShapeKind::Triangle,
    ShapeKind::Square,
    ShapeKind::Disc,
    ShapeKind::LetterL,
    ShapeKind::LetterT,
];

const ALL_SHAPES: [ShapeKind; 14] = [
    ShapeKind::Hexagon,
    ShapeKind::Star,
    ShapeKind::Ring,
    ShapeKind::Flower,
    ShapeKind::Diamond,
    ShapeKind::Triangle,
    ShapeKind::Square,
    ShapeKind::Disc,
    ShapeKind::LetterL,
    ShapeKind::LetterT,
    ShapeKind::Block,
    ShapeKind::Box,
    ShapeKind::Bowl,
    ShapeKind::Zone,
];

type Rect = (f64, f64, f64, f64);

// Disjoint rectangles (x0, y0, x1, y1) in units of the item radius, before
// centroid recentring.
const LETTER_L: [Rect; 2] = [(-0.6, -1.0, -0.1, 1.0), (-0.1, 0.5, 0.6, 1.0)];
const LETTER_T: [Rect; 2] = [(-0.8, -1.0, 0.8, -0.5), (-0.25, -0.5, 0.25, 1.0)];

fn rect_centroid(rects: &[Rect]) -> (f64, f64) {
    let (mut a, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for &(x0, y0, x1, y1) in rects {
        let area = (x1 - x0) * (y1 - y0);
        a += area;
        sx += area * (x0 + x1) / 2.0;
        sy += area * (y0 + y1) / 2.0;
    }
    (sx / a, sy / a)
}

fn regular_polygon(n: usize, radius: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let t = -PI / 2.0 + 2.0 * PI * k as f64 / n as f64;
            (radius * t.cos(), radius * t.sin())
        })
        .collect()
}

fn point_in_polygon(poly: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

impl ShapeKind {
    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Hexagon => "hexagon",
            ShapeKind::Star => "star",
            ShapeKind::Ring => "ring",
            ShapeKind::Flower => "flower",
            ShapeKind::Diamond => "diamond",
            ShapeKind::Triangle => "triangle",
            ShapeKind::Square => "square",
            ShapeKind::Disc => "disc",
            ShapeKind::LetterL => "letter-l",
            ShapeKind::LetterT => "letter-t",
            ShapeKind::Block => "block",
            ShapeKind::Box => "box",
            ShapeKind::Bowl => "bowl",
            ShapeKind::Zone => "zone",
        }
    }

    pub fn is_item_shape(self) -> bool {
        ITEM_SHAPES.contains(&self)
    }

    pub fn is_container(self) -> bool {
        matches!(self, ShapeKind::Box | ShapeKind::Bowl)
    }

    /// Polygon vertices for polygonal shapes.
    fn polygon(self, size: f64) -> Option<Vec<(f64, f64)>> {
        let r = ITEM_RADIUS * size;
        Some(match self {
            ShapeKind::Hexagon => regular_polygon(6, r),
            ShapeKind::Triangle => regular_polygon(3, r),
            ShapeKind::Star => (0..10)
                .map(|k| {
                    let t = -PI / 2.0 + PI * k as f64 / 5.0;
                    let rr = if k % 2 == 0 { r } else { 0.45 * r };
                    (rr * t.cos(), rr * t.sin())
                })
                .collect(),
            ShapeKind::Diamond => vec![(0.0, -r), (0.65 * r, 0.0), (0.0, r), (-0.65 * r, 0.0)],
            ShapeKind::Square => square(0.75 * r),
            ShapeKind::Block => square(BLOCK_HALF * size),
            ShapeKind::Box => square(BOX_HALF * size),
            ShapeKind::Zone => square(ZONE_HALF * size),
            _ => return None,
        })
    }

    fn rects(self) -> Option<&'static [Rect]> {
        match self {
            ShapeKind::LetterL => Some(&LETTER_L),
            ShapeKind::LetterT => Some(&LETTER_T),
            _ => None,
        }
    }

    /// Whether the local point lies on the footprint.
    pub fn contains(self, size: f64, x: f64, y: f64) -> bool {
        let r = ITEM_RADIUS * size;
        match self {
            ShapeKind::Disc => x * x + y * y <= r * r,
            ShapeKind::Ring => {
                let d2 = x * x + y * y;
                d2 <= r * r && d2 >= (0.55 * r).powi(2)
            }
            ShapeKind::Flower => {
                let d = (x * x + y * y).sqrt();
                d <= r * (0.65 + 0.35 * (5.0 * y.atan2(x)).cos())
            }
            ShapeKind::Bowl => x * x + y * y <= (BOWL_RADIUS * size).powi(2),
            ShapeKind::Box | ShapeKind::Zone | ShapeKind::Square | ShapeKind::Block => {
                let h = match self {
                    ShapeKind::Box => BOX_HALF * size,
                    ShapeKind::Zone => ZONE_HALF * size,
                    ShapeKind::Square => 0.75 * r,
                    _ => BLOCK_HALF * size,
                };
                x.abs() <= h && y.abs() <= h
            }
            ShapeKind::LetterL | ShapeKind::LetterT => {
                let rects = self.rects().expect("letter");
                let (cx, cy) = rect_centroid(rects);
                let (ux, uy) = (x / r + cx, y / r + cy);
                rects
                    .iter()
                    .any(|&(x0, y0, x1, y1)| ux >= x0 && ux <= x1 && uy >= y0 && uy <= y1)
            }
            _ => point_in_polygon(&self.polygon(size).expect("polygonal"), x, y),
        }
    }

    /// Whether the local point lies in the region that counts as "inside":
    /// the floor of a box or bowl, the whole square of a zone. Other shapes
    /// have no interior.
    pub fn interior_contains(self, size: f64, x: f64, y: f64) -> bool {
        match self {
            ShapeKind::Box => {
                let h = (BOX_HALF - BOX_WALL) * size;
                x.abs() < h && y.abs() < h
            }
            ShapeKind::Bowl => x * x + y * y < (BOWL_INTERIOR * size).powi(2),
            ShapeKind::Zone => self.contains(size, x, y),
            _ => false,
        }
    }

    /// Largest distance from the centre to any footprint point.
    pub fn bounding_radius(self, size: f64) -> f64 {
        match self {
            ShapeKind::Disc | ShapeKind::Ring | ShapeKind::Flower => ITEM_RADIUS * size,
            ShapeKind::Bowl => BOWL_RADIUS * size,
            _ => self
                .outline(size)
                .iter()
                .map(|(x, y)| (x * x + y * y).sqrt())
                .fold(0.0, f64::max),
        }
    }

    /// Radius of the largest centred disc that fits in the interior.
    pub fn interior_radius(self, size: f64) -> f64 {
        match self {
            ShapeKind::Box => (BOX_HALF - BOX_WALL) * size,
            ShapeKind::Bowl => BOWL_INTERIOR * size,
            ShapeKind::Zone => ZONE_HALF * size,
            _ => 0.0,
        }
    }

    /// Corner points of non-radial footprints, centroid-relative.
    fn outline(self, size: f64) -> Vec<(f64, f64)> {
        if let Some(rects) = self.rects() {
            let r = ITEM_RADIUS * size;
            let (cx, cy) = rect_centroid(rects);
            return rects
                .iter()
                .flat_map(|&(x0, y0, x1, y1)| [(x0, y0), (x1, y0), (x0, y1), (x1, y1)])
                .map(|(x, y)| ((x - cx) * r, (y - cy) * r))
                .collect();
        }
        self.polygon(size).unwrap_or_default()
    }

    /// Half extents of the axis-aligned bounding box after rotating by
    /// `angle`.
    pub fn extent(self, size: f64, angle: f64) -> (f64, f64) {
        let outline = self.outline(size);
        if outline.is_empty() {
            let r = self.bounding_radius(size);
            return (r, r);
        }
        let (s, c) = angle.sin_cos();
        outline.iter().fold((0.0, 0.0), |(ex, ey), &(x, y)| {
            let (rx, ry) = (c * x - s * y, s * x + c * y);
            (f64::max(ex, rx.abs()), f64::max(ey, ry.abs()))
        })
    }
}

fn square(h: f64) -> Vec<(f64, f64)> {
    vec![(-h, -h), (h, -h), (h, h), (-h, h)]
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_SHAPES
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown shape {s:?}"))
    }
}
