use std::collections::BTreeMap;
use std::path::Path;

use super::scene::{ObjectKind, Scene, BACKGROUND_RGB};
use super::WorldError;
use crate::grounding::FeatureMap;

pub const CONTAINER_HEIGHT: f64 = 0.05;
pub const ITEM_HEIGHT_PER_SIZE: f64 = 0.02;

/// Top-down raster: color, height and object-id channels, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedScene {
    pub height: usize,
    pub width: usize,
    pub rgb: Vec<[u8; 3]>,
    pub depth: Vec<f64>,
    /// Object id of the topmost footprint, 0 for background.
    pub segmentation: Vec<u32>,
}

/// Rasterizes `scene` at one pixel per workspace unit in painter's order.
pub fn render(scene: &Scene) -> Result<RenderedScene, WorldError> {
    scene.validate()?;
    let (h, w) = (scene.height as usize, scene.width as usize);
    let mut out = RenderedScene {
        height: h,
        width: w,
        rgb: vec![BACKGROUND_RGB; h * w],
        depth: vec![0.0; h * w],
        segmentation: vec![0; h * w],
    };
    for obj in scene.painter_order() {
        let z = match obj.kind {
            ObjectKind::Zone => 0.0,
            ObjectKind::Container => CONTAINER_HEIGHT,
            ObjectKind::Item => ITEM_HEIGHT_PER_SIZE * obj.size,
        };
        let rgb = obj.color.rgb();
        for p in obj.footprint_pixels(scene, h, w) {
            out.rgb[p] = rgb;
            out.depth[p] = z;
            out.segmentation[p] = obj.id;
        }
    }
    Ok(out)
}

impl RenderedScene {
    /// Indicator features of the segmented object's attributes (positional
    /// words included) over `vocabulary`; background pixels are zero.
    pub fn features(&self, scene: &Scene, vocabulary: &[String]) -> FeatureMap {
        let index: BTreeMap<&str, usize> = vocabulary.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        let dim = vocabulary.len().max(1);
        let per_object: BTreeMap<u32, Vec<usize>> = scene
            .objects
            .iter()
            .map(|o| {
                let idx = scene
                    .effective_attributes(o)
                    .iter()
                    .filter_map(|a| index.get(a.as_str()).copied())
                    .collect();
                (o.id, idx)
            })
            .collect();
        let mut values = vec![0.0; self.height * self.width * dim];
        for (p, id) in self.segmentation.iter().enumerate() {
            if let Some(idx) = per_object.get(id) {
                for &a in idx {
                    values[p * dim + a] = 1.0;
                }
            }
        }
        FeatureMap::new(self.height, self.width, dim, values).expect("consistent feature dims")
    }

    /// Binary PPM (P6) of the color channels.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        for px in &self.rgb {
            out.extend_from_slice(px);
        }
        out
    }

    /// Height channel as PGM, full scale at the container height.
    pub fn depth_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(
            self.depth
                .iter()
                .map(|&z| ((z / CONTAINER_HEIGHT).clamp(0.0, 1.0) * 255.0).round() as u8),
        );
        out
    }

    /// Segmentation as PGM with ids spread evenly over the gray levels.
    pub fn segmentation_pgm(&self) -> Vec<u8> {
        let max_id = self.segmentation.iter().copied().max().unwrap_or(0).max(1) as f64;
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(
            self.segmentation
                .iter()
                .map(|&id| (id as f64 * 255.0 / max_id).round() as u8),
        );
        out
    }

    pub fn write_ppm(&self, path: &Path) -> Result<(), WorldError> {
        std::fs::write(path, self.to_ppm()).map_err(|e| WorldError::Io(format!("{}: {e}", path.display())))
    }
}
