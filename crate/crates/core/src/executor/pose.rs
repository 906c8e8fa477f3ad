use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::world::Scene;

/// Discrete SE(2) pose set: every pixel of an `height×width` grid over the
/// workspace, at `rotations` evenly spaced angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PoseGrid {
    pub height: usize,
    pub width: usize,
    pub rotations: usize,
}

pub const DEFAULT_ROTATIONS: usize = 12;

impl PoseGrid {
    pub fn new(height: usize, width: usize, rotations: usize) -> Self {
        assert!(height > 0 && width > 0 && rotations > 0, "pose grid dimensions must be positive");
        PoseGrid {
            height,
            width,
            rotations,
        }
    }

    /// The scene raster at `rotations` angles.
    pub fn for_scene(scene: &Scene, rotations: usize) -> Self {
        Self::new(scene.height as usize, scene.width as usize, rotations)
    }

    /// `θ_r = 2πr/R`.
    pub fn angle(&self, r: usize) -> f64 {
        2.0 * PI * r as f64 / self.rotations as f64
    }

    pub fn contains(&self, pose: Pose2) -> bool {
        pose.u < self.height && pose.v < self.width && pose.r < self.rotations
    }

    /// Workspace coordinates of the centre of pixel `(u, v)`.
    pub fn pixel_center(&self, scene: &Scene, u: usize, v: usize) -> (f64, f64) {
        (
            (v as f64 + 0.5) * scene.width as f64 / self.width as f64,
            (u as f64 + 0.5) * scene.height as f64 / self.height as f64,
        )
    }

    /// The pixel containing workspace point `(x, y)`, clamped to the grid.
    pub fn pixel_of(&self, scene: &Scene, x: f64, y: f64) -> (usize, usize) {
        let v = (x * self.width as f64 / scene.width as f64).floor();
        let u = (y * self.height as f64 / scene.height as f64).floor();
        (
            u.clamp(0.0, (self.height - 1) as f64) as usize,
            v.clamp(0.0, (self.width - 1) as f64) as usize,
        )
    }
}

/// Grid pose: row `u`, column `v`, rotation index `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pose2 {
    pub u: usize,
    pub v: usize,
    pub r: usize,
}

impl Pose2 {
    pub fn new(u: usize, v: usize, r: usize) -> Self {
        Pose2 { u, v, r }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primitive {
    PickPlace,
    Push,
}

/// One action: pick and place poses, or pre- and post-push poses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ControlParams {
    pub pick: Pose2,
    pub place: Pose2,
    pub primitive: Primitive,
}
