//! Kinematic top-down tabletop: parametric shapes, containers and zones,
//! rasterization, and pick-place / push actions.

mod actions;
mod render;
mod scene;
mod shapes;

pub use actions::{apply_action, apply_pick_place, apply_push, settle, ActionOutcome, DEFAULT_PUSH_HALF_WIDTH};
pub use render::{render, RenderedScene, CONTAINER_HEIGHT, ITEM_HEIGHT_PER_SIZE};
pub use scene::{
    attribute_vocabulary, ground_truth_mask, NamedColor, ObjectKind, Scene, SceneObject, ALL_COLORS,
    BACKGROUND_RGB, DEFAULT_HEIGHT, DEFAULT_WIDTH, POSITIONAL_ATTRIBUTES,
};
pub use shapes::{
    ShapeKind, BLOCK_HALF, BOWL_INTERIOR, BOWL_RADIUS, BOX_HALF, BOX_WALL, ITEM_RADIUS, ITEM_SHAPES, ZONE_HALF,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("object {0} extends outside the workspace")]
    OutOfBounds(u32),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("scene json: {0}")]
    Json(String),
    #[error("i/o: {0}")]
    Io(String),
}
