//! Program evaluation over grounding maps into control parameters.
//!
//! Object-typed nodes evaluate to grounding maps at the grounding
//! resolution. Each goal is turned into a pick affordance and per-rotation
//! place maps on the pose grid; the chosen poses are their argmaxes.

mod affordance;
mod kernels;
mod pose;
mod program;

pub use affordance::{pick_affordance, place_maps, select_pick, select_place, Silhouette, CORE_THRESHOLD, SATISFIED_FRACTION};
pub use kernels::{
    chessboard_distance, component_normalized_distance, component_of, erode, label_components, relation_kernel,
    weighted_centroid, RelationConfig, RelationKind, MASK_THRESHOLD,
};
pub use pose::{ControlParams, Pose2, PoseGrid, Primitive, DEFAULT_ROTATIONS};
pub use program::{
    eval_goal, eval_object, eval_relate, execute, item_occupancy, topmost_item_at, ExecutionContext,
    ExecutionResult, GoalPlan,
};

use thiserror::Error;

use crate::dsl::DslError;
use crate::grounding::GroundingError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    /// The object map at this node path has no pickable support.
    #[error("empty grounding at {0}")]
    EmptyGrounding(String),
    #[error("no feasible place pose")]
    NoFeasiblePlace,
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("program is not a plan: {0}")]
    Type(#[from] DslError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
}
