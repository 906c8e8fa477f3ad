//! Spatial grounding maps and the backends that produce them.

mod embedding;
mod map;
mod oracle;

pub use embedding::{
    ground_embedding, ground_embedding_raw, ConceptEmbedding, EmbeddingBackend, EmbeddingTable, FeatureMap, Matrix,
    ProjectionWeights,
};
pub use map::{normalize, GroundingMap};
pub use oracle::OracleBackend;

use thiserror::Error;

use crate::dsl::ConceptToken;
use crate::world::Scene;

/// Grid size at which concepts are grounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Resolution {
    pub height: usize,
    pub width: usize,
}

impl Resolution {
    pub fn new(height: usize, width: usize) -> Self {
        Resolution { height, width }
    }

    /// Half the scene raster in each dimension, rounded up.
    pub fn half_of(scene: &Scene) -> Self {
        Resolution {
            height: (scene.height as usize).div_ceil(2),
            width: (scene.width as usize).div_ceil(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroundingError {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

/// Maps a single concept to a grounding map over a scene.
pub trait GroundingBackend: Send + Sync {
    fn ground(&self, scene: &Scene, concept: &ConceptToken, res: Resolution) -> Result<GroundingMap, GroundingError>;
}
