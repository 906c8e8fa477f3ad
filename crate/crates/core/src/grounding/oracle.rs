use std::collections::BTreeSet;

use super::map::GroundingMap;
use super::{GroundingBackend, GroundingError, Resolution};
use crate::dsl::ConceptToken;
use crate::world::{ground_truth_mask, Scene};

/// Ground-truth segmentation: the union of footprints of every object whose
/// attributes include the concept word. Unknown words match nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleBackend;

impl GroundingBackend for OracleBackend {
    fn ground(&self, scene: &Scene, concept: &ConceptToken, res: Resolution) -> Result<GroundingMap, GroundingError> {
        let predicate = BTreeSet::from([concept.word().to_string()]);
        Ok(ground_truth_mask(scene, &predicate, res))
    }
}
