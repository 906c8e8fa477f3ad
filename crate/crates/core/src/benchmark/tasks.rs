use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::world::{NamedColor, ShapeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskName {
    PackingShapes,
    PackingColorBox,
    PackingLocationBox,
    PackingPrepositions,
    PackingNestedPrepositions,
    PutBlocksInBowls,
    SeparatingPiles,
    SeparatingLocationPiles,
    PushingShapes,
}

pub const ALL_TASKS: [TaskName; 9] = [
    TaskName::PackingShapes,
    TaskName::PackingColorBox,
    TaskName::PackingLocationBox,
    TaskName::PackingPrepositions,
    TaskName::PackingNestedPrepositions,
    TaskName::PutBlocksInBowls,
    TaskName::SeparatingPiles,
    TaskName::SeparatingLocationPiles,
    TaskName::PushingShapes,
];

impl TaskName {
    pub fn name(self) -> &'static str {
        match self {
            TaskName::PackingShapes => "packing_shapes",
            TaskName::PackingColorBox => "packing_color_box",
            TaskName::PackingLocationBox => "packing_location_box",
            TaskName::PackingPrepositions => "packing_prepositions",
            TaskName::PackingNestedPrepositions => "packing_nested_prepositions",
            TaskName::PutBlocksInBowls => "put_blocks_in_bowls",
            TaskName::SeparatingPiles => "separating_piles",
            TaskName::SeparatingLocationPiles => "separating_location_piles",
            TaskName::PushingShapes => "pushing_shapes",
        }
    }

    /// Tasks solved with the push primitive.
    pub fn is_push_task(self) -> bool {
        matches!(
            self,
            TaskName::SeparatingPiles | TaskName::SeparatingLocationPiles | TaskName::PushingShapes
        )
    }
}

impl fmt::Display for TaskName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskName {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().replace('-', "_");
        ALL_TASKS
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| BenchError::UnknownTask(s.to_string()))
    }
}

/// Which attribute pools episodes draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Seen,
    #[default]
    Unseen,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Seen => "seen",
            Split::Unseen => "unseen",
        }
    }

    /// Colors for items, blocks, bowls, zones and non-brown boxes. Only red,
    /// green and blue are shared between splits; brown is reserved for
    /// boxes named by their color in both.
    pub fn colors(self) -> &'static [NamedColor] {
        use NamedColor::*;
        match self {
            Split::Seen => &[Red, Green, Blue, Yellow, Orange, Gray],
            Split::Unseen => &[Red, Green, Blue, Purple, Pink, White, Cyan],
        }
    }

    /// Item shapes; the two pools are disjoint.
    pub fn shapes(self) -> &'static [ShapeKind] {
        use ShapeKind::*;
        match self {
            Split::Seen => &[Hexagon, Star, Flower, Diamond, Square],
            Split::Unseen => &[Ring, Disc, Triangle, LetterL, LetterT],
        }
    }

    /// Lexicon words an instruction of this split may use: function words,
    /// actions, relations, the reserved box color and the structural nouns
    /// naming containers and zones, plus every seen-split attribute for
    /// the seen split.
    pub fn allows_known_word(self, word: &str) -> bool {
        const STRUCTURAL: [&str; 22] = [
            "the", "a", "an", "of", "pile", "pack", "put", "push", "in", "into", "inside", "on", "left", "right",
            "front", "back", "brown", "box", "bowl", "blocks", "block", "square",
        ];
        STRUCTURAL.contains(&word)
            || ["red", "green", "blue"].contains(&word)
            || (self == Split::Seen
                && (Split::Seen.colors().iter().any(|c| c.name() == word)
                    || Split::Seen.shapes().iter().any(|s| s.name() == word)))
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "seen" => Ok(Split::Seen),
            "unseen" => Ok(Split::Unseen),
            other => Err(BenchError::Config(format!("unknown split {other:?}"))),
        }
    }
}

/// A task family on one split, with its scene counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: TaskName,
    pub split: Split,
    /// Distractor shapes beside the target (packing and pushing tasks).
    pub distractors: usize,
    /// Blocks in the pile (separating tasks).
    pub pile_size: usize,
}

impl TaskSpec {
    pub fn new(name: TaskName, split: Split) -> Self {
        TaskSpec {
            name,
            split,
            distractors: 4,
            pile_size: 10,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let shapes = self.split.shapes().len();
        let needed = self.distractors + 1;
        if self.name.name().starts_with("packing") && needed > shapes {
            return Err(BenchError::Config(format!(
                "{} needs {needed} unique shapes but the {} split has {shapes}",
                self.name, self.split
            )));
        }
        if matches!(self.name, TaskName::PackingPrepositions) && self.distractors < 1 {
            return Err(BenchError::Config("packing_prepositions needs a reference distractor".into()));
        }
        if matches!(self.name, TaskName::PackingNestedPrepositions) && self.distractors < 2 {
            return Err(BenchError::Config("packing_nested_prepositions needs two reference distractors".into()));
        }
        if self.name.is_push_task() && self.name != TaskName::PushingShapes && self.pile_size == 0 {
            return Err(BenchError::Config("pile_size must be positive".into()));
        }
        if self.pile_size > 16 || self.distractors > 8 {
            return Err(BenchError::Config("scene counts exceed the workspace".into()));
        }
        Ok(())
    }
}
