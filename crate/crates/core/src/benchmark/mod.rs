//! Desk-scale task families: seeded episode generation with expert
//! demonstrations, success metrics, the imitation loss, and evaluation
//! suites.

mod generate;
mod metrics;
mod suite;
mod tasks;

pub use generate::{
    expert_policy, generate_episode, instruction_words, Episode, GoalPredicate, CLEARANCE, EDGE_MARGIN, MAX_ATTEMPTS,
    RELATION_MARGIN,
};
pub use metrics::{imitation_loss, is_inside, score_success, softmax_cross_entropy, INSIDE_FRACTION};
pub use suite::{
    make_backend, monolithic_map, run_episode, run_suite, BackendKind, EpisodeRecord, EvalReport, FailureKind, GroundingMode,
    RunSettings, SuiteConfig, TaskReport,
};
pub use tasks::{Split, TaskName, TaskSpec, ALL_TASKS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("could not generate a {task} episode for seed {seed}")]
    GenerationFailure { task: String, seed: u64 },
    #[error("goal already satisfied")]
    AlreadySolved,
    #[error("step {0} is beyond the episode budget")]
    StepOutOfRange(usize),
    #[error("expert pose outside the grid")]
    OutOfGrid,
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("config: {0}")]
    Config(String),
}
