//! Instruction-to-action pipeline for a 2D tabletop world.
//!
//! Natural-language instructions are parsed with a categorial grammar into
//! typed manipulation programs ([`dsl`], [`ccg`]); programs are evaluated over
//! spatial grounding maps ([`grounding`], [`executor`]) to produce pick, place
//! and push poses, which a kinematic simulator applies ([`world`]). The
//! [`benchmark`] module generates seeded episodes and scores them.

pub mod benchmark;
pub mod ccg;
pub mod dsl;
pub mod executor;
pub mod grounding;
pub mod world;
