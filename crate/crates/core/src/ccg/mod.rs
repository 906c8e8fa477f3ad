//! Categorial-grammar semantic parser.
//!
//! Words carry a syntactic category and a lambda template; forward and
//! backward application plus "and"-coordination compose them bottom-up in a
//! CKY chart. Words missing from the lexicon are assigned every category the
//! lexicon uses, with semantics drawn from the lexicon's own
//! template-per-category distribution.

mod category;
mod chart;
mod lexicon;
mod term;
mod tokenize;

pub use category::{Direction, Primitive, SyntacticCategory, TermType};
pub use chart::{
    bootstrap_oov, combine, conjoin, parse, parse_text, semantic_prior, Constituent, Derivation, OovAssignment,
    SemanticPrior, BEAM_WIDTH, CONJUNCTION,
};
pub use lexicon::{Lexicon, LexiconEntry, DEFAULT_LEXICON};
pub use term::{SemanticTemplate, Slot};
pub use tokenize::{normalize_text, tokenize};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CcgError {
    #[error("bad category {0}")]
    Category(String),
    #[error("bad template {0}")]
    TemplateSyntax(String),
    #[error("ill-typed template: {0}")]
    TemplateType(String),
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("cannot read lexicon: {0}")]
    Io(String),
    #[error("no parse for {0:?}")]
    NoParse(Vec<String>),
    #[error("no category yields a full parse for {0:?}")]
    EmptyCandidates(String),
    #[error("{0:?} is already in the vocabulary")]
    InVocabulary(String),
}
