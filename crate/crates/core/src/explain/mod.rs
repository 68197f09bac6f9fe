//! When and what to explain.
//!
//! *When*: an action is surprising if it is not an expected successor of the
//! action before it (see [`ExpectedSuccessorModel`]). *What*: the context
//! conditions of the whole intention chain plus the actions up to the one
//! that changes them (see [`explanation_content`]).

mod content;
mod expectations;
mod render;

use thiserror::Error;

use crate::agent::IntentionId;
use crate::lang::Term;

pub use content::{
    action_modifies, explanation_content, hierarchical_context, modifies, ContextEntry, Explanation,
    HierarchicalContext, IntentionSummary,
};
pub use expectations::{
    executed_pairs, init_expectations, ExpectedSuccessorModel, InitStrategy, Matching, Predecessor,
    StrategyKind, DEFAULT_COOCCURRENCE_THRESHOLD,
};
pub use render::{render, ExplanationStyle, Lexicon, LexiconError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("no live intention {0}")]
    UnknownIntention(IntentionId),
    #[error("step {index} of intention {intention} is out of range (body has {len} steps)")]
    IndexOutOfRange {
        intention: IntentionId,
        index: usize,
        len: usize,
    },
    #[error("step {index} of intention {intention} is a sub-goal, not an action")]
    NotAnAction { intention: IntentionId, index: usize },
    #[error("co-occurrence initialization needs at least one history trace")]
    MissingHistory,
    #[error("history trace: {0}")]
    BadHistory(String),
    #[error("task link for {0} has no relevant plan")]
    UnknownTask(Term),
}

/// Per-agent explanation settings and the user's expectation model.
#[derive(Debug, Clone, Default)]
pub struct Explainer {
    pub model: ExpectedSuccessorModel,
    pub style: ExplanationStyle,
    pub lexicon: Lexicon,
}

impl Explainer {
    pub fn new(model: ExpectedSuccessorModel, style: ExplanationStyle, lexicon: Lexicon) -> Self {
        Explainer { model, style, lexicon }
    }

    pub fn render(&self, e: &Explanation) -> String {
        render(e, self.style, &self.lexicon)
    }
}
