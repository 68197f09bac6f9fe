//! A BDI agent runtime that explains its actions when they would surprise
//! the user watching it.
//!
//! Plans are written in a small AgentSpeak-like language ([`lang`]). The
//! agent ([`agent`]) executes them against a simulated world ([`world`]).
//! Before running an action the user would not expect to follow the
//! previous one, it emits an explanation grounded in the context conditions
//! of its whole intention chain ([`explain`]). Each user's expectations
//! persist across runs ([`profile`]).

pub mod agent;
pub mod explain;
pub mod lang;
pub mod profile;
pub mod session;
pub mod world;

pub use agent::{Agent, IntentionId, IntentionNode, IntentionTree};
pub use explain::{ExpectedSuccessorModel, Explanation, ExplanationStyle, Lexicon};
pub use lang::{Literal, PlanLibrary, PlanTemplate, Substitution, Term, Trigger};
pub use session::{Outcome, Session, SessionConfig};
pub use world::{RecordKind, Scenario, TraceRecord, WorldState};
