//! The plan language: terms, literals, unification, and the `.plan` syntax.

mod error;
mod lexer;
mod parser;
mod printer;
mod subst;
mod syntax;
mod term;

pub use error::{ParseError, ParseErrorKind, Pos};
pub use parser::{parse_literal, parse_plan_library, parse_step, parse_term, parse_trigger};
pub use printer::pretty_print;
pub use subst::{match_term, unify, CyclicBinding, Substitution};
pub use syntax::{ActionSchema, PlanLibrary, PlanTemplate, Step, Trigger, TriggerKind};
pub use term::{Fluents, Literal, Term, Var};

/// Applies `s` to `t`, resolving chained bindings.
pub fn apply_substitution(s: &Substitution, t: &Term) -> Term {
    s.apply(t)
}
