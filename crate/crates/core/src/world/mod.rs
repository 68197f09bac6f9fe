//! Deterministic symbolic kitchen world: state, action execution, scenarios,
//! and the trace log.

mod scenario;
mod trace;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::agent::FactSet;
use crate::lang::{Fluents, Literal, PlanLibrary, Substitution, Term};

pub use scenario::{load_scenario, parse_scenario, InitChoice, Scenario, ScenarioError, ScenarioFile};
pub use trace::{read_trace, write_trace, RecordKind, TraceError, TraceRecord};

/// Conceptual partition of state variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Group {
    Env,
    Obj,
    Robot,
    User,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Env => "env",
            Group::Obj => "obj",
            Group::Robot => "robot",
            Group::User => "user",
        })
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "env" => Ok(Group::Env),
            "obj" => Ok(Group::Obj),
            "robot" => Ok(Group::Robot),
            "user" => Ok(Group::User),
            other => Err(format!("unknown group `{other}` (expected env, obj, robot or user)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("no action schema for {0}")]
    UnknownAction(Term),
    #[error("{action} is not ground")]
    NonGround { action: Term },
    #[error("preconditions of {action} violated: {}", .violated.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", "))]
    PreconditionViolated { action: Term, violated: Vec<Literal> },
}

/// Result of a precondition check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Precheck {
    /// Preconditions hold; the binding grounds the schema for this state.
    Ok(Substitution),
    Violated(Vec<Literal>),
}

impl Precheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, Precheck::Ok(_))
    }
}

/// Facts removed and added by one action, in application order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateDelta {
    pub removed: Vec<Term>,
    pub added: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldState {
    facts: FactSet,
    group_tags: BTreeMap<String, Group>,
}

impl WorldState {
    pub fn new(fluents: Fluents) -> Self {
        WorldState {
            facts: FactSet::new(fluents),
            group_tags: BTreeMap::new(),
        }
    }

    pub fn facts(&self) -> &FactSet {
        &self.facts
    }

    pub fn tag(&mut self, predicate: impl Into<String>, group: Group) {
        self.group_tags.insert(predicate.into(), group);
    }

    pub fn group_of(&self, predicate: &str) -> Option<Group> {
        self.group_tags.get(predicate).copied()
    }

    pub fn group_tags(&self) -> &BTreeMap<String, Group> {
        &self.group_tags
    }

    /// Seeds a fact. Returns the displaced value, if any.
    pub fn insert(&mut self, fact: Term) -> Option<Term> {
        self.facts.insert(fact).displaced
    }

    pub fn is_consistent(&self) -> bool {
        self.facts.is_consistent()
    }

    pub fn check_preconditions(&self, action: &Term, lib: &PlanLibrary) -> Result<Precheck, WorldError> {
        if !action.is_ground() {
            return Err(WorldError::NonGround {
                action: action.clone(),
            });
        }
        let schema = lib
            .schema_for(action)
            .ok_or_else(|| WorldError::UnknownAction(action.clone()))?;
        let Some(head) = schema.bind_head(action) else {
            return Err(WorldError::UnknownAction(action.clone()));
        };
        if let Some(first) = self.facts.query_from(&schema.preconditions, &head).into_iter().next() {
            return Ok(Precheck::Ok(first));
        }
        // Diagnose: walk the literals greedily and report the ones that fail.
        let mut s = head;
        let mut violated = Vec::new();
        for l in schema.preconditions.iter().filter(|l| !l.negated) {
            match self.facts.query_from(std::slice::from_ref(l), &s).into_iter().next() {
                Some(next) => s = next,
                None => violated.push(s.apply_literal(l)),
            }
        }
        for l in schema.preconditions.iter().filter(|l| l.negated) {
            if self.facts.query_from(std::slice::from_ref(l), &s).is_empty() {
                violated.push(s.apply_literal(l));
            }
        }
        Ok(Precheck::Violated(violated))
    }

    /// Deletes then adds the grounded effects of `action`.
    pub fn apply_effects(&mut self, action: &Term, lib: &PlanLibrary) -> Result<StateDelta, WorldError> {
        let binding = match self.check_preconditions(action, lib)? {
            Precheck::Ok(s) => s,
            Precheck::Violated(violated) => {
                return Err(WorldError::PreconditionViolated {
                    action: action.clone(),
                    violated,
                })
            }
        };
        let schema = lib.schema_for(action).expect("checked above");
        let mut delta = StateDelta::default();
        for l in &schema.del_effects {
            let fact = binding.apply(&l.atom);
            if self.facts.remove(&fact) {
                delta.removed.push(fact);
            }
        }
        for l in &schema.add_effects {
            let fact = binding.apply(&l.atom);
            let ins = self.facts.insert(fact.clone());
            if let Some(old) = ins.displaced {
                delta.removed.push(old);
            }
            if ins.added {
                delta.added.push(fact);
            }
        }
        Ok(delta)
    }
}
