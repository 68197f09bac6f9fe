//! Plan-library data model: triggers, plans, action schemas.

use std::collections::BTreeMap;
use std::fmt;

use super::subst::{match_term, unify, Substitution};
use super::term::{Fluents, Literal, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriggerKind {
    /// `+b`
    BeliefAddition,
    /// `-b`
    BeliefRemoval,
    /// `+!g`
    GoalAddition,
}

impl TriggerKind {
    pub fn prefix(self) -> &'static str {
        match self {
            TriggerKind::BeliefAddition => "+",
            TriggerKind::BeliefRemoval => "-",
            TriggerKind::GoalAddition => "+!",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trigger {
    pub kind: TriggerKind,
    pub payload: Term,
}

impl Trigger {
    pub fn goal(payload: Term) -> Self {
        Trigger {
            kind: TriggerKind::GoalAddition,
            payload,
        }
    }

    pub fn rename(&self, f: &impl Fn(&Var) -> Var) -> Trigger {
        Trigger {
            kind: self.kind,
            payload: self.payload.rename(f),
        }
    }
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.payload)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Step {
    Action(Term),
    SubGoal(Term),
}

impl Step {
    pub fn term(&self) -> &Term {
        match self {
            Step::Action(t) | Step::SubGoal(t) => t,
        }
    }

    pub fn is_action(&self) -> bool {
        matches!(self, Step::Action(_))
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Action(t) => write!(f, "{t}"),
            Step::SubGoal(t) => write!(f, "!{t}"),
        }
    }
}

/// A plan `trigger : context <- body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanTemplate {
    pub name: String,
    pub trigger: Trigger,
    pub context: Vec<Literal>,
    pub body: Vec<Step>,
}

impl PlanTemplate {
    /// Variables bound once the trigger has been matched and the positive
    /// context literals answered.
    pub fn bindable_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.trigger.payload.collect_vars(&mut out);
        for l in self.context.iter().filter(|l| !l.negated) {
            l.atom.collect_vars(&mut out);
        }
        out
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = self.bindable_vars();
        for l in &self.context {
            l.atom.collect_vars(&mut out);
        }
        for s in &self.body {
            s.term().collect_vars(&mut out);
        }
        out
    }

    pub fn rename(&self, f: &impl Fn(&Var) -> Var) -> PlanTemplate {
        PlanTemplate {
            name: self.name.clone(),
            trigger: self.trigger.rename(f),
            context: self
                .context
                .iter()
                .map(|l| Literal {
                    atom: l.atom.rename(f),
                    negated: l.negated,
                })
                .collect(),
            body: self
                .body
                .iter()
                .map(|s| match s {
                    Step::Action(t) => Step::Action(t.rename(f)),
                    Step::SubGoal(t) => Step::SubGoal(t.rename(f)),
                })
                .collect(),
        }
    }

    /// The trigger unifies with `event` (context not consulted).
    pub fn is_relevant(&self, event: &Trigger) -> bool {
        self.trigger.kind == event.kind
            && unify(&self.trigger.payload, &event.payload, &Substitution::new()).is_some()
    }

    /// Action steps with their body indices.
    pub fn action_steps(&self) -> impl Iterator<Item = (usize, &Term)> {
        self.body.iter().enumerate().filter_map(|(i, s)| match s {
            Step::Action(t) => Some((i, t)),
            Step::SubGoal(_) => None,
        })
    }
}

/// An action with preconditions and add/delete effects.
///
/// Variables appearing only in positive preconditions are existential: they
/// are bound by querying the state when the action executes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub head: Term,
    pub preconditions: Vec<Literal>,
    pub add_effects: Vec<Literal>,
    pub del_effects: Vec<Literal>,
}

impl ActionSchema {
    pub fn signature(&self) -> (String, usize) {
        let (f, a) = self.head.signature().expect("action head is an application");
        (f.to_string(), a)
    }

    /// Binds head variables against a ground action instance.
    pub fn bind_head(&self, action: &Term) -> Option<Substitution> {
        match_term(&self.head, action, &Substitution::new())
    }

    /// Add and delete effects with the head bound; variables bound only by
    /// preconditions remain open.
    pub fn effects_for(&self, action: &Term) -> Option<Vec<Literal>> {
        let s = self.bind_head(action)?;
        Some(
            self.add_effects
                .iter()
                .chain(&self.del_effects)
                .map(|l| s.apply_literal(l))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlanLibrary {
    pub fluents: Fluents,
    pub plans: Vec<PlanTemplate>,
    pub actions: BTreeMap<(String, usize), ActionSchema>,
}

impl PlanLibrary {
    pub fn schema_for(&self, action: &Term) -> Option<&ActionSchema> {
        let (f, a) = action.signature()?;
        self.actions.get(&(f.to_string(), a))
    }

    pub fn relevant_plans<'a>(
        &'a self,
        event: &'a Trigger,
    ) -> impl Iterator<Item = &'a PlanTemplate> + 'a {
        self.plans.iter().filter(move |p| p.is_relevant(event))
    }

    pub fn plan(&self, name: &str) -> Option<&PlanTemplate> {
        self.plans.iter().find(|p| p.name == name)
    }
}
