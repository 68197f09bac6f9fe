//! The BDI reasoning cycle: beliefs, events, plan selection, the intention
//! chain, and step-by-step execution against the world.

mod beliefs;
mod intention;

use std::collections::VecDeque;

use thiserror::Error;

use crate::explain::{explanation_content, Explainer, Predecessor};
use crate::lang::{Literal, PlanLibrary, PlanTemplate, Step, Substitution, Term, Trigger, TriggerKind, Var};
use crate::world::{Precheck, RecordKind, TraceRecord, WorldState};

pub use beliefs::{FactSet, Insertion};
pub use intention::{IntentionId, IntentionNode, IntentionTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("belief {0} is not ground")]
    NonGround(Literal),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventSource {
    External,
    /// Posted by a sub-goal step of the given intention.
    Internal(IntentionId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub trigger: Trigger,
    pub source: EventSource,
}

impl Event {
    pub fn external(trigger: Trigger) -> Self {
        Event {
            trigger,
            source: EventSource::External,
        }
    }
}

/// The agent's beliefs: ground positive atoms, negation by absence.
pub type BeliefBase = FactSet;

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Nothing left to do.
    Done,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub records: Vec<TraceRecord>,
    pub status: RunStatus,
}

#[derive(Debug, Clone)]
pub struct Agent {
    pub beliefs: BeliefBase,
    pub events: VecDeque<Event>,
    pub library: PlanLibrary,
    pub intentions: IntentionTree,
    pub explainer: Explainer,
    trace: Vec<TraceRecord>,
    next_id: u64,
    predecessor: Option<Predecessor>,
}

impl Agent {
    pub fn new(library: PlanLibrary) -> Self {
        Agent {
            beliefs: FactSet::new(library.fluents.clone()),
            events: VecDeque::new(),
            library,
            intentions: IntentionTree::new(),
            explainer: Explainer::default(),
            trace: Vec::new(),
            next_id: 1,
            predecessor: None,
        }
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    /// Whether there is neither a live intention nor a pending event.
    pub fn is_idle(&self) -> bool {
        self.intentions.is_empty() && self.events.is_empty()
    }

    /// Appends a record outside of [`Agent::step`] (e.g. the end-of-run marker).
    pub fn record(&mut self, kind: RecordKind, payload: impl Into<String>) -> TraceRecord {
        let rec = TraceRecord::new(self.trace.len() as u64 + 1, kind, payload);
        self.trace.push(rec.clone());
        rec
    }

    fn push_record(&mut self, mut rec: TraceRecord) -> TraceRecord {
        rec.step = self.trace.len() as u64 + 1;
        self.trace.push(rec.clone());
        rec
    }

    /// Enqueues a user order `+!goal`.
    pub fn order(&mut self, goal: Term) {
        self.events.push_back(Event::external(Trigger::goal(goal)));
    }

    /// Adds a ground belief. A negated literal retracts its atom. Returns
    /// the event for the change, or `None` when nothing changed. Any
    /// displaced value of the same state variable is retracted and its
    /// removal event is queued first.
    pub fn assert_belief(&mut self, l: &Literal) -> Result<Option<Event>, AgentError> {
        if !l.is_ground() {
            return Err(AgentError::NonGround(l.clone()));
        }
        if l.negated {
            return Ok(self.retract_belief(&l.atom));
        }
        let ins = self.beliefs.insert(l.atom.clone());
        if let Some(old) = ins.displaced {
            self.events.push_back(Event::external(Trigger {
                kind: TriggerKind::BeliefRemoval,
                payload: old,
            }));
        }
        if !ins.added {
            return Ok(None);
        }
        let ev = Event::external(Trigger {
            kind: TriggerKind::BeliefAddition,
            payload: l.atom.clone(),
        });
        self.events.push_back(ev.clone());
        Ok(Some(ev))
    }

    pub fn retract_belief(&mut self, atom: &Term) -> Option<Event> {
        if !self.beliefs.remove(atom) {
            return None;
        }
        let ev = Event::external(Trigger {
            kind: TriggerKind::BeliefRemoval,
            payload: atom.clone(),
        });
        self.events.push_back(ev.clone());
        Some(ev)
    }

    /// Replaces the belief base without generating events.
    pub fn seed_beliefs(&mut self, facts: impl IntoIterator<Item = Term>) {
        for f in facts {
            self.beliefs.insert(f);
        }
    }

    pub fn query(&self, phi: &[Literal]) -> Vec<Substitution> {
        self.beliefs.query(phi)
    }

    /// First plan (in library order) whose trigger unifies with `trigger`
    /// and whose context is entailed; variables are renamed apart for the
    /// would-be intention id. The first context answer wins.
    pub fn select_plan(&self, trigger: &Trigger) -> Option<(PlanTemplate, Substitution)> {
        let suffix = self.next_id;
        let rename = move |v: &Var| Var::new(format!("{}_{suffix}", v.name()));
        for plan in self.library.relevant_plans(trigger) {
            let renamed = plan.rename(&rename);
            let Some(s) = crate::lang::unify(&renamed.trigger.payload, &trigger.payload, &Substitution::new())
            else {
                continue;
            };
            if let Some(answer) = self.beliefs.query_from(&renamed.context, &s).into_iter().next() {
                let vars = renamed.vars();
                return Some((renamed, answer.restrict(&vars)));
            }
        }
        None
    }

    /// Grounds the context, runs the static demand check over the body's
    /// actions, and pushes the intention under `parent`.
    pub fn adopt_intention(
        &mut self,
        plan: PlanTemplate,
        substitution: Substitution,
        parent: Option<IntentionId>,
    ) -> IntentionId {
        let id = IntentionId(self.next_id);
        self.next_id += 1;
        let grounded_context = plan
            .context
            .iter()
            .map(|l| {
                let g = substitution.apply_literal(l);
                match (g.negated, self.beliefs.rival_of(&g.atom)) {
                    (true, Some(believed)) => Literal::pos(believed.clone()),
                    _ => g,
                }
            })
            .collect();
        let mut node = IntentionNode::new(id, plan, substitution, grounded_context, parent);
        let actions = node.grounded_actions();
        let terms: Vec<Term> = actions.iter().map(|(_, t)| t.clone()).collect();
        node.demand_marks = self
            .explainer
            .model
            .mark_demand(&terms)
            .into_iter()
            .map(|i| actions[i].0)
            .collect();
        if parent.is_none() {
            self.predecessor = Some(Predecessor::Task(node.grounded_trigger().payload));
        }
        self.intentions.push(node);
        id
    }

    /// Ancestors of `id`, nearest first.
    pub fn parents(&self, id: IntentionId) -> Vec<&IntentionNode> {
        self.intentions.parents(id)
    }

    /// Runs one reasoning step and returns its record, or `None` when there
    /// is nothing to do.
    ///
    /// Priority: a pending sub-goal event, then the active intention, then
    /// the next queued event. A surprising action produces an `explain`
    /// record on one step and executes on the next.
    pub fn step(&mut self, world: &mut WorldState) -> Option<TraceRecord> {
        if let Some(pos) = self
            .events
            .iter()
            .position(|e| matches!(e.source, EventSource::Internal(_)))
        {
            let ev = self.events.remove(pos).expect("position is valid");
            return Some(self.handle_event(ev));
        }
        if let Some(leaf) = self.intentions.leaf().map(|n| n.id) {
            return Some(self.advance(leaf, world));
        }
        while let Some(ev) = self.events.pop_front() {
            if ev.trigger.kind != TriggerKind::GoalAddition && self.library.relevant_plans(&ev.trigger).next().is_none() {
                continue;
            }
            return Some(self.handle_event(ev));
        }
        None
    }

    /// Steps until idle or until `max_steps` records have been produced.
    pub fn run_to_completion(&mut self, world: &mut WorldState, max_steps: usize) -> RunOutcome {
        let mut records = Vec::new();
        while records.len() < max_steps {
            match self.step(world) {
                Some(r) => records.push(r),
                None => {
                    return RunOutcome {
                        records,
                        status: RunStatus::Done,
                    }
                }
            }
        }
        let status = if self.is_idle() {
            RunStatus::Done
        } else {
            RunStatus::BudgetExhausted
        };
        RunOutcome { records, status }
    }

    fn handle_event(&mut self, ev: Event) -> TraceRecord {
        let parent = match ev.source {
            EventSource::Internal(p) => Some(p),
            EventSource::External => None,
        };
        match self.select_plan(&ev.trigger) {
            Some((plan, s)) => {
                let name = plan.name.clone();
                let id = self.adopt_intention(plan, s, parent);
                let mut rec = TraceRecord::new(0, RecordKind::Adopt, ev.trigger.to_string());
                rec.intention = Some(id);
                rec.parent = parent;
                rec.plan = Some(name);
                self.push_record(rec)
            }
            None => {
                let mut rec = TraceRecord::new(0, RecordKind::Fail, format!("no applicable plan for {}", ev.trigger));
                rec.parent = parent;
                if parent.is_some() {
                    self.fail_chain();
                }
                self.push_record(rec)
            }
        }
    }

    fn fail_chain(&mut self) {
        self.intentions.clear();
        self.events.retain(|e| e.source == EventSource::External);
        self.predecessor = None;
    }

    fn advance(&mut self, id: IntentionId, world: &mut WorldState) -> TraceRecord {
        let node = self.intentions.get(id).expect("leaf is live");
        if node.is_finished() {
            let node = self.intentions.pop().expect("leaf is live");
            let mut rec = TraceRecord::new(0, RecordKind::Done, node.grounded_trigger().to_string());
            rec.intention = Some(node.id);
            rec.parent = node.parent;
            rec.plan = Some(node.template.name);
            return self.push_record(rec);
        }
        let cursor = node.body_cursor;
        match node.grounded_step(cursor).expect("cursor in range") {
            Step::SubGoal(goal) => {
                let trigger = Trigger::goal(goal);
                self.events.push_front(Event {
                    trigger: trigger.clone(),
                    source: EventSource::Internal(id),
                });
                self.intentions.get_mut(id).expect("leaf is live").body_cursor += 1;
                let mut rec = TraceRecord::new(0, RecordKind::Subgoal, trigger.to_string());
                rec.intention = Some(id);
                self.push_record(rec)
            }
            Step::Action(action) => {
                if node.demand_checked != Some(cursor) {
                    let marked = node.demand_marks.contains(&cursor);
                    let surprising = match &self.predecessor {
                        Some(p) => self.explainer.model.check_runtime_demand(&p.clone(), &action),
                        None => true,
                    };
                    self.intentions.get_mut(id).expect("leaf is live").demand_checked = Some(cursor);
                    if marked || surprising {
                        return self.explain(id, cursor, action);
                    }
                }
                self.execute(id, action, world)
            }
        }
    }

    fn explain(&mut self, id: IntentionId, cursor: usize, action: Term) -> TraceRecord {
        let mut e = explanation_content(&self.intentions, id, cursor, &self.library)
            .expect("cursor points at an action of a live intention");
        e.predecessor = self.predecessor.as_ref().and_then(|p| p.action().cloned());
        e.beliefs = self.beliefs.iter().cloned().collect();
        let mut rec = TraceRecord::new(0, RecordKind::Explain, action.to_string());
        rec.intention = Some(id);
        rec.text = Some(self.explainer.render(&e));
        rec.style = Some(self.explainer.style);
        rec.explanation = Some(e);
        self.push_record(rec)
    }

    fn execute(&mut self, id: IntentionId, action: Term, world: &mut WorldState) -> TraceRecord {
        let outcome = world
            .check_preconditions(&action, &self.library)
            .and_then(|pre| match pre {
                Precheck::Ok(_) => world.apply_effects(&action, &self.library),
                Precheck::Violated(v) => Err(crate::world::WorldError::PreconditionViolated {
                    action: action.clone(),
                    violated: v,
                }),
            });
        match outcome {
            Ok(delta) => {
                for old in &delta.removed {
                    self.retract_belief(old);
                }
                for new in &delta.added {
                    self.assert_belief(&Literal::pos(new.clone()))
                        .expect("world facts are ground");
                }
                self.intentions.get_mut(id).expect("leaf is live").body_cursor += 1;
                self.predecessor = Some(Predecessor::Action(action.clone()));
                let mut rec = TraceRecord::new(0, RecordKind::Action, action.to_string());
                rec.intention = Some(id);
                self.push_record(rec)
            }
            Err(err) => {
                self.fail_chain();
                let mut rec = TraceRecord::new(0, RecordKind::Fail, err.to_string());
                rec.intention = Some(id);
                self.push_record(rec)
            }
        }
    }
}
