//! Per-user expected-successor model and the explanation-demand checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lang::{unify, PlanLibrary, Substitution, Term, Trigger};
use crate::world::{RecordKind, TraceRecord};

use super::ExplainError;

/// How actions are compared when looking up expected successors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Matching {
    /// Ground terms must be identical: `navigateTo(table) != navigateTo(sink)`.
    #[default]
    Exact,
    /// Only the functor is compared.
    FunctorOnly,
}

/// What came right before the action about to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predecessor {
    /// The action is the first of a root task; the payload is the task's goal.
    Task(Term),
    Action(Term),
}

impl Predecessor {
    pub fn action(&self) -> Option<&Term> {
        match self {
            Predecessor::Action(t) => Some(t),
            Predecessor::Task(_) => None,
        }
    }
}

/// Maps an action to the set of actions a user expects to follow it, plus
/// the actions a user expects to open a task.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpectedSuccessorModel {
    pub user_id: String,
    pub matching: Matching,
    successors: BTreeMap<Term, BTreeSet<Term>>,
    /// Keys may contain variables (`storeCup(C)`); they match any task
    /// goal they unify with.
    task_links: BTreeMap<Term, BTreeSet<Term>>,
}

impl ExpectedSuccessorModel {
    pub fn new(user_id: impl Into<String>) -> Self {
        ExpectedSuccessorModel {
            user_id: user_id.into(),
            ..Default::default()
        }
    }

    pub fn with_matching(mut self, matching: Matching) -> Self {
        self.matching = matching;
        self
    }

    fn project(&self, t: &Term) -> Term {
        match (self.matching, t.functor()) {
            (Matching::FunctorOnly, Some(f)) => Term::constant(f),
            _ => t.clone(),
        }
    }

    pub fn successors(&self) -> &BTreeMap<Term, BTreeSet<Term>> {
        &self.successors
    }

    pub fn task_links(&self) -> &BTreeMap<Term, BTreeSet<Term>> {
        &self.task_links
    }

    /// Total number of (action, successor) and (task, first action) pairs.
    pub fn len(&self) -> usize {
        self.successors.values().map(BTreeSet::len).sum::<usize>()
            + self.task_links.values().map(BTreeSet::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn expects(&self, prev: &Term, next: &Term) -> bool {
        self.successors
            .get(&self.project(prev))
            .is_some_and(|s| s.contains(&self.project(next)))
    }

    /// Returns `true` if the pair was new.
    pub fn learn(&mut self, prev: &Term, next: &Term) -> bool {
        let (p, n) = (self.project(prev), self.project(next));
        self.successors.entry(p).or_default().insert(n)
    }

    pub fn expects_first(&self, task: &Term, next: &Term) -> bool {
        let (task, next) = (self.project(task), self.project(next));
        self.task_links.iter().any(|(key, firsts)| {
            firsts.contains(&next) && (key == &task || unify(key, &task, &Substitution::new()).is_some())
        })
    }

    pub fn learn_first(&mut self, task: &Term, next: &Term) -> bool {
        let (t, n) = (self.project(task), self.project(next));
        self.task_links.entry(t).or_default().insert(n)
    }

    /// Static check over the grounded actions of a freshly adopted plan body.
    /// Index `i + 1` is marked when `actions[i + 1]` is not an expected
    /// successor of `actions[i]`; the pair is then learned.
    pub fn mark_demand(&mut self, actions: &[Term]) -> Vec<usize> {
        let mut marked = Vec::new();
        for (i, pair) in actions.windows(2).enumerate() {
            if !self.expects(&pair[0], &pair[1]) {
                marked.push(i + 1);
                self.learn(&pair[0], &pair[1]);
            }
        }
        marked
    }

    /// Runtime check on the executed action stream, which crosses intention
    /// boundaries. Learns the pair either way.
    pub fn check_runtime_demand(&mut self, previous: &Predecessor, next: &Term) -> bool {
        match previous {
            Predecessor::Action(prev) => {
                let surprising = !self.expects(prev, next);
                self.learn(prev, next);
                surprising
            }
            Predecessor::Task(task) => {
                let surprising = !self.expects_first(task, next);
                self.learn_first(task, next);
                surprising
            }
        }
    }

    pub(crate) fn from_parts(
        user_id: String,
        matching: Matching,
        successors: BTreeMap<Term, BTreeSet<Term>>,
        task_links: BTreeMap<Term, BTreeSet<Term>>,
    ) -> Self {
        ExpectedSuccessorModel {
            user_id,
            matching,
            successors,
            task_links,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Empty,
    Cooccur,
    Tasklinked,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Empty => "empty",
            StrategyKind::Cooccur => "cooccur",
            StrategyKind::Tasklinked => "tasklinked",
        })
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "empty" => Ok(StrategyKind::Empty),
            "cooccur" => Ok(StrategyKind::Cooccur),
            "tasklinked" => Ok(StrategyKind::Tasklinked),
            other => Err(format!("unknown init strategy `{other}` (expected empty, cooccur or tasklinked)")),
        }
    }
}

pub const DEFAULT_COOCCURRENCE_THRESHOLD: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitStrategy {
    /// Every action is surprising the first time it follows another.
    Empty,
    /// Pairs seen consecutively at least `threshold` times across `history`.
    CoOccurrence {
        history: Vec<Vec<TraceRecord>>,
        threshold: usize,
    },
    /// Task goal (pattern) to the action expected to open it.
    TaskLinked(Vec<(Term, Term)>),
}

impl InitStrategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            InitStrategy::Empty => StrategyKind::Empty,
            InitStrategy::CoOccurrence { .. } => StrategyKind::Cooccur,
            InitStrategy::TaskLinked(_) => StrategyKind::Tasklinked,
        }
    }
}

/// Builds a fresh model for `user_id`.
pub fn init_expectations(
    user_id: &str,
    strategy: &InitStrategy,
    plans: &PlanLibrary,
) -> Result<ExpectedSuccessorModel, ExplainError> {
    let mut model = ExpectedSuccessorModel::new(user_id);
    match strategy {
        InitStrategy::Empty => {}
        InitStrategy::CoOccurrence { history, threshold } => {
            if history.is_empty() {
                return Err(ExplainError::MissingHistory);
            }
            let mut pairs: BTreeMap<(Predecessor, Term), usize> = BTreeMap::new();
            for trace in history {
                for (prev, next) in executed_pairs(trace)? {
                    *pairs.entry((prev, next)).or_default() += 1;
                }
            }
            for ((prev, next), n) in pairs {
                if n >= (*threshold).max(1) {
                    match prev {
                        Predecessor::Task(t) => model.learn_first(&t, &next),
                        Predecessor::Action(a) => model.learn(&a, &next),
                    };
                }
            }
        }
        InitStrategy::TaskLinked(links) => {
            for (task, first) in links {
                let goal = Trigger::goal(task.clone());
                if plans.relevant_plans(&goal).next().is_none() {
                    return Err(ExplainError::UnknownTask(task.clone()));
                }
                model.learn_first(task, first);
            }
        }
    }
    Ok(model)
}

impl PartialOrd for Predecessor {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Predecessor {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |p: &Predecessor| match p {
            Predecessor::Task(t) => (0, t.clone()),
            Predecessor::Action(t) => (1, t.clone()),
        };
        key(self).cmp(&key(other))
    }
}

/// Consecutive (predecessor, action) pairs of the executed action stream.
/// The stream restarts with a task predecessor at every root adoption.
pub fn executed_pairs(trace: &[TraceRecord]) -> Result<Vec<(Predecessor, Term)>, ExplainError> {
    let mut out = Vec::new();
    let mut prev: Option<Predecessor> = None;
    for r in trace {
        match r.kind {
            RecordKind::Adopt if r.parent.is_none() => {
                let trigger = crate::lang::parse_trigger(&r.payload)
                    .map_err(|e| ExplainError::BadHistory(format!("step {}: {e}", r.step)))?;
                prev = Some(Predecessor::Task(trigger.payload));
            }
            RecordKind::Action => {
                let action: Term = r
                    .payload
                    .parse()
                    .map_err(|e| ExplainError::BadHistory(format!("step {}: {e}", r.step)))?;
                if let Some(p) = prev.take() {
                    out.push((p, action.clone()));
                }
                prev = Some(Predecessor::Action(action));
            }
            _ => {}
        }
    }
    Ok(out)
}
