//! Scenario files: a plan library, a lexicon, initial facts, and user orders.
//!
//! ```text
//! name = store_used_cup
//! plans = kitchen.plan
//! lexicon = kitchen.lex
//! init = tasklinked
//! history = runs/first.jsonl
//!
//! [facts]
//! dishwasherDoor(closed)
//!
//! [orders]
//! storeCup(cup1)
//!
//! [tags]
//! dishwasherDoor = env
//!
//! [links]
//! storeCup(C) -> navigateTo(dishwasher)
//! ```
//!
//! Paths are relative to the scenario file. `#` starts a comment line.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::explain::{InitStrategy, Lexicon, StrategyKind, DEFAULT_COOCCURRENCE_THRESHOLD};
use crate::lang::{parse_plan_library, parse_term, ParseError, PlanLibrary, Term, Trigger};

use super::{read_trace, Group, WorldState};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", .path.display())]
    Syntax { path: PathBuf, line: usize, message: String },
    #[error("{}: {source}", .path.display())]
    Plans {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{}: {source}", .path.display())]
    Lexicon {
        path: PathBuf,
        #[source]
        source: crate::explain::LexiconError,
    },
    #[error("{}: {source}", .path.display())]
    History {
        path: PathBuf,
        #[source]
        source: super::TraceError,
    },
    #[error("initial facts {0} and {1} are rival values of one state variable")]
    Inconsistent(Term, Term),
    #[error("initial fact {0} is not ground")]
    NonGroundFact(Term),
    #[error("order {0} has no relevant plan")]
    UnplannedOrder(Term),
    #[error("predicate `{0}` has no [tags] entry")]
    Untagged(String),
}

/// The scenario file as written, before anything it names is loaded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScenarioFile {
    pub name: String,
    pub plans: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub init: Option<StrategyKind>,
    pub history: Vec<PathBuf>,
    pub facts: Vec<Term>,
    pub orders: Vec<Term>,
    pub tags: Vec<(String, Group)>,
    pub links: Vec<(Term, Term)>,
}

/// How the scenario asks for the expectation model to be seeded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitChoice {
    pub kind: StrategyKind,
    pub links: Vec<(Term, Term)>,
    pub history: Vec<PathBuf>,
}

impl InitChoice {
    /// Loads history traces as needed. `kind` overrides the scenario's own.
    pub fn strategy(&self, kind: Option<StrategyKind>) -> Result<InitStrategy, ScenarioError> {
        Ok(match kind.unwrap_or(self.kind) {
            StrategyKind::Empty => InitStrategy::Empty,
            StrategyKind::Tasklinked => InitStrategy::TaskLinked(self.links.clone()),
            StrategyKind::Cooccur => {
                let mut history = Vec::new();
                for path in &self.history {
                    let file = fs::File::open(path).map_err(|source| ScenarioError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    let trace = read_trace(BufReader::new(file)).map_err(|source| ScenarioError::History {
                        path: path.clone(),
                        source,
                    })?;
                    history.push(trace);
                }
                InitStrategy::CoOccurrence {
                    history,
                    threshold: DEFAULT_COOCCURRENCE_THRESHOLD,
                }
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub library: PlanLibrary,
    pub lexicon: Lexicon,
    /// Initial world; the agent starts believing exactly these facts.
    pub world: WorldState,
    pub orders: Vec<Term>,
    pub init: InitChoice,
}

/// Parses scenario text. Relative paths are joined onto `base`.
pub fn parse_scenario(src: &str, path: &Path) -> Result<ScenarioFile, ScenarioError> {
    let base = path.parent().unwrap_or(Path::new(""));
    let mut doc = ScenarioFile {
        name: path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        ..Default::default()
    };
    let mut section: Option<&str> = None;
    let mut have_plans = false;
    for (n, raw) in src.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| ScenarioError::Syntax {
            path: path.to_path_buf(),
            line,
            message,
        };
        let term = |s: &str| parse_term(s.trim()).map_err(|e| err(e.to_string()));
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if let Some(name) = text.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name {
                "facts" => Some("facts"),
                "orders" => Some("orders"),
                "tags" => Some("tags"),
                "links" => Some("links"),
                other => return Err(err(format!("unknown section [{other}]"))),
            };
            continue;
        }
        match section {
            None => {
                let (key, value) = text
                    .split_once('=')
                    .ok_or_else(|| err("expected `key = value`".into()))?;
                let value = value.trim();
                match key.trim() {
                    "name" => doc.name = value.to_string(),
                    "plans" => {
                        doc.plans = base.join(value);
                        have_plans = true;
                    }
                    "lexicon" => doc.lexicon = Some(base.join(value)),
                    "init" => doc.init = Some(value.parse().map_err(err)?),
                    "history" => doc.history.push(base.join(value)),
                    other => return Err(err(format!("unknown key `{other}`"))),
                }
            }
            Some("facts") => doc.facts.push(term(text)?),
            Some("orders") => doc.orders.push(term(text)?),
            Some("tags") => {
                let (pred, group) = text
                    .split_once('=')
                    .ok_or_else(|| err("expected `predicate = group`".into()))?;
                doc.tags.push((pred.trim().to_string(), group.trim().parse().map_err(err)?));
            }
            Some(_) => {
                let (task, first) = text
                    .split_once("->")
                    .ok_or_else(|| err("expected `task -> action`".into()))?;
                doc.links.push((term(task)?, term(first)?));
            }
        }
    }
    if !have_plans {
        return Err(ScenarioError::Syntax {
            path: path.to_path_buf(),
            line: 0,
            message: "missing `plans = ...`".into(),
        });
    }
    Ok(doc)
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl ScenarioFile {
    /// Loads the plan library and lexicon and validates the initial state.
    pub fn load(self) -> Result<Scenario, ScenarioError> {
        let library = parse_plan_library(&read(&self.plans)?).map_err(|source| ScenarioError::Plans {
            path: self.plans.clone(),
            source,
        })?;
        let lexicon = match &self.lexicon {
            Some(p) => Lexicon::parse(&read(p)?).map_err(|source| ScenarioError::Lexicon {
                path: p.clone(),
                source,
            })?,
            None => Lexicon::default(),
        };
        let mut world = WorldState::new(library.fluents.clone());
        for (pred, group) in &self.tags {
            world.tag(pred.clone(), *group);
        }
        let tagged = |t: &Term| -> Result<(), ScenarioError> {
            let f = t.functor().unwrap_or_default();
            if world.group_of(f).is_none() {
                return Err(ScenarioError::Untagged(f.to_string()));
            }
            Ok(())
        };
        for fact in &self.facts {
            tagged(fact)?;
        }
        for schema in library.actions.values() {
            for e in schema.add_effects.iter().chain(&schema.del_effects) {
                tagged(&e.atom)?;
            }
        }
        for fact in self.facts {
            if !fact.is_ground() {
                return Err(ScenarioError::NonGroundFact(fact));
            }
            if let Some(old) = world.insert(fact.clone()) {
                return Err(ScenarioError::Inconsistent(old, fact));
            }
        }
        for order in &self.orders {
            if library.relevant_plans(&Trigger::goal(order.clone())).next().is_none() {
                return Err(ScenarioError::UnplannedOrder(order.clone()));
            }
        }
        Ok(Scenario {
            name: self.name,
            library,
            lexicon,
            world,
            orders: self.orders,
            init: InitChoice {
                kind: self.init.unwrap_or(StrategyKind::Empty),
                links: self.links,
                history: self.history,
            },
        })
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    parse_scenario(&read(path)?, path)?.load()
}
