//! A scenario run for one user: agent, world, and that user's profile.
//! Shared by batch runs and the interactive shell so both produce the same
//! trace for the same inputs.

use std::path::PathBuf;

use thiserror::Error;

use crate::agent::{Agent, RunStatus};
use crate::explain::{init_expectations, ExplainError, ExplanationStyle, Explainer, StrategyKind};
use crate::profile::{load_profile, save_profile, Profile, ProfileError};
use crate::world::{RecordKind, Scenario, ScenarioError, TraceRecord, WorldState};

pub const DEFAULT_BUDGET: usize = 100;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("initializing expectations: {0}")]
    Init(#[from] ExplainError),
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub user: String,
    pub style: ExplanationStyle,
    /// Overrides the scenario's strategy for a fresh profile.
    pub init: Option<StrategyKind>,
    /// Profile store; `None` keeps the model in memory only.
    pub store: Option<PathBuf>,
    /// Discard any stored model and start over.
    pub reset: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            user: "default".into(),
            style: ExplanationStyle::default(),
            init: None,
            store: None,
            reset: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    /// At least one goal could not be achieved.
    Failed,
    BudgetExhausted,
}

#[derive(Debug)]
pub struct Session {
    pub agent: Agent,
    pub world: WorldState,
    pub scenario: Scenario,
    profile: Profile,
    store: Option<PathBuf>,
}

impl Session {
    pub fn open(scenario: Scenario, cfg: &SessionConfig) -> Result<Session, SessionError> {
        let stored = match (&cfg.store, cfg.reset) {
            (Some(path), false) => load_profile(path, &cfg.user)?,
            _ => None,
        };
        let profile = match stored {
            Some(p) => p,
            None => {
                let strategy = scenario.init.strategy(cfg.init)?;
                let model = init_expectations(&cfg.user, &strategy, &scenario.library)?;
                Profile::new(model, strategy.kind())
            }
        };
        let mut agent = Agent::new(scenario.library.clone());
        agent.explainer = Explainer::new(profile.model.clone(), cfg.style, scenario.lexicon.clone());
        agent.seed_beliefs(scenario.world.facts().iter().cloned());
        Ok(Session {
            agent,
            world: scenario.world.clone(),
            scenario,
            profile,
            store: cfg.store.clone(),
        })
    }

    /// Queues every order of the scenario, in file order.
    pub fn enqueue_orders(&mut self) {
        for o in self.scenario.orders.clone() {
            self.agent.order(o);
        }
    }

    pub fn step(&mut self) -> Option<TraceRecord> {
        self.agent.step(&mut self.world)
    }

    /// Steps until idle or `budget` steps; a finished run gets a closing
    /// `done` record.
    pub fn run(&mut self, budget: usize) -> Outcome {
        let out = self.agent.run_to_completion(&mut self.world, budget);
        match out.status {
            RunStatus::BudgetExhausted => Outcome::BudgetExhausted,
            RunStatus::Done => {
                self.finish();
                self.outcome()
            }
        }
    }

    /// Appends the closing record once the agent is idle.
    pub fn finish(&mut self) -> Option<TraceRecord> {
        let closed = matches!(self.agent.trace().last(), Some(r) if r.kind == RecordKind::Done && r.intention.is_none());
        (self.agent.is_idle() && !closed).then(|| self.agent.record(RecordKind::Done, ""))
    }

    pub fn outcome(&self) -> Outcome {
        if self.agent.trace().iter().any(|r| r.kind == RecordKind::Fail) {
            Outcome::Failed
        } else if self.agent.is_idle() {
            Outcome::Done
        } else {
            Outcome::BudgetExhausted
        }
    }

    pub fn trace(&self) -> &[TraceRecord] {
        self.agent.trace()
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Copies the learned model into the profile and persists it.
    pub fn save(&mut self) -> Result<(), SessionError> {
        self.profile.update(self.agent.explainer.model.clone());
        if let Some(path) = &self.store {
            save_profile(path, &self.profile)?;
        }
        Ok(())
    }
}
