//! Heuristic search over the configuration lattice.
//!
//! [`astar`] is plain (weighted) A*. [`anytime_refine`] improves an existing
//! solution by seeding OPEN with every state of the path and running weighted
//! A* iterations whose inflation is derived from the incumbent cost.
//! [`ara_star`] and [`shortcut_path`] are the baselines it is compared with.

mod arastar;
mod engine;
mod refine;
mod shortcut;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cspace::{Config, Scenario};
use engine::{Engine, Outcome};

pub use arastar::{ara_star, AraIteration, AraProfile};
pub use refine::{
    anytime_refine, epsilon_init, epsilon_update, IterationRecord, RefineReport, DEFAULT_DELTA,
};
pub use shortcut::{lattice_segment, shortcut_path, SHORTCUT_MAX_STALL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("deadline reached before a solution was found")]
    Timeout,
    #[error("no path exists")]
    NoPath,
    #[error("path has a single state")]
    DegeneratePath,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("start configuration {0} is not valid")]
    InvalidStart(Config),
}

/// An ordered sequence of lattice-adjacent configurations with its cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    configs: Vec<Config>,
    cost: f64,
}

impl Path {
    /// Builds a path, computing its cost. Fails if empty or if any two
    /// consecutive configurations are not lattice neighbours. Validity
    /// (collision) is not checked here; see [`Path::validate`].
    pub fn new(scenario: &Scenario, configs: Vec<Config>) -> Result<Self, SearchError> {
        if configs.is_empty() {
            return Err(SearchError::InvalidPath("empty".into()));
        }
        let cost = scenario
            .path_cost(&configs)
            .ok_or_else(|| SearchError::InvalidPath("non-adjacent consecutive states".into()))?;
        Ok(Path { configs, cost })
    }

    pub fn single(config: Config) -> Self {
        Path {
            configs: vec![config],
            cost: 0.0,
        }
    }

    pub fn configs(&self) -> &[Config] {
        &self.configs
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn start(&self) -> &Config {
        &self.configs[0]
    }

    pub fn end(&self) -> &Config {
        self.configs.last().expect("paths are non-empty")
    }

    pub fn reversed(&self) -> Path {
        let mut configs = self.configs.clone();
        configs.reverse();
        Path {
            configs,
            cost: self.cost,
        }
    }

    /// `self` followed by `next`, sharing the junction configuration once.
    pub fn join(&self, next: &Path) -> Result<Path, SearchError> {
        if self.end() != next.start() {
            return Err(SearchError::InvalidPath(format!(
                "cannot join: {} != {}",
                self.end(),
                next.start()
            )));
        }
        let mut configs = self.configs.clone();
        configs.extend_from_slice(&next.configs[1..]);
        Ok(Path {
            configs,
            cost: self.cost + next.cost,
        })
    }

    /// The first `len` states.
    pub fn prefix(&self, scenario: &Scenario, len: usize) -> Path {
        let configs = self.configs[..len.clamp(1, self.len())].to_vec();
        Path::new(scenario, configs).expect("prefix of a path is a path")
    }

    /// Full independent re-check: non-empty, lattice-adjacent steps, every
    /// state valid, cost consistent with the scenario's cost model.
    pub fn validate(&self, scenario: &Scenario) -> Result<(), SearchError> {
        if self.configs.is_empty() {
            return Err(SearchError::InvalidPath("empty".into()));
        }
        if let Some(bad) = self.configs.iter().find(|c| !scenario.is_valid(c)) {
            return Err(SearchError::InvalidPath(format!(
                "state {bad} is not valid"
            )));
        }
        let cost = scenario
            .path_cost(&self.configs)
            .ok_or_else(|| SearchError::InvalidPath("non-adjacent consecutive states".into()))?;
        if (cost - self.cost).abs() > 1e-9 * cost.max(1.0) {
            return Err(SearchError::InvalidPath(format!(
                "recorded cost {} differs from {cost}",
                self.cost
            )));
        }
        Ok(())
    }

    pub fn connects(&self, start: &Config, goal: &Config) -> bool {
        self.start() == start && self.end() == goal
    }
}

/// Goal condition for [`astar`].
#[derive(Clone, Copy)]
pub enum Goal<'a> {
    /// Reach exactly this configuration; guided by [`Scenario::heuristic`].
    Exact(&'a Config),
    /// Reach any configuration satisfying the predicate; zero heuristic.
    Where(&'a dyn Fn(&Config) -> bool),
}

impl Goal<'_> {
    pub fn is_goal(&self, q: &Config) -> bool {
        match self {
            Goal::Exact(g) => *g == q,
            Goal::Where(pred) => pred(q),
        }
    }

    pub fn heuristic(&self, scenario: &Scenario, q: &Config) -> f64 {
        match self {
            Goal::Exact(g) => scenario.heuristic(q, g),
            Goal::Where(_) => 0.0,
        }
    }
}

/// Weighted A* from `start`. With `weight == 1` the result is optimal;
/// otherwise its cost is within `weight` times optimal. Ties on f prefer
/// larger g, then the lexicographically smaller configuration.
pub fn astar(
    scenario: &Scenario,
    start: &Config,
    goal: Goal<'_>,
    weight: f64,
    deadline: Option<Instant>,
) -> Result<Path, SearchError> {
    assert!(weight >= 1.0, "weight must be at least 1");
    if !scenario.is_valid(start) {
        return Err(SearchError::InvalidStart(start.clone()));
    }
    let mut engine = Engine::new(scenario, goal);
    let id = engine.node_id(start);
    engine.nodes[id].g = 0.0;
    engine.begin_iteration(weight);
    engine.open(id);
    match engine.improve_path(deadline) {
        Outcome::GoalReached(g) => Ok(engine.extract(g)),
        Outcome::Exhausted => Err(SearchError::NoPath),
        Outcome::Timeout => Err(SearchError::Timeout),
    }
}
