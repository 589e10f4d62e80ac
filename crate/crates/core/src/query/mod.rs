//! Online queries against a preprocessed library.
//!
//! The initial plan is built from lookups only: find the neighborhood that
//! holds the goal, take its representative path from home, and append the
//! reversed greedy descent from the goal to the attractor. The descent is
//! steered by neighborhood membership instead of collision checks; a member's
//! greedy step is always another member, and the lowest-navigation member
//! neighbour is exactly the step chosen at preprocessing time. A start other
//! than home is handled the same way and the two halves are joined through
//! home. Whatever budget is left goes to [`anytime_refine`].

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cspace::{Config, Scenario};
use crate::instrument::{self, Counters};
use crate::preprocess::{descend, CoverEntry, EntryId, Library};
use crate::search::{anytime_refine, Path, RefineReport, SearchError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("goal {0} is not covered by the library")]
    GoalUncovered(Config),
    #[error("start {0} is not a potential state")]
    StartNotPotential(Config),
    #[error("library is stale for this scenario: {0}")]
    StaleLibrary(String),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// How [`connect`] walks from a neighborhood member to its attractor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectMode {
    /// Follow neighborhood membership; no collision checks.
    #[default]
    Trusted,
    /// Re-run greedy descent with validity checks and re-validate the
    /// representative path. Detects a library that no longer matches the
    /// environment, at the price of collision checking.
    Verified,
}

/// The cover entry whose neighborhood contains `q`, lowest [`EntryId`] first.
/// Pure lookup.
pub fn find_rep_path<'a>(library: &'a Library, q: &Config) -> Option<(EntryId, &'a CoverEntry)> {
    library.entries().find(|(_, e)| e.neighborhood.contains(q))
}

fn trusted_descent(
    scenario: &Scenario,
    entry: &CoverEntry,
    q: &Config,
) -> Result<Vec<Config>, QueryError> {
    let nbhd = &entry.neighborhood;
    let attractor = &nbhd.attractor;
    if !nbhd.contains(q) {
        return Err(QueryError::StaleLibrary(format!(
            "{q} is not in the neighborhood of {attractor}"
        )));
    }
    let mut out = vec![q.clone()];
    let mut cur = q.clone();
    while cur != *attractor {
        if out.len() > nbhd.max_descent_steps as usize {
            return Err(QueryError::StaleLibrary(format!(
                "descent from {q} exceeds {} steps",
                nbhd.max_descent_steps
            )));
        }
        let here = scenario.navigation_sq(&cur, attractor);
        let next = scenario
            .neighbors(&cur)
            .into_iter()
            .map(|(n, _)| (scenario.navigation_sq(&n, attractor), n))
            .filter(|(v, n)| *v < here && nbhd.contains(n))
            .min()
            .map(|(_, n)| n)
            .ok_or_else(|| QueryError::StaleLibrary(format!("descent stalled at {cur}")))?;
        out.push(next.clone());
        cur = next;
    }
    Ok(out)
}

/// Extends the entry's representative path (home to attractor) to end at `q`,
/// a member of the entry's neighborhood.
pub fn connect(
    scenario: &Scenario,
    entry: &CoverEntry,
    q: &Config,
    mode: ConnectMode,
) -> Result<Path, QueryError> {
    let rep = entry.rep_path();
    let mut descent = match mode {
        ConnectMode::Trusted => trusted_descent(scenario, entry, q)?,
        ConnectMode::Verified => {
            rep.validate(scenario)
                .map_err(|e| QueryError::StaleLibrary(format!("representative path: {e}")))?;
            descend(
                scenario,
                q,
                entry.attractor(),
                entry.neighborhood.max_descent_steps,
            )
            .map_err(|e| QueryError::StaleLibrary(e.to_string()))?
            .configs()
            .to_vec()
        }
    };
    instrument::count_steps((rep.len() + descent.len() - 1) as u64);
    descent.reverse();
    let tail = Path::new(scenario, descent).expect("descent is a lattice path");
    Ok(rep.join(&tail).expect("descent ends at the attractor"))
}

/// Why a configuration is a potential state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Home,
    /// `index`-th state of the entry's representative path.
    OnRepPath {
        entry: EntryId,
        index: usize,
    },
    /// Member of the entry's neighborhood.
    InGoalRegion {
        entry: EntryId,
    },
    /// `index`-th state of the home-anchored version of the latest executed path.
    OnExecutedPath {
        index: usize,
    },
}

#[derive(Clone, Debug)]
struct ExecutedPath {
    /// Path from home to the start of the executed path, then the executed path.
    anchored: Path,
    positions: HashMap<Config, usize>,
}

/// Configurations a query may start from: home, states on representative
/// paths, covered goal states, and states of the most recently executed path.
///
/// Mutated between sequential queries; a single robot's queries must be
/// serialized by the caller.
#[derive(Clone, Debug)]
pub struct PotentialStateIndex {
    home: Config,
    on_rep_paths: HashMap<Config, (EntryId, usize)>,
    executed: Option<ExecutedPath>,
}

impl PotentialStateIndex {
    pub fn new(library: &Library) -> Self {
        let mut on_rep_paths = HashMap::new();
        for (id, entry) in library.entries() {
            for (i, c) in entry.rep_path().configs().iter().enumerate() {
                on_rep_paths.entry(c.clone()).or_insert((id, i));
            }
        }
        PotentialStateIndex {
            home: library.home.clone(),
            on_rep_paths,
            executed: None,
        }
    }

    /// Provenance of `q`, preferring the shortest route back to home:
    /// home, then representative paths, then covered goals, then the latest
    /// executed path.
    pub fn provenance(&self, library: &Library, q: &Config) -> Option<Provenance> {
        if *q == self.home {
            return Some(Provenance::Home);
        }
        if let Some(&(entry, index)) = self.on_rep_paths.get(q) {
            return Some(Provenance::OnRepPath { entry, index });
        }
        if let Some((entry, _)) = find_rep_path(library, q) {
            return Some(Provenance::InGoalRegion { entry });
        }
        self.executed
            .as_ref()
            .and_then(|e| e.positions.get(q))
            .map(|&index| Provenance::OnExecutedPath { index })
    }

    pub fn contains(&self, library: &Library, q: &Config) -> bool {
        self.provenance(library, q).is_some()
    }

    /// The latest executed path, anchored at home, if any.
    pub fn executed_path(&self) -> Option<&Path> {
        self.executed.as_ref().map(|e| &e.anchored)
    }
}

/// A path from home to the potential state `s`, without planning.
pub fn path_home_to(
    scenario: &Scenario,
    library: &Library,
    index: &PotentialStateIndex,
    s: &Config,
    mode: ConnectMode,
) -> Result<Path, QueryError> {
    match index.provenance(library, s) {
        Some(Provenance::Home) => Ok(Path::single(s.clone())),
        Some(Provenance::OnRepPath { entry, index: i }) => {
            let p = library.entry(entry).rep_path();
            instrument::count_steps(i as u64 + 1);
            Ok(p.prefix(scenario, i + 1))
        }
        Some(Provenance::InGoalRegion { entry }) => {
            connect(scenario, library.entry(entry), s, mode)
        }
        Some(Provenance::OnExecutedPath { index: i }) => {
            let p = &index
                .executed
                .as_ref()
                .expect("provenance came from it")
                .anchored;
            instrument::count_steps(i as u64 + 1);
            Ok(p.prefix(scenario, i + 1))
        }
        None => Err(QueryError::StartNotPotential(s.clone())),
    }
}

/// Registers `executed` (a path returned by [`query`]) so the next query may
/// start anywhere along it. Replaces any previously registered path.
pub fn update_potential_index(
    scenario: &Scenario,
    library: &Library,
    index: &mut PotentialStateIndex,
    executed: &Path,
) -> Result<(), QueryError> {
    let anchor = path_home_to(
        scenario,
        library,
        index,
        executed.start(),
        ConnectMode::Trusted,
    )?;
    let anchored = anchor.join(executed)?;
    let mut positions = HashMap::new();
    for (i, c) in anchored.configs().iter().enumerate() {
        positions.entry(c.clone()).or_insert(i);
    }
    index.executed = Some(ExecutedPath {
        anchored,
        positions,
    });
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryRequest {
    pub start: Config,
    pub goal: Config,
    /// Total planning budget, counted from request receipt.
    pub budget: Duration,
    pub refine: bool,
    #[serde(default)]
    pub connect_mode: ConnectMode,
}

impl QueryRequest {
    pub fn new(start: Config, goal: Config, budget: Duration) -> Self {
        QueryRequest {
            start,
            goal,
            budget,
            refine: true,
            connect_mode: ConnectMode::Trusted,
        }
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub path: Path,
    pub initial_path: Path,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub lookup_time: Duration,
    pub connect_time: Duration,
    pub refine_time: Duration,
    pub epsilon_history: Vec<f64>,
    pub optimal: bool,
    pub refine_report: Option<RefineReport>,
    /// Work done before refinement started.
    #[serde(skip)]
    pub initial_counters: Counters,
}

impl QueryResult {
    /// Lookup plus connect time: the constant-time part of the query.
    pub fn initial_time(&self) -> Duration {
        self.lookup_time + self.connect_time
    }
}

/// Answers `request`: a lookup-built initial path, refined with whatever is
/// left of the budget when `request.refine` is set.
pub fn query(
    scenario: &Scenario,
    library: &Library,
    index: &PotentialStateIndex,
    request: &QueryRequest,
) -> Result<QueryResult, QueryError> {
    let t_start = Instant::now();
    let counters = Counters::snapshot();
    let mode = request.connect_mode;

    let (_, goal_entry) = find_rep_path(library, &request.goal)
        .ok_or_else(|| QueryError::GoalUncovered(request.goal.clone()))?;
    let start_known = request.start == library.home || index.contains(library, &request.start);
    if !start_known {
        return Err(QueryError::StartNotPotential(request.start.clone()));
    }
    let lookup_time = t_start.elapsed();

    let home_goal = connect(scenario, goal_entry, &request.goal, mode)?;
    let initial = if request.start == library.home {
        home_goal
    } else {
        let home_start = path_home_to(scenario, library, index, &request.start, mode)?;
        home_start.reversed().join(&home_goal)?
    };
    let connect_time = t_start.elapsed() - lookup_time;
    let initial_counters = Counters::since(counters);

    let (path, report) = if request.refine {
        let (p, r) = anytime_refine(
            scenario,
            &request.start,
            &request.goal,
            &initial,
            t_start,
            request.budget,
        )?;
        (p, Some(r))
    } else {
        (initial.clone(), None)
    };
    let refine_time = t_start.elapsed() - lookup_time - connect_time;
    Ok(QueryResult {
        initial_cost: initial.cost(),
        final_cost: path.cost(),
        lookup_time,
        connect_time,
        refine_time,
        epsilon_history: report
            .as_ref()
            .map(|r| r.epsilon_history.clone())
            .unwrap_or_default(),
        optimal: report.as_ref().is_some_and(|r| r.optimal),
        refine_report: report,
        initial_counters,
        path,
        initial_path: initial,
    })
}
