//! Offline cover construction.
//!
//! For each goal region, every valid in-region configuration is enumerated up
//! front. Until none is left uncovered, an uncovered state is sampled
//! (preferring the frontier of the previous neighborhood), a representative
//! path from home is planned to it, and a neighborhood is grown around it:
//! the set of states whose greedy descent on the navigation function reaches
//! it. States with no path from home go into the region's exclusion set.

mod format;

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cspace::{Config, RegionSpec, Scenario, ScenarioError};
use crate::search::{astar, Goal, Path, SearchError};

pub use format::{load_library, save_library, LibraryError, LIBRARY_FORMAT_VERSION};

/// Inflation of the offline representative-path planner.
pub const REP_PATH_WEIGHT: f64 = 3.0;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("home configuration {0} is not valid")]
    HomeInvalid(Config),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("representative path planning failed: {0}")]
    Planner(#[from] SearchError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescentError {
    #[error("greedy descent stalled at {0}")]
    DescentStalled(Config),
    #[error("greedy descent exceeded {0} steps")]
    BoundExceeded(u32),
}

/// States from which greedy descent reaches `attractor`, stored as a sorted
/// set so online membership is a lookup with no collision checking.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub attractor: Config,
    pub members: BTreeSet<Config>,
    /// Longest greedy descent from any member.
    pub max_descent_steps: u32,
}

impl Neighborhood {
    pub fn contains(&self, q: &Config) -> bool {
        self.members.contains(q)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverEntry {
    pub neighborhood: Neighborhood,
    /// Paths from home to the attractor. This crate stores exactly one.
    pub rep_paths: Vec<Path>,
}

impl CoverEntry {
    pub fn attractor(&self) -> &Config {
        &self.neighborhood.attractor
    }

    pub fn rep_path(&self) -> &Path {
        &self.rep_paths[0]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCover {
    pub region_id: String,
    pub entries: Vec<CoverEntry>,
    /// Valid in-region states with no path from home.
    pub excluded: BTreeSet<Config>,
}

/// Identifies a cover entry; ordered by region, then by entry index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntryId {
    pub region: usize,
    pub entry: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Library {
    pub fingerprint: [u8; 32],
    pub seed: u64,
    pub home: Config,
    pub regions: Vec<RegionCover>,
}

impl Library {
    pub fn entry(&self, id: EntryId) -> &CoverEntry {
        &self.regions[id.region].entries[id.entry]
    }

    pub fn entries(&self) -> impl Iterator<Item = (EntryId, &CoverEntry)> {
        self.regions.iter().enumerate().flat_map(|(r, rc)| {
            rc.entries.iter().enumerate().map(move |(e, entry)| {
                (
                    EntryId {
                        region: r,
                        entry: e,
                    },
                    entry,
                )
            })
        })
    }

    /// Every covered configuration of every region, sorted and deduplicated.
    pub fn covered_states(&self) -> BTreeSet<Config> {
        self.entries()
            .flat_map(|(_, e)| e.neighborhood.members.iter().cloned())
            .collect()
    }

    pub fn covered_states_in(&self, region: usize) -> BTreeSet<Config> {
        self.regions[region]
            .entries
            .iter()
            .flat_map(|e| e.neighborhood.members.iter().cloned())
            .collect()
    }

    pub fn fingerprint_hex(&self) -> String {
        hex::encode(self.fingerprint)
    }
}

/// The valid successor with the smallest navigation value, ties broken by
/// lexicographic order, provided it strictly improves on `q`.
pub fn greedy_step(scenario: &Scenario, q: &Config, attractor: &Config) -> Option<Config> {
    let here = scenario.navigation_sq(q, attractor);
    let mut best: Option<(i64, Config)> = None;
    for (n, _) in scenario.neighbors(q) {
        let v = scenario.navigation_sq(&n, attractor);
        if v >= here {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bv, bc)) => v < *bv || (v == *bv && n < *bc),
        };
        if better && scenario.is_valid(&n) {
            best = Some((v, n));
        }
    }
    best.map(|(_, c)| c)
}

/// Follows [`greedy_step`] from `q` to `attractor`, failing if it stalls or
/// needs more than `step_bound` moves. Pure successor evaluation, no search.
pub fn descend(
    scenario: &Scenario,
    q: &Config,
    attractor: &Config,
    step_bound: u32,
) -> Result<Path, DescentError> {
    let mut configs = vec![q.clone()];
    let mut cur = q.clone();
    let mut steps = 0;
    while cur != *attractor {
        if steps == step_bound {
            return Err(DescentError::BoundExceeded(step_bound));
        }
        cur = greedy_step(scenario, &cur, attractor)
            .ok_or_else(|| DescentError::DescentStalled(cur.clone()))?;
        configs.push(cur.clone());
        steps += 1;
    }
    Ok(Path::new(scenario, configs).expect("greedy steps are lattice moves"))
}

/// Grows the maximal neighborhood of `attractor` among states accepted by
/// `admit`: a state joins iff its greedy step lands on a member. Greedy steps
/// form a tree rooted at the attractor, so a breadth-first walk down that
/// tree finds exactly those states. Also returns the frontier: valid
/// admissible states adjacent to members that were not admitted.
pub fn construct_neighborhood(
    scenario: &Scenario,
    attractor: &Config,
    admit: &dyn Fn(&Config) -> bool,
) -> (Neighborhood, BTreeSet<Config>) {
    let mut members = BTreeSet::from([attractor.clone()]);
    let mut steps: HashMap<Config, Option<Config>> = HashMap::new();
    let mut candidates = BTreeSet::new();
    let mut queue = VecDeque::from([(attractor.clone(), 0u32)]);
    let mut max_depth = 0;
    while let Some((m, depth)) = queue.pop_front() {
        max_depth = max_depth.max(depth);
        for (n, _) in scenario.neighbors(&m) {
            if members.contains(&n) || !admit(&n) || !scenario.is_valid(&n) {
                continue;
            }
            let step = steps
                .entry(n.clone())
                .or_insert_with(|| greedy_step(scenario, &n, attractor));
            if step.as_ref() == Some(&m) {
                members.insert(n.clone());
                queue.push_back((n, depth + 1));
            } else {
                candidates.insert(n);
            }
        }
    }
    let frontier = candidates.difference(&members).cloned().collect();
    (
        Neighborhood {
            attractor: attractor.clone(),
            members,
            max_descent_steps: max_depth,
        },
        frontier,
    )
}

/// Next attractor candidate: an uncovered state from the cached frontier if
/// any, otherwise a uniform draw from all uncovered states.
pub fn sample_valid_uncovered(
    uncovered: &BTreeSet<Config>,
    frontier: &BTreeSet<Config>,
    rng: &mut impl Rng,
) -> Option<Config> {
    let from_frontier: Vec<&Config> = frontier.iter().filter(|c| uncovered.contains(c)).collect();
    if !from_frontier.is_empty() {
        return Some(from_frontier[rng.gen_range(0..from_frontier.len())].clone());
    }
    if uncovered.is_empty() {
        return None;
    }
    uncovered
        .iter()
        .nth(rng.gen_range(0..uncovered.len()))
        .cloned()
}

/// Valid configurations whose end effector lies in `region`, in rank order.
pub fn enumerate_region(scenario: &Scenario, region: &RegionSpec) -> BTreeSet<Config> {
    scenario
        .lattice()
        .filter(|c| region.workspace_box.contains(scenario.end_effector(c)) && scenario.is_valid(c))
        .collect()
}

fn cover_region(
    scenario: &Scenario,
    region_index: usize,
    seed: u64,
) -> Result<RegionCover, PreprocessError> {
    let region = &scenario.regions[region_index];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(region_index as u64);
    let mut uncovered = enumerate_region(scenario, region);
    let mut frontier = BTreeSet::new();
    let mut entries = Vec::new();
    let mut excluded = BTreeSet::new();
    let in_region = |c: &Config| region.workspace_box.contains(scenario.end_effector(c));

    while let Some(sample) = sample_valid_uncovered(&uncovered, &frontier, &mut rng) {
        let rep = match astar(
            scenario,
            &scenario.home,
            Goal::Exact(&sample),
            REP_PATH_WEIGHT,
            None,
        ) {
            Ok(p) => p,
            Err(SearchError::NoPath) => {
                uncovered.remove(&sample);
                excluded.insert(sample);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let (nbhd, next_frontier) = construct_neighborhood(scenario, &sample, &in_region);
        for m in &nbhd.members {
            uncovered.remove(m);
        }
        frontier = next_frontier;
        entries.push(CoverEntry {
            neighborhood: nbhd,
            rep_paths: vec![rep],
        });
    }
    Ok(RegionCover {
        region_id: region.id.clone(),
        entries,
        excluded,
    })
}

/// Builds the cover library for every region of `scenario`. Deterministic
/// in `(scenario, seed)`; each region draws from its own RNG stream.
pub fn preprocess(scenario: &Scenario, seed: u64) -> Result<Library, PreprocessError> {
    scenario.check_structure()?;
    if !scenario.is_valid(&scenario.home) {
        return Err(PreprocessError::HomeInvalid(scenario.home.clone()));
    }
    let regions = (0..scenario.regions.len())
        .map(|r| cover_region(scenario, r, seed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Library {
        fingerprint: scenario.fingerprint(),
        seed,
        home: scenario.home.clone(),
        regions,
    })
}
