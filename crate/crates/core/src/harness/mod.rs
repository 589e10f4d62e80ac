//! Experiment harness: runs planners on sampled queries, validates every
//! returned path, and aggregates per-planner statistics.

pub mod corpus;
mod output;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cspace::{Config, Scenario, ScenarioError};
use crate::preprocess::{load_library, preprocess, Library, LibraryError, PreprocessError};
use crate::query::{query, update_potential_index, PotentialStateIndex, QueryRequest};
use crate::search::{ara_star, astar, shortcut_path, Goal, Path, RefineReport};

pub use output::{emit_results, read_trials_csv, TrialRow, TRIALS_COLUMNS};

pub const EXPERIMENT_FORMAT_VERSION: u32 = 1;
/// Initial inflation and decrement for the from-scratch ARA* baseline.
pub const ARA_W0: f64 = 50.0;
pub const ARA_DW: f64 = 5.0;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error("invalid experiment: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlannerKind {
    #[serde(rename = "ctmp")]
    Ctmp,
    #[serde(rename = "ctmp+refine")]
    CtmpRefine,
    #[serde(rename = "ctmp+shortcut")]
    CtmpShortcut,
    #[serde(rename = "astar")]
    Astar,
    #[serde(rename = "wastar")]
    Wastar,
    #[serde(rename = "arastar")]
    Arastar,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 6] = [
        PlannerKind::Ctmp,
        PlannerKind::CtmpRefine,
        PlannerKind::CtmpShortcut,
        PlannerKind::Astar,
        PlannerKind::Wastar,
        PlannerKind::Arastar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Ctmp => "ctmp",
            PlannerKind::CtmpRefine => "ctmp+refine",
            PlannerKind::CtmpShortcut => "ctmp+shortcut",
            PlannerKind::Astar => "astar",
            PlannerKind::Wastar => "wastar",
            PlannerKind::Arastar => "arastar",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown planner {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every query starts at home.
    Single,
    /// Queries alternate between regions, each starting at the previous goal.
    Sequential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    FixedMs(u64),
    /// Uniform over the inclusive range, drawn per query.
    RangeMs([u64; 2]),
}

fn default_wastar_weight() -> f64 {
    5.0
}

/// One experiment, as read from a JSON file. Relative paths are resolved
/// against the file's directory by [`ExperimentConfig::load`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub format_version: u32,
    pub scenario: PathBuf,
    /// Preprocessed library; built in memory with `preprocess_seed` if absent.
    #[serde(default)]
    pub library: Option<PathBuf>,
    #[serde(default)]
    pub preprocess_seed: u64,
    pub mode: Mode,
    pub trials: u32,
    pub budget: Budget,
    pub planners: Vec<PlannerKind>,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default = "default_wastar_weight")]
    pub wastar_weight: f64,
    /// Leave wall-clock columns out of `trials.csv` (they go to
    /// `timings.csv`) so the file is byte-reproducible.
    #[serde(default)]
    pub deterministic_output: bool,
}

impl ExperimentConfig {
    pub fn new(
        mode: Mode,
        trials: u32,
        budget: Budget,
        planners: Vec<PlannerKind>,
        seed: u64,
    ) -> Self {
        ExperimentConfig {
            format_version: EXPERIMENT_FORMAT_VERSION,
            scenario: PathBuf::new(),
            library: None,
            preprocess_seed: 0,
            mode,
            trials,
            budget,
            planners,
            seed,
            output_dir: PathBuf::from("results"),
            wastar_weight: default_wastar_weight(),
            deterministic_output: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.check()?;
        Ok(c)
    }

    pub fn load(path: &FsPath) -> Result<Self, HarnessError> {
        let mut c = Self::from_json(&std::fs::read_to_string(path)?)?;
        let dir = path.parent().unwrap_or(FsPath::new(""));
        c.scenario = dir.join(&c.scenario);
        c.library = c.library.map(|l| dir.join(l));
        c.output_dir = dir.join(&c.output_dir);
        Ok(c)
    }

    pub fn check(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Invalid(m.into()));
        if self.format_version != EXPERIMENT_FORMAT_VERSION {
            return bad(&format!(
                "unsupported format_version {}",
                self.format_version
            ));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        match self.budget {
            Budget::FixedMs(0) => return bad("budget must be positive"),
            Budget::RangeMs([lo, hi]) if lo == 0 || hi < lo => {
                return bad("budget range must be positive and ordered")
            }
            _ => {}
        }
        if self.planners.is_empty() {
            return bad("no planners");
        }
        if self.wastar_weight < 1.0 {
            return bad("wastar_weight must be at least 1");
        }
        Ok(())
    }
}

/// One point of a planner's cost-over-time curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub time_ms: f64,
    pub cost: f64,
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u32,
    pub planner: PlannerKind,
    pub start: Config,
    pub goal: Config,
    pub budget_ms: u64,
    /// A path was returned and re-validated against the scenario.
    pub success: bool,
    pub cost: Option<f64>,
    pub plan_ms: f64,
    pub n_iterations: u32,
    pub final_epsilon: Option<f64>,
    pub optimal: bool,
    /// Cost of the lookup-built path, for library planners.
    pub initial_cost: Option<f64>,
    /// Optimal cost from an unbounded A* run.
    pub oracle_cost: Option<f64>,
    pub error: Option<String>,
    pub profile: Vec<ProfileSample>,
    #[serde(skip)]
    pub refine: Option<RefineReport>,
    #[serde(skip)]
    pub path: Option<Path>,
}

impl TrialRecord {
    pub fn suboptimality(&self) -> Option<f64> {
        match (self.cost, self.oracle_cost) {
            (Some(c), Some(o)) if self.success && o > 0.0 => Some(c / o),
            (Some(_), Some(_)) if self.success => Some(1.0),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub planner: PlannerKind,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Instances solved by every planner in the comparison.
    pub common_solved: usize,
    pub mean_cost: f64,
    pub mean_plan_ms: f64,
    pub std_plan_ms: f64,
    pub mean_suboptimality: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub stats: Vec<SummaryStats>,
}

/// Trial ids solved by every planner in `planners` with a known oracle cost.
pub fn common_solved(records: &[TrialRecord], planners: &[PlannerKind]) -> BTreeSet<u32> {
    let mut solved: BTreeMap<u32, BTreeSet<PlannerKind>> = BTreeMap::new();
    for r in records {
        if r.success && r.oracle_cost.is_some() && planners.contains(&r.planner) {
            solved.entry(r.trial_id).or_default().insert(r.planner);
        }
    }
    let want: BTreeSet<_> = planners.iter().copied().collect();
    solved
        .into_iter()
        .filter(|(_, p)| *p == want)
        .map(|(t, _)| t)
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return if xs.is_empty() { f64::NAN } else { 0.0 };
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Per-planner statistics. Success rate counts every trial; cost, time and
/// suboptimality are averaged over the instances every listed planner solved.
pub fn summarize(records: &[TrialRecord], planners: &[PlannerKind]) -> Vec<SummaryStats> {
    let common = common_solved(records, planners);
    planners
        .iter()
        .map(|&p| {
            let mine: Vec<_> = records.iter().filter(|r| r.planner == p).collect();
            let successes = mine.iter().filter(|r| r.success).count();
            let shared: Vec<_> = mine
                .iter()
                .filter(|r| r.success && common.contains(&r.trial_id))
                .collect();
            let costs: Vec<f64> = shared.iter().filter_map(|r| r.cost).collect();
            let times: Vec<f64> = shared.iter().map(|r| r.plan_ms).collect();
            let subs: Vec<f64> = shared.iter().filter_map(|r| r.suboptimality()).collect();
            SummaryStats {
                planner: p,
                trials: mine.len(),
                successes,
                success_rate: if mine.is_empty() {
                    0.0
                } else {
                    100.0 * successes as f64 / mine.len() as f64
                },
                common_solved: shared.len(),
                mean_cost: mean(&costs),
                mean_plan_ms: mean(&times),
                std_plan_ms: std_dev(&times),
                mean_suboptimality: mean(&subs),
            }
        })
        .collect()
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

struct Trial<'a> {
    scenario: &'a Scenario,
    library: &'a Library,
    index: &'a PotentialStateIndex,
    trial_id: u32,
    start: &'a Config,
    goal: &'a Config,
    budget_ms: u64,
    oracle_cost: Option<f64>,
    shortcut_seed: u64,
    wastar_weight: f64,
}

impl Trial<'_> {
    fn blank(&self, planner: PlannerKind) -> TrialRecord {
        TrialRecord {
            trial_id: self.trial_id,
            planner,
            start: self.start.clone(),
            goal: self.goal.clone(),
            budget_ms: self.budget_ms,
            success: false,
            cost: None,
            plan_ms: 0.0,
            n_iterations: 0,
            final_epsilon: None,
            optimal: false,
            initial_cost: None,
            oracle_cost: self.oracle_cost,
            error: None,
            profile: Vec::new(),
            refine: None,
            path: None,
        }
    }

    fn run(&self, planner: PlannerKind) -> TrialRecord {
        let mut rec = self.blank(planner);
        let budget = Duration::from_millis(self.budget_ms);
        let t0 = Instant::now();
        let deadline = t0 + budget;
        let request = QueryRequest::new(self.start.clone(), self.goal.clone(), budget);
        let outcome: Result<Path, String> = match planner {
            PlannerKind::Ctmp => query(
                self.scenario,
                self.library,
                self.index,
                &request.without_refinement(),
            )
            .map(|r| {
                rec.initial_cost = Some(r.initial_cost);
                r.path
            })
            .map_err(|e| e.to_string()),
            PlannerKind::CtmpRefine => query(self.scenario, self.library, self.index, &request)
                .map(|r| {
                    rec.initial_cost = Some(r.initial_cost);
                    rec.profile.push(ProfileSample {
                        time_ms: ms(r.initial_time()),
                        cost: r.initial_cost,
                        epsilon: None,
                    });
                    if let Some(rep) = &r.refine_report {
                        rec.n_iterations = rep.iterations.len() as u32;
                        rec.final_epsilon = rep.final_epsilon();
                        rec.optimal = rep.optimal;
                        rec.profile
                            .extend(rep.iterations.iter().filter(|i| i.completed).map(|i| {
                                ProfileSample {
                                    time_ms: i.elapsed_ms,
                                    cost: i.cost,
                                    epsilon: Some(i.epsilon),
                                }
                            }));
                    }
                    rec.refine = r.refine_report;
                    r.path
                })
                .map_err(|e| e.to_string()),
            PlannerKind::CtmpShortcut => query(
                self.scenario,
                self.library,
                self.index,
                &request.without_refinement(),
            )
            .map(|r| {
                rec.initial_cost = Some(r.initial_cost);
                rec.profile.push(ProfileSample {
                    time_ms: ms(t0.elapsed()),
                    cost: r.initial_cost,
                    epsilon: None,
                });
                shortcut_path(self.scenario, &r.path, Some(deadline), self.shortcut_seed)
            })
            .map_err(|e| e.to_string()),
            PlannerKind::Astar | PlannerKind::Wastar => {
                let w = if planner == PlannerKind::Astar {
                    1.0
                } else {
                    self.wastar_weight
                };
                rec.n_iterations = 1;
                rec.final_epsilon = Some(w);
                rec.optimal = w == 1.0;
                astar(
                    self.scenario,
                    self.start,
                    Goal::Exact(self.goal),
                    w,
                    Some(deadline),
                )
                .map_err(|e| e.to_string())
            }
            PlannerKind::Arastar => ara_star(
                self.scenario,
                self.start,
                self.goal,
                ARA_W0,
                ARA_DW,
                Some(deadline),
            )
            .map(|(p, prof)| {
                rec.n_iterations = prof.iterations.len() as u32;
                rec.final_epsilon = prof.iterations.last().map(|i| i.weight);
                rec.optimal = prof.optimal;
                rec.profile
                    .extend(prof.iterations.iter().map(|i| ProfileSample {
                        time_ms: i.elapsed_ms,
                        cost: i.cost,
                        epsilon: Some(i.weight),
                    }));
                p
            })
            .map_err(|e| e.to_string()),
        };
        rec.plan_ms = ms(t0.elapsed());
        match outcome {
            Ok(path) => match path.validate(self.scenario) {
                Ok(()) if path.connects(self.start, self.goal) => {
                    rec.success = true;
                    rec.cost = Some(path.cost());
                    if rec.profile.last().is_none_or(|s| s.cost != path.cost()) {
                        rec.profile.push(ProfileSample {
                            time_ms: rec.plan_ms,
                            cost: path.cost(),
                            epsilon: rec.final_epsilon,
                        });
                    }
                    rec.path = Some(path);
                }
                Ok(()) => rec.error = Some("path does not connect start and goal".into()),
                Err(e) => rec.error = Some(format!("invalid path: {e}")),
            },
            Err(e) => {
                rec.error = Some(e);
                rec.optimal = false;
            }
        }
        rec
    }
}

fn draw_budget(budget: Budget, rng: &mut ChaCha8Rng) -> u64 {
    match budget {
        Budget::FixedMs(b) => b,
        Budget::RangeMs([lo, hi]) => rng.gen_range(lo..=hi),
    }
}

fn oracle(scenario: &Scenario, start: &Config, goal: &Config) -> Option<f64> {
    astar(scenario, start, Goal::Exact(goal), 1.0, None)
        .ok()
        .map(|p| p.cost())
}

#[allow(clippy::too_many_arguments)]
fn run_trial_set(
    scenario: &Scenario,
    library: &Library,
    index: &PotentialStateIndex,
    config: &ExperimentConfig,
    trial_id: u32,
    start: &Config,
    goal: &Config,
    budget_ms: u64,
) -> Vec<TrialRecord> {
    let trial = Trial {
        scenario,
        library,
        index,
        trial_id,
        start,
        goal,
        budget_ms,
        oracle_cost: oracle(scenario, start, goal),
        shortcut_seed: config
            .seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(trial_id as u64),
        wastar_weight: config.wastar_weight,
    };
    config.planners.iter().map(|&p| trial.run(p)).collect()
}

fn check_library(scenario: &Scenario, library: &Library) -> Result<(), HarnessError> {
    if library.fingerprint != scenario.fingerprint() {
        return Err(HarnessError::Invalid(
            "library was built for a different scenario".into(),
        ));
    }
    Ok(())
}

/// Queries from home to covered goals sampled uniformly with `config.seed`.
pub fn run_single_experiment(
    scenario: &Scenario,
    library: &Library,
    config: &ExperimentConfig,
) -> Result<ExperimentOutput, HarnessError> {
    config.check()?;
    check_library(scenario, library)?;
    let goals: Vec<Config> = library.covered_states().into_iter().collect();
    if goals.is_empty() {
        return Err(HarnessError::Invalid("library covers no goals".into()));
    }
    let index = PotentialStateIndex::new(library);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut records = Vec::new();
    for t in 0..config.trials {
        let goal = &goals[rng.gen_range(0..goals.len())];
        let budget = draw_budget(config.budget, &mut rng);
        records.extend(run_trial_set(
            scenario,
            library,
            &index,
            config,
            t,
            &scenario.home,
            goal,
            budget,
        ));
    }
    let stats = summarize(&records, &config.planners);
    Ok(ExperimentOutput { records, stats })
}

/// A chain of queries cycling through the regions in order: the first starts
/// at a random covered state of region 0 and every later one starts at the
/// previous goal. The first successful planner's path is registered as the
/// executed path after each query.
pub fn run_sequential_experiment(
    scenario: &Scenario,
    library: &Library,
    config: &ExperimentConfig,
) -> Result<ExperimentOutput, HarnessError> {
    config.check()?;
    check_library(scenario, library)?;
    let n = library.regions.len();
    if n < 2 {
        return Err(HarnessError::Invalid(
            "sequential mode needs at least two regions".into(),
        ));
    }
    let per_region: Vec<Vec<Config>> = (0..n)
        .map(|r| library.covered_states_in(r).into_iter().collect())
        .collect();
    if let Some(r) = per_region.iter().position(Vec::is_empty) {
        return Err(HarnessError::Invalid(format!(
            "region {:?} has no covered states",
            scenario.regions[r].id
        )));
    }
    let mut index = PotentialStateIndex::new(library);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut start = per_region[0][rng.gen_range(0..per_region[0].len())].clone();
    let mut records = Vec::new();
    for t in 0..config.trials {
        let pool = &per_region[(t as usize + 1) % n];
        let goal = pool[rng.gen_range(0..pool.len())].clone();
        let budget = draw_budget(config.budget, &mut rng);
        let set = run_trial_set(scenario, library, &index, config, t, &start, &goal, budget);
        if let Some(p) = set.iter().find_map(|r| r.path.as_ref()) {
            // a path the planner just returned always starts at a potential state
            let _ = update_potential_index(scenario, library, &mut index, p);
        }
        records.extend(set);
        start = goal;
    }
    let stats = summarize(&records, &config.planners);
    Ok(ExperimentOutput { records, stats })
}

/// Loads the scenario and library named by `config` (preprocessing in memory
/// when no library is given) and runs the configured mode.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let scenario = Scenario::from_json(&std::fs::read_to_string(&config.scenario)?)?;
    let library = match &config.library {
        Some(p) => load_library(
            &mut std::io::BufReader::new(std::fs::File::open(p)?),
            &scenario,
        )?,
        None => preprocess(&scenario, config.preprocess_seed)?,
    };
    match config.mode {
        Mode::Single => run_single_experiment(&scenario, &library, config),
        Mode::Sequential => run_sequential_experiment(&scenario, &library, config),
    }
}
