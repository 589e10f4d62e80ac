//! Path-seeded anytime refinement.
//!
//! OPEN starts out holding every state of the initial path at its path
//! g-value, so the goal is on OPEN from the first expansion with `h = 0`. The
//! inflation for each iteration is the largest value that still lets at least
//! one state beat the incumbent cost `C`:
//!
//! ```text
//! ratio(s) = (C - g(s)) / (h(s) + delta)
//! eps_0    = max over the path of ratio
//! eps_next = min(max over the path of ratio, max over OPEN of ratio)
//! ```
//!
//! both clamped below at 1. The update is strictly decreasing while it is
//! above 1, and a last iteration is always run at exactly 1, which makes the
//! final answer optimal when time allows.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::engine::{Engine, Outcome};
use super::{Goal, Path, SearchError};
use crate::cspace::{Config, Scenario};

/// Singularity guard in the inflation formula, in lattice-cost units.
pub const DEFAULT_DELTA: f64 = 1e-6;

fn ratio(c: f64, g: f64, h: f64, delta: f64) -> f64 {
    (c - g) / (h + delta)
}

fn max_ratio(samples: impl IntoIterator<Item = (f64, f64)>, c: f64, delta: f64) -> Option<f64> {
    samples
        .into_iter()
        .map(|(g, h)| ratio(c, g, h, delta))
        .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
}

/// Initial inflation from the `(g, h)` values of the incumbent path's states.
pub fn epsilon_init(path: &[(f64, f64)], c: f64, delta: f64) -> Result<f64, SearchError> {
    if path.len() < 2 {
        return Err(SearchError::DegeneratePath);
    }
    Ok(max_ratio(path.iter().copied(), c, delta)
        .unwrap_or(1.0)
        .max(1.0))
}

/// Inflation for the next iteration: the smaller of the path maximum and the
/// OPEN maximum. An empty OPEN falls back to the path maximum.
pub fn epsilon_update(path: &[(f64, f64)], open: &[(f64, f64)], c: f64, delta: f64) -> f64 {
    let on_path = max_ratio(path.iter().copied(), c, delta);
    let on_open = max_ratio(open.iter().copied(), c, delta);
    let e = match (on_path, on_open) {
        (Some(p), Some(o)) => p.min(o),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => 1.0,
    };
    e.max(1.0)
}

/// One weighted-A* iteration of a refinement run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub epsilon: f64,
    /// Incumbent cost after the iteration.
    pub cost: f64,
    pub expansions: u64,
    /// Time since the query started, at the end of the iteration.
    pub elapsed_ms: f64,
    /// False when the deadline interrupted the iteration.
    pub completed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineReport {
    pub initial_cost: f64,
    pub final_cost: f64,
    pub delta: f64,
    /// Inflation of every iteration that was started.
    pub epsilon_history: Vec<f64>,
    /// Incumbent cost after every completed iteration.
    pub iteration_costs: Vec<f64>,
    pub iterations: Vec<IterationRecord>,
    /// Incumbent after every completed iteration.
    #[serde(skip)]
    pub intermediate_paths: Vec<Path>,
    /// Set once an iteration at inflation 1 has completed.
    pub optimal: bool,
    pub timed_out: bool,
}

impl RefineReport {
    fn trivial(path: &Path, optimal: bool, timed_out: bool) -> Self {
        RefineReport {
            initial_cost: path.cost(),
            final_cost: path.cost(),
            delta: DEFAULT_DELTA,
            epsilon_history: Vec::new(),
            iteration_costs: Vec::new(),
            iterations: Vec::new(),
            intermediate_paths: Vec::new(),
            optimal,
            timed_out,
        }
    }

    pub fn final_epsilon(&self) -> Option<f64> {
        self.epsilon_history.last().copied()
    }
}

/// Refines `initial` (which must run from `start` to `goal`) until
/// `t_start + t_bound` or until an iteration at inflation 1 completes.
///
/// The returned path never costs more than `initial`. If the deadline has
/// already passed, `initial` is returned unchanged.
pub fn anytime_refine(
    scenario: &Scenario,
    start: &Config,
    goal: &Config,
    initial: &Path,
    t_start: Instant,
    t_bound: Duration,
) -> Result<(Path, RefineReport), SearchError> {
    if !initial.connects(start, goal) {
        return Err(SearchError::InvalidPath(
            "initial path does not connect start to goal".into(),
        ));
    }
    let deadline = t_start + t_bound;
    if initial.len() == 1 {
        return Ok((initial.clone(), RefineReport::trivial(initial, true, false)));
    }
    if Instant::now() >= deadline {
        return Ok((initial.clone(), RefineReport::trivial(initial, false, true)));
    }
    let delta = DEFAULT_DELTA;
    let mut engine = Engine::new(scenario, Goal::Exact(goal));

    // Seed OPEN with the path, relaxing along it so repeated states keep
    // their cheapest prefix and parent pointers stay consistent with g.
    let mut prev: Option<usize> = None;
    for cfg in initial.configs() {
        let id = engine.node_id(cfg);
        match prev {
            None => engine.nodes[id].g = 0.0,
            Some(p) => {
                let step = scenario
                    .step_cost(&engine.nodes[p].config, cfg)
                    .expect("initial path is a lattice path");
                let candidate = engine.nodes[p].g + step;
                if candidate < engine.nodes[id].g {
                    engine.nodes[id].g = candidate;
                    engine.nodes[id].parent = Some(p);
                }
            }
        }
        engine.nodes[id].open = true;
        prev = Some(id);
    }
    let goal_id = engine.get(goal).expect("goal is on the path");
    let mut incumbent = engine.extract(goal_id);
    let mut c = incumbent.cost();

    let path_samples = |engine: &Engine<'_>, path: &Path| -> Vec<(f64, f64)> {
        path.configs()
            .iter()
            .map(|cfg| {
                let n = &engine.nodes[engine.get(cfg).expect("path states are seeded")];
                (n.g, n.h)
            })
            .collect()
    };

    let mut report = RefineReport::trivial(initial, false, false);
    report.delta = delta;
    let mut epsilon = epsilon_init(&path_samples(&engine, &incumbent), c, delta)?;

    loop {
        if Instant::now() >= deadline {
            report.timed_out = true;
            break;
        }
        report.epsilon_history.push(epsilon);
        let before = engine.expansions;
        engine.begin_iteration(epsilon);
        let outcome = engine.improve_path(Some(deadline));
        let elapsed_ms = t_start.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Outcome::Timeout => {
                report.iterations.push(IterationRecord {
                    epsilon,
                    cost: c,
                    expansions: engine.expansions - before,
                    elapsed_ms,
                    completed: false,
                });
                report.timed_out = true;
                break;
            }
            Outcome::GoalReached(id) => {
                let candidate = engine.extract(id);
                if candidate.cost() <= incumbent.cost() {
                    incumbent = candidate;
                }
            }
            // OPEN ran dry without re-extracting the goal: keep the incumbent.
            Outcome::Exhausted => {}
        }
        c = incumbent.cost();
        report.iteration_costs.push(c);
        report.intermediate_paths.push(incumbent.clone());
        report.iterations.push(IterationRecord {
            epsilon,
            cost: c,
            expansions: engine.expansions - before,
            elapsed_ms,
            completed: true,
        });
        if epsilon <= 1.0 {
            report.optimal = true;
            break;
        }

        engine.clear_closed();
        let open: Vec<(f64, f64)> = engine.open_nodes().map(|n| (n.g, n.h)).collect();
        let mut next = epsilon_update(&path_samples(&engine, &incumbent), &open, c, delta);
        if next >= epsilon {
            // Only reachable with an empty OPEN; finish with the exact pass.
            next = 1.0;
        }
        engine.merge_incons();
        for cfg in incumbent.configs() {
            let id = engine.get(cfg).expect("path states are known");
            engine.nodes[id].open = true;
        }
        epsilon = next;
    }

    report.final_cost = incumbent.cost();
    Ok((incumbent, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::Obstacle;
    use crate::search::astar;

    fn q(c: &[i32]) -> Config {
        Config::new(c.to_vec())
    }

    fn path(s: &Scenario, pts: &[[i32; 2]]) -> Path {
        Path::new(s, pts.iter().map(|p| q(p)).collect()).unwrap()
    }

    /// Straight-line lattice walk through the given corners.
    fn via(s: &Scenario, corners: &[[i32; 2]]) -> Path {
        let mut pts = vec![corners[0]];
        for w in corners.windows(2) {
            let mut cur = w[0];
            while cur != w[1] {
                for d in 0..2 {
                    if cur[d] != w[1][d] {
                        cur[d] += (w[1][d] - cur[d]).signum();
                        break;
                    }
                }
                pts.push(cur);
            }
        }
        path(s, &pts)
    }

    #[test]
    fn init_formula() {
        let e = epsilon_init(&[(0.0, 6.0), (4.0, 2.0), (10.0, 0.0)], 10.0, 1e-6).unwrap();
        assert!((e - 6.0 / 2.000001).abs() < 1e-12);
        assert!((e - 3.0).abs() < 1e-5);
    }

    #[test]
    fn goal_never_maximizes() {
        // the goal contributes (C - C) / delta = 0
        let e = epsilon_init(&[(0.0, 0.5), (10.0, 0.0)], 10.0, 1e-6).unwrap();
        assert!((e - 10.0 / 0.500001).abs() < 1e-9);
    }

    #[test]
    fn init_clamps_at_one() {
        let e = epsilon_init(&[(0.0, 5.0), (1.0, 4.0), (5.0, 0.0)], 5.0, 1e-6).unwrap();
        assert_eq!(e, 1.0);
    }

    #[test]
    fn init_rejects_single_state() {
        assert_eq!(
            epsilon_init(&[(0.0, 0.0)], 0.0, 1e-6),
            Err(SearchError::DegeneratePath)
        );
    }

    #[test]
    fn init_satisfies_expansion_condition() {
        // the maximizing state has g + eps * h < C
        let samples = [(0.0, 6.0), (4.0, 2.0), (10.0, 0.0)];
        let c = 10.0;
        let e = epsilon_init(&samples, c, DEFAULT_DELTA).unwrap();
        assert!(samples.iter().any(|&(g, h)| h > 0.0 && g + e * h < c));
    }

    #[test]
    fn update_takes_min_of_maxima() {
        // path max: (10-5)/2 = 2.5 ; open max: (10-0)/2 = 5
        let path = [(5.0, 2.0 - 1e-6), (10.0, 0.0)];
        let open = [(0.0, 2.0 - 1e-6), (9.0, 1.0)];
        let e = epsilon_update(&path, &open, 10.0, 1e-6);
        assert!((e - 2.5).abs() < 1e-9);
        assert_eq!(
            epsilon_update(&[(10.0, 0.0)], &[(9.5, 1.0)], 10.0, 1e-6),
            1.0
        );
        assert!((epsilon_update(&path, &[], 10.0, 1e-6) - 2.5).abs() < 1e-9);
    }

    #[test]
    fn zero_budget_returns_initial() {
        let s = Scenario::grid(8, 8, q(&[0, 0]));
        let init = via(&s, &[[0, 0], [0, 7], [7, 7]]);
        let (p, r) = anytime_refine(
            &s,
            &q(&[0, 0]),
            &q(&[7, 7]),
            &init,
            Instant::now(),
            Duration::ZERO,
        )
        .unwrap();
        assert_eq!(p, init);
        assert!(r.epsilon_history.is_empty());
        assert!(!r.optimal);
    }

    #[test]
    fn detour_through_home_corner_collapses_to_manhattan() {
        let s = Scenario::grid(8, 8, q(&[0, 0]));
        // (5,2) -> home (0,0) -> (6,6): the V shape of a via-home plan
        let init = via(&s, &[[5, 2], [0, 2], [0, 0], [0, 6], [6, 6]]);
        assert_eq!(init.cost(), 19.0);
        let (p, r) = anytime_refine(
            &s,
            &q(&[5, 2]),
            &q(&[6, 6]),
            &init,
            Instant::now(),
            Duration::from_secs(10),
        )
        .unwrap();
        p.validate(&s).unwrap();
        assert!(p.connects(&q(&[5, 2]), &q(&[6, 6])));
        assert_eq!(p.cost(), 5.0);
        assert!(r.optimal);
        assert_eq!(r.final_epsilon(), Some(1.0));
        assert!(r.epsilon_history.windows(2).all(|w| w[1] < w[0]));
        assert!(r.iteration_costs.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.iteration_costs.len(), r.epsilon_history.len());
    }

    #[test]
    fn matches_optimal_around_wall() {
        let s = Scenario::grid(8, 8, q(&[0, 0]))
            .with_obstacles([Obstacle::rect([4.0, 1.0], [5.0, 8.0])]);
        let start = q(&[0, 7]);
        let goal = q(&[7, 7]);
        let init = via(&s, &[[0, 7], [0, 0], [7, 0], [7, 7]]);
        init.validate(&s).unwrap();
        let (p, r) = anytime_refine(
            &s,
            &start,
            &goal,
            &init,
            Instant::now(),
            Duration::from_secs(10),
        )
        .unwrap();
        let opt = astar(&s, &start, Goal::Exact(&goal), 1.0, None).unwrap();
        assert_eq!(p.cost(), opt.cost());
        assert!(r.optimal);
        for ip in &r.intermediate_paths {
            ip.validate(&s).unwrap();
            assert!(ip.connects(&start, &goal));
        }
    }

    #[test]
    fn looped_initial_path_is_loop_erased() {
        let s = Scenario::grid(8, 8, q(&[0, 0]));
        let init = path(&s, &[[0, 0], [1, 0], [2, 0], [1, 0], [1, 1]]);
        let (p, r) = anytime_refine(
            &s,
            &q(&[0, 0]),
            &q(&[1, 1]),
            &init,
            Instant::now(),
            Duration::from_secs(1),
        )
        .unwrap();
        assert_eq!(p.cost(), 2.0);
        assert!(r.final_cost <= r.initial_cost);
    }

    #[test]
    fn start_equals_goal() {
        let s = Scenario::grid(4, 4, q(&[0, 0]));
        let init = Path::single(q(&[1, 1]));
        let (p, r) = anytime_refine(
            &s,
            &q(&[1, 1]),
            &q(&[1, 1]),
            &init,
            Instant::now(),
            Duration::from_secs(1),
        )
        .unwrap();
        assert_eq!(p, init);
        assert!(r.optimal);
    }

    #[test]
    fn mismatched_endpoints_rejected() {
        let s = Scenario::grid(4, 4, q(&[0, 0]));
        let init = path(&s, &[[0, 0], [1, 0]]);
        assert!(anytime_refine(
            &s,
            &q(&[0, 0]),
            &q(&[2, 0]),
            &init,
            Instant::now(),
            Duration::from_secs(1)
        )
        .is_err());
    }
}
