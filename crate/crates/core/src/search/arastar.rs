//! Classic ARA* from scratch: no path seeding, fixed inflation decrement.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::engine::{Engine, Outcome};
use super::{Goal, Path, SearchError};
use crate::cspace::{Config, Scenario};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AraIteration {
    pub weight: f64,
    pub cost: f64,
    pub elapsed_ms: f64,
    pub expansions: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AraProfile {
    pub iterations: Vec<AraIteration>,
    /// True once the weight-1 iteration completed.
    pub optimal: bool,
}

/// Runs weighted A* iterations with weights `w0, w0 - dw, ...` down to 1,
/// carrying INCONS between iterations. Returns the best path found by the
/// deadline, or `Timeout` if no solution was found in time.
pub fn ara_star(
    scenario: &Scenario,
    start: &Config,
    goal: &Config,
    w0: f64,
    dw: f64,
    deadline: Option<Instant>,
) -> Result<(Path, AraProfile), SearchError> {
    assert!(w0 >= 1.0 && dw > 0.0, "need w0 >= 1 and dw > 0");
    let t0 = Instant::now();
    if !scenario.is_valid(start) {
        return Err(SearchError::InvalidStart(start.clone()));
    }
    let mut engine = Engine::new(scenario, Goal::Exact(goal));
    let id = engine.node_id(start);
    engine.nodes[id].g = 0.0;
    engine.nodes[id].open = true;

    let mut best: Option<Path> = None;
    let mut profile = AraProfile::default();
    let mut weight = w0;
    loop {
        let before = engine.expansions;
        engine.begin_iteration(weight);
        match engine.improve_path(deadline) {
            Outcome::GoalReached(g) => {
                let p = engine.extract(g);
                if best.as_ref().is_none_or(|b| p.cost() <= b.cost()) {
                    best = Some(p);
                }
            }
            Outcome::Exhausted => {
                if best.is_none() {
                    return Err(SearchError::NoPath);
                }
            }
            Outcome::Timeout => break,
        }
        profile.iterations.push(AraIteration {
            weight,
            cost: best.as_ref().map_or(f64::INFINITY, Path::cost),
            elapsed_ms: t0.elapsed().as_secs_f64() * 1e3,
            expansions: engine.expansions - before,
        });
        if weight <= 1.0 {
            profile.optimal = true;
            break;
        }
        weight = (weight - dw).max(1.0);
        engine.clear_closed();
        engine.merge_incons();
    }
    best.map(|p| (p, profile)).ok_or(SearchError::Timeout)
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::cspace::Obstacle;
    use crate::search::astar;

    fn q(c: &[i32]) -> Config {
        Config::new(c.to_vec())
    }

    fn scenario() -> Scenario {
        Scenario::grid(12, 12, q(&[0, 0])).with_obstacles([
            Obstacle::rect([3.0, 0.0], [4.0, 9.0]),
            Obstacle::rect([7.0, 3.0], [8.0, 12.0]),
        ])
    }

    #[test]
    fn first_iteration_within_weight_bound() {
        let s = scenario();
        let goal = q(&[11, 11]);
        let opt = astar(&s, &q(&[0, 0]), Goal::Exact(&goal), 1.0, None).unwrap();
        let (_, prof) = ara_star(&s, &q(&[0, 0]), &goal, 50.0, 5.0, None).unwrap();
        assert!(prof.iterations[0].cost <= 50.0 * opt.cost());
        assert_eq!(prof.iterations[0].weight, 50.0);
    }

    #[test]
    fn converges_to_optimal() {
        let s = scenario();
        let goal = q(&[11, 11]);
        let opt = astar(&s, &q(&[0, 0]), Goal::Exact(&goal), 1.0, None).unwrap();
        let (p, prof) = ara_star(&s, &q(&[0, 0]), &goal, 50.0, 5.0, None).unwrap();
        p.validate(&s).unwrap();
        assert_eq!(p.cost(), opt.cost());
        assert!(prof.optimal);
        assert_eq!(prof.iterations.last().unwrap().weight, 1.0);
        assert!(prof
            .iterations
            .windows(2)
            .all(|w| w[1].weight < w[0].weight));
        assert!(prof.iterations.windows(2).all(|w| w[1].cost <= w[0].cost));
    }

    #[test]
    fn zero_deadline_times_out() {
        let s = scenario();
        let r = ara_star(
            &s,
            &q(&[0, 0]),
            &q(&[11, 11]),
            50.0,
            5.0,
            Some(Instant::now()),
        );
        assert_eq!(r, Err(SearchError::Timeout));
        let r = ara_star(
            &s,
            &q(&[0, 0]),
            &q(&[11, 11]),
            50.0,
            5.0,
            Some(Instant::now() + Duration::from_secs(5)),
        );
        assert!(r.is_ok());
    }

    #[test]
    fn unreachable_goal() {
        let s = Scenario::grid(6, 6, q(&[0, 0]))
            .with_obstacles([Obstacle::rect([3.0, 0.0], [4.0, 6.0])]);
        assert_eq!(
            ara_star(&s, &q(&[0, 0]), &q(&[5, 5]), 50.0, 5.0, None),
            Err(SearchError::NoPath)
        );
    }
}
