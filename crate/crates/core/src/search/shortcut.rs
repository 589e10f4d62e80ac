//! Randomized shortcutting baseline.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Path;
use crate::cspace::{Config, Scenario};

/// Consecutive non-improving trials before shortcutting gives up.
pub const SHORTCUT_MAX_STALL: usize = 100;

/// Staircase approximation of the straight segment from `a` to `b` using
/// single-DOF moves. Each step advances the dimension that lags furthest
/// behind its proportional share (lowest dimension on ties). Includes both
/// endpoints.
pub fn lattice_segment(scenario: &Scenario, a: &Config, b: &Config) -> Vec<Config> {
    let deltas: Vec<i32> = (0..a.dof())
        .map(|d| scenario.dim(d).delta(a.0[d], b.0[d]))
        .collect();
    let total: i32 = deltas.iter().map(|d| d.abs()).sum();
    let mut moved = vec![0i32; deltas.len()];
    let mut cur = a.clone();
    let mut out = Vec::with_capacity(total as usize + 1);
    out.push(cur.clone());
    for _ in 0..total {
        let mut pick = None;
        let mut best = f64::INFINITY;
        for (d, &delta) in deltas.iter().enumerate() {
            let n = delta.abs();
            if moved[d] < n {
                let progress = (moved[d] + 1) as f64 / n as f64;
                if progress < best {
                    best = progress;
                    pick = Some(d);
                }
            }
        }
        let d = pick.expect("remaining steps exist");
        moved[d] += 1;
        cur.0[d] = scenario
            .dim(d)
            .step(cur.0[d], deltas[d].signum())
            .expect("segment stays on the lattice");
        out.push(cur.clone());
    }
    out
}

/// Repeatedly picks two random indices and splices in the lattice segment
/// between them when every intermediate state is valid and the cost drops.
/// Stops at the deadline or after [`SHORTCUT_MAX_STALL`] straight failures.
pub fn shortcut_path(
    scenario: &Scenario,
    path: &Path,
    deadline: Option<Instant>,
    seed: u64,
) -> Path {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut configs = path.configs().to_vec();
    let mut stall = 0;
    while stall < SHORTCUT_MAX_STALL && configs.len() >= 3 {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let mut i = rng.gen_range(0..configs.len());
        let mut j = rng.gen_range(0..configs.len());
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        if j - i < 2 {
            stall += 1;
            continue;
        }
        let old = scenario
            .path_cost(&configs[i..=j])
            .expect("path is a lattice path");
        let seg = lattice_segment(scenario, &configs[i], &configs[j]);
        let new = scenario.path_cost(&seg).expect("segment is a lattice path");
        let interior = seg.get(1..seg.len().saturating_sub(1)).unwrap_or(&[]);
        if new < old && interior.iter().all(|c| scenario.is_valid(c)) {
            configs.splice(i..=j, seg);
            stall = 0;
        } else {
            stall += 1;
        }
    }
    Path::new(scenario, configs).expect("shortcutting preserves adjacency")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::{ArmModel, Obstacle};

    fn q(c: &[i32]) -> Config {
        Config::new(c.to_vec())
    }

    fn l_path(s: &Scenario) -> Path {
        let mut v: Vec<Config> = (0..8).map(|y| q(&[0, y])).collect();
        v.extend((1..8).map(|x| q(&[x, 7])));
        v.extend((0..7).rev().map(|y| q(&[7, y])));
        Path::new(s, v).unwrap()
    }

    #[test]
    fn segment_is_lattice_walk() {
        let s = Scenario::grid(8, 8, q(&[0, 0]));
        let seg = lattice_segment(&s, &q(&[0, 0]), &q(&[3, 6]));
        assert_eq!(seg.len(), 10);
        assert_eq!(seg.last().unwrap(), &q(&[3, 6]));
        assert!(s.path_cost(&seg).is_some());
    }

    #[test]
    fn segment_wraps_on_continuous_joints() {
        let s = Scenario::arm(ArmModel::new(vec![1.0, 1.0], 16), q(&[0, 0]));
        let seg = lattice_segment(&s, &q(&[15, 1]), &q(&[1, 15]));
        assert_eq!(seg.len(), 5);
        assert_eq!(s.path_cost(&seg), Some(4.0));
    }

    #[test]
    fn detour_shrinks_toward_manhattan() {
        let s = Scenario::grid(8, 8, q(&[0, 0]));
        let p = l_path(&s);
        assert_eq!(p.cost(), 21.0);
        let out = shortcut_path(&s, &p, None, 7);
        out.validate(&s).unwrap();
        assert!(out.connects(&q(&[0, 0]), &q(&[7, 0])));
        assert!(out.cost() < p.cost());
        assert!(out.cost() >= 7.0);
    }

    #[test]
    fn optimal_path_unchanged() {
        let s = Scenario::grid(8, 8, q(&[0, 0]));
        let p = Path::new(&s, (0..8).map(|x| q(&[x, 0])).collect()).unwrap();
        assert_eq!(shortcut_path(&s, &p, None, 1), p);
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let s = Scenario::grid(8, 8, q(&[0, 0]))
            .with_obstacles([Obstacle::rect([3.0, 2.0], [5.0, 5.0])]);
        let p = l_path(&s);
        let a = shortcut_path(&s, &p, None, 42);
        let b = shortcut_path(&s, &p, None, 42);
        assert_eq!(a, b);
        a.validate(&s).unwrap();
    }
}
