//! Seeded scenario corpus used by the benchmarks and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cspace::{ArmModel, Config, Obstacle, Rect, RegionSpec, Scenario};

pub const GRID_SIZES: [u32; 5] = [8, 12, 16, 20, 24];
pub const GRID_DENSITIES: [f64; 4] = [0.0, 0.1, 0.2, 0.3];
pub const ARM_RESOLUTIONS: [u32; 3] = [16, 24, 32];
pub const ARM_DENSITIES: [f64; 3] = [0.0, 0.15, 0.3];

/// A `size x size` grid with home at the origin, a pick box along the bottom
/// right and a place box along the top right, cluttered with axis-aligned
/// blocks until at least `density` of the cells are blocked.
pub fn random_grid(size: u32, density: f64, seed: u64) -> Scenario {
    let n = size as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocked = vec![false; (n * n) as usize];
    let target = (density * (n * n) as f64).ceil() as usize;
    let mut count = 0;
    let mut obstacles = Vec::new();
    let mut attempts = 0;
    while count < target && attempts < 10_000 {
        attempts += 1;
        let (x0, y0) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (w, h) = (
            rng.gen_range(1..=3).min(n - x0),
            rng.gen_range(1..=3).min(n - y0),
        );
        if x0 == 0 && y0 == 0 {
            continue;
        }
        obstacles.push(Obstacle::rect(
            [x0 as f64, y0 as f64],
            [(x0 + w) as f64, (y0 + h) as f64],
        ));
        for x in x0..x0 + w {
            for y in y0..y0 + h {
                let cell = &mut blocked[(y * n + x) as usize];
                count += usize::from(!*cell);
                *cell = true;
            }
        }
    }
    let half = n / 2;
    let quarter = (n / 4).max(1);
    Scenario::grid(size, size, Config::new([0, 0]))
        .with_name(format!(
            "grid{size}-d{:02}",
            (density * 100.0).round() as u32
        ))
        .with_obstacles(obstacles)
        .with_region(RegionSpec::cells("pick", (half, n - 1), (0, quarter - 1)))
        .with_region(RegionSpec::cells(
            "place",
            (half, n - 1),
            (n - quarter, n - 1),
        ))
}

/// Two-link arm (links 1.0 and 0.8) at `joints_per_rev` steps per joint,
/// home stretched along +x. Circular clutter is added beyond the first
/// link's reach until at least `density` of the joint lattice is blocked;
/// circles that would split the free lattice are skipped.
pub fn random_arm(joints_per_rev: u32, density: f64, seed: u64) -> Scenario {
    let arm = ArmModel::new(vec![1.0, 0.8], joints_per_rev);
    let mut s = Scenario::arm(arm, Config::new([0, 0]))
        .with_name(format!(
            "arm{joints_per_rev}-d{:02}",
            (density * 100.0).round() as u32
        ))
        .with_region(RegionSpec::new("pick", Rect::new([0.2, 0.6], [1.2, 1.6])))
        .with_region(RegionSpec::new(
            "place",
            Rect::new([-1.6, -0.8], [-0.6, 0.4]),
        ));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = s.num_states() as f64;
    let mut blocked = 0usize;
    let mut attempts = 0;
    while (blocked as f64) < density * total && attempts < 10_000 {
        attempts += 1;
        let r = rng.gen_range(0.08..0.2);
        let rho = rng.gen_range(1.05 + r..1.8);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let c = Obstacle::circle([rho * theta.cos(), rho * theta.sin()], r);
        let mut probe = s.clone();
        probe.obstacles.push(c);
        let free = probe.lattice().filter(|q| probe.is_valid(q)).count();
        if !probe.is_valid(&probe.home) || reachable_count(&probe) != free {
            continue;
        }
        blocked = total as usize - free;
        s = probe;
    }
    s
}

fn reachable_count(s: &Scenario) -> usize {
    let mut seen = std::collections::HashSet::from([s.home.clone()]);
    let mut stack = vec![s.home.clone()];
    while let Some(q) = stack.pop() {
        for (n, _) in s.successors(&q) {
            if seen.insert(n.clone()) {
                stack.push(n);
            }
        }
    }
    seen.len()
}

/// The coverage corpus: every grid size and density, every arm resolution
/// and density.
pub fn corpus() -> Vec<Scenario> {
    let mut out = Vec::new();
    for (i, &size) in GRID_SIZES.iter().enumerate() {
        for (j, &d) in GRID_DENSITIES.iter().enumerate() {
            out.push(random_grid(size, d, 1000 + (i * 10 + j) as u64));
        }
    }
    for (i, &res) in ARM_RESOLUTIONS.iter().enumerate() {
        for (j, &d) in ARM_DENSITIES.iter().enumerate() {
            out.push(random_arm(res, d, 2000 + (i * 10 + j) as u64));
        }
    }
    out
}

/// Open grid for sequential pick and place: the two boxes sit next to each
/// other in the far corner, so going back through home is a long detour.
pub fn open_sequential() -> Scenario {
    Scenario::grid(24, 24, Config::new([0, 0]))
        .with_name("open-seq")
        .with_region(RegionSpec::cells("pick", (14, 17), (18, 21)))
        .with_region(RegionSpec::cells("place", (19, 22), (18, 21)))
}

/// Large cluttered grid with home at the bottom of a cup that opens away from
/// both goal boxes. Searching from scratch toward a goal first floods the
/// cup; the library answers from a stored path.
pub fn trap(size: u32, clutter: usize, seed: u64) -> Scenario {
    let n = size as f64;
    let c = (size / 2) as f64;
    let s = (size as f64 * 0.66).floor() / 2.0;
    let walls = [
        Obstacle::rect([c - s, c + s], [c + s + 1.0, c + s + 1.0]),
        Obstacle::rect([c - s, c - s - 1.0], [c + s + 1.0, c - s]),
        Obstacle::rect([c + s, c - s], [c + s + 1.0, c + s]),
    ];
    let home = Config::new([size as i32 / 2, size as i32 / 2]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clutter_obs = Vec::with_capacity(clutter);
    while clutter_obs.len() < clutter {
        let center = [rng.gen_range(0.0..n), rng.gen_range(0.0..n)];
        let r = rng.gen_range(0.3..1.5);
        let o = Obstacle::circle(center, r);
        let hc = [c + 0.5, c + 0.5];
        if (center[0] - hc[0]).hypot(center[1] - hc[1]) > r + 2.0 {
            clutter_obs.push(o);
        }
    }
    let xi = size as i32;
    let ci = size as i32 / 2;
    Scenario::grid(size, size, home)
        .with_name(format!("trap{size}"))
        .with_obstacles(walls)
        .with_obstacles(clutter_obs)
        .with_region(RegionSpec::cells(
            "pick",
            (xi - 12, xi - 3),
            (ci - 20, ci - 11),
        ))
        .with_region(RegionSpec::cells(
            "place",
            (xi - 12, xi - 3),
            (ci + 10, ci + 19),
        ))
}

/// The stress scenarios used for baseline comparisons under a tight budget.
pub fn hard_scenarios() -> Vec<Scenario> {
    vec![trap(600, 300, 7), trap(640, 400, 11)]
}
