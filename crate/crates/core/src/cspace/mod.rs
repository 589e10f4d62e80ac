//! Discrete configuration spaces: planar N-link arms and 2D occupancy grids.
//!
//! A [`Scenario`] fixes the lattice (per-dimension resolution and wrapping),
//! the workspace obstacles, the home configuration and the goal regions. All
//! operations here are pure functions of the scenario.
//!
//! Lattice contract: the only actions are single-DOF `±1` index moves. Every
//! move has a strictly positive cost taken from the scenario's [`CostModel`],
//! which keeps the weighted Manhattan [`Scenario::heuristic`] consistent.

mod geometry;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use geometry::{point_segment_dist_sq, Obstacle, Point, Rect};

use crate::instrument;

/// Current version of the scenario document schema.
pub const SCENARIO_FORMAT_VERSION: u32 = 1;

/// A lattice point: one integer index per degree of freedom.
///
/// The derived ordering is lexicographic, which is also the rank order used
/// for deterministic tie-breaking throughout the crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Config(pub Vec<i32>);

impl Config {
    pub fn new(coords: impl Into<Vec<i32>>) -> Self {
        Config(coords.into())
    }

    pub fn dof(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid configuration literal {0:?}")]
pub struct ParseConfigError(String);

impl FromStr for Config {
    type Err = ParseConfigError;

    /// Accepts integers separated by commas and/or whitespace: `"3,4"`, `"3 4"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coords = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ParseConfigError(s.to_string()))?;
        if coords.is_empty() {
            return Err(ParseConfigError(s.to_string()));
        }
        Ok(Config(coords))
    }
}

/// Optional `[lo, hi)` limit on a revolute joint, in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointLimit {
    pub lo: f64,
    pub hi: f64,
}

/// Planar serial arm with revolute joints. Joint angles are relative to the
/// previous link; joint `d` index `i` maps to angle `i * 2π / joints_per_rev`
/// (or `lo + i * 2π / joints_per_rev` when the joint is limited).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    pub link_lengths: Vec<f64>,
    pub base: Point,
    pub joints_per_rev: u32,
    /// Empty means every joint is continuous; otherwise one entry per joint.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub joint_limits: Vec<Option<JointLimit>>,
}

impl ArmModel {
    pub fn new(link_lengths: Vec<f64>, joints_per_rev: u32) -> Self {
        ArmModel {
            link_lengths,
            base: [0.0, 0.0],
            joints_per_rev,
            joint_limits: Vec::new(),
        }
    }

    fn limit(&self, joint: usize) -> Option<JointLimit> {
        self.joint_limits.get(joint).copied().flatten()
    }

    fn step(&self) -> f64 {
        std::f64::consts::TAU / self.joints_per_rev as f64
    }

    fn dim(&self, joint: usize) -> Dim {
        match self.limit(joint) {
            None => Dim {
                size: self.joints_per_rev,
                wraps: true,
            },
            Some(l) => Dim {
                size: (((l.hi - l.lo) / self.step()) - 1e-9).ceil().max(0.0) as u32,
                wraps: false,
            },
        }
    }

    pub fn joint_angle(&self, joint: usize, index: i32) -> f64 {
        let lo = self.limit(joint).map_or(0.0, |l| l.lo);
        lo + index as f64 * self.step()
    }
}

/// Forward kinematics: the base followed by each link's endpoint.
pub fn forward_kinematics(arm: &ArmModel, q: &Config) -> Vec<Point> {
    let mut pts = Vec::with_capacity(arm.link_lengths.len() + 1);
    let mut p = arm.base;
    let mut heading = 0.0_f64;
    pts.push(p);
    for (j, len) in arm.link_lengths.iter().enumerate() {
        heading += arm.joint_angle(j, q.0[j]);
        let (s, c) = heading.sin_cos();
        p = [p[0] + len * c, p[1] + len * s];
        pts.push(p);
    }
    pts
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Unit cells; cell `(x, y)` spans `[x, x+1] × [y, y+1]` in workspace units.
    Grid {
        width: u32,
        height: u32,
    },
    Arm(ArmModel),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSet {
    /// `±1` on exactly one coordinate per move.
    #[default]
    SingleDof,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostModel {
    /// Every move costs one step.
    #[default]
    Unit,
    /// A move along dimension `d` costs `weights[d]` (all positive).
    PerDof { weights: Vec<f64> },
}

/// A goal region: the end-effector point (arm tip, or grid cell centre) must
/// lie inside `workspace_box`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub id: String,
    pub workspace_box: Rect,
}

impl RegionSpec {
    pub fn new(id: impl Into<String>, workspace_box: Rect) -> Self {
        RegionSpec {
            id: id.into(),
            workspace_box,
        }
    }

    /// Grid region covering the inclusive cell ranges `xs` × `ys`.
    pub fn cells(id: impl Into<String>, xs: (i32, i32), ys: (i32, i32)) -> Self {
        Self::new(
            id,
            Rect::new(
                [xs.0 as f64, ys.0 as f64],
                [(xs.1 + 1) as f64, (ys.1 + 1) as f64],
            ),
        )
    }
}

/// Size and topology of one lattice dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dim {
    pub size: u32,
    pub wraps: bool,
}

impl Dim {
    /// Shortest signed index offset from `from` to `to`.
    pub fn delta(&self, from: i32, to: i32) -> i32 {
        let raw = to - from;
        if !self.wraps {
            return raw;
        }
        let n = self.size as i32;
        let d = raw.rem_euclid(n);
        if d <= n / 2 {
            d
        } else {
            d - n
        }
    }

    pub fn step(&self, from: i32, dir: i32) -> Option<i32> {
        let next = from + dir;
        if self.wraps {
            Some(next.rem_euclid(self.size as i32))
        } else if (0..self.size as i32).contains(&next) {
            Some(next)
        } else {
            None
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed scenario document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported scenario format_version {0} (expected {SCENARIO_FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("home configuration {0} is not valid")]
    HomeInvalid(Config),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub format_version: u32,
    #[serde(default)]
    pub name: String,
    pub domain: Domain,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    pub home: Config,
    pub regions: Vec<RegionSpec>,
    #[serde(default)]
    pub actions: ActionSet,
    #[serde(default)]
    pub cost_model: CostModel,
}

impl Scenario {
    pub fn grid(width: u32, height: u32, home: Config) -> Self {
        Scenario {
            format_version: SCENARIO_FORMAT_VERSION,
            name: String::new(),
            domain: Domain::Grid { width, height },
            obstacles: Vec::new(),
            home,
            regions: Vec::new(),
            actions: ActionSet::SingleDof,
            cost_model: CostModel::Unit,
        }
    }

    pub fn arm(arm: ArmModel, home: Config) -> Self {
        Scenario {
            domain: Domain::Arm(arm),
            ..Self::grid(1, 1, home)
        }
    }

    pub fn with_obstacles(mut self, obstacles: impl IntoIterator<Item = Obstacle>) -> Self {
        self.obstacles.extend(obstacles);
        self
    }

    pub fn with_region(mut self, region: RegionSpec) -> Self {
        self.regions.push(region);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Parses and checks a scenario document.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = serde_json::from_str(text)?;
        s.check()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// SHA-256 over the canonical (compact JSON) encoding.
    pub fn fingerprint(&self) -> [u8; 32] {
        let canonical = serde_json::to_vec(self).expect("scenario serializes");
        let digest = Sha256::digest(&canonical);
        let mut out = [0u8; 32];
        out.copy_from_slice(digest.as_slice());
        out
    }

    /// Structural checks; does not require the home state to be valid.
    pub fn check_structure(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Invalid(m));
        if self.format_version != SCENARIO_FORMAT_VERSION {
            return Err(ScenarioError::UnsupportedVersion(self.format_version));
        }
        match &self.domain {
            Domain::Grid { width, height } => {
                if *width == 0 || *height == 0 {
                    return bad("grid dimensions must be positive".into());
                }
            }
            Domain::Arm(arm) => {
                if arm.link_lengths.is_empty() {
                    return bad("arm needs at least one link".into());
                }
                if arm.link_lengths.iter().any(|l| l.is_nan() || *l <= 0.0) {
                    return bad("link lengths must be positive".into());
                }
                if arm.joints_per_rev < 4 {
                    return bad("joints_per_rev must be at least 4".into());
                }
                if !arm.joint_limits.is_empty() && arm.joint_limits.len() != arm.link_lengths.len()
                {
                    return bad("joint_limits must be empty or have one entry per joint".into());
                }
                for d in 0..arm.link_lengths.len() {
                    if arm.dim(d).size == 0 {
                        return bad(format!("joint {d} limit admits no lattice index"));
                    }
                }
            }
        }
        if let CostModel::PerDof { weights } = &self.cost_model {
            if weights.len() != self.dof() || weights.iter().any(|w| w.is_nan() || *w <= 0.0) {
                return bad("per_dof cost weights must be positive, one per DOF".into());
            }
        }
        if self.home.dof() != self.dof() {
            return bad(format!(
                "home has {} coordinates, domain has {} DOF",
                self.home.dof(),
                self.dof()
            ));
        }
        if self.regions.is_empty() {
            return bad("at least one region is required".into());
        }
        for r in &self.regions {
            if r.workspace_box.area().is_nan() || r.workspace_box.area() <= 0.0 {
                return bad(format!("region {:?} has no area", r.id));
            }
        }
        let mut ids: Vec<&str> = self.regions.iter().map(|r| r.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.regions.len() {
            return bad("region ids must be unique".into());
        }
        Ok(())
    }

    /// Structural checks plus validity of the home configuration.
    pub fn check(&self) -> Result<(), ScenarioError> {
        self.check_structure()?;
        if !self.is_valid(&self.home) {
            return Err(ScenarioError::HomeInvalid(self.home.clone()));
        }
        Ok(())
    }

    pub fn dof(&self) -> usize {
        match &self.domain {
            Domain::Grid { .. } => 2,
            Domain::Arm(arm) => arm.link_lengths.len(),
        }
    }

    pub fn dim(&self, d: usize) -> Dim {
        match &self.domain {
            Domain::Grid { width, height } => Dim {
                size: if d == 0 { *width } else { *height },
                wraps: false,
            },
            Domain::Arm(arm) => arm.dim(d),
        }
    }

    pub fn dims(&self) -> Vec<Dim> {
        (0..self.dof()).map(|d| self.dim(d)).collect()
    }

    pub fn num_states(&self) -> u64 {
        self.dims().iter().map(|d| d.size as u64).product()
    }

    /// True when `q` has the right arity and every coordinate is in range.
    pub fn in_lattice(&self, q: &Config) -> bool {
        q.dof() == self.dof()
            && q.0
                .iter()
                .enumerate()
                .all(|(d, &c)| c >= 0 && (c as u32) < self.dim(d).size)
    }

    /// Row-major lattice index, first coordinate most significant. Rank order
    /// equals lexicographic order on in-lattice configurations.
    pub fn rank(&self, q: &Config) -> u64 {
        let mut r = 0u64;
        for (d, &c) in q.0.iter().enumerate() {
            r = r * self.dim(d).size as u64 + c as u64;
        }
        r
    }

    pub fn unrank(&self, mut r: u64) -> Config {
        let dims = self.dims();
        let mut coords = vec![0i32; dims.len()];
        for d in (0..dims.len()).rev() {
            let n = dims[d].size as u64;
            coords[d] = (r % n) as i32;
            r /= n;
        }
        Config(coords)
    }

    /// All lattice points in rank order.
    pub fn lattice(&self) -> impl Iterator<Item = Config> + '_ {
        (0..self.num_states()).map(move |r| self.unrank(r))
    }

    pub fn edge_cost(&self, dim: usize) -> f64 {
        match &self.cost_model {
            CostModel::Unit => 1.0,
            CostModel::PerDof { weights } => weights[dim],
        }
    }

    /// End-effector point: last FK endpoint for arms, the cell centre for grids.
    pub fn end_effector(&self, q: &Config) -> Point {
        match &self.domain {
            Domain::Grid { .. } => [q.0[0] as f64 + 0.5, q.0[1] as f64 + 0.5],
            Domain::Arm(arm) => *forward_kinematics(arm, q).last().expect("arm has links"),
        }
    }

    /// Collision-free and inside the lattice (joint limits included).
    ///
    /// Grid cells are blocked when their centre lies in an obstacle. Arm links
    /// are tested as exact segments against every obstacle; self-collision is
    /// not modelled.
    pub fn is_valid(&self, q: &Config) -> bool {
        if !self.in_lattice(q) {
            return false;
        }
        instrument::count_collision_check();
        match &self.domain {
            Domain::Grid { .. } => {
                let c = self.end_effector(q);
                !self.obstacles.iter().any(|o| o.contains_point(c))
            }
            Domain::Arm(arm) => {
                let pts = forward_kinematics(arm, q);
                !pts.windows(2).any(|seg| {
                    self.obstacles
                        .iter()
                        .any(|o| o.hits_segment(seg[0], seg[1]))
                })
            }
        }
    }

    /// All lattice neighbours of `q` (single-DOF `±1` moves) without any
    /// validity filtering, with their move costs.
    pub fn neighbors(&self, q: &Config) -> Vec<(Config, f64)> {
        let mut out = Vec::with_capacity(2 * q.dof());
        for d in 0..q.dof() {
            let dim = self.dim(d);
            for dir in [-1, 1] {
                if let Some(c) = dim.step(q.0[d], dir) {
                    if c == q.0[d] {
                        continue;
                    }
                    let mut next = q.clone();
                    next.0[d] = c;
                    if !out.iter().any(|(o, _): &(Config, f64)| *o == next) {
                        out.push((next, self.edge_cost(d)));
                    }
                }
            }
        }
        out
    }

    /// Valid single-DOF moves out of `q`.
    pub fn successors(&self, q: &Config) -> Vec<(Config, f64)> {
        let mut out = self.neighbors(q);
        out.retain(|(n, _)| self.is_valid(n));
        out
    }

    /// Cost of the single edge between adjacent configurations, if they are
    /// adjacent on the lattice.
    pub fn step_cost(&self, a: &Config, b: &Config) -> Option<f64> {
        if a.dof() != b.dof() {
            return None;
        }
        let mut moved = None;
        for d in 0..a.dof() {
            let delta = self.dim(d).delta(a.0[d], b.0[d]);
            match (delta.abs(), moved) {
                (0, _) => {}
                (1, None) => moved = Some(d),
                _ => return None,
            }
        }
        moved.map(|d| self.edge_cost(d))
    }

    /// Weighted Manhattan lattice distance, using the shortest wrapped index
    /// difference on continuous joints. Consistent for the single-DOF action set.
    pub fn heuristic(&self, q: &Config, goal: &Config) -> f64 {
        (0..q.dof())
            .map(|d| self.dim(d).delta(q.0[d], goal.0[d]).abs() as f64 * self.edge_cost(d))
            .sum()
    }

    /// Squared Euclidean lattice distance (wrapped). Exact integer arithmetic;
    /// greedy descent compares these.
    pub fn navigation_sq(&self, q: &Config, attractor: &Config) -> i64 {
        (0..q.dof())
            .map(|d| {
                let k = self.dim(d).delta(q.0[d], attractor.0[d]) as i64;
                k * k
            })
            .sum()
    }

    /// Euclidean lattice distance to the attractor (wrapped per joint).
    pub fn navigation_value(&self, q: &Config, attractor: &Config) -> f64 {
        (self.navigation_sq(q, attractor) as f64).sqrt()
    }

    pub fn in_region(&self, region: &RegionSpec, q: &Config) -> bool {
        self.is_valid(q) && region.workspace_box.contains(self.end_effector(q))
    }

    pub fn region(&self, id: &str) -> Option<&RegionSpec> {
        self.regions.iter().find(|r| r.id == id)
    }

    /// Sum of edge costs along `configs`, or `None` if two consecutive
    /// configurations are not lattice neighbours.
    pub fn path_cost(&self, configs: &[Config]) -> Option<f64> {
        configs
            .windows(2)
            .map(|w| self.step_cost(&w[0], &w[1]))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn q(c: &[i32]) -> Config {
        Config::new(c.to_vec())
    }

    fn close(a: Point, b: Point) -> bool {
        (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12
    }

    #[test]
    fn fk_zero_angles_collinear() {
        let arm = ArmModel::new(vec![1.0, 1.0], 16);
        let pts = forward_kinematics(&arm, &q(&[0, 0]));
        assert!(close(pts[0], [0.0, 0.0]));
        assert!(close(pts[1], [1.0, 0.0]));
        assert!(close(pts[2], [2.0, 0.0]));
    }

    #[test]
    fn fk_quarter_turns() {
        let arm = ArmModel::new(vec![1.0], 16);
        let pts = forward_kinematics(&arm, &q(&[4]));
        assert!(close(pts[1], [0.0, 1.0]));

        let arm = ArmModel::new(vec![1.0, 1.0], 16);
        let pts = forward_kinematics(&arm, &q(&[4, 4]));
        assert!(close(pts[1], [0.0, 1.0]));
        assert!(close(pts[2], [-1.0, 1.0]));
    }

    #[test]
    fn fk_respects_base_and_limits() {
        let mut arm = ArmModel::new(vec![2.0], 8);
        arm.base = [1.0, 1.0];
        arm.joint_limits = vec![Some(JointLimit {
            lo: -PI / 2.0,
            hi: PI / 2.0,
        })];
        // indices 0..4 cover -90, -45, 0, 45 degrees; 90 is excluded by [lo, hi)
        assert_eq!(
            arm.dim(0),
            Dim {
                size: 4,
                wraps: false
            }
        );
        let pts = forward_kinematics(&arm, &q(&[2]));
        assert!(close(pts[1], [3.0, 1.0]));
    }

    #[test]
    fn empty_workspace_is_valid_everywhere() {
        let s = Scenario::arm(ArmModel::new(vec![1.0, 1.0], 16), q(&[0, 0]));
        assert!(s.lattice().all(|c| s.is_valid(&c)));
        let g = Scenario::grid(8, 8, q(&[0, 0]));
        assert!(g.lattice().all(|c| g.is_valid(&c)));
        assert!(!g.is_valid(&q(&[8, 0])));
        assert!(!g.is_valid(&q(&[-1, 0])));
        assert!(!g.is_valid(&q(&[1, 1, 1])));
    }

    #[test]
    fn grid_obstacle_blocks_cell() {
        let g = Scenario::grid(8, 8, q(&[0, 0]))
            .with_obstacles([Obstacle::rect([3.0, 3.0], [4.0, 4.0])]);
        assert!(!g.is_valid(&q(&[3, 3])));
        assert!(g.is_valid(&q(&[2, 3])));
        assert!(g.is_valid(&q(&[4, 4])));
    }

    #[test]
    fn arm_link_hits_circle_at_midpoint() {
        // first link from (0,0) to (1,0); its midpoint is (0.5, 0)
        let arm = ArmModel::new(vec![1.0, 1.0], 16);
        let s = Scenario::arm(arm.clone(), q(&[0, 0]))
            .with_obstacles([Obstacle::circle([0.5, 0.0], 0.1)]);
        assert!(!s.is_valid(&q(&[0, 0])));
        // pointing straight up, both links are at distance 0.5 from the centre
        assert!(s.is_valid(&q(&[4, 0])));
        // a circle offset 0.2 from the link line: clearance 0.2
        let s = Scenario::arm(arm, q(&[0, 0])).with_obstacles([Obstacle::circle([0.5, 0.2], 0.19)]);
        assert!(s.is_valid(&q(&[0, 0])));
        let s = s.with_obstacles([Obstacle::circle([0.5, 0.2], 0.21)]);
        assert!(!s.is_valid(&q(&[0, 0])));
    }

    #[test]
    fn grid_successors_clip_and_block() {
        let g = Scenario::grid(8, 8, q(&[0, 0]));
        let mut succ: Vec<_> = g.successors(&q(&[0, 0]));
        succ.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(succ, vec![(q(&[0, 1]), 1.0), (q(&[1, 0]), 1.0)]);

        let g = g.with_obstacles([Obstacle::rect([1.0, 2.0], [2.0, 3.0])]);
        assert_eq!(g.successors(&q(&[1, 1])).len(), 3);
    }

    #[test]
    fn arm_successors_wrap() {
        let s = Scenario::arm(ArmModel::new(vec![1.0, 1.0], 16), q(&[0, 0]));
        let succ = s.successors(&q(&[5, 9]));
        assert_eq!(succ.len(), 4);
        let succ: Vec<Config> = s
            .successors(&q(&[0, 15]))
            .into_iter()
            .map(|x| x.0)
            .collect();
        assert!(succ.contains(&q(&[15, 15])));
        assert!(succ.contains(&q(&[0, 0])));
    }

    #[test]
    fn heuristic_examples() {
        let g = Scenario::grid(8, 8, q(&[0, 0]));
        assert_eq!(g.heuristic(&q(&[2, 3]), &q(&[2, 3])), 0.0);
        assert_eq!(g.heuristic(&q(&[0, 0]), &q(&[3, 4])), 7.0);
        let s = Scenario::arm(ArmModel::new(vec![1.0], 16), q(&[0]));
        assert_eq!(s.heuristic(&q(&[15]), &q(&[0])), 1.0);
    }

    #[test]
    fn navigation_examples() {
        let g = Scenario::grid(8, 8, q(&[0, 0]));
        assert_eq!(g.navigation_value(&q(&[3, 4]), &q(&[3, 4])), 0.0);
        assert_eq!(g.navigation_value(&q(&[3, 4]), &q(&[0, 0])), 5.0);
        let s = Scenario::arm(ArmModel::new(vec![1.0], 16), q(&[0]));
        assert_eq!(s.navigation_value(&q(&[15]), &q(&[0])), 1.0);
    }

    #[test]
    fn region_membership() {
        let g = Scenario::grid(8, 8, q(&[0, 0]));
        let r = RegionSpec::cells("place", (6, 7), (6, 7));
        assert!(g.in_region(&r, &q(&[6, 7])));
        assert!(!g.in_region(&r, &q(&[0, 0])));

        let s = Scenario::arm(ArmModel::new(vec![1.0, 1.0], 16), q(&[0, 0]));
        let r = RegionSpec::new("tip", Rect::new([1.9, -0.1], [2.1, 0.1]));
        assert!(s.in_region(&r, &q(&[0, 0])));
        assert!(!s.in_region(&r, &q(&[1, 0])));
    }

    #[test]
    fn rank_is_lexicographic() {
        let s = Scenario::grid(5, 3, q(&[0, 0]));
        let all: Vec<Config> = s.lattice().collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        for c in &all {
            assert_eq!(s.unrank(s.rank(c)), *c);
        }
    }

    #[test]
    fn config_parse_and_display() {
        assert_eq!("3,4".parse::<Config>().unwrap(), q(&[3, 4]));
        assert_eq!(" 3  4 ".parse::<Config>().unwrap(), q(&[3, 4]));
        assert!("3,x".parse::<Config>().is_err());
        assert!("".parse::<Config>().is_err());
        assert_eq!(q(&[3, 4]).to_string(), "3 4");
    }

    #[test]
    fn scenario_checks() {
        let base =
            Scenario::grid(8, 8, q(&[0, 0])).with_region(RegionSpec::cells("a", (1, 1), (1, 1)));
        assert!(base.check().is_ok());
        let no_regions = Scenario::grid(8, 8, q(&[0, 0]));
        assert!(matches!(no_regions.check(), Err(ScenarioError::Invalid(_))));
        let blocked = base
            .clone()
            .with_obstacles([Obstacle::rect([0.0, 0.0], [1.0, 1.0])]);
        assert!(matches!(
            blocked.check(),
            Err(ScenarioError::HomeInvalid(_))
        ));
        let mut flat = base.clone();
        flat.regions[0].workspace_box = Rect::new([1.0, 1.0], [1.0, 5.0]);
        assert!(flat.check().is_err());
        let mut bad_arm = Scenario::arm(ArmModel::new(vec![1.0], 3), q(&[0]));
        bad_arm.regions = base.regions.clone();
        assert!(bad_arm.check().is_err());
        let mut v = base;
        v.format_version = 99;
        assert!(matches!(
            v.check(),
            Err(ScenarioError::UnsupportedVersion(99))
        ));
    }

    #[test]
    fn scenario_document_round_trip() {
        let mut arm = ArmModel::new(vec![1.0, 0.75], 24);
        arm.joint_limits = vec![None, Some(JointLimit { lo: -2.0, hi: 2.0 })];
        let s = Scenario::arm(arm, q(&[0, 8]))
            .with_name("arm")
            .with_obstacles([
                Obstacle::circle([1.5, 1.0], 0.2),
                Obstacle::rect([-2.0, -2.0], [-1.5, -1.0]),
            ])
            .with_region(RegionSpec::new("pick", Rect::new([1.0, -1.0], [1.8, -0.2])));
        let text = s.to_json();
        let back = Scenario::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
        assert_eq!(back.fingerprint(), s.fingerprint());
    }
}
