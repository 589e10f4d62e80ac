//! Weighted best-first search core shared by A*, ARA* and the seeded refiner.
//!
//! Nodes live in an arena keyed by configuration. OPEN is a lazy binary heap
//! rebuilt at the start of every iteration (the inflation factor changes
//! between iterations); stale heap entries are skipped on pop. A node closed
//! in the current iteration is never re-expanded: if its g-value improves it
//! is parked on INCONS instead.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use super::{Goal, Path};
use crate::cspace::{Config, Scenario};
use crate::instrument;

pub(crate) type NodeId = usize;

#[derive(Debug)]
pub(crate) struct Node {
    pub config: Config,
    rank: u64,
    pub g: f64,
    pub h: f64,
    pub parent: Option<NodeId>,
    pub open: bool,
    pub closed: bool,
    pub incons: bool,
}

#[derive(Debug)]
struct OpenEntry {
    f: f64,
    g: f64,
    rank: u64,
    id: NodeId,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenEntry {}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenEntry {
    // BinaryHeap pops the greatest entry: smallest f, then largest g, then
    // lexicographically smallest configuration.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.rank.cmp(&self.rank))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    GoalReached(NodeId),
    Exhausted,
    Timeout,
}

pub(crate) struct Engine<'a> {
    scenario: &'a Scenario,
    goal: Goal<'a>,
    pub nodes: Vec<Node>,
    lookup: HashMap<Config, NodeId>,
    heap: BinaryHeap<OpenEntry>,
    epsilon: f64,
    closed_list: Vec<NodeId>,
    incons_list: Vec<NodeId>,
    pub expansions: u64,
}

impl<'a> Engine<'a> {
    pub fn new(scenario: &'a Scenario, goal: Goal<'a>) -> Self {
        Engine {
            scenario,
            goal,
            nodes: Vec::new(),
            lookup: HashMap::new(),
            heap: BinaryHeap::new(),
            epsilon: 1.0,
            closed_list: Vec::new(),
            incons_list: Vec::new(),
            expansions: 0,
        }
    }

    pub fn node_id(&mut self, config: &Config) -> NodeId {
        if let Some(&id) = self.lookup.get(config) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            config: config.clone(),
            rank: self.scenario.rank(config),
            g: f64::INFINITY,
            h: self.goal.heuristic(self.scenario, config),
            parent: None,
            open: false,
            closed: false,
            incons: false,
        });
        self.lookup.insert(config.clone(), id);
        id
    }

    pub fn get(&self, config: &Config) -> Option<NodeId> {
        self.lookup.get(config).copied()
    }

    fn push(&mut self, id: NodeId) {
        let n = &self.nodes[id];
        self.heap.push(OpenEntry {
            f: n.g + self.epsilon * n.h,
            g: n.g,
            rank: n.rank,
            id,
        });
    }

    /// Puts `id` on OPEN keyed by its current g-value.
    pub fn open(&mut self, id: NodeId) {
        self.nodes[id].open = true;
        self.push(id);
    }

    /// Starts an iteration at inflation `epsilon`: rebuilds the heap keys.
    pub fn begin_iteration(&mut self, epsilon: f64) {
        self.epsilon = epsilon;
        self.heap.clear();
        let ids: Vec<NodeId> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].open)
            .collect();
        for id in ids {
            self.push(id);
        }
    }

    /// Empties CLOSED.
    pub fn clear_closed(&mut self) {
        for id in self.closed_list.drain(..) {
            self.nodes[id].closed = false;
        }
    }

    /// Moves INCONS onto OPEN (keys are rebuilt by the next iteration).
    pub fn merge_incons(&mut self) {
        for id in std::mem::take(&mut self.incons_list) {
            self.nodes[id].incons = false;
            self.nodes[id].open = true;
        }
    }

    pub fn open_nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.open)
    }

    /// Runs best-first expansions at the current inflation until the goal is
    /// the best node on OPEN, OPEN empties, or the deadline passes. The clock
    /// is read once per expansion.
    pub fn improve_path(&mut self, deadline: Option<Instant>) -> Outcome {
        loop {
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    return Outcome::Timeout;
                }
            }
            let Some(entry) = self.heap.pop() else {
                return Outcome::Exhausted;
            };
            let id = entry.id;
            {
                let n = &self.nodes[id];
                if !n.open || n.g != entry.g {
                    continue;
                }
                if self.goal.is_goal(&n.config) {
                    return Outcome::GoalReached(id);
                }
            }
            self.expand(id);
        }
    }

    fn expand(&mut self, id: NodeId) {
        instrument::count_expansion();
        self.expansions += 1;
        {
            let n = &mut self.nodes[id];
            n.open = false;
            n.closed = true;
        }
        self.closed_list.push(id);
        let g = self.nodes[id].g;
        let config = self.nodes[id].config.clone();
        for (succ, cost) in self.scenario.successors(&config) {
            let sid = self.node_id(&succ);
            let candidate = g + cost;
            let s = &mut self.nodes[sid];
            if candidate < s.g {
                s.g = candidate;
                s.parent = Some(id);
                if !s.closed {
                    self.open(sid);
                } else if !s.incons {
                    s.incons = true;
                    self.incons_list.push(sid);
                }
            }
        }
    }

    /// Follows parent pointers back from `id`.
    pub fn extract(&self, id: NodeId) -> Path {
        let mut configs = Vec::new();
        let mut cur = Some(id);
        while let Some(c) = cur {
            configs.push(self.nodes[c].config.clone());
            cur = self.nodes[c].parent;
        }
        configs.reverse();
        Path::new(self.scenario, configs).expect("parent chain is a lattice path")
    }
}
