//! Per-thread operation counters.
//!
//! Every validity check, search expansion and online path-building step bumps
//! a thread-local counter. Callers take a [`Counters::snapshot`] before and
//! after a piece of work and diff the two, which lets tests assert that the
//! online query path does no collision checking and no search.

use std::cell::Cell;

thread_local! {
    static COLLISION_CHECKS: Cell<u64> = const { Cell::new(0) };
    static EXPANSIONS: Cell<u64> = const { Cell::new(0) };
    static ELEMENTARY_STEPS: Cell<u64> = const { Cell::new(0) };
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub collision_checks: u64,
    pub expansions: u64,
    pub elementary_steps: u64,
}

impl Counters {
    pub fn snapshot() -> Self {
        Counters {
            collision_checks: COLLISION_CHECKS.with(Cell::get),
            expansions: EXPANSIONS.with(Cell::get),
            elementary_steps: ELEMENTARY_STEPS.with(Cell::get),
        }
    }

    /// Work done since `earlier` was taken on this thread.
    pub fn since(earlier: Counters) -> Self {
        let now = Self::snapshot();
        Counters {
            collision_checks: now.collision_checks - earlier.collision_checks,
            expansions: now.expansions - earlier.expansions,
            elementary_steps: now.elementary_steps - earlier.elementary_steps,
        }
    }
}

#[inline]
pub(crate) fn count_collision_check() {
    COLLISION_CHECKS.with(|c| c.set(c.get() + 1));
}

#[inline]
pub(crate) fn count_expansion() {
    EXPANSIONS.with(|c| c.set(c.get() + 1));
}

#[inline]
pub(crate) fn count_steps(n: u64) {
    ELEMENTARY_STEPS.with(|c| c.set(c.get() + n));
}
