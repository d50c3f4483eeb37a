//! Work limits for the exhaustive searches.
//!
//! A node budget keeps results reproducible; a wall-clock budget is offered
//! for interactive use and makes the `exact` flag timing dependent.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn nodes(n: u64) -> Self {
        Self {
            max_nodes: Some(n),
            max_time: None,
        }
    }

    pub fn seconds(s: f64) -> Self {
        Self {
            max_nodes: None,
            max_time: Some(Duration::from_secs_f64(s.max(0.0))),
        }
    }

    pub fn with_nodes(mut self, n: u64) -> Self {
        self.max_nodes = Some(n);
        self
    }

    pub fn meter(&self) -> Meter {
        Meter {
            max_nodes: self.max_nodes,
            deadline: self.max_time.map(|d| Instant::now() + d),
            nodes: AtomicU64::new(0),
            stopped: AtomicBool::new(false),
        }
    }
}

/// Shared node counter. Cheap enough to tick from every search node and
/// safe to share between worker threads.
#[derive(Debug)]
pub struct Meter {
    max_nodes: Option<u64>,
    deadline: Option<Instant>,
    nodes: AtomicU64,
    stopped: AtomicBool,
}

impl Meter {
    /// Counts one node; returns `false` once the budget is spent.
    pub fn tick(&self) -> bool {
        if self.stopped.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over_nodes = self.max_nodes.is_some_and(|max| n > max);
        // Checking the clock on every node is measurable; every 1024 is plenty.
        let over_time =
            n.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d);
        if over_nodes || over_time {
            self.stopped.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    pub fn exhausted(&self) -> bool {
        self.stopped.load(Ordering::Relaxed)
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    /// A node cap is only reproducible if the searches it meters run in a
    /// fixed order.
    pub fn node_capped(&self) -> bool {
        self.max_nodes.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_budget_stops() {
        let m = Budget::nodes(3).meter();
        assert!(m.tick() && m.tick() && m.tick());
        assert!(!m.tick());
        assert!(m.exhausted());
        assert!(!m.tick());
    }

    #[test]
    fn unlimited_never_stops() {
        let m = Budget::unlimited().meter();
        for _ in 0..10_000 {
            assert!(m.tick());
        }
        assert_eq!(m.nodes(), 10_000);
    }
}
