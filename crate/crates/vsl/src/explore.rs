//! Bounded-exact reachability search: breadth-first shortest runs, run
//! enumeration, and bounded forward/backward reachability sets.
//!
//! Bounds truncate the search space, never falsify it: exceeding a bound can
//! only turn an answer into `NotReachableWithinBounds` or set the pruned flag.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num::BigUint;

use crate::vass::{Configuration, Run, TransId, Vass};

/// Truncation limits for a search. The norm bound applies to every
/// configuration on a run including its endpoints, so a search that finishes
/// without pruning has explored the exact reachability set.
#[derive(Debug, Clone, Default)]
pub struct SearchBounds {
    pub norm: Option<BigUint>,
    pub length: Option<usize>,
    pub nodes: Option<usize>,
}

impl SearchBounds {
    pub fn unbounded() -> SearchBounds {
        SearchBounds::default()
    }

    pub fn norm(bound: u64) -> SearchBounds {
        SearchBounds { norm: Some(BigUint::from(bound)), length: None, nodes: None }
    }

    pub fn with_length(mut self, len: usize) -> SearchBounds {
        self.length = Some(len);
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> SearchBounds {
        self.nodes = Some(nodes);
        self
    }

    fn norm_ok(&self, c: &Configuration) -> bool {
        match &self.norm {
            Some(b) => c.vec.iter().all(|x| x <= b),
            None => true,
        }
    }
}

/// Result of a bounded set exploration. `pruned` is false exactly when no
/// configuration was discarded for exceeding a bound, in which case `set` is
/// the full forward (or backward) reachability set.
#[derive(Debug, Clone)]
pub struct ReachSet {
    pub set: BTreeSet<Configuration>,
    pub pruned: bool,
}

impl ReachSet {
    pub fn contains(&self, c: &Configuration) -> bool {
        self.set.contains(c)
    }
}

#[derive(Debug, Clone, Copy)]
enum Direction {
    Forward,
    Backward,
}

fn explore(vass: &Vass, start: &Configuration, bounds: &SearchBounds, dir: Direction) -> ReachSet {
    let mut set = BTreeSet::new();
    let mut pruned = false;
    if !bounds.norm_ok(start) {
        return ReachSet { set, pruned: true };
    }
    let mut queue = VecDeque::new();
    set.insert(start.clone());
    queue.push_back((start.clone(), 0usize));
    let mut expanded = 0usize;
    while let Some((c, depth)) = queue.pop_front() {
        if let Some(max_len) = bounds.length {
            if depth >= max_len {
                // Frontier cut: deeper configurations may exist.
                pruned = true;
                continue;
            }
        }
        if let Some(max_nodes) = bounds.nodes {
            if expanded >= max_nodes {
                pruned = true;
                continue;
            }
        }
        expanded += 1;
        for t in 0..vass.transitions().len() {
            let stepped = match dir {
                Direction::Forward => vass.fire(&c, TransId(t)),
                Direction::Backward => vass.fire_backward(&c, TransId(t)),
            };
            let next = match stepped {
                Ok(next) => next,
                Err(_) => continue, // guard failure is not a prune
            };
            if !bounds.norm_ok(&next) {
                pruned = true;
                continue;
            }
            if set.insert(next.clone()) {
                queue.push_back((next, depth + 1));
            }
        }
    }
    ReachSet { set, pruned }
}

/// Configurations reachable from `c` by runs staying within the bounds.
pub fn post_bounded(vass: &Vass, c: &Configuration, bounds: &SearchBounds) -> ReachSet {
    explore(vass, c, bounds, Direction::Forward)
}

/// Configurations that reach `c` by runs staying within the bounds.
pub fn pre_bounded(vass: &Vass, c: &Configuration, bounds: &SearchBounds) -> ReachSet {
    explore(vass, c, bounds, Direction::Backward)
}

/// Verdict of a bounded shortest-run search.
#[derive(Debug, Clone)]
pub enum ReachVerdict {
    /// Target reached. The witness is the length-minimal run, with ties broken
    /// lexicographically by transition index sequence. It is `None` exactly
    /// when source equals target, where the witness is the empty run.
    Reachable(Option<Run>),
    /// Bounds truncated the search before the target was found.
    NotReachableWithinBounds,
    /// The search space below the bounds was fully explored without pruning
    /// and the target is absent: a proof of non-reachability.
    Exhausted,
}

impl ReachVerdict {
    pub fn is_reachable(&self) -> bool {
        matches!(self, ReachVerdict::Reachable(_))
    }
}

/// Breadth-first search for a shortest run from `s` to `t` within bounds.
pub fn shortest_run(vass: &Vass, s: &Configuration, t: &Configuration, bounds: &SearchBounds) -> ReachVerdict {
    if s == t {
        return ReachVerdict::Reachable(None);
    }
    if !bounds.norm_ok(s) {
        return ReachVerdict::NotReachableWithinBounds;
    }
    let mut parent: HashMap<Configuration, (Configuration, TransId)> = HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back((s.clone(), 0usize));
    let mut pruned = false;
    let mut expanded = 0usize;
    while let Some((c, depth)) = queue.pop_front() {
        if let Some(max_len) = bounds.length {
            if depth >= max_len {
                pruned = true;
                continue;
            }
        }
        if let Some(max_nodes) = bounds.nodes {
            if expanded >= max_nodes {
                pruned = true;
                continue;
            }
        }
        expanded += 1;
        for ti in 0..vass.transitions().len() {
            let next = match vass.fire(&c, TransId(ti)) {
                Ok(next) => next,
                Err(_) => continue,
            };
            if !bounds.norm_ok(&next) {
                pruned = true;
                continue;
            }
            if next == *s || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), (c.clone(), TransId(ti)));
            if next == *t {
                // FIFO order over index-ordered expansions makes the first
                // discovery the lexicographically least among shortest runs.
                let mut rev = Vec::new();
                let mut cur = next;
                while cur != *s {
                    let (prev, tr) = parent.get(&cur).cloned().unwrap();
                    rev.push(tr);
                    cur = prev;
                }
                rev.reverse();
                let run = Run::replay(vass, s.clone(), &rev).expect("witness must replay");
                return ReachVerdict::Reachable(Some(run));
            }
            queue.push_back((next, depth + 1));
        }
    }
    if pruned {
        ReachVerdict::NotReachableWithinBounds
    } else {
        ReachVerdict::Exhausted
    }
}

/// Streams every valid run from `s` respecting the bounds, in nondecreasing
/// length order; runs of equal length come out in lexicographic order of
/// their transition index sequences.
pub fn enumerate_runs<'a>(vass: &'a Vass, s: &Configuration, bounds: &SearchBounds) -> RunEnumerator<'a> {
    let mut queue = VecDeque::new();
    if bounds.norm_ok(s) && bounds.length != Some(0) {
        for ti in 0..vass.transitions().len() {
            if let Ok(next) = vass.fire(s, TransId(ti)) {
                if bounds.norm_ok(&next) {
                    queue.push_back((next, vec![TransId(ti)]));
                }
            }
        }
    }
    RunEnumerator { vass, source: s.clone(), bounds: bounds.clone(), queue }
}

pub struct RunEnumerator<'a> {
    vass: &'a Vass,
    source: Configuration,
    bounds: SearchBounds,
    queue: VecDeque<(Configuration, Vec<TransId>)>,
}

impl Iterator for RunEnumerator<'_> {
    type Item = Run;

    fn next(&mut self) -> Option<Run> {
        let (config, path) = self.queue.pop_front()?;
        if self.bounds.length.map(|l| path.len() < l).unwrap_or(true) {
            for ti in 0..self.vass.transitions().len() {
                if let Ok(next) = self.vass.fire(&config, TransId(ti)) {
                    if self.bounds.norm_ok(&next) {
                        let mut longer = path.clone();
                        longer.push(TransId(ti));
                        self.queue.push_back((next, longer));
                    }
                }
            }
        }
        Some(Run::replay(self.vass, self.source.clone(), &path).expect("enumerated run must replay"))
    }
}
