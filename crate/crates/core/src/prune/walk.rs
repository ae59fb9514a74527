//! Boolean walk tables `walk(u, v, l)` for `0 <= l <= L`.
//!
//! Level `l` is the reachability matrix of walks of length exactly `l`. The
//! sequence of levels is eventually periodic, so only the distinct prefix and
//! one period are stored.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;

use crate::graph::Graph;

#[derive(Debug, Clone)]
pub struct WalkTable {
    bound: usize,
    directed: bool,
    levels: Vec<Vec<FixedBitSet>>,
    /// First level of the repeating block and its length; `period == 0`
    /// means no repetition was found within the bound.
    start: usize,
    period: usize,
}

fn fingerprint(level: &[FixedBitSet]) -> u64 {
    let mut h = DefaultHasher::new();
    level.hash(&mut h);
    h.finish()
}

/// Builds the table by iterated boolean matrix products, stopping early once
/// a level repeats.
pub fn walk_table(g: &Graph, bound: usize) -> WalkTable {
    let n = g.vertex_count();
    let identity: Vec<FixedBitSet> = (0..n)
        .map(|u| {
            let mut row = FixedBitSet::with_capacity(n);
            row.insert(u);
            row
        })
        .collect();
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
    seen.entry(fingerprint(&identity)).or_default().push(0);
    let mut levels = vec![identity];
    let (mut start, mut period) = (0, 0);
    while levels.len() <= bound {
        let cur = levels.last().expect("level 0 exists");
        let next: Vec<FixedBitSet> = (0..n)
            .map(|u| {
                let mut row = FixedBitSet::with_capacity(n);
                for &w in g.succ(u) {
                    row.union_with(&cur[w]);
                }
                row
            })
            .collect();
        let key = fingerprint(&next);
        let l = levels.len();
        if let Some(&k) = seen.get(&key).and_then(|c| c.iter().find(|&&k| levels[k] == next)) {
            start = k;
            period = l - k;
            break;
        }
        seen.entry(key).or_default().push(l);
        levels.push(next);
    }
    if period == 0 {
        start = levels.len();
    }
    WalkTable { bound, directed: g.is_directed(), levels, start, period }
}

impl WalkTable {
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn vertex_count(&self) -> usize {
        self.levels[0].len()
    }

    /// `(start, period)` of the repeating block, if one was reached.
    pub fn periodicity(&self) -> Option<(usize, usize)> {
        (self.period > 0).then_some((self.start, self.period))
    }

    /// Number of stored level matrices.
    pub fn distinct_levels(&self) -> usize {
        self.levels.len()
    }

    /// Index of the stored matrix equal to level `l`.
    pub fn level_index(&self, l: usize) -> usize {
        assert!(l <= self.bound, "length {l} exceeds walk bound {}", self.bound);
        if self.period == 0 || l < self.start {
            l
        } else {
            self.start + (l - self.start) % self.period
        }
    }

    /// Targets reachable from `u` by a walk of length exactly `l`.
    pub fn row(&self, u: usize, l: usize) -> &FixedBitSet {
        &self.levels[self.level_index(l)][u]
    }

    pub fn level_row(&self, level: usize, u: usize) -> &FixedBitSet {
        &self.levels[level][u]
    }

    pub fn walk(&self, u: usize, v: usize, l: usize) -> bool {
        self.row(u, l).contains(v)
    }

    /// Lengths `0..=bound` of walks from `u` to `v`, as a bitset over lengths.
    pub fn lengths(&self, u: usize, v: usize) -> FixedBitSet {
        self.lengths_upto(u, v, self.bound)
    }

    pub fn lengths_upto(&self, u: usize, v: usize, horizon: usize) -> FixedBitSet {
        let top = horizon.min(self.bound);
        let mut out = FixedBitSet::with_capacity(top + 1);
        for l in 0..=top {
            if self.walk(u, v, l) {
                out.insert(l);
            }
        }
        out
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Largest length that needs inspecting when comparing two tables: beyond it
/// the pair of levels repeats. Never exceeds either bound.
pub fn joint_horizon(a: &WalkTable, b: &WalkTable) -> usize {
    let bound = a.bound.min(b.bound);
    match (a.periodicity(), b.periodicity()) {
        (Some((s1, p1)), Some((s2, p2))) => {
            let lcm = (p1 / gcd(p1, p2)).saturating_mul(p2);
            s1.max(s2).saturating_add(lcm).saturating_sub(1).min(bound)
        }
        _ => bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{directed_cycle, Kind};

    fn set(bits: &FixedBitSet) -> Vec<usize> {
        bits.ones().collect()
    }

    #[test]
    fn cycle_closed_walks() {
        let t = walk_table(&directed_cycle(3).unwrap(), 6);
        assert_eq!(set(&t.lengths(0, 0)), vec![0, 3, 6]);
        assert_eq!(t.periodicity(), Some((0, 3)));
    }

    #[test]
    fn edge_parity() {
        let g = Graph::from_parts(Kind::Undirected, &["u", "v"], &[("u", "v")]).unwrap();
        let t = walk_table(&g, 4);
        assert_eq!(set(&t.lengths(0, 0)), vec![0, 2, 4]);
        assert_eq!(set(&t.lengths(0, 1)), vec![1, 3]);
    }

    #[test]
    fn isolated_vertex() {
        let g = Graph::from_parts::<&str>(Kind::Undirected, &["v"], &[]).unwrap();
        let t = walk_table(&g, 2);
        assert_eq!(set(&t.lengths(0, 0)), vec![0]);
    }

    #[test]
    fn zero_bound() {
        let t = walk_table(&directed_cycle(2).unwrap(), 0);
        assert!(t.walk(1, 1, 0));
        assert!(!t.walk(0, 1, 0));
    }

    #[test]
    fn horizon_uses_lcm() {
        let a = walk_table(&directed_cycle(4).unwrap(), 100);
        let b = walk_table(&directed_cycle(6).unwrap(), 100);
        assert_eq!(joint_horizon(&a, &b), 11);
        let short = walk_table(&directed_cycle(6).unwrap(), 3);
        assert_eq!(joint_horizon(&a, &short), 3);
    }
}
