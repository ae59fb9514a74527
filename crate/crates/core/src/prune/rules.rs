//! The individual zero-forcing rules. Each is usable on its own; the driver in
//! the parent module iterates them to a fixed point.

use std::collections::{BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::ledger::{Justification, TraceEntry, ZeroLedger};
use super::walk::{joint_horizon, walk_table, WalkTable};
use crate::gadget::{Color, ColorMask};
use crate::graph::Graph;

/// Walk tables for a source/target pair, plus the reversed target table used
/// for walks that run against the source direction.
#[derive(Debug, Clone)]
pub struct Tables {
    pub source: WalkTable,
    pub target: WalkTable,
    target_rev: Option<WalkTable>,
    pub horizon: usize,
}

impl Tables {
    pub fn new(x: &Graph, y: &Graph, bound: usize) -> Self {
        let source = walk_table(x, bound);
        let target = walk_table(y, bound);
        let target_rev = y.is_directed().then(|| walk_table(&y.reversed(), bound));
        let horizon = joint_horizon(&source, &target);
        Tables { source, target, target_rev, horizon }
    }

    /// Walk tables of the target read backwards: `row(y, l)` holds every `y2`
    /// with a walk `y2 -> y` of length `l`.
    pub fn target_reversed(&self) -> &WalkTable {
        self.target_rev.as_ref().unwrap_or(&self.target)
    }

    fn closed_lengths(t: &WalkTable, v: usize, horizon: usize) -> FixedBitSet {
        t.lengths_upto(v, v, horizon)
    }

    /// For every target `y`, the targets `y2` such that each length realised
    /// by a walk between `x` and `x2` (either way round) is realised between
    /// `y` and `y2` in the same direction. `None` if no walk joins `x` and `x2`.
    pub fn good_sets(&self, x: usize, x2: usize) -> Option<Vec<FixedBitSet>> {
        let mut fwd = BTreeSet::new();
        let mut bwd = BTreeSet::new();
        for l in 0..=self.horizon {
            if self.source.walk(x, x2, l) {
                fwd.insert(self.target.level_index(l));
            }
            if self.source.walk(x2, x, l) {
                bwd.insert(self.target_reversed().level_index(l));
            }
        }
        if fwd.is_empty() && bwd.is_empty() {
            return None;
        }
        let ny = self.target.vertex_count();
        let sets = (0..ny)
            .map(|y| {
                let mut g = FixedBitSet::with_capacity(ny);
                g.insert_range(..);
                for &lv in &fwd {
                    g.intersect_with(self.target.level_row(lv, y));
                }
                for &lv in &bwd {
                    g.intersect_with(self.target_reversed().level_row(lv, y));
                }
                g
            })
            .collect();
        Some(sets)
    }
}

/// Pairs `(x, y)` where `x` has a closed walk of some length `l <= L` and `y`
/// has none. The shortest such `l` is recorded.
pub fn rule_closed_walk(x: &Graph, y: &Graph, bound: usize) -> Vec<TraceEntry> {
    closed_walk_with(&Tables::new(x, y, bound))
}

pub(crate) fn closed_walk_with(t: &Tables) -> Vec<TraceEntry> {
    let h = t.horizon;
    let ys: Vec<FixedBitSet> = (0..t.target.vertex_count())
        .map(|v| Tables::closed_lengths(&t.target, v, h))
        .collect();
    let mut out = Vec::new();
    for x in 0..t.source.vertex_count() {
        let cx = Tables::closed_lengths(&t.source, x, h);
        for (y, cy) in ys.iter().enumerate() {
            if let Some(l) = cx.difference(cy).next() {
                out.push(TraceEntry::new(x, y, Justification::ClosedWalk { length: l as u32 }));
            }
        }
    }
    out
}

/// A product `E_{x,y} E_{x2,y2}` shown to vanish: a walk of `length` joins
/// `x` and `x2` but none joins `y` and `y2` (in the same direction).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FlaggedProduct {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub length: usize,
    /// The witnessing walk runs from `x2` to `x`.
    pub reversed: bool,
}

pub type PairRequest = ((usize, usize), (usize, usize));

/// Tests each requested product against the walk tables.
pub fn rule_pair_walk(x: &Graph, y: &Graph, bound: usize, pairs: &[PairRequest]) -> Vec<FlaggedProduct> {
    let t = Tables::new(x, y, bound);
    pairs.iter().filter_map(|&p| flag_product(&t, p)).collect()
}

pub(crate) fn flag_product(t: &Tables, ((x, y), (x2, y2)): PairRequest) -> Option<FlaggedProduct> {
    let hit = |reversed: bool| {
        (0..=t.horizon).find(|&l| {
            if reversed {
                t.source.walk(x2, x, l) && !t.target.walk(y2, y, l)
            } else {
                t.source.walk(x, x2, l) && !t.target.walk(y, y2, l)
            }
        })
    };
    let found = hit(false).map(|l| (l, false)).or_else(|| hit(true).map(|l| (l, true)));
    found.map(|(length, reversed)| FlaggedProduct { first: (x, y), second: (x2, y2), length, reversed })
}

/// Source vertices at distance at most `d` from `x`, ignoring direction, `x`
/// included.
pub(crate) fn near(x: &Graph, start: usize, d: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; x.vertex_count()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut out = vec![start];
    while let Some(v) = queue.pop_front() {
        if dist[v] == d {
            continue;
        }
        for w in x.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                out.push(w);
                queue.push_back(w);
            }
        }
    }
    out.sort_unstable();
    out
}

/// One sweep of the support rule against the current ledger: `(x, y)` is zero
/// when some out-neighbour `x'` of `x` has every out-neighbour of `y` zero, or
/// likewise for in-neighbours. Undirected graphs use plain neighbourhoods.
pub fn rule_support(x: &Graph, y: &Graph, ledger: &ZeroLedger) -> Vec<TraceEntry> {
    let succ = y.succ_bits();
    let pred = y.pred_bits();
    let mut out = Vec::new();
    for sx in 0..x.vertex_count() {
        for ty in 0..y.vertex_count() {
            if ledger.is_zero(sx, ty) {
                continue;
            }
            let dead = |xn: usize, nbrs: &FixedBitSet| nbrs.is_subset(ledger.row(xn));
            let by_succ = x.succ(sx).iter().find(|&&xn| dead(xn, &succ[ty]));
            let by_pred = || x.pred(sx).iter().find(|&&xn| dead(xn, &pred[ty]));
            if let Some(&xn) = by_succ.or_else(by_pred) {
                out.push(TraceEntry::new(sx, ty, Justification::Support { neighbor: xn as u32 }));
            }
        }
    }
    out
}

/// Role masks read from the `role` vertex label (`A`, `B` or `E`).
pub fn roles_from_labels(g: &Graph) -> Vec<ColorMask> {
    g.names()
        .iter()
        .map(|n| {
            let mut m = ColorMask::EMPTY;
            if let Some(r) = g.labels().get(n).and_then(|l| l.get("role")) {
                for c in Color::ALL {
                    if r.split(',').any(|p| p.trim() == c.to_string()) {
                        m.insert(c);
                    }
                }
            }
            m
        })
        .collect()
}

/// `(x, y)` is zero when `x` carries a role whose color `y` lacks.
pub fn rule_color_localization(source_roles: &[ColorMask], target_colors: &[ColorMask]) -> Vec<TraceEntry> {
    let mut out = Vec::new();
    for (x, &roles) in source_roles.iter().enumerate() {
        for (y, &colors) in target_colors.iter().enumerate() {
            if let Some(role) = roles.iter().find(|&c| !colors.contains(c)) {
                out.push(TraceEntry::new(x, y, Justification::Color { role }));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{directed_cycle, Kind};

    fn pairs_of(v: &[TraceEntry]) -> Vec<(usize, usize)> {
        v.iter().map(TraceEntry::pair).collect()
    }

    #[test]
    fn closed_walk_cycles() {
        let (c4, c3, c6) = (directed_cycle(4).unwrap(), directed_cycle(3).unwrap(), directed_cycle(6).unwrap());
        let z = rule_closed_walk(&c4, &c3, 12);
        assert_eq!(z.len(), 12);
        assert!(z.iter().all(|e| e.justification == Justification::ClosedWalk { length: 4 }));
        assert!(rule_closed_walk(&c6, &c3, 18).is_empty());
        assert!(rule_closed_walk(&c3, &c3, 9).is_empty());
    }

    #[test]
    fn triangle_into_edge() {
        let k3 = Graph::from_parts(Kind::Undirected, &["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        let k2 = Graph::from_parts(Kind::Undirected, &["u", "v"], &[("u", "v")]).unwrap();
        let z = rule_closed_walk(&k3, &k2, 6);
        assert_eq!(z.len(), 6);
        assert!(z.iter().all(|e| e.justification == Justification::ClosedWalk { length: 3 }));
    }

    #[test]
    fn pair_walk_edge() {
        let p = Graph::from_parts(Kind::Undirected, &["a", "b"], &[("a", "b")]).unwrap();
        let e = Graph::from_parts(Kind::Undirected, &["u", "v"], &[("u", "v")]).unwrap();
        let f = rule_pair_walk(&p, &e, 2, &[((0, 0), (1, 0)), ((0, 0), (1, 1))]);
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].first, f[0].second, f[0].length), ((0, 0), (1, 0), 1));
    }

    #[test]
    fn support_on_sink_target() {
        let arc = Graph::from_parts(Kind::Directed, &["a", "b"], &[("a", "b")]).unwrap();
        let one = Graph::from_parts::<&str>(Kind::Directed, &["u"], &[]).unwrap();
        let l = ZeroLedger::new(2, 1);
        assert_eq!(pairs_of(&rule_support(&arc, &one, &l)), vec![(0, 0), (1, 0)]);
        let c3 = directed_cycle(3).unwrap();
        assert!(rule_support(&c3, &c3, &ZeroLedger::new(3, 3)).is_empty());
    }

    #[test]
    fn color_rule_skips_unlabelled() {
        let roles = [ColorMask::of(Color::A), ColorMask::EMPTY];
        let colors = [ColorMask::of(Color::A), ColorMask::of(Color::B)];
        let z = rule_color_localization(&roles, &colors);
        assert_eq!(pairs_of(&z), vec![(0, 1)]);
    }

    #[test]
    fn near_respects_distance() {
        let c6 = directed_cycle(6).unwrap();
        assert_eq!(near(&c6, 0, 2), vec![0, 1, 2, 4, 5]);
        assert_eq!(near(&c6, 0, 0), vec![0]);
    }
}
