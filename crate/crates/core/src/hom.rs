//! Classical homomorphism search, witness checking and the cycle divisibility oracle.
//!
//! [`find_hom`] is a complete backtracking search that maintains arc
//! consistency at every node (MAC). Variables are picked by smallest remaining
//! domain (ties to the lowest source index); values are tried in ascending
//! order of the target identifiers. The search keeps an undo trail instead of
//! cloning domains, so depth is bounded only by the number of source vertices.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DiCycles, Graph, Kind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("kind mismatch: source is a {source_kind}, target is a {target_kind}")]
    KindMismatch { source_kind: Kind, target_kind: Kind },
    #[error("mapping is partial: source vertex {0:?} has no image")]
    PartialMapping(String),
    #[error("mapping sends {0:?} to unknown target vertex {1:?}")]
    UnknownImage(String, String),
    #[error("mapping mentions unknown source vertex {0:?}")]
    UnknownSource(String),
    #[error("initial domains cover {got} source vertices, expected {expected}")]
    DomainShape { expected: usize, got: usize },
}

/// A total map `source vertex -> target vertex`, by identifier.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HomWitness {
    pub mapping: BTreeMap<String, String>,
}

impl HomWitness {
    pub fn identity(g: &Graph) -> Self {
        HomWitness { mapping: g.names().iter().map(|n| (n.clone(), n.clone())).collect() }
    }

    pub fn get(&self, v: &str) -> Option<&str> {
        self.mapping.get(v).map(String::as_str)
    }

    /// `other ∘ self`: first `self`, then `other`. Vertices whose image is not
    /// in `other`'s domain are dropped, which `check_witness` reports as partial.
    pub fn then(&self, other: &HomWitness) -> HomWitness {
        HomWitness {
            mapping: self
                .mapping
                .iter()
                .filter_map(|(x, y)| other.mapping.get(y).map(|z| (x.clone(), z.clone())))
                .collect(),
        }
    }

    fn from_indices(x: &Graph, y: &Graph, assignment: &[usize]) -> Self {
        HomWitness {
            mapping: assignment
                .iter()
                .enumerate()
                .map(|(s, &t)| (x.name(s).to_string(), y.name(t).to_string()))
                .collect(),
        }
    }
}

/// Result of [`check_witness`]: `violation` is the first edge (in source edge
/// order) whose image is not an edge of the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub valid: bool,
    pub violation: Option<(String, String)>,
}

pub fn check_witness(x: &Graph, y: &Graph, f: &HomWitness) -> Result<WitnessCheck, HomError> {
    ensure_same_kind(x, y)?;
    if let Some(unknown) = f.mapping.keys().find(|k| x.index_of(k).is_none()) {
        return Err(HomError::UnknownSource(unknown.clone()));
    }
    let mut image = Vec::with_capacity(x.vertex_count());
    for name in x.names() {
        let target = f.get(name).ok_or_else(|| HomError::PartialMapping(name.clone()))?;
        let t = y
            .index_of(target)
            .ok_or_else(|| HomError::UnknownImage(name.clone(), target.to_string()))?;
        image.push(t);
    }
    for (a, b) in x.edges() {
        if !y.has_edge(image[a], image[b]) {
            return Ok(WitnessCheck {
                valid: false,
                violation: Some((x.name(a).to_string(), x.name(b).to_string())),
            });
        }
    }
    Ok(WitnessCheck { valid: true, violation: None })
}

fn ensure_same_kind(x: &Graph, y: &Graph) -> Result<(), HomError> {
    if x.kind() != y.kind() {
        return Err(HomError::KindMismatch { source_kind: x.kind(), target_kind: y.kind() });
    }
    Ok(())
}

/// Extra search options. `initial_domains[s]` restricts the admissible images
/// of source vertex `s` before any propagation, e.g. a color prefilter.
#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    pub initial_domains: Option<Vec<FixedBitSet>>,
}

/// Decides whether a homomorphism `x -> y` exists; `None` is a proof of absence.
pub fn find_hom(x: &Graph, y: &Graph) -> Result<Option<HomWitness>, HomError> {
    find_hom_with(x, y, &SearchOptions::default())
}

pub fn find_hom_with(
    x: &Graph,
    y: &Graph,
    options: &SearchOptions,
) -> Result<Option<HomWitness>, HomError> {
    ensure_same_kind(x, y)?;
    if let Some(d) = &options.initial_domains {
        if d.len() != x.vertex_count() {
            return Err(HomError::DomainShape { expected: x.vertex_count(), got: d.len() });
        }
    }
    if x.is_empty() {
        return Ok(Some(HomWitness::default()));
    }
    if y.is_empty() {
        return Ok(None);
    }
    let solver = Solver::new(x, y);
    let mut domains: Vec<FixedBitSet> = (0..x.vertex_count())
        .map(|s| {
            let mut d = FixedBitSet::with_capacity(y.vertex_count());
            d.insert_range(..);
            if let Some(init) = &options.initial_domains {
                d.intersect_with(&init[s]);
            }
            d
        })
        .collect();
    Ok(solver.solve(&mut domains).map(|a| HomWitness::from_indices(x, y, &a)))
}

struct Solver {
    n_src: usize,
    /// Source arcs; undirected edges appear in both orientations.
    arcs: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
    succ_bits: Vec<FixedBitSet>,
    pred_bits: Vec<FixedBitSet>,
    value_order: Vec<usize>,
}

impl Solver {
    fn new(x: &Graph, y: &Graph) -> Self {
        let mut arcs = Vec::new();
        for (a, b) in x.edges() {
            arcs.push((a, b));
            if x.kind() == Kind::Undirected {
                arcs.push((b, a));
            }
        }
        let mut incident = vec![Vec::new(); x.vertex_count()];
        for (i, &(a, b)) in arcs.iter().enumerate() {
            incident[a].push(i);
            incident[b].push(i);
        }
        let mut value_order: Vec<usize> = (0..y.vertex_count()).collect();
        value_order.sort_by(|&a, &b| y.name(a).cmp(y.name(b)));
        Solver {
            n_src: x.vertex_count(),
            arcs,
            incident,
            succ_bits: y.succ_bits(),
            pred_bits: y.pred_bits(),
            value_order,
        }
    }

    fn image(bits: &[FixedBitSet], dom: &FixedBitSet, n: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(n);
        for v in dom.ones() {
            out.union_with(&bits[v]);
        }
        out
    }

    /// AC-3 over the changed variables in `queue`. Old domains are pushed onto
    /// `trail` before each modification. Returns `false` on a wipe-out.
    fn propagate(
        &self,
        domains: &mut [FixedBitSet],
        mut queue: Vec<usize>,
        trail: &mut Vec<(usize, FixedBitSet)>,
    ) -> bool {
        let n_tgt = self.succ_bits.len();
        let mut queued = vec![false; self.n_src];
        for &v in &queue {
            queued[v] = true;
        }
        while let Some(v) = queue.pop() {
            queued[v] = false;
            for &ai in &self.incident[v] {
                let (a, b) = self.arcs[ai];
                // Revise the endpoint opposite to `v` against `v`'s domain.
                let (other, support) = if a == v {
                    (b, Self::image(&self.succ_bits, &domains[a], n_tgt))
                } else {
                    (a, Self::image(&self.pred_bits, &domains[b], n_tgt))
                };
                if other == v {
                    continue;
                }
                if domains[other].is_subset(&support) {
                    continue;
                }
                trail.push((other, domains[other].clone()));
                domains[other].intersect_with(&support);
                if domains[other].is_clear() {
                    return false;
                }
                if !queued[other] {
                    queued[other] = true;
                    queue.push(other);
                }
            }
        }
        true
    }

    fn pick_variable(&self, domains: &[FixedBitSet]) -> Option<usize> {
        (0..self.n_src)
            .map(|v| (domains[v].count_ones(..), v))
            .filter(|&(size, _)| size > 1)
            .min()
            .map(|(_, v)| v)
    }

    fn undo(domains: &mut [FixedBitSet], trail: &mut Vec<(usize, FixedBitSet)>, mark: usize) {
        while trail.len() > mark {
            let (v, old) = trail.pop().expect("len > mark");
            domains[v] = old;
        }
    }

    fn solve(&self, domains: &mut [FixedBitSet]) -> Option<Vec<usize>> {
        let mut trail = Vec::new();
        if domains.iter().any(FixedBitSet::is_clear)
            || !self.propagate(domains, (0..self.n_src).collect(), &mut trail)
        {
            return None;
        }
        struct Frame {
            var: usize,
            values: Vec<usize>,
            next: usize,
            mark: usize,
        }
        let mut stack: Vec<Frame> = Vec::new();
        let mut descend = true;
        loop {
            if descend {
                match self.pick_variable(domains) {
                    None => {
                        return Some(
                            domains
                                .iter()
                                .map(|d| d.minimum().expect("domains are nonempty"))
                                .collect(),
                        )
                    }
                    Some(var) => {
                        let values =
                            self.value_order.iter().copied().filter(|&t| domains[var][t]).collect();
                        stack.push(Frame { var, values, next: 0, mark: trail.len() });
                    }
                }
            }
            let frame = stack.last_mut()?;
            Self::undo(domains, &mut trail, frame.mark);
            if frame.next == frame.values.len() {
                stack.pop();
                descend = false;
                if stack.is_empty() {
                    return None;
                }
                continue;
            }
            let (var, value) = (frame.var, frame.values[frame.next]);
            frame.next += 1;
            trail.push((var, domains[var].clone()));
            domains[var].clear();
            domains[var].insert(value);
            descend = self.propagate(domains, vec![var], &mut trail);
        }
    }
}

/// `true` iff every cycle length in `d` has a divisor among the lengths in `d2`.
pub fn dicycles_hom(d: &DiCycles, d2: &DiCycles) -> bool {
    d.lengths().iter().all(|&n| d2.lengths().iter().any(|&m| n % m == 0))
}

/// The homomorphism `C_n -> C_m`, `ci -> c(i mod m)`, when `m | n`.
pub fn cycle_hom(n: usize, m: usize) -> Option<HomWitness> {
    if m < 2 || n < 2 || n % m != 0 {
        return None;
    }
    Some(HomWitness {
        mapping: (0..n).map(|i| (format!("c{i}"), format!("c{}", i % m))).collect(),
    })
}
