//! Structural checks on replacement graphs: neighbourhood conditions on the
//! color classes, role detection from structure alone, color-sequence walks
//! and the terminal-pair certificate.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use super::{build_indicator, replace, Color, ColorMask, GadgetError, ReplacementGraph, SPINE_COLORS};
use crate::graph::{Graph, Kind};

/// Roles derived from structure only: A if the neighbourhood contains a
/// 5-cycle, B if it contains an edge between two A-vertices, E if it contains
/// an edge between two B-vertices.
pub fn detect_roles(g: &Graph) -> Vec<ColorMask> {
    let n = g.vertex_count();
    let nbrs: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v)).collect();
    let mut masks = vec![ColorMask::EMPTY; n];
    for v in 0..n {
        if has_five_cycle(g, &nbrs[v]) {
            masks[v].insert(Color::A);
        }
    }
    for (lower, upper) in [(Color::A, Color::B), (Color::B, Color::E)] {
        let carriers: Vec<bool> = masks.iter().map(|m| m.contains(lower)).collect();
        for v in 0..n {
            if first_edge_within(g, &nbrs[v], &carriers).is_some() {
                masks[v].insert(upper);
            }
        }
    }
    masks
}

fn adjacent(g: &Graph, a: usize, b: usize) -> bool {
    g.has_edge(a, b) || g.has_edge(b, a)
}

/// Does `G[set]` contain a cycle of length exactly 5 (not necessarily induced)?
fn has_five_cycle(g: &Graph, set: &[usize]) -> bool {
    fn extend(g: &Graph, set: &[usize], path: &mut Vec<usize>) -> bool {
        let last = *path.last().expect("path is never empty");
        if path.len() == 5 {
            return adjacent(g, last, path[0]);
        }
        for &w in set {
            if w > path[0] && !path.contains(&w) && adjacent(g, last, w) {
                path.push(w);
                if extend(g, set, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    set.len() >= 5 && set.iter().any(|&s| extend(g, set, &mut vec![s]))
}

fn first_edge_within(g: &Graph, set: &[usize], member: &[bool]) -> Option<(usize, usize)> {
    let inside: Vec<usize> = set.iter().copied().filter(|&v| member[v]).collect();
    for (i, &p) in inside.iter().enumerate() {
        for &q in &inside[i + 1..] {
            if adjacent(g, p, q) {
                return Some((p, q));
            }
        }
    }
    None
}

/// An odd cycle of `G[set]`, or `None` if that induced graph is bipartite.
fn odd_cycle(g: &Graph, set: &[usize]) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    let mut side = vec![u8::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    for &root in set {
        if side[root] != u8::MAX {
            continue;
        }
        side[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(p) = queue.pop_front() {
            for q in g.neighbors(p) {
                if !inside[q] {
                    continue;
                }
                if side[q] == u8::MAX {
                    side[q] = 1 - side[p];
                    parent[q] = p;
                    depth[q] = depth[p] + 1;
                    queue.push_back(q);
                } else if side[q] == side[p] {
                    let (mut a, mut b) = (p, q);
                    let (mut left, mut right) = (vec![a], vec![b]);
                    while a != b {
                        if depth[a] >= depth[b] {
                            a = parent[a];
                            left.push(a);
                        } else {
                            b = parent[b];
                            right.push(b);
                        }
                    }
                    right.pop();
                    right.reverse();
                    left.extend(right);
                    return Some(left);
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LemmaPart {
    /// Outside `A(Y)` the neighbourhood is bipartite.
    #[serde(rename = "i")]
    NeighbourhoodBipartite,
    /// Outside `B(Y)` no two adjacent A-vertices are neighbours.
    #[serde(rename = "ii")]
    NoAdjacentA,
    /// Outside `E(Y)` no two adjacent B-vertices are neighbours.
    #[serde(rename = "iii")]
    NoAdjacentB,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    OddCycle { cycle: Vec<String> },
    Edge { edge: (String, String) },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub vertex: String,
    pub part: LemmaPart,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoleMismatch {
    pub vertex: String,
    pub stored: String,
    pub detected: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct StructuralReport {
    pub vertices_checked: usize,
    pub counterexamples: Vec<Counterexample>,
    pub role_mismatches: Vec<RoleMismatch>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.role_mismatches.is_empty()
    }

    pub fn fails(&self, part: LemmaPart) -> bool {
        self.counterexamples.iter().any(|c| c.part == part)
    }
}

/// Checks the three neighbourhood conditions for every vertex of `y` and
/// cross-checks stored roles against [`detect_roles`].
pub fn verify_structural(y: &ReplacementGraph) -> StructuralReport {
    let g = &y.graph;
    let masks = y.color_masks();
    let in_a: Vec<bool> = masks.iter().map(|m| m.contains(Color::A)).collect();
    let in_b: Vec<bool> = masks.iter().map(|m| m.contains(Color::B)).collect();
    let name = |v: usize| g.name(v).to_string();
    let mut report = StructuralReport { vertices_checked: g.vertex_count(), ..Default::default() };
    for v in 0..g.vertex_count() {
        let nbrs = g.neighbors(v);
        if !masks[v].contains(Color::A) {
            if let Some(cycle) = odd_cycle(g, &nbrs) {
                report.counterexamples.push(Counterexample {
                    vertex: name(v),
                    part: LemmaPart::NeighbourhoodBipartite,
                    witness: Witness::OddCycle { cycle: cycle.into_iter().map(name).collect() },
                });
            }
        }
        for (color, member, part) in [
            (Color::B, &in_a, LemmaPart::NoAdjacentA),
            (Color::E, &in_b, LemmaPart::NoAdjacentB),
        ] {
            if masks[v].contains(color) {
                continue;
            }
            if let Some((p, q)) = first_edge_within(g, &nbrs, member) {
                report.counterexamples.push(Counterexample {
                    vertex: name(v),
                    part,
                    witness: Witness::Edge { edge: (name(p), name(q)) },
                });
            }
        }
    }
    for (v, (stored, detected)) in masks.iter().zip(detect_roles(g)).enumerate() {
        if *stored != detected {
            report.role_mismatches.push(RoleMismatch {
                vertex: name(v),
                stored: stored.to_string(),
                detected: detected.to_string(),
            });
        }
    }
    report
}

/// All walks `v0 .. vk` with `colors[vi]` containing `seq[i]`, as index
/// sequences in lexicographic order. Forward/backward reachability layers
/// prune the enumeration to vertices that lie on some complete walk.
pub fn colored_walks_in(g: &Graph, colors: &[ColorMask], seq: &[Color]) -> Vec<Vec<usize>> {
    if seq.is_empty() {
        return Vec::new();
    }
    let n = g.vertex_count();
    let mut layers: Vec<Vec<bool>> = Vec::with_capacity(seq.len());
    layers.push((0..n).map(|v| colors[v].contains(seq[0])).collect());
    for &c in &seq[1..] {
        let prev = layers.last().expect("nonempty");
        let next = (0..n)
            .map(|w| colors[w].contains(c) && g.pred(w).iter().any(|&v| prev[v]))
            .collect();
        layers.push(next);
    }
    for i in (0..seq.len() - 1).rev() {
        let (head, tail) = layers.split_at_mut(i + 1);
        let (cur, next) = (&mut head[i], &tail[0]);
        for v in 0..n {
            if cur[v] && !g.succ(v).iter().any(|&w| next[w]) {
                cur[v] = false;
            }
        }
    }
    let mut walks = Vec::new();
    let mut path = Vec::with_capacity(seq.len());
    fn dfs(
        g: &Graph,
        layers: &[Vec<bool>],
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if path.len() == layers.len() {
            out.push(path.clone());
            return;
        }
        let last = *path.last().expect("nonempty");
        for &w in g.succ(last) {
            if layers[path.len()][w] {
                path.push(w);
                dfs(g, layers, path, out);
                path.pop();
            }
        }
    }
    for v in (0..n).filter(|&v| layers[0][v]) {
        path.push(v);
        dfs(g, &layers, &mut path, &mut walks);
        path.pop();
    }
    walks
}

pub fn colored_walks(y: &ReplacementGraph, seq: &[Color]) -> Vec<Vec<String>> {
    colored_walks_in(&y.graph, &y.color_masks(), seq)
        .into_iter()
        .map(|w| w.into_iter().map(|v| y.graph.name(v).to_string()).collect())
        .collect()
}

/// `{(first, last)}` over all walks with color sequence `seq`.
pub fn endpoint_pairs(y: &ReplacementGraph, seq: &[Color]) -> BTreeSet<(String, String)> {
    colored_walks(y, seq)
        .into_iter()
        .map(|w| (w[0].clone(), w[w.len() - 1].clone()))
        .collect()
}

/// Terminal pairs of `E,A,A,B,B,A,E` walks; must equal the arc set of the host.
pub fn endpoint_certificate(y: &ReplacementGraph) -> Result<BTreeSet<(String, String)>, GadgetError> {
    let found = endpoint_pairs(y, &SPINE_COLORS);
    let arcs: BTreeSet<(String, String)> = y
        .host
        .edges()
        .map(|(a, b)| (y.host.name(a).to_string(), y.host.name(b).to_string()))
        .collect();
    if found != arcs {
        let extra: Vec<_> = found.difference(&arcs).collect();
        let missing: Vec<_> = arcs.difference(&found).collect();
        return Err(GadgetError::StructuralDefect(format!(
            "colored walk endpoints differ from host arcs: extra {extra:?}, missing {missing:?}"
        )));
    }
    Ok(found)
}

pub const MUTANT_CORPUS_VERSION: u32 = 1;

/// A single-edge defect injected into [`mutant_base`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mutant {
    pub name: &'static str,
    pub edge: (String, String),
    pub breaks: LemmaPart,
}

/// `H * J` for the single arc `u -> v`.
pub fn mutant_base() -> ReplacementGraph {
    let host = Graph::from_parts(Kind::Directed, &["u", "v"], &[("u", "v")])
        .expect("single arc is a valid digraph");
    replace(&host, &build_indicator()).expect("fresh names cannot collide")
}

pub fn mutant_corpus() -> Vec<Mutant> {
    let m = |name, a: &str, b: &str, breaks| Mutant {
        name,
        edge: (a.to_string(), b.to_string()),
        breaks,
    };
    vec![
        m("spine-cone-chord", "eu->v.x1.gc0", "eu->v.x1.gc2", LemmaPart::NeighbourhoodBipartite),
        m("terminal-spans-a-pair", "u", "eu->v.x2", LemmaPart::NoAdjacentA),
        m("a-root-spans-b-pair", "eu->v.x2", "eu->v.x4", LemmaPart::NoAdjacentB),
        m("tail-a-root-spans-b-pair", "eu->v.x3", "eu->v.x5", LemmaPart::NoAdjacentB),
        m(
            "deep-cone-chord",
            "eu->v.x0.gb1.ga1.gc0",
            "eu->v.x0.gb1.ga1.gc2",
            LemmaPart::NeighbourhoodBipartite,
        ),
    ]
}

pub fn apply_mutant(base: &ReplacementGraph, m: &Mutant) -> Result<ReplacementGraph, GadgetError> {
    base.with_extra_edge(&m.edge.0, &m.edge.1)
}
