use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Graph, GraphBuilder, GraphError, Kind};

/// Clockwise directed cycle on `c0..c(n-1)` with arcs `ci -> c(i+1 mod n)`.
pub fn directed_cycle(n: usize) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::CycleTooShort(n));
    }
    let mut b = GraphBuilder::new(Kind::Directed);
    for i in 0..n {
        b.add_vertex(format!("c{i}"))?;
    }
    for i in 0..n {
        b.add_edge_ids(i, (i + 1) % n)?;
    }
    Ok(b.build())
}

/// A finite disjoint union of directed cycles, given by its multiset of lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DiCycles(Vec<usize>);

impl DiCycles {
    pub fn new(lengths: Vec<usize>) -> Result<Self, GraphError> {
        if let Some(&bad) = lengths.iter().find(|&&n| n < 2) {
            return Err(GraphError::CycleTooShort(bad));
        }
        Ok(DiCycles(lengths))
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<usize>> for DiCycles {
    type Error = GraphError;

    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        DiCycles::new(v)
    }
}

impl From<DiCycles> for Vec<usize> {
    fn from(d: DiCycles) -> Self {
        d.0
    }
}

/// Expands a cycle multiset into a digraph; component `i` gets the prefix `p{i}.`.
pub fn dicycles_to_digraph(d: &DiCycles) -> Graph {
    let parts: Vec<Graph> = d
        .lengths()
        .iter()
        .map(|&n| directed_cycle(n).expect("DiCycles lengths are >= 2"))
        .collect();
    if parts.is_empty() {
        return Graph::empty(Kind::Directed);
    }
    disjoint_union(&parts).expect("all parts are digraphs")
}

/// Disjoint union with fresh identifiers `p{i}.{name}` for part `i`.
///
/// An empty list yields the empty undirected graph.
pub fn disjoint_union(parts: &[Graph]) -> Result<Graph, GraphError> {
    let kind = parts.first().map_or(Kind::Undirected, Graph::kind);
    let mut b = GraphBuilder::new(kind);
    for (i, part) in parts.iter().enumerate() {
        if part.kind() != kind {
            return Err(GraphError::MixedKinds { expected: kind, found: part.kind() });
        }
        let offset = b.vertex_count();
        for name in part.names() {
            b.add_vertex(format!("p{i}.{name}"))?;
        }
        for (x, y) in part.edges() {
            b.add_edge_ids(offset + x, offset + y)?;
        }
        for (v, map) in part.labels() {
            for (k, val) in map {
                b.set_label(&format!("p{i}.{v}"), k.clone(), val.clone())?;
            }
        }
    }
    Ok(b.build())
}

/// Weakly connected components as sorted index lists, ordered by their
/// lexicographically smallest identifier.
pub fn weak_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in g.succ(v).iter().chain(g.pred(v)) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps.sort_by(|a, b| {
        let min = |c: &Vec<usize>| c.iter().map(|&v| g.name(v)).min().map(str::to_owned);
        min(a).cmp(&min(b))
    });
    comps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_arcs() {
        let c3 = directed_cycle(3).unwrap();
        let arcs: Vec<_> = c3.edges().map(|(a, b)| (c3.name(a), c3.name(b))).collect();
        assert_eq!(arcs, vec![("c0", "c1"), ("c1", "c2"), ("c2", "c0")]);
        let c2 = directed_cycle(2).unwrap();
        assert_eq!(c2.edge_count(), 2);
        assert!(c2.has_edge_named("c0", "c1") && c2.has_edge_named("c1", "c0"));
        let err = directed_cycle(1).unwrap_err();
        assert!(err.to_string().contains("loop would be created"));
        assert!(directed_cycle(0).is_err());
    }

    #[test]
    fn dicycles_union_counts() {
        let d = DiCycles::new(vec![2, 3]).unwrap();
        let g = dicycles_to_digraph(&d);
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 5));
        let comps = weak_components(&g);
        assert_eq!(comps.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 3]);
        assert!(dicycles_to_digraph(&DiCycles::new(vec![]).unwrap()).is_empty());
        assert!(DiCycles::new(vec![3, 1]).is_err());
    }

    #[test]
    fn singleton_union_is_relabelled_cycle() {
        let g = dicycles_to_digraph(&DiCycles::new(vec![3]).unwrap());
        let c3 = directed_cycle(3).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), c3.edges().collect::<Vec<_>>());
        assert_eq!(g.name(0), "p0.c0");
    }

    #[test]
    fn union_of_edges() {
        let k2 = Graph::from_parts(Kind::Undirected, &["a", "b"], &[("a", "b")]).unwrap();
        let u = disjoint_union(&[k2.clone(), k2]).unwrap();
        assert_eq!((u.vertex_count(), u.edge_count()), (4, 2));
        let e = disjoint_union(&[]).unwrap();
        assert!(e.is_empty());
        let c = directed_cycle(2).unwrap();
        let k = Graph::from_parts(Kind::Undirected, &["a", "b"], &[("a", "b")]).unwrap();
        assert!(matches!(disjoint_union(&[c, k]), Err(GraphError::MixedKinds { .. })));
    }

    #[test]
    fn components_of_small_cases() {
        assert_eq!(weak_components(&directed_cycle(4).unwrap()).len(), 1);
        assert!(weak_components(&Graph::empty(Kind::Undirected)).is_empty());
    }
}
