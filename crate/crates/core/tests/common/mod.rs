//! Independent oracles for the integration tests. Nothing here calls the
//! solver, the walk tables or the closure engine.

#![allow(dead_code)]

use std::collections::BTreeSet;

use qhorder::graph::{Graph, GraphBuilder, Kind};
use rand::Rng;

/// Adjacency matrix, with undirected edges stored both ways.
pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut a = vec![vec![false; n]; n];
    for (x, y) in g.edges() {
        a[x][y] = true;
        if !g.is_directed() {
            a[y][x] = true;
        }
    }
    a
}

/// Exhaustive homomorphism test over all `|Y|^|X|` maps.
pub fn brute_force_hom(x: &Graph, y: &Graph) -> bool {
    let (n, m) = (x.vertex_count(), y.vertex_count());
    if n == 0 {
        return true;
    }
    if m == 0 {
        return false;
    }
    let ay = adjacency(y);
    let edges: Vec<(usize, usize)> = x.edges().collect();
    let mut f = vec![0usize; n];
    loop {
        if edges.iter().all(|&(a, b)| ay[f[a]][f[b]]) {
            return true;
        }
        let mut i = 0;
        loop {
            f[i] += 1;
            if f[i] < m {
                break;
            }
            f[i] = 0;
            i += 1;
            if i == n {
                return false;
            }
        }
    }
}

/// `walk[l][u][v]` by repeated matrix multiplication.
pub fn naive_walks(g: &Graph, bound: usize) -> Vec<Vec<Vec<bool>>> {
    let n = g.vertex_count();
    let a = adjacency(g);
    let mut levels = vec![(0..n).map(|u| (0..n).map(|v| u == v).collect()).collect::<Vec<Vec<bool>>>()];
    for _ in 0..bound {
        let prev = levels.last().unwrap();
        let next = (0..n)
            .map(|u| (0..n).map(|v| (0..n).any(|w| prev[u][w] && a[w][v])).collect())
            .collect();
        levels.push(next);
    }
    levels
}

pub fn random_graph(rng: &mut impl Rng, kind: Kind, n: usize, p: f64) -> Graph {
    let mut b = GraphBuilder::new(kind);
    for i in 0..n {
        b.add_vertex(format!("v{i}")).unwrap();
    }
    for i in 0..n {
        for j in 0..n {
            if i == j || (kind == Kind::Undirected && j < i) {
                continue;
            }
            if rng.gen_bool(p) {
                b.add_edge_ids(i, j).unwrap();
            }
        }
    }
    b.build()
}

/// A source graph built around a map `f: X -> Y`: every source edge is the
/// preimage of a target edge, so `f` is a homomorphism by construction.
pub fn planted_instance(rng: &mut impl Rng, y: &Graph, n: usize, p: f64) -> (Graph, Vec<usize>) {
    let m = y.vertex_count();
    let f: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
    let ay = adjacency(y);
    let mut b = GraphBuilder::new(y.kind());
    for i in 0..n {
        b.add_vertex(format!("x{i}")).unwrap();
    }
    for i in 0..n {
        for j in 0..n {
            if i == j || (!y.is_directed() && j < i) {
                continue;
            }
            if ay[f[i]][f[j]] && rng.gen_bool(p) {
                b.add_edge_ids(i, j).unwrap();
            }
        }
    }
    (b.build(), f)
}

/// All posets on `n` labelled elements, as `leq` matrices.
pub fn labelled_posets(n: usize) -> Vec<Vec<Vec<bool>>> {
    let off: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << off.len()) {
        let mut r = vec![vec![false; n]; n];
        for i in 0..n {
            r[i][i] = true;
        }
        for (k, &(a, b)) in off.iter().enumerate() {
            if mask >> k & 1 == 1 {
                r[a][b] = true;
            }
        }
        let antisym = (0..n).all(|a| (0..n).all(|b| a == b || !(r[a][b] && r[b][a])));
        let trans = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(r[a][b] && r[b][c]) || r[a][c])));
        if antisym && trans {
            out.push(r);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism type of posets on `n` elements.
pub fn poset_types(n: usize) -> Vec<Vec<Vec<bool>>> {
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for r in labelled_posets(n) {
        let canon = perms
            .iter()
            .map(|p| (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| r[p[a]][p[b]]).collect::<Vec<_>>())
            .min()
            .unwrap();
        if seen.insert(canon) {
            reps.push(r);
        }
    }
    reps
}

/// `{"elements":[...],"leq":[...]}` for a `leq` matrix.
pub fn poset_json(r: &[Vec<bool>]) -> String {
    let n = r.len();
    let names: Vec<String> = (0..n).map(|i| format!("\"{}\"", (b'a' + i as u8) as char)).collect();
    let pairs: Vec<String> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && r[a][b])
        .map(|(a, b)| format!("[{},{}]", names[a], names[b]))
        .collect();
    format!("{{\"elements\":[{}],\"leq\":[{}]}}", names.join(","), pairs.join(","))
}

/// The host digraphs used for the gadget checks.
pub fn host_corpus() -> Vec<(&'static str, Graph)> {
    let g = |v: &[&str], e: &[(&str, &str)]| Graph::from_parts(Kind::Directed, v, e).unwrap();
    vec![
        ("single arc", g(&["u", "v"], &[("u", "v")])),
        ("path of two arcs", g(&["u", "v", "w"], &[("u", "v"), ("v", "w")])),
        ("C2", g(&["c0", "c1"], &[("c0", "c1"), ("c1", "c0")])),
        ("C3", g(&["c0", "c1", "c2"], &[("c0", "c1"), ("c1", "c2"), ("c2", "c0")])),
        ("C4", g(&["c0", "c1", "c2", "c3"], &[("c0", "c1"), ("c1", "c2"), ("c2", "c3"), ("c3", "c0")])),
        ("two disjoint arcs", g(&["u", "v", "s", "t"], &[("u", "v"), ("s", "t")])),
    ]
}
