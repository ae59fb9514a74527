//! Color gadgets, the ordered indicator `J(a, b)` and the replacement `H * J`.
//!
//! The colors are ordinary graph structure:
//!
//! * an A-root is the apex of a cone over a private 5-cycle,
//! * a B-root is adjacent to two private, mutually adjacent A-roots,
//! * an E-root is adjacent to two private, mutually adjacent B-roots.
//!
//! The indicator is the path `x0 - x1 - ... - x6` whose vertices carry the
//! colors `E, A, A, B, B, A, E`. Reading the spine backwards gives
//! `E, A, B, B, A, A, E`, so the two terminals are distinguishable.
//!
//! Naming: spine vertices are `x0..x6`; gadget vertices extend their root's
//! name with `.gc{i}` (cone base), `.ga{j}` (private A-root) or `.gb{j}`
//! (private B-root). In `H * J` connectors keep their host names and every
//! other copy vertex is prefixed with `e{u}->{v}.`.

mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder, GraphDoc, GraphError, Kind};

pub use verify::{
    apply_mutant, colored_walks, colored_walks_in, detect_roles, endpoint_certificate,
    endpoint_pairs, mutant_base, mutant_corpus, verify_structural, Counterexample, LemmaPart,
    Mutant, RoleMismatch, StructuralReport, Witness, MUTANT_CORPUS_VERSION,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0:?} is not in the graph")]
    UnknownVertex(String),
    #[error("gadgets attach to undirected graphs only")]
    NotUndirected,
    #[error("replacement host must be a directed graph")]
    NotDirected,
    #[error("structural defect: {0}")]
    StructuralDefect(String),
    #[error("malformed replacement metadata: {0}")]
    Meta(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Color {
    A,
    B,
    E,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::A, Color::B, Color::E];

    fn bit(self) -> u8 {
        match self {
            Color::A => 1,
            Color::B => 2,
            Color::E => 4,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Color::A => "A",
            Color::B => "B",
            Color::E => "E",
        };
        f.write_str(s)
    }
}

/// Spine colors of the indicator, from `a = x0` to `b = x6`.
pub const SPINE_COLORS: [Color; 7] =
    [Color::E, Color::A, Color::A, Color::B, Color::B, Color::A, Color::E];

/// A set of colors; a vertex may carry several roles when detected structurally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ColorMask(u8);

impl ColorMask {
    pub const EMPTY: ColorMask = ColorMask(0);

    pub fn of(c: Color) -> Self {
        ColorMask(c.bit())
    }

    pub fn contains(self, c: Color) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn insert(&mut self, c: Color) {
        self.0 |= c.bit();
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ColorMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Color> {
        Color::ALL.into_iter().filter(move |&c| self.contains(c))
    }
}

impl fmt::Display for ColorMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|c| c.to_string()).collect();
        f.write_str(if s.is_empty() { "-" } else { &s })
    }
}

/// Construction metadata: the role of each root and the owner of each private
/// gadget vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoleMap {
    pub roles: BTreeMap<String, Color>,
    pub owners: BTreeMap<String, String>,
}

impl RoleMap {
    pub fn role(&self, v: &str) -> Option<Color> {
        self.roles.get(v).copied()
    }

    pub fn members(&self, c: Color) -> BTreeSet<String> {
        self.roles.iter().filter(|(_, &r)| r == c).map(|(v, _)| v.clone()).collect()
    }

    /// Role masks indexed like `g`'s vertices.
    pub fn masks(&self, g: &Graph) -> Vec<ColorMask> {
        g.names()
            .iter()
            .map(|n| self.role(n).map_or(ColorMask::EMPTY, ColorMask::of))
            .collect()
    }

    fn extend(&mut self, other: RoleMap) {
        self.roles.extend(other.roles);
        self.owners.extend(other.owners);
    }
}

fn attach_into(
    b: &mut GraphBuilder,
    roles: &mut RoleMap,
    root: &str,
    kind: Color,
) -> Result<(), GraphError> {
    let r = b.index_of(root).ok_or_else(|| GraphError::UnknownEndpoint {
        vertex: root.to_string(),
        context: String::new(),
    })?;
    roles.roles.insert(root.to_string(), kind);
    b.set_label(root, "role", kind.to_string())?;
    match kind {
        Color::A => {
            let mut cyc = Vec::with_capacity(5);
            for i in 0..5 {
                let name = format!("{root}.gc{i}");
                roles.owners.insert(name.clone(), root.to_string());
                cyc.push(b.add_vertex(name)?);
            }
            for i in 0..5 {
                b.add_edge_ids(cyc[i], cyc[(i + 1) % 5])?;
                b.add_edge_ids(r, cyc[i])?;
            }
        }
        Color::B | Color::E => {
            let (tag, inner) = if kind == Color::B { ("ga", Color::A) } else { ("gb", Color::B) };
            let names = [format!("{root}.{tag}1"), format!("{root}.{tag}2")];
            let mut ids = [0; 2];
            for (slot, name) in ids.iter_mut().zip(&names) {
                roles.owners.insert(name.clone(), root.to_string());
                *slot = b.add_vertex(name.clone())?;
            }
            b.add_edge_ids(r, ids[0])?;
            b.add_edge_ids(r, ids[1])?;
            b.add_edge_ids(ids[0], ids[1])?;
            for name in &names {
                attach_into(b, roles, name, inner)?;
            }
        }
    }
    Ok(())
}

/// Attaches a fresh private gadget of the given color to `v`; returns the new
/// graph and the roles/owners introduced by the gadget.
pub fn attach_gadget(g: &Graph, v: &str, kind: Color) -> Result<(Graph, RoleMap), GadgetError> {
    if g.kind() != Kind::Undirected {
        return Err(GadgetError::NotUndirected);
    }
    if g.index_of(v).is_none() {
        return Err(GadgetError::UnknownVertex(v.to_string()));
    }
    let mut b = g.to_builder();
    let mut delta = RoleMap::default();
    attach_into(&mut b, &mut delta, v, kind)?;
    Ok((b.build(), delta))
}

/// The ordered indicator `J(a, b)` with its spine and construction roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Indicator {
    pub graph: Graph,
    pub a: String,
    pub b: String,
    pub spine: Vec<String>,
    pub roles: RoleMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorDoc {
    pub graph: GraphDoc,
    pub a: String,
    pub b: String,
    pub spine: Vec<String>,
    pub roles: RoleMap,
}

impl Indicator {
    pub fn spine_colors(&self) -> Vec<Option<Color>> {
        self.spine.iter().map(|v| self.roles.role(v)).collect()
    }

    pub fn to_doc(&self) -> IndicatorDoc {
        IndicatorDoc {
            graph: GraphDoc::from(&self.graph),
            a: self.a.clone(),
            b: self.b.clone(),
            spine: self.spine.clone(),
            roles: self.roles.clone(),
        }
    }
}

pub fn build_indicator() -> Indicator {
    let mut b = GraphBuilder::new(Kind::Undirected);
    let spine: Vec<String> = (0..7).map(|i| format!("x{i}")).collect();
    for v in &spine {
        b.add_vertex(v.clone()).expect("fresh spine vertex");
    }
    for i in 0..6 {
        b.add_edge_ids(i, i + 1).expect("fresh spine edge");
    }
    let mut roles = RoleMap::default();
    for (v, &c) in spine.iter().zip(SPINE_COLORS.iter()) {
        attach_into(&mut b, &mut roles, v, c).expect("gadget vertices are fresh");
    }
    Indicator {
        graph: b.build(),
        a: spine[0].clone(),
        b: spine[6].clone(),
        spine,
        roles,
    }
}

/// One copy `J_uv` inside `H * J`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyRecord {
    pub tail: String,
    pub head: String,
    /// `x0 = tail, x1, ..., x5, x6 = head`.
    pub spine: Vec<String>,
    /// All copy vertices, position-aligned with the indicator's vertex order.
    pub vertices: Vec<String>,
}

impl CopyRecord {
    pub fn private_vertices(&self) -> impl Iterator<Item = &String> {
        self.vertices.iter().filter(move |v| **v != self.tail && **v != self.head)
    }
}

/// `H * J` together with its host, copy records and roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementGraph {
    pub graph: Graph,
    pub host: Graph,
    pub copies: Vec<CopyRecord>,
    pub roles: RoleMap,
}

/// The three color classes `A(Y)`, `B(Y)`, `E(Y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColorSets {
    pub a: BTreeSet<String>,
    pub b: BTreeSet<String>,
    pub e: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplacementDoc {
    pub graph: GraphDoc,
    pub host: GraphDoc,
    pub copies: Vec<CopyRecord>,
    pub roles: RoleMap,
}

impl ReplacementGraph {
    pub fn connectors(&self) -> &[String] {
        self.host.names()
    }

    pub fn is_connector(&self, v: &str) -> bool {
        self.host.index_of(v).is_some()
    }

    pub fn copy(&self, tail: &str, head: &str) -> Option<&CopyRecord> {
        self.copies.iter().find(|c| c.tail == tail && c.head == head)
    }

    pub fn color_sets(&self) -> ColorSets {
        color_sets(self)
    }

    /// Labeled color masks indexed like `self.graph`.
    pub fn color_masks(&self) -> Vec<ColorMask> {
        self.roles.masks(&self.graph)
    }

    pub fn to_doc(&self) -> ReplacementDoc {
        ReplacementDoc {
            graph: GraphDoc::from(&self.graph),
            host: GraphDoc::from(&self.host),
            copies: self.copies.clone(),
            roles: self.roles.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("metadata always serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GadgetError> {
        let doc: ReplacementDoc =
            serde_json::from_str(text).map_err(|e| GadgetError::Meta(e.to_string()))?;
        Self::try_from(doc)
    }

    /// Returns the same metadata over a graph with extra edges (used by the
    /// mutant corpus).
    pub fn with_extra_edge(&self, a: &str, b: &str) -> Result<Self, GadgetError> {
        let mut builder = self.graph.to_builder();
        builder.add_edge(a, b)?;
        Ok(ReplacementGraph { graph: builder.build(), ..self.clone() })
    }
}

impl TryFrom<ReplacementDoc> for ReplacementGraph {
    type Error = GadgetError;

    fn try_from(doc: ReplacementDoc) -> Result<Self, GadgetError> {
        let graph = Graph::try_from(doc.graph).map_err(|e| GadgetError::Meta(format!("graph: {e}")))?;
        let host = Graph::try_from(doc.host).map_err(|e| GadgetError::Meta(format!("host: {e}")))?;
        if graph.kind() != Kind::Undirected || host.kind() != Kind::Directed {
            return Err(GadgetError::Meta("expected an undirected graph over a directed host".into()));
        }
        let known = |v: &str, what: &str| {
            graph
                .index_of(v)
                .map(|_| ())
                .ok_or_else(|| GadgetError::Meta(format!("{what} {v:?} is not a graph vertex")))
        };
        for c in host.names() {
            known(c, "connector")?;
        }
        for (i, copy) in doc.copies.iter().enumerate() {
            if copy.spine.len() != 7 {
                return Err(GadgetError::Meta(format!("copies[{i}]: spine must have 7 vertices")));
            }
            if !host.has_edge_named(&copy.tail, &copy.head) {
                return Err(GadgetError::Meta(format!("copies[{i}]: not an arc of the host")));
            }
            for v in copy.spine.iter().chain(&copy.vertices) {
                known(v, "copy vertex")?;
            }
        }
        for v in doc.roles.roles.keys().chain(doc.roles.owners.keys()) {
            known(v, "role vertex")?;
        }
        Ok(ReplacementGraph { graph, host, copies: doc.copies, roles: doc.roles })
    }
}

/// `H * J`: every arc `u -> v` of `H` becomes a fresh copy of `J` with
/// `a = u` and `b = v`. Isolated host vertices stay isolated.
pub fn replace(host: &Graph, j: &Indicator) -> Result<ReplacementGraph, GadgetError> {
    if host.kind() != Kind::Directed {
        return Err(GadgetError::NotDirected);
    }
    let mut b = GraphBuilder::new(Kind::Undirected);
    for v in host.names() {
        b.add_vertex(v.clone())?;
    }
    let (ja, jb) = (
        j.graph.index_of(&j.a).expect("terminal a is a vertex of J"),
        j.graph.index_of(&j.b).expect("terminal b is a vertex of J"),
    );
    let mut roles = RoleMap::default();
    let mut copies = Vec::with_capacity(host.edge_count());
    for (tu, tv) in host.edges() {
        let (u, v) = (host.name(tu), host.name(tv));
        let prefix = format!("e{u}->{v}");
        let mut names = Vec::with_capacity(j.graph.vertex_count());
        let mut ids = Vec::with_capacity(j.graph.vertex_count());
        for (w, wname) in j.graph.names().iter().enumerate() {
            let name = if w == ja {
                u.to_string()
            } else if w == jb {
                v.to_string()
            } else {
                let name = format!("{prefix}.{wname}");
                b.add_vertex(name.clone())?;
                name
            };
            ids.push(b.index_of(&name).expect("just added"));
            names.push(name);
        }
        for (x, y) in j.graph.edges() {
            b.add_edge_ids(ids[x], ids[y])?;
        }
        let mapped = |w: &str| names[j.graph.index_of(w).expect("J vertex")].clone();
        let mut delta = RoleMap::default();
        for (w, &c) in &j.roles.roles {
            delta.roles.insert(mapped(w), c);
        }
        for (w, o) in &j.roles.owners {
            delta.owners.insert(mapped(w), mapped(o));
        }
        for (w, &c) in &delta.roles {
            b.set_label(w, "role", c.to_string())?;
        }
        roles.extend(delta);
        copies.push(CopyRecord {
            tail: u.to_string(),
            head: v.to_string(),
            spine: j.spine.iter().map(|s| mapped(s)).collect(),
            vertices: names,
        });
    }
    Ok(ReplacementGraph { graph: b.build(), host: host.clone(), copies, roles })
}

pub fn color_sets(y: &ReplacementGraph) -> ColorSets {
    ColorSets {
        a: y.roles.members(Color::A),
        b: y.roles.members(Color::B),
        e: y.roles.members(Color::E),
    }
}

/// Initial domains for the classical solver: source vertex `s` may only map to
/// target vertices whose colors include every role of `s`.
pub fn color_domains(source_roles: &[ColorMask], target_colors: &[ColorMask]) -> Vec<FixedBitSet> {
    source_roles
        .iter()
        .map(|&r| {
            let mut d = FixedBitSet::with_capacity(target_colors.len());
            for (t, &c) in target_colors.iter().enumerate() {
                if r.is_subset(c) {
                    d.insert(t);
                }
            }
            d
        })
        .collect()
}
