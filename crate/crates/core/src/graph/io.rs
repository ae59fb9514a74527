//! JSON interchange and DOT export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Graph, GraphBuilder, GraphError, Kind, Labels};

/// Wire form of a graph:
/// `{"kind":"graph"|"digraph","vertices":[..],"edges":[[a,b]..],"labels":{v:{k:v}}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub kind: Kind,
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(default)]
    pub labels: Labels,
}

impl From<&Graph> for GraphDoc {
    fn from(g: &Graph) -> Self {
        let edges = g
            .edges()
            .map(|(a, b)| {
                let (x, y) = (g.name(a).to_string(), g.name(b).to_string());
                if g.kind() == Kind::Undirected && y < x {
                    [y, x]
                } else {
                    [x, y]
                }
            })
            .collect();
        GraphDoc {
            kind: g.kind(),
            vertices: g.names().to_vec(),
            edges,
            labels: g.labels().clone(),
        }
    }
}

impl TryFrom<GraphDoc> for Graph {
    type Error = GraphError;

    fn try_from(doc: GraphDoc) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::new(doc.kind);
        for (i, v) in doc.vertices.iter().enumerate() {
            b.add_vertex(v.clone()).map_err(|e| e.with_context(&format!("vertices[{i}]")))?;
        }
        for (i, [x, y]) in doc.edges.iter().enumerate() {
            b.add_edge(x, y).map_err(|e| e.with_context(&format!("edges[{i}]")))?;
        }
        for (v, map) in &doc.labels {
            for (k, val) in map {
                b.set_label(v, k.clone(), val.clone())
                    .map_err(|e| e.with_context(&format!("labels.{v}")))?;
            }
        }
        Ok(b.build())
    }
}

pub fn to_json_value(g: &Graph) -> serde_json::Value {
    serde_json::to_value(GraphDoc::from(g)).expect("graph documents always serialize")
}

pub fn to_json(g: &Graph) -> String {
    serde_json::to_string_pretty(&GraphDoc::from(g)).expect("graph documents always serialize")
}

/// Parses and validates a graph document. Syntax errors carry line and
/// column; invariant violations name the offending field, e.g. `edges[3]`.
pub fn from_json(text: &str) -> Result<Graph, GraphError> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
    Graph::try_from(doc)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering; labels become node attributes.
pub fn to_dot(g: &Graph) -> String {
    let (header, arrow) = match g.kind() {
        Kind::Directed => ("digraph", "->"),
        Kind::Undirected => ("graph", "--"),
    };
    let mut out = format!("{header} G {{\n");
    for name in g.names() {
        let attrs = g
            .labels()
            .get(name)
            .map(|m| {
                m.iter()
                    .map(|(k, v)| format!("{}={}", quote(k), quote(v)))
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .unwrap_or_default();
        if attrs.is_empty() {
            let _ = writeln!(out, "  {};", quote(name));
        } else {
            let _ = writeln!(out, "  {} [{attrs}];", quote(name));
        }
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "  {} {arrow} {};", quote(g.name(a)), quote(g.name(b)));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::directed_cycle;

    #[test]
    fn cycle_round_trip() {
        let c2 = directed_cycle(2).unwrap();
        assert_eq!(from_json(&to_json(&c2)).unwrap(), c2);
    }

    #[test]
    fn loop_is_reported_with_field() {
        let text = r#"{"kind":"graph","vertices":["v"],"edges":[["v","v"]]}"#;
        let err = from_json(text).unwrap_err();
        assert!(matches!(err, GraphError::Loop { .. }));
        assert!(err.to_string().contains("edges[0]"));
        assert!(err.to_string().contains("loop"));
    }

    #[test]
    fn unknown_endpoint_is_reported() {
        let text = r#"{"kind":"digraph","vertices":["a"],"edges":[["a","b"]]}"#;
        let err = from_json(text).unwrap_err();
        assert!(err.to_string().contains("unknown endpoint"));
    }

    #[test]
    fn duplicate_undirected_edge_is_reported() {
        let text = r#"{"kind":"graph","vertices":["a","b"],"edges":[["a","b"],["b","a"]]}"#;
        let err = from_json(text).unwrap_err();
        assert!(err.to_string().contains("edges[1]: duplicate edge"));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = from_json("{\n \"kind\": \"graph\",\n oops }").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn undirected_edges_are_written_sorted() {
        let g = Graph::from_parts(Kind::Undirected, &["z", "a"], &[("z", "a")]).unwrap();
        let doc = GraphDoc::from(&g);
        assert_eq!(doc.edges, vec![["a".to_string(), "z".to_string()]]);
    }

    #[test]
    fn dot_carries_labels() {
        let mut b = GraphBuilder::new(Kind::Undirected);
        b.add_vertex("a").unwrap();
        b.add_vertex("b").unwrap();
        b.add_edge("a", "b").unwrap();
        b.set_label("a", "role", "E").unwrap();
        let dot = to_dot(&b.build());
        assert!(dot.starts_with("graph G {"));
        assert!(dot.contains("\"a\" [\"role\"=\"E\"];"));
        assert!(dot.contains("\"a\" -- \"b\";"));
    }
}
