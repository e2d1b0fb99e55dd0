//! GraphML, DOT and JSON adjacency exports of a [`FilteredGraph`].

use std::fmt::Write as _;

use serde::Serialize;

use super::FilteredGraph;
use crate::distance::{DistanceMethod, DistanceParams};

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_graphml(g: &FilteredGraph) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    s.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    s.push_str("  <key id=\"rank\" for=\"edge\" attr.name=\"rank\" attr.type=\"int\"/>\n");
    s.push_str("  <key id=\"kind\" for=\"graph\" attr.name=\"kind\" attr.type=\"string\"/>\n");
    s.push_str("  <key id=\"method\" for=\"graph\" attr.name=\"method\" attr.type=\"string\"/>\n");
    s.push_str(
        "  <key id=\"alphabet\" for=\"graph\" attr.name=\"alphabet_size\" attr.type=\"int\"/>\n",
    );
    let _ = writeln!(s, "  <graph id=\"{}\" edgedefault=\"undirected\">", g.kind);
    let _ = writeln!(s, "    <data key=\"kind\">{}</data>", g.kind);
    let _ = writeln!(s, "    <data key=\"method\">{}</data>", g.source_method);
    if g.source_method.uses_symbols() {
        let _ = writeln!(
            s,
            "    <data key=\"alphabet\">{}</data>",
            g.source_params.alphabet_size
        );
    }
    for (i, name) in g.nodes.iter().enumerate() {
        let _ = writeln!(
            s,
            "    <node id=\"n{i}\"><data key=\"label\">{}</data></node>",
            xml_escape(name)
        );
    }
    for (rank, e) in g.edges.iter().enumerate() {
        let _ = writeln!(
            s,
            "    <edge id=\"e{rank}\" source=\"n{}\" target=\"n{}\"><data key=\"weight\">{}</data><data key=\"rank\">{rank}</data></edge>",
            e.u, e.v, e.weight
        );
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

pub fn to_dot(g: &FilteredGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph {} {{", g.kind);
    let _ = writeln!(
        s,
        "  graph [method=\"{}\"{}];",
        g.source_method,
        if g.source_method.uses_symbols() {
            format!(", alphabet_size={}", g.source_params.alphabet_size)
        } else {
            String::new()
        }
    );
    for name in &g.nodes {
        let _ = writeln!(s, "  \"{}\";", dot_escape(name));
    }
    for (rank, e) in g.edges.iter().enumerate() {
        let _ = writeln!(
            s,
            "  \"{}\" -- \"{}\" [weight={}, rank={rank}];",
            dot_escape(&g.nodes[e.u]),
            dot_escape(&g.nodes[e.v]),
            e.weight
        );
    }
    s.push_str("}\n");
    s
}

#[derive(Debug, Serialize)]
pub struct JsonEdge<'a> {
    pub source: &'a str,
    pub target: &'a str,
    pub weight: f64,
    pub rank: usize,
}

#[derive(Debug, Serialize)]
pub struct JsonNode<'a> {
    pub label: &'a str,
    pub neighbors: Vec<&'a str>,
}

/// Adjacency document carried by the JSON export.
#[derive(Debug, Serialize)]
pub struct JsonGraph<'a> {
    pub kind: &'static str,
    pub source_method: DistanceMethod,
    pub source_params: &'a DistanceParams,
    pub nodes: Vec<JsonNode<'a>>,
    pub edges: Vec<JsonEdge<'a>>,
}

pub fn to_json_document(g: &FilteredGraph) -> JsonGraph<'_> {
    let adj = g.adjacency();
    JsonGraph {
        kind: g.kind.as_str(),
        source_method: g.source_method,
        source_params: &g.source_params,
        nodes: g
            .nodes
            .iter()
            .zip(&adj)
            .map(|(label, nb)| JsonNode {
                label,
                neighbors: nb.iter().map(|&w| g.nodes[w].as_str()).collect(),
            })
            .collect(),
        edges: g
            .edges
            .iter()
            .enumerate()
            .map(|(rank, e)| JsonEdge {
                source: &g.nodes[e.u],
                target: &g.nodes[e.v],
                weight: e.weight,
                rank,
            })
            .collect(),
    }
}

pub fn to_json(g: &FilteredGraph) -> String {
    serde_json::to_string_pretty(&to_json_document(g)).expect("graph document serializes")
}
