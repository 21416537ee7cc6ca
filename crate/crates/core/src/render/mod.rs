//! DOT emission for graphs, nets, trees, transition systems and resource networks.
//!
//! Node ids are derived from sorted labels or tree positions, so equal inputs give byte-identical
//! text.

mod check;

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

pub use check::{check_dot, DotSyntaxError};

use crate::analytics::SnaResult;
use crate::discovery::DirectlyFollowsGraph;
use crate::petrinet::{AcceptingPetriNet, Operator, ProcessTree, TransitionSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("cannot render malformed object: {0}")]
    MalformedObject(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DotKind {
    Dfg,
    Petri,
    Tree,
    TransitionSystem,
    Sna,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotDocument {
    pub text: String,
    pub kind: DotKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    /// SNA edges with a value below this are omitted.
    pub threshold: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { threshold: 0.0 }
    }
}

/// Anything [`to_dot`] accepts.
pub enum Renderable<'a> {
    Dfg(&'a DirectlyFollowsGraph),
    Petri(&'a AcceptingPetriNet),
    Tree(&'a ProcessTree),
    TransitionSystem(&'a TransitionSystem),
    Sna(&'a SnaResult),
}

pub fn to_dot(object: Renderable<'_>, options: &RenderOptions) -> Result<DotDocument, RenderError> {
    let (text, kind) = match object {
        Renderable::Dfg(dfg) => (dfg_to_dot(dfg), DotKind::Dfg),
        Renderable::Petri(anet) => (petri_to_dot(anet), DotKind::Petri),
        Renderable::Tree(tree) => (tree_to_dot(tree)?, DotKind::Tree),
        Renderable::TransitionSystem(ts) => (ts_to_dot(ts)?, DotKind::TransitionSystem),
        Renderable::Sna(result) => (sna_to_dot(result, options.threshold)?, DotKind::Sna),
    };
    Ok(DotDocument { text, kind })
}

/// Double-quoted DOT string.
fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn dfg_to_dot(dfg: &DirectlyFollowsGraph) -> String {
    let mut out = String::from("digraph dfg {\n  rankdir=LR;\n  node [shape=box];\n");
    for a in &dfg.activities {
        let mut attrs = Vec::new();
        if dfg.start_count(a) > 0 {
            attrs.push("style=filled".to_string());
        }
        if dfg.end_count(a) > 0 {
            attrs.push("penwidth=3".to_string());
        }
        if attrs.is_empty() {
            writeln!(out, "  {};", quote(a)).unwrap();
        } else {
            writeln!(out, "  {} [{}];", quote(a), attrs.join(", ")).unwrap();
        }
    }
    for ((a, b), count) in &dfg.counts {
        writeln!(out, "  {} -> {} [label=\"{count}\"];", quote(a), quote(b)).unwrap();
    }
    out.push_str("}\n");
    out
}

fn tokens_label(count: u32) -> String {
    match count {
        0 => String::new(),
        1..=3 => "●".repeat(count as usize),
        n => n.to_string(),
    }
}

pub fn petri_to_dot(anet: &AcceptingPetriNet) -> String {
    let net = &anet.net;
    let mut places: Vec<&String> = net.places().iter().collect();
    places.sort();
    let mut transitions: Vec<_> = net.transitions().iter().collect();
    transitions.sort_by(|a, b| a.id.cmp(&b.id));
    // Node key: (kind, index) rendered as `p{i}` or `t{i}`.
    let mut ids: BTreeMap<&str, (char, usize)> = BTreeMap::new();
    let mut out = String::from("digraph petri {\n  rankdir=LR;\n");
    for (i, p) in places.iter().enumerate() {
        let id = format!("p{i}");
        let shape = if anet.fm.get(p) > 0 { "doublecircle" } else { "circle" };
        writeln!(
            out,
            "  {id} [shape={shape}, label={}, xlabel={}];",
            quote(&tokens_label(anet.im.get(p))),
            quote(p)
        )
        .unwrap();
        ids.insert(p.as_str(), ('p', i));
    }
    for (i, t) in transitions.iter().enumerate() {
        let id = format!("t{i}");
        match &t.label {
            Some(label) => writeln!(out, "  {id} [shape=box, label={}];", quote(label)).unwrap(),
            None => writeln!(
                out,
                "  {id} [shape=box, style=filled, fillcolor=black, label=\"\", width=0.2];"
            )
            .unwrap(),
        }
        ids.insert(t.id.as_str(), ('t', i));
    }
    let mut arcs: Vec<((char, usize), (char, usize))> = net
        .arcs()
        .iter()
        .map(|(s, t)| (ids[s.as_str()], ids[t.as_str()]))
        .collect();
    arcs.sort_unstable();
    for ((sk, si), (tk, ti)) in arcs {
        writeln!(out, "  {sk}{si} -> {tk}{ti};").unwrap();
    }
    out.push_str("}\n");
    out
}

fn glyph(op: Operator) -> &'static str {
    match op {
        Operator::Sequence => "seq",
        Operator::Xor => "xor",
        Operator::Parallel => "and",
        Operator::Loop => "loop",
    }
}

pub fn tree_to_dot(tree: &ProcessTree) -> Result<String, RenderError> {
    tree.validate()
        .map_err(|e| RenderError::MalformedObject(e.to_string()))?;
    fn walk(tree: &ProcessTree, next: &mut usize, nodes: &mut String, edges: &mut String) -> usize {
        let id = *next;
        *next += 1;
        match tree {
            ProcessTree::Activity(label) => {
                writeln!(nodes, "  n{id} [shape=box, label={}];", quote(label)).unwrap();
            }
            ProcessTree::Tau => {
                writeln!(
                    nodes,
                    "  n{id} [shape=box, style=filled, fillcolor=black, label=\"\", width=0.2];"
                )
                .unwrap();
            }
            ProcessTree::Operator(op, children) => {
                writeln!(nodes, "  n{id} [shape=circle, label=\"{}\"];", glyph(*op)).unwrap();
                for child in children {
                    let c = walk(child, next, nodes, edges);
                    writeln!(edges, "  n{id} -> n{c};").unwrap();
                }
            }
        }
        id
    }
    let (mut nodes, mut edges) = (String::new(), String::new());
    walk(tree, &mut 0, &mut nodes, &mut edges);
    Ok(format!("digraph tree {{\n{nodes}{edges}}}\n"))
}

pub fn ts_to_dot(ts: &TransitionSystem) -> Result<String, RenderError> {
    let n = ts.states.len();
    if ts.initial >= n || ts.edges.iter().any(|e| e.source >= n || e.target >= n) {
        return Err(RenderError::MalformedObject(
            "edge or initial state out of range".into(),
        ));
    }
    let mut out = String::from("digraph ts {\n  rankdir=LR;\n  node [shape=ellipse];\n");
    for (i, state) in ts.states.iter().enumerate() {
        let extra = if i == ts.initial { ", penwidth=3" } else { "" };
        writeln!(out, "  s{i} [label={}{extra}];", quote(&state.marking.to_string())).unwrap();
    }
    for e in &ts.edges {
        writeln!(out, "  s{} -> s{} [label={}];", e.source, e.target, quote(&e.label)).unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

pub fn sna_to_dot(result: &SnaResult, threshold: f64) -> Result<String, RenderError> {
    let n = result.resources.len();
    if result.matrix.len() != n || result.matrix.iter().any(|row| row.len() != n) {
        return Err(RenderError::MalformedObject(
            "matrix does not match resource list".into(),
        ));
    }
    if result.matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(RenderError::MalformedObject("non-finite matrix value".into()));
    }
    let (kind, op) = if result.directed {
        ("digraph", "->")
    } else {
        ("graph", "--")
    };
    let mut out = format!("{kind} {} {{\n  node [shape=ellipse];\n", result.metric.name());
    for (i, r) in result.resources.iter().enumerate() {
        writeln!(out, "  r{i} [label={}];", quote(r)).unwrap();
    }
    for i in 0..n {
        let columns = if result.directed { 0..n } else { i + 1..n };
        for j in columns {
            let v = result.matrix[i][j];
            if v == 0.0 || v < threshold {
                continue;
            }
            writeln!(out, "  r{i} {op} r{j} [label=\"{v:.3}\"];").unwrap();
        }
    }
    out.push_str("}\n");
    Ok(out)
}
