//! Quivers with quadratic monomial relations.
//!
//! The text format is line oriented:
//!
//! ```text
//! algebra torus
//! vertices: 1 2 3
//! arrow a: 1 -> 2
//! relation a c
//! ```
//!
//! Vertices mentioned by arrows are added automatically, so the `vertices:`
//! line is only needed for isolated vertices or to fix their order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

/// A quiver with relations. Vertex and arrow indices are positions in the
/// respective vectors; relations are pairs of arrow indices `(a, b)` meaning
/// the path "a then b" vanishes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GentlePresentation {
    pub name: String,
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub relations: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: duplicate arrow `{id}`")]
    DuplicateArrow { line: usize, id: String },
    #[error("line {line}, column {col}: unknown arrow `{id}`")]
    UnknownArrow { line: usize, col: usize, id: String },
    #[error(
        "line {line}: relation `{first} {second}` is not a path (target of {first} is not the source of {second})"
    )]
    NotComposable { line: usize, first: String, second: String },
}

/// Reason a presentation fails to be (locally) gentle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InvalidReason {
    Empty,
    Disconnected { component: Vec<String> },
    TooManyIncoming { vertex: String },
    TooManyOutgoing { vertex: String },
    NotComposable { first: String, second: String },
    TwoRelationsAfter { arrow: String },
    TwoNonRelationsAfter { arrow: String },
    TwoRelationsBefore { arrow: String },
    TwoNonRelationsBefore { arrow: String },
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::Empty => write!(f, "the quiver has no vertices"),
            InvalidReason::Disconnected { component } => {
                write!(
                    f,
                    "the quiver is disconnected; one component is {{{}}}",
                    component.join(", ")
                )
            }
            InvalidReason::TooManyIncoming { vertex } => {
                write!(f, "vertex {vertex} has more than two incoming arrows")
            }
            InvalidReason::TooManyOutgoing { vertex } => {
                write!(f, "vertex {vertex} has more than two outgoing arrows")
            }
            InvalidReason::NotComposable { first, second } => {
                write!(f, "relation {first} {second} is not a composable pair")
            }
            InvalidReason::TwoRelationsAfter { arrow } => {
                write!(f, "arrow {arrow} starts two relations")
            }
            InvalidReason::TwoNonRelationsAfter { arrow } => {
                write!(f, "arrow {arrow} has two successors outside the relations")
            }
            InvalidReason::TwoRelationsBefore { arrow } => {
                write!(f, "arrow {arrow} ends two relations")
            }
            InvalidReason::TwoNonRelationsBefore { arrow } => {
                write!(f, "arrow {arrow} has two predecessors outside the relations")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum Classification {
    Gentle,
    /// Local conditions hold but some cycle of arrows avoids every relation.
    /// `cycle` lists arrow indices in order.
    LocallyGentleInfinite {
        cycle: Vec<usize>,
    },
    Invalid {
        reason: InvalidReason,
    },
}

impl GentlePresentation {
    pub fn new(name: impl Into<String>) -> Self {
        GentlePresentation {
            name: name.into(),
            vertices: Vec::new(),
            arrows: Vec::new(),
            relations: BTreeSet::new(),
        }
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.id == id)
    }

    /// Returns the index of `id`, adding the vertex if needed.
    pub fn add_vertex(&mut self, id: &str) -> usize {
        match self.vertex_index(id) {
            Some(i) => i,
            None => {
                self.vertices.push(id.to_string());
                self.vertices.len() - 1
            }
        }
    }

    pub fn add_arrow(&mut self, id: &str, source: usize, target: usize) -> usize {
        self.arrows.push(Arrow {
            id: id.to_string(),
            source,
            target,
        });
        self.arrows.len() - 1
    }

    pub fn is_relation(&self, a: usize, b: usize) -> bool {
        self.relations.contains(&(a, b))
    }

    pub fn incoming(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a].target == v).collect()
    }

    pub fn outgoing(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a].source == v).collect()
    }

    /// Writes the presentation back in the text format accepted by
    /// [`parse_presentation`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("algebra {}\n", self.name));
        }
        out.push_str("vertices:");
        for v in &self.vertices {
            out.push(' ');
            out.push_str(v);
        }
        out.push('\n');
        for a in &self.arrows {
            out.push_str(&format!(
                "arrow {}: {} -> {}\n",
                a.id, self.vertices[a.source], self.vertices[a.target]
            ));
        }
        for &(a, b) in &self.relations {
            out.push_str(&format!("relation {} {}\n", self.arrows[a].id, self.arrows[b].id));
        }
        out
    }
}

fn is_ident(tok: &str) -> bool {
    !tok.is_empty()
        && tok
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '-' | '+' | '*'))
        && tok != "->"
}

/// Splits a line into tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c == ' ' || c == '\t' {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub fn parse_presentation(text: &str) -> Result<GentlePresentation, ParseError> {
    let mut p = GentlePresentation::new("");
    let mut arrow_lines: HashMap<String, usize> = HashMap::new();
    let syntax = |line: usize, col: usize, msg: &str| ParseError::Syntax {
        line,
        col,
        msg: msg.to_string(),
    };

    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let toks = tokens(line);
        let Some(&(col0, head)) = toks.first() else {
            continue;
        };
        match head {
            "algebra" => {
                if toks.len() != 2 {
                    return Err(syntax(ln, col0, "expected `algebra <name>`"));
                }
                p.name = toks[1].1.to_string();
            }
            "vertices:" => {
                for &(col, v) in &toks[1..] {
                    if !is_ident(v) {
                        return Err(syntax(ln, col, "invalid vertex identifier"));
                    }
                    p.add_vertex(v);
                }
            }
            "arrow" => {
                // arrow <id>: <v> -> <w>
                if toks.len() != 5 || !toks[1].1.ends_with(':') || toks[3].1 != "->" {
                    return Err(syntax(ln, col0, "expected `arrow <id>: <vertex> -> <vertex>`"));
                }
                let id = toks[1].1.trim_end_matches(':');
                if !is_ident(id) {
                    return Err(syntax(ln, toks[1].0, "invalid arrow identifier"));
                }
                for &(col, v) in [&toks[2], &toks[4]] {
                    if !is_ident(v) {
                        return Err(syntax(ln, col, "invalid vertex identifier"));
                    }
                }
                if arrow_lines.contains_key(id) {
                    return Err(ParseError::DuplicateArrow {
                        line: ln,
                        id: id.to_string(),
                    });
                }
                arrow_lines.insert(id.to_string(), ln);
                let s = p.add_vertex(toks[2].1);
                let t = p.add_vertex(toks[4].1);
                p.add_arrow(id, s, t);
            }
            "relation" => {
                if toks.len() != 3 {
                    return Err(syntax(ln, col0, "expected `relation <arrow> <arrow>`"));
                }
                let mut idx = [0usize; 2];
                for k in 0..2 {
                    let (col, id) = toks[k + 1];
                    idx[k] = p.arrow_index(id).ok_or_else(|| ParseError::UnknownArrow {
                        line: ln,
                        col,
                        id: id.to_string(),
                    })?;
                }
                if p.arrows[idx[0]].target != p.arrows[idx[1]].source {
                    return Err(ParseError::NotComposable {
                        line: ln,
                        first: toks[1].1.to_string(),
                        second: toks[2].1.to_string(),
                    });
                }
                p.relations.insert((idx[0], idx[1]));
            }
            _ => return Err(syntax(ln, col0, &format!("unknown directive `{head}`"))),
        }
    }
    Ok(p)
}

fn check_local(p: &GentlePresentation) -> Result<(), InvalidReason> {
    if p.vertices.is_empty() {
        return Err(InvalidReason::Empty);
    }
    for &(a, b) in &p.relations {
        if p.arrows[a].target != p.arrows[b].source {
            return Err(InvalidReason::NotComposable {
                first: p.arrows[a].id.clone(),
                second: p.arrows[b].id.clone(),
            });
        }
    }
    for v in 0..p.vertices.len() {
        if p.incoming(v).len() > 2 {
            return Err(InvalidReason::TooManyIncoming {
                vertex: p.vertices[v].clone(),
            });
        }
        if p.outgoing(v).len() > 2 {
            return Err(InvalidReason::TooManyOutgoing {
                vertex: p.vertices[v].clone(),
            });
        }
    }
    for a in 0..p.arrows.len() {
        let id = || p.arrows[a].id.clone();
        let (rel, free): (Vec<usize>, Vec<usize>) = p
            .outgoing(p.arrows[a].target)
            .into_iter()
            .partition(|&b| p.is_relation(a, b));
        if rel.len() > 1 {
            return Err(InvalidReason::TwoRelationsAfter { arrow: id() });
        }
        if free.len() > 1 {
            return Err(InvalidReason::TwoNonRelationsAfter { arrow: id() });
        }
        let (rel, free): (Vec<usize>, Vec<usize>) = p
            .incoming(p.arrows[a].source)
            .into_iter()
            .partition(|&b| p.is_relation(b, a));
        if rel.len() > 1 {
            return Err(InvalidReason::TwoRelationsBefore { arrow: id() });
        }
        if free.len() > 1 {
            return Err(InvalidReason::TwoNonRelationsBefore { arrow: id() });
        }
    }
    Ok(())
}

fn check_connected(p: &GentlePresentation) -> Result<(), InvalidReason> {
    let n = p.vertices.len();
    let mut adj = vec![Vec::new(); n];
    for a in &p.arrows {
        adj[a.source].push(a.target);
        adj[a.target].push(a.source);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if seen.iter().all(|&s| s) {
        Ok(())
    } else {
        let mut component: Vec<String> = (0..n).filter(|&v| seen[v]).map(|v| p.vertices[v].clone()).collect();
        component.sort();
        Err(InvalidReason::Disconnected { component })
    }
}

/// Under the local conditions each arrow has at most one successor outside
/// the relations, so relation-free paths follow a partial function and any
/// relation-free cycle is a cycle of that function.
fn relation_free_cycle(p: &GentlePresentation) -> Option<Vec<usize>> {
    let next: Vec<Option<usize>> = (0..p.arrows.len())
        .map(|a| {
            p.outgoing(p.arrows[a].target)
                .into_iter()
                .find(|&b| !p.is_relation(a, b))
        })
        .collect();
    // 0 = unvisited, 1 = on current walk, 2 = done
    let mut state = vec![0u8; p.arrows.len()];
    for start in 0..p.arrows.len() {
        let mut walk = Vec::new();
        let mut cur = Some(start);
        while let Some(a) = cur {
            match state[a] {
                0 => {
                    state[a] = 1;
                    walk.push(a);
                    cur = next[a];
                }
                1 => {
                    let pos = walk.iter().position(|&x| x == a).unwrap();
                    return Some(walk[pos..].to_vec());
                }
                _ => break,
            }
        }
        for a in walk {
            state[a] = 2;
        }
    }
    None
}

pub fn validate_gentle(p: &GentlePresentation) -> Classification {
    if let Err(reason) = check_local(p).and_then(|_| check_connected(p)) {
        return Classification::Invalid { reason };
    }
    match relation_free_cycle(p) {
        Some(cycle) => Classification::LocallyGentleInfinite { cycle },
        None => Classification::Gentle,
    }
}

/// Canonical copy with vertices and arrows sorted lexicographically by id.
pub fn normalized(p: &GentlePresentation) -> GentlePresentation {
    let mut vorder: Vec<usize> = (0..p.vertices.len()).collect();
    vorder.sort_by(|&a, &b| p.vertices[a].cmp(&p.vertices[b]));
    let vmap: BTreeMap<usize, usize> = vorder.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let mut aorder: Vec<usize> = (0..p.arrows.len()).collect();
    aorder.sort_by(|&a, &b| p.arrows[a].id.cmp(&p.arrows[b].id));
    let amap: BTreeMap<usize, usize> = aorder.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    GentlePresentation {
        name: p.name.clone(),
        vertices: vorder.iter().map(|&v| p.vertices[v].clone()).collect(),
        arrows: aorder
            .iter()
            .map(|&a| Arrow {
                id: p.arrows[a].id.clone(),
                source: vmap[&p.arrows[a].source],
                target: vmap[&p.arrows[a].target],
            })
            .collect(),
        relations: p.relations.iter().map(|&(a, b)| (amap[&a], amap[&b])).collect(),
    }
}
