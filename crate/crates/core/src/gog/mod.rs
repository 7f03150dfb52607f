//! Graphs of groups with cyclic edge groups over free and free-abelian
//! vertex groups.
//!
//! Each edge runs from its `from` end to its `to` end; with `α` the
//! attaching element at `from` and `ω` the one at `to`, the edge letter
//! satisfies `e · ω · e⁻¹ = α`.

mod conjugacy;
mod element;
mod path;
mod presentation;

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::words::{Alphabet, WordError};

pub use conjugacy::{Classification, GogConjugacyResult};
pub use element::{ClassKey, Element, VertexGroup};
pub use path::{EdgeLetter, PathWord};
pub use presentation::{GenSource, Presentation, StrictnessReport, VertexTwist};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GogError {
    #[error("invalid graph of groups: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("map does not respect relation {0}")]
    RelationViolated(String),
    #[error("conjugacy search budget exhausted: {0}")]
    SearchBudget(String),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub group: VertexGroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeEnd {
    pub vertex: usize,
    pub attach: Element,
}

/// A cyclic (or, when `trivial`, trivial) edge group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub from: EdgeEnd,
    pub to: EdgeEnd,
    pub tree: bool,
    pub trivial: bool,
}

#[derive(Debug)]
pub struct GraphOfGroups {
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    base: usize,
    /// Acylindricity is never checked; this records that it is assumed.
    pub acylindrical_assumed: bool,
    /// Tree letter entering each vertex from its parent (base: `None`).
    parent: Vec<Option<EdgeLetter>>,
    presentation: OnceLock<Presentation>,
}

impl Clone for GraphOfGroups {
    fn clone(&self) -> Self {
        GraphOfGroups {
            name: self.name.clone(),
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            base: self.base,
            acylindrical_assumed: self.acylindrical_assumed,
            parent: self.parent.clone(),
            presentation: OnceLock::new(),
        }
    }
}

impl PartialEq for GraphOfGroups {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.vertices == other.vertices
            && self.edges == other.edges
            && self.base == other.base
    }
}

impl Eq for GraphOfGroups {}

/// Checks every structural invariant; an empty result means valid.
pub fn validate(vertices: &[Vertex], edges: &[Edge], base: usize) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |subject: String, message: String| out.push(Diagnostic { subject, message });
    if vertices.is_empty() {
        diag("graph".into(), "no vertices".into());
        return out;
    }
    if base >= vertices.len() {
        diag("graph".into(), "base vertex out of range".into());
    }
    let mut seen = std::collections::HashSet::new();
    for v in vertices {
        if !seen.insert(v.name.as_str()) {
            diag(format!("vertex `{}`", v.name), "duplicate vertex name".into());
        }
        if v.group.rank() == 0 {
            diag(format!("vertex `{}`", v.name), "vertex group has rank 0".into());
        }
    }
    let mut edge_names = std::collections::HashSet::new();
    for e in edges {
        let subject = format!("edge `{}`", e.name);
        if !edge_names.insert(e.name.as_str()) {
            diag(subject.clone(), "duplicate edge name".into());
        }
        let mut ok = true;
        for end in [&e.from, &e.to] {
            match vertices.get(end.vertex) {
                None => {
                    diag(subject.clone(), "endpoint out of range".into());
                    ok = false;
                }
                Some(v) if !v.group.contains(&end.attach) => {
                    diag(subject.clone(), format!("attaching element not in the group of `{}`", v.name));
                    ok = false;
                }
                _ => {}
            }
        }
        if !ok {
            continue;
        }
        let trivial_ends = [&e.from, &e.to]
            .iter()
            .filter(|end| vertices[end.vertex].group.is_identity(&end.attach))
            .count();
        match (e.trivial, trivial_ends) {
            (false, 0) | (true, 2) => {}
            (false, _) => diag(subject, "trivial attaching element".into()),
            (true, _) => diag(subject, "declared trivial but has a nontrivial attaching element".into()),
        }
    }

    // Connectivity and the spanning tree.
    let n = vertices.len();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    let mut tree_count = 0;
    for e in edges.iter().filter(|e| e.tree && e.from.vertex < n && e.to.vertex < n) {
        tree_count += 1;
        let (a, b) = (find(&mut comp, e.from.vertex), find(&mut comp, e.to.vertex));
        if a == b {
            diag(format!("edge `{}`", e.name), "tree edges contain a cycle".into());
        } else {
            comp[a] = b;
        }
    }
    let mut all: Vec<usize> = (0..n).collect();
    for e in edges.iter().filter(|e| e.from.vertex < n && e.to.vertex < n) {
        let (a, b) = (find(&mut all, e.from.vertex), find(&mut all, e.to.vertex));
        all[a] = b;
    }
    let root = find(&mut all, 0);
    if (0..n).any(|v| find(&mut all, v) != root) {
        diag("graph".into(), "underlying graph is disconnected".into());
    } else if tree_count != n - 1 {
        diag("graph".into(), format!("tree edges do not span: {} tree edges for {} vertices", tree_count, n));
    }

    // Presentation generators must have distinct names.
    let mut names = std::collections::HashMap::new();
    let gen_names = vertices
        .iter()
        .flat_map(|v| v.group.names().generators().iter().map(move |g| (g.clone(), v.name.clone())))
        .chain(edges.iter().filter(|e| !e.tree).map(|e| (e.name.clone(), format!("edge {}", e.name))));
    for (g, owner) in gen_names {
        if let Some(prev) = names.insert(g.clone(), owner.clone()) {
            diag(format!("generator `{g}`"), format!("name used by both {prev} and {owner}"));
        }
    }
    out
}

impl GraphOfGroups {
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        base: usize,
    ) -> Result<GraphOfGroups, GogError> {
        let diagnostics = validate(&vertices, &edges, base);
        if !diagnostics.is_empty() {
            return Err(GogError::Invalid(diagnostics));
        }
        let n = vertices.len();
        let mut parent = vec![None; n];
        let mut visited = vec![false; n];
        visited[base] = true;
        let mut stack = vec![base];
        while let Some(v) = stack.pop() {
            for (i, e) in edges.iter().enumerate().filter(|(_, e)| e.tree) {
                for (src, dst, forward) in [(e.from.vertex, e.to.vertex, true), (e.to.vertex, e.from.vertex, false)] {
                    if src == v && !visited[dst] {
                        visited[dst] = true;
                        parent[dst] = Some(EdgeLetter { edge: i, forward });
                        stack.push(dst);
                    }
                }
            }
        }
        Ok(GraphOfGroups {
            name: name.into(),
            vertices,
            edges,
            base,
            acylindrical_assumed: true,
            parent,
            presentation: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn group(&self, v: usize) -> &VertexGroup {
        &self.vertices[v].group
    }

    pub fn stable_letter_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.tree).count()
    }

    pub fn source(&self, l: EdgeLetter) -> usize {
        let e = &self.edges[l.edge];
        if l.forward { e.from.vertex } else { e.to.vertex }
    }

    pub fn target(&self, l: EdgeLetter) -> usize {
        let e = &self.edges[l.edge];
        if l.forward { e.to.vertex } else { e.from.vertex }
    }

    /// Attaching element at the source of `l`; `entry^k · l = l · exit^k`.
    pub fn entry(&self, l: EdgeLetter) -> &Element {
        let e = &self.edges[l.edge];
        if l.forward { &e.from.attach } else { &e.to.attach }
    }

    /// Attaching element at the target of `l`.
    pub fn exit(&self, l: EdgeLetter) -> &Element {
        let e = &self.edges[l.edge];
        if l.forward { &e.to.attach } else { &e.from.attach }
    }

    /// Edge letters leaving `v`, in edge order (forward before backward).
    pub fn letters_at(&self, v: usize) -> Vec<EdgeLetter> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.from.vertex == v {
                out.push(EdgeLetter { edge: i, forward: true });
            }
            if e.to.vertex == v {
                out.push(EdgeLetter { edge: i, forward: false });
            }
        }
        out
    }

    pub fn tree_parent(&self, v: usize) -> Option<EdgeLetter> {
        self.parent[v]
    }

    /// Alphabet naming the generators of vertex `v`.
    pub fn vertex_names(&self, v: usize) -> &Arc<Alphabet> {
        self.vertices[v].group.names()
    }
}

#[cfg(test)]
mod tests;
