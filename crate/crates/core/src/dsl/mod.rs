//! Text format for alphabets, words, homomorphisms, graphs of groups,
//! towers and tasks.
//!
//! ```text
//! alphabet F { x, y }
//! word w in F = [x, y]^2 x^-1
//! hom f : F -> F { x => x y, y => y }
//! graph X { vertex V = free F; vertex A = abelian 2 (c, t); edge e : V.(w) -- A.(1, 0) tree; base V; }
//! tower T { base F; level abelian attach [x, y] rank 1 names (c, t); }
//! task sep : separate T set { x, y } max 16 seed 7
//! ```
//!
//! Documents are kept as syntax so that `parse(render(doc)) == doc`;
//! [`elaborate`] turns them into engine values.

mod elaborate;
mod lexer;
mod parser;
mod render;

use std::sync::Arc;

use thiserror::Error;

use crate::words::{Alphabet, Exponent, Word};

pub use elaborate::{elaborate, eval_expr, export_graph, ConjTarget, ElabError, ResolvedTask, TaskSpec, Workspace};
pub use parser::parse;
pub use render::render;

/// Words that end a word expression and cannot name generators.
pub const KEYWORDS: &[&str] = &[
    "alphabet", "word", "hom", "graph", "tower", "task", "in", "vertex", "edge", "base", "free", "abelian", "tree",
    "level", "attach", "rank", "names", "quadratic", "genus", "boundary", "images", "separate", "discriminate",
    "conj", "set", "max", "seed", "indivisible", "left", "right", "pm",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

/// Juxtaposed terms; empty only for the literal `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr(pub Vec<Term>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub atom: Atom,
    pub exponent: Option<Exponent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    /// A generator or a declared word.
    Name(String),
    One,
    Group(Expr),
    Commutator(Expr, Expr),
}

impl Expr {
    pub fn name(s: &str) -> Expr {
        Expr(vec![Term { atom: Atom::Name(s.to_string()), exponent: None }])
    }

    /// Names used in the expression, in order of first appearance.
    pub fn names(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            for t in &e.0 {
                match &t.atom {
                    Atom::Name(n) if !out.contains(n) => out.push(n.clone()),
                    Atom::Name(_) | Atom::One => {}
                    Atom::Group(g) => walk(g, out),
                    Atom::Commutator(a, b) => {
                        walk(a, out);
                        walk(b, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn from_word(w: &Word) -> Expr {
        if w.is_identity() {
            return Expr(vec![Term { atom: Atom::One, exponent: None }]);
        }
        Expr(
            w.syllables()
                .iter()
                .map(|s| Term {
                    atom: Atom::Name(w.alphabet().generator_name(s.generator).to_string()),
                    exponent: (s.exponent != Exponent::ONE).then(|| s.exponent.clone()),
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Alphabet { name: String, generators: Vec<String> },
    Word { name: String, alphabet: String, expr: Expr },
    Hom { name: String, domain: String, codomain: String, images: Vec<(String, Expr)> },
    Graph(GraphDecl),
    Tower(TowerDecl),
    Task(TaskDecl),
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Alphabet { name, .. } | Decl::Word { name, .. } | Decl::Hom { name, .. } => name,
            Decl::Graph(g) => &g.name,
            Decl::Tower(t) => &t.name,
            Decl::Task(t) => &t.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDecl {
    pub name: String,
    pub vertices: Vec<VertexDecl>,
    pub edges: Vec<EdgeDecl>,
    pub base: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexDecl {
    pub name: String,
    pub group: GroupDecl,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupDecl {
    Free(String),
    Abelian { rank: usize, names: Option<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Attach {
    Word(Expr),
    Vector(Vec<Exponent>),
}

/// Both ends carry an attaching element, or neither does (trivial edge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDecl {
    pub name: String,
    pub from: String,
    pub to: String,
    pub attach: Option<(Attach, Attach)>,
    pub tree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerDecl {
    pub name: String,
    pub base: String,
    pub levels: Vec<LevelDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelDecl {
    Abelian { attach: Option<Expr>, rank: usize, names: Option<Vec<String>> },
    Quadratic { genus: usize, boundaries: Vec<Expr>, images: Vec<Expr>, names: Option<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskDecl {
    /// Defaults to `{kind}_{target}` when omitted in the source.
    pub name: String,
    pub kind: TaskKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskKind {
    Separate { tower: String, set: Vec<Expr>, max: u64, seed: Option<u64>, indivisible: Vec<Expr> },
    Discriminate { tower: String, set: Vec<Expr>, max: u64 },
    /// `target` names an alphabet, graph or tower.
    Conj { target: String, left: Expr, right: Expr, pm: bool },
}

impl TaskKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            TaskKind::Separate { .. } => "separate",
            TaskKind::Discriminate { .. } => "discriminate",
            TaskKind::Conj { .. } => "conj",
        }
    }

    pub fn target(&self) -> &str {
        match self {
            TaskKind::Separate { tower, .. } | TaskKind::Discriminate { tower, .. } => tower,
            TaskKind::Conj { target, .. } => target,
        }
    }

    pub fn default_name(&self) -> String {
        format!("{}_{}", self.keyword(), self.target())
    }
}

/// Declarations in source order. Equality ignores source positions.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub decls: Vec<Decl>,
    lines: Vec<usize>,
}

impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls
    }
}

impl Eq for Document {}

impl Document {
    pub fn new(decls: Vec<Decl>) -> Document {
        Document { decls, lines: Vec::new() }
    }

    /// Source line of declaration `i`, when parsed from text.
    pub fn line(&self, i: usize) -> Option<usize> {
        self.lines.get(i).copied()
    }

    pub fn tasks(&self) -> impl Iterator<Item = &TaskDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Task(t) => Some(t),
            _ => None,
        })
    }
}

/// Parses a bare word expression without resolving names.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    parser::parse_expr_text(text).map(|(e, _)| e)
}

/// Parses a bare word expression over `alphabet`. Only generator names are
/// accepted.
pub fn parse_word(alphabet: &Arc<Alphabet>, text: &str) -> Result<Word, ParseError> {
    let (expr, pos) = parser::parse_expr_text(text)?;
    elaborate::eval_expr(&expr, alphabet, &|_| None).map_err(|message| ParseError {
        line: pos.0,
        col: pos.1,
        expected: vec![format!("generator of `{}`", alphabet.name())],
        found: message,
    })
}

#[cfg(test)]
mod tests;
