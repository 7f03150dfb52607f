use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::{
    Atom, Attach, Decl, Document, EdgeDecl, Expr, GraphDecl, GroupDecl, LevelDecl, TaskDecl, TaskKind, TowerDecl,
    VertexDecl,
};
use crate::gog::{Edge, EdgeEnd, Element, GraphOfGroups, Vertex, VertexGroup};
use crate::homs::FreeHom;
use crate::towers::{ExtensionLevel, Tower};
use crate::words::{commutator, Alphabet, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}`{decl}`: {message}", line.map(|l| format!("line {l}, ")).unwrap_or_default())]
pub struct ElabError {
    pub decl: String,
    pub line: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjTarget {
    Free(Arc<Alphabet>),
    Graph(String),
    Tower(String),
}

/// Task with its words evaluated. Tower words are over the presentation of
/// the top of the tower; graph words over the graph's presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskSpec {
    Separate { tower: String, set: Vec<Word>, max: u64, seed: Option<u64>, indivisible: Vec<usize> },
    Discriminate { tower: String, set: Vec<Word>, max: u64 },
    Conj { target: ConjTarget, left: Word, right: Word, pm: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedTask {
    pub name: String,
    pub spec: TaskSpec,
}

#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub alphabets: HashMap<String, Arc<Alphabet>>,
    pub words: HashMap<String, Word>,
    pub homs: HashMap<String, FreeHom>,
    pub graphs: HashMap<String, GraphOfGroups>,
    pub towers: HashMap<String, Tower>,
    pub tasks: Vec<ResolvedTask>,
}

impl Workspace {
    pub fn task(&self, name: &str) -> Option<&ResolvedTask> {
        self.tasks.iter().find(|t| t.name == name)
    }

    /// Alphabet in which words for a conjugacy target are written.
    pub fn target_alphabet(&self, t: &ConjTarget) -> Arc<Alphabet> {
        match t {
            ConjTarget::Free(a) => a.clone(),
            ConjTarget::Graph(g) => self.graphs[g].presentation().alphabet.clone(),
            ConjTarget::Tower(t) => self.towers[t].top().presentation().alphabet.clone(),
        }
    }

    fn eval(&self, e: &Expr, alphabet: &Arc<Alphabet>) -> Result<Word, String> {
        eval_expr(e, alphabet, &|n| self.words.get(n).cloned())
    }
}

pub fn eval_expr(
    e: &Expr,
    alphabet: &Arc<Alphabet>,
    lookup: &dyn Fn(&str) -> Option<Word>,
) -> Result<Word, String> {
    let mut acc = Word::identity(alphabet);
    for t in &e.0 {
        let w = match &t.atom {
            Atom::Name(n) => match alphabet.index_of(n) {
                Some(i) => Word::generator(alphabet, i),
                None => match lookup(n) {
                    Some(w) => w.rename_into(alphabet).map_err(|e| format!("word `{n}`: {e}"))?,
                    None => return Err(format!("`{n}` is neither a generator of `{}` nor a declared word", alphabet.name())),
                },
            },
            Atom::One => Word::identity(alphabet),
            Atom::Group(g) => eval_expr(g, alphabet, lookup)?,
            Atom::Commutator(a, b) => {
                commutator(&eval_expr(a, alphabet, lookup)?, &eval_expr(b, alphabet, lookup)?).map_err(|e| e.to_string())?
            }
        };
        let w = match &t.exponent {
            Some(k) => w.pow(k).map_err(|e| e.to_string())?,
            None => w,
        };
        acc = acc.try_mul(&w).map_err(|e| e.to_string())?;
    }
    Ok(acc)
}

pub fn elaborate(doc: &Document) -> Result<Workspace, ElabError> {
    let mut ws = Workspace::default();
    for (i, d) in doc.decls.iter().enumerate() {
        let err = |message: String| ElabError { decl: d.name().to_string(), line: doc.line(i), message };
        let alphabet = |ws: &Workspace, n: &str| ws.alphabets.get(n).cloned().ok_or_else(|| err(format!("unknown alphabet `{n}`")));
        match d {
            Decl::Alphabet { name, generators } => {
                let a = Alphabet::new(name.clone(), generators.iter().cloned()).map_err(|e| err(e.to_string()))?;
                ws.alphabets.insert(name.clone(), a);
            }
            Decl::Word { name, alphabet: a, expr } => {
                let a = alphabet(&ws, a)?;
                let w = ws.eval(expr, &a).map_err(err)?;
                ws.words.insert(name.clone(), w);
            }
            Decl::Hom { name, domain, codomain, images } => {
                let (dom, cod) = (alphabet(&ws, domain)?, alphabet(&ws, codomain)?);
                let mut slots: Vec<Option<Word>> = vec![None; dom.rank()];
                for (g, e) in images {
                    let i = dom.index_of(g).ok_or_else(|| err(format!("`{g}` is not a generator of `{domain}`")))?;
                    if slots[i].is_some() {
                        return Err(err(format!("generator `{g}` mapped twice")));
                    }
                    slots[i] = Some(ws.eval(e, &cod).map_err(err)?);
                }
                let images = slots
                    .into_iter()
                    .enumerate()
                    .map(|(i, w)| w.ok_or_else(|| err(format!("no image for `{}`", dom.generator_name(i)))))
                    .collect::<Result<Vec<_>, _>>()?;
                let h = FreeHom::new(&dom, &cod, images).map_err(|e| err(e.to_string()))?;
                ws.homs.insert(name.clone(), h);
            }
            Decl::Graph(g) => {
                let graph = elaborate_graph(&ws, g).map_err(err)?;
                ws.graphs.insert(g.name.clone(), graph);
            }
            Decl::Tower(t) => {
                let tower = elaborate_tower(&ws, t).map_err(err)?;
                ws.towers.insert(t.name.clone(), tower);
            }
            Decl::Task(t) => {
                let spec = elaborate_task(&ws, t).map_err(err)?;
                ws.tasks.push(ResolvedTask { name: t.name.clone(), spec });
            }
        }
    }
    Ok(ws)
}

fn elaborate_graph(ws: &Workspace, g: &GraphDecl) -> Result<GraphOfGroups, String> {
    let mut vertices = Vec::with_capacity(g.vertices.len());
    for v in &g.vertices {
        let group = match &v.group {
            GroupDecl::Free(a) => VertexGroup::Free(ws.alphabets.get(a).ok_or(format!("unknown alphabet `{a}`"))?.clone()),
            GroupDecl::Abelian { rank, names } => {
                let names = names.clone().unwrap_or_else(|| (1..=*rank).map(|j| format!("{}_{j}", v.name)).collect());
                if names.len() != *rank {
                    return Err(format!("vertex `{}`: rank {rank} but {} names", v.name, names.len()));
                }
                VertexGroup::Abelian(Alphabet::new(v.name.clone(), names).map_err(|e| e.to_string())?)
            }
        };
        vertices.push(Vertex { name: v.name.clone(), group });
    }
    let index = |n: &str| g.vertices.iter().position(|v| v.name == n).ok_or(format!("unknown vertex `{n}`"));
    let element = |v: usize, a: &Attach| -> Result<Element, String> {
        match (&vertices[v].group, a) {
            (VertexGroup::Free(alpha), Attach::Word(e)) => Ok(Element::Free(ws.eval(e, alpha)?)),
            (VertexGroup::Abelian(alpha), Attach::Vector(x)) if x.len() == alpha.rank() => Ok(Element::Abelian(x.clone())),
            _ => Err(format!("attaching element does not fit vertex `{}`", vertices[v].name)),
        }
    };
    let mut edges = Vec::with_capacity(g.edges.len());
    for e in &g.edges {
        let (from, to) = (index(&e.from)?, index(&e.to)?);
        let (a, b, trivial) = match &e.attach {
            Some((a, b)) => (element(from, a)?, element(to, b)?, false),
            None => (vertices[from].group.identity(), vertices[to].group.identity(), true),
        };
        edges.push(Edge {
            name: e.name.clone(),
            from: EdgeEnd { vertex: from, attach: a },
            to: EdgeEnd { vertex: to, attach: b },
            tree: e.tree,
            trivial,
        });
    }
    let base = match &g.base {
        Some(b) => index(b)?,
        None => 0,
    };
    GraphOfGroups::new(g.name.clone(), vertices, edges, base).map_err(|e| e.to_string())
}

fn elaborate_tower(ws: &Workspace, t: &TowerDecl) -> Result<Tower, String> {
    let base = ws.alphabets.get(&t.base).ok_or(format!("unknown alphabet `{}`", t.base))?;
    let mut tower = Tower::new(t.name.clone(), base).map_err(|e| e.to_string())?;
    for (i, l) in t.levels.iter().enumerate() {
        let p = tower.top().presentation().alphabet.clone();
        let eval = |e: &Expr| ws.eval(e, &p).map_err(|m| format!("level {}: {m}", i + 1));
        let level = match l {
            LevelDecl::Abelian { attach, rank, names } => ExtensionLevel::Abelian {
                attach: attach.as_ref().map(eval).transpose()?,
                rank: *rank,
                names: names.clone().unwrap_or_default(),
            },
            LevelDecl::Quadratic { genus, boundaries, images, names } => ExtensionLevel::Quadratic {
                genus: *genus,
                boundaries: boundaries.iter().map(eval).collect::<Result<_, _>>()?,
                images: images.iter().map(eval).collect::<Result<_, _>>()?,
                names: names.clone().unwrap_or_default(),
            },
        };
        tower.push(level).map_err(|e| e.to_string())?;
    }
    Ok(tower)
}

fn elaborate_task(ws: &Workspace, t: &TaskDecl) -> Result<TaskSpec, String> {
    let tower_alphabet = |name: &str| {
        ws.towers.get(name).map(|t| t.top().presentation().alphabet.clone()).ok_or(format!("unknown tower `{name}`"))
    };
    Ok(match &t.kind {
        TaskKind::Separate { tower, set, max, seed, indivisible } => {
            let a = tower_alphabet(tower)?;
            let mut set: Vec<Word> = set.iter().map(|e| ws.eval(e, &a)).collect::<Result<_, _>>()?;
            let mut flagged = Vec::new();
            for e in indivisible {
                let w = ws.eval(e, &a)?;
                let i = match set.iter().position(|x| x == &w) {
                    Some(i) => i,
                    None => {
                        set.push(w);
                        set.len() - 1
                    }
                };
                flagged.push(i);
            }
            TaskSpec::Separate { tower: tower.clone(), set, max: *max, seed: *seed, indivisible: flagged }
        }
        TaskKind::Discriminate { tower, set, max } => {
            let a = tower_alphabet(tower)?;
            let set = set.iter().map(|e| ws.eval(e, &a)).collect::<Result<_, _>>()?;
            TaskSpec::Discriminate { tower: tower.clone(), set, max: *max }
        }
        TaskKind::Conj { target, left, right, pm } => {
            let target = if let Some(a) = ws.alphabets.get(target) {
                ConjTarget::Free(a.clone())
            } else if ws.graphs.contains_key(target) {
                ConjTarget::Graph(target.clone())
            } else if ws.towers.contains_key(target) {
                ConjTarget::Tower(target.clone())
            } else {
                return Err(format!("unknown conjugacy target `{target}`"));
            };
            let a = ws.target_alphabet(&target);
            TaskSpec::Conj { left: ws.eval(left, &a)?, right: ws.eval(right, &a)?, target, pm: *pm }
        }
    })
}

fn alphabet_decls(g: &GraphOfGroups, out: &mut Vec<Decl>) {
    for v in g.vertices() {
        if let VertexGroup::Free(a) = &v.group {
            if !out.iter().any(|d| matches!(d, Decl::Alphabet { name, .. } if name == a.name())) {
                out.push(Decl::Alphabet { name: a.name().to_string(), generators: a.generators().to_vec() });
            }
        }
    }
}

/// Document declaring the alphabets of `g` followed by `g` itself.
pub fn export_graph(g: &GraphOfGroups) -> Document {
    let mut decls = Vec::new();
    alphabet_decls(g, &mut decls);
    let attach = |el: &Element| match el {
        Element::Free(w) => Attach::Word(Expr::from_word(w)),
        Element::Abelian(v) => Attach::Vector(v.clone()),
    };
    let vname = |i: usize| g.vertices()[i].name.clone();
    decls.push(Decl::Graph(GraphDecl {
        name: g.name().to_string(),
        vertices: g
            .vertices()
            .iter()
            .map(|v| VertexDecl {
                name: v.name.clone(),
                group: match &v.group {
                    VertexGroup::Free(a) => GroupDecl::Free(a.name().to_string()),
                    VertexGroup::Abelian(a) => GroupDecl::Abelian { rank: a.rank(), names: Some(a.generators().to_vec()) },
                },
            })
            .collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeDecl {
                name: e.name.clone(),
                from: vname(e.from.vertex),
                to: vname(e.to.vertex),
                attach: (!e.trivial).then(|| (attach(&e.from.attach), attach(&e.to.attach))),
                tree: e.tree,
            })
            .collect(),
        base: Some(vname(g.base())),
    }));
    Document::new(decls)
}

impl Tower {
    /// Document declaring the base alphabet and this tower with explicit
    /// generator names.
    pub fn to_document(&self) -> Document {
        let base = self.base();
        let mut decls = vec![Decl::Alphabet { name: base.name().to_string(), generators: base.generators().to_vec() }];
        let levels = self
            .levels()
            .iter()
            .map(|l| match l {
                ExtensionLevel::Abelian { attach, rank, names } => LevelDecl::Abelian {
                    attach: attach.as_ref().map(Expr::from_word),
                    rank: *rank,
                    names: Some(names.clone()),
                },
                ExtensionLevel::Quadratic { genus, boundaries, images, names } => LevelDecl::Quadratic {
                    genus: *genus,
                    boundaries: boundaries.iter().map(Expr::from_word).collect(),
                    images: images.iter().map(Expr::from_word).collect(),
                    names: Some(names.clone()),
                },
            })
            .collect();
        decls.push(Decl::Tower(TowerDecl { name: self.name().to_string(), base: base.name().to_string(), levels }));
        Document::new(decls)
    }
}
