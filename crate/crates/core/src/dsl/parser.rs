use std::collections::{HashMap, HashSet};

use num_traits::ToPrimitive;

use super::lexer::{lex, Tok, Token};
use super::{
    Atom, Attach, Decl, Document, EdgeDecl, Expr, GraphDecl, GroupDecl, LevelDecl, ParseError, TaskDecl, TaskKind,
    Term, TowerDecl, VertexDecl, KEYWORDS,
};
use crate::words::Exponent;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Alphabet,
    Word,
    Hom,
    Graph,
    Tower,
    Task,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::Alphabet => "alphabet",
            Kind::Word => "word",
            Kind::Hom => "hom",
            Kind::Graph => "graph",
            Kind::Tower => "tower",
            Kind::Task => "task",
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    names: HashMap<Kind, HashSet<String>>,
}

pub fn parse(text: &str) -> Result<Document, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, names: HashMap::new() };
    let mut doc = Document::default();
    while p.peek() != &Tok::Eof {
        if p.eat_sym(";") {
            continue;
        }
        let line = p.toks[p.pos].line;
        let decl = p.decl()?;
        doc.decls.push(decl);
        doc.lines.push(line);
    }
    Ok(doc)
}

/// A single expression spanning the whole text, with its start position.
pub(super) fn parse_expr_text(text: &str) -> Result<(Expr, (usize, usize)), ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, names: HashMap::new() };
    let pos = (p.toks[0].line, p.toks[0].col);
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok((e, pos))
}

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(x) if *x == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{s}`")]))
        }
    }

    fn at_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if self.at_keyword(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), ParseError> {
        if self.eat_keyword(k) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{k}`")]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn fresh(&mut self, kind: Kind) -> Result<String, ParseError> {
        let label = format!("new {} name", kind.label());
        if matches!(self.peek(), Tok::Ident(s) if self.names.get(&kind).is_some_and(|set| set.contains(s))) {
            return Err(self.error(&[&label]));
        }
        let name = self.ident().map_err(|_| self.error(&[&label]))?;
        self.names.entry(kind).or_default().insert(name.clone());
        Ok(name)
    }

    fn reference(&mut self, kinds: &[Kind]) -> Result<String, ParseError> {
        let label: Vec<String> = kinds.iter().map(|k| format!("declared {}", k.label())).collect();
        let labels: Vec<&str> = label.iter().map(String::as_str).collect();
        match self.peek() {
            Tok::Ident(s) if kinds.iter().any(|k| self.names.get(k).is_some_and(|set| set.contains(s))) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(&labels)),
        }
    }

    fn uint(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Tok::Int(n) => match n.to_u64() {
                Some(v) => {
                    self.pos += 1;
                    Ok(v)
                }
                None => Err(self.error(&["integer below 2^64"])),
            },
            _ => Err(self.error(&["integer"])),
        }
    }

    fn size(&mut self) -> Result<usize, ParseError> {
        let n = self.uint()?;
        usize::try_from(n).map_err(|_| {
            self.pos -= 1;
            self.error(&["small integer"])
        })
    }

    fn signed(&mut self) -> Result<Exponent, ParseError> {
        let neg = self.eat_sym("-");
        match self.peek() {
            Tok::Int(n) => {
                let n = n.clone();
                self.pos += 1;
                Ok(Exponent::from_big(if neg { -n } else { n }))
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn name_list(&mut self, open: &str, close: &str) -> Result<Vec<String>, ParseError> {
        self.sym(open)?;
        let mut out = Vec::new();
        if self.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if self.eat_sym(close) {
                return Ok(out);
            }
            if !self.eat_sym(",") {
                return Err(self.error(&["`,`", &format!("`{close}`")]));
            }
        }
    }

    fn expr_list(&mut self, open: &str, close: &str) -> Result<Vec<Expr>, ParseError> {
        self.sym(open)?;
        let mut out = Vec::new();
        if self.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat_sym(close) {
                return Ok(out);
            }
            if !self.eat_sym(",") {
                return Err(self.error(&["`,`", &format!("`{close}`"), "word term"]));
            }
        }
    }

    fn at_term(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !is_keyword(s),
            Tok::Int(n) => n == &1.into(),
            Tok::Sym(s) => *s == "(" || *s == "[",
            Tok::Eof => false,
        }
    }

    pub(super) fn expr(&mut self) -> Result<Expr, ParseError> {
        if !self.at_term() {
            return Err(self.error(&["word term"]));
        }
        let mut terms = Vec::new();
        while self.at_term() {
            terms.push(self.term()?);
        }
        Ok(Expr(terms))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let atom = match self.bump() {
            Tok::Ident(s) => Atom::Name(s),
            Tok::Int(_) => Atom::One,
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.sym(")")?;
                Atom::Group(e)
            }
            Tok::Sym("[") => {
                let a = self.expr()?;
                self.sym(",")?;
                let b = self.expr()?;
                self.sym("]")?;
                Atom::Commutator(a, b)
            }
            _ => unreachable!("at_term checked"),
        };
        let exponent = if self.eat_sym("^") { Some(self.signed()?) } else { None };
        Ok(Term { atom, exponent })
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let Tok::Ident(k) = self.peek().clone() else {
            return Err(self.error(&["declaration"]));
        };
        self.pos += 1;
        match k.as_str() {
            "alphabet" => {
                let name = self.fresh(Kind::Alphabet)?;
                let generators = self.name_list("{", "}")?;
                Ok(Decl::Alphabet { name, generators })
            }
            "word" => {
                let name = self.fresh(Kind::Word)?;
                self.keyword("in")?;
                let alphabet = self.reference(&[Kind::Alphabet])?;
                self.sym("=")?;
                Ok(Decl::Word { name, alphabet, expr: self.expr()? })
            }
            "hom" => self.hom(),
            "graph" => self.graph().map(Decl::Graph),
            "tower" => self.tower().map(Decl::Tower),
            "task" => self.task().map(Decl::Task),
            _ => {
                self.pos -= 1;
                Err(self.error(&["declaration"]))
            }
        }
    }

    fn hom(&mut self) -> Result<Decl, ParseError> {
        let name = self.fresh(Kind::Hom)?;
        self.sym(":")?;
        let domain = self.reference(&[Kind::Alphabet])?;
        self.sym("->")?;
        let codomain = self.reference(&[Kind::Alphabet])?;
        self.sym("{")?;
        let mut images = Vec::new();
        while !self.eat_sym("}") {
            let g = self.ident()?;
            self.sym("=>")?;
            images.push((g, self.expr()?));
            if !self.eat_sym(",") {
                self.sym("}")?;
                break;
            }
        }
        Ok(Decl::Hom { name, domain, codomain, images })
    }

    fn graph(&mut self) -> Result<GraphDecl, ParseError> {
        let name = self.fresh(Kind::Graph)?;
        self.sym("{")?;
        let mut g = GraphDecl { name, vertices: Vec::new(), edges: Vec::new(), base: None };
        let mut edge_names = HashSet::new();
        loop {
            if self.eat_sym("}") {
                return Ok(g);
            }
            if self.eat_sym(";") {
                continue;
            }
            if self.eat_keyword("vertex") {
                if matches!(self.peek(), Tok::Ident(s) if g.vertices.iter().any(|v| &v.name == s)) {
                    return Err(self.error(&["new vertex name"]));
                }
                let name = self.ident()?;
                self.sym("=")?;
                let group = if self.eat_keyword("free") {
                    GroupDecl::Free(self.reference(&[Kind::Alphabet])?)
                } else if self.eat_keyword("abelian") {
                    let rank = self.size()?;
                    let names = if matches!(self.peek(), Tok::Sym("(")) { Some(self.name_list("(", ")")?) } else { None };
                    GroupDecl::Abelian { rank, names }
                } else {
                    return Err(self.error(&["`free`", "`abelian`"]));
                };
                g.vertices.push(VertexDecl { name, group });
            } else if self.eat_keyword("edge") {
                if matches!(self.peek(), Tok::Ident(s) if edge_names.contains(s)) {
                    return Err(self.error(&["new edge name"]));
                }
                let name = self.ident()?;
                edge_names.insert(name.clone());
                self.sym(":")?;
                let (from, a) = self.edge_end(&g, None)?;
                self.sym("--")?;
                let (to, b) = self.edge_end(&g, Some(a.is_some()))?;
                let tree = self.eat_keyword("tree");
                g.edges.push(EdgeDecl { name, from, to, attach: a.zip(b), tree });
            } else if self.eat_keyword("base") {
                if g.base.is_some() {
                    self.pos -= 1;
                    return Err(self.error(&["`vertex`", "`edge`", "`}`"]));
                }
                g.base = Some(self.vertex_ref(&g)?);
            } else {
                return Err(self.error(&["`vertex`", "`edge`", "`base`", "`}`"]));
            }
            if !matches!(self.peek(), Tok::Sym("}")) {
                self.sym(";")?;
            }
        }
    }

    fn vertex_ref(&mut self, g: &GraphDecl) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if g.vertices.iter().any(|v| &v.name == s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(&["declared vertex"])),
        }
    }

    /// `V` or `V.(attach)`; `with_attach` forces the second end to match
    /// the first.
    fn edge_end(&mut self, g: &GraphDecl, with_attach: Option<bool>) -> Result<(String, Option<Attach>), ParseError> {
        let v = self.vertex_ref(g)?;
        let want = match with_attach {
            Some(w) => w,
            None => matches!(self.peek(), Tok::Sym(".")),
        };
        if !want {
            return Ok((v, None));
        }
        self.sym(".")?;
        let abelian = matches!(g.vertices.iter().find(|x| x.name == v).map(|x| &x.group), Some(GroupDecl::Abelian { .. }));
        let attach = if abelian {
            self.sym("(")?;
            let mut vec = vec![self.signed()?];
            while self.eat_sym(",") {
                vec.push(self.signed()?);
            }
            self.sym(")")?;
            Attach::Vector(vec)
        } else {
            self.sym("(")?;
            let e = self.expr()?;
            self.sym(")")?;
            Attach::Word(e)
        };
        Ok((v, Some(attach)))
    }

    fn optional_names(&mut self) -> Result<Option<Vec<String>>, ParseError> {
        if self.eat_keyword("names") {
            Ok(Some(self.name_list("(", ")")?))
        } else {
            Ok(None)
        }
    }

    fn tower(&mut self) -> Result<TowerDecl, ParseError> {
        let name = self.fresh(Kind::Tower)?;
        self.sym("{")?;
        self.keyword("base")?;
        let base = self.reference(&[Kind::Alphabet])?;
        let mut levels = Vec::new();
        loop {
            if matches!(self.peek(), Tok::Sym("}")) {
                self.pos += 1;
                return Ok(TowerDecl { name, base, levels });
            }
            self.sym(";")?;
            if self.eat_sym("}") {
                return Ok(TowerDecl { name, base, levels });
            }
            self.keyword("level")?;
            let level = if self.eat_keyword("abelian") {
                let attach = if self.eat_keyword("attach") { Some(self.expr()?) } else { None };
                self.keyword("rank")?;
                let rank = self.size()?;
                LevelDecl::Abelian { attach, rank, names: self.optional_names()? }
            } else if self.eat_keyword("quadratic") {
                self.keyword("genus")?;
                let genus = self.size()?;
                self.keyword("boundary")?;
                let mut boundaries = vec![self.expr()?];
                while self.eat_sym(",") {
                    boundaries.push(self.expr()?);
                }
                self.keyword("images")?;
                let images = self.expr_list("(", ")")?;
                LevelDecl::Quadratic { genus, boundaries, images, names: self.optional_names()? }
            } else {
                return Err(self.error(&["`abelian`", "`quadratic`"]));
            };
            levels.push(level);
        }
    }

    fn task(&mut self) -> Result<TaskDecl, ParseError> {
        let explicit = if matches!(self.peek(), Tok::Ident(s) if !is_keyword(s)) {
            let name = self.fresh(Kind::Task)?;
            self.sym(":")?;
            Some(name)
        } else {
            None
        };
        // A clashing default name is reported at the task's target.
        let target_pos = self.pos + 1;
        let kind = if self.eat_keyword("separate") {
            let tower = self.reference(&[Kind::Tower])?;
            self.keyword("set")?;
            let set = self.expr_list("{", "}")?;
            self.keyword("max")?;
            let max = self.uint()?;
            let seed = if self.eat_keyword("seed") { Some(self.uint()?) } else { None };
            let indivisible = if self.eat_keyword("indivisible") { self.expr_list("{", "}")? } else { Vec::new() };
            TaskKind::Separate { tower, set, max, seed, indivisible }
        } else if self.eat_keyword("discriminate") {
            let tower = self.reference(&[Kind::Tower])?;
            self.keyword("set")?;
            let set = self.expr_list("{", "}")?;
            self.keyword("max")?;
            TaskKind::Discriminate { tower, set, max: self.uint()? }
        } else if self.eat_keyword("conj") {
            let target = self.reference(&[Kind::Alphabet, Kind::Graph, Kind::Tower])?;
            self.keyword("left")?;
            let left = self.expr()?;
            self.keyword("right")?;
            let right = self.expr()?;
            TaskKind::Conj { target, left, right, pm: self.eat_keyword("pm") }
        } else {
            return Err(self.error(&["`separate`", "`discriminate`", "`conj`"]));
        };
        let name = match explicit {
            Some(n) => n,
            None => {
                let n = kind.default_name();
                if !self.names.entry(Kind::Task).or_default().insert(n.clone()) {
                    self.pos = target_pos;
                    return Err(self.error(&["task name (the default name is already taken)"]));
                }
                n
            }
        };
        Ok(TaskDecl { name, kind })
    }
}
