use std::fmt::Write;

use super::{Atom, Attach, Decl, Document, Expr, GroupDecl, LevelDecl, TaskKind};

pub fn render(doc: &Document) -> String {
    let mut out = String::new();
    for (i, d) in doc.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        render_decl(&mut out, d);
    }
    out
}

pub(super) fn expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_expr(out: &mut String, e: &Expr) {
    for (i, t) in e.0.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        match &t.atom {
            Atom::Name(n) => out.push_str(n),
            Atom::One => out.push('1'),
            Atom::Group(g) => {
                out.push('(');
                write_expr(out, g);
                out.push(')');
            }
            Atom::Commutator(a, b) => {
                out.push('[');
                write_expr(out, a);
                out.push_str(", ");
                write_expr(out, b);
                out.push(']');
            }
        }
        if let Some(k) = &t.exponent {
            let _ = write!(out, "^{k}");
        }
    }
}

fn exprs(list: &[Expr]) -> String {
    list.iter().map(expr).collect::<Vec<_>>().join(", ")
}

fn names(list: &[String]) -> String {
    list.join(", ")
}

fn render_decl(out: &mut String, d: &Decl) {
    match d {
        Decl::Alphabet { name, generators } if generators.is_empty() => {
            let _ = writeln!(out, "alphabet {name} {{ }}");
        }
        Decl::Alphabet { name, generators } => {
            let _ = writeln!(out, "alphabet {name} {{ {} }}", names(generators));
        }
        Decl::Word { name, alphabet, expr: e } => {
            let _ = writeln!(out, "word {name} in {alphabet} = {}", expr(e));
        }
        Decl::Hom { name, domain, codomain, images } => {
            let _ = writeln!(out, "hom {name} : {domain} -> {codomain} {{");
            for (g, e) in images {
                let _ = writeln!(out, "  {g} => {},", expr(e));
            }
            out.push_str("}\n");
        }
        Decl::Graph(g) => {
            let _ = writeln!(out, "graph {} {{", g.name);
            for v in &g.vertices {
                match &v.group {
                    GroupDecl::Free(a) => {
                        let _ = writeln!(out, "  vertex {} = free {a};", v.name);
                    }
                    GroupDecl::Abelian { rank, names: None } => {
                        let _ = writeln!(out, "  vertex {} = abelian {rank};", v.name);
                    }
                    GroupDecl::Abelian { rank, names: Some(n) } => {
                        let _ = writeln!(out, "  vertex {} = abelian {rank} ({});", v.name, names(n));
                    }
                }
            }
            for e in &g.edges {
                let _ = write!(out, "  edge {} : ", e.name);
                match &e.attach {
                    None => {
                        let _ = write!(out, "{} -- {}", e.from, e.to);
                    }
                    Some((a, b)) => {
                        let _ = write!(out, "{}.{} -- {}.{}", e.from, attach(a), e.to, attach(b));
                    }
                }
                out.push_str(if e.tree { " tree;\n" } else { ";\n" });
            }
            if let Some(b) = &g.base {
                let _ = writeln!(out, "  base {b};");
            }
            out.push_str("}\n");
        }
        Decl::Tower(t) => {
            let _ = writeln!(out, "tower {} {{", t.name);
            let _ = writeln!(out, "  base {};", t.base);
            for l in &t.levels {
                out.push_str("  level ");
                let n = match l {
                    LevelDecl::Abelian { attach, rank, names } => {
                        out.push_str("abelian");
                        if let Some(a) = attach {
                            let _ = write!(out, " attach {}", expr(a));
                        }
                        let _ = write!(out, " rank {rank}");
                        names
                    }
                    LevelDecl::Quadratic { genus, boundaries, images, names } => {
                        let _ = write!(out, "quadratic genus {genus} boundary {} images ({})", exprs(boundaries), exprs(images));
                        names
                    }
                };
                if let Some(n) = n {
                    let _ = write!(out, " names ({})", names(n));
                }
                out.push_str(";\n");
            }
            out.push_str("}\n");
        }
        Decl::Task(t) => {
            let _ = write!(out, "task {} : ", t.name);
            match &t.kind {
                TaskKind::Separate { tower, set, max, seed, indivisible } => {
                    let _ = write!(out, "separate {tower} set {{ {} }} max {max}", exprs(set));
                    if let Some(s) = seed {
                        let _ = write!(out, " seed {s}");
                    }
                    if !indivisible.is_empty() {
                        let _ = write!(out, " indivisible {{ {} }}", exprs(indivisible));
                    }
                }
                TaskKind::Discriminate { tower, set, max } => {
                    let _ = write!(out, "discriminate {tower} set {{ {} }} max {max}", exprs(set));
                }
                TaskKind::Conj { target, left, right, pm } => {
                    let _ = write!(out, "conj {target} left {} right {}", expr(left), expr(right));
                    if *pm {
                        out.push_str(" pm");
                    }
                }
            }
            out.push('\n');
        }
    }
}

fn attach(a: &Attach) -> String {
    match a {
        Attach::Word(e) => format!("({})", expr(e)),
        Attach::Vector(v) => format!("({})", v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")),
    }
}
