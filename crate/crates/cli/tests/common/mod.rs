//! Brute-force oracles shared by the integration tests. Everything here
//! works on plain letter vectors and is written without the library's
//! run-length machinery, so agreement is meaningful.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use rand::Rng;
use serrelab_core::dsl::{Atom, Decl, Document, EdgeDecl, Expr, GraphDecl, GroupDecl, LevelDecl, TaskDecl, TaskKind, Term, TowerDecl, VertexDecl, Attach, KEYWORDS};
use serrelab_core::{Alphabet, Exponent, Letter, Word};

/// Letters as nonzero integers: generator `i` is `i + 1`, its inverse `-(i + 1)`.
pub type Flat = Vec<i32>;

pub fn reduce(letters: impl IntoIterator<Item = i32>) -> Flat {
    let mut out: Flat = Vec::new();
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inv(a: &[i32]) -> Flat {
    a.iter().rev().map(|l| -l).collect()
}

pub fn mul(a: &[i32], b: &[i32]) -> Flat {
    reduce(a.iter().chain(b).copied())
}

/// `x a x⁻¹`.
pub fn conj(x: &[i32], a: &[i32]) -> Flat {
    reduce(x.iter().chain(a).copied().chain(inv(x)))
}

pub fn flat(w: &Word) -> Flat {
    w.letters()
        .into_iter()
        .map(|l| {
            let g = l.generator() as i32 + 1;
            if l.is_inverse() {
                -g
            } else {
                g
            }
        })
        .collect()
}

pub fn word(alphabet: &Arc<Alphabet>, f: &[i32]) -> Word {
    let letters: Vec<Letter> = f.iter().map(|&l| Letter::new(l.unsigned_abs() as usize - 1, l < 0)).collect();
    Word::from_letters(alphabet, &letters)
}

/// All freely reduced words of length `<= max_len` over `rank` generators.
pub fn reduced_words(rank: usize, max_len: usize) -> Vec<Flat> {
    let letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() != Some(&-l) {
                    let mut v: Flat = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Random reduced word with length drawn from `lens`.
pub fn random_flat(rng: &mut impl Rng, rank: usize, lens: std::ops::RangeInclusive<usize>) -> Flat {
    let len = rng.random_range(lens);
    let mut out: Flat = Vec::with_capacity(len);
    while out.len() < len {
        let g = rng.random_range(1..=rank as i32);
        let l = if rng.random_bool(0.5) { g } else { -g };
        if out.last() != Some(&-l) {
            out.push(l);
        }
    }
    out
}

/// Conjugates of `a` reachable by conjugating one letter at a time without
/// exceeding `bound` letters, each with a conjugator `x` (`x a x⁻¹`).
/// Every conjugate of length `<= bound` is reached when `bound >= |a|`: a
/// shortest path peels `a` down to its cyclic core, rotates, then builds up.
pub fn conjugacy_orbit(a: &[i32], rank: usize, bound: usize) -> HashMap<Flat, Flat> {
    let letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
    let mut seen = HashMap::from([(a.to_vec(), Vec::new())]);
    let mut queue = VecDeque::from([a.to_vec()]);
    while let Some(b) = queue.pop_front() {
        let x = seen[&b].clone();
        for &l in &letters {
            let c = conj(&[l], &b);
            if c.len() <= bound && !seen.contains_key(&c) {
                seen.insert(c.clone(), mul(&[l], &x));
                queue.push_back(c);
            }
        }
    }
    seen
}

pub struct UnionFind(Vec<usize>);

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind((0..n).collect())
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra.max(rb)] = ra.min(rb);
    }
}

/// Elements of `⟨gens⟩` up to `cap` letters, found by multiplying by
/// generators and their inverses and discarding longer intermediates.
pub fn subgroup_ball(gens: &[Flat], cap: usize) -> HashSet<Flat> {
    let steps: Vec<Flat> = gens.iter().flat_map(|g| [g.clone(), inv(g)]).collect();
    let mut seen = HashSet::from([Vec::new()]);
    let mut queue = VecDeque::from([Vec::new()]);
    while let Some(h) = queue.pop_front() {
        for s in &steps {
            let n = mul(&h, s);
            if n.len() <= cap && seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Shortlex order on flat words (letters ordered `a < a⁻¹ < b < …`).
pub fn shortlex_key(f: &[i32]) -> (usize, Vec<i32>) {
    (f.len(), f.iter().map(|&l| 2 * l.abs() + i32::from(l < 0)).collect())
}

/// `F(x, y) *_t` with `t` commuting with a cyclically reduced word `w`,
/// over letters `x = 1, y = 2, t = 3`.
pub struct Hnn {
    w: Flat,
    /// `w^k` for `k` in `-MAX_POW..=MAX_POW`.
    pows: Vec<Flat>,
}

const MAX_POW: i64 = 16;

impl Hnn {
    pub fn new(w: &[i32]) -> Hnn {
        let pows = (-MAX_POW..=MAX_POW)
            .map(|k| {
                let base = if k < 0 { inv(w) } else { w.to_vec() };
                reduce((0..k.unsigned_abs()).flat_map(|_| base.iter().copied()))
            })
            .collect();
        Hnn { w: w.to_vec(), pows }
    }

    fn pow(&self, k: i64) -> &[i32] {
        &self.pows[(k + MAX_POW) as usize]
    }

    fn is_w_power(&self, g: &[i32]) -> bool {
        if !g.len().is_multiple_of(self.w.len()) {
            return false;
        }
        let k = (g.len() / self.w.len()) as i64;
        self.pow(k) == g || self.pow(-k) == g
    }

    /// Removes pinches `t^e g t^-e` with `g ∈ ⟨w⟩`, then replaces each
    /// vertex piece by its shortlex-least representative modulo `⟨w⟩`,
    /// pushing the power of `w` rightwards past the next `t`.
    pub fn canonical(&self, word: &[i32]) -> Flat {
        if word.iter().all(|l| l.abs() != 3) {
            return reduce(word.iter().copied());
        }
        let mut pieces: Vec<Flat> = vec![Vec::new()];
        let mut ts: Vec<i32> = Vec::new();
        for &l in word {
            if l.abs() == 3 {
                ts.push(l.signum());
                pieces.push(Vec::new());
            } else {
                let last = pieces.last_mut().unwrap();
                if last.last() == Some(&-l) {
                    last.pop();
                } else {
                    last.push(l);
                }
            }
        }
        loop {
            let pinch = (0..ts.len().saturating_sub(1)).find(|&i| ts[i] == -ts[i + 1] && self.is_w_power(&pieces[i + 1]));
            let Some(i) = pinch else { break };
            let merged = mul(&mul(&pieces[i], &pieces[i + 1]), &pieces[i + 2]);
            pieces.splice(i..i + 3, [merged]);
            ts.drain(i..i + 2);
        }
        for i in 0..ts.len() {
            // |g w^-k| >= |k||w| - |g|, so longer shifts never win.
            let span = (2 * pieces[i].len() / self.w.len()) as i64 + 1;
            assert!(span <= MAX_POW, "piece too long for the power table");
            let (rep, k) = (-span..=span)
                .map(|k| (mul(&pieces[i], self.pow(-k)), k))
                .min_by_key(|(r, _)| shortlex_key(r))
                .unwrap();
            pieces[i] = rep;
            pieces[i + 1] = mul(self.pow(k), &pieces[i + 1]);
        }
        let mut out = Vec::new();
        for (i, p) in pieces.iter().enumerate() {
            out.extend(p);
            if let Some(&e) = ts.get(i) {
                out.push(3 * e);
            }
        }
        out
    }
}

/// Random syntactically valid document: declarations refer only to
/// earlier names, generator names avoid the reserved words.
pub fn random_document(rng: &mut impl Rng) -> Document {
    let mut decls = Vec::new();
    let mut alphabets: Vec<(String, Vec<String>)> = Vec::new();
    let mut towers: Vec<String> = Vec::new();
    let mut graphs: Vec<String> = Vec::new();
    let n = rng.random_range(1..=8);
    let mut fresh = 0usize;
    let mut name = |prefix: &str| {
        fresh += 1;
        format!("{prefix}{fresh}")
    };
    for _ in 0..n {
        let kind = if alphabets.is_empty() { 0 } else { rng.random_range(0..6) };
        match kind {
            0 => {
                let k = rng.random_range(0..=3);
                let gens: Vec<String> = (0..k).map(|i| generator_name(rng, i)).collect();
                let a = name("A");
                alphabets.push((a.clone(), gens.clone()));
                decls.push(Decl::Alphabet { name: a, generators: gens });
            }
            1 => {
                let (a, gens) = alphabets[rng.random_range(0..alphabets.len())].clone();
                decls.push(Decl::Word { name: name("w"), alphabet: a, expr: random_expr(rng, &gens, 2) });
            }
            2 => {
                let (d, dg) = alphabets[rng.random_range(0..alphabets.len())].clone();
                let (c, cg) = alphabets[rng.random_range(0..alphabets.len())].clone();
                let images = dg.iter().map(|g| (g.clone(), random_expr(rng, &cg, 1))).collect();
                decls.push(Decl::Hom { name: name("h"), domain: d, codomain: c, images });
            }
            3 => {
                let (a, gens) = alphabets[rng.random_range(0..alphabets.len())].clone();
                let g = random_graph(rng, name("G"), &a, &gens);
                graphs.push(g.name.clone());
                decls.push(Decl::Graph(g));
            }
            4 => {
                let (a, gens) = alphabets[rng.random_range(0..alphabets.len())].clone();
                let levels = (0..rng.random_range(0..=2))
                    .map(|_| {
                        if rng.random_bool(0.7) {
                            LevelDecl::Abelian {
                                attach: rng.random_bool(0.8).then(|| random_expr(rng, &gens, 2)),
                                rank: rng.random_range(1..=2),
                                names: rng.random_bool(0.5).then(|| vec![name("c"), name("t")]),
                            }
                        } else {
                            LevelDecl::Quadratic {
                                genus: rng.random_range(0..=2),
                                boundaries: (0..rng.random_range(1..=2)).map(|_| random_expr(rng, &gens, 1)).collect(),
                                images: (0..rng.random_range(0..=3)).map(|_| random_expr(rng, &gens, 1)).collect(),
                                names: rng.random_bool(0.3).then(|| vec![name("q")]),
                            }
                        }
                    })
                    .collect();
                let t = name("T");
                towers.push(t.clone());
                decls.push(Decl::Tower(TowerDecl { name: t, base: a, levels }));
            }
            _ => {
                let (a, gens) = alphabets[rng.random_range(0..alphabets.len())].clone();
                let tname = rng.random_bool(0.5).then(|| name("task"));
                let choice = if towers.is_empty() { 2 } else { rng.random_range(0..3) };
                let kind = match choice {
                    0 => TaskKind::Separate {
                        tower: towers[rng.random_range(0..towers.len())].clone(),
                        set: (0..rng.random_range(0..=3)).map(|_| random_expr(rng, &gens, 1)).collect(),
                        max: rng.random_range(0..=40),
                        seed: rng.random_bool(0.5).then(|| rng.random()),
                        indivisible: (0..rng.random_range(0..=1)).map(|_| random_expr(rng, &gens, 1)).collect(),
                    },
                    1 => TaskKind::Discriminate {
                        tower: towers[rng.random_range(0..towers.len())].clone(),
                        set: (0..rng.random_range(0..=3)).map(|_| random_expr(rng, &gens, 1)).collect(),
                        max: rng.random_range(0..=40),
                    },
                    _ => {
                        let mut targets = vec![a];
                        targets.extend(graphs.iter().cloned());
                        TaskKind::Conj {
                            target: targets[rng.random_range(0..targets.len())].clone(),
                            left: random_expr(rng, &gens, 2),
                            right: random_expr(rng, &gens, 2),
                            pm: rng.random_bool(0.5),
                        }
                    }
                };
                // An unnamed task takes its default name, which must be free.
                let name = tname.unwrap_or_else(|| kind.default_name());
                let taken = decls.iter().any(|d| matches!(d, Decl::Task(t) if t.name == name));
                if !taken {
                    decls.push(Decl::Task(TaskDecl { name, kind }));
                }
            }
        }
    }
    Document::new(decls)
}

fn generator_name(rng: &mut impl Rng, i: usize) -> String {
    const POOL: &[&str] = &["x", "y", "z", "a", "b", "u_1", "level2", "Tx"];
    let base = POOL[rng.random_range(0..POOL.len())];
    debug_assert!(!KEYWORDS.contains(&base));
    format!("{base}{i}")
}

fn random_exponent(rng: &mut impl Rng) -> Option<Exponent> {
    match rng.random_range(0..6) {
        0..=2 => None,
        3 => Some(Exponent::from(rng.random_range(-5i64..=5))),
        4 => Some(Exponent::from(rng.random::<i64>())),
        _ => Some("-123456789012345678901234567890".parse().unwrap()),
    }
}

pub fn random_expr(rng: &mut impl Rng, gens: &[String], depth: usize) -> Expr {
    let len = rng.random_range(1..=4);
    let terms = (0..len)
        .map(|_| {
            let pick = if depth == 0 { 0 } else { rng.random_range(0..6) };
            let atom = match pick {
                4 => Atom::Group(random_expr(rng, gens, depth - 1)),
                5 => Atom::Commutator(random_expr(rng, gens, depth - 1), random_expr(rng, gens, depth - 1)),
                _ if gens.is_empty() || rng.random_range(0..10) == 0 => Atom::One,
                _ => Atom::Name(gens[rng.random_range(0..gens.len())].clone()),
            };
            Term { atom, exponent: random_exponent(rng) }
        })
        .collect();
    Expr(terms)
}

fn random_graph(rng: &mut impl Rng, name: String, alphabet: &str, gens: &[String]) -> GraphDecl {
    let nv = rng.random_range(1..=3);
    let vertices: Vec<VertexDecl> = (0..nv)
        .map(|i| VertexDecl {
            name: format!("V{i}"),
            group: if rng.random_bool(0.6) {
                GroupDecl::Free(alphabet.to_string())
            } else {
                let rank = rng.random_range(1..=2);
                GroupDecl::Abelian { rank, names: rng.random_bool(0.5).then(|| (0..rank).map(|j| format!("g{i}_{j}")).collect()) }
            },
        })
        .collect();
    let ne = rng.random_range(0..=3);
    let mut edges = Vec::new();
    for i in 0..ne {
        let from = rng.random_range(0..nv);
        let to = rng.random_range(0..nv);
        let attach = if rng.random_bool(0.8) {
            Some((edge_end(rng, &vertices[from], gens), edge_end(rng, &vertices[to], gens)))
        } else {
            None
        };
        edges.push(EdgeDecl {
            name: format!("e{i}"),
            from: vertices[from].name.clone(),
            to: vertices[to].name.clone(),
            attach,
            tree: rng.random_bool(0.5),
        });
    }
    let base = rng.random_bool(0.5).then(|| vertices[rng.random_range(0..nv)].name.clone());
    GraphDecl { name, vertices, edges, base }
}

fn edge_end(rng: &mut impl Rng, v: &VertexDecl, gens: &[String]) -> Attach {
    match &v.group {
        GroupDecl::Free(_) => Attach::Word(random_expr(rng, gens, 1)),
        GroupDecl::Abelian { rank, .. } => {
            Attach::Vector((0..*rank).map(|_| Exponent::from(rng.random_range(-3i64..=3))).collect())
        }
    }
}
