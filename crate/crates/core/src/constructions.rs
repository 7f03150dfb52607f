//! Named groups from the limit-group examples, built as graphs of groups
//! together with routines that verify their defining properties.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dsl::parse_word;
use crate::gog::{
    Edge, EdgeEnd, EdgeLetter, Element, GogError, GraphOfGroups, PathWord, StrictnessReport, Vertex,
    VertexGroup, VertexTwist,
};
use crate::homs::FreeHom;
use crate::words::{
    are_conjugate, in_commutator_subgroup, primitive_root, random_word, Alphabet, Exponent, Word, WordError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error(transparent)]
    Gog(#[from] GogError),
    #[error(transparent)]
    Word(#[from] WordError),
}

fn word(alphabet: &Arc<Alphabet>, text: &str) -> Word {
    parse_word(alphabet, text).expect("built-in word")
}

/// Fundamental-group loop of a presentation word.
#[cfg(test)]
fn lp(g: &GraphOfGroups, text: &str) -> PathWord {
    g.word_to_loop(&word(&g.presentation().alphabet, text)).expect("built-in loop")
}

fn hom_by_name(domain: &Arc<Alphabet>, codomain: &Arc<Alphabet>, images: &[(&str, &str)]) -> FreeHom {
    let map: HashMap<&str, &str> = images.iter().copied().collect();
    let images = domain
        .generators()
        .iter()
        .map(|g| word(codomain, map.get(g.as_str()).copied().unwrap_or_else(|| panic!("no image for {g}"))))
        .collect();
    FreeHom::new(domain, codomain, images).expect("built-in map")
}

/// The graph of groups of two four-holed spheres glued to two cyclic
/// vertices, with elements `u`, `v` that are a Magnus pair.
#[derive(Debug, Clone)]
pub struct MagnusPairFixture {
    pub graph: GraphOfGroups,
    pub u: PathWord,
    pub v: PathWord,
    /// A strict map from the presentation generators onto `F(x, y, z)`.
    pub rho: FreeHom,
    pub sigma_u: usize,
    pub sigma_v: usize,
    pub u_vertex: usize,
    pub v_vertex: usize,
}

impl MagnusPairFixture {
    pub fn qh_vertices(&self) -> Vec<usize> {
        vec![self.sigma_u, self.sigma_v]
    }

    /// Euler characteristic of a surface vertex as a sphere with holes.
    pub fn euler_characteristic(&self, vertex: usize) -> i64 {
        let holes = self.graph.letters_at(vertex).len() as i64;
        2 - holes
    }

    /// Boundary words of a surface vertex, in edge order.
    pub fn boundary_words(&self, vertex: usize) -> Vec<Word> {
        self.graph
            .letters_at(vertex)
            .into_iter()
            .filter_map(|l| self.graph.entry(l).as_word().cloned())
            .collect()
    }
}

pub fn magnus_pair_gog() -> MagnusPairFixture {
    let su = Alphabet::new("Sigma_u", ["a", "b", "c"]).unwrap();
    let sv = Alphabet::new("Sigma_v", ["p", "q", "r"]).unwrap();
    let ua = Alphabet::new("U", ["u"]).unwrap();
    let va = Alphabet::new("V", ["v"]).unwrap();
    let vertices = vec![
        Vertex { name: "Sigma_u".into(), group: VertexGroup::Free(su.clone()) },
        Vertex { name: "Sigma_v".into(), group: VertexGroup::Free(sv.clone()) },
        Vertex { name: "U".into(), group: VertexGroup::Free(ua.clone()) },
        Vertex { name: "V".into(), group: VertexGroup::Free(va.clone()) },
    ];
    let (s_u, s_v, u_vx, v_vx) = (0, 1, 2, 3);
    let edge = |name: &str, from: usize, fa: &Arc<Alphabet>, fw: &str, to: usize, ta: &Arc<Alphabet>, tw: &str, tree: bool| Edge {
        name: name.into(),
        from: EdgeEnd { vertex: from, attach: Element::Free(word(fa, fw)) },
        to: EdgeEnd { vertex: to, attach: Element::Free(word(ta, tw)) },
        tree,
        trivial: false,
    };
    // Inverted boundaries on c and r keep the images of u and v outside
    // the commutator subgroup, which the frozen map needs.
    let edges = vec![
        edge("e_a", s_u, &su, "a", v_vx, &va, "v", true),
        edge("t_b", s_u, &su, "b", v_vx, &va, "v", false),
        edge("t_c", s_u, &su, "c^-1", v_vx, &va, "v", false),
        edge("e_abc", s_u, &su, "a b c", u_vx, &ua, "u", true),
        edge("e_p", s_v, &sv, "p", u_vx, &ua, "u", true),
        edge("t_q", s_v, &sv, "q", u_vx, &ua, "u", false),
        edge("t_r", s_v, &sv, "r^-1", u_vx, &ua, "u", false),
        edge("t_pqr", s_v, &sv, "p q r", v_vx, &va, "v", false),
    ];
    let graph = GraphOfGroups::new("MagnusPair", vertices, edges, s_u).expect("fixture graph");
    let u = graph.vertex_loop(u_vx, Element::Free(Word::generator(&ua, 0))).unwrap();
    let v = graph.vertex_loop(v_vx, Element::Free(Word::generator(&va, 0))).unwrap();
    let f3 = Alphabet::new("F3", ["x", "y", "z"]).unwrap();
    let rho = hom_by_name(
        &graph.presentation().alphabet,
        &f3,
        &[
            ("a", "x"),
            ("b", "y x y^-1"),
            ("c", "y x^-1 y^-1"),
            ("p", "x"),
            ("q", "z x z^-1"),
            ("r", "z x^-1 z^-1"),
            ("u", "x"),
            ("v", "x"),
            ("t_b", "y"),
            ("t_c", "y"),
            ("t_q", "z"),
            ("t_r", "z"),
            ("t_pqr", "1"),
        ],
    );
    MagnusPairFixture { graph, u, v, rho, sigma_u: s_u, sigma_v: s_v, u_vertex: u_vx, v_vertex: v_vx }
}

/// `target = ∏ conjugatorᵢ · source^signᵢ · conjugatorᵢ⁻¹`, so `target`
/// lies in the normal closure of `source`.
#[derive(Debug, Clone)]
pub struct NclWitness {
    pub target: PathWord,
    pub source: PathWord,
    pub factors: Vec<(PathWord, i8)>,
}

impl NclWitness {
    pub fn product(&self, g: &GraphOfGroups) -> PathWord {
        let inv = g.inverse(&self.source);
        let mut acc = g.path_identity(g.base());
        for (c, sign) in &self.factors {
            let s = if *sign > 0 { &self.source } else { &inv };
            acc = g.concat(&acc, &g.conjugate_path(s, c));
        }
        g.normal_form(&acc)
    }

    pub fn verify(&self, g: &GraphOfGroups) -> bool {
        g.paths_equal(&self.product(g), &self.target)
    }

    pub fn render(&self, g: &GraphOfGroups) -> Vec<String> {
        self.factors
            .iter()
            .map(|(c, s)| {
                let w = g.loop_to_word(c).map(|w| w.to_string()).unwrap_or_else(|_| g.render_path(c));
                format!("({w}) * source^{s} * ({w})^-1")
            })
            .collect()
    }
}

/// Writes the generator of cyclic vertex `dst` as a product of conjugates
/// of the generator of `src`, through the surface vertex `surface`, whose
/// generators are each glued to `src` and whose boundary product is glued
/// to `dst`.
pub fn surface_ncl_witness(
    g: &GraphOfGroups,
    surface: usize,
    src: usize,
    dst: usize,
) -> Result<NclWitness, ConstructionError> {
    let gens = g.group(surface).rank();
    let mut top = None;
    let mut by_gen: Vec<Option<(EdgeLetter, i8)>> = vec![None; gens];
    for l in g.letters_at(surface) {
        let Some(w) = g.entry(l).as_word() else { continue };
        let t = g.target(l);
        if t == dst && w.len() == gens {
            top = Some(l);
        } else if t == src && w.syllables().len() == 1 && w.len() == 1 {
            let s = &w.syllables()[0];
            by_gen[s.generator] = Some((l, if s.exponent.is_positive() { 1 } else { -1 }));
        }
    }
    let missing = || ConstructionError::InvalidWord("surface vertex is not glued as expected".into());
    let top = top.ok_or_else(missing)?;
    let y = g.letter_loop(top);
    let yinv = g.inverse(&y);
    let mut factors = Vec::new();
    for entry in by_gen {
        let (l, sign) = entry.ok_or_else(missing)?;
        let x = g.letter_loop(l);
        factors.push((g.normal_form(&g.concat(&yinv, &x)), sign));
    }
    let gen = |v: usize| g.vertex_loop(v, g.group(v).generator(0));
    let w = NclWitness { target: gen(dst)?, source: gen(src)?, factors };
    Ok(w)
}

#[derive(Debug, Clone, Serialize)]
pub struct MagnusReport {
    pub not_conjugate: bool,
    pub u_from_v: Vec<String>,
    pub u_from_v_verified: bool,
    pub v_from_u: Vec<String>,
    pub v_from_u_verified: bool,
    pub strictness: StrictnessReport,
    pub rho_u: String,
    pub rho_v: String,
    /// `z` with `z · rho(v)^± · z⁻¹ = rho(u)` in the free group.
    pub image_conjugator: Option<String>,
    pub verified: bool,
}

pub fn verify_magnus_pair(f: &MagnusPairFixture) -> Result<MagnusReport, ConstructionError> {
    let g = &f.graph;
    let forward = g.are_conjugate(&f.u, &f.v, true)?;
    let backward = g.are_conjugate(&f.v, &f.u, true)?;
    let not_conjugate = !forward.conjugate && !backward.conjugate;

    let u_from_v = surface_ncl_witness(g, f.sigma_u, f.v_vertex, f.u_vertex)?;
    let v_from_u = surface_ncl_witness(g, f.sigma_v, f.u_vertex, f.v_vertex)?;
    let (uv_ok, vu_ok) = (u_from_v.verify(g), v_from_u.verify(g));

    let strictness = g.check_strict(&f.rho, &f.qh_vertices())?;
    let ru = f.rho.apply(&g.loop_to_word(&f.u)?)?;
    let rv = f.rho.apply(&g.loop_to_word(&f.v)?)?;
    let cert = are_conjugate(&ru, &rv, true)?.filter(|c| c.verify(&ru, &rv));
    let verified = not_conjugate && uv_ok && vu_ok && strictness.strict && cert.is_some();
    Ok(MagnusReport {
        not_conjugate,
        u_from_v: u_from_v.render(g),
        u_from_v_verified: uv_ok,
        v_from_u: v_from_u.render(g),
        v_from_u_verified: vu_ok,
        strictness,
        rho_u: ru.to_string(),
        rho_v: rv.to_string(),
        image_conjugator: cert.map(|c| format!("{} (sign {})", c.conjugator, c.sign)),
        verified,
    })
}

/// Random search for a strict map of the Magnus-pair group onto
/// `F(x, y, z)`. The gluing pins most generators down: `v = a`, `u = abc`
/// and `p = u`, while `b`, `c`, `q`, `r` are conjugates chosen through their
/// stable letters. A candidate is kept when `pqr` is conjugate to `v`, the
/// map is onto, and the strictness report passes.
pub fn find_strict_map(f: &MagnusPairFixture, max_image_length: usize, seed: u64) -> Option<FreeHom> {
    const ATTEMPTS: usize = 20_000;
    if max_image_length == 0 {
        return None;
    }
    let g = &f.graph;
    let p = &g.presentation().alphabet;
    let f3 = f.rho.codomain().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let n = rng.random_range(1..=max_image_length);
        random_word(&f3, n, rng)
    };
    let qh = f.qh_vertices();
    for _ in 0..ATTEMPTS {
        let a = draw(&mut rng);
        let [tb, tc, tq, tr] = [(); 4].map(|_| draw(&mut rng));
        let b = a.conjugate_by(&tb).ok()?;
        let c = a.conjugate_by(&tc).ok()?.inverse();
        let u = &(&a * &b) * &c;
        let q = u.conjugate_by(&tq).ok()?;
        let r = u.conjugate_by(&tr).ok()?.inverse();
        let pqr = &(&u * &q) * &r;
        // t_pqr · v · t_pqr⁻¹ = pqr.
        let Some(cert) = are_conjugate(&pqr, &a, false).ok().flatten() else { continue };
        let mut images: HashMap<&str, Word> = HashMap::new();
        for (name, w) in [
            ("a", a.clone()),
            ("b", b),
            ("c", c),
            ("p", u.clone()),
            ("q", q),
            ("r", r),
            ("u", u),
            ("v", a),
            ("t_b", tb),
            ("t_c", tc),
            ("t_q", tq),
            ("t_r", tr),
            ("t_pqr", cert.conjugator),
        ] {
            images.insert(name, w);
        }
        let list = p.generators().iter().map(|n| images[n.as_str()].clone()).collect();
        let Ok(hom) = FreeHom::new(p, &f3, list) else { continue };
        if !hom.analyze().surjective {
            continue;
        }
        match g.check_strict(&hom, &qh) {
            Ok(rep) if rep.strict => return Some(hom),
            _ => {}
        }
    }
    None
}

/// The double `⟨F(x,y), F(r,s) | w(x,y) = w(r,s)⟩`.
#[derive(Debug, Clone)]
pub struct CDoubleFixture {
    pub w: Word,
    pub graph: GraphOfGroups,
    /// `r ↦ x`, `s ↦ y`, identity on the first factor.
    pub retraction: FreeHom,
    /// The C-test property of `w` is assumed by every conclusion drawn
    /// from this fixture; it is never checked.
    pub c_test_assumed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorPair {
    pub left: Word,
    pub right: Word,
}

pub fn c_double(w: &Word) -> Result<CDoubleFixture, ConstructionError> {
    let base = w.alphabet().clone();
    if base.rank() != 2 {
        return Err(ConstructionError::InvalidWord(format!("{w} is not over a rank-2 alphabet")));
    }
    if w.is_identity() {
        return Err(ConstructionError::InvalidWord("trivial word".into()));
    }
    let (_, k) = primitive_root(w);
    if k != Exponent::ONE {
        return Err(ConstructionError::InvalidWord(format!("{w} is a proper power (exponent {k})")));
    }
    let mirror = Alphabet::new("G", ["r", "s"])?;
    let wm = Word::from_syllables(&mirror, w.syllables().iter().map(|s| (s.generator, s.exponent.clone())));
    let graph = GraphOfGroups::new(
        format!("D_{}", base.name()),
        vec![
            Vertex { name: base.name().to_string(), group: VertexGroup::Free(base.clone()) },
            Vertex { name: "G".into(), group: VertexGroup::Free(mirror) },
        ],
        vec![Edge {
            name: "e".into(),
            from: EdgeEnd { vertex: 0, attach: Element::Free(w.clone()) },
            to: EdgeEnd { vertex: 1, attach: Element::Free(wm) },
            tree: true,
            trivial: false,
        }],
        0,
    )?;
    let x = Word::generator(&base, 0);
    let y = Word::generator(&base, 1);
    let retraction =
        FreeHom::new(&graph.presentation().alphabet, &base, vec![x.clone(), y.clone(), x, y])?;
    graph.respects_relations(&retraction)?;
    Ok(CDoubleFixture { w: w.clone(), graph, retraction, c_test_assumed: true })
}

impl CDoubleFixture {
    pub fn base(&self) -> &Arc<Alphabet> {
        self.w.alphabet()
    }

    /// Whether `u` is conjugate, up to inversion, to `w^n` for some
    /// `|n| ≤ bound`.
    pub fn is_conjugate_to_w_power(&self, u: &Word, bound: i64) -> bool {
        (0..=bound).any(|n| matches!(are_conjugate(u, &self.w.powi(n), true), Ok(Some(_))))
    }

    pub fn mirror_pair(&self, left: &Word, bound: i64) -> Result<MirrorPair, ConstructionError> {
        if self.is_conjugate_to_w_power(left, bound) {
            return Err(ConstructionError::InvalidWord(format!("{left} is conjugate to a power of w")));
        }
        let p = &self.graph.presentation().alphabet;
        let l = left.rename_into(p)?;
        let right = Word::from_syllables(p, left.syllables().iter().map(|s| (s.generator + 2, s.exponent.clone())));
        Ok(MirrorPair { left: l, right })
    }

    /// Random mirror pairs with the left element in the commutator
    /// subgroup and not conjugate to a power of `w` up to `|n| ≤ 4`.
    pub fn random_mirror_pairs(&self, count: usize, max_len: usize, seed: u64) -> Vec<MirrorPair> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < count {
            let n = rng.random_range(4..=max_len.max(4));
            let u = random_word(self.base(), n, &mut rng);
            if u.is_identity() || !in_commutator_subgroup(&u) {
                continue;
            }
            if let Ok(pair) = self.mirror_pair(&u, 4) {
                out.push(pair);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HomKind {
    /// Standard retraction followed by an endomorphism.
    Retraction,
    /// `r ↦ wⁿ x w⁻ⁿ`, `s ↦ wⁿ y w⁻ⁿ`, followed by an endomorphism.
    WConjugate,
    /// Each factor sent into a cyclic subgroup.
    Abelianizing,
}

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub kind: HomKind,
    pub hom: FreeHom,
}

fn random_endo<R: Rng>(base: &Arc<Alphabet>, rng: &mut R) -> FreeHom {
    loop {
        let images: Vec<Word> =
            (0..2).map(|_| { let n = rng.random_range(1..=4); random_word(base, n, rng) }).collect();
        let h = FreeHom::new(base, base, images).expect("same alphabet");
        if h.analyze().injective {
            return h;
        }
    }
}

/// Maps from the double to `F(x, y)` of the kinds that occur in the
/// classification of all such maps; every member is checked against the
/// defining relation.
pub fn cdouble_hom_family(f: &CDoubleFixture, count: usize, seed: u64) -> Vec<FamilyMember> {
    let base = f.base().clone();
    let p = f.graph.presentation().alphabet.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Word::generator(&base, 0);
    let y = Word::generator(&base, 1);
    let abelian_ok = in_commutator_subgroup(&f.w);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let kind = match rng.random_range(0..3) {
            0 => HomKind::Retraction,
            1 => HomKind::WConjugate,
            _ if abelian_ok => HomKind::Abelianizing,
            _ => continue,
        };
        // An endomorphism applied to a word with huge exponents may not be
        // expandable; the bare map is kept in that case.
        let hom = match kind {
            HomKind::Retraction => {
                FreeHom::compose(&random_endo(&base, &mut rng), &f.retraction).unwrap_or_else(|_| f.retraction.clone())
            }
            HomKind::WConjugate => {
                let n = rng.random_range(-3..=3);
                let wn = f.w.powi(n);
                let images = vec![x.clone(), y.clone(), x.conjugate_by(&wn).unwrap(), y.conjugate_by(&wn).unwrap()];
                let inner = FreeHom::new(&p, &base, images).expect("same alphabet");
                FreeHom::compose(&random_endo(&base, &mut rng), &inner).unwrap_or(inner)
            }
            HomKind::Abelianizing => {
                let c = random_word(&base, rng.random_range(1..=3), &mut rng);
                let d = random_word(&base, rng.random_range(1..=3), &mut rng);
                let mut e = || rng.random_range(-3..=3i64);
                let images = vec![c.powi(e()), c.powi(e()), d.powi(e()), d.powi(e())];
                FreeHom::new(&p, &base, images).expect("same alphabet")
            }
        };
        if f.graph.respects_relations(&hom).is_ok() {
            out.push(FamilyMember { kind, hom });
        }
    }
    out
}

/// The double inside the centralizer extension `⟨F, t | t w = w t⟩` via
/// `r ↦ t⁻¹ x t`, `s ↦ t⁻¹ y t`.
#[derive(Debug, Clone)]
pub struct CentralizerEmbedding {
    pub hnn: GraphOfGroups,
    pub emb: FreeHom,
    pub t: PathWord,
}

pub fn centralizer_embedding(f: &CDoubleFixture) -> Result<CentralizerEmbedding, ConstructionError> {
    let base = f.base().clone();
    let w = Element::Free(f.w.clone());
    let hnn = GraphOfGroups::new(
        format!("H_{}", base.name()),
        vec![Vertex { name: base.name().to_string(), group: VertexGroup::Free(base.clone()) }],
        vec![Edge {
            name: "t".into(),
            from: EdgeEnd { vertex: 0, attach: w.clone() },
            to: EdgeEnd { vertex: 0, attach: w },
            tree: false,
            trivial: false,
        }],
        0,
    )?;
    let hp = hnn.presentation().alphabet.clone();
    let x = Word::generator(&hp, 0);
    let y = Word::generator(&hp, 1);
    let t = Word::generator(&hp, 2);
    let images = vec![
        x.clone(),
        y.clone(),
        x.conjugate_by(&t.inverse())?,
        y.conjugate_by(&t.inverse())?,
    ];
    let emb = FreeHom::new(&f.graph.presentation().alphabet, &hp, images)?;
    for r in &f.graph.presentation().relators {
        if !hnn.word_is_trivial(&emb.apply(r)?)? {
            return Err(GogError::RelationViolated(r.to_string()).into());
        }
    }
    let t = hnn.word_to_loop(&t)?;
    Ok(CentralizerEmbedding { hnn, emb, t })
}

impl CentralizerEmbedding {
    pub fn image(&self, w: &Word) -> Result<PathWord, ConstructionError> {
        Ok(self.hnn.word_to_loop(&self.emb.apply(w)?)?)
    }

    /// Whether the normal form alternates plain syllables with
    /// `t⁻¹ (…) t` syllables.
    pub fn is_syllabic(&self, p: &PathWord) -> bool {
        let nf = self.hnn.normal_form(p);
        nf.edges().iter().enumerate().all(|(i, l)| l.forward == (i % 2 == 1)) && nf.edges().len().is_multiple_of(2)
    }

    /// Checks `t · emb(right) · t⁻¹ = emb(left)`.
    pub fn mirror_conjugate_by_t(&self, pair: &MirrorPair) -> Result<bool, ConstructionError> {
        let l = self.image(&pair.left)?;
        let r = self.image(&pair.right)?;
        Ok(self.hnn.paths_equal(&self.hnn.conjugate_path(&r, &self.t), &l))
    }
}

/// The Magnus-pair group extended by `F(x, y, z)` along `u = ρ(u)` and
/// `s v s⁻¹ = ρ(v)`, with the retraction `ρ*` that kills `s`.
#[derive(Debug, Clone)]
pub struct Fig3Tower {
    pub graph: GraphOfGroups,
    pub rho_star: FreeHom,
    pub f3_vertex: usize,
    pub s_edge: usize,
    pub magnus: MagnusPairFixture,
}

pub fn fig3_tower(m: &MagnusPairFixture) -> Result<Fig3Tower, ConstructionError> {
    let g = &m.graph;
    let f3 = m.rho.codomain().clone();
    let rho_u = m.rho.apply(&g.loop_to_word(&m.u)?)?;
    let rho_v = m.rho.apply(&g.loop_to_word(&m.v)?)?;
    let mut vertices = g.vertices().to_vec();
    let f3_vertex = vertices.len();
    vertices.push(Vertex { name: "F3".into(), group: VertexGroup::Free(f3.clone()) });
    let mut edges = g.edges().to_vec();
    let gen = |v: usize| g.group(v).generator(0);
    edges.push(Edge {
        name: "e_u".into(),
        from: EdgeEnd { vertex: f3_vertex, attach: Element::Free(rho_u) },
        to: EdgeEnd { vertex: m.u_vertex, attach: gen(m.u_vertex) },
        tree: true,
        trivial: false,
    });
    let s_edge = edges.len();
    edges.push(Edge {
        name: "s".into(),
        from: EdgeEnd { vertex: f3_vertex, attach: Element::Free(rho_v) },
        to: EdgeEnd { vertex: m.v_vertex, attach: gen(m.v_vertex) },
        tree: false,
        trivial: false,
    });
    let graph = GraphOfGroups::new("L", vertices, edges, g.base())?;
    let lp = graph.presentation().alphabet.clone();
    let images = lp
        .generators()
        .iter()
        .map(|n| match (g.presentation().alphabet.index_of(n), f3.index_of(n)) {
            (Some(i), _) => m.rho.image(i).clone(),
            (None, Some(i)) => Word::generator(&f3, i),
            (None, None) => Word::identity(&f3),
        })
        .collect();
    let rho_star = FreeHom::new(&lp, &f3, images)?;
    graph.respects_relations(&rho_star)?;
    Ok(Fig3Tower { graph, rho_star, f3_vertex, s_edge, magnus: m.clone() })
}

impl Fig3Tower {
    /// Moves a loop of the Magnus-pair group into this graph.
    pub fn include(&self, p: &PathWord) -> Result<PathWord, ConstructionError> {
        let w = self.magnus.graph.loop_to_word(p)?;
        Ok(self.graph.word_to_loop(&w.rename_into(&self.graph.presentation().alphabet)?)?)
    }

    /// Dehn twist of a surface vertex along the curve `∏ gens`; the listed
    /// generators are conjugated by the `n`-th power of that curve.
    pub fn surface_twist(&self, vertex: usize, gens: &[usize], n: i64) -> Result<FreeHom, ConstructionError> {
        let g = &self.graph;
        let VertexGroup::Free(a) = g.group(vertex) else {
            return Err(ConstructionError::InvalidWord("twist on a non-free vertex".into()));
        };
        let gamma = gens.iter().fold(Word::identity(a), |acc, &i| &acc * &Word::generator(a, i));
        let gn = gamma.powi(n);
        let phi = |w: &Word| -> Word {
            let mut acc = Word::identity(a);
            for s in w.syllables() {
                let x = Word::generator(a, s.generator);
                let x = if gens.contains(&s.generator) { x.conjugate_by(&gn).unwrap() } else { x };
                acc = &acc * &x.pow(&s.exponent).unwrap();
            }
            acc
        };
        let images = (0..a.rank()).map(|i| Element::Free(phi(&Word::generator(a, i)))).collect();
        let mut end_conjugators = HashMap::new();
        for l in g.letters_at(vertex) {
            let att = g.entry(l).as_word().expect("free vertex");
            let img = phi(att);
            let z = if img == *att {
                Word::identity(a)
            } else if img == att.conjugate_by(&gn)? {
                gn.clone()
            } else {
                return Err(ConstructionError::InvalidWord(format!("twist does not fix boundary {att}")));
            };
            end_conjugators.insert((l.edge, l.forward), Element::Free(z));
        }
        Ok(g.extend_vertex_twist(&VertexTwist { vertex, images, end_conjugators })?)
    }

    /// `ρ* ∘ T_n`, where `T_n` composes the twists along `ab`, `bc`, `pq`,
    /// `qr` and the stable-letter twists, each with parameter `n`.
    pub fn twisted_retraction(&self, n: i64) -> Result<FreeHom, ConstructionError> {
        let m = &self.magnus;
        let mut maps = vec![
            self.surface_twist(m.sigma_u, &[0, 1], n)?,
            self.surface_twist(m.sigma_u, &[1, 2], n)?,
            self.surface_twist(m.sigma_v, &[0, 1], n)?,
            self.surface_twist(m.sigma_v, &[1, 2], n)?,
        ];
        for (i, e) in self.graph.edges().iter().enumerate() {
            if !e.tree {
                maps.push(self.graph.stable_twist(i, n)?);
            }
        }
        let mut r = self.rho_star.clone();
        for t in &maps {
            r = FreeHom::compose(&r, t)?;
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CDoubleReport {
    pub w: String,
    pub c_test_assumed: bool,
    pub homomorphisms: usize,
    pub retraction_kind: usize,
    pub w_conjugate_kind: usize,
    pub abelianizing_kind: usize,
    pub mirror_pairs: Vec<(String, String)>,
    pub image_pairs_checked: usize,
    /// `(hom, pair)` indices whose images were not conjugate.
    pub nonconjugate_images: Vec<(usize, usize)>,
    pub syllabic: bool,
    pub conjugate_by_t: bool,
    pub verified: bool,
}

/// Pushes random mirror pairs through a family of maps to `F(x, y)` and
/// through the centralizer embedding.
pub fn verify_c_double(
    f: &CDoubleFixture,
    hom_count: usize,
    pair_count: usize,
    seed: u64,
) -> Result<CDoubleReport, ConstructionError> {
    let family = cdouble_hom_family(f, hom_count, seed);
    let pairs = f.random_mirror_pairs(pair_count, 10, seed.wrapping_add(1));
    let mut nonconjugate = Vec::new();
    for (i, m) in family.iter().enumerate() {
        for (j, pair) in pairs.iter().enumerate() {
            let (a, b) = (m.hom.apply(&pair.left)?, m.hom.apply(&pair.right)?);
            if are_conjugate(&a, &b, false)?.is_none() {
                nonconjugate.push((i, j));
            }
        }
    }
    let emb = centralizer_embedding(f)?;
    let mut syllabic = true;
    let mut by_t = true;
    for pair in &pairs {
        for w in [&pair.left, &pair.right, &(&pair.left * &pair.right), &(&pair.right * &pair.left)] {
            syllabic &= emb.is_syllabic(&emb.image(w)?);
        }
        by_t &= emb.mirror_conjugate_by_t(pair)?;
    }
    let count = |k: HomKind| family.iter().filter(|m| m.kind == k).count();
    Ok(CDoubleReport {
        w: f.w.to_string(),
        c_test_assumed: f.c_test_assumed,
        homomorphisms: family.len(),
        retraction_kind: count(HomKind::Retraction),
        w_conjugate_kind: count(HomKind::WConjugate),
        abelianizing_kind: count(HomKind::Abelianizing),
        mirror_pairs: pairs.iter().map(|p| (p.left.to_string(), p.right.to_string())).collect(),
        image_pairs_checked: family.len() * pairs.len(),
        verified: nonconjugate.is_empty() && syllabic && by_t,
        nonconjugate_images: nonconjugate,
        syllabic,
        conjugate_by_t: by_t,
    })
}
