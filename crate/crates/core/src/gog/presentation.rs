use std::collections::HashMap;
use std::sync::Arc;

use super::{EdgeLetter, Element, GogError, GraphOfGroups, PathWord, VertexGroup};
use crate::homs::{generates_nonabelian, FreeHom};
use crate::stallings::fold;
use crate::words::{commutator, Alphabet, Exponent, Word};

/// Where a presentation generator comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenSource {
    Vertex { vertex: usize, index: usize },
    Stable { edge: usize },
}

/// Spanning-tree presentation of the fundamental group: vertex generators
/// plus one stable letter per non-tree edge.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub alphabet: Arc<Alphabet>,
    pub sources: Vec<GenSource>,
    pub relators: Vec<Word>,
    /// Edge or vertex each relator comes from, for error messages.
    pub relator_origins: Vec<String>,
    offsets: Vec<usize>,
    stable: HashMap<usize, usize>,
}

impl Presentation {
    pub fn vertex_generator(&self, vertex: usize, index: usize) -> usize {
        self.offsets[vertex] + index
    }

    pub fn stable_generator(&self, edge: usize) -> Option<usize> {
        self.stable.get(&edge).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct StrictnessReport {
    pub edge_groups_injective: bool,
    pub abelian_envelopes_injective: bool,
    pub nonqh_envelopes_injective: bool,
    pub qh_images_nonabelian: bool,
    pub strict: bool,
    pub failures: Vec<String>,
}

/// An automorphism of one vertex group together with, for each edge end at
/// that vertex, an element `g` with `φ(attach) = g · attach · g⁻¹`.
/// Missing end conjugators default to the identity.
#[derive(Debug, Clone)]
pub struct VertexTwist {
    pub vertex: usize,
    pub images: Vec<Element>,
    /// Keyed by `(edge, end is the from end)`.
    pub end_conjugators: HashMap<(usize, bool), Element>,
}

impl GraphOfGroups {
    pub fn presentation(&self) -> &Presentation {
        self.presentation.get_or_init(|| self.build_presentation())
    }

    fn build_presentation(&self) -> Presentation {
        let mut names: Vec<String> = Vec::new();
        let mut sources = Vec::new();
        let mut offsets = Vec::new();
        for (v, vert) in self.vertices().iter().enumerate() {
            offsets.push(names.len());
            for (i, g) in vert.group.names().generators().iter().enumerate() {
                names.push(g.clone());
                sources.push(GenSource::Vertex { vertex: v, index: i });
            }
        }
        let mut stable = HashMap::new();
        for (i, e) in self.edges().iter().enumerate().filter(|(_, e)| !e.tree) {
            stable.insert(i, names.len());
            names.push(e.name.clone());
            sources.push(GenSource::Stable { edge: i });
        }
        let alphabet = Alphabet::new(self.name(), names).expect("validated generator names");
        let mut p = Presentation {
            alphabet,
            sources,
            relators: Vec::new(),
            relator_origins: Vec::new(),
            offsets,
            stable,
        };
        for (v, vert) in self.vertices().iter().enumerate() {
            if let VertexGroup::Abelian(a) = &vert.group {
                for i in 0..a.rank() {
                    for j in i + 1..a.rank() {
                        let gi = Word::generator(&p.alphabet, p.vertex_generator(v, i));
                        let gj = Word::generator(&p.alphabet, p.vertex_generator(v, j));
                        p.relators.push(commutator(&gi, &gj).expect("same alphabet"));
                        p.relator_origins.push(format!("vertex `{}`", vert.name));
                    }
                }
            }
        }
        for (i, e) in self.edges().iter().enumerate() {
            if e.trivial {
                continue;
            }
            let alpha = self.element_word_in(&p, e.from.vertex, &e.from.attach);
            let omega = self.element_word_in(&p, e.to.vertex, &e.to.attach);
            let rel = match p.stable_generator(i) {
                None => &alpha * &omega.inverse(),
                Some(t) => {
                    let t = Word::generator(&p.alphabet, t);
                    &(&(&t * &omega) * &t.inverse()) * &alpha.inverse()
                }
            };
            p.relators.push(rel);
            p.relator_origins.push(format!("edge `{}`", e.name));
        }
        p
    }

    fn element_word_in(&self, p: &Presentation, v: usize, g: &Element) -> Word {
        match g {
            Element::Free(w) => Word::from_syllables(
                &p.alphabet,
                w.syllables().iter().map(|s| (p.vertex_generator(v, s.generator), s.exponent.clone())),
            ),
            Element::Abelian(x) => Word::from_syllables(
                &p.alphabet,
                x.iter().enumerate().map(|(i, e)| (p.vertex_generator(v, i), e.clone())),
            ),
        }
    }

    /// A vertex-group element as a word in the presentation generators.
    pub fn element_word(&self, v: usize, g: &Element) -> Word {
        self.element_word_in(self.presentation(), v, g)
    }

    /// The vertex element spelled by a presentation word that uses the
    /// generators of a single free vertex only.
    pub fn vertex_element(&self, w: &Word) -> Option<(usize, Element)> {
        let p = self.presentation();
        if w.alphabet().as_ref() != p.alphabet.as_ref() {
            return None;
        }
        let mut vertex = None;
        for s in w.syllables() {
            match p.sources[s.generator] {
                GenSource::Vertex { vertex: v, .. } if vertex.is_none() || vertex == Some(v) => vertex = Some(v),
                _ => return None,
            }
        }
        let v = vertex?;
        let VertexGroup::Free(a) = self.group(v) else { return None };
        let local = Word::from_syllables(
            a,
            w.syllables().iter().map(|s| (s.generator - p.offsets[v], s.exponent.clone())),
        );
        Some((v, Element::Free(local)))
    }

    /// The loop at the base vertex represented by a presentation word.
    pub fn word_to_loop(&self, w: &Word) -> Result<PathWord, GogError> {
        let p = self.presentation();
        if w.alphabet().as_ref() != p.alphabet.as_ref() {
            return Err(GogError::Word(crate::words::WordError::AlphabetMismatch {
                left: p.alphabet.name().to_string(),
                right: w.alphabet().name().to_string(),
            }));
        }
        let mut acc = self.path_identity(self.base());
        for s in w.syllables() {
            let segment = match p.sources[s.generator] {
                GenSource::Vertex { vertex, index } => {
                    let g = self.group(vertex);
                    let t = self.tree_path(vertex);
                    let core = self.path_element(vertex, g.pow(&g.generator(index), &s.exponent))?;
                    self.concat(&self.concat(&t, &core), &self.inverse(&t))
                }
                GenSource::Stable { edge } => {
                    let l = EdgeLetter { edge, forward: true };
                    self.power_path(&self.letter_loop(l), &s.exponent)?
                }
            };
            acc = self.concat(&acc, &segment);
        }
        Ok(self.normal_form(&acc))
    }

    /// The presentation word of a loop at the base vertex: tree edges
    /// vanish and non-tree edges become their stable letters.
    pub fn loop_to_word(&self, path: &PathWord) -> Result<Word, GogError> {
        if !self.is_loop_at_base(path) {
            return Err(GogError::MalformedPath("not a loop at the base vertex".into()));
        }
        self.check_path(path)?;
        let p = self.presentation();
        let mut acc = Word::identity(&p.alphabet);
        let mut v = path.start;
        for (i, g) in path.elements.iter().enumerate() {
            acc = &acc * &self.element_word_in(p, v, g);
            if let Some(&l) = path.edges.get(i) {
                if let Some(t) = p.stable_generator(l.edge) {
                    let t = Word::generator(&p.alphabet, t);
                    acc = &acc * &if l.forward { t } else { t.inverse() };
                }
                v = self.target(l);
            }
        }
        Ok(acc)
    }

    pub fn word_is_trivial(&self, w: &Word) -> Result<bool, GogError> {
        Ok(self.is_identity(&self.word_to_loop(w)?))
    }

    /// Checks that `hom` (defined on the presentation generators) kills
    /// every relator; names the first one that survives.
    pub fn respects_relations(&self, hom: &FreeHom) -> Result<(), GogError> {
        let p = self.presentation();
        if hom.domain().as_ref() != p.alphabet.as_ref() {
            return Err(GogError::Unsupported(format!(
                "map is defined on `{}`, not on the generators of `{}`",
                hom.domain().name(),
                self.name()
            )));
        }
        for (r, origin) in p.relators.iter().zip(&p.relator_origins) {
            if !hom.apply(r)?.is_identity() {
                return Err(GogError::RelationViolated(format!("{r} ({origin})")));
            }
        }
        Ok(())
    }

    /// Checks a map to a free group against the four strictness conditions,
    /// with `qh` naming the quadratically hanging vertices.
    ///
    /// Envelopes of non-QH free vertices are taken to be the vertex group
    /// itself; this is exact when every adjacent abelian `A_D` is generated
    /// by the attaching element of the connecting edge, and the condition
    /// is reported failed otherwise.
    pub fn check_strict(&self, hom: &FreeHom, qh: &[usize]) -> Result<StrictnessReport, GogError> {
        self.respects_relations(hom)?;
        let mut failures = Vec::new();

        let mut edge_ok = true;
        for e in self.edges().iter().filter(|e| !e.trivial) {
            if hom.apply(&self.element_word(e.from.vertex, &e.from.attach))?.is_identity() {
                edge_ok = false;
                failures.push(format!("edge `{}` is killed", e.name));
            }
        }

        let mut abelian_ok = true;
        let mut ad_generated_by: HashMap<usize, Vec<Element>> = HashMap::new();
        for (v, vert) in self.vertices().iter().enumerate() {
            if !vert.group.is_abelian() {
                continue;
            }
            let attaches: Vec<Element> = self
                .letters_at(v)
                .into_iter()
                .filter(|l| !self.edges()[l.edge].trivial)
                .map(|l| self.entry(l).clone())
                .collect();
            let vectors: Vec<Vec<Exponent>> = attaches
                .iter()
                .map(|a| match a {
                    Element::Abelian(x) => x.clone(),
                    Element::Free(_) => unreachable!("abelian vertex"),
                })
                .collect();
            let rank = VertexGroup::vector_rank(&vectors);
            let ok = match rank {
                0 => true,
                1 => attaches
                    .iter()
                    .map(|a| hom.apply(&self.element_word(v, a)))
                    .collect::<Result<Vec<_>, _>>()?
                    .iter()
                    .any(|w| !w.is_identity()),
                _ => false,
            };
            if !ok {
                abelian_ok = false;
                failures.push(format!("A_D of `{}` (rank {rank}) not mapped injectively", vert.name));
            }
            ad_generated_by.insert(v, attaches);
        }

        let mut envelope_ok = true;
        for (v, vert) in self.vertices().iter().enumerate() {
            if vert.group.is_abelian() || qh.contains(&v) {
                continue;
            }
            for l in self.letters_at(v) {
                let a = self.target(l);
                let Some(attaches) = ad_generated_by.get(&a) else { continue };
                let c = self.exit(l);
                let g = self.group(a);
                if !attaches.iter().all(|x| g.power_of(x, c).is_some()) {
                    envelope_ok = false;
                    failures.push(format!(
                        "envelope of `{}` gains a root through `{}`; only free envelopes are supported",
                        vert.name,
                        self.vertices()[a].name
                    ));
                }
            }
            let images = (0..vert.group.rank())
                .map(|i| hom.apply(&self.element_word(v, &vert.group.generator(i))))
                .collect::<Result<Vec<_>, _>>()?;
            let rank = fold(hom.codomain(), &images)?.rank();
            if rank != vert.group.rank() {
                envelope_ok = false;
                failures.push(format!("`{}` is not mapped injectively (image rank {rank})", vert.name));
            }
        }

        let mut qh_ok = true;
        for &v in qh {
            let g = self.group(v);
            let images = (0..g.rank())
                .map(|i| hom.apply(&self.element_word(v, &g.generator(i))))
                .collect::<Result<Vec<_>, _>>()?;
            if !generates_nonabelian(&images) {
                qh_ok = false;
                failures.push(format!("QH vertex `{}` has abelian image", self.vertices()[v].name));
            }
        }

        Ok(StrictnessReport {
            edge_groups_injective: edge_ok,
            abelian_envelopes_injective: abelian_ok,
            nonqh_envelopes_injective: envelope_ok,
            qh_images_nonabelian: qh_ok,
            strict: edge_ok && abelian_ok && envelope_ok && qh_ok,
            failures,
        })
    }

    /// Verifies that an endomorphism of the presentation is well defined
    /// on the fundamental group.
    pub fn check_endomorphism(&self, hom: &FreeHom) -> Result<(), GogError> {
        let p = self.presentation();
        for (r, origin) in p.relators.iter().zip(&p.relator_origins) {
            if !self.word_is_trivial(&hom.apply(r)?)? {
                return Err(GogError::RelationViolated(format!("{r} ({origin})")));
            }
        }
        Ok(())
    }

    /// Extends an automorphism of one vertex group to an endomorphism of
    /// the fundamental group that conjugates every other vertex group, then
    /// verifies it.
    pub fn extend_vertex_twist(&self, twist: &VertexTwist) -> Result<FreeHom, GogError> {
        let p = self.presentation();
        let tv = twist.vertex;
        let id = Word::identity(&p.alphabet);
        let n = self.vertices().len();
        let mut conj: Vec<Option<Word>> = vec![None; n];
        conj[self.base()] = Some(id.clone());

        // Conjugator seen by the end of `edge` at vertex `v`: the vertex
        // conjugator, corrected by the end conjugator at the twisted vertex.
        let end = |conj: &[Option<Word>], v: usize, edge: usize, from_end: bool| -> Word {
            let c = conj[v].clone().expect("parent first");
            if v != tv {
                return c;
            }
            match twist.end_conjugators.get(&(edge, from_end)) {
                Some(g) => &c * &self.element_word(tv, g),
                None => c,
            }
        };

        let mut queue = std::collections::VecDeque::from([self.base()]);
        while let Some(v) = queue.pop_front() {
            for w in 0..n {
                let Some(l) = self.tree_parent(w) else { continue };
                if self.source(l) != v || conj[w].is_some() {
                    continue;
                }
                let x = end(&conj, v, l.edge, l.forward);
                conj[w] = Some(if w == tv {
                    let g = twist.end_conjugators.get(&(l.edge, !l.forward));
                    match g {
                        Some(g) => &x * &self.element_word(tv, g).inverse(),
                        None => x,
                    }
                } else {
                    x
                });
                queue.push_back(w);
            }
        }

        let mut images = Vec::with_capacity(p.alphabet.rank());
        for (gi, src) in p.sources.iter().enumerate() {
            let img = match *src {
                GenSource::Vertex { vertex, index } => {
                    let c = conj[vertex].as_ref().expect("tree spans");
                    let inner = if vertex == tv {
                        self.element_word(tv, &twist.images[index])
                    } else {
                        Word::generator(&p.alphabet, gi)
                    };
                    &(c * &inner) * &c.inverse()
                }
                GenSource::Stable { edge } => {
                    let e = &self.edges()[edge];
                    let x = end(&conj, e.from.vertex, edge, true);
                    let y = end(&conj, e.to.vertex, edge, false);
                    &(&x * &Word::generator(&p.alphabet, gi)) * &y.inverse()
                }
            };
            images.push(img);
        }
        let hom = FreeHom::new(&p.alphabet, &p.alphabet, images)?;
        self.check_endomorphism(&hom)?;
        Ok(hom)
    }

    /// `t_e ↦ t_e · ω^n` for a non-tree edge `e`, identity elsewhere.
    pub fn stable_twist(&self, edge: usize, n: i64) -> Result<FreeHom, GogError> {
        let p = self.presentation();
        let t = p
            .stable_generator(edge)
            .ok_or_else(|| GogError::Unsupported(format!("edge `{}` is a tree edge", self.edges()[edge].name)))?;
        let e = &self.edges()[edge];
        let omega = self.element_word(e.to.vertex, &e.to.attach);
        let mut images: Vec<Word> = (0..p.alphabet.rank()).map(|i| Word::generator(&p.alphabet, i)).collect();
        images[t] = &images[t] * &omega.powi(n);
        let hom = FreeHom::new(&p.alphabet, &p.alphabet, images)?;
        self.check_endomorphism(&hom)?;
        Ok(hom)
    }
}
