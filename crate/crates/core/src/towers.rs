//! Towers of abelian and quadratic extensions over a free group, their
//! retractions onto the base, and separation experiments.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::constructions::{ConstructionError, Fig3Tower};
use crate::gog::{Classification, Edge, EdgeEnd, Element, GogError, GraphOfGroups, PathWord, Vertex, VertexGroup};
use crate::homs::FreeHom;
use crate::words::{are_conjugate, commutator, primitive_root, random_word, Alphabet, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("level {level}: {message}")]
    Level { level: usize, message: String },
    #[error("level index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("tower is not an iterated centralizer extension")]
    NotIce,
    #[error("elements {left} and {right} are conjugate (conjugator {certificate})")]
    ConjugateInput { left: usize, right: usize, certificate: String },
    #[error("element {0} is trivial")]
    TrivialInput(usize),
    #[error("expected {expected} exponents, got {found}")]
    Shape { expected: usize, found: usize },
    #[error(transparent)]
    Gog(#[from] GogError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

/// Words in an extension level are over the presentation generators of
/// the level below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionLevel {
    /// `⟨u⟩ ⊕ A` glued along `u = attach`, or a free product with `A` when
    /// `attach` is `None`. `names` lists `u` first (when present), then a
    /// basis of `A`.
    Abelian { attach: Option<Word>, rank: usize, names: Vec<String> },
    /// A surface of the given genus glued along its boundary components.
    /// `images` sends `x₁, y₁, …, x_g, y_g` into the level below; the
    /// remaining boundary generators go to their attaching words.
    Quadratic { genus: usize, boundaries: Vec<Word>, images: Vec<Word>, names: Vec<String> },
}

impl ExtensionLevel {
    pub fn abelian(attach: Option<Word>, rank: usize) -> ExtensionLevel {
        ExtensionLevel::Abelian { attach, rank, names: Vec::new() }
    }

    pub fn quadratic(genus: usize, boundaries: Vec<Word>, images: Vec<Word>) -> ExtensionLevel {
        ExtensionLevel::Quadratic { genus, boundaries, images, names: Vec::new() }
    }

    /// Number of free retraction parameters.
    pub fn parameter_count(&self) -> usize {
        match self {
            ExtensionLevel::Abelian { attach: Some(_), rank, .. } => *rank,
            _ => 0,
        }
    }

    fn default_names(&self, level: usize) -> Vec<String> {
        match self {
            ExtensionLevel::Abelian { attach, rank, .. } => {
                let mut v = Vec::new();
                if attach.is_some() {
                    v.push(format!("c{level}"));
                }
                if *rank == 1 {
                    v.push(format!("t{level}"));
                } else {
                    v.extend((1..=*rank).map(|j| format!("t{level}_{j}")));
                }
                v
            }
            ExtensionLevel::Quadratic { genus, boundaries, .. } => {
                let mut v = Vec::new();
                for k in 1..=*genus {
                    v.push(format!("x{level}_{k}"));
                    v.push(format!("y{level}_{k}"));
                }
                v.extend((1..boundaries.len()).map(|j| format!("d{level}_{j}")));
                v
            }
        }
    }

    pub fn names(&self) -> &[String] {
        match self {
            ExtensionLevel::Abelian { names, .. } | ExtensionLevel::Quadratic { names, .. } => names,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    name: String,
    base: Arc<Alphabet>,
    levels: Vec<ExtensionLevel>,
    graphs: Vec<GraphOfGroups>,
    /// Centralizers of attaching elements are assumed cyclic, never checked.
    pub centralizer_assumed: bool,
}

pub fn build_tower(
    name: impl Into<String>,
    base: &Arc<Alphabet>,
    levels: Vec<ExtensionLevel>,
) -> Result<Tower, TowerError> {
    let mut t = Tower::new(name, base)?;
    for l in levels {
        t.push(l)?;
    }
    Ok(t)
}

impl Tower {
    pub fn new(name: impl Into<String>, base: &Arc<Alphabet>) -> Result<Tower, TowerError> {
        let g = GraphOfGroups::new(
            base.name(),
            vec![Vertex { name: base.name().to_string(), group: VertexGroup::Free(base.clone()) }],
            Vec::new(),
            0,
        )?;
        Ok(Tower { name: name.into(), base: base.clone(), levels: Vec::new(), graphs: vec![g], centralizer_assumed: true })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &Arc<Alphabet> {
        &self.base
    }

    pub fn levels(&self) -> &[ExtensionLevel] {
        &self.levels
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// Graph of groups of `G_i`; `graph(height())` is the whole tower.
    pub fn graph(&self, i: usize) -> &GraphOfGroups {
        &self.graphs[i]
    }

    pub fn top(&self) -> &GraphOfGroups {
        self.graphs.last().expect("base graph")
    }

    /// Iterated centralizer extension: abelian levels only.
    pub fn is_ice(&self) -> bool {
        self.levels.iter().all(|l| matches!(l, ExtensionLevel::Abelian { .. }))
    }

    pub fn push(&mut self, mut level: ExtensionLevel) -> Result<(), TowerError> {
        let index = self.levels.len() + 1;
        let err = |message: String| TowerError::Level { level: index, message };
        let prev = self.top();
        let defaults = level.default_names(index);
        match &mut level {
            ExtensionLevel::Abelian { names, .. } | ExtensionLevel::Quadratic { names, .. } => {
                if names.is_empty() {
                    *names = defaults.clone();
                } else if names.len() != defaults.len() {
                    return Err(err(format!("expected {} generator names, got {}", defaults.len(), names.len())));
                }
            }
        }
        let mut vertices = prev.vertices().to_vec();
        let mut edges = prev.edges().to_vec();
        let new_vertex = vertices.len();
        match &level {
            ExtensionLevel::Abelian { attach, rank, names } => {
                if *rank == 0 {
                    return Err(err("abelian extension of rank 0".into()));
                }
                let alphabet = Alphabet::new(format!("A{index}"), names.clone())?;
                let group = VertexGroup::Abelian(alphabet);
                let edge = match attach {
                    Some(w) => {
                        if w.is_identity() {
                            return Err(err("trivial attaching word for a non-singular extension".into()));
                        }
                        let (v, el) = prev
                            .vertex_element(w)
                            .ok_or_else(|| err(format!("attaching word {w} does not lie in one free vertex group")))?;
                        Edge {
                            name: format!("e{index}"),
                            from: EdgeEnd { vertex: v, attach: el },
                            to: EdgeEnd { vertex: new_vertex, attach: group.generator(0) },
                            tree: true,
                            trivial: false,
                        }
                    }
                    None => Edge {
                        name: format!("e{index}"),
                        from: EdgeEnd { vertex: prev.base(), attach: prev.group(prev.base()).identity() },
                        to: EdgeEnd { vertex: new_vertex, attach: group.identity() },
                        tree: true,
                        trivial: true,
                    },
                };
                vertices.push(Vertex { name: format!("A{index}"), group });
                edges.push(edge);
            }
            ExtensionLevel::Quadratic { genus, boundaries, images, names } => {
                let b = boundaries.len();
                if b == 0 {
                    return Err(err("quadratic extension without boundary".into()));
                }
                if *genus == 0 && b == 1 {
                    return Err(err("a disc is not a valid surface".into()));
                }
                if images.len() != 2 * genus {
                    return Err(err(format!("expected {} surface images, got {}", 2 * genus, images.len())));
                }
                let alphabet = Alphabet::new(format!("Q{index}"), names.clone())?;
                let gen = |i: usize| Word::generator(&alphabet, i);
                let mut last = Word::identity(&alphabet);
                for j in 0..b - 1 {
                    last = &last * &gen(2 * genus + j);
                }
                last = last.inverse();
                for k in 0..*genus {
                    last = &last * &commutator(&gen(2 * k), &gen(2 * k + 1))?;
                }
                for (j, w) in boundaries.iter().enumerate() {
                    let (v, el) = prev
                        .vertex_element(w)
                        .ok_or_else(|| err(format!("boundary word {w} does not lie in one free vertex group")))?;
                    let boundary = if j + 1 < b { gen(2 * genus + j) } else { last.clone() };
                    edges.push(Edge {
                        name: if j == 0 { format!("e{index}") } else { format!("s{index}_{j}") },
                        from: EdgeEnd { vertex: v, attach: el },
                        to: EdgeEnd { vertex: new_vertex, attach: Element::Free(boundary) },
                        tree: j == 0,
                        trivial: false,
                    });
                }
                vertices.push(Vertex { name: format!("Q{index}"), group: VertexGroup::Free(alphabet) });
            }
        }
        let graph = GraphOfGroups::new(format!("{}_{index}", self.name), vertices, edges, prev.base())?;
        self.graphs.push(graph);
        self.levels.push(level);
        let check = self.level_retraction(index, &vec![1; self.levels[index - 1].parameter_count()]);
        if let Err(e) = check {
            self.graphs.pop();
            self.levels.pop();
            return Err(err(e.to_string()));
        }
        if let ExtensionLevel::Quadratic { .. } = &self.levels[index - 1] {
            if !self.surface_image_nonabelian(index)? {
                self.graphs.pop();
                self.levels.pop();
                return Err(err("surface image is abelian".into()));
            }
        }
        Ok(())
    }

    fn surface_image_nonabelian(&self, i: usize) -> Result<bool, TowerError> {
        let r = self.level_retraction(i, &[])?;
        let below = self.graph(i - 1);
        let names = self.levels[i - 1].names();
        let p = &self.graph(i).presentation().alphabet;
        let images: Vec<Word> = names.iter().map(|n| r.image(p.index_of(n).expect("surface generator")).clone()).collect();
        for a in 0..images.len() {
            for b in a + 1..images.len() {
                if !below.word_is_trivial(&commutator(&images[a], &images[b])?)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// The retraction `G_i → G_{i−1}`, verified against every relator.
    /// `exponents` gives the power of the attaching word for each basis
    /// element of `A` (abelian levels only).
    pub fn level_retraction(&self, i: usize, exponents: &[i64]) -> Result<FreeHom, TowerError> {
        if i == 0 || i > self.height() {
            return Err(TowerError::IndexOutOfRange(i));
        }
        let level = &self.levels[i - 1];
        if exponents.len() != level.parameter_count() {
            return Err(TowerError::Shape { expected: level.parameter_count(), found: exponents.len() });
        }
        let (upper, lower) = (self.graph(i), self.graph(i - 1));
        let (up, low) = (&upper.presentation().alphabet, &lower.presentation().alphabet);
        let mut images: Vec<Option<Word>> = up.generators().iter().map(|n| low.index_of(n).map(|j| Word::generator(low, j))).collect();
        let mut set = |name: &str, w: Word| images[up.index_of(name).expect("level generator")] = Some(w);
        match level {
            ExtensionLevel::Abelian { attach: Some(w), names, .. } => {
                set(&names[0], w.clone());
                for (n, k) in names[1..].iter().zip(exponents) {
                    set(n, w.powi(*k));
                }
            }
            ExtensionLevel::Abelian { attach: None, names, .. } => {
                for n in names {
                    set(n, Word::identity(low));
                }
            }
            ExtensionLevel::Quadratic { genus, boundaries, images: imgs, names } => {
                for (n, w) in names.iter().zip(imgs) {
                    set(n, w.clone());
                }
                for (j, w) in boundaries.iter().enumerate().take(boundaries.len() - 1) {
                    set(&names[2 * genus + j], w.clone());
                }
            }
        }
        // Stable letters of the new level go to the identity.
        let images: Vec<Word> = images.into_iter().map(|w| w.unwrap_or_else(|| Word::identity(low))).collect();
        let hom = FreeHom::new(up, low, images)?;
        for (r, origin) in upper.presentation().relators.iter().zip(&upper.presentation().relator_origins) {
            if !lower.word_is_trivial(&hom.apply(r)?)? {
                return Err(GogError::RelationViolated(format!("{r} ({origin})")).into());
            }
        }
        Ok(hom)
    }

    /// Exponent count per level.
    pub fn parameter_shape(&self) -> Vec<usize> {
        self.levels.iter().map(ExtensionLevel::parameter_count).collect()
    }

    /// Composition of the level retractions from the top down to the base.
    pub fn retraction(&self, exponents: &[Vec<i64>]) -> Result<FreeHom, TowerError> {
        if exponents.len() != self.height() {
            return Err(TowerError::Shape { expected: self.height(), found: exponents.len() });
        }
        let mut acc: Option<FreeHom> = None;
        for i in (1..=self.height()).rev() {
            let r = self.level_retraction(i, &exponents[i - 1])?;
            acc = Some(match acc {
                None => r,
                Some(a) => FreeHom::compose(&r, &a)?,
            });
        }
        let base_pres = &self.graph(0).presentation().alphabet;
        let hom = acc.unwrap_or_else(|| FreeHom::identity(base_pres));
        let images = hom.images().iter().map(|w| w.rename_into(&self.base)).collect::<Result<_, _>>()?;
        let hom = FreeHom::new(hom.domain(), &self.base, images)?;
        let p = &self.top().presentation().alphabet;
        for (i, g) in self.base.generators().iter().enumerate() {
            debug_assert_eq!(hom.image(p.index_of(g).expect("base generator")), &Word::generator(&self.base, i));
        }
        Ok(hom)
    }

    /// Every abelian exponent equal to `n`.
    pub fn diagonal_retraction(&self, n: i64) -> Result<FreeHom, TowerError> {
        let exps: Vec<Vec<i64>> = self.parameter_shape().into_iter().map(|k| vec![n; k]).collect();
        self.retraction(&exps)
    }

    pub fn ice_retraction(&self, exponents: &[Vec<i64>]) -> Result<FreeHom, TowerError> {
        if !self.is_ice() {
            return Err(TowerError::NotIce);
        }
        self.retraction(exponents)
    }

    pub fn family(&self) -> RetractionFamily<'_> {
        RetractionFamily { tower: self }
    }

    /// Loop in the top graph spelled by a presentation word.
    pub fn element(&self, w: &Word) -> Result<PathWord, TowerError> {
        Ok(self.top().word_to_loop(w)?)
    }
}

/// Retractions of a tower onto its base, one integer per abelian basis
/// element.
#[derive(Debug, Clone, Copy)]
pub struct RetractionFamily<'a> {
    tower: &'a Tower,
}

impl RetractionFamily<'_> {
    pub fn shape(&self) -> Vec<usize> {
        self.tower.parameter_shape()
    }

    pub fn evaluate(&self, exponents: &[Vec<i64>]) -> Result<FreeHom, TowerError> {
        self.tower.retraction(exponents)
    }

    pub fn diagonal(&self, n: i64) -> Result<FreeHom, TowerError> {
        self.tower.diagonal_retraction(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Collapse {
    pub n: i64,
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Indivisibility {
    pub element: usize,
    pub indivisible_for_all: bool,
    /// Parameters at which the image became a proper power.
    pub failures: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub task: String,
    pub n_scanned: i64,
    pub minimal_n: Option<i64>,
    pub collapsed_pairs: Vec<Collapse>,
    pub indivisibility: Vec<Indivisibility>,
    pub seed: u64,
}

impl SeparationReport {
    pub fn exhausted(&self) -> bool {
        self.minimal_n.is_none()
    }
}

/// Checks that no two elements of `set` are conjugate in the tower.
pub fn check_pairwise_nonconjugate(g: &GraphOfGroups, set: &[PathWord]) -> Result<(), TowerError> {
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            let r = g.are_conjugate(&set[i], &set[j], false)?;
            if let Some(c) = r.certificate {
                let certificate = g.loop_to_word(&c).map(|w| w.to_string()).unwrap_or_else(|_| g.render_path(&c));
                return Err(TowerError::ConjugateInput { left: i, right: j, certificate });
            }
        }
    }
    Ok(())
}

/// Result of pushing a set through one retraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanStep {
    pub n: i64,
    pub collapsed: Vec<(usize, usize)>,
    pub divisible: Vec<usize>,
}

pub fn scan_step(
    g: &GraphOfGroups,
    hom: &FreeHom,
    n: i64,
    set: &[PathWord],
    indivisible: &[usize],
) -> Result<ScanStep, TowerError> {
    let images = set
        .iter()
        .map(|p| Ok(hom.apply(&g.loop_to_word(p)?)?))
        .collect::<Result<Vec<Word>, TowerError>>()?;
    let mut collapsed = Vec::new();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if are_conjugate(&images[i], &images[j], false)?.is_some() {
                collapsed.push((i, j));
            }
        }
    }
    let divisible = indivisible
        .iter()
        .copied()
        .filter(|&i| primitive_root(&images[i]).1.magnitude_saturating() != 1)
        .collect();
    Ok(ScanStep { n, collapsed, divisible })
}

/// Folds per-parameter scan results (in parameter order) into a report.
pub fn assemble_separation(task: &str, steps: &[ScanStep], indivisible: &[usize], seed: u64) -> SeparationReport {
    SeparationReport {
        task: task.to_string(),
        n_scanned: steps.len() as i64,
        minimal_n: steps.iter().find(|s| s.collapsed.is_empty()).map(|s| s.n),
        collapsed_pairs: steps
            .iter()
            .filter(|s| !s.collapsed.is_empty())
            .map(|s| Collapse { n: s.n, pairs: s.collapsed.clone() })
            .collect(),
        indivisibility: indivisible
            .iter()
            .map(|&e| {
                let failures: Vec<i64> = steps.iter().filter(|s| s.divisible.contains(&e)).map(|s| s.n).collect();
                Indivisibility { element: e, indivisible_for_all: failures.is_empty(), failures }
            })
            .collect(),
        seed,
    }
}

/// Scans the diagonal retractions `N = 1..=n_max` and reports, for each
/// `N`, which pairs of `set` have conjugate images. Elements listed in
/// `indivisible` are also checked to stay indivisible.
pub fn separation_experiment(
    tower: &Tower,
    set: &[PathWord],
    n_max: i64,
    indivisible: &[usize],
    task: &str,
    seed: u64,
) -> Result<SeparationReport, TowerError> {
    check_pairwise_nonconjugate(tower.top(), set)?;
    let steps = (1..=n_max)
        .map(|n| scan_step(tower.top(), &tower.diagonal_retraction(n)?, n, set, indivisible))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble_separation(task, &steps, indivisible, seed))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscriminationReport {
    pub task: String,
    pub n_scanned: i64,
    pub minimal_n: Option<i64>,
    /// Elements sent to the identity, per scanned parameter.
    pub killed: Vec<(i64, Vec<usize>)>,
}

/// Smallest diagonal parameter at which no element of `set` dies.
pub fn discrimination_experiment(
    tower: &Tower,
    set: &[PathWord],
    n_max: i64,
    task: &str,
) -> Result<DiscriminationReport, TowerError> {
    let g = tower.top();
    let words = set.iter().map(|p| g.loop_to_word(p)).collect::<Result<Vec<_>, _>>()?;
    if let Some(i) = set.iter().position(|p| g.is_identity(p)) {
        return Err(TowerError::TrivialInput(i));
    }
    let mut killed = Vec::new();
    let mut minimal_n = None;
    let mut n_scanned = 0;
    for n in 1..=n_max {
        n_scanned = n;
        let hom = tower.diagonal_retraction(n)?;
        let dead: Vec<usize> = words
            .iter()
            .enumerate()
            .filter(|(_, w)| hom.apply(w).map(|x| x.is_identity()).unwrap_or(false))
            .map(|(i, _)| i)
            .collect();
        if dead.is_empty() {
            minimal_n = Some(n);
            break;
        }
        killed.push((n, dead));
    }
    Ok(DiscriminationReport { task: task.to_string(), n_scanned, minimal_n, killed })
}

/// Random pairwise non-conjugate sets: `count` pairs of loops spelled by
/// presentation words of length `1..=max_len`.
pub fn random_nonconjugate_pairs(
    g: &GraphOfGroups,
    count: usize,
    max_len: usize,
    rng: &mut impl Rng,
) -> Result<Vec<(PathWord, PathWord)>, TowerError> {
    let p = &g.presentation().alphabet;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut draw = || {
            let n = rng.random_range(1..=max_len);
            g.word_to_loop(&random_word(p, n, rng))
        };
        let (a, b) = (draw()?, draw()?);
        if g.is_identity(&a) || g.is_identity(&b) {
            continue;
        }
        if !g.are_conjugate(&a, &b, false)?.conjugate {
            out.push((a, b));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairOutcome {
    pub left: String,
    pub right: String,
    pub separated_at: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prop51Report {
    pub pairs: Vec<PairOutcome>,
    pub all_separated: bool,
    /// First parameter separating `u` and `v`; expected to stay `None`.
    pub uv_separated_at: Option<i64>,
    pub rejected_samples: usize,
    pub n_max: i64,
    pub seed: u64,
}

/// Samples pairs of non-conjugate elements of the Magnus-pair group that
/// avoid the classes of `u` and `v`, and pushes them through the twisted
/// retractions of the extended group onto `F(x, y, z)`.
pub fn prop51_sampling(f: &Fig3Tower, pair_count: usize, n_max: i64, seed: u64) -> Result<Prop51Report, TowerError> {
    let m = &f.magnus;
    let g = &m.graph;
    let p = &g.presentation().alphabet;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let powers: Vec<PathWord> = [&m.u, &m.v]
        .into_iter()
        .flat_map(|x| (1..=3).map(move |k| (x, k)))
        .map(|(x, k)| (0..k).fold(g.path_identity(g.base()), |acc, _| g.concat(&acc, x)))
        .collect();
    let avoids = |a: &PathWord| -> Result<bool, TowerError> {
        if let Classification::Elliptic { vertex, .. } = g.classify(a) {
            if vertex == m.u_vertex || vertex == m.v_vertex {
                return Ok(false);
            }
        }
        for q in &powers {
            if g.are_conjugate(a, q, true)?.conjugate {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut rejected = 0;
    let mut pairs = Vec::with_capacity(pair_count);
    while pairs.len() < pair_count {
        let mut draw = || {
            let n = rng.random_range(2..=6);
            random_word(p, n, &mut rng)
        };
        let (wa, wb) = (draw(), draw());
        let (a, b) = (g.word_to_loop(&wa)?, g.word_to_loop(&wb)?);
        let ok = !g.is_identity(&a)
            && !g.is_identity(&b)
            && avoids(&a)?
            && avoids(&b)?
            && !g.are_conjugate(&a, &b, true)?.conjugate;
        if ok {
            pairs.push((wa, wb));
        } else {
            rejected += 1;
        }
    }
    let lp = &f.graph.presentation().alphabet;
    let maps = (1..=n_max).map(|n| f.twisted_retraction(n)).collect::<Result<Vec<_>, _>>()?;
    let separates = |a: &Word, b: &Word| -> Result<Option<i64>, TowerError> {
        let (a, b) = (a.rename_into(lp)?, b.rename_into(lp)?);
        for (i, r) in maps.iter().enumerate() {
            if are_conjugate(&r.apply(&a)?, &r.apply(&b)?, false)?.is_none() {
                return Ok(Some(i as i64 + 1));
            }
        }
        Ok(None)
    };
    let mut outcomes = Vec::with_capacity(pairs.len());
    for (a, b) in &pairs {
        outcomes.push(PairOutcome { left: a.to_string(), right: b.to_string(), separated_at: separates(a, b)? });
    }
    let (wu, wv) = (g.loop_to_word(&m.u)?, g.loop_to_word(&m.v)?);
    let uv_separated_at = separates(&wu, &wv)?;
    Ok(Prop51Report {
        all_separated: outcomes.iter().all(|o| o.separated_at.is_some()),
        pairs: outcomes,
        uv_separated_at,
        rejected_samples: rejected,
        n_max,
        seed,
    })
}
