//! Folded Stallings core graphs of finitely generated subgroups.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::words::{same_alphabet, Alphabet, Exponent, Letter, Word, WordError};

/// Folded core graph with base vertex 0 and vertices numbered in BFS order
/// from the base (letters taken in order `a, a⁻¹, b, …`), so equal
/// subgroups give identical tables.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    alphabet: Arc<Alphabet>,
    out: Vec<Vec<Option<usize>>>,
    inc: Vec<Vec<Option<usize>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Index {
    Finite(usize),
    Infinite,
}

/// `element ∈ H` and `conjugator · element · conjugator⁻¹ ∈ H` with
/// `conjugator ∉ H`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct MalnormalWitness {
    pub element: Word,
    pub conjugator: Word,
}

impl MalnormalWitness {
    pub fn verify(&self, graph: &SubgroupGraph) -> bool {
        let conj = self.element.conjugate_by(&self.conjugator);
        !self.element.is_identity()
            && graph.contains(&self.element).unwrap_or(false)
            && conj.is_ok_and(|c| graph.contains(&c).unwrap_or(false))
            && !graph.contains(&self.conjugator).unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct MalnormalityReport {
    pub malnormal: bool,
    pub witness: Option<MalnormalWitness>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    /// Keeps the smaller root so the base vertex always survives.
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.0[hi] = lo;
        }
    }
}

/// Folds the petal graph of `generators` into the core graph of the
/// subgroup they generate. Trivial generators are skipped.
pub fn fold(alphabet: &Arc<Alphabet>, generators: &[Word]) -> Result<SubgroupGraph, WordError> {
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut n = 1;
    for g in generators {
        if !same_alphabet(alphabet, g.alphabet()) {
            return Err(WordError::AlphabetMismatch {
                left: alphabet.name().to_string(),
                right: g.alphabet().name().to_string(),
            });
        }
        let letters = g.letters();
        let mut cur = 0;
        for (i, l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() {
                0
            } else {
                n += 1;
                n - 1
            };
            if l.is_inverse() {
                edges.push((next, l.generator(), cur));
            } else {
                edges.push((cur, l.generator(), next));
            }
            cur = next;
        }
    }

    let mut uf = UnionFind((0..n).collect());
    loop {
        let mut changed = false;
        let mut out: HashMap<(usize, usize), usize> = HashMap::new();
        let mut inc: HashMap<(usize, usize), usize> = HashMap::new();
        for &(u, g, v) in &edges {
            let (u, v) = (uf.find(u), uf.find(v));
            match out.entry((u, g)) {
                Entry::Occupied(t) => {
                    let t = *t.get();
                    if uf.find(t) != v {
                        uf.union(t, v);
                        changed = true;
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(v);
                }
            }
            let v = uf.find(v);
            let u = uf.find(u);
            match inc.entry((v, g)) {
                Entry::Occupied(s) => {
                    let s = *s.get();
                    if uf.find(s) != u {
                        uf.union(s, u);
                        changed = true;
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(u);
                }
            }
        }
        if !changed {
            break;
        }
    }

    let rank = alphabet.rank();
    let mut out = vec![vec![None; rank]; n];
    let mut inc = vec![vec![None; rank]; n];
    for &(u, g, v) in &edges {
        let (u, v) = (uf.find(u), uf.find(v));
        out[u][g] = Some(v);
        inc[v][g] = Some(u);
    }
    let mut alive: Vec<bool> = (0..n).map(|v| uf.find(v) == v).collect();

    // Prune hanging trees down to the core.
    let degree = |v: usize, out: &Vec<Vec<Option<usize>>>, inc: &Vec<Vec<Option<usize>>>| {
        out[v].iter().flatten().count() + inc[v].iter().flatten().count()
    };
    let mut queue: VecDeque<usize> =
        (1..n).filter(|&v| alive[v] && degree(v, &out, &inc) <= 1).collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] || degree(v, &out, &inc) > 1 {
            continue;
        }
        alive[v] = false;
        for g in 0..rank {
            if let Some(w) = out[v][g].take() {
                inc[w][g] = None;
                if w != 0 && alive[w] && degree(w, &out, &inc) <= 1 {
                    queue.push_back(w);
                }
            }
            if let Some(w) = inc[v][g].take() {
                out[w][g] = None;
                if w != 0 && alive[w] && degree(w, &out, &inc) <= 1 {
                    queue.push_back(w);
                }
            }
        }
    }

    Ok(renumber(alphabet.clone(), &out, &inc))
}

fn renumber(
    alphabet: Arc<Alphabet>,
    out: &[Vec<Option<usize>>],
    inc: &[Vec<Option<usize>>],
) -> SubgroupGraph {
    let rank = alphabet.rank();
    let mut id: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![0usize];
    id.insert(0, 0);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for g in 0..rank {
            for w in [out[v][g], inc[v][g]].into_iter().flatten() {
                if let Entry::Vacant(e) = id.entry(w) {
                    e.insert(order.len());
                    order.push(w);
                }
            }
        }
    }
    let m = order.len();
    let mut new_out = vec![vec![None; rank]; m];
    let mut new_inc = vec![vec![None; rank]; m];
    for (i, &v) in order.iter().enumerate() {
        for g in 0..rank {
            new_out[i][g] = out[v][g].map(|w| id[&w]);
            new_inc[i][g] = inc[v][g].map(|w| id[&w]);
        }
    }
    SubgroupGraph { alphabet, out: new_out, inc: new_inc }
}

impl SubgroupGraph {
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|row| row.iter().flatten().count()).sum()
    }

    /// Target of the `letter`-edge leaving `v`, if any.
    pub fn step(&self, v: usize, letter: Letter) -> Option<usize> {
        if letter.is_inverse() {
            self.inc[v][letter.generator()]
        } else {
            self.out[v][letter.generator()]
        }
    }

    /// Follows `word` from `start`; `None` when it falls off the graph.
    pub fn read_from(&self, start: usize, word: &Word) -> Option<usize> {
        let mut v = start;
        for s in word.syllables() {
            let letter = s.letter();
            let steps = s.exponent.abs();
            match steps.magnitude_usize().filter(|&k| k <= self.vertex_count() + 1) {
                Some(k) => {
                    for _ in 0..k {
                        v = self.step(v, letter)?;
                    }
                }
                None => {
                    // Same-letter edges form paths and cycles; reduce the
                    // exponent modulo the cycle through `v`.
                    let mut w = v;
                    let mut period = 0usize;
                    loop {
                        w = self.step(w, letter)?;
                        period += 1;
                        if w == v {
                            break;
                        }
                    }
                    let (_, r) = steps.div_rem_euclid(&Exponent::from(period));
                    for _ in 0..r.magnitude_saturating() {
                        v = self.step(v, letter)?;
                    }
                }
            }
        }
        Some(v)
    }

    pub fn contains(&self, w: &Word) -> Result<bool, WordError> {
        if !same_alphabet(&self.alphabet, w.alphabet()) {
            return Err(WordError::AlphabetMismatch {
                left: self.alphabet.name().to_string(),
                right: w.alphabet().name().to_string(),
            });
        }
        Ok(self.read_from(0, w) == Some(0))
    }

    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// Finite exactly when the graph is a full cover.
    pub fn index(&self) -> Index {
        let complete = self
            .out
            .iter()
            .chain(self.inc.iter())
            .all(|row| row.iter().all(Option::is_some));
        if complete {
            Index::Finite(self.vertex_count())
        } else {
            Index::Infinite
        }
    }

    pub fn rank_and_index(&self) -> (usize, Index) {
        (self.rank(), self.index())
    }

    /// Labels of BFS-tree paths from the base to every vertex.
    pub fn spanning_labels(&self) -> Vec<Word> {
        let n = self.vertex_count();
        let mut label: Vec<Option<Vec<Letter>>> = vec![None; n];
        label[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for g in 0..self.alphabet.rank() {
                for letter in [Letter::new(g, false), Letter::new(g, true)] {
                    if let Some(w) = self.step(v, letter) {
                        if label[w].is_none() {
                            let mut l = label[v].clone().expect("visited");
                            l.push(letter);
                            label[w] = Some(l);
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        label
            .into_iter()
            .map(|l| Word::from_letters(&self.alphabet, &l.expect("core graphs are connected")))
            .collect()
    }

    /// Decides malnormality through the fiber product of the core with
    /// itself: every component away from the diagonal must be a tree.
    pub fn malnormality(&self) -> MalnormalityReport {
        let n = self.vertex_count();
        let rank = self.alphabet.rank();
        let pair = |i: usize, j: usize| i * n + j;
        let mut seen = vec![false; n * n];
        for start in 0..n * n {
            let (si, sj) = (start / n, start % n);
            if si == sj || seen[start] {
                continue;
            }
            // BFS spanning tree of the component; any extra edge closes a cycle.
            let mut parent: HashMap<usize, (usize, Letter)> = HashMap::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            let mut tree_edges: HashSet<(usize, usize, usize)> = HashSet::new();
            let mut cycle_edge = None;
            while let Some(p) = queue.pop_front() {
                let (i, j) = (p / n, p % n);
                for g in 0..rank {
                    let (Some(a), Some(b)) = (self.out[i][g], self.out[j][g]) else { continue };
                    let q = pair(a, b);
                    if !seen[q] {
                        seen[q] = true;
                        parent.insert(q, (p, Letter::new(g, false)));
                        tree_edges.insert((p, g, q));
                        queue.push_back(q);
                    } else if !tree_edges.contains(&(p, g, q)) && cycle_edge.is_none() {
                        cycle_edge = Some((p, g, q));
                    }
                }
                for g in 0..rank {
                    let (Some(a), Some(b)) = (self.inc[i][g], self.inc[j][g]) else { continue };
                    let q = pair(a, b);
                    if !seen[q] {
                        seen[q] = true;
                        parent.insert(q, (p, Letter::new(g, true)));
                        tree_edges.insert((q, g, p));
                        queue.push_back(q);
                    }
                }
            }
            let Some((x, g, y)) = cycle_edge else { continue };
            let path_to = |mut v: usize| {
                let mut letters = Vec::new();
                while v != start {
                    let (p, l) = parent[&v];
                    letters.push(l);
                    v = p;
                }
                letters.reverse();
                Word::from_letters(&self.alphabet, &letters)
            };
            let omega = &(&path_to(x) * &Word::generator(&self.alphabet, g)) * &path_to(y).inverse();
            let labels = self.spanning_labels();
            let (p, q) = (&labels[si], &labels[sj]);
            let witness = MalnormalWitness {
                element: &(p * &omega) * &p.inverse(),
                conjugator: q * &p.inverse(),
            };
            return MalnormalityReport { malnormal: false, witness: Some(witness) };
        }
        MalnormalityReport { malnormal: true, witness: None }
    }

    /// Diagnostic DOT dump.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph subgroup {\n  0 [shape=doublecircle];\n");
        for (v, row) in self.out.iter().enumerate() {
            for (g, w) in row.iter().enumerate() {
                if let Some(w) = w {
                    let _ = writeln!(s, "  {v} -> {w} [label=\"{}\"];", self.alphabet.generator_name(g));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

impl PartialEq for SubgroupGraph {
    fn eq(&self, other: &Self) -> bool {
        self.out == other.out && same_alphabet(&self.alphabet, &other.alphabet)
    }
}

impl Eq for SubgroupGraph {}

impl Hash for SubgroupGraph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.out.hash(state);
    }
}

/// Convenience: fold then decide malnormality.
pub fn is_malnormal(graph: &SubgroupGraph) -> MalnormalityReport {
    graph.malnormality()
}
