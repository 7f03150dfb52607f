use std::fmt;

use super::{Element, GogError, GraphOfGroups};
use crate::words::Exponent;

/// An edge traversed forwards (`from → to`) or backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLetter {
    pub edge: usize,
    pub forward: bool,
}

impl EdgeLetter {
    pub fn inverse(self) -> EdgeLetter {
        EdgeLetter { edge: self.edge, forward: !self.forward }
    }
}

/// A groupoid path `g₀ e₁ g₁ … eₙ gₙ` starting at vertex `start`.
/// Loops at the base vertex are elements of the fundamental group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathWord {
    pub(crate) start: usize,
    pub(crate) elements: Vec<Element>,
    pub(crate) edges: Vec<EdgeLetter>,
}

impl PathWord {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn edges(&self) -> &[EdgeLetter] {
        &self.edges
    }

    /// Number of edge letters.
    pub fn syllable_length(&self) -> usize {
        self.edges.len()
    }
}

impl GraphOfGroups {
    pub fn path_identity(&self, v: usize) -> PathWord {
        PathWord { start: v, elements: vec![self.group(v).identity()], edges: Vec::new() }
    }

    pub fn path_element(&self, v: usize, g: Element) -> Result<PathWord, GogError> {
        if !self.group(v).contains(&g) {
            return Err(GogError::MalformedPath(format!(
                "element {g} is not in the group of `{}`",
                self.vertices()[v].name
            )));
        }
        Ok(PathWord { start: v, elements: vec![g], edges: Vec::new() })
    }

    pub fn path_letter(&self, l: EdgeLetter) -> PathWord {
        PathWord {
            start: self.source(l),
            elements: vec![self.group(self.source(l)).identity(), self.group(self.target(l)).identity()],
            edges: vec![l],
        }
    }

    /// Builds a path from raw parts, checking that it is well formed.
    pub fn path(
        &self,
        start: usize,
        elements: Vec<Element>,
        edges: Vec<EdgeLetter>,
    ) -> Result<PathWord, GogError> {
        let p = PathWord { start, elements, edges };
        self.check_path(&p)?;
        Ok(p)
    }

    pub fn end_vertex(&self, p: &PathWord) -> usize {
        p.edges.last().map_or(p.start, |&l| self.target(l))
    }

    pub fn is_loop_at_base(&self, p: &PathWord) -> bool {
        p.start == self.base() && self.end_vertex(p) == self.base()
    }

    pub fn check_path(&self, p: &PathWord) -> Result<(), GogError> {
        let bad = |m: String| Err(GogError::MalformedPath(m));
        if p.start >= self.vertices().len() {
            return bad("start vertex out of range".into());
        }
        if p.elements.len() != p.edges.len() + 1 {
            return bad("element and edge counts disagree".into());
        }
        let mut v = p.start;
        for (i, g) in p.elements.iter().enumerate() {
            if !self.group(v).contains(g) {
                return bad(format!("element {i} does not lie in `{}`", self.vertices()[v].name));
            }
            if let Some(&l) = p.edges.get(i) {
                if l.edge >= self.edges().len() || self.source(l) != v {
                    return bad(format!("edge letter {i} does not leave `{}`", self.vertices()[v].name));
                }
                v = self.target(l);
            }
        }
        Ok(())
    }

    /// Concatenation without reduction. Panics if the endpoints differ.
    pub fn concat(&self, p: &PathWord, q: &PathWord) -> PathWord {
        assert_eq!(self.end_vertex(p), q.start, "paths do not compose");
        let v = q.start;
        let mut elements = p.elements[..p.elements.len() - 1].to_vec();
        elements.push(self.group(v).mul(p.elements.last().expect("nonempty"), &q.elements[0]));
        elements.extend_from_slice(&q.elements[1..]);
        let mut edges = p.edges.clone();
        edges.extend_from_slice(&q.edges);
        PathWord { start: p.start, elements, edges }
    }

    /// Reduced product.
    pub fn multiply(&self, p: &PathWord, q: &PathWord) -> Result<PathWord, GogError> {
        if self.end_vertex(p) != q.start {
            return Err(GogError::MalformedPath("paths do not compose".into()));
        }
        Ok(self.normal_form(&self.concat(p, q)))
    }

    pub fn inverse(&self, p: &PathWord) -> PathWord {
        let mut elements: Vec<Element> = p.elements.iter().rev().cloned().collect();
        let mut v = self.end_vertex(p);
        let n = elements.len();
        for (i, g) in elements.iter_mut().enumerate() {
            *g = self.group(v).inv(g);
            if i + 1 < n {
                v = self.source(p.edges[p.edges.len() - 1 - i]);
            }
        }
        let edges = p.edges.iter().rev().map(|l| l.inverse()).collect();
        PathWord { start: self.end_vertex(p), elements, edges }
    }

    /// Removes every pinch `l · exit(l)^k · l⁻¹ → entry(l)^k`.
    pub fn normal_form(&self, p: &PathWord) -> PathWord {
        let mut elements = vec![p.elements[0].clone()];
        let mut edges: Vec<EdgeLetter> = Vec::with_capacity(p.edges.len());
        for (i, &l) in p.edges.iter().enumerate() {
            let next = &p.elements[i + 1];
            if let Some(&t) = edges.last() {
                if t == l.inverse() {
                    let mid = self.target(t);
                    let top = elements.last().expect("nonempty");
                    if let Some(k) = self.group(mid).power_of(top, self.exit(t)) {
                        elements.pop();
                        edges.pop();
                        let v = self.source(t);
                        let g = self.group(v);
                        let prev = elements.pop().expect("nonempty");
                        let merged = g.mul(&g.mul(&prev, &g.pow(self.entry(t), &k)), next);
                        elements.push(merged);
                        continue;
                    }
                }
            }
            edges.push(l);
            elements.push(next.clone());
        }
        PathWord { start: p.start, elements, edges }
    }

    /// Unique normal form: a reduced path whose non-final elements are
    /// canonical right-coset representatives of the outgoing edge groups.
    pub fn canonical_form(&self, p: &PathWord) -> PathWord {
        let mut q = self.normal_form(p);
        for i in 0..q.edges.len() {
            let l = q.edges[i];
            let v = self.source(l);
            let (rep, k) = self.group(v).coset_rep(&q.elements[i], self.entry(l));
            q.elements[i] = rep;
            if !k.is_zero() {
                let w = self.target(l);
                let g = self.group(w);
                q.elements[i + 1] = g.mul(&g.pow(self.exit(l), &k), &q.elements[i + 1]);
            }
        }
        q
    }

    pub fn is_identity(&self, p: &PathWord) -> bool {
        let q = self.normal_form(p);
        q.edges.is_empty() && self.group(q.start).is_identity(&q.elements[0])
    }

    /// Equality of two paths with the same endpoints.
    pub fn paths_equal(&self, p: &PathWord, q: &PathWord) -> bool {
        p.start == q.start
            && self.end_vertex(p) == self.end_vertex(q)
            && self.is_identity(&self.concat(p, &self.inverse(q)))
    }

    /// `x · p · x⁻¹`, reduced.
    pub fn conjugate_path(&self, p: &PathWord, x: &PathWord) -> PathWord {
        self.normal_form(&self.concat(&self.concat(x, p), &self.inverse(x)))
    }

    /// The path along tree edges from the base to `v`.
    pub fn tree_path(&self, v: usize) -> PathWord {
        let mut letters = Vec::new();
        let mut cur = v;
        while let Some(l) = self.tree_parent(cur) {
            letters.push(l);
            cur = self.source(l);
        }
        letters.reverse();
        let mut elements = vec![self.group(self.base()).identity()];
        for &l in &letters {
            elements.push(self.group(self.target(l)).identity());
        }
        PathWord { start: self.base(), elements, edges: letters }
    }

    /// `tree_path(v) · g · tree_path(v)⁻¹`.
    pub fn vertex_loop(&self, v: usize, g: Element) -> Result<PathWord, GogError> {
        let t = self.tree_path(v);
        let core = self.path_element(v, g)?;
        Ok(self.normal_form(&self.concat(&self.concat(&t, &core), &self.inverse(&t))))
    }

    /// `tree_path(source) · l · tree_path(target)⁻¹`.
    pub fn letter_loop(&self, l: EdgeLetter) -> PathWord {
        let a = self.tree_path(self.source(l));
        let b = self.tree_path(self.target(l));
        self.normal_form(&self.concat(&self.concat(&a, &self.path_letter(l)), &self.inverse(&b)))
    }

    /// Human-readable rendering: elements and edge letters separated by
    /// dots, e.g. `x · e · 1 · e^-1 · y`.
    pub fn render_path(&self, p: &PathWord) -> String {
        let mut s = String::new();
        let mut v = p.start;
        for (i, g) in p.elements.iter().enumerate() {
            if i > 0 {
                s.push_str(" . ");
            }
            s.push_str(&self.group(v).render(g));
            if let Some(&l) = p.edges.get(i) {
                s.push_str(" . ");
                s.push_str(&self.edges()[l.edge].name);
                if !l.forward {
                    s.push_str("^-1");
                }
                v = self.target(l);
            }
        }
        s
    }

    pub(crate) fn power_path(&self, p: &PathWord, k: &Exponent) -> Result<PathWord, GogError> {
        let n = k
            .magnitude_usize()
            .filter(|&n| n.saturating_mul(p.edges.len().max(1)) <= 1 << 24)
            .ok_or_else(|| GogError::Unsupported(format!("path power {k} too large")))?;
        let base = if k.is_negative() { self.inverse(p) } else { p.clone() };
        let mut acc = self.path_identity(p.start);
        for _ in 0..n {
            acc = self.concat(&acc, &base);
        }
        Ok(self.normal_form(&acc))
    }
}

impl fmt::Display for EdgeLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}{}", self.edge, if self.forward { "" } else { "^-1" })
    }
}
