use std::collections::{HashSet, VecDeque};

use super::{ClassKey, EdgeLetter, Element, GogError, GraphOfGroups, PathWord};
use crate::words::Exponent;

/// Whether a loop fixes a vertex of the Bass–Serre tree, and its cyclically
/// reduced shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Elliptic { vertex: usize, element: Element },
    /// `e₁ g₁ e₂ g₂ … eₙ gₙ` read cyclically.
    Hyperbolic { edges: Vec<EdgeLetter>, elements: Vec<Element> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GogConjugacyResult {
    pub conjugate: bool,
    /// Set when `left` is conjugate to the inverse of `right` only.
    pub inverse: bool,
    /// Loop `X` at the base with `X · right^± · X⁻¹ = left`.
    pub certificate: Option<PathWord>,
    pub left: Classification,
    pub right: Classification,
}

const STATE_CAP: usize = 50_000;

impl GraphOfGroups {
    /// Returns `(cur, conj)` with `p = conj · cur · conj⁻¹`, where `cur` is
    /// a cyclically reduced loop starting with the identity element.
    pub fn cyclic_reduction(&self, p: &PathWord) -> (PathWord, PathWord) {
        let mut cur = self.normal_form(p);
        let mut conj = self.path_identity(p.start);
        loop {
            if cur.edges.is_empty() {
                return (cur, conj);
            }
            let v = cur.start;
            let g0 = cur.elements[0].clone();
            if !self.group(v).is_identity(&g0) {
                let x = self.path_element(v, g0).expect("element of the start vertex");
                cur = self.normal_form(&self.concat(&self.concat(&self.inverse(&x), &cur), &x));
                conj = self.concat(&conj, &x);
            }
            let n = cur.edges.len();
            let first = cur.edges[0];
            let last = cur.edges[n - 1];
            let h = &cur.elements[n];
            if n >= 2 && last == first.inverse() && self.group(v).power_of(h, self.exit(last)).is_some() {
                let x = self.path_letter(first);
                cur = self.normal_form(&self.concat(&self.concat(&self.inverse(&x), &cur), &x));
                conj = self.normal_form(&self.concat(&conj, &x));
                continue;
            }
            return (cur, conj);
        }
    }

    pub fn classify(&self, p: &PathWord) -> Classification {
        let (cur, _) = self.cyclic_reduction(p);
        if cur.edges.is_empty() {
            Classification::Elliptic { vertex: cur.start, element: cur.elements[0].clone() }
        } else {
            Classification::Hyperbolic { edges: cur.edges.clone(), elements: cur.elements[1..].to_vec() }
        }
    }

    /// Decides conjugacy of two loops at the base vertex. With
    /// `allow_inverse`, `right⁻¹` is tried when `right` fails.
    ///
    /// Hyperbolic pairs are compared by scanning edge-group conjugators up
    /// to a length bound, which is complete for acylindrical splittings.
    pub fn are_conjugate(
        &self,
        left: &PathWord,
        right: &PathWord,
        allow_inverse: bool,
    ) -> Result<GogConjugacyResult, GogError> {
        for p in [left, right] {
            self.check_path(p)?;
            if !self.is_loop_at_base(p) {
                return Err(GogError::MalformedPath("not a loop at the base vertex".into()));
            }
        }
        let (pc, pconj) = self.cyclic_reduction(left);
        let (qc, qconj) = self.cyclic_reduction(right);
        let mut result = GogConjugacyResult {
            conjugate: false,
            inverse: false,
            certificate: None,
            left: self.classify(left),
            right: self.classify(right),
        };
        let mut tries = vec![(false, qc, qconj)];
        if allow_inverse {
            let inv = self.inverse(right);
            let (ic, iconj) = self.cyclic_reduction(&inv);
            tries.push((true, ic, iconj));
        }
        let mut budget_error = None;
        for (inverse, qc, qconj) in tries {
            let found = match self.reduced_conjugator(&pc, &qc) {
                Ok(f) => f,
                Err(e @ GogError::SearchBudget(_)) => {
                    budget_error = Some(e);
                    continue;
                }
                Err(e) => return Err(e),
            };
            if let Some(z) = found {
                // left = pconj·pc·pconj⁻¹, pc = z·qc·z⁻¹, qc = qconj⁻¹·right^±·qconj.
                let x = self.normal_form(&self.concat(&self.concat(&pconj, &z), &self.inverse(&qconj)));
                let target = if inverse { self.inverse(right) } else { right.clone() };
                if !self.paths_equal(&self.conjugate_path(&target, &x), left) {
                    return Err(GogError::Unsupported("conjugator failed verification".into()));
                }
                result.conjugate = true;
                result.inverse = inverse;
                result.certificate = Some(x);
                return Ok(result);
            }
        }
        match budget_error {
            Some(e) => Err(e),
            None => Ok(result),
        }
    }

    /// `z` with `z · q · z⁻¹ = p` for cyclically reduced loops.
    fn reduced_conjugator(&self, p: &PathWord, q: &PathWord) -> Result<Option<PathWord>, GogError> {
        match (p.edges.is_empty(), q.edges.is_empty()) {
            (true, true) => self.elliptic_conjugator(p.start, &p.elements[0], q.start, &q.elements[0]),
            (false, false) => Ok(self.hyperbolic_conjugator(p, q)),
            _ => Ok(None),
        }
    }

    fn elliptic_conjugator(
        &self,
        va: usize,
        a: &Element,
        vb: usize,
        b: &Element,
    ) -> Result<Option<PathWord>, GogError> {
        let (ga, gb) = (self.group(va), self.group(vb));
        if ga.is_identity(a) || gb.is_identity(b) {
            return Ok((ga.is_identity(a) && gb.is_identity(b))
                .then(|| self.normal_form(&self.concat(&self.inverse(&self.tree_path(va)), &self.tree_path(vb)))));
        }
        // Sizes of reachable states stay within this bound in every
        // example we build; exceeding it is reported, never silently dropped.
        let attach_product = self
            .edges()
            .iter()
            .filter(|e| !e.trivial)
            .flat_map(|e| [self.group(e.from.vertex).size(&e.from.attach), self.group(e.to.vertex).size(&e.to.attach)])
            .fold(1usize, |acc, s| acc.saturating_mul(s.max(1)));
        let bound = ga.cyclic_size(a).max(gb.cyclic_size(b)).saturating_mul(attach_product);
        let target_key = gb.class_key(b);

        let mut seen: HashSet<(usize, ClassKey)> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((va, ga.class_key(a)));
        queue.push_back((va, a.clone(), self.path_identity(va)));
        let mut pruned = false;
        while let Some((u, h, path)) = queue.pop_front() {
            let g = self.group(u);
            if u == vb && g.class_key(&h) == target_key {
                let z = g.conjugator(&h, b).expect("equal class keys");
                let z = self.path_element(u, z)?;
                return Ok(Some(self.normal_form(&self.concat(&path, &z))));
            }
            for l in self.letters_at(u) {
                let Some((k, y)) = g.conjugate_to_power(&h, self.entry(l)) else { continue };
                let w = self.target(l);
                let next = self.group(w).pow(self.exit(l), &k);
                let key = (w, self.group(w).class_key(&next));
                if seen.contains(&key) {
                    continue;
                }
                if self.group(w).cyclic_size(&next) > bound || seen.len() >= STATE_CAP {
                    pruned = true;
                    continue;
                }
                seen.insert(key);
                let step = self.path(u, vec![y, self.group(w).identity()], vec![l])?;
                queue.push_back((w, next, self.concat(&path, &step)));
            }
        }
        if pruned {
            return Err(GogError::SearchBudget(format!(
                "elliptic search visited {} classes without resolving",
                seen.len()
            )));
        }
        Ok(None)
    }

    fn hyperbolic_conjugator(&self, p: &PathWord, q: &PathWord) -> Option<PathWord> {
        let n = p.edges.len();
        if q.edges.len() != n {
            return None;
        }
        let total: usize = p
            .elements
            .iter()
            .zip(std::iter::once(p.start).chain(p.edges.iter().map(|&l| self.target(l))))
            .chain(q.elements.iter().zip(std::iter::once(q.start).chain(q.edges.iter().map(|&l| self.target(l)))))
            .map(|(g, v)| self.group(v).size(g))
            .sum();
        let k_max = total as i64 + 2;
        let qinv = self.inverse(q);
        for r in 0..n {
            if (0..n).any(|i| p.edges[(r + i) % n] != q.edges[i]) {
                continue;
            }
            // R = e₁ g₁ … e_r g_r, so R⁻¹ p R is the rotation starting at e_{r+1}.
            let rot = PathWord {
                start: p.start,
                elements: p.elements[..=r].to_vec(),
                edges: p.edges[..r].to_vec(),
            };
            let rotated = self.normal_form(&self.concat(&self.concat(&self.inverse(&rot), p), &rot));
            let v = q.start;
            let c = self.entry(q.edges[0]).clone();
            let g = self.group(v);
            for step in 0..=2 * k_max {
                let k = if step % 2 == 1 { (step + 1) / 2 } else { -(step / 2) };
                let z = g.pow(&c, &Exponent::from(k));
                let zp = self.path_element(v, z).expect("edge element");
                let test = self.concat(&self.concat(&self.concat(&self.inverse(&zp), &rotated), &zp), &qinv);
                if self.is_identity(&test) {
                    return Some(self.normal_form(&self.concat(&rot, &zp)));
                }
            }
        }
        None
    }
}
