use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::words::{
    are_conjugate, cyclic_canonical, min_coset_rep, primitive_root, same_alphabet, Alphabet,
    CyclicWord, Exponent, Word,
};

/// A vertex group. Abelian groups carry an alphabet purely to name their
/// basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexGroup {
    Free(Arc<Alphabet>),
    Abelian(Arc<Alphabet>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Free(Word),
    Abelian(Vec<Exponent>),
}

/// Conjugacy-class key inside a single vertex group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClassKey {
    Free(CyclicWord),
    Abelian(Vec<Exponent>),
}

impl Element {
    pub fn as_word(&self) -> Option<&Word> {
        match self {
            Element::Free(w) => Some(w),
            Element::Abelian(_) => None,
        }
    }
}

impl VertexGroup {
    pub fn names(&self) -> &Arc<Alphabet> {
        match self {
            VertexGroup::Free(a) | VertexGroup::Abelian(a) => a,
        }
    }

    pub fn rank(&self) -> usize {
        self.names().rank()
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self, VertexGroup::Abelian(_))
    }

    pub fn identity(&self) -> Element {
        match self {
            VertexGroup::Free(a) => Element::Free(Word::identity(a)),
            VertexGroup::Abelian(a) => Element::Abelian(vec![Exponent::ZERO; a.rank()]),
        }
    }

    pub fn generator(&self, i: usize) -> Element {
        match self {
            VertexGroup::Free(a) => Element::Free(Word::generator(a, i)),
            VertexGroup::Abelian(a) => {
                let mut v = vec![Exponent::ZERO; a.rank()];
                v[i] = Exponent::ONE;
                Element::Abelian(v)
            }
        }
    }

    pub fn contains(&self, g: &Element) -> bool {
        match (self, g) {
            (VertexGroup::Free(a), Element::Free(w)) => same_alphabet(a, w.alphabet()),
            (VertexGroup::Abelian(a), Element::Abelian(v)) => v.len() == a.rank(),
            _ => false,
        }
    }

    pub fn is_identity(&self, g: &Element) -> bool {
        match g {
            Element::Free(w) => w.is_identity(),
            Element::Abelian(v) => v.iter().all(Exponent::is_zero),
        }
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match (a, b) {
            (Element::Free(x), Element::Free(y)) => Element::Free(x * y),
            (Element::Abelian(x), Element::Abelian(y)) => {
                Element::Abelian(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            _ => panic!("mixed vertex-group elements"),
        }
    }

    pub fn inv(&self, a: &Element) -> Element {
        match a {
            Element::Free(x) => Element::Free(x.inverse()),
            Element::Abelian(x) => Element::Abelian(x.iter().map(|p| -p).collect()),
        }
    }

    pub fn pow(&self, a: &Element, k: &Exponent) -> Element {
        match a {
            Element::Free(x) => Element::Free(x.pow(k).expect("power of an attaching element")),
            Element::Abelian(x) => Element::Abelian(x.iter().map(|p| p * k).collect()),
        }
    }

    /// `k` with `g = c^k`, if any. For trivial `c` only the identity
    /// qualifies (`k = 0`).
    pub fn power_of(&self, g: &Element, c: &Element) -> Option<Exponent> {
        if self.is_identity(g) {
            return Some(Exponent::ZERO);
        }
        if self.is_identity(c) {
            return None;
        }
        match (g, c) {
            (Element::Free(g), Element::Free(c)) => {
                let (rc, mc) = primitive_root(c);
                let (rg, mg) = primitive_root(g);
                let j = if rg == rc {
                    mg
                } else if rg == rc.inverse() {
                    -&mg
                } else {
                    return None;
                };
                j.checked_exact_div(&mc)
            }
            (Element::Abelian(g), Element::Abelian(c)) => {
                let i = c.iter().position(|x| !x.is_zero())?;
                let k = g[i].checked_exact_div(&c[i])?;
                g.iter().zip(c).all(|(gi, ci)| *gi == ci * &k).then_some(k)
            }
            _ => None,
        }
    }

    pub fn class_key(&self, g: &Element) -> ClassKey {
        match g {
            Element::Free(w) => ClassKey::Free(cyclic_canonical(w).0),
            Element::Abelian(v) => ClassKey::Abelian(v.clone()),
        }
    }

    /// `z` with `z · b · z⁻¹ = a`, if `a` and `b` are conjugate.
    pub fn conjugator(&self, a: &Element, b: &Element) -> Option<Element> {
        match (a, b) {
            (Element::Free(x), Element::Free(y)) => {
                are_conjugate(x, y, false).ok().flatten().map(|c| Element::Free(c.conjugator))
            }
            (Element::Abelian(x), Element::Abelian(y)) => (x == y).then(|| self.identity()),
            _ => None,
        }
    }

    /// For nontrivial `h`: `(k, y)` with `k ≠ 0` and `h = y · c^k · y⁻¹`.
    pub fn conjugate_to_power(&self, h: &Element, c: &Element) -> Option<(Exponent, Element)> {
        if self.is_identity(h) || self.is_identity(c) {
            return None;
        }
        match (h, c) {
            (Element::Free(hw), Element::Free(cw)) => {
                let (rh, mh) = primitive_root(hw);
                let (rc, mc) = primitive_root(cw);
                let kh = cyclic_canonical(&rh).0;
                let sign = if kh == cyclic_canonical(&rc).0 {
                    1
                } else if kh == cyclic_canonical(&rc.inverse()).0 {
                    -1
                } else {
                    return None;
                };
                let k = mh.checked_exact_div(&mc)?;
                let k = if sign < 0 { -k } else { k };
                let target = cw.pow(&k).ok()?;
                let cert = are_conjugate(hw, &target, false).ok().flatten()?;
                Some((k, Element::Free(cert.conjugator)))
            }
            (Element::Abelian(_), Element::Abelian(_)) => {
                self.power_of(h, c).map(|k| (k, self.identity()))
            }
            _ => None,
        }
    }

    /// Canonical representative of the right coset `g⟨c⟩` as `(rep, k)`
    /// with `g = rep · c^k`.
    pub fn coset_rep(&self, g: &Element, c: &Element) -> (Element, Exponent) {
        if self.is_identity(c) {
            return (g.clone(), Exponent::ZERO);
        }
        match (g, c) {
            (Element::Free(gw), Element::Free(cw)) => {
                let (rep, k) = min_coset_rep(gw, cw);
                (Element::Free(rep), k)
            }
            (Element::Abelian(gv), Element::Abelian(cv)) => {
                let i = cv.iter().position(|x| !x.is_zero()).expect("nontrivial");
                let (k, _) = gv[i].div_rem_euclid(&cv[i]);
                let rep = gv.iter().zip(cv).map(|(a, b)| a - &(b * &k)).collect();
                (Element::Abelian(rep), k)
            }
            _ => panic!("mixed vertex-group elements"),
        }
    }

    /// Word length, or the ℓ¹ norm for abelian elements.
    pub fn size(&self, g: &Element) -> usize {
        match g {
            Element::Free(w) => w.len(),
            Element::Abelian(v) => v.iter().fold(0usize, |acc, x| acc.saturating_add(x.magnitude_saturating())),
        }
    }

    /// Cyclic length (conjugation invariant) used to bound searches.
    pub fn cyclic_size(&self, g: &Element) -> usize {
        match g {
            Element::Free(w) => cyclic_canonical(w).0.len(),
            Element::Abelian(_) => self.size(g),
        }
    }

    /// Rank of the subgroup generated by abelian vectors (over ℚ).
    pub fn vector_rank(vectors: &[Vec<Exponent>]) -> usize {
        let mut rows: Vec<Vec<BigInt>> =
            vectors.iter().map(|v| v.iter().map(Exponent::to_big).collect()).collect();
        let cols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..cols {
            let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for c in 0..cols {
                    row[c] = &row[c] * &pivot[col] - &pivot[c] * &f;
                }
                let g = row.iter().fold(BigInt::zero(), |a, b| num_integer::Integer::gcd(&a, b));
                if !g.is_zero() {
                    for x in row.iter_mut() {
                        *x = &*x / &g;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Renders an element in word syntax (abelian elements as `a^2 b^-1`).
    pub fn render(&self, g: &Element) -> String {
        match g {
            Element::Free(w) => w.to_string(),
            Element::Abelian(v) => {
                let names = self.names();
                let w = Word::from_syllables(names, v.iter().cloned().enumerate());
                w.to_string()
            }
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Free(w) => write!(f, "{w}"),
            Element::Abelian(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}
