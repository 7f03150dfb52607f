//! Freely reduced words over named alphabets.

mod cyclic;
mod exponent;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

pub use cyclic::{
    are_conjugate, cyclic_canonical, cyclic_canonical_by_runs, cyclic_reduce, least_rotation, min_coset_rep,
    primitive_root, ConjugacyCertificate, CyclicWord,
};
pub use exponent::Exponent;

/// Words whose flattened length exceeds this are never materialised letter
/// by letter.
pub const FLATTEN_LIMIT: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("alphabet mismatch: `{left}` vs `{right}`")]
    AlphabetMismatch { left: String, right: String },
    #[error("invalid alphabet `{0}`: {1}")]
    InvalidAlphabet(String, String),
    #[error("unknown generator `{name}` in alphabet `{alphabet}`")]
    UnknownGenerator { alphabet: String, name: String },
    #[error("word too large to expand ({0} letters)")]
    TooLarge(String),
}

/// An ordered, named set of free generators.
#[derive(Debug)]
pub struct Alphabet {
    name: String,
    generators: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        generators: impl IntoIterator<Item = S>,
    ) -> Result<Arc<Alphabet>, WordError> {
        let name = name.into();
        let generators: Vec<String> = generators.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if g.is_empty() {
                return Err(WordError::InvalidAlphabet(name, "empty generator name".into()));
            }
            if index.insert(g.clone(), i).is_some() {
                return Err(WordError::InvalidAlphabet(name, format!("duplicate generator `{g}`")));
            }
        }
        Ok(Arc::new(Alphabet { name, generators, index }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn index_of(&self, generator: &str) -> Option<usize> {
        self.index.get(generator).copied()
    }

    pub fn generator_name(&self, i: usize) -> &str {
        &self.generators[i]
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.generators == other.generators
    }
}

impl Eq for Alphabet {}

pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A generator or its inverse. Letters are ordered `a < a⁻¹ < b < b⁻¹ < …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        Letter((generator as u32) << 1 | inverse as u32)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn code(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub generator: usize,
    pub exponent: Exponent,
}

impl Syllable {
    pub fn letter(&self) -> Letter {
        Letter::new(self.generator, self.exponent.is_negative())
    }
}

/// A freely reduced word, stored as syllables `g^k` with adjacent
/// generators distinct and every exponent nonzero.
#[derive(Clone)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    syllables: Vec<Syllable>,
}

pub(crate) fn push_syllable(stack: &mut Vec<Syllable>, generator: usize, exponent: Exponent) {
    if exponent.is_zero() {
        return;
    }
    if let Some(top) = stack.last_mut() {
        if top.generator == generator {
            let sum = &top.exponent + &exponent;
            if sum.is_zero() {
                stack.pop();
            } else {
                top.exponent = sum;
            }
            return;
        }
    }
    stack.push(Syllable { generator, exponent });
}

impl Word {
    pub fn identity(alphabet: &Arc<Alphabet>) -> Word {
        Word { alphabet: alphabet.clone(), syllables: Vec::new() }
    }

    pub fn generator(alphabet: &Arc<Alphabet>, i: usize) -> Word {
        assert!(i < alphabet.rank(), "generator index out of range");
        Word {
            alphabet: alphabet.clone(),
            syllables: vec![Syllable { generator: i, exponent: Exponent::ONE }],
        }
    }

    /// Looks a generator up by name.
    pub fn named(alphabet: &Arc<Alphabet>, name: &str) -> Result<Word, WordError> {
        let i = alphabet.index_of(name).ok_or_else(|| WordError::UnknownGenerator {
            alphabet: alphabet.name().to_string(),
            name: name.to_string(),
        })?;
        Ok(Word::generator(alphabet, i))
    }

    /// Builds a word from arbitrary (possibly unreduced) syllables.
    pub fn from_syllables(
        alphabet: &Arc<Alphabet>,
        syllables: impl IntoIterator<Item = (usize, Exponent)>,
    ) -> Word {
        let mut stack = Vec::new();
        for (g, e) in syllables {
            assert!(g < alphabet.rank(), "generator index out of range");
            push_syllable(&mut stack, g, e);
        }
        Word { alphabet: alphabet.clone(), syllables: stack }
    }

    pub fn from_letters(alphabet: &Arc<Alphabet>, letters: &[Letter]) -> Word {
        Word::from_syllables(
            alphabet,
            letters.iter().map(|l| (l.generator(), Exponent::from(if l.is_inverse() { -1 } else { 1 }))),
        )
    }

    pub(crate) fn from_reduced(alphabet: Arc<Alphabet>, syllables: Vec<Syllable>) -> Word {
        debug_assert!(syllables.windows(2).all(|w| w[0].generator != w[1].generator));
        debug_assert!(syllables.iter().all(|s| !s.exponent.is_zero()));
        Word { alphabet, syllables }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Letter length.
    pub fn length(&self) -> Exponent {
        self.syllables.iter().fold(Exponent::ZERO, |acc, s| &acc + &s.exponent.abs())
    }

    /// Letter length, saturating at `usize::MAX`.
    pub fn len(&self) -> usize {
        self.syllables
            .iter()
            .fold(0usize, |acc, s| acc.saturating_add(s.exponent.magnitude_saturating()))
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Flattened letters. Panics above [`FLATTEN_LIMIT`].
    pub fn letters(&self) -> Vec<Letter> {
        let n = self.len();
        assert!(n <= FLATTEN_LIMIT, "word of length {} is too long to flatten", self.length());
        let mut out = Vec::with_capacity(n);
        for s in &self.syllables {
            let l = s.letter();
            out.extend(std::iter::repeat_n(l, s.exponent.magnitude_saturating()));
        }
        out
    }

    fn check(&self, other: &Word) -> Result<(), WordError> {
        if same_alphabet(&self.alphabet, &other.alphabet) {
            Ok(())
        } else {
            Err(WordError::AlphabetMismatch {
                left: self.alphabet.name().to_string(),
                right: other.alphabet.name().to_string(),
            })
        }
    }

    pub fn try_mul(&self, other: &Word) -> Result<Word, WordError> {
        self.check(other)?;
        let mut stack = self.syllables.clone();
        let mut rest = other.syllables.iter();
        // Cancellation only continues while whole syllables annihilate.
        for s in rest.by_ref() {
            let before = stack.len();
            push_syllable(&mut stack, s.generator, s.exponent.clone());
            if stack.len() + 1 != before {
                break;
            }
        }
        stack.extend(rest.cloned());
        Ok(Word { alphabet: self.alphabet.clone(), syllables: stack })
    }

    pub fn inverse(&self) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable { generator: s.generator, exponent: -&s.exponent })
                .collect(),
        }
    }

    /// `self^k`. Only single-syllable cores are raised symbolically, so other
    /// words fail with [`WordError::TooLarge`] when the result would not fit.
    pub fn pow(&self, k: &Exponent) -> Result<Word, WordError> {
        if k.is_zero() || self.is_identity() {
            return Ok(Word::identity(&self.alphabet));
        }
        let base = if k.is_negative() { self.inverse() } else { self.clone() };
        let k = k.abs();
        let (conj, core) = cyclic_reduce(&base);
        let powered = if core.syllables.len() == 1 {
            let s = &core.syllables[0];
            Word::from_reduced(
                self.alphabet.clone(),
                vec![Syllable { generator: s.generator, exponent: &s.exponent * &k }],
            )
        } else {
            let reps = k
                .magnitude_usize()
                .filter(|r| r.saturating_mul(core.syllables.len()) <= FLATTEN_LIMIT)
                .ok_or_else(|| WordError::TooLarge(format!("{} * {}", core.length(), k)))?;
            let mut stack = Vec::with_capacity(reps * core.syllables.len());
            for _ in 0..reps {
                for s in &core.syllables {
                    push_syllable(&mut stack, s.generator, s.exponent.clone());
                }
            }
            Word::from_reduced(self.alphabet.clone(), stack)
        };
        Ok(conj.mul_unchecked(&powered).mul_unchecked(&conj.inverse()))
    }

    /// `self^k` for machine-sized `k`. Panics if the result cannot be built.
    pub fn powi(&self, k: i64) -> Word {
        self.pow(&Exponent::from(k)).expect("power too large")
    }

    pub(crate) fn mul_unchecked(&self, other: &Word) -> Word {
        self.try_mul(other).expect("alphabet mismatch")
    }

    /// `x · self · x⁻¹`.
    pub fn conjugate_by(&self, x: &Word) -> Result<Word, WordError> {
        x.try_mul(self)?.try_mul(&x.inverse())
    }

    pub fn commutes_with(&self, other: &Word) -> Result<bool, WordError> {
        Ok(self.try_mul(other)? == other.try_mul(self)?)
    }

    /// The prefix consisting of the first `n` letters (`0 ≤ n ≤ length`).
    pub fn prefix(&self, n: &Exponent) -> Word {
        let mut remaining = n.clone();
        let mut out = Vec::new();
        for s in &self.syllables {
            if !remaining.is_positive() {
                break;
            }
            let m = s.exponent.abs();
            if m <= remaining {
                out.push(s.clone());
                remaining = &remaining - &m;
            } else {
                let e = if s.exponent.is_negative() { -&remaining } else { remaining.clone() };
                out.push(Syllable { generator: s.generator, exponent: e });
                remaining = Exponent::ZERO;
            }
        }
        Word::from_reduced(self.alphabet.clone(), out)
    }

    /// Re-expresses the word over another alphabet by generator name.
    pub fn rename_into(&self, target: &Arc<Alphabet>) -> Result<Word, WordError> {
        if same_alphabet(&self.alphabet, target) {
            return Ok(self.clone());
        }
        let map = self
            .alphabet
            .generators()
            .iter()
            .map(|g| target.index_of(g))
            .collect::<Vec<_>>();
        let mut syl = Vec::with_capacity(self.syllables.len());
        for s in &self.syllables {
            let g = map[s.generator].ok_or_else(|| WordError::UnknownGenerator {
                alphabet: target.name().to_string(),
                name: self.alphabet.generator_name(s.generator).to_string(),
            })?;
            syl.push((g, s.exponent.clone()));
        }
        Ok(Word::from_syllables(target, syl))
    }

    /// Run-length view: `(letter code, count)` pairs.
    pub(crate) fn runs(&self) -> impl Iterator<Item = (u32, Exponent)> + '_ {
        self.syllables.iter().map(|s| (s.letter().code(), s.exponent.abs()))
    }
}

/// Lexicographic comparison of two run-length letter streams.
pub(crate) fn cmp_runs(
    mut a: impl Iterator<Item = (u32, Exponent)>,
    mut b: impl Iterator<Item = (u32, Exponent)>,
) -> Ordering {
    let mut x = a.next();
    let mut y = b.next();
    loop {
        match (x.take(), y.take()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some((ca, na)), Some((cb, nb))) => {
                if ca != cb {
                    return ca.cmp(&cb);
                }
                match na.cmp(&nb) {
                    Ordering::Equal => {
                        x = a.next();
                        y = b.next();
                    }
                    Ordering::Less => {
                        x = a.next();
                        y = Some((cb, &nb - &na));
                    }
                    Ordering::Greater => {
                        x = Some((ca, &na - &nb));
                        y = b.next();
                    }
                }
            }
        }
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.syllables == other.syllables && same_alphabet(&self.alphabet, &other.alphabet)
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.syllables.hash(state);
    }
}

/// Shortlex order: length first, then letters under `a < a⁻¹ < b < …`.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.length()
            .cmp(&other.length())
            .then_with(|| cmp_runs(self.runs(), other.runs()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Mul<&Word> for &Word {
    type Output = Word;
    /// Panics on alphabet mismatch; use [`Word::try_mul`] to handle it.
    fn mul(self, rhs: &Word) -> Word {
        self.mul_unchecked(rhs)
    }
}

/// Renders in the word-expression syntax: `x y^-1 z^3`, identity as `1`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.alphabet.generator_name(s.generator))?;
            if s.exponent != Exponent::ONE {
                write!(f, "^{}", s.exponent)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({}: {})", self.alphabet.name(), self)
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `a b a⁻¹ b⁻¹`.
pub fn commutator(a: &Word, b: &Word) -> Result<Word, WordError> {
    a.try_mul(b)?.try_mul(&a.inverse())?.try_mul(&b.inverse())
}

/// Signed letter count per generator.
pub fn exponent_vector(a: &Word) -> Vec<Exponent> {
    let mut v = vec![Exponent::ZERO; a.alphabet.rank()];
    for s in &a.syllables {
        v[s.generator] = &v[s.generator] + &s.exponent;
    }
    v
}

pub fn in_commutator_subgroup(a: &Word) -> bool {
    exponent_vector(a).iter().all(Exponent::is_zero)
}

/// Whether `h` equals `∏ [xᵢ, yᵢ]` as reduced words.
pub fn verify_genus_expression(h: &Word, pairs: &[(Word, Word)]) -> bool {
    let mut acc = Word::identity(h.alphabet());
    for (x, y) in pairs {
        match commutator(x, y).and_then(|c| acc.try_mul(&c)) {
            Ok(p) => acc = p,
            Err(_) => return false,
        }
    }
    acc == *h
}

/// A uniformly random reduced word of exactly `len` letters.
pub fn random_word<R: Rng + ?Sized>(alphabet: &Arc<Alphabet>, len: usize, rng: &mut R) -> Word {
    let k = 2 * alphabet.rank() as u32;
    assert!(k > 0 || len == 0, "cannot draw letters from an empty alphabet");
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter(rng.random_range(0..k));
        if letters.last().is_some_and(|p| p.inverse() == l) {
            continue;
        }
        letters.push(l);
    }
    Word::from_letters(alphabet, &letters)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<Alphabet> {
        Alphabet::new("F", ["x", "y"]).unwrap()
    }

    fn w(a: &Arc<Alphabet>, spec: &[(usize, i64)]) -> Word {
        Word::from_syllables(a, spec.iter().map(|&(g, e)| (g, Exponent::from(e))))
    }

    #[test]
    fn multiply_examples() {
        let a = f2();
        let x = Word::generator(&a, 0);
        assert!((&x * &x.inverse()).is_identity());
        let xy = w(&a, &[(0, 1), (1, 1)]);
        let yix = w(&a, &[(1, -1), (0, 1)]);
        assert_eq!(&xy * &yix, w(&a, &[(0, 2)]));
        let f3 = Alphabet::new("F3", ["a", "b", "c"]).unwrap();
        let abc = w(&f3, &[(0, 1), (1, 1), (2, 1)]);
        assert!((&abc * &abc.inverse()).is_identity());
    }

    #[test]
    fn cancellation_cascades() {
        let a = f2();
        let left = w(&a, &[(0, 2), (1, 3), (0, 1)]);
        let right = w(&a, &[(0, -1), (1, -3), (0, 1), (1, 1)]);
        assert_eq!(&left * &right, w(&a, &[(0, 3), (1, 1)]));
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = f2();
        let b = Alphabet::new("G", ["x", "y"]).unwrap();
        assert!(Word::generator(&a, 0).try_mul(&Word::generator(&b, 0)).is_err());
        let same = Alphabet::new("F", ["x", "y"]).unwrap();
        assert!(Word::generator(&a, 0).try_mul(&Word::generator(&same, 0)).is_ok());
    }

    #[test]
    fn invert_examples() {
        let a = f2();
        assert_eq!(w(&a, &[(0, 1), (1, 1)]).inverse(), w(&a, &[(1, -1), (0, -1)]));
        assert!(Word::identity(&a).inverse().is_identity());
        assert_eq!(w(&a, &[(0, 3)]).inverse(), w(&a, &[(0, -3)]));
    }

    #[test]
    fn exponent_vectors() {
        let a = f2();
        let x = Word::generator(&a, 0);
        let y = Word::generator(&a, 1);
        let c = commutator(&x, &y).unwrap();
        assert_eq!(exponent_vector(&c), vec![Exponent::ZERO, Exponent::ZERO]);
        assert!(in_commutator_subgroup(&c));
        assert_eq!(exponent_vector(&x), vec![Exponent::ONE, Exponent::ZERO]);
        assert!(!in_commutator_subgroup(&x));
    }

    #[test]
    fn genus_expressions() {
        let f = Alphabet::new("F", ["a", "b"]).unwrap();
        let a = Word::generator(&f, 0);
        let b = Word::generator(&f, 1);
        let h = commutator(&a, &b).unwrap();
        assert!(verify_genus_expression(&h, &[(a.clone(), b.clone())]));
        assert!(!verify_genus_expression(&a, &[(a.clone(), b.clone())]));
        let b2 = b.powi(2);
        let ai = a.inverse();
        let h2 = &h * &commutator(&b2, &ai).unwrap();
        assert!(verify_genus_expression(&h2, &[(a, b), (b2, ai)]));
    }

    #[test]
    fn huge_powers_stay_symbolic() {
        let a = f2();
        let e: Exponent = "1000000000000000000000000000000".parse().unwrap();
        let x = Word::generator(&a, 0);
        let y = Word::generator(&a, 1);
        let big = x.conjugate_by(&y).unwrap().pow(&e).unwrap();
        assert_eq!(big.syllables().len(), 3);
        assert_eq!(big.syllables()[1].exponent, e);
        assert!(w(&a, &[(0, 1), (1, 1)]).pow(&e).is_err());
    }

    #[test]
    fn prefix_splits_syllables() {
        let a = f2();
        let word = w(&a, &[(0, 3), (1, -2)]);
        assert_eq!(word.prefix(&Exponent::from(4)), w(&a, &[(0, 3), (1, -1)]));
        assert_eq!(word.prefix(&Exponent::ZERO), Word::identity(&a));
    }

    #[test]
    fn display() {
        let a = f2();
        assert_eq!(w(&a, &[(0, 1), (1, -1), (0, 3)]).to_string(), "x y^-1 x^3");
        assert_eq!(Word::identity(&a).to_string(), "1");
    }

    #[test]
    fn shortlex() {
        let a = f2();
        let x = Word::generator(&a, 0);
        let y = Word::generator(&a, 1);
        assert!(x < x.inverse());
        assert!(x.inverse() < y);
        assert!(y.inverse() < &x * &x);
    }
}
