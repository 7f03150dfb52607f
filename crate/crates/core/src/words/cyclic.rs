use std::fmt;

use super::{cmp_runs, push_syllable, Exponent, Syllable, Word, WordError, FLATTEN_LIMIT};

/// Splits `a` as `conjugator · core · conjugator⁻¹` with `core` cyclically
/// reduced.
pub fn cyclic_reduce(a: &Word) -> (Word, Word) {
    let mut syl = a.syllables.clone();
    let mut lo = 0;
    let mut hi = syl.len();
    let mut conj = Vec::new();
    while hi - lo >= 2 {
        let (first, last) = (&syl[lo], &syl[hi - 1]);
        if first.generator != last.generator || first.exponent.signum() == last.exponent.signum() {
            break;
        }
        let g = first.generator;
        let m = first.exponent.abs().min(last.exponent.abs());
        let part = if first.exponent.is_negative() { -&m } else { m };
        push_syllable(&mut conj, g, part.clone());
        syl[lo].exponent = &syl[lo].exponent - &part;
        syl[hi - 1].exponent = &syl[hi - 1].exponent + &part;
        if syl[hi - 1].exponent.is_zero() {
            hi -= 1;
        }
        if syl[lo].exponent.is_zero() {
            lo += 1;
        }
    }
    let core = syl[lo..hi].to_vec();
    (
        Word::from_reduced(a.alphabet.clone(), conj),
        Word::from_reduced(a.alphabet.clone(), core),
    )
}

/// Index of the lexicographically least rotation (Booth's algorithm).
pub fn least_rotation(s: &[u32]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = s[j % n];
        let mut i = f[j - k - 1];
        while i != -1 && sj != s[(k + i as usize + 1) % n] {
            if sj < s[(k + i as usize + 1) % n] {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if i == -1 && sj != s[k % n] {
            if sj < s[k % n] {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    k % n
}

/// Conjugacy-class representative: the least rotation of a cyclically
/// reduced word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    word: Word,
}

impl CyclicWord {
    /// The canonical rotation as a linear word.
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn into_word(self) -> Word {
        self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_identity()
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.word)
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclicWord{}", self)
    }
}

/// Flat offset of the least rotation, found by comparing rotations that
/// start at run boundaries. The minimum always starts at the beginning of
/// a maximal run of the smallest letter, so no other start can win.
fn least_rotation_by_runs(core: &Word) -> Exponent {
    let syl = core.syllables();
    let merged = syl.first().map(|s| s.generator) == syl.last().map(|s| s.generator);
    // Cyclic runs with their flat start offsets.
    let mut runs: Vec<(u32, Exponent, Exponent)> = Vec::new();
    let mut offset = Exponent::ZERO;
    for (i, s) in syl.iter().enumerate() {
        let m = s.exponent.abs();
        if !(merged && i == 0) {
            runs.push((s.letter().code(), m.clone(), offset.clone()));
        }
        offset = &offset + &m;
    }
    if merged {
        let last = runs.last_mut().expect("at least two syllables");
        last.1 = &last.1 + &syl[0].exponent.abs();
        let back = runs.pop().expect("nonempty");
        runs.insert(0, back);
    }
    let n = runs.len();
    let runs = &runs;
    let stream = |start: usize| (0..n).map(move |i| &runs[(start + i) % n]).map(|r| (r.0, r.1.clone()));
    let mut best = 0;
    for cand in 1..n {
        if cmp_runs(stream(cand), stream(best)).is_lt() {
            best = cand;
        }
    }
    runs[best].2.clone()
}

/// Returns `(canonical, conjugator)` with `conjugator · canonical ·
/// conjugator⁻¹ = a`.
pub fn cyclic_canonical(a: &Word) -> (CyclicWord, Word) {
    let (c, core) = cyclic_reduce(a);
    if core.syllables.len() <= 1 {
        return (CyclicWord { word: core }, c);
    }
    let n = core.len();
    let (canonical, prefix) = if n <= FLATTEN_LIMIT {
        let letters = core.letters();
        let codes: Vec<u32> = letters.iter().map(|l| l.code()).collect();
        let r = least_rotation(&codes);
        let mut rotated = letters[r..].to_vec();
        rotated.extend_from_slice(&letters[..r]);
        (
            Word::from_letters(&core.alphabet, &rotated),
            Word::from_letters(&core.alphabet, &letters[..r]),
        )
    } else {
        let r = least_rotation_by_runs(&core);
        let p = core.prefix(&r);
        (&(&p.inverse() * &core) * &p, p)
    };
    (CyclicWord { word: canonical }, &c * &prefix)
}

/// Same as [`cyclic_canonical`] but always uses run-level comparison.
#[doc(hidden)]
pub fn cyclic_canonical_by_runs(a: &Word) -> (CyclicWord, Word) {
    let (c, core) = cyclic_reduce(a);
    if core.syllables.len() <= 1 {
        return (CyclicWord { word: core }, c);
    }
    let r = least_rotation_by_runs(&core);
    let p = core.prefix(&r);
    (CyclicWord { word: &(&p.inverse() * &core) * &p }, &c * &p)
}

/// Witness that `conjugator · right^sign · conjugator⁻¹ = left`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ConjugacyCertificate {
    pub conjugator: Word,
    pub sign: i8,
}

impl ConjugacyCertificate {
    pub fn verify(&self, left: &Word, right: &Word) -> bool {
        let r = if self.sign < 0 { right.inverse() } else { right.clone() };
        match r.conjugate_by(&self.conjugator) {
            Ok(x) => x == *left,
            Err(_) => false,
        }
    }
}

/// Decides conjugacy (or conjugacy up to inversion). The returned conjugator
/// is the shortlex-least one.
pub fn are_conjugate(
    a: &Word,
    b: &Word,
    allow_inverse: bool,
) -> Result<Option<ConjugacyCertificate>, WordError> {
    a.check(b)?;
    let (ca, xa) = cyclic_canonical(a);
    let (cb, xb) = cyclic_canonical(b);
    let (conj, sign) = if ca == cb {
        (&xa * &xb.inverse(), 1)
    } else if allow_inverse {
        let (cbi, xbi) = cyclic_canonical(&b.inverse());
        if ca != cbi {
            return Ok(None);
        }
        (&xa * &xbi.inverse(), -1)
    } else {
        return Ok(None);
    };
    // Every valid conjugator lies in conj · ⟨root(b)⟩.
    let (root, _) = primitive_root(b);
    let (conjugator, _) = min_coset_rep(&conj, &root);
    Ok(Some(ConjugacyCertificate { conjugator, sign }))
}

/// Returns `(root, k)` with `root^k = a`, `k` maximal; `(1, 0)` for the
/// identity.
pub fn primitive_root(a: &Word) -> (Word, Exponent) {
    if a.is_identity() {
        return (a.clone(), Exponent::ZERO);
    }
    let (c, core) = cyclic_reduce(a);
    let syl = core.syllables();
    let (conj, cyc) = if syl.len() >= 2 && syl[0].generator == syl[syl.len() - 1].generator {
        let last = &syl[syl.len() - 1];
        let mut cyc = syl[..syl.len() - 1].to_vec();
        cyc[0].exponent = &cyc[0].exponent + &last.exponent;
        let shift = Word::from_reduced(
            a.alphabet.clone(),
            vec![Syllable { generator: last.generator, exponent: -&last.exponent }],
        );
        (&c * &shift, cyc)
    } else {
        (c, syl.to_vec())
    };
    if cyc.len() == 1 {
        let s = &cyc[0];
        let unit = Exponent::from(s.exponent.signum() as i64);
        let root = Word::from_reduced(a.alphabet.clone(), vec![Syllable { generator: s.generator, exponent: unit }]);
        return (&(&conj * &root) * &conj.inverse(), s.exponent.abs());
    }
    let s = cyc.len();
    let d = (1..=s)
        .filter(|d| s % d == 0)
        .find(|&d| (d..s).all(|i| cyc[i] == cyc[i - d]))
        .expect("s is always a period");
    let root = Word::from_reduced(a.alphabet.clone(), cyc[..d].to_vec());
    (&(&conj * &root) * &conj.inverse(), Exponent::from(s / d))
}

/// Shortlex-least element of the right coset `g⟨c⟩`, returned as
/// `(rep, k)` with `g = rep · c^k`.
pub fn min_coset_rep(g: &Word, c: &Word) -> (Word, Exponent) {
    if c.is_identity() {
        return (g.clone(), Exponent::ZERO);
    }
    let (_, core) = cyclic_reduce(c);
    // A multi-syllable core cancels at least one syllable of g per period,
    // so syllable counts bound |j|. Only single-syllable cores need the
    // letter-length bound, and their powers stay one syllable long.
    let bound = if core.syllables().len() >= 2 {
        (g.syllables().len() + c.syllables().len()) / core.syllables().len() + 2
    } else {
        (2usize.saturating_mul(g.len()) / core.len().max(1)).saturating_add(1)
    };
    if bound <= 4096 {
        let mut best = (g.clone(), 0i64);
        let cinv = c.inverse();
        for (step, dir) in [(c, 1i64), (&cinv, -1i64)] {
            let mut cur = g.clone();
            for j in 1..=bound as i64 {
                cur = &cur * step;
                if cur < best.0 {
                    best = (cur.clone(), dir * j);
                }
            }
        }
        return (best.0, Exponent::from(-best.1));
    }
    // |g c^j| is unimodal in j; search the huge range by ternary search.
    let at = |j: i64| g * &c.pow(&Exponent::from(j)).expect("power of a coset generator");
    let (mut lo, mut hi) = (-(bound.min(i64::MAX as usize / 4) as i64), bound.min(i64::MAX as usize / 4) as i64);
    while hi - lo > 4 {
        let m1 = lo + (hi - lo) / 3;
        let m2 = hi - (hi - lo) / 3;
        if at(m1).length() <= at(m2).length() {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let (rep, j) = (lo - 2..=hi + 2)
        .map(|j| (at(j), j))
        .min_by(|x, y| x.0.cmp(&y.0))
        .expect("nonempty range");
    (rep, Exponent::from(-j))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::words::{commutator, Alphabet, Letter};

    fn f2() -> Arc<Alphabet> {
        Alphabet::new("F", ["x", "y"]).unwrap()
    }

    fn w(a: &Arc<Alphabet>, spec: &[(usize, i64)]) -> Word {
        Word::from_syllables(a, spec.iter().map(|&(g, e)| (g, Exponent::from(e))))
    }

    fn brute_least_rotation(s: &[u32]) -> Vec<u32> {
        (0..s.len().max(1))
            .map(|r| {
                let mut v = s[r.min(s.len())..].to_vec();
                v.extend_from_slice(&s[..r.min(s.len())]);
                v
            })
            .min()
            .unwrap()
    }

    #[test]
    fn booth_matches_brute_force_exhaustively() {
        for n in 0..=8u32 {
            for code in 0..3u32.pow(n) {
                let mut c = code;
                let s: Vec<u32> = (0..n)
                    .map(|_| {
                        let d = c % 3;
                        c /= 3;
                        d
                    })
                    .collect();
                let r = least_rotation(&s);
                let mut rot = s[r.min(s.len())..].to_vec();
                rot.extend_from_slice(&s[..r.min(s.len())]);
                assert_eq!(rot, brute_least_rotation(&s), "input {s:?}");
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let a = f2();
        let x = Word::generator(&a, 0);
        let y = Word::generator(&a, 1);
        let (c, k) = cyclic_canonical(&w(&a, &[(0, 1), (1, 1), (0, -1)]));
        assert_eq!(c.word(), &y);
        assert_eq!(k, x);
        let (c, k) = cyclic_canonical(&w(&a, &[(1, 1), (0, 1)]));
        assert_eq!(c.word(), &w(&a, &[(0, 1), (1, 1)]));
        assert_eq!(k, y);
        let (c, k) = cyclic_canonical(&Word::identity(&a));
        assert!(c.is_empty() && k.is_identity());
    }

    #[test]
    fn run_level_matches_flat() {
        let a = f2();
        let samples = [
            w(&a, &[(0, 2), (1, 1), (0, 2), (1, 3)]),
            w(&a, &[(1, -1), (0, 3), (1, -1), (0, 3)]),
            w(&a, &[(0, 1), (1, 2), (0, -1), (1, 1), (0, 1)]),
            w(&a, &[(1, 2), (0, -3), (1, 1), (0, 1), (1, -5), (0, 2)]),
        ];
        for s in samples {
            let flat = cyclic_canonical(&s);
            let runs = cyclic_canonical_by_runs(&s);
            assert_eq!(flat.0, runs.0, "{s}");
            assert_eq!(&(&runs.1 * runs.0.word()) * &runs.1.inverse(), s);
        }
    }

    #[test]
    fn conjugacy_examples() {
        let a = f2();
        let x = Word::generator(&a, 0);
        let y = Word::generator(&a, 1);
        let xy = &x * &y;
        let yx = &y * &x;
        let cert = are_conjugate(&xy, &yx, false).unwrap().unwrap();
        assert_eq!(cert, ConjugacyCertificate { conjugator: x.clone(), sign: 1 });
        assert!(are_conjugate(&x, &y, true).unwrap().is_none());
        let cert = are_conjugate(&x, &x.inverse(), true).unwrap().unwrap();
        assert_eq!(cert.sign, -1);
        assert!(cert.verify(&x, &x.inverse()));
        assert!(are_conjugate(&x, &x.inverse(), false).unwrap().is_none());
        let e = Word::identity(&a);
        let cert = are_conjugate(&e, &e, false).unwrap().unwrap();
        assert!(cert.conjugator.is_identity());
    }

    #[test]
    fn boundary_words_pairwise_non_conjugate() {
        let f = Alphabet::new("S", ["a", "b", "c"]).unwrap();
        let gens: Vec<Word> = (0..3).map(|i| Word::generator(&f, i)).collect();
        let abc = &(&gens[0] * &gens[1]) * &gens[2];
        let all = [gens[0].clone(), gens[1].clone(), gens[2].clone(), abc];
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(are_conjugate(&all[i], &all[j], true).unwrap().is_none());
                }
            }
        }
    }

    #[test]
    fn root_examples() {
        let a = f2();
        let x = Word::generator(&a, 0);
        let y = Word::generator(&a, 1);
        let xy = &x * &y;
        assert_eq!(primitive_root(&xy.powi(3)), (xy.clone(), Exponent::from(3)));
        assert_eq!(primitive_root(&xy), (xy.clone(), Exponent::ONE));
        let c = commutator(&x, &y).unwrap();
        assert_eq!(primitive_root(&c), (c.clone(), Exponent::ONE));
        assert_eq!(primitive_root(&x.powi(-4)), (x.inverse(), Exponent::from(4)));
        // merged end syllables: x (y x)^2 x^-1 ... conjugates of powers
        let p = (&(&y * &x) * &x).powi(2).conjugate_by(&x).unwrap();
        let (r, k) = primitive_root(&p);
        assert_eq!(k, Exponent::from(2));
        assert_eq!(r.powi(2), p);
    }

    #[test]
    fn root_against_flat_periods() {
        let a = f2();
        let mut rng = rand::rng();
        for len in 1..10 {
            for _ in 0..50 {
                let base = crate::words::random_word(&a, len, &mut rng);
                let (_, core) = cyclic_reduce(&base);
                let letters: Vec<Letter> = core.letters();
                let n = letters.len();
                let period = (1..=n).find(|d| n.is_multiple_of(*d) && (0..n).all(|i| letters[i] == letters[(i + d) % n])).unwrap();
                let (_, k) = primitive_root(&base);
                assert_eq!(k, Exponent::from(n / period), "{base}");
            }
        }
    }

    #[test]
    fn coset_rep_prefers_short() {
        let a = f2();
        let x = Word::generator(&a, 0);
        let y = Word::generator(&a, 1);
        let g = &x.powi(2) * &y.powi(3);
        let (rep, k) = min_coset_rep(&g, &y);
        assert_eq!((rep.clone(), k.clone()), (x.powi(2), Exponent::from(3)));
        assert_eq!(&rep * &y.pow(&k).unwrap(), g);
        let e: Exponent = "1000000000000000000".parse().unwrap();
        let big = x.pow(&e).unwrap();
        let (rep, k) = min_coset_rep(&(&y * &big), &x.powi(2));
        assert!(rep.len() <= 3);
        assert_eq!(&rep * &x.powi(2).pow(&k).unwrap(), &y * &big);
    }
}
