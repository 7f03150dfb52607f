//! Homomorphisms between finitely generated free groups.

use std::fmt;
use std::sync::Arc;

use crate::stallings::{fold, Index};
use crate::words::{same_alphabet, Alphabet, Word, WordError};

#[derive(Clone, PartialEq, Eq)]
pub struct FreeHom {
    domain: Arc<Alphabet>,
    codomain: Arc<Alphabet>,
    images: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct HomAnalysis {
    pub image_rank: usize,
    pub image_index: Index,
    pub surjective: bool,
    pub injective: bool,
}

fn mismatch(expected: &Alphabet, found: &Alphabet) -> WordError {
    WordError::AlphabetMismatch { left: expected.name().to_string(), right: found.name().to_string() }
}

impl FreeHom {
    pub fn new(
        domain: &Arc<Alphabet>,
        codomain: &Arc<Alphabet>,
        images: Vec<Word>,
    ) -> Result<FreeHom, WordError> {
        if images.len() != domain.rank() {
            return Err(WordError::InvalidAlphabet(
                domain.name().to_string(),
                format!("expected {} images, got {}", domain.rank(), images.len()),
            ));
        }
        if let Some(bad) = images.iter().find(|w| !same_alphabet(w.alphabet(), codomain)) {
            return Err(mismatch(codomain, bad.alphabet()));
        }
        Ok(FreeHom { domain: domain.clone(), codomain: codomain.clone(), images })
    }

    pub fn identity(alphabet: &Arc<Alphabet>) -> FreeHom {
        FreeHom {
            domain: alphabet.clone(),
            codomain: alphabet.clone(),
            images: (0..alphabet.rank()).map(|i| Word::generator(alphabet, i)).collect(),
        }
    }

    pub fn domain(&self) -> &Arc<Alphabet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Alphabet> {
        &self.codomain
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator]
    }

    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        if !same_alphabet(w.alphabet(), &self.domain) {
            return Err(mismatch(&self.domain, w.alphabet()));
        }
        let mut acc = Word::identity(&self.codomain);
        for s in w.syllables() {
            let part = self.images[s.generator].pow(&s.exponent)?;
            acc = &acc * &part;
        }
        Ok(acc)
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &FreeHom, inner: &FreeHom) -> Result<FreeHom, WordError> {
        if !same_alphabet(&inner.codomain, &outer.domain) {
            return Err(mismatch(&outer.domain, &inner.codomain));
        }
        let images = inner.images.iter().map(|w| outer.apply(w)).collect::<Result<_, _>>()?;
        Ok(FreeHom { domain: inner.domain.clone(), codomain: outer.codomain.clone(), images })
    }

    /// Image rank and index by folding the images; injectivity follows from
    /// Hopficity of free groups (image rank equals domain rank).
    pub fn analyze(&self) -> HomAnalysis {
        let graph = fold(&self.codomain, &self.images).expect("images share the codomain");
        let (image_rank, image_index) = graph.rank_and_index();
        HomAnalysis {
            image_rank,
            image_index,
            surjective: image_index == Index::Finite(1),
            injective: image_rank == self.domain.rank(),
        }
    }
}

/// Whether some pair of the words fails to commute.
pub fn generates_nonabelian(words: &[Word]) -> bool {
    words.iter().enumerate().any(|(i, a)| {
        words[i + 1..].iter().any(|b| !a.commutes_with(b).unwrap_or(true))
    })
}

impl fmt::Display for FreeHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {{ ", self.domain.name(), self.codomain.name())?;
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} => {}", self.domain.generator_name(i), w)?;
        }
        f.write_str(" }")
    }
}

impl fmt::Debug for FreeHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeHom({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::commutator;

    #[test]
    fn apply_examples() {
        let f = Alphabet::new("F", ["x", "y"]).unwrap();
        let g = Alphabet::new("G", ["a", "b"]).unwrap();
        let x = Word::generator(&f, 0);
        let y = Word::generator(&f, 1);
        let a = Word::generator(&g, 0);
        let w = &x * &y.inverse();
        assert_eq!(FreeHom::identity(&f).apply(&w).unwrap(), w);
        let h = FreeHom::new(&f, &g, vec![a.clone(), a.clone()]).unwrap();
        assert!(h.apply(&w).unwrap().is_identity());
        let rs = Alphabet::new("D", ["r", "s"]).unwrap();
        let std = FreeHom::new(&rs, &f, vec![x.clone(), y.clone()]).unwrap();
        let r = Word::generator(&rs, 0);
        let s = Word::generator(&rs, 1);
        assert_eq!(std.apply(&commutator(&r, &s).unwrap()).unwrap(), commutator(&x, &y).unwrap());
        assert!(h.apply(&a).is_err());
    }

    #[test]
    fn compose_examples() {
        let f = Alphabet::new("F", ["x"]).unwrap();
        let x = Word::generator(&f, 0);
        let sq = FreeHom::new(&f, &f, vec![x.powi(2)]).unwrap();
        let cu = FreeHom::new(&f, &f, vec![x.powi(3)]).unwrap();
        let id = FreeHom::identity(&f);
        assert_eq!(FreeHom::compose(&id, &sq).unwrap(), sq);
        assert_eq!(FreeHom::compose(&sq, &id).unwrap(), sq);
        assert_eq!(FreeHom::compose(&cu, &sq).unwrap().image(0), &x.powi(6));
    }

    #[test]
    fn analysis_examples() {
        let f = Alphabet::new("F", ["x", "y"]).unwrap();
        let g = Alphabet::new("G", ["a", "b"]).unwrap();
        let a = Word::generator(&g, 0);
        let b = Word::generator(&g, 1);
        let id = FreeHom::identity(&f).analyze();
        assert_eq!((id.image_rank, id.surjective, id.injective), (2, true, true));
        let h = FreeHom::new(&f, &g, vec![a.powi(2), b.clone()]).unwrap().analyze();
        assert_eq!((h.image_rank, h.surjective, h.injective), (2, false, true));
        let h = FreeHom::new(&f, &g, vec![a.clone(), a.clone()]).unwrap().analyze();
        assert_eq!((h.image_rank, h.surjective, h.injective), (1, false, false));
        assert!(generates_nonabelian(&[a.clone(), b]));
        assert!(!generates_nonabelian(&[a.clone(), a.powi(3)]));
    }
}
