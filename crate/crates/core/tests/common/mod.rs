#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use serrelab_core::{Alphabet, Letter, Word};

/// Letters as nonzero integers: generator `i` is `i + 1`, its inverse `-(i + 1)`.
pub type Flat = Vec<i32>;

pub fn reduce(letters: impl IntoIterator<Item = i32>) -> Flat {
    let mut out: Flat = Vec::new();
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inv(a: &[i32]) -> Flat {
    a.iter().rev().map(|l| -l).collect()
}

pub fn flat(w: &Word) -> Flat {
    w.letters()
        .into_iter()
        .map(|l| if l.is_inverse() { -(l.generator() as i32 + 1) } else { l.generator() as i32 + 1 })
        .collect()
}

pub fn word(alphabet: &Arc<Alphabet>, f: &[i32]) -> Word {
    let letters: Vec<Letter> = f.iter().map(|&l| Letter::new(l.unsigned_abs() as usize - 1, l < 0)).collect();
    Word::from_letters(alphabet, &letters)
}

pub fn f2() -> Arc<Alphabet> {
    Alphabet::new("F", ["a", "b"]).unwrap()
}

/// Unreduced letter sequences over `rank` generators; reduce them to get
/// group elements.
pub fn letters(rank: usize, max_len: usize) -> impl Strategy<Value = Flat> {
    prop::collection::vec((1..=rank as i32, any::<bool>()), 0..=max_len)
        .prop_map(|v| v.into_iter().map(|(g, i)| if i { -g } else { g }).collect())
}

pub fn reduced(rank: usize, max_len: usize) -> impl Strategy<Value = Flat> {
    letters(rank, max_len).prop_map(reduce)
}

/// Cyclic reduction and all rotations, done letter by letter.
pub fn naive_conjugate(a: &[i32], b: &[i32]) -> bool {
    let core = |w: &[i32]| {
        let mut w = reduce(w.iter().copied());
        while w.len() >= 2 && w[0] == -w[w.len() - 1] {
            w = w[1..w.len() - 1].to_vec();
        }
        w
    };
    let (ca, cb) = (core(a), core(b));
    ca.len() == cb.len() && (ca.is_empty() || (0..ca.len()).any(|r| ca[r..].iter().chain(&ca[..r]).eq(cb.iter())))
}
