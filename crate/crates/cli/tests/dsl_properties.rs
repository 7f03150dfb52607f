mod common;

use common::random_document;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serrelab_core::dsl::{parse, render, ParseError};

/// Char span and 1-based position of each token in lexer-compatible text
/// without comments.
struct Span {
    start: usize,
    end: usize,
    line: usize,
    col: usize,
}

const SYMBOLS: &[&str] = &["->", "=>", "--", "{", "}", "(", ")", "[", "]", ",", ";", ":", "=", ".", "^", "-"];

fn tokens(text: &str) -> Vec<Span> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
        } else {
            let rest: String = chars[i..].iter().take(2).collect();
            let s = SYMBOLS.iter().find(|s| rest.starts_with(**s)).expect("rendered text lexes");
            i += s.len();
        }
        out.push(Span { start, end: i, line, col });
        col += i - start;
    }
    out
}

/// Position just past the last character of `text`.
fn end_position(text: &str) -> (usize, usize) {
    let line = text.matches('\n').count() + 1;
    let col = text.rsplit('\n').next().unwrap().chars().count() + 1;
    (line, col)
}

fn document(seed: u64) -> String {
    render(&random_document(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn at(e: &ParseError) -> (usize, usize) {
    (e.line, e.col)
}

fn splice(text: &str, at: usize, insert: &str, skip: usize) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut s: String = chars[..at].iter().collect();
    s.push_str(insert);
    s.extend(&chars[at + skip..]);
    s
}

const INSERTS: &[&str] = &[
    "x", "zz9", "0", "123456789012345678901234567890", "alphabet", "task", "level", "tree", "pm", "{", "}", "(", ")",
    "[", "]", ",", ";", ":", "=", ".", "^", "-", "->", "=>", "--",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rendering_round_trips(seed in any::<u64>()) {
        let doc = random_document(&mut ChaCha8Rng::seed_from_u64(seed));
        let text = render(&doc);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(render(&back), text);
    }

    #[test]
    fn layout_is_insignificant(seed in any::<u64>(), gaps in prop::collection::vec(0usize..4, 512)) {
        let text = document(seed);
        let toks = tokens(&text);
        let chars: Vec<char> = text.chars().collect();
        let mut relaid = String::new();
        for (i, t) in toks.iter().enumerate() {
            relaid.push_str(["  ", "\n", "\t # note\n ", " "][gaps[i % gaps.len()]]);
            relaid.extend(&chars[t.start..t.end]);
        }
        prop_assert_eq!(parse(&relaid).unwrap(), parse(&text).unwrap());
    }

    #[test]
    fn truncation_fails_only_at_end_of_input(seed in any::<u64>(), cut in any::<prop::sample::Index>()) {
        let text = document(seed);
        let toks = tokens(&text);
        let end = toks[cut.index(toks.len())].end;
        let prefix: String = text.chars().take(end).collect();
        if let Err(e) = parse(&prefix) {
            prop_assert_eq!(at(&e), end_position(&prefix), "{}\n{}", e, prefix);
        }
    }

    #[test]
    fn illegal_characters_are_located(seed in any::<u64>(), which in any::<prop::sample::Index>()) {
        let text = document(seed);
        let toks = tokens(&text);
        let t = &toks[which.index(toks.len())];
        let bad = splice(&text, t.start, "@", t.end - t.start);
        let e = parse(&bad).unwrap_err();
        prop_assert_eq!(at(&e), (t.line, t.col));
        prop_assert_eq!(e.found, "`@`");
    }

    #[test]
    fn insertions_fail_no_earlier_than_the_insertion(
        seed in any::<u64>(),
        which in any::<prop::sample::Index>(),
        token in prop::sample::select(INSERTS),
    ) {
        let text = document(seed);
        let toks = tokens(&text);
        let t = &toks[which.index(toks.len())];
        let mutated = splice(&text, t.start, &format!(" {token} "), 0);
        if let Err(e) = parse(&mutated) {
            prop_assert!(at(&e) >= (t.line, t.col), "{} before {:?}\n{}", e, (t.line, t.col), mutated);
        }
    }
}
