use num_bigint::BigInt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: &[&str] = &["->", "=>", "--", "{", "}", "(", ")", "[", "]", ",", ";", ":", "=", ".", "^", "-"];

pub(super) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
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
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Int(digits.parse().expect("decimal digits")), line, col });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line, col });
        } else if let Some(s) = SYMBOLS.iter().find(|s| s.chars().zip(&chars[i..]).filter(|(a, b)| a == *b).count() == s.len()) {
            i += s.len();
            out.push(Token { tok: Tok::Sym(s), line, col });
        } else {
            return Err(ParseError { line, col, expected: vec!["token".into()], found: format!("`{c}`") });
        }
        col += i - start;
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}
