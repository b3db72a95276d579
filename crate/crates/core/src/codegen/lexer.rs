use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::diag::{Code, Diagnostic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Punct,
    /// Call-site marker left by proceed rewriting.
    Proceed,
}

/// A body token. Serialized as its source text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    kind: TokenKind,
    text: String,
}

pub const PROCEED_MARKER: &str = "PROCEED";

const TWO_CHAR_PUNCT: &[&str] = &[
    "=>", "->", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "::",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>) -> Self {
        Token {
            kind,
            text: text.into(),
        }
    }

    pub fn ident(text: impl Into<String>) -> Self {
        Token::new(TokenKind::Ident, text)
    }

    pub fn punct(text: impl Into<String>) -> Self {
        Token::new(TokenKind::Punct, text)
    }

    pub fn proceed() -> Self {
        Token::new(TokenKind::Proceed, PROCEED_MARKER)
    }

    /// Reconstructs a token from its text alone. The proceed marker never
    /// appears in scanned bodies, so text that spells it is an identifier.
    pub fn from_text(text: &str) -> Self {
        let kind = match text.chars().next() {
            Some('"') | Some('\'') => TokenKind::Str,
            Some(c) if c.is_ascii_digit() => TokenKind::Number,
            Some(c) if is_ident_start(c) => TokenKind::Ident,
            _ => TokenKind::Punct,
        };
        Token::new(kind, text)
    }

    pub fn kind(&self) -> TokenKind {
        self.kind
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn is_ident(&self, name: &str) -> bool {
        self.kind == TokenKind::Ident && self.text == name
    }

    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punct && self.text == p
    }

    fn is_word(&self) -> bool {
        matches!(self.kind, TokenKind::Ident | TokenKind::Number | TokenKind::Proceed)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Ok(Token::from_text(&text))
    }
}

/// Token with the 1-based source line it starts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub token: Token,
    pub line: usize,
}

/// Splits a layered source unit into tokens. `//` and `/* */` comments are
/// skipped.
pub fn lex(src: &str) -> Result<Vec<Spanned>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut line = 1;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start_line = line;
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            loop {
                match chars.get(i) {
                    None => {
                        return Err(Diagnostic::new(
                            start_line,
                            Code::SyntaxError,
                            "unterminated block comment",
                        ))
                    }
                    Some('*') if chars.get(i + 1) == Some(&'/') => {
                        i += 2;
                        break;
                    }
                    Some(ch) => {
                        if *ch == '\n' {
                            line += 1;
                        }
                        i += 1;
                    }
                }
            }
            continue;
        }
        let (kind, end) = if is_ident_start(c) {
            let mut j = i + 1;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (TokenKind::Ident, j)
        } else if c.is_ascii_digit() {
            let mut j = i + 1;
            while j < chars.len()
                && (is_ident_char(chars[j])
                    || (chars[j] == '.' && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit())))
            {
                j += 1;
            }
            (TokenKind::Number, j)
        } else if c == '"' || c == '\'' {
            let mut j = i + 1;
            loop {
                match chars.get(j) {
                    None | Some('\n') => {
                        return Err(Diagnostic::new(
                            start_line,
                            Code::SyntaxError,
                            "unterminated string literal",
                        ))
                    }
                    Some('\\') => j += 2,
                    Some(q) if *q == c => break,
                    Some(_) => j += 1,
                }
            }
            (TokenKind::Str, j + 1)
        } else if c.is_ascii_punctuation() {
            let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
            if TWO_CHAR_PUNCT.contains(&two.as_str()) {
                (TokenKind::Punct, i + 2)
            } else {
                (TokenKind::Punct, i + 1)
            }
        } else {
            return Err(Diagnostic::new(
                start_line,
                Code::SyntaxError,
                format!("unexpected character {c:?}"),
            ));
        };
        out.push(Spanned {
            token: Token::new(kind, chars[i..end].iter().collect::<String>()),
            line: start_line,
        });
        i = end;
    }
    Ok(out)
}

/// Prints a token sequence on one line.
///
/// Words are separated by single spaces; no space is put before `) ] ; , .`,
/// after `( [ .`, or between a word and a following `(` or `[`.
pub fn join_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut prev: Option<&Token> = None;
    for tok in tokens {
        if let Some(p) = prev {
            let tight_after = p.is_punct("(") || p.is_punct("[") || p.is_punct(".");
            let tight_before = [")", "]", ";", ",", "."].iter().any(|s| tok.is_punct(s))
                || ((tok.is_punct("(") || tok.is_punct("[")) && p.is_word());
            if !(tight_after || tight_before) {
                out.push(' ');
            }
        }
        out.push_str(tok.text());
        prev = Some(tok);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        lex(src).unwrap().into_iter().map(|s| s.token.text).collect()
    }

    #[test]
    fn lexes_marker_and_arrows() {
        assert_eq!(
            texts("@LayeredClass(ALayer => myprj.layers.A) -> x"),
            [
                "@",
                "LayeredClass",
                "(",
                "ALayer",
                "=>",
                "myprj",
                ".",
                "layers",
                ".",
                "A",
                ")",
                "->",
                "x"
            ]
        );
    }

    #[test]
    fn string_literals_keep_quotes_and_escapes() {
        assert_eq!(
            texts(r#"return "A\"b" + 'c';"#),
            ["return", r#""A\"b""#, "+", "'c'", ";"]
        );
        assert!(lex("\"open").is_err());
    }

    #[test]
    fn tracks_lines_and_skips_comments() {
        let toks = lex("a // c\n/* x\ny */ b\n\n12.5").unwrap();
        let lines: Vec<_> = toks.iter().map(|s| (s.token.text.as_str(), s.line)).collect();
        assert_eq!(lines, [("a", 1), ("b", 3), ("12.5", 5)]);
        assert_eq!(toks[2].token.kind(), TokenKind::Number);
    }

    #[test]
    fn rejects_non_ascii_symbols() {
        let err = lex("a\n  ¤").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn from_text_recovers_kind() {
        for tok in lex(r#"x 1 "s" ; == PROCEED"#).unwrap() {
            let kind = tok.token.kind();
            assert_eq!(Token::from_text(tok.token.text()).kind(), kind);
        }
    }

    #[test]
    fn joins_like_source() {
        let toks: Vec<Token> = lex(r#"String r = print(s); return "A" + r;"#)
            .unwrap()
            .into_iter()
            .map(|s| s.token)
            .collect();
        assert_eq!(join_tokens(&toks), r#"String r = print(s); return "A" + r;"#);
        let toks: Vec<Token> = lex("this.f(a, b[0])").unwrap().into_iter().map(|s| s.token).collect();
        assert_eq!(join_tokens(&toks), "this.f(a, b[0])");
    }
}
