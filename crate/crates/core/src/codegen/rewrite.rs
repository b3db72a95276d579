use super::lexer::{Token, TokenKind};

const SELF_RECEIVERS: &[&str] = &["this", "self"];

/// Replaces every call of `base_name` in a partial body with the proceed
/// marker.
///
/// A call site is `base_name (` or `this . base_name (`; the receiver is
/// dropped together with the name. Calls on any other receiver are left
/// alone, as is every other token. Matching is by whole tokens, so
/// `printer(s)` is not a call of `print`.
pub fn rewrite_proceed(body: &[Token], base_name: &str) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::with_capacity(body.len());
    for (i, tok) in body.iter().enumerate() {
        let is_call = tok.is_ident(base_name) && body.get(i + 1).is_some_and(|t| t.is_punct("("));
        if !is_call {
            out.push(tok.clone());
            continue;
        }
        let n = out.len();
        let qualified = n >= 1 && out[n - 1].is_punct(".");
        if !qualified {
            out.push(Token::proceed());
            continue;
        }
        let self_receiver =
            n >= 2 && SELF_RECEIVERS.iter().any(|r| out[n - 2].is_ident(r)) && !(n >= 3 && out[n - 3].is_punct("."));
        if self_receiver {
            out.truncate(n - 2);
            out.push(Token::proceed());
        } else {
            out.push(tok.clone());
        }
    }
    out
}

/// Number of proceed markers in a rewritten body.
pub fn proceed_sites(body: &[Token]) -> usize {
    body.iter().filter(|t| t.kind() == TokenKind::Proceed).count()
}
