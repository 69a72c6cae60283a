//! Text DSL for NPLTS models (one model per `.nplts` file).
//!
//! ```text
//! # comment
//! nplts example {
//!   designated s1, s2;
//!   success w;            # test models only
//!   state s1 {
//!     a -> { t: 1/2, u: 0.5 };
//!   }
//!   state t { }
//! }
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{ModelError, Nplts, RawNplts};
use crate::rat::{fmt_exact, parse_prob};

#[derive(Debug, Error)]
pub enum DslError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("validation failed: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Model(Vec<ModelError>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Prob(String),
    Sym(char),
    Arrow,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = *self.src.get(self.pos)?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    /// Returns the next token with its source position.
    fn next_tok(&mut self) -> Result<Option<(Tok, usize, usize)>, DslError> {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'#') => {
                    while let Some(b) = self.bump() {
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let (line, col) = (self.line, self.col);
        let Some(b) = self.peek() else { return Ok(None) };
        let tok = match b {
            b'{' | b'}' | b';' | b',' | b':' => {
                self.bump();
                Tok::Sym(b as char)
            }
            b'-' => {
                self.bump();
                if self.peek() == Some(b'>') {
                    self.bump();
                    Tok::Arrow
                } else {
                    return Err(DslError::Syntax {
                        line,
                        col,
                        msg: "expected `->`".into(),
                    });
                }
            }
            b if b.is_ascii_digit() || b == b'.' => {
                let mut s = String::new();
                while let Some(b) = self.peek() {
                    if b.is_ascii_digit() || b == b'.' || b == b'/' {
                        s.push(b as char);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Prob(s)
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                let mut s = String::new();
                while let Some(b) = self.peek() {
                    if b.is_ascii_alphanumeric() || b == b'_' {
                        s.push(b as char);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            other => {
                return Err(DslError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok(Some((tok, line, col)))
    }
}

struct Parser<'a> {
    lx: Lexer<'a>,
    lookahead: Option<(Tok, usize, usize)>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, DslError> {
        let mut lx = Lexer::new(src);
        let lookahead = lx.next_tok()?;
        Ok(Parser { lx, lookahead })
    }

    fn advance(&mut self) -> Result<Option<(Tok, usize, usize)>, DslError> {
        let cur = self.lookahead.take();
        self.lookahead = self.lx.next_tok()?;
        Ok(cur)
    }

    fn err_here(&self, msg: &str) -> DslError {
        let (line, col) = self
            .lookahead
            .as_ref()
            .map(|&(_, l, c)| (l, c))
            .unwrap_or((self.lx.line, self.lx.col));
        DslError::Syntax { line, col, msg: msg.into() }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), DslError> {
        match self.advance()? {
            Some((Tok::Sym(s), ..)) if s == c => Ok(()),
            _ => Err(self.err_here(&format!("expected `{c}`"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, DslError> {
        match self.advance()? {
            Some((Tok::Ident(s), ..)) => Ok(s),
            _ => Err(self.err_here(&format!("expected {what}"))),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), DslError> {
        match self.advance()? {
            Some((Tok::Ident(s), ..)) if s == kw => Ok(()),
            _ => Err(self.err_here(&format!("expected `{kw}`"))),
        }
    }

    fn at_sym(&self, c: char) -> bool {
        matches!(self.lookahead, Some((Tok::Sym(s), ..)) if s == c)
    }

    fn ident_list(&mut self) -> Result<Vec<String>, DslError> {
        let mut out = vec![self.expect_ident("a state name")?];
        while self.at_sym(',') {
            self.advance()?;
            out.push(self.expect_ident("a state name")?);
        }
        self.expect_sym(';')?;
        Ok(out)
    }

    fn model(&mut self) -> Result<RawNplts, DslError> {
        self.expect_keyword("nplts")?;
        let name = self.expect_ident("a model name")?;
        self.expect_sym('{')?;
        let mut raw = RawNplts { name, ..Default::default() };
        loop {
            match self.lookahead.clone() {
                Some((Tok::Sym('}'), ..)) => {
                    self.advance()?;
                    break;
                }
                Some((Tok::Ident(kw), ..)) if kw == "designated" => {
                    self.advance()?;
                    raw.designated.extend(self.ident_list()?);
                }
                Some((Tok::Ident(kw), ..)) if kw == "success" => {
                    self.advance()?;
                    raw.success.extend(self.ident_list()?);
                }
                Some((Tok::Ident(kw), ..)) if kw == "state" => {
                    self.advance()?;
                    let state = self.expect_ident("a state name")?;
                    raw.states.push(state.clone());
                    self.expect_sym('{')?;
                    while !self.at_sym('}') {
                        let label = self.expect_ident("an action name")?;
                        match self.advance()? {
                            Some((Tok::Arrow, ..)) => {}
                            _ => return Err(self.err_here("expected `->`")),
                        }
                        self.expect_sym('{')?;
                        let mut targets = Vec::new();
                        loop {
                            let tgt = self.expect_ident("a target state")?;
                            self.expect_sym(':')?;
                            let p = match self.advance()? {
                                Some((Tok::Prob(p), line, col)) => {
                                    parse_prob(&p).ok_or(DslError::Syntax {
                                        line,
                                        col,
                                        msg: format!("bad probability literal `{p}`"),
                                    })?
                                }
                                _ => return Err(self.err_here("expected a probability")),
                            };
                            targets.push((tgt, p));
                            if self.at_sym(',') {
                                self.advance()?;
                            } else {
                                break;
                            }
                        }
                        self.expect_sym('}')?;
                        self.expect_sym(';')?;
                        raw.transitions.push((state.clone(), label, targets));
                    }
                    self.advance()?; // closing `}`
                }
                _ => return Err(self.err_here("expected `designated`, `success`, `state` or `}`")),
            }
        }
        Ok(raw)
    }
}

/// Parses DSL text into a validated model.
pub fn parse_dsl(text: &str) -> Result<Nplts, DslError> {
    let mut p = Parser::new(text)?;
    let raw = p.model()?;
    if p.lookahead.is_some() {
        return Err(p.err_here("trailing input after model"));
    }
    Nplts::validate(&raw).map_err(DslError::Model)
}

/// Serializes a model back to canonical DSL text; `parse_dsl ∘ serialize` is
/// the identity up to formatting.
pub fn serialize(m: &Nplts) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "nplts {} {{", m.name);
    if !m.designated.is_empty() {
        let names: Vec<_> = m.designated.iter().map(|&s| m.state_names[s].clone()).collect();
        let _ = writeln!(out, "  designated {};", names.join(", "));
    }
    if !m.success.is_empty() {
        let names: Vec<_> = m.success.iter().map(|&s| m.state_names[s].clone()).collect();
        let _ = writeln!(out, "  success {};", names.join(", "));
    }
    for (i, name) in m.state_names.iter().enumerate() {
        let trans: Vec<_> = m.transitions_from(i).collect();
        if trans.is_empty() {
            let _ = writeln!(out, "  state {name} {{ }}");
            continue;
        }
        let _ = writeln!(out, "  state {name} {{");
        for t in trans {
            let parts: Vec<String> = t
                .target
                .support
                .iter()
                .map(|(&s, p)| format!("{}: {}", m.state_names[s], fmt_exact(p)))
                .collect();
            let _ = writeln!(out, "    {} -> {{ {} }};", t.label, parts.join(", "));
        }
        let _ = writeln!(out, "  }}");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn minimal_model_parses() {
        let m = parse_dsl("nplts T { state s { } }").unwrap();
        assert_eq!(m.num_states(), 1);
        assert_eq!(m.name, "T");
    }

    #[test]
    fn decimals_become_exact_rationals() {
        let m = parse_dsl(
            "nplts T { state s { a -> { t: 0.68, u: 0.32 }; } state t { } state u { } }",
        )
        .unwrap();
        let t = m.transitions_from(0).next().unwrap();
        let probs: Vec<_> = t.target.support.values().cloned().collect();
        assert!(probs.contains(&rat(17, 25)));
        assert!(probs.contains(&rat(8, 25)));
    }

    #[test]
    fn bad_sum_is_a_validation_error() {
        let err = parse_dsl(
            "nplts T { state s { a -> { t: 0.5, u: 0.6 }; } state t { } state u { } }",
        )
        .unwrap_err();
        assert!(matches!(err, DslError::Model(_)));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_dsl("nplts T {\n  state s {\n    a => { t: 1 };\n  }\n}").unwrap_err();
        match err {
            DslError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_designated_success() {
        let m = parse_dsl(
            "# test model\nnplts T {\n  designated s; # root\n  success w;\n  state s { tau -> { w: 1 }; }\n  state w { }\n}",
        )
        .unwrap();
        assert_eq!(m.designated, vec![0]);
        assert!(m.success.contains(&1));
    }

    #[test]
    fn roundtrip_is_identity_up_to_formatting() {
        let src = "nplts T { designated s; state s { a -> { t: 1/2, u: 1/2 }; b -> { t: 1 }; } state t { } state u { } }";
        let m = parse_dsl(src).unwrap();
        let m2 = parse_dsl(&serialize(&m)).unwrap();
        assert_eq!(m.state_names, m2.state_names);
        assert_eq!(m.designated, m2.designated);
        assert_eq!(m.transitions.len(), m2.transitions.len());
        for (a, b) in m.transitions.iter().zip(&m2.transitions) {
            assert_eq!(a, b);
        }
    }
}
