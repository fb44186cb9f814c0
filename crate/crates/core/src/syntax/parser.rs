//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := un ("&" un)*
//! un      := "~" un | "box" un | "dia" un
//!          | "[" (nat | "*") "]" un | "<" (nat | "*") ">" un
//!          | "O" nat un | "M" nat un | "X" un | "F" un | "G" un
//!          | "U" "(" formula "," formula ")"
//!          | "true" | "false" | ident | "(" formula ")"
//! ```

use thiserror::Error;

use super::{AgentId, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("agent {agent} at offset {pos} is out of range (declared agents: {count})")]
    AgentOutOfRange { pos: usize, agent: u32, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Comma,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    Star,
    Nat(u32),
    Ident(String),
    KwBox,
    KwDia,
    KwTrue,
    KwFalse,
    KwX,
    KwF,
    KwG,
    KwU,
    /// `O` with an optional index glued on (`O1`); `None` means a separate nat follows.
    KwO(Option<u32>),
    KwM(Option<u32>),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Nat(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("{other:?}"),
        }
    }
}

fn syntax(pos: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b',' => Some(Tok::Comma),
            b'~' => Some(Tok::Tilde),
            b'&' => Some(Tok::Amp),
            b'|' => Some(Tok::Pipe),
            b'*' => Some(Tok::Star),
            b'>' => Some(Tok::Gt),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((start, tok));
            i += 1;
            continue;
        }
        if text[i..].starts_with("<->") {
            out.push((start, Tok::DoubleArrow));
            i += 3;
            continue;
        }
        if text[i..].starts_with("->") {
            out.push((start, Tok::Arrow));
            i += 2;
            continue;
        }
        if c == b'<' {
            out.push((start, Tok::Lt));
            i += 1;
            continue;
        }
        if c.is_ascii_alphanumeric() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, classify_word(&text[start..i], start)?));
            continue;
        }
        let ch = text[i..].chars().next().unwrap_or('?');
        return Err(syntax(start, format!("unexpected character `{ch}`")));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

fn parse_nat(word: &str, pos: usize) -> Result<u32, ParseError> {
    word.parse::<u32>()
        .map_err(|_| syntax(pos, format!("number `{word}` is too large")))
}

fn classify_word(word: &str, pos: usize) -> Result<Tok, ParseError> {
    let first = word.as_bytes()[0];
    if first.is_ascii_digit() {
        if !word.bytes().all(|b| b.is_ascii_digit()) {
            return Err(syntax(pos, format!("malformed number `{word}`")));
        }
        return Ok(Tok::Nat(parse_nat(word, pos)?));
    }
    let tok = match word {
        "box" => Tok::KwBox,
        "dia" => Tok::KwDia,
        "true" => Tok::KwTrue,
        "false" => Tok::KwFalse,
        "X" => Tok::KwX,
        "F" => Tok::KwF,
        "G" => Tok::KwG,
        "U" => Tok::KwU,
        "O" => Tok::KwO(None),
        "M" => Tok::KwM(None),
        _ if first.is_ascii_lowercase() || first == b'_' => Tok::Ident(word.to_string()),
        _ => {
            let (head, rest) = word.split_at(1);
            if (head == "O" || head == "M") && rest.bytes().all(|b| b.is_ascii_digit()) {
                let n = parse_nat(rest, pos + 1)?;
                if head == "O" {
                    Tok::KwO(Some(n))
                } else {
                    Tok::KwM(Some(n))
                }
            } else {
                return Err(syntax(
                    pos,
                    format!("`{word}` is not a keyword; atoms start with a lowercase letter"),
                ));
            }
        }
    };
    Ok(tok)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    cursor: usize,
    agent_count: usize,
}

enum Coalition {
    Agent(AgentId),
    Group,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.cursor].1
    }

    fn pos(&self) -> usize {
        self.toks[self.cursor].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.cursor].1.clone();
        if self.cursor + 1 < self.toks.len() {
            self.cursor += 1;
        }
        tok
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.pos(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn agent(&self, n: u32, pos: usize) -> Result<AgentId, ParseError> {
        match AgentId::new(n) {
            Some(a) if (n as usize) <= self.agent_count => Ok(a),
            Some(_) => Err(ParseError::AgentOutOfRange {
                pos,
                agent: n,
                count: self.agent_count,
            }),
            None => Err(syntax(pos, "agent indices start at 1")),
        }
    }

    fn nat_agent(&mut self, glued: Option<u32>, kw_pos: usize) -> Result<AgentId, ParseError> {
        let pos = self.pos();
        let (n, pos) = match glued {
            Some(n) => (n, kw_pos),
            None => match self.bump() {
                Tok::Nat(n) => (n, pos),
                other => {
                    return Err(syntax(pos, format!("expected agent number, found {}", other.describe())))
                }
            },
        };
        self.agent(n, pos)
    }

    fn coalition(&mut self) -> Result<Coalition, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Star => Ok(Coalition::Group),
            Tok::Nat(n) => Ok(Coalition::Agent(self.agent(n, pos)?)),
            other => Err(syntax(
                pos,
                format!("expected agent number or `*`, found {}", other.describe()),
            )),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Tilde => Ok(Formula::not(self.unary()?)),
            Tok::KwBox => Ok(Formula::nec(self.unary()?)),
            Tok::KwDia => Ok(Formula::poss(self.unary()?)),
            Tok::LBracket => {
                let who = self.coalition()?;
                self.expect(Tok::RBracket)?;
                let body = self.unary()?;
                Ok(match who {
                    Coalition::Agent(a) => Formula::stit(a, body),
                    Coalition::Group => Formula::group_stit(body),
                })
            }
            Tok::Lt => {
                let who = self.coalition()?;
                self.expect(Tok::Gt)?;
                let body = self.unary()?;
                Ok(match who {
                    Coalition::Agent(a) => Formula::can_stit(a, body),
                    Coalition::Group => Formula::not(Formula::group_stit(Formula::not(body))),
                })
            }
            Tok::KwO(glued) => {
                let a = self.nat_agent(glued, pos)?;
                Ok(Formula::ought(a, self.unary()?))
            }
            Tok::KwM(glued) => {
                let a = self.nat_agent(glued, pos)?;
                Ok(Formula::may(a, self.unary()?))
            }
            Tok::KwX => Ok(Formula::next(self.unary()?)),
            Tok::KwF => Ok(Formula::eventually(self.unary()?)),
            Tok::KwG => Ok(Formula::always(self.unary()?)),
            Tok::KwU => {
                self.expect(Tok::LParen)?;
                let left = self.formula()?;
                self.expect(Tok::Comma)?;
                let right = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::until(left, right))
            }
            Tok::KwTrue => Ok(Formula::Top),
            Tok::KwFalse => Ok(Formula::Bottom),
            Tok::Ident(name) => Ok(Formula::Atom(name)),
            Tok::LParen => {
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(syntax(
                pos,
                format!("expected a formula, found {}", other.describe()),
            )),
        }
    }
}

/// Parses `text`, rejecting agent indices above `agent_count`.
pub fn parse(text: &str, agent_count: usize) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        cursor: 0,
        agent_count,
    };
    let f = parser.formula()?;
    if *parser.peek() != Tok::Eof {
        return Err(syntax(
            parser.pos(),
            format!("unexpected {} after formula", parser.peek().describe()),
        ));
    }
    Ok(f)
}
