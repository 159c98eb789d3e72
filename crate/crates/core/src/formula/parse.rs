//! Recursive-descent parser for the surface syntax.
//!
//! ```text
//! formula := disj [ "->" formula ]          right-associative
//! disj    := conj { "|" conj }              left-associative
//! conj    := unary { "&" unary }            left-associative
//! unary   := "~" unary | primary
//! primary := ATOM | "0" | "(" formula ")"
//! ATOM    := [A-Z][A-Za-z0-9_]*
//! ```
//!
//! `¬ ∧ ∨ → ⊥` are accepted as aliases of `~ & | -> 0`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    /// Byte offset into the input where the problem was detected.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    /// `expected` describes what the grammar allows here.
    Expected { expected: &'static str, found: String },
    UnbalancedParen,
    UnknownOperator(String),
    BadAtom(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => write!(f, "empty formula"),
            ParseErrorKind::Expected { expected, found } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnbalancedParen => write!(f, "unbalanced parentheses"),
            ParseErrorKind::UnknownOperator(op) => write!(f, "unknown operator `{op}`"),
            ParseErrorKind::BadAtom(name) => {
                write!(f, "atom `{name}` must match [A-Z][A-Za-z0-9_]*")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Atom(String),
    False,
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Atom(a) => format!("atom `{a}`"),
            Token::False => "`0`".into(),
            Token::Not => "`~`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Implies => "`->`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => None,
            '~' | '¬' => Some(Token::Not),
            '&' | '∧' => Some(Token::And),
            '|' | '∨' => Some(Token::Or),
            '→' => Some(Token::Implies),
            '0' | '⊥' => Some(Token::False),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            '-' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '>')) => {}
                    _ => {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::UnknownOperator("-".into()),
                        })
                    }
                }
                Some(Token::Implies)
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if !super::is_atom_name(&name) {
                    return Err(ParseError { offset, kind: ParseErrorKind::BadAtom(name) });
                }
                tokens.push((offset, Token::Atom(name)));
                continue;
            }
            other => {
                // Group runs of punctuation so `<->` is reported whole.
                let mut op = String::new();
                op.push(other);
                chars.next();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_punctuation() && !"()~&|".contains(c) {
                        op.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                return Err(ParseError { offset, kind: ParseErrorKind::UnknownOperator(op) });
            }
        };
        chars.next();
        if let Some(tok) = tok {
            tokens.push((offset, tok));
        }
    }
    tokens.push((text.len(), Token::End));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    open_parens: Vec<usize>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].1.clone();
        if tok != Token::End {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &'static str) -> ParseError {
        let found = self.peek();
        if *found == Token::RParen && self.open_parens.is_empty() {
            return ParseError { offset: self.offset(), kind: ParseErrorKind::UnbalancedParen };
        }
        if *found == Token::End && !self.open_parens.is_empty() {
            return ParseError {
                offset: *self.open_parens.last().unwrap(),
                kind: ParseErrorKind::UnbalancedParen,
            };
        }
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Expected { expected, found: found.describe() },
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Token::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Arc::new(lhs), Arc::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Token::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::Or(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Token::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::And(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Token::Not {
            self.bump();
            return Ok(Formula::Not(Arc::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Token::Atom(name) => {
                self.bump();
                Ok(Formula::Atom(Arc::from(name.as_str())))
            }
            Token::False => {
                self.bump();
                Ok(Formula::False)
            }
            Token::LParen => {
                self.open_parens.push(self.offset());
                self.bump();
                let inner = self.formula()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error("`)` or a binary operator"));
                }
                self.bump();
                self.open_parens.pop();
                Ok(inner)
            }
            _ => Err(self.error("an atom, `0`, `~` or `(`")),
        }
    }
}

/// Parses a formula. Whitespace is insignificant.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError { offset: 0, kind: ParseErrorKind::Empty });
    }
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, open_parens: Vec::new() };
    let f = parser.formula()?;
    if *parser.peek() != Token::End {
        return Err(parser.error("a binary operator or end of input"));
    }
    Ok(f)
}
