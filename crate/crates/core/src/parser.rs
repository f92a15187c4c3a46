//! Concrete ASCII syntax for CCS terms and `.ccs` workspace files.
//!
//! ```text
//! sum     := par ('+' par)*
//! par     := restr ('|' restr)*
//! restr   := 'new' labels restr | '(' '\' labels ')' restr | postfix
//! postfix := prefix ('[' (label '->' label),* ']')*
//! prefix  := action '.' prefix | atom
//! atom    := '0' | CONST | '(' sum ')'
//! action  := 'tau' | label | '\'' label
//! labels  := '{' label,* '}'
//! ```
//!
//! A workspace file is an optional `alphabet a, b;` header followed by
//! `agent NAME = TERM;` definitions. `#` and `//` start line comments.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result, SourceSpan};
use crate::syntax::{Action, ConstName, Environment, LabelId, ProcessTerm, Relabeling};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Zero,
    Tick,
    Dot,
    Plus,
    Bar,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Arrow,
    Backslash,
    Semi,
    Equals,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Lower(s) | Tok::Upper(s) => return write!(f, "`{s}`"),
            Tok::Zero => "`0`",
            Tok::Tick => "`'`",
            Tok::Dot => "`.`",
            Tok::Plus => "`+`",
            Tok::Bar => "`|`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Arrow => "`->`",
            Tok::Backslash => "`\\`",
            Tok::Semi => "`;`",
            Tok::Equals => "`=`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn syntax(message: impl Into<String>, span: SourceSpan) -> Error {
    Error::Syntax { message: message.into(), span }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = SourceSpan { line, column: col, length: 1 };
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
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[begin..i].iter().collect();
            let span = SourceSpan { length: i - begin, ..start };
            col += i - begin;
            let tok = if c.is_ascii_uppercase() { Tok::Upper(word) } else { Tok::Lower(word) };
            out.push(Token { tok, span });
            continue;
        }
        let (tok, len) = match c {
            '0' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric()) => (Tok::Zero, 1),
            '\'' => (Tok::Tick, 1),
            '.' => (Tok::Dot, 1),
            '+' => (Tok::Plus, 1),
            '|' => (Tok::Bar, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            '=' => (Tok::Equals, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            // `\}` is accepted as a closing brace so that `(\{a\}) P` works.
            '\\' if chars.get(i + 1) == Some(&'}') => (Tok::RBrace, 2),
            '\\' => (Tok::Backslash, 1),
            other => return Err(syntax(format!("unexpected character `{other}`"), start)),
        };
        out.push(Token { tok, span: SourceSpan { length: len, ..start } });
        i += len;
        col += len;
    }
    out.push(Token { tok: Tok::Eof, span: SourceSpan { line, column: col, length: 0 } });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(format!("expected {want}, found {}", self.peek()), self.span()))
        }
    }

    fn unexpected<T>(&self, what: &str) -> Result<T> {
        Err(syntax(format!("expected {what}, found {}", self.peek()), self.span()))
    }

    fn label(&mut self) -> Result<LabelId> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Lower(s) => {
                let id = LabelId::new(&s).map_err(|_| syntax(format!("`{s}` is reserved"), span))?;
                self.bump();
                Ok(id)
            }
            _ => self.unexpected("a label name"),
        }
    }

    fn label_set(&mut self) -> Result<Vec<LabelId>> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RBrace {
            out.push(self.label()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                out.push(self.label()?);
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    fn sum(&mut self) -> Result<ProcessTerm> {
        let mut left = self.par()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let right = self.par()?;
            left = ProcessTerm::sum(left, right);
        }
        Ok(left)
    }

    fn par(&mut self) -> Result<ProcessTerm> {
        let mut left = self.restr()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.restr()?;
            left = ProcessTerm::par(left, right);
        }
        Ok(left)
    }

    fn restr(&mut self) -> Result<ProcessTerm> {
        match self.peek() {
            Tok::Lower(s) if s == "new" => {
                self.bump();
                let hidden = self.label_set()?;
                Ok(ProcessTerm::restr(hidden, self.restr()?))
            }
            Tok::LParen if *self.peek_at(1) == Tok::Backslash => {
                self.bump();
                self.bump();
                let hidden = self.label_set()?;
                self.expect(Tok::RParen)?;
                Ok(ProcessTerm::restr(hidden, self.restr()?))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<ProcessTerm> {
        let mut body = self.prefix()?;
        while *self.peek() == Tok::LBracket {
            self.bump();
            let map = self.relabeling_body(Tok::RBracket)?;
            self.expect(Tok::RBracket)?;
            body = ProcessTerm::relab(body, map);
        }
        Ok(body)
    }

    fn relabeling_body(&mut self, close: Tok) -> Result<Relabeling> {
        let mut map = BTreeMap::new();
        if *self.peek() != close {
            loop {
                let span = self.span();
                let from = self.label()?;
                self.expect(Tok::Arrow)?;
                let to = self.label()?;
                if map.insert(from.clone(), to).is_some() {
                    return Err(syntax(format!("`{from}` is relabelled twice"), span));
                }
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
        }
        Ok(Relabeling::new(map))
    }

    fn action(&mut self) -> Result<Action> {
        match self.peek().clone() {
            Tok::Lower(s) if s == "tau" => {
                self.bump();
                Ok(Action::Tau)
            }
            Tok::Tick => {
                self.bump();
                Ok(Action::coname(self.label()?))
            }
            _ => Ok(Action::name(self.label()?)),
        }
    }

    fn prefix(&mut self) -> Result<ProcessTerm> {
        match self.peek() {
            Tok::Lower(s) if s != "new" => {}
            Tok::Tick => {}
            _ => return self.atom(),
        }
        let action = self.action()?;
        self.expect(Tok::Dot)?;
        Ok(ProcessTerm::prefix(action, self.prefix()?))
    }

    fn atom(&mut self) -> Result<ProcessTerm> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Zero => {
                self.bump();
                Ok(ProcessTerm::Nil)
            }
            Tok::Upper(s) => {
                self.bump();
                let name = ConstName::new(&s).map_err(|e| syntax(e.to_string(), span))?;
                Ok(ProcessTerm::constant(name))
            }
            Tok::LParen => {
                self.bump();
                let t = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a process term"),
        }
    }

    fn finish(&mut self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Lower(s) if s == kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn workspace(&mut self) -> Result<Environment> {
        let mut alphabet = None;
        let mut defs: Vec<(ConstName, ProcessTerm)> = Vec::new();
        loop {
            let span = self.span();
            if *self.peek() == Tok::Eof {
                break;
            } else if self.keyword("alphabet") {
                if alphabet.is_some() || !defs.is_empty() {
                    return Err(syntax("`alphabet` must appear once, before any agent", span));
                }
                let mut labels = Vec::new();
                if *self.peek() != Tok::Semi {
                    labels.push(self.label()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        labels.push(self.label()?);
                    }
                }
                self.expect(Tok::Semi)?;
                alphabet = Some(labels);
            } else if self.keyword("agent") {
                let name_span = self.span();
                let name = match self.bump() {
                    Tok::Upper(s) => ConstName::new(&s).map_err(|e| syntax(e.to_string(), name_span))?,
                    other => return Err(syntax(format!("expected a constant name, found {other}"), name_span)),
                };
                self.expect(Tok::Equals)?;
                let body = self.sum()?;
                self.expect(Tok::Semi)?;
                defs.push((name, body));
            } else {
                return self.unexpected("`alphabet` or `agent`");
            }
        }
        let alphabet = match alphabet {
            Some(a) => a,
            None => {
                let mut seen = indexmap::IndexSet::new();
                for (_, body) in &defs {
                    seen.extend(body.mentioned_labels());
                }
                seen.into_iter().collect()
            }
        };
        Environment::new(alphabet, defs)
    }
}

pub fn parse_term(src: &str) -> Result<ProcessTerm> {
    let mut p = Parser::new(src)?;
    let t = p.sum()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_action(src: &str) -> Result<Action> {
    let mut p = Parser::new(src)?;
    let a = p.action()?;
    p.finish()?;
    Ok(a)
}

pub fn parse_label(src: &str) -> Result<LabelId> {
    let mut p = Parser::new(src)?;
    let a = p.label()?;
    p.finish()?;
    Ok(a)
}

/// Parses `{a, b}` (braces optional).
pub fn parse_label_set(src: &str) -> Result<Vec<LabelId>> {
    let trimmed = src.trim();
    let wrapped;
    let src = if trimmed.starts_with('{') {
        trimmed
    } else {
        wrapped = format!("{{{trimmed}}}");
        &wrapped
    };
    let mut p = Parser::new(src)?;
    let set = p.label_set()?;
    p.finish()?;
    Ok(set)
}

/// Parses `a->b, c->d` (square brackets optional).
pub fn parse_relabeling(src: &str) -> Result<Relabeling> {
    let mut p = Parser::new(src)?;
    let bracketed = *p.peek() == Tok::LBracket;
    if bracketed {
        p.bump();
    }
    let close = if bracketed { Tok::RBracket } else { Tok::Eof };
    let map = p.relabeling_body(close)?;
    if bracketed {
        p.expect(Tok::RBracket)?;
    }
    p.finish()?;
    Ok(map)
}

pub fn parse_workspace(src: &str) -> Result<Environment> {
    Parser::new(src)?.workspace()
}

const SUM: u8 = 0;
const PAR: u8 = 1;
const RESTR: u8 = 2;
const PREFIX: u8 = 3;
const ATOM: u8 = 4;

fn level(p: &ProcessTerm) -> u8 {
    match p {
        ProcessTerm::Sum { .. } => SUM,
        ProcessTerm::Par { .. } => PAR,
        ProcessTerm::Restr { .. } | ProcessTerm::Relab { .. } => RESTR,
        ProcessTerm::Prefix { .. } => PREFIX,
        ProcessTerm::Nil | ProcessTerm::Const { .. } => ATOM,
    }
}

fn write_list<T: fmt::Display>(out: &mut String, items: impl IntoIterator<Item = T>) {
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{item}");
    }
}

fn write_term(out: &mut String, p: &ProcessTerm, min: u8) {
    let paren = level(p) < min;
    if paren {
        out.push('(');
    }
    match p {
        ProcessTerm::Nil => out.push('0'),
        ProcessTerm::Const { name } => out.push_str(name.as_str()),
        ProcessTerm::Prefix { action, body } => {
            let _ = write!(out, "{action}.");
            write_term(out, body, PREFIX);
        }
        ProcessTerm::Sum { left, right } => {
            write_term(out, left, SUM);
            out.push_str(" + ");
            write_term(out, right, PAR);
        }
        ProcessTerm::Par { left, right } => {
            write_term(out, left, PAR);
            out.push_str(" | ");
            write_term(out, right, RESTR);
        }
        ProcessTerm::Restr { hidden, body } => {
            out.push_str("new {");
            write_list(out, hidden);
            out.push_str("} ");
            write_term(out, body, RESTR);
        }
        ProcessTerm::Relab { body, map } => {
            write_term(out, body, PREFIX);
            out.push('[');
            write_list(out, map.map().iter().map(|(a, b)| format!("{a}->{b}")));
            out.push(']');
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn print_term(p: &ProcessTerm) -> String {
    let mut out = String::new();
    write_term(&mut out, p, SUM);
    out
}

impl fmt::Display for ProcessTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

/// Canonical text of a workspace: the alphabet header followed by one
/// `agent` line per definition, in declaration order.
pub fn print_workspace(env: &Environment) -> String {
    let mut out = String::from("alphabet");
    if env.alphabet_len() > 0 {
        out.push(' ');
        write_list(&mut out, env.alphabet());
    }
    out.push_str(";\n");
    for (name, body) in env.definitions() {
        let _ = writeln!(out, "agent {name} = {};", print_term(body));
    }
    out
}
