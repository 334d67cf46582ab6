//! Concrete syntax shared by every term language in the crate.
//!
//! One lexer feeds four recursive-descent grammars: CCS processes, HML
//! formulas, regular programs and PDL formulas. Programs and PDL formulas
//! are mutually recursive through tests (`p?`), so they live on the same
//! parser.

use thiserror::Error;

use crate::ccs::{Action, Process};
use crate::hml::HmlFormula;
use crate::pdl::PdlFormula;
use crate::regprog::{ProgramSyntax, RegProgram};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("grammar error at offset {pos}: {message}")]
    Grammar { pos: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::Grammar { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Zero,
    One,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Dot,
    Plus,
    Bar,
    Semi,
    Star,
    Question,
    Bang,
    Tilde,
    Amp,
    Implies,
    Iff,
    Eq,
    Le,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Zero => "`0`".into(),
            Tok::One => "`1`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Star => "`*`".into(),
            Tok::Question => "`?`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::Iff => "`<=>`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let peek = |k: usize| chars.get(i + k).map(|&(_, c)| c);
        let (tok, width) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '>' => (Tok::Gt, 1),
            '.' => (Tok::Dot, 1),
            '+' => (Tok::Plus, 1),
            '|' => (Tok::Bar, 1),
            ';' => (Tok::Semi, 1),
            '*' => (Tok::Star, 1),
            '?' => (Tok::Question, 1),
            '!' => (Tok::Bang, 1),
            '~' => (Tok::Tilde, 1),
            '&' => (Tok::Amp, 1),
            '<' => match (peek(1), peek(2)) {
                (Some('='), Some('>')) => (Tok::Iff, 3),
                (Some('='), _) => (Tok::Le, 2),
                _ => (Tok::Lt, 1),
            },
            '=' => match peek(1) {
                Some('>') => (Tok::Implies, 2),
                _ => (Tok::Eq, 1),
            },
            '0' | '1' if !peek(1).is_some_and(|c| c.is_ascii_digit()) => {
                (if c == '0' { Tok::Zero } else { Tok::One }, 1)
            }
            c if is_ident_start(c) => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_continue(chars[j].1) {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
                (Tok::Ident(text[pos..end].to_string()), j - i)
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, pos));
        i += width;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            idx: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.idx + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.idx].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            ))
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(format!("unexpected {}", self.peek().describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected {what}, found {}", other.describe())),
        }
    }

    // ---- CCS ---------------------------------------------------------------

    pub(crate) fn process(&mut self) -> Result<Process, ParseError> {
        if self.is_keyword("nu") {
            return self.restriction();
        }
        let mut left = self.sum()?;
        while self.eat(&Tok::Bar) {
            let right = if self.is_keyword("nu") {
                self.restriction()?
            } else {
                self.sum()?
            };
            left = Process::par(left, right);
        }
        Ok(left)
    }

    fn restriction(&mut self) -> Result<Process, ParseError> {
        self.bump();
        let name = self.channel()?;
        self.expect(Tok::Dot)?;
        let body = self.process()?;
        Ok(Process::restrict(name, body))
    }

    fn channel(&mut self) -> Result<String, ParseError> {
        let pos = self.pos();
        let name = self.ident("a channel name")?;
        if name == "tau" || name == "nu" {
            return Err(ParseError::Syntax {
                pos,
                message: format!("`{name}` is reserved and cannot name a channel"),
            });
        }
        Ok(name)
    }

    fn sum(&mut self) -> Result<Process, ParseError> {
        let first_pos = self.pos();
        let first = self.summand()?;
        if *self.peek() != Tok::Plus {
            return Ok(first);
        }
        let mut parts = vec![(first_pos, first)];
        while self.eat(&Tok::Plus) {
            let pos = self.pos();
            parts.push((pos, self.summand()?));
        }
        let mut summands = Vec::new();
        for (pos, part) in parts {
            match part {
                Process::Sum(s) => summands.extend(s),
                _ => {
                    return Err(ParseError::Grammar {
                        pos,
                        message: "every summand of a sum must be action-prefixed".into(),
                    })
                }
            }
        }
        Ok(Process::Sum(summands))
    }

    fn summand(&mut self) -> Result<Process, ParseError> {
        match self.peek() {
            Tok::Zero => {
                self.bump();
                Ok(Process::nil())
            }
            Tok::LParen => {
                self.bump();
                let p = self.process()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(s) if s == "nu" => self.restriction(),
            Tok::Ident(_) => {
                let action = self.action()?;
                self.expect(Tok::Dot)?;
                let cont = self.continuation()?;
                Ok(Process::prefix(action, cont))
            }
            other => self.error(format!("expected a process, found {}", other.describe())),
        }
    }

    fn continuation(&mut self) -> Result<Process, ParseError> {
        match self.peek() {
            Tok::Zero | Tok::LParen | Tok::Ident(_) => self.summand(),
            other => self.error(format!(
                "expected a continuation after `.`, found {}",
                other.describe()
            )),
        }
    }

    pub(crate) fn action(&mut self) -> Result<Action, ParseError> {
        if self.is_keyword("tau") {
            self.bump();
            return Ok(Action::Tau);
        }
        let name = self.channel()?;
        match self.peek() {
            Tok::Question => {
                self.bump();
                Ok(Action::Receive(name))
            }
            Tok::Bang => {
                self.bump();
                Ok(Action::Send(name))
            }
            other => self.error(format!(
                "expected `?` or `!` after channel `{name}`, found {}",
                other.describe()
            )),
        }
    }

    // ---- HML ---------------------------------------------------------------

    pub(crate) fn hml(&mut self) -> Result<HmlFormula, ParseError> {
        let left = self.hml_or()?;
        if self.eat(&Tok::Implies) {
            let right = self.hml()?;
            return Ok(HmlFormula::implies(left, right));
        }
        Ok(left)
    }

    fn hml_or(&mut self) -> Result<HmlFormula, ParseError> {
        let mut left = self.hml_and()?;
        while self.eat(&Tok::Bar) {
            let right = self.hml_and()?;
            left = HmlFormula::or(left, right);
        }
        Ok(left)
    }

    fn hml_and(&mut self) -> Result<HmlFormula, ParseError> {
        let mut left = self.hml_unary()?;
        while self.eat(&Tok::Amp) {
            let right = self.hml_unary()?;
            left = HmlFormula::and(left, right);
        }
        Ok(left)
    }

    fn hml_unary(&mut self) -> Result<HmlFormula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(HmlFormula::not(self.hml_unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let a = self.action()?;
                self.expect(Tok::RBrack)?;
                Ok(HmlFormula::necessarily(a, self.hml_unary()?))
            }
            Tok::Lt => {
                self.bump();
                let a = self.action()?;
                self.expect(Tok::Gt)?;
                Ok(HmlFormula::possibly(a, self.hml_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.hml()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(HmlFormula::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(HmlFormula::falsity())
            }
            other => self.error(format!(
                "expected an HML formula, found {}",
                other.describe()
            )),
        }
    }

    // ---- regular programs ----------------------------------------------------

    pub(crate) fn program(&mut self, syntax: ProgramSyntax) -> Result<RegProgram, ParseError> {
        let mut left = self.program_seq(syntax)?;
        while self.eat(&Tok::Plus) {
            let right = self.program_seq(syntax)?;
            left = RegProgram::choice(left, right);
        }
        Ok(left)
    }

    fn program_seq(&mut self, syntax: ProgramSyntax) -> Result<RegProgram, ParseError> {
        let mut left = self.program_postfix(syntax)?;
        while self.eat(&Tok::Semi) {
            let right = self.program_postfix(syntax)?;
            left = RegProgram::seq(left, right);
        }
        Ok(left)
    }

    fn program_postfix(&mut self, syntax: ProgramSyntax) -> Result<RegProgram, ParseError> {
        let mut p = self.program_atom(syntax)?;
        while self.eat(&Tok::Star) {
            p = RegProgram::star(p);
        }
        Ok(p)
    }

    fn test_not_allowed<T>(&self, pos: usize) -> Result<T, ParseError> {
        Err(ParseError::Grammar {
            pos,
            message: "tests `φ?` are only allowed in PDL programs".into(),
        })
    }

    fn program_atom(&mut self, syntax: ProgramSyntax) -> Result<RegProgram, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Zero | Tok::One => {
                if !syntax.constants {
                    return Err(ParseError::Grammar {
                        pos,
                        message: "constants 0 and 1 are only allowed in Kleene-algebra terms"
                            .into(),
                    });
                }
                let t = self.bump();
                Ok(if t == Tok::Zero {
                    RegProgram::Zero
                } else {
                    RegProgram::One
                })
            }
            Tok::LParen => {
                let save = self.idx;
                self.bump();
                let attempt = self.program(syntax).and_then(|p| {
                    self.expect(Tok::RParen)?;
                    Ok(p)
                });
                match attempt {
                    Ok(p) if *self.peek() != Tok::Question => Ok(p),
                    Ok(_) if !syntax.tests => self.test_not_allowed(pos),
                    Err(e) if !syntax.tests => Err(e),
                    _ => {
                        self.idx = save;
                        self.bump();
                        let f = self.pdl()?;
                        self.expect(Tok::RParen)?;
                        self.expect(Tok::Question)?;
                        Ok(RegProgram::test(f))
                    }
                }
            }
            Tok::Tilde => {
                if !syntax.tests {
                    return self.error("expected a program, found `~`");
                }
                let f = self.pdl_unary()?;
                self.expect(Tok::Question)?;
                Ok(RegProgram::test(f))
            }
            Tok::Ident(name) => {
                if *self.peek_at(1) == Tok::Question || name == "true" || name == "false" {
                    if !syntax.tests {
                        return self.test_not_allowed(pos);
                    }
                    let f = self.pdl_unary()?;
                    self.expect(Tok::Question)?;
                    return Ok(RegProgram::test(f));
                }
                self.bump();
                Ok(RegProgram::Prim(name))
            }
            other => self.error(format!("expected a program, found {}", other.describe())),
        }
    }

    // ---- PDL -----------------------------------------------------------------

    pub(crate) fn pdl(&mut self) -> Result<PdlFormula, ParseError> {
        let left = self.pdl_implies()?;
        if self.eat(&Tok::Iff) {
            let right = self.pdl_implies()?;
            return Ok(PdlFormula::iff(left, right));
        }
        Ok(left)
    }

    fn pdl_implies(&mut self) -> Result<PdlFormula, ParseError> {
        let left = self.pdl_or()?;
        if self.eat(&Tok::Implies) {
            let right = self.pdl_implies()?;
            return Ok(PdlFormula::implies(left, right));
        }
        Ok(left)
    }

    fn pdl_or(&mut self) -> Result<PdlFormula, ParseError> {
        let mut left = self.pdl_and()?;
        while self.eat(&Tok::Bar) {
            let right = self.pdl_and()?;
            left = PdlFormula::or(left, right);
        }
        Ok(left)
    }

    fn pdl_and(&mut self) -> Result<PdlFormula, ParseError> {
        let mut left = self.pdl_unary()?;
        while self.eat(&Tok::Amp) {
            let right = self.pdl_unary()?;
            left = PdlFormula::and(left, right);
        }
        Ok(left)
    }

    fn pdl_unary(&mut self) -> Result<PdlFormula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(PdlFormula::not(self.pdl_unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let p = self.program(ProgramSyntax::DYNAMIC)?;
                self.expect(Tok::RBrack)?;
                Ok(PdlFormula::necessarily(p, self.pdl_unary()?))
            }
            Tok::Lt => {
                self.bump();
                let p = self.program(ProgramSyntax::DYNAMIC)?;
                self.expect(Tok::Gt)?;
                Ok(PdlFormula::possibly(p, self.pdl_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.pdl()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(PdlFormula::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(PdlFormula::falsity())
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(PdlFormula::Prop(s))
            }
            other => self.error(format!(
                "expected a PDL formula, found {}",
                other.describe()
            )),
        }
    }

    // ---- Kleene-algebra equations --------------------------------------------

    /// `lhs = rhs` or `lhs <= rhs`; the flag reports which.
    pub(crate) fn equation(&mut self) -> Result<(RegProgram, RegProgram, bool), ParseError> {
        let lhs = self.program(ProgramSyntax::KLEENE)?;
        let is_le = match self.peek() {
            Tok::Eq => false,
            Tok::Le => true,
            other => {
                return self.error(format!("expected `=` or `<=`, found {}", other.describe()))
            }
        };
        self.bump();
        let rhs = self.program(ProgramSyntax::KLEENE)?;
        Ok((lhs, rhs, is_le))
    }
}

/// Runs `f` over the whole input and rejects trailing tokens.
pub(crate) fn parse_all<T>(
    text: &str,
    f: impl FnOnce(&mut Parser) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let mut p = Parser::new(text)?;
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}
