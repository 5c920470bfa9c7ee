//! Concrete syntax: parser and printer for formulas and types.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::syntax::{self, Binding, Formula, Kind};
use crate::typesys::{HflType, Variance};

/// Byte offsets into the parsed text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}..{}", self.message, self.span.start, self.span.end)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Nat(usize),
    Bang,
    Bar,
    Amp,
    Arrow,
    Iff,
    Lt,
    Gt,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Backslash,
    Colon,
    Dot,
    Semi,
    Var(Variance),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            Tok::Var(v) => format!("`{}`", v.suffix()),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Bang => "!",
            Tok::Bar => "|",
            Tok::Amp => "&",
            Tok::Arrow => "->",
            Tok::Iff => "<->",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Backslash => "\\",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Semi => ";",
            _ => "",
        }
    }
}

const KEYWORDS: &[&str] = &["mu", "nu", "fix", "tt", "ff", "true", "false", "Pr"];

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |start: usize, end: usize, message: &str| ParseError {
        span: SourceSpan { start, end },
        message: message.into(),
        expected: Vec::new(),
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("^+") {
            (Tok::Var(Variance::Plus), 2)
        } else if rest.starts_with("^-") {
            (Tok::Var(Variance::Minus), 2)
        } else if rest.starts_with("^0") {
            (Tok::Var(Variance::Zero), 2)
        } else if c.is_ascii_alphabetic() {
            let mut j = i;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'') {
                j += 1;
            }
            let word = text[i..j].to_string();
            let tok = if c.is_ascii_uppercase() { Tok::Upper(word) } else { Tok::Lower(word) };
            (tok, j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let n = text[i..j].parse().map_err(|_| err(i, j, "number too large"))?;
            (Tok::Nat(n), j - i)
        } else {
            let tok = match c {
                b'!' => Tok::Bang,
                b'|' => Tok::Bar,
                b'&' => Tok::Amp,
                b'<' => Tok::Lt,
                b'>' => Tok::Gt,
                b'[' => Tok::LBrack,
                b']' => Tok::RBrack,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b':' => Tok::Colon,
                b'.' => Tok::Dot,
                b';' => Tok::Semi,
                b'\\' => {
                    let next = text[i + 1..].trim_start().as_bytes().first().copied();
                    if next != Some(b'(') {
                        return Err(err(i, i + 1, "unknown escape"));
                    }
                    Tok::Backslash
                }
                _ => {
                    let w = rest.chars().next().map_or(1, char::len_utf8);
                    return Err(err(i, i + w, "unexpected character"));
                }
            };
            (tok, 1)
        };
        out.push((tok, SourceSpan { start, end: start + len }));
        i += len;
    }
    let end = text.len();
    out.push((Tok::Eof, SourceSpan { start: end.saturating_sub(1), end }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            span: self.span(),
            message: format!("unexpected {}", self.peek().describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{}`", tok.symbol())])
        }
    }

    fn lower(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Tok::Lower(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail(&[what]),
        }
    }

    fn upper(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Upper(s) if s != "Pr" => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail(&["variable"]),
        }
    }

    fn variance(&mut self) -> Option<Variance> {
        match self.peek() {
            Tok::Var(v) => {
                let v = *v;
                self.bump();
                Some(v)
            }
            _ => None,
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let g = self.implication()?;
            f = syntax::iff(f, g);
        }
        Ok(f)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let f = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let g = self.implication()?;
            return Ok(syntax::implies(f, g));
        }
        Ok(f)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let g = self.conjunction()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let g = self.unary()?;
            f = syntax::and(f, g);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            Tok::Lt => {
                self.bump();
                let a = self.lower("action")?;
                self.expect(Tok::Gt)?;
                Ok(Formula::dia(&a, self.unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let a = self.lower("action")?;
                self.expect(Tok::RBrack)?;
                Ok(syntax::box_(&a, self.unary()?))
            }
            _ => self.application(),
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Lower(_) | Tok::Upper(_) | Tok::LParen | Tok::Backslash => true,
            _ => false,
        }
    }

    fn application(&mut self) -> PResult<Formula> {
        let mut f = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            f = Formula::app(f, arg);
        }
        Ok(f)
    }

    fn atom(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Lower(s) => match s.as_str() {
                "tt" | "true" => {
                    self.bump();
                    Ok(syntax::tt())
                }
                "ff" | "false" => {
                    self.bump();
                    Ok(syntax::ff())
                }
                "mu" | "nu" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let x = self.upper()?;
                    self.expect(Tok::Colon)?;
                    let ty = self.ty()?;
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::Dot)?;
                    let body = self.formula()?;
                    Ok(if s == "mu" { Formula::mu(&x, ty, body) } else { syntax::nu(&x, ty, body) })
                }
                "fix" => {
                    self.bump();
                    let index = match self.peek() {
                        Tok::Nat(n) if *n >= 1 => *n,
                        _ => return self.fail(&["component index (starting at 1)"]),
                    };
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let mut bindings = Vec::new();
                    loop {
                        let x = self.upper()?;
                        self.expect(Tok::Colon)?;
                        let ty = self.ty()?;
                        self.expect(Tok::Dot)?;
                        let body = self.formula()?;
                        bindings.push(Binding { var: x.into(), ty, body });
                        if *self.peek() == Tok::Semi {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let close = self.span();
                    self.expect(Tok::RParen)?;
                    if index > bindings.len() {
                        return Err(ParseError {
                            span: close,
                            message: format!("component index {index} exceeds {} bindings", bindings.len()),
                            expected: Vec::new(),
                        });
                    }
                    Ok(Formula::mu_vec(index - 1, bindings))
                }
                _ => {
                    let p = self.lower("proposition")?;
                    Ok(Formula::prop(&p))
                }
            },
            Tok::Upper(_) => {
                let x = self.upper()?;
                Ok(Formula::var(&x))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Backslash => {
                self.bump();
                self.expect(Tok::LParen)?;
                let x = self.upper()?;
                let inner = self.variance();
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::RParen)?;
                let at = self.span();
                let outer = self.variance();
                let variance = match (inner, outer) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(ParseError {
                            span: at,
                            message: "conflicting variance annotations".into(),
                            expected: Vec::new(),
                        })
                    }
                    (a, b) => a.or(b).unwrap_or(Variance::Plus),
                };
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(Formula::lam(&x, variance, ty, body))
            }
            _ => self.fail(&["proposition", "variable", "`tt`", "`ff`", "`(`", "`\\`", "`mu`", "`nu`", "`fix`"]),
        }
    }

    fn ty(&mut self) -> PResult<HflType> {
        let arg = match self.peek() {
            Tok::Upper(s) if s == "Pr" => {
                self.bump();
                HflType::Pr
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                t
            }
            _ => return self.fail(&["`Pr`", "`(`"]),
        };
        let v = self.variance();
        if *self.peek() == Tok::Arrow {
            self.bump();
            let res = self.ty()?;
            return Ok(HflType::arrow(arg, v.unwrap_or(Variance::Plus), res));
        }
        if v.is_some() {
            return self.fail(&["`->`"]);
        }
        Ok(arg)
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.fail(&["end of input"])
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_type(text: &str) -> Result<HflType, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

const BINDER: u8 = 0;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;
const APP: u8 = 6;
const ATOM: u8 = 7;

struct Printer {
    out: String,
    full: bool,
}

fn as_and(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Kind::Neg(g) = f.kind() {
        if let Kind::Or(a, b) = g.kind() {
            if let (Kind::Neg(a), Kind::Neg(b)) = (a.kind(), b.kind()) {
                return Some((a, b));
            }
        }
    }
    None
}

fn as_box(f: &Formula) -> Option<(&str, &Formula)> {
    if let Kind::Neg(g) = f.kind() {
        if let Kind::Dia(a, h) = g.kind() {
            if let Kind::Neg(body) = h.kind() {
                return Some((a, body));
            }
        }
    }
    None
}

fn level(f: &Formula) -> u8 {
    if f.is_tt() || f.is_ff() {
        return ATOM;
    }
    if as_and(f).is_some() {
        return AND;
    }
    match f.kind() {
        Kind::Prop(_) | Kind::Var(_) | Kind::MuVec { .. } => ATOM,
        Kind::Neg(_) | Kind::Dia(..) => UNARY,
        Kind::Or(..) => OR,
        Kind::App(..) => APP,
        Kind::Lam { .. } | Kind::Mu { .. } => BINDER,
    }
}

impl Printer {
    fn print(&mut self, f: &Formula, ctx: u8, rightmost: bool) {
        let lvl = level(f);
        let compound = lvl != ATOM || matches!(f.kind(), Kind::MuVec { .. });
        let paren = if self.full {
            compound && ctx > BINDER
        } else {
            lvl < ctx && lvl != BINDER || lvl == BINDER && !rightmost
        };
        if paren {
            self.out.push('(');
            self.bare(f, true);
            self.out.push(')');
        } else {
            self.bare(f, rightmost);
        }
    }

    fn bare(&mut self, f: &Formula, rightmost: bool) {
        if f.is_tt() {
            self.out.push_str("tt");
            return;
        }
        if f.is_ff() {
            self.out.push_str("ff");
            return;
        }
        if let Some((a, b)) = as_and(f) {
            self.print(a, AND, false);
            self.out.push_str(" & ");
            self.print(b, UNARY, rightmost);
            return;
        }
        if let Some((a, body)) = as_box(f) {
            let _ = write!(self.out, "[{a}]");
            self.print(body, UNARY, rightmost);
            return;
        }
        match f.kind() {
            Kind::Prop(p) => self.out.push_str(p),
            Kind::Var(x) => self.out.push_str(x),
            Kind::Neg(g) => {
                self.out.push('!');
                self.print(g, UNARY, rightmost);
            }
            Kind::Or(a, b) => {
                self.print(a, OR, false);
                self.out.push_str(" | ");
                self.print(b, AND, rightmost);
            }
            Kind::Dia(a, g) => {
                let _ = write!(self.out, "<{a}>");
                self.print(g, UNARY, rightmost);
            }
            Kind::App(g, h) => {
                self.print(g, APP, false);
                self.out.push(' ');
                self.print(h, ATOM, rightmost);
            }
            Kind::Lam { var, variance, ty, body } => {
                let _ = write!(self.out, "\\({var}:{ty})");
                if *variance != Variance::Plus {
                    self.out.push_str(variance.suffix());
                }
                self.out.push_str(". ");
                self.print(body, BINDER, rightmost);
            }
            Kind::Mu { var, ty, body } => {
                let _ = write!(self.out, "mu ({var}:{ty}). ");
                self.print(body, BINDER, rightmost);
            }
            Kind::MuVec { index, bindings } => {
                let _ = write!(self.out, "fix {} (", index + 1);
                for (i, b) in bindings.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str("; ");
                    }
                    let _ = write!(self.out, "{}:{}. ", b.var, b.ty);
                    self.print(&b.body, BINDER, true);
                }
                self.out.push(')');
            }
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut p = Printer { out: String::new(), full: false };
    p.print(f, BINDER, true);
    p.out
}

/// Prints with every compound subformula parenthesized.
pub fn print_formula_full(f: &Formula) -> String {
    let mut p = Printer { out: String::new(), full: true };
    p.print(f, BINDER, true);
    p.out
}
