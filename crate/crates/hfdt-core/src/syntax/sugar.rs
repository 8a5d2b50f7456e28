//! Surface syntax.
//!
//! ```text
//! stmt    ::= term ':' term | term '|>' term | term '|>=' term
//! term    ::= binder | '(' name ':' term ')' arrow term | app [arrow term]
//! binder  ::= ('lam' | 'pi' ['[' m ',' n ']'] | 'forall') name ':' term '.' term
//! arrow   ::= '->' | '->[' m ',' n ']'
//! app     ::= unary+ [binder]
//! unary   ::= 'neg' primary | 'and' primary primary | 'rho' primary | primary
//! primary ::= name | 'bot' | 'top' | 'u'k | 'p[' m ',' n ']' | '(' term ')'
//! ```
//!
//! Names `vK` and `cK` denote variables and constants directly. In system 2,
//! `cK` is the K-th user constant, `uK` a sort and `p[m,n]` an operator, and
//! every arrow and `pi` needs explicit indices. `bot`, `top`, `neg`, `and`,
//! `forall` and `rho` are keywords of system 1 only. Other names are resolved
//! through an [`AtomTable`]; unknown names become fresh variables.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{mk_arrow, mk_arrow2, mk_pi, mk_pi2, as_pi, as_pi2, Const2, Logic1, SyntaxError, System, Term, VarId};
use crate::binding::{free_vars, is_free_in};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Num(u32),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Dot,
    Arrow,
    Red,
    SubRed,
}

fn is_name_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_' || c == b'*'
}

fn is_name_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'*' || c == b'\''
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b',' => Tok::Comma,
            b':' => Tok::Colon,
            b'.' => Tok::Dot,
            b'-' if b.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'|' if b.get(i + 1) == Some(&b'>') => {
                i += 1;
                if b.get(i + 1) == Some(&b'=') {
                    i += 1;
                    Tok::SubRed
                } else {
                    Tok::Red
                }
            }
            d if d.is_ascii_digit() => {
                let mut n: u32 = 0;
                while i < b.len() && b[i].is_ascii_digit() {
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add((b[i] - b'0') as u32))
                        .ok_or_else(|| SyntaxError::at(start, "number too large"))?;
                    i += 1;
                }
                out.push((Tok::Num(n), start));
                continue;
            }
            s if is_name_start(s) => {
                while i < b.len() && is_name_char(b[i]) {
                    i += 1;
                }
                out.push((Tok::Name(src[start..i].to_string()), start));
                continue;
            }
            _ => return Err(SyntaxError::at(start, format!("unexpected character '{}'", c as char))),
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

/// Surface AST before name resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SugarTerm {
    Name(String),
    Sort(u32),
    Op(u32, u32),
    Bot,
    Top,
    Neg(Box<SugarTerm>),
    And(Box<SugarTerm>, Box<SugarTerm>),
    Rho(Box<SugarTerm>),
    App(Box<SugarTerm>, Box<SugarTerm>),
    Lam(String, Box<SugarTerm>, Box<SugarTerm>),
    /// `pi x : R . S` or `(x : R) -> S`; indices present in system 2.
    Pi(Option<(u32, u32)>, String, Box<SugarTerm>, Box<SugarTerm>),
    /// `R -> S`.
    Arrow(Option<(u32, u32)>, Box<SugarTerm>, Box<SugarTerm>),
    Forall(String, Box<SugarTerm>, Box<SugarTerm>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StmtKind {
    Typing,
    Reduction,
    SubReduction,
}

impl StmtKind {
    pub fn symbol(self) -> &'static str {
        match self {
            StmtKind::Typing => ":",
            StmtKind::Reduction => "|>",
            StmtKind::SubReduction => "|>=",
        }
    }
}

const KEYWORDS_1: &[&str] = &["lam", "pi", "forall", "bot", "top", "neg", "and", "rho"];
const KEYWORDS_2: &[&str] = &["lam", "pi"];

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    system: System,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::at(self.here(), msg))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {}", what))
        }
    }

    fn is_keyword(&self, name: &str) -> bool {
        let kws = match self.system {
            System::One => KEYWORDS_1,
            System::Two => KEYWORDS_2,
        };
        kws.contains(&name)
    }

    fn keyword(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Name(n)) if self.is_keyword(n) => Some(n.as_str()),
            _ => None,
        }
    }

    fn binder_name(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Name(n)) if !self.is_keyword(n) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected a binder name"),
        }
    }

    fn indices(&mut self) -> Result<(u32, u32), SyntaxError> {
        self.expect(Tok::LBrack, "'['")?;
        let m = self.num()?;
        self.expect(Tok::Comma, "','")?;
        let n = self.num()?;
        self.expect(Tok::RBrack, "']'")?;
        Ok((m, n))
    }

    fn num(&mut self) -> Result<u32, SyntaxError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected a number"),
        }
    }

    /// Parses an arrow token and its optional indices.
    fn arrow(&mut self) -> Result<Option<(u32, u32)>, SyntaxError> {
        let at = self.here();
        self.expect(Tok::Arrow, "'->'")?;
        let idx = if self.peek() == Some(&Tok::LBrack) { Some(self.indices()?) } else { None };
        match (self.system, idx) {
            (System::One, Some(_)) => Err(SyntaxError::at(at, "indexed arrows belong to system 2")),
            (System::Two, None) => Err(SyntaxError::at(at, "system 2 arrows need indices ->[m,n]")),
            _ => Ok(idx),
        }
    }

    fn is_dep_arrow_start(&self) -> bool {
        matches!(
            (self.peek(), self.peek_at(1), self.peek_at(2)),
            (Some(Tok::LParen), Some(Tok::Name(n)), Some(Tok::Colon)) if !self.is_keyword(n)
        )
    }

    fn term(&mut self) -> Result<SugarTerm, SyntaxError> {
        if matches!(self.keyword(), Some("lam" | "pi" | "forall")) {
            return self.binder();
        }
        if self.is_dep_arrow_start() {
            self.pos += 1;
            let x = self.binder_name()?;
            self.expect(Tok::Colon, "':'")?;
            let r = self.term()?;
            self.expect(Tok::RParen, "')'")?;
            let idx = self.arrow()?;
            let s = self.term()?;
            return Ok(SugarTerm::Pi(idx, x, Box::new(r), Box::new(s)));
        }
        let lhs = self.app()?;
        if self.peek() == Some(&Tok::Arrow) {
            let idx = self.arrow()?;
            let rhs = self.term()?;
            return Ok(SugarTerm::Arrow(idx, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn binder(&mut self) -> Result<SugarTerm, SyntaxError> {
        let at = self.here();
        let kw = match self.bump() {
            Some(Tok::Name(n)) => n,
            _ => unreachable!(),
        };
        let idx = if kw == "pi" && self.peek() == Some(&Tok::LBrack) { Some(self.indices()?) } else { None };
        if kw == "pi" {
            match (self.system, idx) {
                (System::One, Some(_)) => return Err(SyntaxError::at(at, "indexed pi belongs to system 2")),
                (System::Two, None) => return Err(SyntaxError::at(at, "system 2 pi needs indices pi[m,n]")),
                _ => {}
            }
        }
        let x = self.binder_name()?;
        self.expect(Tok::Colon, "':'")?;
        let r = self.term()?;
        self.expect(Tok::Dot, "'.'")?;
        let s = self.term()?;
        let (r, s) = (Box::new(r), Box::new(s));
        Ok(match kw.as_str() {
            "lam" => SugarTerm::Lam(x, r, s),
            "pi" => SugarTerm::Pi(idx, x, r, s),
            _ => SugarTerm::Forall(x, r, s),
        })
    }

    fn starts_primary(&self) -> bool {
        match self.peek() {
            Some(Tok::LParen) => true,
            Some(Tok::Name(n)) => !matches!(n.as_str(), "lam" | "pi" | "forall") || !self.is_keyword(n),
            _ => false,
        }
    }

    fn app(&mut self) -> Result<SugarTerm, SyntaxError> {
        if !self.starts_primary() {
            return self.err("expected a term");
        }
        let mut acc = self.unary()?;
        loop {
            if matches!(self.keyword(), Some("lam" | "pi" | "forall")) {
                let b = self.binder()?;
                return Ok(SugarTerm::App(Box::new(acc), Box::new(b)));
            }
            if !self.starts_primary() {
                return Ok(acc);
            }
            let arg = self.unary()?;
            acc = SugarTerm::App(Box::new(acc), Box::new(arg));
        }
    }

    fn unary(&mut self) -> Result<SugarTerm, SyntaxError> {
        match self.keyword() {
            Some("neg") => {
                self.pos += 1;
                Ok(SugarTerm::Neg(Box::new(self.primary()?)))
            }
            Some("and") => {
                self.pos += 1;
                let a = self.primary()?;
                let b = self.primary()?;
                Ok(SugarTerm::And(Box::new(a), Box::new(b)))
            }
            Some("rho") => {
                self.pos += 1;
                Ok(SugarTerm::Rho(Box::new(self.primary()?)))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<SugarTerm, SyntaxError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::LParen) => {
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Some(Tok::Name(n)) => match (self.system, n.as_str()) {
                (System::One, "bot") => Ok(SugarTerm::Bot),
                (System::One, "top") => Ok(SugarTerm::Top),
                (_, k) if self.is_keyword(k) => Err(SyntaxError::at(at, format!("keyword '{}' cannot start an argument", k))),
                (System::Two, "p") if self.peek() == Some(&Tok::LBrack) => {
                    let (m, n) = self.indices()?;
                    Ok(SugarTerm::Op(m, n))
                }
                (System::Two, name) if indexed(name, 'u').is_some() => Ok(SugarTerm::Sort(indexed(name, 'u').unwrap())),
                _ => Ok(SugarTerm::Name(n)),
            },
            _ => Err(SyntaxError::at(at, "expected a term")),
        }
    }
}

/// `vK` → `Some(K)` for prefix `v`, without leading zeros.
fn indexed(name: &str, prefix: char) -> Option<u32> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || (rest.len() > 1 && rest.starts_with('0')) || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

fn parse_with<T>(
    src: &str,
    system: System,
    f: impl FnOnce(&mut Parser) -> Result<T, SyntaxError>,
) -> Result<T, SyntaxError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len(), system };
    let out = f(&mut p)?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(out)
}

pub fn parse_sugar(src: &str, system: System) -> Result<SugarTerm, SyntaxError> {
    parse_with(src, system, |p| p.term())
}

/// Parses `lhs <op> rhs`.
pub fn parse_sugar_statement(src: &str, system: System) -> Result<(SugarTerm, StmtKind, SugarTerm), SyntaxError> {
    parse_with(src, system, |p| {
        let lhs = p.term()?;
        let kind = match p.peek() {
            Some(Tok::Colon) => StmtKind::Typing,
            Some(Tok::Red) => StmtKind::Reduction,
            Some(Tok::SubRed) => StmtKind::SubReduction,
            _ => return p.err("expected ':', '|>' or '|>='"),
        };
        p.pos += 1;
        let rhs = p.term()?;
        Ok((lhs, kind, rhs))
    })
}

// ---------------------------------------------------------------------------
// Atom table and desugaring

/// Names bound to atoms. Unknown names are allocated fresh variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomTable {
    names: BTreeMap<String, Term>,
}

impl AtomTable {
    pub fn new() -> AtomTable {
        AtomTable::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, atom: Term) {
        debug_assert!(atom.is_atom());
        self.names.insert(name.into(), atom);
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.names.get(name)
    }

    pub fn name_of(&self, atom: &Term) -> Option<&str> {
        self.names.iter().find(|(_, t)| *t == atom).map(|(n, _)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.names.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    fn used_vars(&self) -> BTreeSet<VarId> {
        self.names
            .values()
            .filter_map(|t| match t {
                Term::Var(v) => Some(*v),
                _ => None,
            })
            .collect()
    }

    /// The designated `*` constant for system-1 abbreviations.
    pub fn star(&self) -> Term {
        self.get("*").cloned().unwrap_or(Term::Const(0))
    }
}

fn collect_names(t: &SugarTerm, out: &mut Vec<String>) {
    match t {
        SugarTerm::Name(n) => out.push(n.clone()),
        SugarTerm::Sort(_) | SugarTerm::Op(..) | SugarTerm::Bot | SugarTerm::Top => {}
        SugarTerm::Neg(a) | SugarTerm::Rho(a) => collect_names(a, out),
        SugarTerm::And(a, b) | SugarTerm::App(a, b) | SugarTerm::Arrow(_, a, b) => {
            collect_names(a, out);
            collect_names(b, out);
        }
        SugarTerm::Lam(x, a, b) | SugarTerm::Pi(_, x, a, b) | SugarTerm::Forall(x, a, b) => {
            out.push(x.clone());
            collect_names(a, out);
            collect_names(b, out);
        }
    }
}

struct Resolver<'a> {
    table: &'a mut AtomTable,
    system: System,
    reserved: BTreeSet<VarId>,
}

impl Resolver<'_> {
    fn atom(&mut self, name: &str) -> Term {
        if let Some(v) = indexed(name, 'v') {
            return Term::Var(v);
        }
        if let Some(c) = indexed(name, 'c') {
            return match self.system {
                System::One => Term::Const(c),
                System::Two => Term::Const(Const2::User(c).code()),
            };
        }
        if let Some(t) = self.table.get(name) {
            return t.clone();
        }
        let v = (0..).find(|v| !self.reserved.contains(v)).unwrap();
        self.reserved.insert(v);
        self.table.bind(name, Term::Var(v));
        Term::Var(v)
    }

    fn binder(&mut self, name: &str) -> Result<VarId, String> {
        match self.atom(name) {
            Term::Var(v) => Ok(v),
            _ => Err(format!("'{}' names a constant and cannot be bound", name)),
        }
    }

    fn go(&mut self, t: &SugarTerm) -> Result<Term, String> {
        let logic = Logic1::new(self.table.star());
        Ok(match t {
            SugarTerm::Name(n) => self.atom(n),
            SugarTerm::Sort(n) => super::sort(*n),
            SugarTerm::Op(m, n) => super::op(*m, *n),
            SugarTerm::Bot => logic.bot(),
            SugarTerm::Top => logic.top(),
            SugarTerm::Neg(a) => logic.neg(self.go(a)?),
            SugarTerm::And(a, b) => {
                let a = self.go(a)?;
                logic.and(a, self.go(b)?)
            }
            SugarTerm::Rho(a) => Term::rho(self.go(a)?),
            SugarTerm::App(a, b) => {
                let a = self.go(a)?;
                Term::beta(a, self.go(b)?)
            }
            SugarTerm::Lam(x, r, s) => {
                let x = self.binder(x)?;
                let r = self.go(r)?;
                Term::lam(x, r, self.go(s)?)
            }
            SugarTerm::Pi(idx, x, r, s) => {
                let x = self.binder(x)?;
                let r = self.go(r)?;
                let s = self.go(s)?;
                match idx {
                    None => mk_pi(x, r, s),
                    Some((m, n)) => mk_pi2(*m, *n, x, r, s),
                }
            }
            SugarTerm::Arrow(idx, r, s) => {
                let r = self.go(r)?;
                let s = self.go(s)?;
                match idx {
                    None => mk_arrow(r, s),
                    Some((m, n)) => mk_arrow2(*m, *n, r, s),
                }
            }
            SugarTerm::Forall(x, r, s) => {
                let x = self.binder(x)?;
                let r = self.go(r)?;
                logic.forall(x, r, self.go(s)?)
            }
        })
    }
}

fn reserved_for(table: &AtomTable, terms: &[&SugarTerm]) -> BTreeSet<VarId> {
    let mut names = Vec::new();
    for t in terms {
        collect_names(t, &mut names);
    }
    let mut reserved = table.used_vars();
    reserved.extend(names.iter().filter_map(|n| indexed(n, 'v')));
    reserved
}

/// Resolves names and expands abbreviations. New names are added to `table`.
pub fn desugar(t: &SugarTerm, system: System, table: &mut AtomTable) -> Result<Term, SyntaxError> {
    let reserved = reserved_for(table, &[t]);
    let mut r = Resolver { table, system, reserved };
    r.go(t).map_err(|m| SyntaxError::at(0, m))
}

pub fn parse_term(src: &str, system: System, table: &mut AtomTable) -> Result<Term, SyntaxError> {
    desugar(&parse_sugar(src, system)?, system, table)
}

pub fn parse_statement(src: &str, system: System, table: &mut AtomTable) -> Result<(Term, StmtKind, Term), SyntaxError> {
    let (l, k, r) = parse_sugar_statement(src, system)?;
    let reserved = reserved_for(table, &[&l, &r]);
    let mut res = Resolver { table, system, reserved };
    let l = res.go(&l).map_err(|m| SyntaxError::at(0, m))?;
    let r = res.go(&r).map_err(|m| SyntaxError::at(0, m))?;
    if system == System::One && k != StmtKind::Typing {
        return Err(SyntaxError::at(0, "system 1 only has typing statements"));
    }
    Ok((l, k, r))
}

// ---------------------------------------------------------------------------
// Printing

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Left,
    Head,
    Arg,
}

struct Printer<'a> {
    system: System,
    table: Option<&'a AtomTable>,
}

impl Printer<'_> {
    fn atom(&self, t: &Term) -> String {
        if let Some(name) = self.table.and_then(|tb| tb.name_of(t)) {
            return name.to_string();
        }
        match (t, self.system) {
            (Term::Var(v), _) => format!("v{}", v),
            (Term::Const(c), System::One) => format!("c{}", c),
            (Term::Const(c), System::Two) => match Const2::decode(*c) {
                Const2::User(k) => format!("c{}", k),
                Const2::Sort(n) => format!("u{}", n),
                Const2::Op(m, n) => format!("p[{},{}]", m, n),
            },
            _ => unreachable!(),
        }
    }

    fn var(&self, x: VarId) -> String {
        self.atom(&Term::Var(x))
    }

    fn wrap(s: String, paren: bool) -> String {
        if paren {
            format!("({})", s)
        } else {
            s
        }
    }

    fn arrow(&self, idx: Option<(u32, u32)>, x: VarId, r: &Term, s: &Term, ctx: Ctx) -> String {
        let op = match idx {
            None => String::from("->"),
            Some((m, n)) => format!("->[{},{}]", m, n),
        };
        let default = !is_free_in(x, s) && x == (0..).find(|v| !free_vars(s).contains(v)).unwrap();
        let text = if default {
            format!("{} {} {}", self.go(r, Ctx::Left), op, self.go(s, Ctx::Top))
        } else {
            format!("({} : {}) {} {}", self.var(x), self.go(r, Ctx::Top), op, self.go(s, Ctx::Top))
        };
        Self::wrap(text, ctx != Ctx::Top)
    }

    fn go(&self, t: &Term, ctx: Ctx) -> String {
        match t {
            Term::Const(_) | Term::Var(_) => self.atom(t),
            _ if self.system == System::One && as_pi(t).is_some() => {
                let (x, r, s) = as_pi(t).unwrap();
                self.arrow(None, x, r, s, ctx)
            }
            _ if self.system == System::Two && as_pi2(t).is_some() => {
                let (m, n, x, r, s) = as_pi2(t).unwrap();
                self.arrow(Some((m, n)), x, r, s, ctx)
            }
            Term::Rho(a) => Self::wrap(format!("rho {}", self.go(a, Ctx::Arg)), ctx == Ctx::Arg),
            Term::Beta(f, a) => {
                let text = format!("{} {}", self.go(f, Ctx::Head), self.go(a, Ctx::Arg));
                Self::wrap(text, ctx == Ctx::Arg)
            }
            Term::Lambda(x, r, s) => {
                let text = format!("lam {} : {} . {}", self.var(*x), self.go(r, Ctx::Top), self.go(s, Ctx::Top));
                Self::wrap(text, ctx != Ctx::Top)
            }
        }
    }
}

/// Prints a term in surface syntax; `parse_term` reads it back exactly when
/// given the same table.
pub fn print_term(t: &Term, system: System, table: Option<&AtomTable>) -> String {
    Printer { system, table }.go(t, Ctx::Top)
}

pub fn print_statement(l: &Term, kind: StmtKind, r: &Term, system: System, table: Option<&AtomTable>) -> String {
    format!("{} {} {}", print_term(l, system, table), kind.symbol(), print_term(r, system, table))
}
