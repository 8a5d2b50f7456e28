//! Term syntax for both systems: the raw prefix strings, stratification,
//! constant coding for sorts and product operators, and term builders.

pub mod sugar;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::binding::free_vars;

pub type VarId = u32;

/// Which of the two term languages a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum System {
    One,
    Two,
}

/// A term of either language. System-2 terms never contain `Rho`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(u32),
    Var(VarId),
    Rho(Box<Term>),
    Beta(Box<Term>, Box<Term>),
    Lambda(VarId, Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("position {pos}: {msg}")]
    At { pos: usize, msg: String },
}

impl SyntaxError {
    pub fn at(pos: usize, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::At { pos, msg: msg.into() }
    }

    pub fn pos(&self) -> usize {
        match self {
            SyntaxError::At { pos, .. } => *pos,
        }
    }
}

impl Term {
    pub fn var(i: VarId) -> Term {
        Term::Var(i)
    }

    pub fn cst(i: u32) -> Term {
        Term::Const(i)
    }

    pub fn rho(t: Term) -> Term {
        Term::Rho(Box::new(t))
    }

    pub fn beta(f: Term, a: Term) -> Term {
        Term::Beta(Box::new(f), Box::new(a))
    }

    pub fn lam(x: VarId, r: Term, s: Term) -> Term {
        Term::Lambda(x, Box::new(r), Box::new(s))
    }

    /// `t0 t1 ... tn`, left-nested.
    pub fn apps<I: IntoIterator<Item = Term>>(head: Term, args: I) -> Term {
        args.into_iter().fold(head, Term::beta)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Term::Const(_) | Term::Var(_))
    }

    pub fn has_rho(&self) -> bool {
        match self {
            Term::Const(_) | Term::Var(_) => false,
            Term::Rho(_) => true,
            Term::Beta(a, b) | Term::Lambda(_, a, b) => a.has_rho() || b.has_rho(),
        }
    }

    /// Number of grammar symbols other than primes: each atom, `ρ`, `β`, `λ`
    /// and each λ-binder counts once.
    pub fn size(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 1,
            Term::Rho(a) => 1 + a.size(),
            Term::Beta(a, b) => 1 + a.size() + b.size(),
            Term::Lambda(_, a, b) => 2 + a.size() + b.size(),
        }
    }

    /// Least `n` with the term in `T^n`.
    pub fn stratum(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 0,
            Term::Rho(a) => 1 + a.stratum(),
            Term::Beta(a, b) | Term::Lambda(_, a, b) => 1 + a.stratum().max(b.stratum()),
        }
    }

    /// Splits `f a1 ... an` into the head and its arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::Beta(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn max_var(&self) -> Option<VarId> {
        match self {
            Term::Const(_) => None,
            Term::Var(v) => Some(*v),
            Term::Rho(a) => a.max_var(),
            Term::Beta(a, b) => a.max_var().max(b.max_var()),
            Term::Lambda(x, a, b) => Some(*x).max(a.max_var()).max(b.max_var()),
        }
    }

    pub fn max_const(&self) -> Option<u32> {
        match self {
            Term::Const(c) => Some(*c),
            Term::Var(_) => None,
            Term::Rho(a) => a.max_const(),
            Term::Beta(a, b) | Term::Lambda(_, a, b) => a.max_const().max(b.max_const()),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_raw(self))
    }
}

// ---------------------------------------------------------------------------
// Raw strings

fn push_primes(out: &mut String, n: u32) {
    for _ in 0..n {
        out.push('\'');
    }
}

fn render_into(t: &Term, out: &mut String) {
    match t {
        Term::Const(i) => {
            out.push('c');
            push_primes(out, *i);
        }
        Term::Var(i) => {
            out.push('v');
            push_primes(out, *i);
        }
        Term::Rho(a) => {
            out.push('r');
            render_into(a, out);
        }
        Term::Beta(a, b) => {
            out.push('b');
            render_into(a, out);
            render_into(b, out);
        }
        Term::Lambda(x, a, b) => {
            out.push('l');
            out.push('v');
            push_primes(out, *x);
            render_into(a, out);
            render_into(b, out);
        }
    }
}

/// ASCII rendering over `c v ' r b l`.
pub fn render_raw(t: &Term) -> String {
    let mut out = String::new();
    render_into(t, &mut out);
    out
}

struct RawParser<'a> {
    src: &'a [u8],
    pos: usize,
    system: System,
}

impl RawParser<'_> {
    fn primes(&mut self) -> u32 {
        let mut n = 0;
        while self.src.get(self.pos) == Some(&b'\'') {
            self.pos += 1;
            n += 1;
        }
        n
    }

    fn var(&mut self) -> Result<VarId, SyntaxError> {
        match self.src.get(self.pos) {
            Some(b'v') => {
                self.pos += 1;
                Ok(self.primes())
            }
            _ => Err(SyntaxError::at(self.pos, "expected a variable after 'l'")),
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let start = self.pos;
        let Some(&ch) = self.src.get(self.pos) else {
            return Err(SyntaxError::at(self.pos, "unexpected end of input"));
        };
        self.pos += 1;
        match ch {
            b'c' => Ok(Term::Const(self.primes())),
            b'v' => Ok(Term::Var(self.primes())),
            b'r' if self.system == System::Two => Err(SyntaxError::at(start, "rho is not part of system 2")),
            b'r' => Ok(Term::rho(self.term()?)),
            b'b' => {
                let f = self.term()?;
                let a = self.term()?;
                Ok(Term::beta(f, a))
            }
            b'l' => {
                let x = self.var()?;
                let r = self.term()?;
                let s = self.term()?;
                Ok(Term::lam(x, r, s))
            }
            _ => Err(SyntaxError::at(start, "unexpected symbol")),
        }
    }
}

/// Parses the raw prefix form. Whitespace is ignored.
pub fn parse_raw(text: &str, system: System) -> Result<Term, SyntaxError> {
    let cleaned: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    let mut p = RawParser { src: &cleaned, pos: 0, system };
    let t = p.term()?;
    if p.pos != cleaned.len() {
        return Err(SyntaxError::at(p.pos, "trailing input after a complete term"));
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// System-2 constant coding

/// Decoded meaning of a system-2 constant index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Const2 {
    /// An ordinary constant from the user pool.
    User(u32),
    /// The sort `u_n`.
    Sort(u32),
    /// The product operator `p_m^n`.
    Op(u32, u32),
}

pub fn cantor(m: u32, n: u32) -> u32 {
    (m + n) * (m + n + 1) / 2 + n
}

pub fn uncantor(k: u32) -> (u32, u32) {
    let mut w = 0;
    while (w + 1) * (w + 2) / 2 <= k {
        w += 1;
    }
    let n = k - w * (w + 1) / 2;
    (w - n, n)
}

impl Const2 {
    pub fn code(self) -> u32 {
        match self {
            Const2::User(k) => 3 * k,
            Const2::Sort(n) => 3 * n + 1,
            Const2::Op(m, n) => 3 * cantor(m, n) + 2,
        }
    }

    pub fn decode(code: u32) -> Const2 {
        match code % 3 {
            0 => Const2::User(code / 3),
            1 => Const2::Sort(code / 3),
            _ => {
                let (m, n) = uncantor(code / 3);
                Const2::Op(m, n)
            }
        }
    }
}

pub fn sort(n: u32) -> Term {
    Term::Const(Const2::Sort(n).code())
}

pub fn op(m: u32, n: u32) -> Term {
    Term::Const(Const2::Op(m, n).code())
}

pub fn user_const(k: u32) -> Term {
    Term::Const(Const2::User(k).code())
}

// ---------------------------------------------------------------------------
// Builders

/// Least variable not free in any of the given terms.
pub fn least_var_not_free(terms: &[&Term]) -> VarId {
    let mut used = alloc::collections::BTreeSet::new();
    for t in terms {
        used.extend(free_vars(t));
    }
    (0..).find(|v| !used.contains(v)).unwrap()
}

/// `πxRS := ρλxRS`.
pub fn mk_pi(x: VarId, r: Term, s: Term) -> Term {
    Term::rho(Term::lam(x, r, s))
}

/// `R → S := πxRS` with `x` the least variable outside `F(S)`.
pub fn mk_arrow(r: Term, s: Term) -> Term {
    let x = least_var_not_free(&[&s]);
    mk_pi(x, r, s)
}

/// `π_m^n xRS := p_m^n R (λxRS)`.
pub fn mk_pi2(m: u32, n: u32, x: VarId, r: Term, s: Term) -> Term {
    Term::beta(Term::beta(op(m, n), r.clone()), Term::lam(x, r, s))
}

pub fn mk_arrow2(m: u32, n: u32, r: Term, s: Term) -> Term {
    let x = least_var_not_free(&[&s]);
    mk_pi2(m, n, x, r, s)
}

/// Recognises `p_m^n R (λxRS)`, returning `(m, n, x, R, S)`.
pub fn as_pi2(t: &Term) -> Option<(u32, u32, VarId, &Term, &Term)> {
    let Term::Beta(f, lam) = t else { return None };
    let Term::Beta(p, r) = &**f else { return None };
    let Term::Const(code) = &**p else { return None };
    let Const2::Op(m, n) = Const2::decode(*code) else { return None };
    let Term::Lambda(x, r2, s) = &**lam else { return None };
    if r2 != r {
        return None;
    }
    Some((m, n, *x, r, s))
}

/// Recognises `ρλxRS`.
pub fn as_pi(t: &Term) -> Option<(VarId, &Term, &Term)> {
    match t {
        Term::Rho(inner) => match &**inner {
            Term::Lambda(x, r, s) => Some((*x, r, s)),
            _ => None,
        },
        _ => None,
    }
}

/// Part-1 abbreviations over a designated constant `*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Logic1 {
    pub star: Term,
}

impl Default for Logic1 {
    fn default() -> Self {
        Logic1 { star: Term::Const(0) }
    }
}

impl Logic1 {
    pub fn new(star: Term) -> Logic1 {
        Logic1 { star }
    }

    /// `⊥ := πv*v`.
    pub fn bot(&self) -> Term {
        mk_pi(0, self.star.clone(), Term::Var(0))
    }

    /// `⊤ := ⊥ → ⊥`.
    pub fn top(&self) -> Term {
        mk_arrow(self.bot(), self.bot())
    }

    /// `¬S := S → ⊥`.
    pub fn neg(&self, s: Term) -> Term {
        mk_arrow(s, self.bot())
    }

    /// `R ∧ S := ¬(R → ¬S)`.
    pub fn and(&self, r: Term, s: Term) -> Term {
        self.neg(mk_arrow(r, self.neg(s)))
    }

    /// `∀xRS := ¬¬πxRS`.
    pub fn forall(&self, x: VarId, r: Term, s: Term) -> Term {
        self.neg(self.neg(mk_pi(x, r, s)))
    }
}
