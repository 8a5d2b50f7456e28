//! Set-theoretic interpretations of system-1 terms and finite model checking.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::binding::{canonicalize, free_vars, is_free_in, AlphaClass};
use crate::hfset::{self, HfError, HfSet};
use crate::syntax::{Term, VarId};

/// Default bound on the number of functions a product may materialise.
pub const DEFAULT_SIZE_GUARD: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Set(#[from] HfError),
    #[error("atom {0} is not covered by the enumeration")]
    UncoveredAtom(Atom),
}

/// A constant or a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Const(u32),
    Var(VarId),
}

impl Atom {
    pub fn of(t: &Term) -> Option<Atom> {
        match t {
            Term::Const(c) => Some(Atom::Const(*c)),
            Term::Var(v) => Some(Atom::Var(*v)),
            _ => None,
        }
    }

    pub fn term(self) -> Term {
        match self {
            Atom::Const(c) => Term::Const(c),
            Atom::Var(v) => Term::Var(v),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Const(c) => write!(f, "c{}", c),
            Atom::Var(v) => write!(f, "v{}", v),
        }
    }
}

/// Constants and free variables of a term.
pub fn atoms_of(t: &Term) -> BTreeSet<Atom> {
    fn consts(t: &Term, out: &mut BTreeSet<Atom>) {
        match t {
            Term::Const(c) => {
                out.insert(Atom::Const(*c));
            }
            Term::Var(_) => {}
            Term::Rho(a) => consts(a, out),
            Term::Beta(a, b) | Term::Lambda(_, a, b) => {
                consts(a, out);
                consts(b, out);
            }
        }
    }
    let mut out: BTreeSet<Atom> = free_vars(t).into_iter().map(Atom::Var).collect();
    consts(t, &mut out);
    out
}

/// Values of atoms; unlisted atoms denote `∅`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment {
    values: BTreeMap<Atom, HfSet>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Atom, HfSet)>>(pairs: I) -> Assignment {
        Assignment { values: pairs.into_iter().collect() }
    }

    pub fn set(&mut self, atom: Atom, value: HfSet) {
        self.values.insert(atom, value);
    }

    pub fn get(&self, atom: Atom) -> HfSet {
        self.values.get(&atom).cloned().unwrap_or_else(HfSet::empty)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &HfSet)> {
        self.values.iter()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}={}", a, v)?;
        }
        Ok(())
    }
}

/// An assignment together with a stack of variable overrides.
pub struct Env<'a> {
    base: &'a Assignment,
    overrides: Vec<(VarId, HfSet)>,
}

impl<'a> Env<'a> {
    pub fn new(base: &'a Assignment) -> Env<'a> {
        Env { base, overrides: Vec::new() }
    }

    pub fn lookup(&self, atom: Atom) -> HfSet {
        if let Atom::Var(v) = atom {
            if let Some((_, s)) = self.overrides.iter().rev().find(|(x, _)| *x == v) {
                return s.clone();
            }
        }
        self.base.get(atom)
    }

    pub fn push(&mut self, x: VarId, s: HfSet) {
        self.overrides.push((x, s));
    }

    pub fn pop(&mut self) {
        self.overrides.pop();
    }
}

/// Evaluates system-1 terms with a guard on product sizes.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    pub size_guard: usize,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator { size_guard: DEFAULT_SIZE_GUARD }
    }
}

impl Evaluator {
    pub fn with_guard(size_guard: usize) -> Evaluator {
        Evaluator { size_guard }
    }

    pub fn eval(&self, a: &Assignment, t: &Term) -> Result<HfSet, EvalError> {
        self.eval_env(&mut Env::new(a), t)
    }

    /// Evaluates under overrides applied left to right; later bindings of
    /// the same variable win.
    pub fn eval_override(&self, a: &Assignment, bindings: &[(HfSet, VarId)], t: &Term) -> Result<HfSet, EvalError> {
        let mut env = Env::new(a);
        for (s, x) in bindings {
            env.push(*x, s.clone());
        }
        self.eval_env(&mut env, t)
    }

    pub fn eval_env(&self, env: &mut Env<'_>, t: &Term) -> Result<HfSet, EvalError> {
        match t {
            Term::Const(c) => Ok(env.lookup(Atom::Const(*c))),
            Term::Var(v) => Ok(env.lookup(Atom::Var(*v))),
            Term::Rho(a) => {
                let f = self.eval_env(env, a)?;
                Ok(hfset::dep_product_bounded(&f, self.size_guard)?)
            }
            Term::Beta(f, a) => {
                let f = self.eval_env(env, f)?;
                let a = self.eval_env(env, a)?;
                Ok(hfset::apply(&f, &a))
            }
            Term::Lambda(x, r, s) => {
                let dom = self.eval_env(env, r)?;
                if !is_free_in(*x, s) {
                    let v = self.eval_env(env, s)?;
                    return Ok(hfset::graph(dom.iter().map(|d| (d.clone(), v.clone()))));
                }
                let mut entries = Vec::with_capacity(dom.len());
                for d in dom.iter() {
                    env.push(*x, d.clone());
                    let v = self.eval_env(env, s);
                    env.pop();
                    entries.push((d.clone(), v?));
                }
                Ok(hfset::graph(entries))
            }
        }
    }

    /// Decides `v ∈ ⟦t⟧` without materialising products when `t` is a
    /// ρ-term.
    pub fn member_env(&self, env: &mut Env<'_>, v: &HfSet, t: &Term) -> Result<bool, EvalError> {
        let Term::Rho(inner) = t else {
            return Ok(self.eval_env(env, t)?.contains(v));
        };
        if !hfset::is_function(v) {
            return Ok(false);
        }
        match &**inner {
            Term::Lambda(x, r, s) => {
                let dom = self.eval_env(env, r)?;
                if v.len() != dom.len() {
                    return Ok(false);
                }
                for e in v.iter() {
                    let (val, arg) = hfset::unpair(e).expect("function element");
                    if !dom.contains(&arg) {
                        return Ok(false);
                    }
                    env.push(*x, arg);
                    let ok = self.member_env(env, &val, s);
                    env.pop();
                    if !ok? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            other => {
                let f = self.eval_env(env, other)?;
                let dom = hfset::domain(&f);
                if v.len() != dom.len() {
                    return Ok(false);
                }
                Ok(v.iter().all(|e| {
                    let (val, arg) = hfset::unpair(e).expect("function element");
                    dom.contains(&arg) && hfset::apply(&f, &arg).contains(&val)
                }))
            }
        }
    }

    /// `⟦S:P⟧ ⇔ ⟦S⟧ ∈ ⟦P⟧`.
    pub fn satisfies(&self, a: &Assignment, st: &Statement1) -> Result<bool, EvalError> {
        let mut env = Env::new(a);
        let s = self.eval_env(&mut env, st.subject.term())?;
        self.member_env(&mut env, &s, st.predicate.term())
    }

    /// Lazily enumerates the assignments over `pool^atoms` that satisfy all
    /// of `gamma`, in lexicographic order of pool indices.
    pub fn enumerate_models<'a>(
        &self,
        pool: &'a [HfSet],
        atoms: &[Atom],
        gamma: &'a [Statement1],
    ) -> Result<Models<'a>, EvalError> {
        Models::new(*self, pool, atoms, gamma)
    }

    /// Checks `Γ ⊨ stmt` relative to `pool`.
    pub fn check_consequence(
        &self,
        pool: &[HfSet],
        atoms: &[Atom],
        gamma: &[Statement1],
        stmt: &Statement1,
    ) -> Result<Verdict, EvalError> {
        let mut models = 0usize;
        for m in self.enumerate_models(pool, atoms, gamma)? {
            let m = m?;
            models += 1;
            if !self.satisfies(&m, stmt)? {
                return Ok(Verdict::Counterexample(m));
            }
        }
        self.uncovered(atoms, core::slice::from_ref(stmt))?;
        Ok(Verdict::Holds { models })
    }

    fn uncovered(&self, atoms: &[Atom], stmts: &[Statement1]) -> Result<(), EvalError> {
        for st in stmts {
            for a in st.atoms() {
                if !atoms.contains(&a) {
                    return Err(EvalError::UncoveredAtom(a));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of a pool-relative consequence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Every pool model of Γ satisfies the statement; `models` counts them.
    Holds { models: usize },
    Counterexample(Assignment),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }
}

/// A typing statement between α-classes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Statement1 {
    pub subject: AlphaClass,
    pub predicate: AlphaClass,
}

impl Statement1 {
    pub fn new(subject: &Term, predicate: &Term) -> Statement1 {
        Statement1 { subject: canonicalize(subject), predicate: canonicalize(predicate) }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut a = atoms_of(self.subject.term());
        a.extend(atoms_of(self.predicate.term()));
        a
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut f = free_vars(self.subject.term());
        f.extend(free_vars(self.predicate.term()));
        f
    }

    pub fn render(&self, table: Option<&crate::syntax::sugar::AtomTable>) -> String {
        crate::syntax::sugar::print_statement(
            self.subject.term(),
            crate::syntax::sugar::StmtKind::Typing,
            self.predicate.term(),
            crate::syntax::System::One,
            table,
        )
    }
}

/// Iterator over pool models, see [`Evaluator::enumerate_models`].
pub struct Models<'a> {
    ev: Evaluator,
    pool: &'a [HfSet],
    atoms: Vec<Atom>,
    /// Statements to check once the atom at each depth is assigned.
    checks: Vec<Vec<&'a Statement1>>,
    ground: Vec<&'a Statement1>,
    stack: Vec<usize>,
    current: Assignment,
    state: State,
}

#[derive(PartialEq, Eq)]
enum State {
    Fresh,
    Running,
    Done,
}

impl<'a> Models<'a> {
    fn new(
        ev: Evaluator,
        pool: &'a [HfSet],
        atoms: &[Atom],
        gamma: &'a [Statement1],
    ) -> Result<Models<'a>, EvalError> {
        ev.uncovered(atoms, gamma)?;
        let mut checks: Vec<Vec<&Statement1>> = alloc::vec![Vec::new(); atoms.len()];
        let mut ground = Vec::new();
        for st in gamma {
            let last = st.atoms().iter().map(|a| atoms.iter().position(|b| b == a).unwrap()).max();
            match last {
                Some(d) => checks[d].push(st),
                None => ground.push(st),
            }
        }
        Ok(Models {
            ev,
            pool,
            atoms: atoms.to_vec(),
            checks,
            ground,
            stack: Vec::new(),
            current: Assignment::new(),
            state: State::Fresh,
        })
    }

    fn check_all(&self, stmts: &[&Statement1]) -> Result<bool, EvalError> {
        for st in stmts {
            if !self.ev.satisfies(&self.current, st)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Iterator for Models<'_> {
    type Item = Result<Assignment, EvalError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.state == State::Fresh {
            self.state = State::Running;
            match self.check_all(&self.ground) {
                Err(e) => {
                    self.state = State::Done;
                    return Some(Err(e));
                }
                Ok(false) => self.state = State::Done,
                Ok(true) if self.atoms.is_empty() => {
                    self.state = State::Done;
                    return Some(Ok(self.current.clone()));
                }
                Ok(true) if self.pool.is_empty() => self.state = State::Done,
                Ok(true) => self.stack.push(0),
            }
        }
        while self.state == State::Running {
            let d = self.stack.len() - 1;
            let i = self.stack[d];
            if i == self.pool.len() {
                self.stack.pop();
                if self.stack.is_empty() {
                    self.state = State::Done;
                }
                continue;
            }
            self.stack[d] += 1;
            self.current.set(self.atoms[d], self.pool[i].clone());
            match self.check_all(&self.checks[d]) {
                Err(e) => {
                    self.state = State::Done;
                    return Some(Err(e));
                }
                Ok(false) => continue,
                Ok(true) => {}
            }
            if d + 1 == self.atoms.len() {
                return Some(Ok(self.current.clone()));
            }
            self.stack.push(0);
        }
        None
    }
}
