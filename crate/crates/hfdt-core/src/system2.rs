//! System-2 semantics: interpretations with sorts and product operators,
//! well-formedness, statement satisfaction, reduction closures and finite
//! surrogate universes.
//!
//! Values are evaluated lazily where materialising them would be wasteful:
//! λ-terms become closures, `p_m^n` and its partial applications are
//! computed on demand, and products `∏F` stay symbolic until enumerated.
//! Sorts may be declared open, meaning their carrier is too large to list
//! and contains every hereditarily finite set.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::binding::{canonicalize, free_vars, is_free_in, rewrite_once, substitute, VarSet};
use crate::hfset::{self, HfError, HfSet};
use crate::semantics1::{Atom, DEFAULT_SIZE_GUARD};
use crate::syntax::sugar::{print_statement, AtomTable, StmtKind};
use crate::syntax::{Const2, System, Term, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error2 {
    /// The term is not well-formed under the interpretation.
    #[error("ill-formed: {0}")]
    IllFormed(String),
    #[error("sort u{0} is open and cannot be enumerated")]
    OpenCarrier(u32),
    #[error(transparent)]
    Set(#[from] HfError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error2 {
    fn ill(msg: impl Into<String>) -> Error2 {
        Error2::IllFormed(msg.into())
    }
}

pub type Result2<T> = Result<T, Error2>;

// ---------------------------------------------------------------------------
// Universes

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Carrier {
    Finite(HfSet),
    /// A carrier that contains every hereditarily finite set.
    Open,
}

/// Declaration of one carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CarrierSpec {
    Sets {
        members: Vec<HfSet>,
        /// Lower sorts whose whole carrier is added as an element (`@uK`).
        lower_as_elements: Vec<u32>,
    },
    Open,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniverseSpec {
    pub carriers: Vec<CarrierSpec>,
    pub proof_irrelevant: bool,
    pub prop_extensional: bool,
    /// Largest allowed finite carrier; 0 means unbounded.
    pub max_carrier: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("no carriers declared")]
    Empty,
    #[error("u{0} lists @u{1}, which is not a lower finite sort")]
    BadLowerRef(u32, u32),
    #[error("u{0} is finite but u{1} below it is open")]
    OpenBelowFinite(u32, u32),
    #[error("u{0} has {1} members, above the bound {2}")]
    TooLarge(u32, usize, usize),
    #[error("proof irrelevance fails: {0} in u0 has more than one element")]
    NotProofIrrelevant(HfSet),
    #[error("propositional extensionality fails: u0 has {0} nonempty members")]
    NotPropExtensional(usize),
}

/// Nested carriers `U_0 ⊆ U_1 ⊆ ...` with `{∅,{∅}} ⊆ U_0`. Sorts beyond the
/// declared list are open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universes {
    carriers: Vec<Carrier>,
    pub proof_irrelevant: bool,
    pub prop_extensional: bool,
}

impl Universes {
    pub fn build(spec: &UniverseSpec) -> Result<Universes, UniverseError> {
        if spec.carriers.is_empty() {
            return Err(UniverseError::Empty);
        }
        let mut carriers: Vec<Carrier> = Vec::new();
        for (n, cs) in spec.carriers.iter().enumerate() {
            let n = n as u32;
            let c = match cs {
                CarrierSpec::Open => Carrier::Open,
                CarrierSpec::Sets { members, lower_as_elements } => {
                    let mut elems: Vec<HfSet> = members.clone();
                    if n == 0 {
                        elems.push(HfSet::empty());
                        elems.push(HfSet::singleton(HfSet::empty()));
                    } else {
                        match &carriers[n as usize - 1] {
                            Carrier::Finite(prev) => elems.extend(prev.iter().cloned()),
                            Carrier::Open => return Err(UniverseError::OpenBelowFinite(n, n - 1)),
                        }
                    }
                    for &k in lower_as_elements {
                        match carriers.get(k as usize) {
                            Some(Carrier::Finite(u)) if k < n => elems.push(u.clone()),
                            _ => return Err(UniverseError::BadLowerRef(n, k)),
                        }
                    }
                    let set = HfSet::from_vec(elems);
                    if spec.max_carrier > 0 && set.len() > spec.max_carrier {
                        return Err(UniverseError::TooLarge(n, set.len(), spec.max_carrier));
                    }
                    Carrier::Finite(set)
                }
            };
            carriers.push(c);
        }
        if let Carrier::Finite(u0) = &carriers[0] {
            if spec.proof_irrelevant {
                if let Some(bad) = u0.iter().find(|s| s.len() > 1) {
                    return Err(UniverseError::NotProofIrrelevant(bad.clone()));
                }
            }
            let nonempty = u0.iter().filter(|s| !s.is_empty()).count();
            if spec.prop_extensional && nonempty > 1 {
                return Err(UniverseError::NotPropExtensional(nonempty));
            }
        }
        Ok(Universes { carriers, proof_irrelevant: spec.proof_irrelevant, prop_extensional: spec.prop_extensional })
    }

    /// Finite carriers given directly, nested by union; useful in tests.
    pub fn from_finite(sets: &[HfSet]) -> Result<Universes, UniverseError> {
        let spec = UniverseSpec {
            carriers: sets
                .iter()
                .map(|s| CarrierSpec::Sets { members: s.elements().to_vec(), lower_as_elements: Vec::new() })
                .collect(),
            ..UniverseSpec::default()
        };
        Universes::build(&spec)
    }

    pub fn carrier(&self, n: u32) -> Carrier {
        self.carriers.get(n as usize).cloned().unwrap_or(Carrier::Open)
    }

    pub fn declared(&self) -> usize {
        self.carriers.len()
    }

    pub fn value(&self, n: u32) -> Value {
        match self.carrier(n) {
            Carrier::Finite(s) => Value::Set(s),
            Carrier::Open => Value::Sort(n),
        }
    }

    /// Checks which canonical facts the instance exhibits.
    pub fn capability_report(&self, guard: usize) -> CapabilityReport {
        let mut lines = Vec::new();
        let ip = Interp2::new(Arc::new(self.clone()));
        let k = self.carriers.len() as u32;
        for m in 0..k {
            for n in 0..k {
                let mem = Statement2::typing(crate::syntax::sort(m), crate::syntax::sort(n));
                let got = ip.satisfies(&mem, &[]);
                lines.push((format!("(u{} : u{})", m, n), cap(got, Some(m < n))));
                let red = Statement2::new(StmtKind::Reduction, crate::syntax::sort(m), crate::syntax::sort(n));
                lines.push((format!("(u{} |> u{})", m, n), cap(ip.satisfies(&red, &[]), Some(m == n))));
                let sub = Statement2::new(StmtKind::SubReduction, crate::syntax::sort(m), crate::syntax::sort(n));
                lines.push((format!("(u{} |>= u{})", m, n), cap(ip.satisfies(&sub, &[]), Some(m <= n))));
            }
        }
        for m in 0..k {
            for n in 0..k {
                let target = (m + 1).max(n);
                lines.push((format!("p[{},{}] lands in u{}", m, n, target), self.product_closure(m, n, target, guard)));
            }
        }
        CapabilityReport { lines }
    }

    fn product_closure(&self, m: u32, n: u32, target: u32, guard: usize) -> Capability {
        let (Carrier::Finite(um), Carrier::Finite(un)) = (self.carrier(m), self.carrier(n)) else {
            return Capability::Unchecked("open carrier".to_string());
        };
        let tgt = self.carrier(target);
        let mut checked = 0usize;
        for d in um.iter() {
            let fibres: Vec<(HfSet, HfSet)> = d.iter().map(|x| (x.clone(), un.clone())).collect();
            let Ok(phis) = hfset::product_of_fibres(&fibres, guard) else {
                return Capability::Unchecked("too many families".to_string());
            };
            for phi in phis.iter() {
                checked += 1;
                if checked > guard {
                    return Capability::Unchecked("too many families".to_string());
                }
                let Ok(prod) = hfset::dep_product_bounded(phi, guard) else {
                    return Capability::Unchecked("product too large".to_string());
                };
                if let Carrier::Finite(t) = &tgt {
                    if !t.contains(&prod) {
                        return Capability::Fails;
                    }
                }
            }
        }
        Capability::Holds
    }
}

fn cap(r: Result2<bool>, expected: Option<bool>) -> Capability {
    match (r, expected) {
        (Ok(got), Some(want)) if got == want => Capability::Holds,
        (Ok(_), Some(_)) => Capability::Fails,
        (Ok(true), None) => Capability::Holds,
        (Ok(false), None) => Capability::Fails,
        (Err(e), _) => Capability::Unchecked(e.to_string()),
    }
}

/// Whether the instance agrees with the corresponding canonical fact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Capability {
    Holds,
    Fails,
    Unchecked(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapabilityReport {
    pub lines: Vec<(String, Capability)>,
}

impl fmt::Display for CapabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (what, c) in &self.lines {
            match c {
                Capability::Holds => writeln!(f, "{}: as canonical", what)?,
                Capability::Fails => writeln!(f, "{}: differs from canonical", what)?,
                Capability::Unchecked(why) => writeln!(f, "{}: unchecked ({})", what, why)?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Values

/// A lazily represented function.
pub trait Func: Send + Sync {
    fn describe(&self) -> String;
    fn domain(&self, ip: &Interp2) -> Result2<Value>;
    /// Applies to an argument already known to lie in the domain.
    fn call(&self, ip: &Interp2, x: &Value) -> Result2<Value>;
    /// The common value when the function is constant on its domain.
    fn constant(&self, _ip: &Interp2) -> Result2<Option<Value>> {
        Ok(None)
    }
}

#[derive(Clone)]
pub enum Value {
    Set(HfSet),
    /// The carrier of an open sort.
    Sort(u32),
    Fun(Arc<dyn Func>),
    /// `∏F` for a function value `F`.
    Prod(Arc<Value>),
}

impl Value {
    pub fn set(s: HfSet) -> Value {
        Value::Set(s)
    }

    pub fn as_set(&self) -> Option<&HfSet> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }
}

impl From<HfSet> for Value {
    fn from(s: HfSet) -> Value {
        Value::Set(s)
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Set(s) => write!(f, "{}", s),
            Value::Sort(n) => write!(f, "U{}", n),
            Value::Fun(g) => f.write_str(&g.describe()),
            Value::Prod(g) => write!(f, "prod({:?})", g),
        }
    }
}

struct Closure {
    var: VarId,
    dom: Value,
    body: Arc<Term>,
    env: Vec<(VarId, HfSet)>,
}

impl Func for Closure {
    fn describe(&self) -> String {
        format!("closure(v{} : {:?})", self.var, self.dom)
    }

    fn domain(&self, _: &Interp2) -> Result2<Value> {
        Ok(self.dom.clone())
    }

    fn call(&self, ip: &Interp2, x: &Value) -> Result2<Value> {
        let mut env = self.env.clone();
        env.push((self.var, ip.materialize(x)?));
        ip.eval_in(&mut env, &self.body)
    }

    fn constant(&self, ip: &Interp2) -> Result2<Option<Value>> {
        if crate::binding::is_free_in(self.var, &self.body) {
            return Ok(None);
        }
        let mut env = self.env.clone();
        ip.eval_in(&mut env, &self.body).map(Some)
    }
}

/// `x ↦ value` on a fixed domain.
pub struct ConstFn {
    pub dom: Value,
    pub value: Value,
}

impl Func for ConstFn {
    fn describe(&self) -> String {
        format!("const({:?} on {:?})", self.value, self.dom)
    }

    fn domain(&self, _: &Interp2) -> Result2<Value> {
        Ok(self.dom.clone())
    }

    fn call(&self, _: &Interp2, _: &Value) -> Result2<Value> {
        Ok(self.value.clone())
    }

    fn constant(&self, _: &Interp2) -> Result2<Option<Value>> {
        Ok(Some(self.value.clone()))
    }
}

/// `⟦p_m^n⟧`: `D ↦ (φ ↦ ∏φ)` for `D ∈ U_m`, `φ ∈ U_n^D`.
struct OpP {
    m: u32,
    n: u32,
}

impl Func for OpP {
    fn describe(&self) -> String {
        format!("p[{},{}]", self.m, self.n)
    }

    fn domain(&self, ip: &Interp2) -> Result2<Value> {
        Ok(ip.universes.value(self.m))
    }

    fn call(&self, _ip: &Interp2, x: &Value) -> Result2<Value> {
        Ok(Value::Fun(Arc::new(OpPD { m: self.m, n: self.n, d: x.clone() })))
    }
}

struct OpPD {
    m: u32,
    n: u32,
    d: Value,
}

impl Func for OpPD {
    fn describe(&self) -> String {
        format!("p[{},{}]({:?})", self.m, self.n, self.d)
    }

    fn domain(&self, ip: &Interp2) -> Result2<Value> {
        let fam = ConstFn { dom: self.d.clone(), value: ip.universes.value(self.n) };
        Ok(Value::Prod(Arc::new(Value::Fun(Arc::new(fam)))))
    }

    fn call(&self, _: &Interp2, x: &Value) -> Result2<Value> {
        Ok(Value::Prod(Arc::new(x.clone())))
    }
}

// ---------------------------------------------------------------------------
// Interpretations

/// An interpretation: universes, atom values (default `∅`) and a size guard.
#[derive(Clone)]
pub struct Interp2 {
    pub universes: Arc<Universes>,
    atoms: BTreeMap<Atom, Value>,
    pub guard: usize,
}

impl fmt::Debug for Interp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.atoms.iter()).finish()
    }
}

impl Interp2 {
    pub fn new(universes: Arc<Universes>) -> Interp2 {
        Interp2 { universes, atoms: BTreeMap::new(), guard: DEFAULT_SIZE_GUARD }
    }

    /// Binds an atom. Sorts and operators cannot be overridden.
    pub fn set(&mut self, atom: Atom, v: Value) {
        if let Atom::Const(c) = atom {
            assert!(matches!(Const2::decode(c), Const2::User(_)), "sorts and operators are fixed");
        }
        self.atoms.insert(atom, v);
    }

    pub fn get(&self, atom: Atom) -> Value {
        self.atoms.get(&atom).cloned().unwrap_or_else(|| Value::Set(HfSet::empty()))
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Atom, &Value)> {
        self.atoms.iter()
    }

    pub fn eval(&self, t: &Term) -> Result2<Value> {
        self.eval_in(&mut Vec::new(), t)
    }

    /// Evaluates under variable overrides, checking well-formedness.
    pub fn eval_in(&self, env: &mut Vec<(VarId, HfSet)>, t: &Term) -> Result2<Value> {
        match t {
            Term::Const(c) => Ok(match Const2::decode(*c) {
                Const2::Sort(n) => self.universes.value(n),
                Const2::Op(m, n) => Value::Fun(Arc::new(OpP { m, n })),
                Const2::User(_) => self.get(Atom::Const(*c)),
            }),
            Term::Var(v) => match env.iter().rev().find(|(x, _)| x == v) {
                Some((_, s)) => Ok(Value::Set(s.clone())),
                None => Ok(self.get(Atom::Var(*v))),
            },
            Term::Rho(_) => Err(Error2::ill("rho is not part of system 2")),
            Term::Beta(f, a) => {
                let fv = self.eval_in(env, f)?;
                let av = self.eval_in(env, a)?;
                self.apply(&fv, &av)
            }
            Term::Lambda(x, r, s) => {
                let dom = self.eval_in(env, r)?;
                if is_free_in(*x, s) {
                    for d in self.elements(&dom)? {
                        env.push((*x, d));
                        let res = self.eval_in(env, s);
                        env.pop();
                        res?;
                    }
                } else if !self.is_empty(&dom)? {
                    self.eval_in(env, s)?;
                }
                Ok(Value::Fun(Arc::new(Closure { var: *x, dom, body: Arc::new((**s).clone()), env: env.clone() })))
            }
        }
    }

    /// `⟦t⟧^wf`. Resource errors propagate.
    pub fn wf(&self, t: &Term) -> Result2<bool> {
        self.wf_in(&mut Vec::new(), t)
    }

    pub fn wf_in(&self, env: &mut Vec<(VarId, HfSet)>, t: &Term) -> Result2<bool> {
        match self.eval_in(env, t) {
            Ok(_) => Ok(true),
            Err(Error2::IllFormed(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Fully evaluated set value.
    pub fn materialize(&self, v: &Value) -> Result2<HfSet> {
        match v {
            Value::Set(s) => Ok(s.clone()),
            Value::Sort(n) => Err(Error2::OpenCarrier(*n)),
            Value::Fun(f) => {
                let dom = f.domain(self)?;
                let mut entries = Vec::new();
                for d in self.elements(&dom)? {
                    let y = f.call(self, &Value::Set(d.clone()))?;
                    entries.push((d, self.materialize(&y)?));
                }
                Ok(hfset::graph(entries))
            }
            Value::Prod(f) => {
                let fibres = self.fibres(f)?;
                Ok(hfset::product_of_fibres(&fibres, self.guard)?)
            }
        }
    }

    fn fibres(&self, f: &Value) -> Result2<Vec<(HfSet, HfSet)>> {
        let dom = self.domain(f)?;
        let mut out = Vec::new();
        for d in self.elements(&dom)? {
            let fib = self.apply_unchecked(f, &Value::Set(d.clone()))?;
            out.push((d, self.materialize(&fib)?));
        }
        Ok(out)
    }

    /// Elements of a value, each a set.
    pub fn elements(&self, v: &Value) -> Result2<Vec<HfSet>> {
        match v {
            Value::Set(s) => Ok(s.elements().to_vec()),
            Value::Prod(f) => Ok(hfset::product_of_fibres_vec(&self.fibres(f)?, self.guard)?),
            _ => Ok(self.materialize(v)?.elements().to_vec()),
        }
    }

    /// Number of elements.
    pub fn count(&self, v: &Value) -> Result2<u128> {
        match v {
            Value::Set(s) => Ok(s.len() as u128),
            Value::Sort(n) => Err(Error2::OpenCarrier(*n)),
            Value::Fun(f) => self.count(&f.domain(self)?),
            Value::Prod(f) => {
                let dom = self.domain(f)?;
                let mut total: u128 = 1;
                for d in self.elements(&dom)? {
                    let fib = self.apply_unchecked(f, &Value::Set(d))?;
                    total = total.saturating_mul(self.count(&fib)?);
                }
                Ok(total)
            }
        }
    }

    pub fn is_empty(&self, v: &Value) -> Result2<bool> {
        match v {
            Value::Set(s) => Ok(s.is_empty()),
            Value::Sort(_) => Ok(false),
            Value::Fun(f) => self.is_empty(&f.domain(self)?),
            Value::Prod(f) => {
                let dom = self.domain(f)?;
                for d in self.elements(&dom)? {
                    if self.is_empty(&self.apply_unchecked(f, &Value::Set(d))?)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    pub fn is_function(&self, v: &Value) -> Result2<bool> {
        match v {
            Value::Set(s) => Ok(hfset::is_function(s)),
            Value::Sort(_) => Ok(false),
            Value::Fun(_) => Ok(true),
            Value::Prod(_) => Ok(hfset::is_function(&self.materialize(v)?)),
        }
    }

    /// `dom` of a function value.
    pub fn domain(&self, f: &Value) -> Result2<Value> {
        match f {
            Value::Fun(g) => g.domain(self),
            Value::Set(s) => Ok(Value::Set(hfset::domain(s))),
            _ => Ok(Value::Set(hfset::domain(&self.materialize(f)?))),
        }
    }

    fn apply_unchecked(&self, f: &Value, x: &Value) -> Result2<Value> {
        match f {
            Value::Fun(g) => g.call(self, x),
            _ => {
                let g = self.materialize(f)?;
                let x = self.materialize(x)?;
                Ok(Value::Set(hfset::apply(&g, &x)))
            }
        }
    }

    /// `F(S)` when `F` is a function and `S ∈ dom F`; ill-formed otherwise.
    pub fn apply(&self, f: &Value, x: &Value) -> Result2<Value> {
        match f {
            Value::Fun(g) => {
                let dom = g.domain(self)?;
                if !self.contains(&dom, x)? {
                    return Err(Error2::ill(format!("{:?} applied outside its domain", f)));
                }
                g.call(self, x)
            }
            Value::Sort(n) => Err(Error2::ill(format!("sort u{} applied as a function", n))),
            _ => {
                let g = self.materialize(f)?;
                if !hfset::is_function(&g) {
                    return Err(Error2::ill(format!("{} is not a function", g)));
                }
                let xs = self.materialize(x)?;
                hfset::lookup(&g, &xs).map(Value::Set).ok_or_else(|| Error2::ill(format!("{} not in domain of {}", xs, g)))
            }
        }
    }

    /// `x ∈ c`.
    pub fn contains(&self, c: &Value, x: &Value) -> Result2<bool> {
        match c {
            Value::Sort(n) => Ok(match x {
                Value::Sort(m) => m < n,
                _ => true,
            }),
            Value::Set(s) => match x {
                Value::Sort(_) => Ok(false),
                _ => Ok(s.contains(&self.materialize(x)?)),
            },
            Value::Prod(fam) => self.prod_contains(fam, x),
            Value::Fun(g) => {
                let Value::Set(p) = x else {
                    return Ok(false);
                };
                let Some((v, a)) = hfset::unpair(p) else { return Ok(false) };
                let a = Value::Set(a);
                if !self.contains(&g.domain(self)?, &a)? {
                    return Ok(false);
                }
                let got = g.call(self, &a)?;
                self.val_eq(&got, &Value::Set(v))
            }
        }
    }

    fn prod_contains(&self, fam: &Value, x: &Value) -> Result2<bool> {
        let dom = self.domain(fam)?;
        let fixed = match fam {
            Value::Fun(f) => f.constant(self)?,
            _ => None,
        };
        let fibre = |a: &Value| -> Result2<Value> {
            match &fixed {
                Some(v) => Ok(v.clone()),
                None => self.apply_unchecked(fam, a),
            }
        };
        match x {
            Value::Sort(_) => Ok(false),
            Value::Set(g) => {
                if !hfset::is_function(g) || g.len() as u128 != self.count(&dom)? {
                    return Ok(false);
                }
                for e in g.iter() {
                    let (v, a) = hfset::unpair(e).expect("function element");
                    let a = Value::Set(a);
                    if !self.contains(&dom, &a)? {
                        return Ok(false);
                    }
                    if !self.contains(&fibre(&a)?, &Value::Set(v))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Value::Fun(g) => {
                if !self.val_eq(&g.domain(self)?, &dom)? {
                    return Ok(false);
                }
                let fixed = match &fixed {
                    Some(v) => Some(self.tabulate_prod(v)?),
                    None => None,
                };
                if let (Some(fib), Some(gv)) = (&fixed, g.constant(self)?) {
                    return Ok(self.is_empty(&dom)? || self.contains(fib, &gv)?);
                }
                for d in self.elements(&dom)? {
                    let d = Value::Set(d);
                    let fib = match &fixed {
                        Some(v) => v.clone(),
                        None => self.apply_unchecked(fam, &d)?,
                    };
                    if !self.contains(&fib, &g.call(self, &d)?)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Value::Prod(_) => {
                let m = self.materialize(x)?;
                self.prod_contains(fam, &Value::Set(m))
            }
        }
    }

    /// Replaces `∏φ` for a lazily computed `φ` with finite domain and
    /// set values by `∏` of its graph, so repeated membership tests do not
    /// re-evaluate `φ`.
    fn tabulate_prod(&self, v: &Value) -> Result2<Value> {
        let Value::Prod(fam) = v else { return Ok(v.clone()) };
        let Value::Fun(f) = fam.as_ref() else { return Ok(v.clone()) };
        let Value::Set(dom) = f.domain(self)? else { return Ok(v.clone()) };
        let mut entries = Vec::with_capacity(dom.len());
        for d in dom.iter() {
            match f.call(self, &Value::Set(d.clone()))? {
                Value::Set(s) => entries.push((d.clone(), s)),
                _ => return Ok(v.clone()),
            }
        }
        Ok(Value::Prod(Arc::new(Value::Set(hfset::graph(entries)))))
    }

    /// Extensional equality of values.
    pub fn val_eq(&self, a: &Value, b: &Value) -> Result2<bool> {
        match (a, b) {
            (Value::Set(x), Value::Set(y)) => Ok(x == y),
            (Value::Sort(m), Value::Sort(n)) => Ok(m == n),
            (Value::Sort(_), _) | (_, Value::Sort(_)) => Ok(false),
            (Value::Prod(f), Value::Prod(g)) => {
                let (ea, eb) = (self.is_empty(a)?, self.is_empty(b)?);
                if ea || eb {
                    return Ok(ea == eb);
                }
                self.fun_eq(f, g)
            }
            (Value::Fun(_), Value::Fun(_)) => self.fun_eq(a, b),
            (Value::Set(s), other) | (other, Value::Set(s)) => {
                if s.len() as u128 != self.count(other)? {
                    return Ok(false);
                }
                for e in s.iter() {
                    if !self.contains(other, &Value::Set(e.clone()))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(self.materialize(a)? == self.materialize(b)?),
        }
    }

    fn fun_eq(&self, f: &Value, g: &Value) -> Result2<bool> {
        let (df, dg) = (self.domain(f)?, self.domain(g)?);
        if !self.val_eq(&df, &dg)? {
            return Ok(false);
        }
        for d in self.elements(&df)? {
            let d = Value::Set(d);
            if !self.val_eq(&self.apply_unchecked(f, &d)?, &self.apply_unchecked(g, &d)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `a ⊆ b`.
    pub fn subset(&self, a: &Value, b: &Value) -> Result2<bool> {
        match (a, b) {
            (Value::Sort(m), Value::Sort(n)) => Ok(m <= n),
            (Value::Sort(_), _) => Ok(false),
            (_, Value::Sort(_)) => Ok(true),
            (Value::Fun(_), Value::Fun(_)) => {
                let (da, db) = (self.domain(a)?, self.domain(b)?);
                for d in self.elements(&da)? {
                    let d = Value::Set(d);
                    if !self.contains(&db, &d)? {
                        return Ok(false);
                    }
                    if !self.val_eq(&self.apply_unchecked(a, &d)?, &self.apply_unchecked(b, &d)?)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => {
                for e in self.elements(a)? {
                    if !self.contains(b, &Value::Set(e))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Satisfaction of a statement. Reduction statements quantify over all
    /// maps from their free variables into `var_pool`.
    pub fn satisfies(&self, st: &Statement2, var_pool: &[HfSet]) -> Result2<bool> {
        match st.kind {
            StmtKind::Typing => {
                let s = match self.eval(&st.left) {
                    Ok(v) => v,
                    Err(Error2::IllFormed(_)) => return Ok(false),
                    Err(e) => return Err(e),
                };
                let p = match self.eval(&st.right) {
                    Ok(v) => v,
                    Err(Error2::IllFormed(_)) => return Ok(false),
                    Err(e) => return Err(e),
                };
                self.contains(&p, &s)
            }
            StmtKind::Reduction | StmtKind::SubReduction => {
                let mut vars: VarSet = free_vars(&st.left);
                vars.extend(free_vars(&st.right));
                let vars: Vec<VarId> = vars.into_iter().collect();
                if vars.is_empty() {
                    return self.reduction_holds(st, &mut Vec::new());
                }
                if var_pool.is_empty() {
                    return Ok(true);
                }
                for choice in (0..vars.len()).map(|_| var_pool.iter()).multi_cartesian_product() {
                    let mut env: Vec<(VarId, HfSet)> = vars.iter().copied().zip(choice.into_iter().cloned()).collect();
                    if !self.reduction_holds(st, &mut env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn reduction_holds(&self, st: &Statement2, env: &mut Vec<(VarId, HfSet)>) -> Result2<bool> {
        let l = match self.eval_in(env, &st.left) {
            Ok(v) => v,
            Err(Error2::IllFormed(_)) => return Ok(true),
            Err(e) => return Err(e),
        };
        let r = match self.eval_in(env, &st.right) {
            Ok(v) => v,
            Err(Error2::IllFormed(_)) => return Ok(false),
            Err(e) => return Err(e),
        };
        if st.kind == StmtKind::Reduction {
            self.val_eq(&l, &r)
        } else {
            self.subset(&l, &r)
        }
    }

    /// Checks `(λxR(Fx) ▷ F)`; also reports whether the two sides were equal
    /// under every pool valuation where the left side is well-formed.
    pub fn eta_check(&self, r: &Term, f: &Term, x: VarId, var_pool: &[HfSet]) -> Result2<EtaOutcome> {
        if is_free_in(x, f) {
            return Err(Error2::Precondition(format!("v{} is free in the function term", x)));
        }
        let lam = Term::lam(x, r.clone(), Term::beta(f.clone(), Term::Var(x)));
        let sub = Statement2::new(StmtKind::SubReduction, lam.clone(), f.clone());
        let red = Statement2::new(StmtKind::Reduction, lam, f.clone());
        Ok(EtaOutcome { subset: self.satisfies(&sub, var_pool)?, equal: self.satisfies(&red, var_pool)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtaOutcome {
    pub subset: bool,
    pub equal: bool,
}

// ---------------------------------------------------------------------------
// Statements

/// A typing, reduction or sub-reduction statement between raw terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Statement2 {
    pub kind: StmtKind,
    pub left: Term,
    pub right: Term,
}

impl Statement2 {
    pub fn new(kind: StmtKind, left: Term, right: Term) -> Statement2 {
        Statement2 { kind, left, right }
    }

    pub fn typing(s: Term, p: Term) -> Statement2 {
        Statement2::new(StmtKind::Typing, s, p)
    }

    pub fn reduction(r: Term, c: Term) -> Statement2 {
        Statement2::new(StmtKind::Reduction, r, c)
    }

    pub fn subreduction(r: Term, c: Term) -> Statement2 {
        Statement2::new(StmtKind::SubReduction, r, c)
    }

    /// Free variables; reduction statements contribute none to `F(Γ)`.
    pub fn context_free_vars(&self) -> VarSet {
        match self.kind {
            StmtKind::Typing => {
                let mut f = free_vars(&self.left);
                f.extend(free_vars(&self.right));
                f
            }
            _ => VarSet::new(),
        }
    }

    pub fn render(&self, table: Option<&AtomTable>) -> String {
        print_statement(&self.left, self.kind, &self.right, System::Two, table)
    }

    fn alpha_key(&self) -> (StmtKind, Term, Term) {
        (self.kind, canonicalize(&self.left).into_term(), canonicalize(&self.right).into_term())
    }
}

impl fmt::Display for Statement2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

// ---------------------------------------------------------------------------
// Reductions and closures

/// Contracts a top-level β-redex `(λxRS)T` to `S[T/x]`.
pub fn head_beta(t: &Term) -> Option<Term> {
    let Term::Beta(f, a) = t else { return None };
    let Term::Lambda(x, _, s) = &**f else { return None };
    Some(substitute(s, a, *x))
}

/// All one-step contextual β-contractions.
pub fn beta_reduce_all(t: &Term) -> Vec<Term> {
    rewrite_once(t, &mut |u| head_beta(u).into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transitive closure exceeded its budget of {0} rounds")]
pub struct ClosureBudget(pub usize);

/// Default round budget for [`transitive_closure`].
pub const DEFAULT_CLOSURE_BUDGET: usize = 64;

fn dedup_alpha(stmts: impl IntoIterator<Item = Statement2>) -> Vec<Statement2> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for st in stmts {
        if seen.insert(st.alpha_key()) {
            out.push(st);
        }
    }
    out
}

/// Contextual closure up to `depth` nested contexts, with `fillers` as the
/// other subterm and `binders` as λ-binders in each context layer.
pub fn contextual_closure(stmts: &[Statement2], fillers: &[Term], binders: &[VarId], depth: usize) -> Vec<Statement2> {
    let mut all: Vec<Statement2> = dedup_alpha(stmts.iter().cloned());
    let mut layer = all.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for st in &layer {
            let (l, r) = (&st.left, &st.right);
            for s in fillers {
                next.push(Statement2::new(st.kind, Term::beta(s.clone(), l.clone()), Term::beta(s.clone(), r.clone())));
                next.push(Statement2::new(st.kind, Term::beta(l.clone(), s.clone()), Term::beta(r.clone(), s.clone())));
                for &x in binders {
                    next.push(Statement2::new(st.kind, Term::lam(x, s.clone(), l.clone()), Term::lam(x, s.clone(), r.clone())));
                    next.push(Statement2::new(st.kind, Term::lam(x, l.clone(), s.clone()), Term::lam(x, r.clone(), s.clone())));
                }
            }
        }
        all.extend(next.iter().cloned());
        all = dedup_alpha(all);
        layer = next;
    }
    all
}

/// Adds `t • t` for every term of `universe`.
pub fn reflexive_closure(stmts: &[Statement2], kind: StmtKind, universe: &[Term]) -> Vec<Statement2> {
    let mut all = stmts.to_vec();
    all.extend(universe.iter().map(|t| Statement2::new(kind, t.clone(), t.clone())));
    dedup_alpha(all)
}

/// Composes chains `a • b`, `b' • c` with `b ≡α b'` until nothing new appears.
pub fn transitive_closure(stmts: &[Statement2], budget: usize) -> Result<Vec<Statement2>, ClosureBudget> {
    let mut all = dedup_alpha(stmts.iter().cloned());
    for _ in 0..budget {
        let keys: BTreeSet<_> = all.iter().map(|s| s.alpha_key()).collect();
        let mut added = Vec::new();
        for a in &all {
            let mid = canonicalize(&a.right);
            for b in all.iter().filter(|b| b.kind == a.kind && canonicalize(&b.left) == mid) {
                let st = Statement2::new(a.kind, a.left.clone(), b.right.clone());
                if !keys.contains(&st.alpha_key()) {
                    added.push(st);
                }
            }
        }
        if added.is_empty() {
            return Ok(all);
        }
        all.extend(added);
        all = dedup_alpha(all);
    }
    Err(ClosureBudget(budget))
}

/// Head α statements `λxRS ⊳ λyR S[y/x]` for `y` in the given window.
pub fn head_alpha_statements(t: &Term, window: core::ops::RangeInclusive<VarId>) -> Vec<Statement2> {
    let Term::Lambda(x, r, s) = t else { return Vec::new() };
    let fs = free_vars(s);
    window
        .filter(|y| y == x || !fs.contains(y))
        .map(|y| Statement2::reduction(t.clone(), Term::lam(y, (**r).clone(), substitute(s, &Term::Var(y), *x))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hfset::enumerate_pool;
    use crate::syntax::{mk_arrow2, mk_pi2, op, sort, user_const};

    fn two() -> HfSet {
        HfSet::nat(2)
    }

    fn small_universes() -> Arc<Universes> {
        let u1 = HfSet::from_vec(enumerate_pool(2).unwrap()).insert(two());
        Arc::new(Universes::from_finite(&[two(), u1]).unwrap())
    }

    #[test]
    fn product_operator_values() {
        let ip = Interp2::new(small_universes());
        let d = two();
        let phi = hfset::graph([(HfSet::empty(), HfSet::nat(1)), (HfSet::nat(1), HfSet::empty())]);
        let t = Term::beta(Term::beta(op(1, 0), Term::Var(0)), Term::Var(1));
        let mut env = alloc::vec![(0, d), (1, phi.clone())];
        let v = ip.eval_in(&mut env, &t).unwrap();
        assert_eq!(ip.materialize(&v).unwrap(), hfset::dep_product(&phi));
    }

    #[test]
    fn pi_matches_product_of_fibres() {
        let ip = Interp2::new(small_universes());
        // (x : u0) ->[1,0] x  is  ∏_{r ∈ U0} r
        let t = mk_pi2(1, 0, 0, sort(0), Term::Var(0));
        let v = ip.eval(&t).unwrap();
        let fibres: Vec<(HfSet, HfSet)> = two().iter().map(|r| (r.clone(), r.clone())).collect();
        assert_eq!(ip.materialize(&v).unwrap(), hfset::product_of_fibres(&fibres, 100).unwrap());
    }

    #[test]
    fn wf_examples() {
        let ip = Interp2::new(small_universes());
        let mut ip2 = ip.clone();
        ip2.set(Atom::Const(user_const(0).max_const().unwrap()), Value::Set(two()));
        assert!(!ip2.wf(&Term::beta(user_const(0), user_const(1))).unwrap());
        // u0 -> u0 is not wf at indices [0,0]: u0 ∉ U0
        assert!(!ip.wf(&mk_arrow2(0, 0, sort(0), sort(0))).unwrap());
        assert!(ip.wf(&mk_arrow2(1, 1, sort(0), sort(0))).unwrap());
        // λx:u0. x x is ill-formed (∅ applied to ∅)
        let bad = Term::lam(0, sort(0), Term::beta(Term::Var(0), Term::Var(0)));
        assert!(!ip.wf(&bad).unwrap());
    }

    #[test]
    fn sort_statements() {
        let ip = Interp2::new(small_universes());
        let sat = |k, m, n| ip.satisfies(&Statement2::new(k, sort(m), sort(n)), &[]).unwrap();
        assert!(sat(StmtKind::Typing, 0, 1));
        assert!(!sat(StmtKind::Typing, 1, 0));
        assert!(!sat(StmtKind::Typing, 0, 0));
        assert!(sat(StmtKind::Reduction, 1, 1));
        assert!(!sat(StmtKind::Reduction, 0, 1));
        assert!(sat(StmtKind::SubReduction, 0, 1));
        assert!(!sat(StmtKind::SubReduction, 1, 0));
        // open sorts beyond the declared ones
        assert!(sat(StmtKind::Typing, 1, 2));
        assert!(sat(StmtKind::SubReduction, 1, 3));
        assert!(!sat(StmtKind::Typing, 3, 2));
    }

    #[test]
    fn head_beta_examples() {
        let id = Term::lam(0, user_const(0), Term::Var(0));
        assert_eq!(head_beta(&Term::beta(id.clone(), user_const(1))), Some(user_const(1)));
        assert_eq!(head_beta(&user_const(0)), None);
        let nested = Term::beta(user_const(2), Term::beta(id, user_const(1)));
        assert_eq!(beta_reduce_all(&nested), alloc::vec![Term::beta(user_const(2), user_const(1))]);
        let ip = Interp2::new(small_universes());
        let st = Statement2::reduction(Term::beta(Term::lam(0, sort(0), Term::Var(0)), Term::Var(1)), Term::Var(1));
        assert!(ip.satisfies(&st, &enumerate_pool(2).unwrap()).unwrap());
    }

    #[test]
    fn eta() {
        let ip = Interp2::new(small_universes());
        let f = Term::lam(1, sort(0), Term::Var(1));
        let out = ip.eta_check(&sort(0), &f, 0, &[]).unwrap();
        assert_eq!(out, EtaOutcome { subset: true, equal: true });
        assert!(ip.eta_check(&sort(0), &Term::Var(0), 0, &[]).is_err());
    }

    #[test]
    fn closures() {
        let (a, b, c) = (user_const(0), user_const(1), user_const(2));
        let stmts = [Statement2::subreduction(a.clone(), b.clone()), Statement2::subreduction(b, c.clone())];
        let t = transitive_closure(&stmts, 8).unwrap();
        assert!(t.contains(&Statement2::subreduction(a.clone(), c.clone())));
        let cl = contextual_closure(&stmts[..1], core::slice::from_ref(&c), &[0], 1);
        assert!(cl.contains(&Statement2::subreduction(Term::beta(c.clone(), a.clone()), Term::beta(c, user_const(1)))));
        let cyc = [Statement2::subreduction(a.clone(), a.clone())];
        assert_eq!(transitive_closure(&cyc, 1).unwrap().len(), 1);
        let r = reflexive_closure(&[], StmtKind::Reduction, core::slice::from_ref(&a));
        assert_eq!(r, alloc::vec![Statement2::reduction(a.clone(), a)]);
    }

    #[test]
    fn universe_builder() {
        let spec = UniverseSpec {
            carriers: alloc::vec![CarrierSpec::Sets { members: Vec::new(), lower_as_elements: Vec::new() }],
            proof_irrelevant: true,
            prop_extensional: true,
            max_carrier: 0,
        };
        let u = Universes::build(&spec).unwrap();
        assert_eq!(u.carrier(0), Carrier::Finite(two()));
        let bad = UniverseSpec {
            carriers: alloc::vec![CarrierSpec::Sets { members: alloc::vec![two()], lower_as_elements: Vec::new() }],
            proof_irrelevant: true,
            ..UniverseSpec::default()
        };
        assert!(matches!(Universes::build(&bad), Err(UniverseError::NotProofIrrelevant(_))));
        let nested = UniverseSpec {
            carriers: alloc::vec![
                CarrierSpec::Sets { members: Vec::new(), lower_as_elements: Vec::new() },
                CarrierSpec::Sets { members: enumerate_pool(2).unwrap(), lower_as_elements: alloc::vec![0] },
            ],
            ..UniverseSpec::default()
        };
        let u = Universes::build(&nested).unwrap();
        let ip = Interp2::new(Arc::new(u.clone()));
        assert!(ip.satisfies(&Statement2::typing(sort(0), sort(1)), &[]).unwrap());
        let report = u.capability_report(10_000);
        assert!(report.lines.iter().any(|(w, c)| w == "(u0 : u1)" && *c == Capability::Holds));
    }
}
