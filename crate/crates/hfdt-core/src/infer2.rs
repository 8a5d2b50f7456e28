//! System-2 inference: explicit derivations over the Hyp, reduction, App,
//! Ab and Cut rules, a checker with per-step diagnostics, bounded search and
//! legal-context recognition.
//!
//! Statements are matched syntactically. α-conversion enters only through
//! reduction statements supplied as hypotheses.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::binding::{alpha_eq, free_vars, VarSet};
use crate::syntax::sugar::StmtKind;
use crate::syntax::{mk_pi2, sort, Const2, Term, VarId};
use crate::system2::{beta_reduce_all, Statement2};

pub type Gamma2 = BTreeSet<Statement2>;

/// `F(Γ)`: free variables of typing statements only.
pub fn gamma2_free_vars<'a>(stmts: impl IntoIterator<Item = &'a Statement2>) -> VarSet {
    stmts.into_iter().flat_map(|s| s.context_free_vars()).collect()
}

fn as_sort(t: &Term) -> Option<u32> {
    match t {
        Term::Const(c) => match Const2::decode(*c) {
            Const2::Sort(n) => Some(n),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Hyp,
    RedSubject,
    RedPredicate,
    App,
    Ab,
    Cut,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Hyp => "hyp",
            Rule::RedSubject => "red-subject",
            Rule::RedPredicate => "red-predicate",
            Rule::App => "app",
            Rule::Ab => "ab",
            Rule::Cut => "cut",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        [Rule::Hyp, Rule::RedSubject, Rule::RedPredicate, Rule::App, Rule::Ab, Rule::Cut]
            .into_iter()
            .find(|r| r.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleData {
    None,
    Ab { x: VarId, q: Term, m: u32, n: u32 },
}

/// Hypotheses in force for a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScopeKind {
    /// The global hypothesis set.
    Gamma,
    /// The parent scope plus one statement, as opened by Ab.
    Extend(Statement2),
    /// A stand-alone hypothesis set, discharged by Cut.
    Lemma(Vec<Statement2>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scope {
    pub parent: Option<usize>,
    pub kind: ScopeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub conclusion: Statement2,
    pub rule: Rule,
    pub premises: Vec<usize>,
    pub scope: usize,
    pub data: RuleData,
}

/// A list of steps with premises pointing backwards; the last step is the
/// root and must live in the global scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub scopes: Vec<Scope>,
    pub steps: Vec<Step>,
}

impl Default for Derivation {
    fn default() -> Self {
        Derivation::new()
    }
}

impl Derivation {
    pub fn new() -> Derivation {
        Derivation { scopes: vec![Scope { parent: None, kind: ScopeKind::Gamma }], steps: Vec::new() }
    }

    /// Opens a scope extending `parent` by one hypothesis.
    pub fn extend(&mut self, parent: usize, st: Statement2) -> usize {
        if let Some(i) = self.scopes.iter().position(|s| s.parent == Some(parent) && s.kind == ScopeKind::Extend(st.clone())) {
            return i;
        }
        self.scopes.push(Scope { parent: Some(parent), kind: ScopeKind::Extend(st) });
        self.scopes.len() - 1
    }

    /// Opens a stand-alone lemma scope.
    pub fn lemma(&mut self, hyps: Vec<Statement2>) -> usize {
        self.scopes.push(Scope { parent: None, kind: ScopeKind::Lemma(hyps) });
        self.scopes.len() - 1
    }

    pub fn push(&mut self, scope: usize, rule: Rule, premises: Vec<usize>, conclusion: Statement2, data: RuleData) -> usize {
        self.steps.push(Step { conclusion, rule, premises, scope, data });
        self.steps.len() - 1
    }

    pub fn hyp(&mut self, scope: usize, st: Statement2) -> usize {
        self.push(scope, Rule::Hyp, Vec::new(), st, RuleData::None)
    }

    pub fn root(&self) -> Option<&Statement2> {
        self.steps.last().map(|s| &s.conclusion)
    }

    /// Hypotheses available in `scope`, given the global set.
    pub fn hyps(&self, gamma: &Gamma2, scope: usize) -> Gamma2 {
        let sc = &self.scopes[scope];
        let mut base = match sc.parent {
            Some(p) if p < scope => self.hyps(gamma, p),
            _ => Gamma2::new(),
        };
        match &sc.kind {
            ScopeKind::Gamma => base.extend(gamma.iter().cloned()),
            ScopeKind::Extend(st) => {
                base.insert(st.clone());
            }
            ScopeKind::Lemma(d) => base.extend(d.iter().cloned()),
        }
        base
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("empty derivation")]
    Empty,
    #[error("premise {premise} is not an earlier step")]
    Dangling { premise: usize },
    #[error("scope {0} is malformed")]
    BadScope(usize),
    #[error("root step is not in the global scope")]
    RootScope,
    #[error("{rule} expects {expected} premises, got {got}")]
    Arity { rule: &'static str, expected: usize, got: usize },
    #[error("not a hypothesis in scope")]
    NotHypothesis,
    #[error("premise {premise} uses hypotheses not available here")]
    ScopeMismatch { premise: usize },
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("v{x} is not fresh")]
    Freshness { x: VarId },
    #[error("hypothesis {statement} is outside preset {preset}")]
    PresetViolation { statement: String, preset: Preset },
}

fn schema(msg: impl Into<String>) -> StepError {
    StepError::Schema(msg.into())
}

/// Restrictions on reduction hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Preset {
    /// α only in `|>`; α and β in `|>=`.
    Pure,
    /// α only in `|>`; any `|>=`.
    LeanLike,
    /// Anything.
    #[default]
    Extensional,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Pure => "pure",
            Preset::LeanLike => "lean-like",
            Preset::Extensional => "extensional",
        }
    }

    pub fn from_name(s: &str) -> Option<Preset> {
        [Preset::Pure, Preset::LeanLike, Preset::Extensional].into_iter().find(|p| p.name() == s)
    }

    /// Whether a reduction hypothesis is admitted.
    pub fn admits(self, st: &Statement2) -> bool {
        match (self, st.kind) {
            (_, StmtKind::Typing) | (Preset::Extensional, _) => true,
            (_, StmtKind::Reduction) => alpha_eq(&st.left, &st.right),
            (Preset::LeanLike, StmtKind::SubReduction) => true,
            (Preset::Pure, StmtKind::SubReduction) => beta_reaches(&st.left, &st.right, 8),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether `b` is α-equivalent to a term reachable from `a` in at most
/// `steps` β-contractions.
fn beta_reaches(a: &Term, b: &Term, steps: usize) -> bool {
    let mut frontier = vec![a.clone()];
    let mut seen = BTreeSet::new();
    for _ in 0..=steps {
        let mut next = Vec::new();
        for t in frontier {
            if alpha_eq(&t, b) {
                return true;
            }
            if seen.insert(t.clone()) {
                next.extend(beta_reduce_all(&t));
            }
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    false
}

fn expect_arity(rule: Rule, premises: &[usize], n: usize) -> Result<(), StepError> {
    if premises.len() == n {
        Ok(())
    } else {
        Err(StepError::Arity { rule: rule.name(), expected: n, got: premises.len() })
    }
}

/// Checks one step of a derivation.
pub fn check_step(gamma: &Gamma2, d: &Derivation, i: usize) -> Result<(), StepError> {
    let step = &d.steps[i];
    if step.scope >= d.scopes.len() {
        return Err(StepError::BadScope(step.scope));
    }
    for (j, sc) in d.scopes.iter().enumerate() {
        let ok = match (&sc.kind, sc.parent) {
            (ScopeKind::Gamma, None) => j == 0,
            (ScopeKind::Extend(_), Some(p)) => p < j,
            (ScopeKind::Lemma(_), None) => true,
            _ => false,
        };
        if !ok {
            return Err(StepError::BadScope(j));
        }
    }
    if let Some(&p) = step.premises.iter().find(|&&p| p >= i) {
        return Err(StepError::Dangling { premise: p });
    }
    let here = d.hyps(gamma, step.scope);
    let prem = |k: usize| &d.steps[step.premises[k]];
    let within = |k: usize, avail: &Gamma2| -> Result<(), StepError> {
        if d.hyps(gamma, prem(k).scope).is_subset(avail) {
            Ok(())
        } else {
            Err(StepError::ScopeMismatch { premise: step.premises[k] })
        }
    };
    let c = &step.conclusion;
    match step.rule {
        Rule::Hyp => {
            expect_arity(step.rule, &step.premises, 0)?;
            if !here.contains(c) {
                return Err(StepError::NotHypothesis);
            }
        }
        Rule::RedSubject | Rule::RedPredicate => {
            expect_arity(step.rule, &step.premises, 2)?;
            within(0, &here)?;
            within(1, &here)?;
            let (t, r) = (&prem(0).conclusion, &prem(1).conclusion);
            if t.kind != StmtKind::Typing || c.kind != StmtKind::Typing {
                return Err(schema("expected typing statements"));
            }
            if step.rule == Rule::RedSubject {
                // (R:P),(R |> S) gives (S:P)
                if r.kind != StmtKind::Reduction || r.left != t.left || r.right != c.left || t.right != c.right {
                    return Err(schema("expected (R:P), (R |> S) and conclusion (S:P)"));
                }
            } else if r.kind != StmtKind::SubReduction || r.left != t.right || t.left != c.left || r.right != c.right {
                return Err(schema("expected (S:R), (R |>= P) and conclusion (S:P)"));
            }
        }
        Rule::App => {
            expect_arity(step.rule, &step.premises, 2)?;
            within(0, &here)?;
            within(1, &here)?;
            let (s, f) = (&prem(0).conclusion, &prem(1).conclusion);
            let bad = || schema("expected (S:R), (F : p R G) and conclusion (F S : G S)");
            if s.kind != StmtKind::Typing || f.kind != StmtKind::Typing || c.kind != StmtKind::Typing {
                return Err(bad());
            }
            let Term::Beta(pr, g) = &f.right else { return Err(bad()) };
            let Term::Beta(p, r) = &**pr else { return Err(bad()) };
            let is_op = matches!(&**p, Term::Const(k) if matches!(Const2::decode(*k), Const2::Op(..)));
            if !is_op || **r != s.right {
                return Err(bad());
            }
            if c.left != Term::beta(f.left.clone(), s.left.clone()) || c.right != Term::beta((**g).clone(), s.left.clone()) {
                return Err(bad());
            }
        }
        Rule::Ab => {
            expect_arity(step.rule, &step.premises, 3)?;
            let RuleData::Ab { x, q, m, n } = &step.data else {
                return Err(schema("Ab needs x, Q, m, n"));
            };
            let bind = Statement2::typing(Term::Var(*x), q.clone());
            let mut ext = here.clone();
            ext.insert(bind);
            within(0, &ext)?;
            within(1, &ext)?;
            within(2, &here)?;
            let (body, pred, dom) = (&prem(0).conclusion, &prem(1).conclusion, &prem(2).conclusion);
            if [body, pred, dom].iter().any(|s| s.kind != StmtKind::Typing) {
                return Err(schema("Ab premises are typing statements"));
            }
            if pred.left != body.right || pred.right != sort(*n) {
                return Err(schema("second premise must be (P : u_n)"));
            }
            if dom.left != *q || dom.right != sort(*m) {
                return Err(schema("third premise must be (Q : u_m)"));
            }
            let want = Statement2::typing(
                Term::lam(*x, q.clone(), body.left.clone()),
                mk_pi2(*m, *n, *x, q.clone(), body.right.clone()),
            );
            if *c != want {
                return Err(schema(format!("conclusion should be {}", want)));
            }
            let mut fv = gamma2_free_vars(here.iter());
            fv.extend(free_vars(q));
            if fv.contains(x) {
                return Err(StepError::Freshness { x: *x });
            }
        }
        Rule::Cut => {
            if step.premises.is_empty() {
                return Err(StepError::Arity { rule: "cut", expected: 1, got: 0 });
            }
            let lemma = prem(0);
            let ScopeKind::Lemma(delta) = &d.scopes[lemma.scope].kind else {
                return Err(schema("first Cut premise must be derived in a lemma scope"));
            };
            if lemma.conclusion != *c {
                return Err(schema("Cut conclusion must match the lemma"));
            }
            let mut proved = here.clone();
            for k in 1..step.premises.len() {
                within(k, &here)?;
                proved.insert(prem(k).conclusion.clone());
            }
            if let Some(missing) = delta.iter().find(|s| !proved.contains(*s)) {
                return Err(schema(format!("lemma hypothesis {} not established", missing)));
            }
        }
    }
    Ok(())
}

/// Outcome of checking a derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckVerdict {
    pub valid: bool,
    pub root: Option<Statement2>,
    pub preset: Preset,
    pub diagnostics: Vec<(Option<usize>, StepError)>,
}

/// Checks every step, the root scope and the preset on the reduction
/// hypotheses of `Γ` that the derivation uses.
pub fn check_derivation(gamma: &Gamma2, d: &Derivation, preset: Preset) -> CheckVerdict {
    let mut diagnostics = Vec::new();
    if d.steps.is_empty() {
        diagnostics.push((None, StepError::Empty));
    }
    for i in 0..d.steps.len() {
        if let Err(e) = check_step(gamma, d, i) {
            diagnostics.push((Some(i), e));
        }
    }
    if let Some(last) = d.steps.last() {
        if last.scope != 0 {
            diagnostics.push((Some(d.steps.len() - 1), StepError::RootScope));
        }
    }
    for (i, s) in d.steps.iter().enumerate() {
        if s.rule == Rule::Hyp && s.conclusion.kind != StmtKind::Typing && gamma.contains(&s.conclusion) && !preset.admits(&s.conclusion) {
            diagnostics.push((Some(i), StepError::PresetViolation { statement: format!("{}", s.conclusion), preset }));
        }
    }
    CheckVerdict { valid: diagnostics.is_empty(), root: d.root().cloned(), preset, diagnostics }
}

/// Adds hypotheses to `Γ` and re-checks; fails if a new free variable
/// clashes with an Ab-bound variable.
pub fn weaken(gamma: &Gamma2, d: &Derivation, extra: &[Statement2]) -> Result<Gamma2, VarId> {
    let fv = gamma2_free_vars(extra.iter());
    for s in &d.steps {
        if let RuleData::Ab { x, .. } = &s.data {
            if fv.contains(x) {
                return Err(*x);
            }
        }
    }
    let mut g = gamma.clone();
    g.extend(extra.iter().cloned());
    Ok(g)
}

// ---------------------------------------------------------------------------
// Search

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search budget of {0} nodes exhausted")]
pub struct SearchBudget(pub usize);

pub const DEFAULT_SEARCH_BUDGET: usize = 200_000;

#[derive(Debug)]
enum Proof {
    Hyp(Statement2),
    App { concl: Statement2, s: Rc<Proof>, f: Rc<Proof> },
    Ab { concl: Statement2, x: VarId, q: Term, m: u32, n: u32, body: Rc<Proof>, pred: Rc<Proof>, dom: Rc<Proof> },
    RedSubject { concl: Statement2, typ: Rc<Proof>, red: Statement2 },
    RedPredicate { concl: Statement2, typ: Rc<Proof>, red: Statement2 },
}

type Synth = Rc<Vec<(Term, Rc<Proof>)>>;

struct Searcher<'a> {
    gamma: &'a Gamma2,
    reductions: Vec<&'a Statement2>,
    budget: usize,
    used: usize,
    memo: BTreeMap<(Vec<Statement2>, Term, usize), Synth>,
}

impl<'a> Searcher<'a> {
    fn new(gamma: &'a Gamma2, budget: usize) -> Self {
        let reductions = gamma.iter().filter(|s| s.kind != StmtKind::Typing).collect();
        Searcher { gamma, reductions, budget, used: 0, memo: BTreeMap::new() }
    }

    /// All predicates derivable for `t` within `depth` rule applications,
    /// in a deterministic order, each with one proof.
    fn synth(&mut self, ext: &[Statement2], t: &Term, depth: usize) -> Result<Synth, SearchBudget> {
        let key = (ext.to_vec(), t.clone(), depth);
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        self.used += 1;
        if self.used > self.budget {
            return Err(SearchBudget(self.budget));
        }
        let mut out: BTreeMap<Term, Rc<Proof>> = BTreeMap::new();
        let add = |out: &mut BTreeMap<Term, Rc<Proof>>, p: Term, pr: Proof| {
            out.entry(p).or_insert_with(|| Rc::new(pr));
        };
        for h in self.gamma.iter().chain(ext.iter()) {
            if h.kind == StmtKind::Typing && h.left == *t {
                add(&mut out, h.right.clone(), Proof::Hyp(h.clone()));
            }
        }
        if depth > 0 {
            let d = depth - 1;
            if let Term::Beta(f, s) = t {
                let fs = self.synth(ext, f, d)?;
                let ss = self.synth(ext, s, d)?;
                for (fp, fproof) in fs.iter() {
                    let Term::Beta(pr, g) = fp else { continue };
                    let Term::Beta(p, r) = &**pr else { continue };
                    let is_op = matches!(&**p, Term::Const(k) if matches!(Const2::decode(*k), Const2::Op(..)));
                    if !is_op {
                        continue;
                    }
                    if let Some((_, sproof)) = ss.iter().find(|(sp, _)| sp == &**r) {
                        let pred = Term::beta((**g).clone(), (**s).clone());
                        let concl = Statement2::typing(t.clone(), pred.clone());
                        add(&mut out, pred, Proof::App { concl, s: sproof.clone(), f: fproof.clone() });
                    }
                }
            }
            if let Term::Lambda(x, q, s) = t {
                let mut fv = gamma2_free_vars(self.gamma.iter().chain(ext.iter()));
                fv.extend(free_vars(q));
                if !fv.contains(x) {
                    let doms: Vec<(u32, Rc<Proof>)> =
                        self.synth(ext, q, d)?.iter().filter_map(|(p, pr)| as_sort(p).map(|m| (m, pr.clone()))).collect();
                    if !doms.is_empty() {
                        let mut ext2 = ext.to_vec();
                        ext2.push(Statement2::typing(Term::Var(*x), (**q).clone()));
                        let bodies = self.synth(&ext2, s, d)?;
                        for (p, bproof) in bodies.iter() {
                            let preds = self.synth(&ext2, p, d)?;
                            for (u, pproof) in preds.iter() {
                                let Some(n) = as_sort(u) else { continue };
                                for (m, dproof) in &doms {
                                    let pi = mk_pi2(*m, n, *x, (**q).clone(), p.clone());
                                    let concl = Statement2::typing(t.clone(), pi.clone());
                                    add(
                                        &mut out,
                                        pi,
                                        Proof::Ab {
                                            concl,
                                            x: *x,
                                            q: (**q).clone(),
                                            m: *m,
                                            n,
                                            body: bproof.clone(),
                                            pred: pproof.clone(),
                                            dom: dproof.clone(),
                                        },
                                    );
                                }
                            }
                        }
                    }
                }
            }
            let reds = self.reductions.clone();
            for red in reds.iter().filter(|r| r.kind == StmtKind::Reduction && r.right == *t) {
                for (p, pr) in self.synth(ext, &red.left, d)?.iter() {
                    let concl = Statement2::typing(t.clone(), p.clone());
                    add(&mut out, p.clone(), Proof::RedSubject { concl, typ: pr.clone(), red: (*red).clone() });
                }
            }
            let own = self.synth(ext, t, d)?;
            for (r, pr) in own.iter() {
                out.entry(r.clone()).or_insert_with(|| pr.clone());
                for red in reds.iter().filter(|s| s.kind == StmtKind::SubReduction && s.left == *r) {
                    let concl = Statement2::typing(t.clone(), red.right.clone());
                    add(&mut out, red.right.clone(), Proof::RedPredicate { concl, typ: pr.clone(), red: (*red).clone() });
                }
            }
        }
        let res: Synth = Rc::new(out.into_iter().collect());
        self.memo.insert(key, res.clone());
        Ok(res)
    }
}

struct Linearizer {
    d: Derivation,
    done: BTreeMap<(usize, Statement2), usize>,
}

impl Linearizer {
    fn emit(&mut self, scope: usize, p: &Proof) -> usize {
        let concl = match p {
            Proof::Hyp(s) => s,
            Proof::App { concl, .. }
            | Proof::Ab { concl, .. }
            | Proof::RedSubject { concl, .. }
            | Proof::RedPredicate { concl, .. } => concl,
        };
        if let Some(&i) = self.done.get(&(scope, concl.clone())) {
            return i;
        }
        let i = match p {
            Proof::Hyp(s) => self.d.hyp(scope, s.clone()),
            Proof::App { concl, s, f } => {
                let a = self.emit(scope, s);
                let b = self.emit(scope, f);
                self.d.push(scope, Rule::App, vec![a, b], concl.clone(), RuleData::None)
            }
            Proof::RedSubject { concl, typ, red } => {
                let a = self.emit(scope, typ);
                let b = self.emit(0, &Proof::Hyp(red.clone()));
                self.d.push(scope, Rule::RedSubject, vec![a, b], concl.clone(), RuleData::None)
            }
            Proof::RedPredicate { concl, typ, red } => {
                let a = self.emit(scope, typ);
                let b = self.emit(0, &Proof::Hyp(red.clone()));
                self.d.push(scope, Rule::RedPredicate, vec![a, b], concl.clone(), RuleData::None)
            }
            Proof::Ab { concl, x, q, m, n, body, pred, dom } => {
                let inner = self.d.extend(scope, Statement2::typing(Term::Var(*x), q.clone()));
                let a = self.emit(inner, body);
                let b = self.emit(inner, pred);
                let c = self.emit(scope, dom);
                let data = RuleData::Ab { x: *x, q: q.clone(), m: *m, n: *n };
                self.d.push(scope, Rule::Ab, vec![a, b, c], concl.clone(), data)
            }
        };
        self.done.insert((scope, concl.clone()), i);
        i
    }
}

/// Bounded search by iterative deepening; the result passes
/// [`check_derivation`] under the extensional preset.
pub fn search_derivation(gamma: &Gamma2, goal: &Statement2, depth: usize, budget: usize) -> Result<Option<Derivation>, SearchBudget> {
    let mut d = Derivation::new();
    if gamma.contains(goal) {
        d.hyp(0, goal.clone());
        return Ok(Some(d));
    }
    if goal.kind != StmtKind::Typing {
        return Ok(None);
    }
    let mut s = Searcher::new(gamma, budget);
    for k in 0..=depth {
        let found = s.synth(&[], &goal.left, k)?;
        if let Some((_, p)) = found.iter().find(|(p, _)| *p == goal.right) {
            let mut lin = Linearizer { d, done: BTreeMap::new() };
            lin.emit(0, p);
            return Ok(Some(lin.d));
        }
    }
    Ok(None)
}

/// All predicates `P` with `Γ ⊢ (t : P)` found within `depth`.
pub fn derivable_types(gamma: &Gamma2, t: &Term, depth: usize, budget: usize) -> Result<Vec<Term>, SearchBudget> {
    let mut s = Searcher::new(gamma, budget);
    Ok(s.synth(&[], t, depth)?.iter().map(|(p, _)| p.clone()).collect())
}

// ---------------------------------------------------------------------------
// Legal contexts

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Legality {
    /// Enumeration of the variable typings, each with its sort derivation.
    Legal { order: Vec<Statement2>, witnesses: Vec<(u32, Derivation)> },
    NotShownLegal { reason: String },
}

impl Legality {
    pub fn is_legal(&self) -> bool {
        matches!(self, Legality::Legal { .. })
    }
}

/// Whether `Γ` is a context: typing subjects are atoms, each with one predicate.
pub fn is_context2(gamma: &Gamma2) -> bool {
    let mut seen: BTreeMap<&Term, &Term> = BTreeMap::new();
    for s in gamma.iter().filter(|s| s.kind == StmtKind::Typing) {
        if !s.left.is_atom() {
            return false;
        }
        if let Some(p) = seen.insert(&s.left, &s.right) {
            if p != &s.right {
                return false;
            }
        }
    }
    true
}

/// Looks for an enumeration `(x_j : P_j)` of the variable typings such that
/// `x_j` is not free in any `P_i` with `i ≥ j` and `P_j` is sort-typed from
/// `Γ` without the first `j+1` entries. Typings of constants stay as axioms.
pub fn is_legal_context(gamma: &Gamma2, depth: usize, budget: usize) -> Result<Legality, SearchBudget> {
    if !is_context2(gamma) {
        return Ok(Legality::NotShownLegal { reason: "not a context".into() });
    }
    let items: Vec<Statement2> =
        gamma.iter().filter(|s| s.kind == StmtKind::Typing && matches!(s.left, Term::Var(_))).cloned().collect();
    if items.len() > 16 {
        return Ok(Legality::NotShownLegal { reason: "too many variable typings to enumerate".into() });
    }
    let mut failed = BTreeSet::new();
    let mut order = Vec::new();
    let mut witnesses = Vec::new();
    if legal_rec(gamma, &items, 0u32, depth, budget, &mut failed, &mut order, &mut witnesses)? {
        Ok(Legality::Legal { order: order.into_iter().map(|i| items[i].clone()).collect(), witnesses })
    } else {
        Ok(Legality::NotShownLegal { reason: format!("no enumeration found at depth {}", depth) })
    }
}

#[allow(clippy::too_many_arguments)]
fn legal_rec(
    gamma: &Gamma2,
    items: &[Statement2],
    chosen: u32,
    depth: usize,
    budget: usize,
    failed: &mut BTreeSet<u32>,
    order: &mut Vec<usize>,
    witnesses: &mut Vec<(u32, Derivation)>,
) -> Result<bool, SearchBudget> {
    if chosen.count_ones() as usize == items.len() {
        return Ok(true);
    }
    if failed.contains(&chosen) {
        return Ok(false);
    }
    for j in 0..items.len() {
        if chosen & (1 << j) != 0 {
            continue;
        }
        let Term::Var(x) = items[j].left else { continue };
        let later_free = (0..items.len()).filter(|i| chosen & (1 << i) == 0).any(|i| free_vars(&items[i].right).contains(&x));
        if later_free {
            continue;
        }
        let now = chosen | (1 << j);
        let rest: Gamma2 =
            gamma.iter().filter(|s| !(0..items.len()).any(|i| now & (1 << i) != 0 && items[i] == **s)).cloned().collect();
        let mut witness = None;
        for ty in derivable_types(&rest, &items[j].right, depth, budget)? {
            if let Some(k) = as_sort(&ty) {
                let goal = Statement2::typing(items[j].right.clone(), ty);
                if let Some(d) = search_derivation(&rest, &goal, depth, budget)? {
                    witness = Some((k, d));
                    break;
                }
            }
        }
        let Some(w) = witness else { continue };
        order.push(j);
        witnesses.push(w);
        if legal_rec(gamma, items, now, depth, budget, failed, order, witnesses)? {
            return Ok(true);
        }
        order.pop();
        witnesses.pop();
    }
    failed.insert(chosen);
    Ok(false)
}

/// Sort-typing axioms `(u_k : u_{k+1})` for `k < top`; these form a context.
pub fn sort_axioms(top: u32) -> Vec<Statement2> {
    (0..top).map(|k| Statement2::typing(sort(k), sort(k + 1))).collect()
}
