//! The system-1 inference relation: typing sets, derivability, contexts and
//! a literal bounded oracle used for cross-validation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use thiserror::Error;

use crate::binding::{all_vars, canonicalize, free_vars, substitute, AlphaClass, VarSet};
use crate::semantics1::Statement1;
use crate::syntax::{as_pi, Term, VarId};

pub type Gamma1 = BTreeSet<Statement1>;
pub type TypeSet = BTreeSet<AlphaClass>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferError {
    #[error("oracle closure exceeded its budget of {0} entries")]
    Budget(usize),
}

/// `F(Γ)`: free variables of all subjects and predicates.
pub fn gamma_free_vars<'a, I: IntoIterator<Item = &'a Statement1>>(gamma: I) -> VarSet {
    let mut out = VarSet::new();
    for st in gamma {
        out.extend(st.free_vars());
    }
    out
}

fn lookup0(gamma: &Gamma1, s: &AlphaClass) -> TypeSet {
    gamma.iter().filter(|st| &st.subject == s).map(|st| st.predicate.clone()).collect()
}

/// How the λ-clause of the typing function chooses its hypothesis set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LambdaMode {
    /// Rename a clashing binder to a variable outside `F(Γ) ∪ F(Q)` and keep
    /// all of Γ. Computes the full inference relation.
    #[default]
    Renaming,
    /// Keep the term's own binder and use the largest `Δ ⊆ Γ` avoiding it.
    Literal,
    /// Keep the term's own binder and scan every subset `Δ ⊆ Γ`.
    SubsetScan,
}

/// Type inference for finite Γ.
#[derive(Debug, Clone, Copy, Default)]
pub struct Infer1 {
    pub mode: LambdaMode,
}

impl Infer1 {
    pub fn new(mode: LambdaMode) -> Infer1 {
        Infer1 { mode }
    }

    /// `⌈S⌉^Γ` as a set of α-classes.
    pub fn typing_set(&self, gamma: &Gamma1, s: &Term) -> TypeSet {
        let class = canonicalize(s);
        let mut out = lookup0(gamma, &class);
        match s {
            Term::Const(_) | Term::Var(_) | Term::Rho(_) => {}
            Term::Beta(f, a) => {
                let fs = self.typing_set(gamma, f);
                if fs.iter().any(|t| as_pi(t.term()).is_some()) {
                    let args = self.typing_set(gamma, a);
                    for t in &fs {
                        if let Some((x, p, r)) = as_pi(t.term()) {
                            if args.contains(&canonicalize(p)) {
                                out.insert(canonicalize(&substitute(r, a, x)));
                            }
                        }
                    }
                }
            }
            Term::Lambda(x, q, body) => self.lambda_clause(gamma, *x, q, body, &mut out),
        }
        out
    }

    fn lambda_clause(&self, gamma: &Gamma1, x: VarId, q: &Term, body: &Term, out: &mut TypeSet) {
        let fq = free_vars(q);
        match self.mode {
            LambdaMode::Renaming => {
                let mut avoid = gamma_free_vars(gamma);
                avoid.extend(fq.iter().copied());
                let (z, body) = if avoid.contains(&x) {
                    avoid.extend(all_vars(body));
                    avoid.insert(x);
                    let z = (0..).find(|v| !avoid.contains(v)).unwrap();
                    (z, substitute(body, &Term::Var(z), x))
                } else {
                    (x, body.clone())
                };
                let mut ext = gamma.clone();
                ext.insert(Statement1::new(&Term::Var(z), q));
                for p in self.typing_set(&ext, &body) {
                    out.insert(canonicalize(&crate::syntax::mk_pi(z, q.clone(), p.into_term())));
                }
            }
            LambdaMode::Literal => {
                if fq.contains(&x) {
                    return;
                }
                let mut delta: Gamma1 = gamma.iter().filter(|st| !st.free_vars().contains(&x)).cloned().collect();
                delta.insert(Statement1::new(&Term::Var(x), q));
                for p in self.typing_set(&delta, body) {
                    out.insert(canonicalize(&crate::syntax::mk_pi(x, q.clone(), p.into_term())));
                }
            }
            LambdaMode::SubsetScan => {
                if fq.contains(&x) {
                    return;
                }
                let items: Vec<&Statement1> = gamma.iter().collect();
                for mask in 0u64..(1u64 << items.len()) {
                    let mut delta: Gamma1 = Gamma1::new();
                    for (i, st) in items.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            delta.insert((*st).clone());
                        }
                    }
                    if gamma_free_vars(&delta).contains(&x) {
                        continue;
                    }
                    delta.insert(Statement1::new(&Term::Var(x), q));
                    for p in self.typing_set(&delta, body) {
                        out.insert(canonicalize(&crate::syntax::mk_pi(x, q.clone(), p.into_term())));
                    }
                }
            }
        }
    }

    /// `Γ ⊢ (S:P)`.
    pub fn derives(&self, gamma: &Gamma1, st: &Statement1) -> bool {
        self.typing_set(gamma, st.subject.term()).contains(&st.predicate)
    }

    /// `(Γ ⊢ X, Γ[T/x] ⊢ X[T/x])`.
    pub fn subst_inv_check(&self, gamma: &Gamma1, st: &Statement1, t: &Term, x: VarId) -> (bool, bool) {
        let before = self.derives(gamma, st);
        let after = self.derives(&subst_gamma(gamma, t, x), &subst_statement(st, t, x));
        (before, after)
    }
}

pub fn subst_statement(st: &Statement1, t: &Term, x: VarId) -> Statement1 {
    Statement1::new(&substitute(st.subject.term(), t, x), &substitute(st.predicate.term(), t, x))
}

/// `Γ[T/x]`.
pub fn subst_gamma(gamma: &Gamma1, t: &Term, x: VarId) -> Gamma1 {
    gamma.iter().map(|st| subst_statement(st, t, x)).collect()
}

/// Subjects are atoms or ρ-terms and determine their predicates up to α.
pub fn is_context(gamma: &Gamma1) -> bool {
    let mut seen: BTreeMap<&AlphaClass, &AlphaClass> = BTreeMap::new();
    for st in gamma {
        if !matches!(st.subject.term(), Term::Const(_) | Term::Var(_) | Term::Rho(_)) {
            return false;
        }
        if let Some(prev) = seen.insert(&st.subject, &st.predicate) {
            if prev != &st.predicate {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Literal oracle

/// A λ-subject with its binder variants `(y, Q, S[y/x])`.
type LambdaVariants = (Term, Vec<(VarId, Term, Term)>);

/// Forward closure of the stratified rules, applying App and Ab literally
/// over a finite universe of subjects derived from the goal.
pub struct Oracle {
    budget: usize,
    universe: BTreeSet<AlphaClass>,
    lambdas: Vec<LambdaVariants>,
    window: VarId,
    memo: BTreeMap<(Gamma1, usize), BTreeSet<Statement1>>,
    work: usize,
}

impl Oracle {
    /// Prepares an oracle for subjects reachable from `subject`.
    pub fn new(gamma: &Gamma1, subject: &Term, depth: usize, budget: usize) -> Oracle {
        let mut maxv = subject.max_var().unwrap_or(0);
        for st in gamma {
            maxv = maxv.max(st.subject.term().max_var().unwrap_or(0));
            maxv = maxv.max(st.predicate.term().max_var().unwrap_or(0));
        }
        let window = maxv + depth as VarId + 2;
        let mut o = Oracle {
            budget,
            universe: BTreeSet::new(),
            lambdas: Vec::new(),
            window,
            memo: BTreeMap::new(),
            work: 0,
        };
        o.add_universe(subject);
        o
    }

    fn add_universe(&mut self, t: &Term) {
        let class = canonicalize(t);
        if !self.universe.insert(class) {
            return;
        }
        match t {
            Term::Const(_) | Term::Var(_) => {}
            Term::Rho(a) => self.add_universe(a),
            Term::Beta(a, b) => {
                self.add_universe(a);
                self.add_universe(b);
            }
            Term::Lambda(x, q, s) => {
                self.add_universe(q);
                let fs = free_vars(s);
                let mut variants = Vec::new();
                for y in 0..=self.window {
                    if y == *x || !fs.contains(&y) {
                        let sy = substitute(s, &Term::Var(y), *x);
                        variants.push((y, (**q).clone(), sy));
                    }
                }
                for (_, _, sy) in &variants {
                    self.add_universe(sy);
                }
                self.lambdas.push((t.clone(), variants));
            }
        }
    }

    /// All statements `Γ ⊢_n X` whose subject lies in the universe.
    pub fn derivable(&mut self, gamma: &Gamma1, n: usize) -> Result<BTreeSet<Statement1>, InferError> {
        if let Some(d) = self.memo.get(&(gamma.clone(), n)) {
            return Ok(d.clone());
        }
        self.work += 1;
        if self.work > self.budget {
            return Err(InferError::Budget(self.budget));
        }
        let mut out: BTreeSet<Statement1> = gamma.clone();
        if n > 0 {
            let prev = self.derivable(gamma, n - 1)?;
            out.extend(prev.iter().cloned());
            // App_n
            for fst in &prev {
                let Some((x, p, r)) = as_pi(fst.predicate.term()) else { continue };
                let pc = canonicalize(p);
                for sst in prev.iter().filter(|s| s.predicate == pc) {
                    let app = Term::beta(fst.subject.term().clone(), sst.subject.term().clone());
                    if self.universe.contains(&canonicalize(&app)) {
                        out.insert(Statement1::new(&app, &substitute(r, sst.subject.term(), x)));
                    }
                }
            }
            // Ab_n
            let items: Vec<Statement1> = gamma.iter().cloned().collect();
            let lambdas = self.lambdas.clone();
            for (lam, variants) in &lambdas {
                for (y, q, sy) in variants {
                    if free_vars(q).contains(y) {
                        continue;
                    }
                    for mask in 0u64..(1u64 << items.len()) {
                        let mut delta = Gamma1::new();
                        for (i, st) in items.iter().enumerate() {
                            if mask & (1 << i) != 0 {
                                delta.insert(st.clone());
                            }
                        }
                        if gamma_free_vars(&delta).contains(y) {
                            continue;
                        }
                        delta.insert(Statement1::new(&Term::Var(*y), q));
                        let inner = self.derivable(&delta, n - 1)?;
                        let syc = canonicalize(sy);
                        for st in inner.iter().filter(|st| st.subject == syc) {
                            let ty = crate::syntax::mk_pi(*y, q.clone(), st.predicate.term().clone());
                            out.insert(Statement1::new(lam, &ty));
                        }
                    }
                }
            }
        }
        self.memo.insert((gamma.clone(), n), out.clone());
        Ok(out)
    }

    /// Predicates `P` with `Γ ⊢_depth (S:P)`.
    pub fn types_of(&mut self, gamma: &Gamma1, subject: &Term, depth: usize) -> Result<TypeSet, InferError> {
        let s = canonicalize(subject);
        Ok(self
            .derivable(gamma, depth)?
            .into_iter()
            .filter(|st| st.subject == s)
            .map(|st| st.predicate)
            .collect())
    }
}

/// `Γ ⊢_depth stmt` by literal forward closure.
pub fn derives_bounded_oracle(gamma: &Gamma1, st: &Statement1, depth: usize, budget: usize) -> Result<bool, InferError> {
    let mut o = Oracle::new(gamma, st.subject.term(), depth, budget);
    Ok(o.types_of(gamma, st.subject.term(), depth)?.contains(&st.predicate))
}

// ---------------------------------------------------------------------------
// Subject search

/// Result of a bounded search for a subject of a given predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    Found(Term),
    NotFound { depth: usize },
}

/// Bounded type-directed search for a term `S` with `Γ ⊢ (S:P)`.
///
/// Tries λ-introduction for π-goals and applications of hypothesis subjects
/// to inhabitants found one level down. Every candidate is confirmed with
/// [`Infer1::derives`].
pub fn search_subject(gamma: &Gamma1, goal: &Term, depth: usize) -> SearchResult {
    let inf = Infer1::default();
    let goal_c = canonicalize(goal);
    for cand in inhabitants(gamma, goal, depth, 64) {
        if inf.typing_set(gamma, &cand).contains(&goal_c) {
            return SearchResult::Found(cand);
        }
    }
    SearchResult::NotFound { depth }
}

fn inhabitants(gamma: &Gamma1, goal: &Term, depth: usize, cap: usize) -> Vec<Term> {
    let goal_c = canonicalize(goal);
    let mut out: Vec<Term> = gamma
        .iter()
        .filter(|st| st.predicate == goal_c)
        .map(|st| st.subject.term().clone())
        .collect();
    if depth == 0 {
        return out;
    }
    if let Some((x, a, b)) = as_pi(goal) {
        let mut avoid = gamma_free_vars(gamma);
        avoid.extend(all_vars(goal));
        let z = (0..).find(|v| !avoid.contains(v)).unwrap();
        let mut ext = gamma.clone();
        ext.insert(Statement1::new(&Term::Var(z), a));
        let body_goal = substitute(b, &Term::Var(z), x);
        for body in inhabitants(&ext, &body_goal, depth - 1, cap) {
            out.push(Term::lam(z, a.clone(), body));
            if out.len() >= cap {
                return out;
            }
        }
    }
    // Eliminations: heads from Γ applied to arguments found one level down.
    let inf = Infer1::default();
    for st in gamma {
        let mut frontier: Vec<(Term, AlphaClass)> = alloc::vec![(st.subject.term().clone(), st.predicate.clone())];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (head, ty) in &frontier {
                let Some((x, a, r)) = as_pi(ty.term()) else { continue };
                for arg in inhabitants(gamma, a, depth - 1, cap) {
                    let app = Term::beta(head.clone(), arg.clone());
                    let res = canonicalize(&substitute(r, &arg, x));
                    if res == goal_c && inf.typing_set(gamma, &app).contains(&goal_c) {
                        out.push(app.clone());
                        if out.len() >= cap {
                            return out;
                        }
                    }
                    next.push((app, res));
                }
            }
            if next.len() > cap {
                next.truncate(cap);
            }
            frontier = next;
        }
    }
    out.sort();
    out.dedup();
    out
}
