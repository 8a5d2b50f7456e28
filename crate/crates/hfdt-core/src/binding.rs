//! Free and bound variables, capture-avoiding substitution, and α-conversion.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::syntax::{Term, VarId};

pub type VarSet = BTreeSet<VarId>;

fn collect_free(t: &Term, bound: &mut Vec<VarId>, out: &mut VarSet) {
    match t {
        Term::Const(_) => {}
        Term::Var(v) => {
            if !bound.contains(v) {
                out.insert(*v);
            }
        }
        Term::Rho(a) => collect_free(a, bound, out),
        Term::Beta(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Term::Lambda(x, r, s) => {
            collect_free(r, bound, out);
            bound.push(*x);
            collect_free(s, bound, out);
            bound.pop();
        }
    }
}

/// `F(t)`.
pub fn free_vars(t: &Term) -> VarSet {
    let mut out = VarSet::new();
    collect_free(t, &mut Vec::new(), &mut out);
    out
}

pub fn is_free_in(x: VarId, t: &Term) -> bool {
    match t {
        Term::Const(_) => false,
        Term::Var(v) => *v == x,
        Term::Rho(a) => is_free_in(x, a),
        Term::Beta(a, b) => is_free_in(x, a) || is_free_in(x, b),
        Term::Lambda(y, r, s) => is_free_in(x, r) || (*y != x && is_free_in(x, s)),
    }
}

/// `B(t)`: variables occurring as λ-binders.
pub fn bound_vars(t: &Term) -> VarSet {
    fn go(t: &Term, out: &mut VarSet) {
        match t {
            Term::Const(_) | Term::Var(_) => {}
            Term::Rho(a) => go(a, out),
            Term::Beta(a, b) => {
                go(a, out);
                go(b, out);
            }
            Term::Lambda(x, r, s) => {
                out.insert(*x);
                go(r, out);
                go(s, out);
            }
        }
    }
    let mut out = VarSet::new();
    go(t, &mut out);
    out
}

/// `V(t) = F(t) ∪ B(t)`.
pub fn all_vars(t: &Term) -> VarSet {
    fn go(t: &Term, out: &mut VarSet) {
        match t {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::Rho(a) => go(a, out),
            Term::Beta(a, b) => {
                go(a, out);
                go(b, out);
            }
            Term::Lambda(x, r, s) => {
                out.insert(*x);
                go(r, out);
                go(s, out);
            }
        }
    }
    let mut out = VarSet::new();
    go(t, &mut out);
    out
}

fn least_outside(sets: &[&VarSet]) -> VarId {
    (0..).find(|v| sets.iter().all(|s| !s.contains(v))).unwrap()
}

/// `S[T/x]`. When a binder `y ≠ x` captures a free variable of `T` it is
/// renamed to the least variable outside `V(T) ∪ V(S)`.
pub fn substitute(s: &Term, t: &Term, x: VarId) -> Term {
    match s {
        Term::Const(_) => s.clone(),
        Term::Var(v) => {
            if *v == x {
                t.clone()
            } else {
                s.clone()
            }
        }
        Term::Rho(a) => Term::rho(substitute(a, t, x)),
        Term::Beta(a, b) => Term::beta(substitute(a, t, x), substitute(b, t, x)),
        Term::Lambda(y, r, body) => {
            let r2 = substitute(r, t, x);
            if *y == x || !is_free_in(x, body) {
                return Term::lam(*y, r2, (**body).clone());
            }
            let z = if !is_free_in(*y, t) {
                *y
            } else {
                least_outside(&[&all_vars(t), &all_vars(body)])
            };
            let renamed = if z == *y { (**body).clone() } else { substitute(body, &Term::Var(z), *y) };
            Term::lam(z, r2, substitute(&renamed, t, x))
        }
    }
}

/// Both sides of `T ≠ x ∈ F(S) ⇔ S[T/x] ≠ S`.
pub fn free_char_check(s: &Term, t: &Term, x: VarId) -> (bool, bool) {
    let lhs = *t != Term::Var(x) && is_free_in(x, s);
    let rhs = substitute(s, t, x) != *s;
    (lhs, rhs)
}

// ---------------------------------------------------------------------------
// α-conversion

/// Canonical representative of an α-class.
///
/// A binder at nesting depth `d` is renamed to the `d`-th least variable that
/// is not free in the whole term, so two terms share a representative exactly
/// when they agree up to bound names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlphaClass(Term);

impl AlphaClass {
    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }
}

fn binder_depth(t: &Term) -> usize {
    match t {
        Term::Const(_) | Term::Var(_) => 0,
        Term::Rho(a) => binder_depth(a),
        Term::Beta(a, b) => binder_depth(a).max(binder_depth(b)),
        Term::Lambda(_, r, s) => binder_depth(r).max(1 + binder_depth(s)),
    }
}

fn canon(t: &Term, fresh: &[VarId], env: &mut Vec<(VarId, VarId)>) -> Term {
    match t {
        Term::Const(_) => t.clone(),
        Term::Var(v) => match env.iter().rev().find(|(old, _)| old == v) {
            Some((_, new)) => Term::Var(*new),
            None => t.clone(),
        },
        Term::Rho(a) => Term::rho(canon(a, fresh, env)),
        Term::Beta(a, b) => Term::beta(canon(a, fresh, env), canon(b, fresh, env)),
        Term::Lambda(x, r, s) => {
            let r2 = canon(r, fresh, env);
            let name = fresh[env.len()];
            env.push((*x, name));
            let s2 = canon(s, fresh, env);
            env.pop();
            Term::lam(name, r2, s2)
        }
    }
}

pub fn canonicalize(t: &Term) -> AlphaClass {
    let depth = binder_depth(t);
    if depth == 0 {
        return AlphaClass(t.clone());
    }
    let free = free_vars(t);
    let fresh: Vec<VarId> = (0..).filter(|v| !free.contains(v)).take(depth).collect();
    AlphaClass(canon(t, &fresh, &mut Vec::new()))
}

pub fn alpha_eq(s: &Term, t: &Term) -> bool {
    s == t || canonicalize(s) == canonicalize(t)
}

/// One-step head α-variants `λyR S[y/x]` of `λxRS`, with `x ∉ B(S)`,
/// `y ∉ V(S)` and `y` drawn from `min V(S) ..= max V(S) + 3`.
pub fn head_alpha(t: &Term) -> Vec<Term> {
    let Term::Lambda(_, _, s) = t else { return Vec::new() };
    let vs = all_vars(s);
    let lo = vs.first().copied().unwrap_or(0);
    let hi = vs.last().copied().unwrap_or(0) + 3;
    head_alpha_window(t, lo, hi)
}

/// [`head_alpha`] with an explicit candidate window `lo..=hi`.
pub fn head_alpha_window(t: &Term, lo: VarId, hi: VarId) -> Vec<Term> {
    let Term::Lambda(x, r, s) = t else { return Vec::new() };
    if bound_vars(s).contains(x) {
        return Vec::new();
    }
    let vs = all_vars(s);
    (lo..=hi)
        .filter(|y| !vs.contains(y))
        .map(|y| Term::lam(y, (**r).clone(), substitute(s, &Term::Var(y), *x)))
        .collect()
}

/// Decides whether `b` is a one-step head α-variant of `a`, with no window.
pub fn is_head_alpha_step(a: &Term, b: &Term) -> bool {
    let (Term::Lambda(x, r, s), Term::Lambda(y, r2, s2)) = (a, b) else { return false };
    r == r2
        && !bound_vars(s).contains(x)
        && !all_vars(s).contains(y)
        && substitute(s, &Term::Var(*y), *x) == **s2
}

/// All terms obtained by rewriting exactly one subterm occurrence of `t`
/// (including `t` itself) with one of the results of `step`.
pub fn rewrite_once(t: &Term, step: &mut dyn FnMut(&Term) -> Vec<Term>) -> Vec<Term> {
    let mut out = step(t);
    match t {
        Term::Const(_) | Term::Var(_) => {}
        Term::Rho(a) => out.extend(rewrite_once(a, step).into_iter().map(Term::rho)),
        Term::Beta(a, b) => {
            for a2 in rewrite_once(a, step) {
                out.push(Term::beta(a2, (**b).clone()));
            }
            for b2 in rewrite_once(b, step) {
                out.push(Term::beta((**a).clone(), b2));
            }
        }
        Term::Lambda(x, r, s) => {
            for r2 in rewrite_once(r, step) {
                out.push(Term::lam(*x, r2, (**s).clone()));
            }
            for s2 in rewrite_once(s, step) {
                out.push(Term::lam(*x, (**r).clone(), s2));
            }
        }
    }
    out
}
