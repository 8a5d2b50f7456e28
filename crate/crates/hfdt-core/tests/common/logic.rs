use hfdt_core::binding::substitute;
use hfdt_core::hfset::{enumerate_pool, HfSet};
use hfdt_core::semantics1::{atoms_of, Assignment, Atom, Evaluator};
use hfdt_core::syntax::{Logic1, Term};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use super::terms::{enumerate_flat, random_term, Alphabet};

fn star_value() -> HfSet {
    HfSet::nat(2)
}

/// Constants `c1, c2` and variable `v0`; `c0` is reserved for `*`.
fn prop_alphabet() -> Alphabet {
    Alphabet { consts: vec![Term::Const(1), Term::Const(2)], vars: vec![0], binders: vec![0, 1], rho: true }
}

/// Outcome of an exhaustive or randomized law check.
#[derive(Debug, Default)]
pub struct Tally {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl Tally {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The ⊥, negation, truncation, ∧ and ∀ identities with `⟦*⟧ = {∅,{∅}}`,
/// over every assignment of `c1, c2, v0` into the rank-2 pool and every
/// term of up to `max` symbols.
pub fn truth_tables(max: usize) -> Tally {
    let l = Logic1::new(Term::Const(0));
    let ev = Evaluator::default();
    let pool = enumerate_pool(2).unwrap();
    let terms = enumerate_flat(&prop_alphabet(), max);
    let (empty, unit) = (HfSet::empty(), HfSet::nat(1));
    let tv = |b: bool| if b { unit.clone() } else { empty.clone() };
    let mut tally = Tally::default();
    let atoms = [Atom::Const(1), Atom::Const(2), Atom::Var(0)];
    for vals in (0..atoms.len()).map(|_| pool.iter()).multi_cartesian_product() {
        let mut a = Assignment::from_pairs(atoms.iter().copied().zip(vals.into_iter().cloned()));
        a.set(Atom::Const(0), star_value());
        let mut check = |what: &str, ok: bool, t: &Term| {
            tally.checked += 1;
            if !ok {
                tally.failures.push(format!("{} fails for {:?} under {:?}", what, t, a));
            }
        };
        check("bot", ev.eval(&a, &l.bot()).unwrap().is_empty(), &l.bot());
        check("top", ev.eval(&a, &l.top()).unwrap() == unit, &l.top());
        let vals: Vec<HfSet> = terms.iter().map(|t| ev.eval(&a, t).unwrap()).collect();
        for (s, v) in terms.iter().zip(&vals) {
            let neg = ev.eval(&a, &l.neg(s.clone())).unwrap();
            check("negation", neg == tv(v.is_empty()), s);
            let trunc = ev.eval(&a, &l.neg(l.neg(s.clone()))).unwrap();
            check("truncation", trunc == tv(!v.is_empty()), s);
        }
        for ((r, rv), (s, sv)) in terms.iter().zip(&vals).cartesian_product(terms.iter().zip(&vals)).filter(|((r, _), (s, _))| r.size() + s.size() <= max + 1) {
            let and = ev.eval(&a, &l.and(r.clone(), s.clone())).unwrap();
            check("and", !and.is_empty() == (!rv.is_empty() && !sv.is_empty()), &l.and(r.clone(), s.clone()));
            let x = 1;
            let all = l.forall(x, r.clone(), s.clone());
            let lhs = ev.eval(&a, &all).unwrap();
            let rhs = rv.iter().all(|e| !ev.eval_override(&a, &[(e.clone(), x)], s).unwrap().is_empty());
            check("forall", !lhs.is_empty() == rhs && (lhs == empty || lhs == unit), &all);
        }
    }
    tally
}

/// `eval(S[T/x]) = eval` with `x` overridden by `eval(T)`, on random
/// triples and assignments over the rank-2 pool.
pub fn substitutivity<R: Rng>(rng: &mut R, cases: usize, max: usize) -> Tally {
    let alpha = Alphabet::one(3, 3);
    let ev = Evaluator::with_guard(100_000);
    let pool = enumerate_pool(2).unwrap();
    let mut tally = Tally::default();
    while tally.checked < cases {
        let s = random_term(rng, &alpha, max);
        let t = random_term(rng, &alpha, max / 2);
        let x = rng.gen_range(0..3);
        let mut a = Assignment::new();
        for at in atoms_of(&s).into_iter().chain(atoms_of(&t)) {
            a.set(at, pool.choose(rng).unwrap().clone());
        }
        let lhs = ev.eval(&a, &substitute(&s, &t, x));
        let rhs = ev.eval(&a, &t).and_then(|tv| ev.eval_override(&a, &[(tv, x)], &s));
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                tally.checked += 1;
                if l != r {
                    tally.failures.push(format!("S={:?} T={:?} x={}", s, t, x));
                }
            }
            _ => tally.skipped += 1,
        }
    }
    tally
}
