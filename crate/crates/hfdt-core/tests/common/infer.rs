use std::collections::BTreeSet;

use hfdt_core::binding::{all_vars, canonicalize};
use hfdt_core::hfset::HfSet;
use hfdt_core::infer1::{is_context, Gamma1, Infer1, Oracle};
use hfdt_core::semantics1::{Atom, Evaluator, Statement1, Verdict};
use hfdt_core::syntax::{mk_arrow, mk_pi, Term};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use super::logic::Tally;
use super::terms::{enumerate_flat, random_term, Alphabet};

fn st(s: &Term, p: &Term) -> Statement1 {
    Statement1::new(s, p)
}

/// Subjects `c0, c1, v0`, binders `v0, v1`.
pub fn small_alphabet() -> Alphabet {
    Alphabet { consts: vec![Term::Const(0), Term::Const(1)], vars: vec![0], binders: vec![0, 1], rho: true }
}

/// Hypotheses for the exhaustive suites: each subject atom paired with each
/// of a fixed list of predicates, including arrows and a dependent π.
pub fn hypothesis_menu() -> Vec<Statement1> {
    let (c0, c1, v0) = (Term::Const(0), Term::Const(1), Term::Var(0));
    let preds = [
        c0.clone(),
        c1.clone(),
        v0.clone(),
        mk_arrow(c0.clone(), c1.clone()),
        mk_arrow(c1.clone(), c1.clone()),
        mk_pi(1, c0.clone(), Term::Var(1)),
    ];
    [c0, c1, v0].iter().cartesian_product(preds.iter()).map(|(s, p)| st(s, p)).collect()
}

/// Every `Γ` of at most `k` statements from `menu`.
pub fn small_gammas(menu: &[Statement1], k: usize) -> Vec<Gamma1> {
    (0..=k).flat_map(|n| menu.iter().cloned().combinations(n).map(|c| c.into_iter().collect())).collect()
}

/// Compares `typingSet` with the bounded oracle's type set.
pub fn compare_with_oracle(gamma: &Gamma1, s: &Term, depth: usize, tally: &mut Tally) {
    let inf = Infer1::default();
    let fast = inf.typing_set(gamma, s);
    let mut o = Oracle::new(gamma, s, depth, 1_000_000);
    match o.types_of(gamma, s, depth) {
        Ok(slow) => {
            tally.checked += 1;
            if fast != slow {
                tally.failures.push(format!("Γ={:?} S={:?}: typingSet {:?} vs oracle {:?}", gamma, s, fast, slow));
            }
        }
        Err(_) => tally.skipped += 1,
    }
}

/// Exhaustive agreement over `Γ` of at most two menu statements and all
/// subjects of at most `max` symbols.
pub fn oracle_agreement_exhaustive(max: usize, depth: usize) -> Tally {
    let mut tally = Tally::default();
    let subjects = enumerate_flat(&small_alphabet(), max);
    for g in small_gammas(&hypothesis_menu(), 2) {
        for s in &subjects {
            compare_with_oracle(&g, s, depth, &mut tally);
        }
    }
    tally
}

/// A random Γ of up to `k` statements with atomic subjects.
pub fn random_gamma<R: Rng>(rng: &mut R, alpha: &Alphabet, k: usize, pred_size: usize) -> Gamma1 {
    let atoms: Vec<Term> = alpha.consts.iter().cloned().chain(alpha.vars.iter().map(|&v| Term::Var(v))).collect();
    let n = rng.gen_range(0..=k);
    (0..n)
        .map(|_| {
            let s = atoms.choose(rng).unwrap().clone();
            let p = match rng.gen_range(0..3) {
                0 => random_term(rng, alpha, pred_size),
                1 => mk_arrow(random_term(rng, alpha, 2), random_term(rng, alpha, 2)),
                _ => {
                    let x = *alpha.binders.choose(rng).unwrap();
                    mk_pi(x, random_term(rng, alpha, 2), random_term(rng, alpha, 3))
                }
            };
            st(&s, &p)
        })
        .collect()
}

pub fn oracle_agreement_random<R: Rng>(rng: &mut R, cases: usize, depth: usize) -> Tally {
    let alpha = Alphabet { consts: vec![Term::Const(0), Term::Const(1), Term::Const(2)], vars: vec![0, 1], binders: vec![0, 1], rho: true };
    let mut tally = Tally::default();
    let mut nonempty = 0;
    while tally.checked < cases {
        let g = random_gamma(rng, &alpha, 3, 5);
        let s = random_term(rng, &alpha, 7);
        // Keep the suite from drowning in untypable subjects.
        let typable = !Infer1::default().typing_set(&g, &s).is_empty();
        if !typable && nonempty * 2 < tally.checked {
            continue;
        }
        nonempty += typable as usize;
        compare_with_oracle(&g, &s, depth, &mut tally);
    }
    tally
}

/// A random context: distinct atomic subjects with one predicate each.
pub fn random_context<R: Rng>(rng: &mut R, alpha: &Alphabet) -> Gamma1 {
    loop {
        let g = random_gamma(rng, alpha, 4, 5);
        let mut seen = BTreeSet::new();
        let g: Gamma1 = g.into_iter().filter(|s| seen.insert(s.subject.clone())).collect();
        if is_context(&g) {
            return g;
        }
    }
}

/// Counts `(Γ, S)` pairs with more than one type.
pub fn unique_typing<R: Rng>(rng: &mut R, contexts: usize, subjects: usize) -> Tally {
    let alpha = Alphabet::one(3, 2);
    let inf = Infer1::default();
    let mut tally = Tally::default();
    for _ in 0..contexts {
        let g = random_context(rng, &alpha);
        let heads: Vec<Term> = g.iter().map(|s| s.subject.term().clone()).collect();
        for i in 0..subjects {
            // Half the subjects are applications of hypothesis subjects.
            let s = if i % 2 == 0 || heads.is_empty() {
                random_term(rng, &alpha, 8)
            } else {
                let f = heads.choose(rng).unwrap().clone();
                Term::beta(f, random_term(rng, &alpha, 4))
            };
            let ts = inf.typing_set(&g, &s);
            tally.checked += 1;
            if ts.len() > 1 {
                tally.failures.push(format!("Γ={:?} S={:?} has {} types", g, s, ts.len()));
            }
        }
    }
    tally
}

/// A random derivable `Γ ⊢ (S:P)` with `|Γ| ≤ 3`, `|S| ≤ 8` and at most
/// `max_atoms` distinct atoms overall.
pub fn random_derivable<R: Rng>(rng: &mut R, max_atoms: usize) -> (Gamma1, Statement1) {
    let alpha = Alphabet { consts: vec![Term::Const(0), Term::Const(1), Term::Const(2)], vars: vec![0, 1], binders: vec![0, 1, 2], rho: true };
    let inf = Infer1::default();
    loop {
        let g = random_gamma(rng, &alpha, 3, 4);
        let heads: Vec<Term> = g.iter().map(|s| s.subject.term().clone()).collect();
        let s = match (rng.gen_range(0..3), heads.choose(rng)) {
            (0, Some(f)) => Term::beta(f.clone(), random_term(rng, &alpha, 4)),
            (1, _) => {
                let x = *alpha.binders.choose(rng).unwrap();
                Term::lam(x, random_term(rng, &alpha, 2), random_term(rng, &alpha, 4))
            }
            _ => random_term(rng, &alpha, 8),
        };
        if s.size() > 8 {
            continue;
        }
        let types: Vec<_> = inf.typing_set(&g, &s).into_iter().collect();
        let Some(p) = types.choose(rng) else { continue };
        let concl = Statement1::new(&s, p.term());
        let atoms = statement_atoms(g.iter().chain([&concl]));
        if atoms.len() <= max_atoms {
            return (g, concl);
        }
    }
}

pub fn statement_atoms<'a>(stmts: impl IntoIterator<Item = &'a Statement1>) -> Vec<Atom> {
    let mut out = BTreeSet::new();
    for s in stmts {
        out.extend(s.atoms());
    }
    out.into_iter().collect()
}

/// `Γ ⊢ X ⇒ Γ ⊨ X` relative to `pool` on random derivable instances.
/// Also returns how many instances had at least one pool model of `Γ`.
pub fn soundness<R: Rng>(rng: &mut R, cases: usize, pool: &[HfSet], max_atoms: usize) -> (Tally, usize) {
    let ev = Evaluator::with_guard(200_000);
    let mut tally = Tally::default();
    let mut inhabited = 0;
    while tally.checked < cases {
        let (g, concl) = random_derivable(rng, max_atoms);
        let gv: Vec<Statement1> = g.iter().cloned().collect();
        let atoms = statement_atoms(gv.iter().chain([&concl]));
        match ev.check_consequence(pool, &atoms, &gv, &concl) {
            Ok(Verdict::Holds { models }) => {
                tally.checked += 1;
                inhabited += (models > 0) as usize;
            }
            Ok(Verdict::Counterexample(m)) => {
                tally.checked += 1;
                inhabited += 1;
                tally.failures.push(format!("Γ={:?} ⊢ {:?} but {:?} is a counterexample", g, concl, m));
            }
            Err(_) => tally.skipped += 1,
        }
    }
    (tally, inhabited)
}

/// `λx R λy (R→S) (y x) : R → (R→S) → S`, with `x, y` outside `R, S`.
pub fn tautology_instance(r: &Term, s: &Term) -> Statement1 {
    let mut used = all_vars(r);
    used.extend(all_vars(s));
    let mut fresh = (0..).filter(|v| !used.contains(v));
    let (x, y) = (fresh.next().unwrap(), fresh.next().unwrap());
    let rs = mk_arrow(r.clone(), s.clone());
    let subj = Term::lam(x, r.clone(), Term::lam(y, rs.clone(), Term::beta(Term::Var(y), Term::Var(x))));
    Statement1::new(&subj, &mk_arrow(r.clone(), mk_arrow(rs, s.clone())))
}

pub fn alpha_class(t: &Term) -> hfdt_core::binding::AlphaClass {
    canonicalize(t)
}
