use std::collections::BTreeSet;
use std::sync::Arc;

use hfdt_core::binding::free_vars;
use hfdt_core::hfset::{enumerate_pool, graph, HfSet};
use hfdt_core::semantics1::Atom;
use hfdt_core::syntax::{op, sort, user_const, Const2, Term};
use hfdt_core::system2::{CarrierSpec, Interp2, Statement2, UniverseSpec, Universes, Value};
use rand::seq::SliceRandom;
use rand::Rng;

use super::terms::Alphabet;

/// System-2 alphabet: user constants `c0..c3`, `u0`, `p[0,0]`, variables
/// `v0..v2`.
pub fn alphabet2() -> Alphabet {
    let mut consts: Vec<Term> = (0..4).map(user_const).collect();
    consts.push(sort(0));
    consts.push(op(0, 0));
    Alphabet { consts, vars: vec![0, 1, 2], binders: vec![0, 1, 2], rho: false }
}

pub fn var_pool() -> Vec<HfSet> {
    enumerate_pool(2).unwrap()
}

fn nat(n: usize) -> HfSet {
    HfSet::nat(n)
}

/// Values an atom may take in enumerated models: the rank-3 pool plus every
/// function from `{0}` or `{0,1}` into `{0,1}`.
pub fn candidates() -> Vec<HfSet> {
    let mut out: BTreeSet<HfSet> = enumerate_pool(3).unwrap().into_iter().collect();
    for dom in [1usize, 2] {
        let args: Vec<HfSet> = (0..dom).map(nat).collect();
        for bits in 0..(1u32 << dom) {
            out.insert(graph(args.iter().enumerate().map(|(i, a)| (a.clone(), nat((bits >> i) as usize & 1)))));
        }
    }
    out.into_iter().collect()
}

/// Universe shapes used for enumerated models.
pub fn universe_variants() -> Vec<Arc<Universes>> {
    let lifted = |u0: Vec<HfSet>| {
        let spec = UniverseSpec {
            carriers: vec![
                CarrierSpec::Sets { members: u0, lower_as_elements: vec![] },
                CarrierSpec::Sets { members: vec![], lower_as_elements: vec![0] },
                CarrierSpec::Open,
            ],
            ..UniverseSpec::default()
        };
        Arc::new(Universes::build(&spec).unwrap())
    };
    vec![lifted(vec![]), lifted(vec![nat(2), HfSet::singleton(nat(1))])]
}

fn random_u0<R: Rng>(rng: &mut R) -> Vec<HfSet> {
    let mut extra: Vec<HfSet> = enumerate_pool(3).unwrap();
    extra.shuffle(rng);
    extra.truncate(rng.gen_range(0..=3));
    extra
}

fn random_value<R: Rng>(rng: &mut R, u0: &HfSet) -> HfSet {
    match rng.gen_range(0..4) {
        0 | 1 => u0.elements().choose(rng).unwrap().clone(),
        2 => enumerate_pool(3).unwrap().choose(rng).unwrap().clone(),
        _ => {
            let dom = u0.elements().choose(rng).unwrap().clone();
            graph(dom.iter().map(|a| (a.clone(), u0.elements().choose(rng).unwrap().clone())))
        }
    }
}

/// A randomized interpretation: finite `U_0`, finite or open `U_1`, open
/// above, and random values for `c0..c3`.
pub fn random_interp<R: Rng>(rng: &mut R) -> Interp2 {
    let u1 = if rng.gen_bool(0.5) {
        CarrierSpec::Sets { members: vec![], lower_as_elements: vec![0] }
    } else {
        CarrierSpec::Open
    };
    let spec = UniverseSpec {
        carriers: vec![CarrierSpec::Sets { members: random_u0(rng), lower_as_elements: vec![] }, u1],
        ..UniverseSpec::default()
    };
    let uni = Arc::new(Universes::build(&spec).unwrap());
    let Value::Set(u0) = uni.value(0) else { unreachable!() };
    let mut ip = Interp2::new(uni);
    for k in 0..4 {
        ip.set(Atom::Const(Const2::User(k).code()), Value::Set(random_value(rng, &u0)));
    }
    ip.guard = 100_000;
    ip
}

pub fn fleet<R: Rng>(rng: &mut R, n: usize) -> Vec<Interp2> {
    (0..n).map(|_| random_interp(rng)).collect()
}

/// Atoms a hypothesis set and conclusion depend on: user constants anywhere,
/// free variables of typing statements.
pub fn statement_atoms(stmts: &[&Statement2]) -> Vec<Atom> {
    let mut out = BTreeSet::new();
    for st in stmts {
        for t in [&st.left, &st.right] {
            collect_user(t, &mut out);
            if st.kind == hfdt_core::syntax::sugar::StmtKind::Typing {
                out.extend(free_vars(t).into_iter().map(Atom::Var));
            }
        }
    }
    out.into_iter().collect()
}

fn collect_user(t: &Term, out: &mut BTreeSet<Atom>) {
    match t {
        Term::Const(c) => {
            if matches!(Const2::decode(*c), Const2::User(_)) {
                out.insert(Atom::Const(*c));
            }
        }
        Term::Var(_) => {}
        Term::Rho(a) => collect_user(a, out),
        Term::Beta(a, b) => {
            collect_user(a, out);
            collect_user(b, out);
        }
        Term::Lambda(_, r, s) => {
            collect_user(r, out);
            collect_user(s, out);
        }
    }
}

/// Interpretations over [`universe_variants`] and [`candidates`] that
/// satisfy `gamma`, found by depth-first assignment of the atoms with each
/// hypothesis checked as soon as its atoms are set. At most `cap` models
/// per universe shape.
pub fn models_of(gamma: &[Statement2], extra: &[&Statement2], cap: usize) -> Vec<Interp2> {
    let all: Vec<&Statement2> = gamma.iter().chain(extra.iter().copied()).collect();
    let atoms = statement_atoms(&all);
    // Hypotheses grouped by the position of their last atom.
    let mut due: Vec<Vec<&Statement2>> = vec![Vec::new(); atoms.len() + 1];
    for st in gamma {
        let own = statement_atoms(&[st]);
        let last = own.iter().map(|a| atoms.iter().position(|b| b == a).unwrap() + 1).max().unwrap_or(0);
        due[last].push(st);
    }
    let cands = candidates();
    let pool = var_pool();
    let mut out = Vec::new();
    for uni in universe_variants() {
        let mut ip = Interp2::new(uni);
        ip.guard = 100_000;
        if !due[0].iter().all(|st| ip.satisfies(st, &pool).unwrap_or(false)) {
            continue;
        }
        let mut found = Vec::new();
        assign(&mut ip, &atoms, &due, &cands, &pool, 0, cap, &mut found);
        out.extend(found);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn assign(
    ip: &mut Interp2,
    atoms: &[Atom],
    due: &[Vec<&Statement2>],
    cands: &[HfSet],
    pool: &[HfSet],
    i: usize,
    cap: usize,
    found: &mut Vec<Interp2>,
) {
    if found.len() >= cap {
        return;
    }
    if i == atoms.len() {
        found.push(ip.clone());
        return;
    }
    for c in cands {
        ip.set(atoms[i], Value::Set(c.clone()));
        if due[i + 1].iter().all(|st| ip.satisfies(st, pool).unwrap_or(false)) {
            assign(ip, atoms, due, cands, pool, i + 1, cap, found);
        }
    }
}

use hfdt_core::binding::{is_free_in, substitute};
use itertools::Itertools;
use hfdt_core::system2::{contextual_closure, reflexive_closure, transitive_closure, Error2, DEFAULT_CLOSURE_BUDGET};
use hfdt_core::syntax::sugar::StmtKind;

use super::logic::Tally;
use super::terms::random_term;

fn record(tally: &mut Tally, what: &str, res: Result<bool, Error2>, ip: &Interp2) {
    match res {
        Ok(true) => tally.checked += 1,
        Ok(false) => {
            tally.checked += 1;
            tally.failures.push(format!("{} under {:?}", what, ip));
        }
        Err(_) => tally.skipped += 1,
    }
}

/// `λxRS ⊳ λyR S[y/x]` with `y ∉ F(S)`, over the fleet.
pub fn head_alpha_fleet<R: Rng>(rng: &mut R, fleet: &[Interp2], per_model: usize) -> Tally {
    let alpha = alphabet2();
    let pool = var_pool();
    let mut tally = Tally::default();
    for ip in fleet {
        for _ in 0..per_model {
            let (r, s) = (random_term(rng, &alpha, 3), random_term(rng, &alpha, 5));
            let x = *alpha.binders.choose(rng).unwrap();
            let Some(y) = (0..5).filter(|y| !is_free_in(*y, &s)).collect::<Vec<_>>().choose(rng).copied() else { continue };
            let st = Statement2::reduction(Term::lam(x, r.clone(), s.clone()), Term::lam(y, r, substitute(&s, &Term::Var(y), x)));
            record(&mut tally, &format!("{}", st), ip.satisfies(&st, &pool), ip);
        }
    }
    tally
}

/// `(λxRS)T ⊳ S[T/x]`, and equal values whenever the redex is well-formed.
/// Returns the tally and how many redexes were well-formed.
pub fn head_beta_fleet<R: Rng>(rng: &mut R, fleet: &[Interp2], per_model: usize) -> (Tally, usize) {
    let alpha = alphabet2();
    let pool = var_pool();
    let mut tally = Tally::default();
    let mut wf = 0;
    for ip in fleet {
        for _ in 0..per_model {
            let x = *alpha.binders.choose(rng).unwrap();
            let (r, s, t) = (random_term(rng, &alpha, 3), random_term(rng, &alpha, 4), random_term(rng, &alpha, 3));
            let redex = Term::beta(Term::lam(x, r, s.clone()), t.clone());
            let contractum = substitute(&s, &t, x);
            let st = Statement2::reduction(redex.clone(), contractum.clone());
            record(&mut tally, &format!("{}", st), ip.satisfies(&st, &pool), ip);
            if let Ok(lv) = ip.eval(&redex) {
                wf += 1;
                let same = ip.eval(&contractum).and_then(|cv| ip.val_eq(&lv, &cv));
                record(&mut tally, &format!("value of {}", st), same, ip);
            }
        }
    }
    (tally, wf)
}

/// Outcome of the η sub-reduction check over a fleet.
#[derive(Debug, Default)]
pub struct EtaTally {
    pub tally: Tally,
    /// Cases where the two sides were not equal.
    pub strict: usize,
    /// Failures whose every failing valuation has `⟦R⟧ = ∅`: the abstraction
    /// is then vacuously well-formed while `F` need not be.
    pub empty_domain: Vec<String>,
}

/// Whether every valuation refuting `λxR(Fx) ⊵ F` makes `⟦R⟧` empty.
fn only_empty_domain(ip: &Interp2, r: &Term, f: &Term, x: u32, pool: &[HfSet]) -> bool {
    let lam = Term::lam(x, r.clone(), Term::beta(f.clone(), Term::Var(x)));
    let mut vars = free_vars(&lam);
    vars.extend(free_vars(f));
    let vars: Vec<u32> = vars.into_iter().collect();
    let choices: Vec<Vec<&HfSet>> = if vars.is_empty() {
        vec![vec![]]
    } else {
        (0..vars.len()).map(|_| pool.iter()).multi_cartesian_product().collect()
    };
    choices.into_iter().all(|choice| {
        let env: Vec<(u32, HfSet)> = vars.iter().copied().zip(choice.into_iter().cloned()).collect();
        let Ok(lv) = ip.eval_in(&mut env.clone(), &lam) else { return true };
        let holds = ip.eval_in(&mut env.clone(), f).map(|fv| ip.subset(&lv, &fv).unwrap_or(false)).unwrap_or(false);
        holds || ip.eval_in(&mut env.clone(), r).and_then(|rv| ip.is_empty(&rv)).unwrap_or(false)
    })
}

/// `λxR(Fx) ⊵ F` with `x ∉ F(F)`. Failures confined to an empty domain are
/// set aside in [`EtaTally::empty_domain`].
pub fn eta_fleet<R: Rng>(rng: &mut R, fleet: &[Interp2], per_model: usize) -> EtaTally {
    let alpha = alphabet2();
    let pool = var_pool();
    let mut out = EtaTally::default();
    for ip in fleet {
        for _ in 0..per_model {
            let f = random_term(rng, &alpha, 3);
            let r = random_term(rng, &alpha, 2);
            let Some(x) = (0..3).find(|x| !is_free_in(*x, &f)) else { continue };
            match ip.eta_check(&r, &f, x, &pool) {
                Ok(o) => {
                    out.tally.checked += 1;
                    if !o.subset {
                        let msg = format!("R={:?} F={:?} x=v{} under {:?}", r, f, x, ip);
                        if only_empty_domain(ip, &r, &f, x, &pool) {
                            out.empty_domain.push(msg);
                        } else {
                            out.tally.failures.push(msg);
                        }
                    }
                    out.strict += !o.equal as usize;
                }
                Err(_) => out.tally.skipped += 1,
            }
        }
    }
    out
}

/// Closed terms over the alphabet without variables.
fn closed_terms<R: Rng>(rng: &mut R, n: usize) -> Vec<Term> {
    let mut alpha = alphabet2();
    alpha.vars.clear();
    let mut out: Vec<Term> = alpha.consts.clone();
    while out.len() < n {
        let t = random_term(rng, &alpha, 4);
        if hfdt_core::binding::free_vars(&t).is_empty() {
            out.push(t);
        }
    }
    out
}

/// A model of `Γ ⊆ ⊳` statements models the contextual, reflexive and
/// transitive closure; a model of `Γ ⊆ ⊵` models the reflexive-transitive
/// closure.
pub fn closure_fleet<R: Rng>(rng: &mut R, fleet: &[Interp2]) -> Tally {
    let pool = var_pool();
    let mut tally = Tally::default();
    let fillers = [user_const(0), user_const(3), sort(0)];
    for ip in fleet {
        let terms = closed_terms(rng, 12);
        let vals: Vec<Option<Value>> = terms.iter().map(|t| ip.eval(t).ok()).collect();
        let mut eqs = Vec::new();
        let mut subs = Vec::new();
        for i in 0..terms.len() {
            for j in 0..terms.len() {
                let (Some(a), Some(b)) = (&vals[i], &vals[j]) else { continue };
                if i != j && ip.val_eq(a, b).unwrap_or(false) {
                    eqs.push(Statement2::reduction(terms[i].clone(), terms[j].clone()));
                }
                if i != j && ip.subset(a, b).unwrap_or(false) {
                    subs.push(Statement2::subreduction(terms[i].clone(), terms[j].clone()));
                }
            }
        }
        eqs.truncate(4);
        subs.truncate(6);
        let ctr = contextual_closure(&eqs, &fillers, &[0], 1);
        let ctr = reflexive_closure(&ctr, StmtKind::Reduction, &terms[..3]);
        let ctr = transitive_closure(&ctr, DEFAULT_CLOSURE_BUDGET).unwrap();
        let rt = reflexive_closure(&subs, StmtKind::SubReduction, &terms);
        let rt = transitive_closure(&rt, DEFAULT_CLOSURE_BUDGET).unwrap();
        for st in ctr.iter().chain(&rt) {
            record(&mut tally, &format!("{}", st), ip.satisfies(st, &pool), ip);
        }
    }
    tally
}

/// The contextual closure of a satisfied `⊵` hypothesis need not be
/// satisfied: with `c1 = {∅} ⊆ {∅,{∅}} = c2` and `c3` mapping them to
/// `{{∅}}` and `{∅}`, `c3 c1 ⊵ c3 c2` fails. Returns whether the model
/// satisfies the hypothesis, its reflexive-transitive closure, and whether
/// some contextual instance fails.
pub fn contextual_subreduction_regression() -> (bool, bool, bool) {
    let uni = universe_variants().remove(0);
    let mut ip = Interp2::new(uni);
    let (c1, c2, c3) = (user_const(1), user_const(2), user_const(3));
    ip.set(Atom::Const(Const2::User(1).code()), Value::Set(nat(1)));
    ip.set(Atom::Const(Const2::User(2).code()), Value::Set(nat(2)));
    let f = graph([(nat(1), HfSet::singleton(nat(1))), (nat(2), nat(1))]);
    ip.set(Atom::Const(Const2::User(3).code()), Value::Set(f));
    let pool = var_pool();
    let gamma = [Statement2::subreduction(c1.clone(), c2.clone())];
    let holds = ip.satisfies(&gamma[0], &pool).unwrap();
    let rt = transitive_closure(&reflexive_closure(&gamma, StmtKind::SubReduction, &[c1, c2]), DEFAULT_CLOSURE_BUDGET).unwrap();
    let rt_ok = rt.iter().all(|st| ip.satisfies(st, &pool).unwrap());
    let ctx = contextual_closure(&gamma, &[c3], &[], 1);
    let breaks = ctx.iter().any(|st| !ip.satisfies(st, &pool).unwrap());
    (holds, rt_ok, breaks)
}

/// `wf(T) ∧ wf(S)⟨⟦T⟧,x⟩ ⇒ wf(S[T/x])`, and the converse when `x ∈ F(S)`.
pub fn wf_sub_fleet<R: Rng>(rng: &mut R, fleet: &[Interp2], per_model: usize) -> Tally {
    let alpha = alphabet2();
    let mut tally = Tally::default();
    for ip in fleet {
        for _ in 0..per_model {
            let (s, t) = (random_term(rng, &alpha, 5), random_term(rng, &alpha, 3));
            let x = *alpha.vars.choose(rng).unwrap();
            let Ok(tv) = ip.eval(&t) else { continue };
            let Ok(tset) = ip.materialize(&tv) else {
                tally.skipped += 1;
                continue;
            };
            let before = ip.wf_in(&mut vec![(x, tset)], &s);
            let after = ip.wf(&substitute(&s, &t, x));
            let (Ok(before), Ok(after)) = (before, after) else {
                tally.skipped += 1;
                continue;
            };
            tally.checked += 1;
            let ok = if is_free_in(x, &s) { before == after } else { !before || after };
            if !ok {
                tally.failures.push(format!("S={:?} T={:?} x={} before={} after={}", s, t, x, before, after));
            }
        }
    }
    tally
}

/// `(S:R),(R ⊵ P) ⊨ (S:P)` and `(R:P),(R ⊳ S) ⊨ (S:P)` with the premises
/// found by search among closed terms.
pub fn reduction_bridges<R: Rng>(rng: &mut R, fleet: &[Interp2]) -> Tally {
    let pool = var_pool();
    let mut tally = Tally::default();
    for ip in fleet {
        let terms = closed_terms(rng, 10);
        for (a, b, c) in itertools::iproduct!(&terms, &terms, &terms) {
            let sat = |st: &Statement2| ip.satisfies(st, &pool).unwrap_or(false);
            if sat(&Statement2::typing(a.clone(), b.clone())) && sat(&Statement2::subreduction(b.clone(), c.clone())) {
                let st = Statement2::typing(a.clone(), c.clone());
                record(&mut tally, &format!("predicate reduction to {}", st), ip.satisfies(&st, &pool), ip);
            }
            if sat(&Statement2::typing(a.clone(), c.clone())) && sat(&Statement2::reduction(a.clone(), b.clone())) {
                let st = Statement2::typing(b.clone(), c.clone());
                record(&mut tally, &format!("subject reduction to {}", st), ip.satisfies(&st, &pool), ip);
            }
        }
    }
    tally
}
