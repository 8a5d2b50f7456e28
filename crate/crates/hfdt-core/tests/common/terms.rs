use std::collections::HashMap;

use hfdt_core::binding::{head_alpha_window, rewrite_once};
use hfdt_core::syntax::{Term, VarId};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Atoms and binder names a generator may use.
#[derive(Debug, Clone)]
pub struct Alphabet {
    pub consts: Vec<Term>,
    pub vars: Vec<VarId>,
    pub binders: Vec<VarId>,
    pub rho: bool,
}

impl Alphabet {
    /// System-1 alphabet with raw constants `c0..ck` and variables `v0..vj`.
    pub fn one(consts: u32, vars: VarId) -> Alphabet {
        Alphabet {
            consts: (0..consts).map(Term::Const).collect(),
            vars: (0..vars).collect(),
            binders: (0..vars).collect(),
            rho: true,
        }
    }

    fn atoms(&self) -> Vec<Term> {
        self.consts.iter().cloned().chain(self.vars.iter().map(|&v| Term::Var(v))).collect()
    }
}

/// All terms up to `max` symbols, grouped by size (index 0 is empty).
pub fn enumerate(alpha: &Alphabet, max: usize) -> Vec<Vec<Term>> {
    let mut by: Vec<Vec<Term>> = vec![Vec::new(); max + 1];
    for n in 1..=max {
        let mut out = Vec::new();
        if n == 1 {
            out = alpha.atoms();
        } else {
            if alpha.rho {
                out.extend(by[n - 1].iter().map(|t| Term::rho(t.clone())));
            }
            for i in 1..n - 1 {
                for a in &by[i] {
                    for b in &by[n - 1 - i] {
                        out.push(Term::beta(a.clone(), b.clone()));
                    }
                }
            }
            for i in 1..n.saturating_sub(2) {
                for r in &by[i] {
                    for s in &by[n - 2 - i] {
                        for &x in &alpha.binders {
                            out.push(Term::lam(x, r.clone(), s.clone()));
                        }
                    }
                }
            }
        }
        by[n] = out;
    }
    by
}

pub fn enumerate_flat(alpha: &Alphabet, max: usize) -> Vec<Term> {
    enumerate(alpha, max).into_iter().flatten().collect()
}

/// A random term of exactly `n` symbols when that size is reachable.
pub fn random_exact<R: Rng>(rng: &mut R, alpha: &Alphabet, n: usize) -> Term {
    let mut shapes = Vec::new();
    if n >= 2 && alpha.rho {
        shapes.push(0);
    }
    if n >= 3 {
        shapes.push(1);
    }
    if n >= 4 {
        shapes.push(2);
    }
    match shapes.choose(rng) {
        None => alpha.atoms().choose(rng).unwrap().clone(),
        Some(0) => Term::rho(random_exact(rng, alpha, n - 1)),
        Some(1) => {
            let i = rng.gen_range(1..n - 1);
            Term::beta(random_exact(rng, alpha, i), random_exact(rng, alpha, n - 1 - i))
        }
        Some(_) => {
            let i = rng.gen_range(1..n - 2);
            let x = *alpha.binders.choose(rng).unwrap();
            Term::lam(x, random_exact(rng, alpha, i), random_exact(rng, alpha, n - 2 - i))
        }
    }
}

pub fn random_term<R: Rng>(rng: &mut R, alpha: &Alphabet, max: usize) -> Term {
    let n = rng.gen_range(1..=max);
    random_exact(rng, alpha, n)
}

/// Proptest strategy over system-1 terms with constants `c0..c2` and
/// variables `v0..v3`.
pub fn arb_term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![(0u32..3).prop_map(Term::Const), (0u32..4).prop_map(Term::Var)];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::rho),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::beta(a, b)),
            (0u32..4, inner.clone(), inner).prop_map(|(x, r, s)| Term::lam(x, r, s)),
        ]
    })
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Component labels of `terms` under the closure of head-α steps applied at
/// any position, with candidate binders `0..=hi`. Components are explored
/// through intermediate terms outside `terms` as well.
pub fn alpha_components(terms: &[Term], hi: VarId) -> Vec<usize> {
    let mut index: HashMap<Term, usize> = HashMap::new();
    let mut nodes: Vec<Term> = Vec::new();
    let mut dsu = Dsu(Vec::new());
    let mut intern = |t: &Term, nodes: &mut Vec<Term>, dsu: &mut Dsu| -> (usize, bool) {
        if let Some(&i) = index.get(t) {
            return (i, false);
        }
        let i = nodes.len();
        index.insert(t.clone(), i);
        nodes.push(t.clone());
        dsu.0.push(i);
        (i, true)
    };
    let mut work: Vec<usize> = Vec::new();
    let ids: Vec<usize> = terms
        .iter()
        .map(|t| {
            let (i, new) = intern(t, &mut nodes, &mut dsu);
            if new {
                work.push(i);
            }
            i
        })
        .collect();
    while let Some(i) = work.pop() {
        let t = nodes[i].clone();
        for u in rewrite_once(&t, &mut |s| head_alpha_window(s, 0, hi)) {
            let (j, new) = intern(&u, &mut nodes, &mut dsu);
            if new {
                work.push(j);
            }
            dsu.union(i, j);
        }
    }
    ids.into_iter().map(|i| dsu.find(i)).collect()
}

/// Compares canonical-form α-equality with [`alpha_components`] on every
/// pair of `terms`. Returns the number of pairs and the number of
/// disagreeing pairs.
pub fn alpha_agreement(terms: &[Term], hi: VarId) -> (u128, u128) {
    use hfdt_core::binding::canonicalize;
    use std::collections::BTreeMap;
    let comps = alpha_components(terms, hi);
    let canon: Vec<_> = terms.iter().map(canonicalize).collect();
    // Pairs agree exactly when the two partitions coincide, so count the
    // pairs in each joint cell against both marginals.
    let mut joint: BTreeMap<(usize, &_), u128> = BTreeMap::new();
    let mut by_comp: BTreeMap<usize, u128> = BTreeMap::new();
    let mut by_canon: BTreeMap<&_, u128> = BTreeMap::new();
    for (c, k) in comps.iter().zip(&canon) {
        *joint.entry((*c, k)).or_default() += 1;
        *by_comp.entry(*c).or_default() += 1;
        *by_canon.entry(k).or_default() += 1;
    }
    let sq = |m: u128| m * m;
    let same_both: u128 = joint.values().copied().map(sq).sum();
    let same_comp: u128 = by_comp.values().copied().map(sq).sum();
    let same_canon: u128 = by_canon.values().copied().map(sq).sum();
    let n = terms.len() as u128;
    (n * n, (same_comp - same_both) + (same_canon - same_both))
}
