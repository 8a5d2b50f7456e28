//! Specification bundles (false, equality, binary products, conjunction,
//! bounded universal quantification), their intended finite models, mutated
//! models, and verifiers that brute-force the completeness claims.
//!
//! Also provides the system-1 axiom fragments for equality and β, and the
//! enumeration of the choice/excluded-middle type.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::binding::free_vars;
use crate::hfset::{self, HfSet};
use crate::infer2::Gamma2;
use crate::semantics1::{Assignment, Atom, EvalError, Evaluator, Statement1};
use crate::syntax::sugar::{print_term, AtomTable};
use crate::syntax::{least_var_not_free, mk_arrow, mk_arrow2, mk_pi, mk_pi2, op, sort, user_const, Const2, Logic1, System, Term, VarId};
use crate::system2::{CarrierSpec, ConstFn, Error2, Func, Interp2, Result2, Statement2, UniverseSpec, Universes, Value};

/// A term together with the sort index it is typed by.
#[derive(Debug, Clone)]
struct Ty {
    t: Term,
    lvl: u32,
}

fn ty(t: Term, lvl: u32) -> Ty {
    Ty { t, lvl }
}

fn u(k: u32) -> Ty {
    ty(sort(k), k + 1)
}

fn pi(x: VarId, a: &Ty, b: &Ty) -> Ty {
    ty(mk_pi2(a.lvl, b.lvl, x, a.t.clone(), b.t.clone()), (a.lvl + 1).max(b.lvl))
}

fn arr(a: &Ty, b: &Ty) -> Ty {
    ty(mk_arrow2(a.lvl, b.lvl, a.t.clone(), b.t.clone()), (a.lvl + 1).max(b.lvl))
}

fn app(f: &Term, args: &[&Term]) -> Term {
    Term::apps(f.clone(), args.iter().map(|t| (*t).clone()))
}

const X: VarId = 0;
const Y: VarId = 1;
const P: VarId = 2;
const F: VarId = 3;
const G: VarId = 4;
const Z: VarId = 5;
const V: VarId = 6;
const W: VarId = 7;
const Q: VarId = 8;

const VAR_NAMES: [(&str, VarId); 9] = [("x", X), ("y", Y), ("p", P), ("f", F), ("g", G), ("z", Z), ("v", V), ("w", W), ("q", Q)];

/// Named constants, variables and statements of one specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecBundle {
    pub name: String,
    pub constants: Vec<(String, Term)>,
    pub variables: Vec<(String, VarId)>,
    pub statements: Vec<Statement2>,
    pub indices: Vec<(String, u32)>,
}

impl SpecBundle {
    fn new(name: &str, consts: &[(&str, u32)], indices: &[(&str, u32)]) -> SpecBundle {
        SpecBundle {
            name: name.to_string(),
            constants: consts.iter().map(|(n, k)| (n.to_string(), user_const(*k))).collect(),
            variables: Vec::new(),
            statements: Vec::new(),
            indices: indices.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
        }
    }

    /// The constant named `name`.
    pub fn constant(&self, name: &str) -> Term {
        self.constants.iter().find(|(n, _)| n == name).map(|(_, t)| t.clone()).unwrap_or_else(|| panic!("no constant {}", name))
    }

    pub fn atom(&self, name: &str) -> Atom {
        Atom::of(&self.constant(name)).expect("constant")
    }

    pub fn table(&self) -> AtomTable {
        let mut t = AtomTable::new();
        for (n, c) in &self.constants {
            t.bind(n.clone(), c.clone());
        }
        for (n, v) in &self.variables {
            t.bind(n.clone(), Term::Var(*v));
        }
        t
    }

    pub fn gamma(&self) -> Gamma2 {
        self.statements.iter().cloned().collect()
    }

    /// Hypothesis-file text: atom declarations, then one statement per line.
    pub fn render(&self) -> String {
        let mut out = format!("# {}\n", self.name);
        for (n, c) in &self.constants {
            if let Term::Const(k) = c {
                if let Const2::User(i) = Const2::decode(*k) {
                    out.push_str(&format!("atom {} = c{}\n", n, i));
                }
            }
        }
        for (n, v) in &self.variables {
            out.push_str(&format!("atom {} = v{}\n", n, v));
        }
        let table = self.table();
        for st in &self.statements {
            out.push_str(&st.render(Some(&table)));
            out.push('\n');
        }
        out
    }

    fn finish(mut self) -> SpecBundle {
        let mut used = crate::binding::VarSet::new();
        for st in &self.statements {
            used.extend(crate::binding::all_vars(&st.left));
            used.extend(crate::binding::all_vars(&st.right));
        }
        self.variables = VAR_NAMES.iter().filter(|(_, v)| used.contains(v)).map(|(n, v)| (n.to_string(), *v)).collect();
        self
    }
}

/// Result of running a verifier on a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecVerdict {
    /// The model satisfies the bundle and the completeness claim holds.
    Verified { checked: usize },
    /// The first bundle statement the model fails.
    NotAModel { index: usize, statement: String },
    /// The model satisfies the bundle but the claim fails.
    Refuted { detail: String },
    Unchecked { reason: String },
}

impl SpecVerdict {
    pub fn verified(&self) -> bool {
        matches!(self, SpecVerdict::Verified { .. })
    }
}

/// Checks every bundle statement in order and stops at the first failure.
pub fn check_model(ip: &Interp2, b: &SpecBundle, pool: &[HfSet]) -> Result<(), SpecVerdict> {
    let table = b.table();
    for (i, st) in b.statements.iter().enumerate() {
        match ip.satisfies(st, pool) {
            Ok(true) => {}
            Ok(false) => return Err(SpecVerdict::NotAModel { index: i, statement: st.render(Some(&table)) }),
            Err(e) => return Err(SpecVerdict::Unchecked { reason: e.to_string() }),
        }
    }
    Ok(())
}

fn unchecked(e: Error2) -> SpecVerdict {
    SpecVerdict::Unchecked { reason: e.to_string() }
}

/// Universes for the intended models: `U_0 = {∅,{∅}}` unless `n = 0`.
/// With `finite_u1` set, `U_1` holds `U_0` and the given carriers; otherwise
/// `U_1` is open. Higher sorts are always open.
pub fn model_universes(n: u32, carriers: Vec<HfSet>, finite_u1: bool) -> Arc<Universes> {
    let u1 = |members: Vec<HfSet>| {
        if finite_u1 {
            CarrierSpec::Sets { members, lower_as_elements: vec![0] }
        } else {
            CarrierSpec::Open
        }
    };
    let spec = if n == 0 {
        UniverseSpec {
            carriers: vec![CarrierSpec::Sets { members: carriers, lower_as_elements: Vec::new() }, u1(Vec::new())],
            ..UniverseSpec::default()
        }
    } else {
        let members = if n == 1 { carriers } else { Vec::new() };
        UniverseSpec {
            carriers: vec![CarrierSpec::Sets { members: Vec::new(), lower_as_elements: Vec::new() }, u1(members)],
            proof_irrelevant: true,
            prop_extensional: true,
            max_carrier: 0,
        }
    };
    Arc::new(Universes::build(&spec).expect("intended universes"))
}

fn u0_of(ip: &Interp2) -> HfSet {
    match ip.universes.value(0) {
        Value::Set(s) => s,
        _ => HfSet::from_vec(vec![HfSet::empty(), HfSet::nat(1)]),
    }
}

fn functions(dom: &HfSet, cod: &HfSet) -> HfSet {
    let fibres: Vec<(HfSet, HfSet)> = dom.iter().map(|x| (x.clone(), cod.clone())).collect();
    hfset::product_of_fibres(&fibres, usize::MAX).expect("small function space")
}

fn truth(b: bool) -> HfSet {
    if b {
        HfSet::nat(1)
    } else {
        HfSet::empty()
    }
}

fn val(ip: &Interp2, t: &Term) -> Result2<HfSet> {
    ip.materialize(&ip.eval(t)?)
}

// ---------------------------------------------------------------------------
// False

pub fn bundle_false() -> SpecBundle {
    let mut b = SpecBundle::new("false", &[("bot", 10), ("ab", 11)], &[]);
    let bot = ty(b.constant("bot"), 0);
    b.statements.push(Statement2::typing(bot.t.clone(), sort(0)));
    let ex = pi(X, &u(0), &ty(Term::Var(X), 0));
    b.statements.push(Statement2::typing(b.constant("ab"), arr(&bot, &ex).t));
    b.finish()
}

pub fn intended_false(b: &SpecBundle) -> Interp2 {
    let mut ip = Interp2::new(model_universes(1, Vec::new(), false));
    ip.set(b.atom("bot"), Value::Set(HfSet::empty()));
    ip.set(b.atom("ab"), Value::Set(HfSet::empty()));
    ip
}

pub fn mutants_false(b: &SpecBundle) -> Vec<(String, Interp2)> {
    let mut ip = intended_false(b);
    ip.set(b.atom("bot"), Value::Set(HfSet::nat(1)));
    vec![("bot = {0}".to_string(), ip)]
}

pub fn verify_false(ip: &Interp2, b: &SpecBundle) -> SpecVerdict {
    if let Err(v) = check_model(ip, b, &[]) {
        return v;
    }
    match val(ip, &b.constant("bot")) {
        Ok(s) if s.is_empty() => SpecVerdict::Verified { checked: 1 },
        Ok(s) => SpecVerdict::Refuted { detail: format!("bot = {}", s) },
        Err(e) => unchecked(e),
    }
}

// ---------------------------------------------------------------------------
// Equality

/// `(a:u_n), (eq_a : a → a → u_0), (rfl_a : (x:a) → eq_a x x)` and the
/// substitution statement for `sub_a`.
pub fn bundle_eq(n: u32) -> SpecBundle {
    let mut b = SpecBundle::new("eq", &[("a", 20), ("eq_a", 21), ("rfl_a", 22), ("sub_a", 23)], &[("n", n)]);
    let a = ty(b.constant("a"), n);
    let eq = b.constant("eq_a");
    let (x, y, p) = (Term::Var(X), Term::Var(Y), Term::Var(P));
    b.statements.push(Statement2::typing(a.t.clone(), sort(n)));
    b.statements.push(Statement2::typing(eq.clone(), arr(&a, &arr(&a, &u(0))).t));
    b.statements.push(Statement2::typing(b.constant("rfl_a"), pi(X, &a, &ty(app(&eq, &[&x, &x]), 0)).t));
    let tail = pi(P, &arr(&a, &u(0)), &arr(&ty(app(&p, &[&x]), 0), &ty(app(&p, &[&y]), 0)));
    let sub = pi(X, &a, &pi(Y, &a, &arr(&ty(app(&eq, &[&x, &y]), 0), &tail)));
    b.statements.push(Statement2::typing(b.constant("sub_a"), sub.t));
    b.finish()
}

/// `sub(r)(s)(t)(φ)(u)` picks the least element of `φ(s)`, or `∅` when there
/// is none.
fn eq_sub_witness(a: &HfSet, u0: &HfSet, eq: &HfSet) -> HfSet {
    let phis = functions(a, u0);
    hfset::graph(a.iter().map(|r| {
        let per_s = hfset::graph(a.iter().map(|s| {
            let e = hfset::apply(&hfset::apply(eq, r), s);
            let per_t = hfset::graph(e.iter().map(|t| {
                let per_phi = hfset::graph(phis.iter().map(|phi| {
                    let (pr, ps) = (hfset::apply(phi, r), hfset::apply(phi, s));
                    let pick = ps.iter().next().cloned().unwrap_or_else(HfSet::empty);
                    (phi.clone(), hfset::graph(pr.iter().map(|w| (w.clone(), pick.clone()))))
                }));
                (t.clone(), per_phi)
            }));
            (s.clone(), per_t)
        }));
        (r.clone(), per_s)
    }))
}

fn eq_model(b: &SpecBundle, n: u32, a: &HfSet, eq: HfSet) -> Interp2 {
    let mut ip = Interp2::new(model_universes(n, vec![a.clone()], false));
    let u0 = u0_of(&ip);
    let rfl = hfset::graph(a.iter().map(|r| (r.clone(), HfSet::empty())));
    let sub = eq_sub_witness(a, &u0, &eq);
    ip.set(b.atom("a"), Value::Set(a.clone()));
    ip.set(b.atom("eq_a"), Value::Set(eq));
    ip.set(b.atom("rfl_a"), Value::Set(rfl));
    ip.set(b.atom("sub_a"), Value::Set(sub));
    ip
}

fn eq_graph(a: &HfSet, extra: Option<(&HfSet, &HfSet)>) -> HfSet {
    hfset::graph(a.iter().map(|r| {
        (r.clone(), hfset::graph(a.iter().map(|s| (s.clone(), truth(r == s || extra == Some((r, s)))))))
    }))
}

pub fn intended_eq(b: &SpecBundle, n: u32, a: &HfSet) -> Interp2 {
    eq_model(b, n, a, eq_graph(a, None))
}

/// Models where `eq_a` also relates one pair of distinct elements.
pub fn mutants_eq(b: &SpecBundle, n: u32, a: &HfSet) -> Vec<(String, Interp2)> {
    let e = a.elements();
    if e.len() < 2 {
        return Vec::new();
    }
    vec![(format!("eq({})({}) nonempty", e[0], e[1]), eq_model(b, n, a, eq_graph(a, Some((&e[0], &e[1])))))]
}

pub fn verify_eq(ip: &Interp2, b: &SpecBundle) -> SpecVerdict {
    if let Err(v) = check_model(ip, b, &[]) {
        return v;
    }
    let (a, eq) = match (val(ip, &b.constant("a")), val(ip, &b.constant("eq_a"))) {
        (Ok(a), Ok(e)) => (a, e),
        (Err(e), _) | (_, Err(e)) => return unchecked(e),
    };
    let mut checked = 0;
    for r in a.iter() {
        for s in a.iter() {
            checked += 1;
            let nonempty = !hfset::apply(&hfset::apply(&eq, r), s).is_empty();
            if nonempty != (r == s) {
                return SpecVerdict::Refuted { detail: format!("eq({})({}) nonempty = {}", r, s, nonempty) };
            }
        }
    }
    SpecVerdict::Verified { checked }
}

// ---------------------------------------------------------------------------
// Binary products

fn rec_name(l: u32) -> String {
    format!("rec{}", l)
}

/// The monomorphic product specification over constants `a`, `b`:
/// `(a,b,pr : u_n)`, `(mk : a → b → pr)`, and for each `l` in `rec_sorts`
/// the `rec^l` typing and the reduction `rec^l f g (mk x y) |> g x y`.
pub fn bundle_product_instance(n: u32, rec_sorts: &[u32]) -> SpecBundle {
    let mut consts: Vec<(String, u32)> = vec![("a".into(), 30), ("b".into(), 31), ("pr".into(), 32), ("mk".into(), 33)];
    let mut sorts: Vec<u32> = rec_sorts.to_vec();
    sorts.sort_unstable();
    sorts.dedup();
    for &l in &sorts {
        assert!(l < 6, "rec sort index too large");
        consts.push((rec_name(l), 34 + l));
    }
    let cref: Vec<(&str, u32)> = consts.iter().map(|(n, k)| (n.as_str(), *k)).collect();
    let mut b = SpecBundle::new("product", &cref, &[("n", n)]);
    let (a, bb, pr) = (ty(b.constant("a"), n), ty(b.constant("b"), n), ty(b.constant("pr"), n));
    let mk = b.constant("mk");
    for t in [&a, &bb, &pr] {
        b.statements.push(Statement2::typing(t.t.clone(), sort(n)));
    }
    b.statements.push(Statement2::typing(mk.clone(), arr(&a, &arr(&bb, &pr)).t));
    let (f, g, x, y, z) = (Term::Var(F), Term::Var(G), Term::Var(X), Term::Var(Y), Term::Var(Z));
    let mkxy = app(&mk, &[&x, &y]);
    for &l in &sorts {
        let rec = b.constant(&rec_name(l));
        b.statements.push(Statement2::reduction(app(&rec, &[&f, &g, &mkxy]), app(&g, &[&x, &y])));
    }
    for &l in &sorts {
        let rec = b.constant(&rec_name(l));
        let case = pi(X, &a, &pi(Y, &bb, &ty(app(&f, &[&mkxy]), l)));
        let concl = pi(Z, &pr, &ty(app(&f, &[&z]), l));
        let t = pi(F, &arr(&pr, &u(l)), &arr(&case, &concl));
        b.statements.push(Statement2::typing(rec, t.t));
    }
    b.finish()
}

/// The polymorphic product typings over sorts `m`, `n`.
pub fn bundle_product(m: u32, n: u32, rec_sorts: &[u32]) -> SpecBundle {
    let mut consts: Vec<(String, u32)> = vec![("pr".into(), 40), ("mk".into(), 41)];
    for &l in rec_sorts {
        assert!(l < 8, "rec sort index too large");
        consts.push((rec_name(l), 42 + l));
    }
    let cref: Vec<(&str, u32)> = consts.iter().map(|(n, k)| (n.as_str(), *k)).collect();
    let mut b = SpecBundle::new("product-polymorphic", &cref, &[("m", m), ("n", n)]);
    let top = m.max(n);
    let (pr, mk) = (b.constant("pr"), b.constant("mk"));
    let (v, w) = (ty(Term::Var(V), m), ty(Term::Var(W), n));
    let (f, x, y, z) = (Term::Var(F), Term::Var(X), Term::Var(Y), Term::Var(Z));
    let prvw = ty(app(&pr, &[&v.t, &w.t]), top);
    b.statements.push(Statement2::typing(pr.clone(), pi(V, &u(m), &pi(W, &u(n), &u(top))).t));
    let mk_ty = pi(V, &u(m), &pi(W, &u(n), &arr(&v, &arr(&w, &prvw))));
    b.statements.push(Statement2::typing(mk.clone(), mk_ty.t));
    for &l in rec_sorts {
        let case = pi(X, &v, &pi(Y, &w, &ty(app(&f, &[&app(&mk, &[&v.t, &w.t, &x, &y])]), l)));
        let concl = pi(Z, &prvw, &ty(app(&f, &[&z]), l));
        let t = pi(V, &u(m), &pi(W, &u(n), &pi(F, &arr(&prvw, &u(l)), &arr(&case, &concl))));
        b.statements.push(Statement2::typing(b.constant(&rec_name(l)), t.t));
    }
    b.finish()
}

/// Sub-reduction instances `rec^l V W F G (mk V W X Y) |>= G X Y` for all
/// choices of the six terms from `window`.
pub fn product_subreductions(b: &SpecBundle, l: u32, window: &[Term]) -> Vec<Statement2> {
    let (rec, mk) = (b.constant(&rec_name(l)), b.constant("mk"));
    let mut out = Vec::new();
    let k = window.len();
    let total = k.pow(6);
    for mut idx in 0..total {
        let mut pick = [0usize; 6];
        for p in pick.iter_mut() {
            *p = idx % k;
            idx /= k;
        }
        let [v, w, f, g, x, y] = pick.map(|i| &window[i]);
        let lhs = app(&rec, &[v, w, f, g, &app(&mk, &[v, w, x, y])]);
        out.push(Statement2::subreduction(lhs, app(g, &[x, y])));
    }
    out
}

/// `y ↦ f(mk(x)(y))` for fixed `x`.
struct FibreY {
    f: HfSet,
    mkx: HfSet,
    b: HfSet,
}

impl Func for FibreY {
    fn describe(&self) -> String {
        "y -> f(mk x y)".into()
    }

    fn domain(&self, _: &Interp2) -> Result2<Value> {
        Ok(Value::Set(self.b.clone()))
    }

    fn call(&self, ip: &Interp2, y: &Value) -> Result2<Value> {
        let y = ip.materialize(y)?;
        Ok(Value::Set(hfset::apply(&self.f, &hfset::apply(&self.mkx, &y))))
    }
}

/// `x ↦ ∏_y f(mk(x)(y))`.
struct FibreX {
    f: HfSet,
    mk: HfSet,
    a: HfSet,
    b: HfSet,
}

impl Func for FibreX {
    fn describe(&self) -> String {
        "x -> prod y. f(mk x y)".into()
    }

    fn domain(&self, _: &Interp2) -> Result2<Value> {
        Ok(Value::Set(self.a.clone()))
    }

    fn call(&self, ip: &Interp2, x: &Value) -> Result2<Value> {
        let x = ip.materialize(x)?;
        let fy = FibreY { f: self.f.clone(), mkx: hfset::apply(&self.mk, &x), b: self.b.clone() };
        Ok(Value::Prod(Arc::new(Value::Fun(Arc::new(fy)))))
    }
}

/// `⟦rec⟧(φ)`: `θ ↦ θ^×` on `∏_x ∏_y φ(mk x y)`.
struct RecAt {
    f: HfSet,
    mk: HfSet,
    a: HfSet,
    b: HfSet,
}

impl Func for RecAt {
    fn describe(&self) -> String {
        format!("rec({})", self.f)
    }

    fn domain(&self, _: &Interp2) -> Result2<Value> {
        let fx = FibreX { f: self.f.clone(), mk: self.mk.clone(), a: self.a.clone(), b: self.b.clone() };
        Ok(Value::Prod(Arc::new(Value::Fun(Arc::new(fx)))))
    }

    fn call(&self, ip: &Interp2, theta: &Value) -> Result2<Value> {
        let theta = ip.materialize(theta)?;
        let mut entries = Vec::new();
        for x in self.a.iter() {
            let mkx = hfset::apply(&self.mk, x);
            let tx = hfset::apply(&theta, x);
            for y in self.b.iter() {
                entries.push((hfset::apply(&mkx, y), hfset::apply(&tx, y)));
            }
        }
        Ok(Value::Set(hfset::graph(entries)))
    }
}

/// The intended `⟦rec^l⟧`, relative to the model's `pr` and `mk`; defined
/// exactly on `U_l^{pr}`.
pub struct RecNative {
    pub l: u32,
    pub pr: HfSet,
    pub mk: HfSet,
    pub a: HfSet,
    pub b: HfSet,
}

impl Func for RecNative {
    fn describe(&self) -> String {
        format!("rec^{}", self.l)
    }

    fn domain(&self, ip: &Interp2) -> Result2<Value> {
        let fam = ConstFn { dom: Value::Set(self.pr.clone()), value: ip.universes.value(self.l) };
        Ok(Value::Prod(Arc::new(Value::Fun(Arc::new(fam)))))
    }

    fn call(&self, ip: &Interp2, f: &Value) -> Result2<Value> {
        let f = ip.materialize(f)?;
        Ok(Value::Fun(Arc::new(RecAt { f, mk: self.mk.clone(), a: self.a.clone(), b: self.b.clone() })))
    }
}

/// Kuratowski product `a × b`.
pub fn cartesian(a: &HfSet, b: &HfSet) -> HfSet {
    HfSet::from_vec(a.iter().flat_map(|r| b.iter().map(move |s| hfset::pair(r.clone(), s.clone()))).collect())
}

fn product_model(b: &SpecBundle, n: u32, a: &HfSet, bset: &HfSet, pr: HfSet, mk: HfSet) -> Interp2 {
    let mut ip = Interp2::new(model_universes(n, vec![a.clone(), bset.clone(), pr.clone()], true));
    ip.set(b.atom("a"), Value::Set(a.clone()));
    ip.set(b.atom("b"), Value::Set(bset.clone()));
    ip.set(b.atom("pr"), Value::Set(pr.clone()));
    ip.set(b.atom("mk"), Value::Set(mk.clone()));
    for (name, _) in b.constants.iter().filter(|(n, _)| n.starts_with("rec")) {
        let l: u32 = name[3..].parse().expect("rec index");
        let native = RecNative { l, pr: pr.clone(), mk: mk.clone(), a: a.clone(), b: bset.clone() };
        ip.set(b.atom(name), Value::Fun(Arc::new(native)));
    }
    ip
}

fn mk_graph(a: &HfSet, b: &HfSet, pick: impl Fn(&HfSet, &HfSet) -> HfSet) -> HfSet {
    hfset::graph(a.iter().map(|r| (r.clone(), hfset::graph(b.iter().map(|s| (s.clone(), pick(r, s)))))))
}

pub fn intended_product(b: &SpecBundle, n: u32, a: &HfSet, bset: &HfSet) -> Interp2 {
    let mk = mk_graph(a, bset, |r, s| hfset::pair(r.clone(), s.clone()));
    product_model(b, n, a, bset, cartesian(a, bset), mk)
}

/// An extra element of `pr` outside the range of `mk`, and a non-injective `mk`.
pub fn mutants_product(b: &SpecBundle, n: u32, a: &HfSet, bset: &HfSet) -> Vec<(String, Interp2)> {
    let pr = cartesian(a, bset);
    let mk = mk_graph(a, bset, |r, s| hfset::pair(r.clone(), s.clone()));
    let s0 = bset.iter().next().cloned().unwrap_or_else(HfSet::empty);
    let flat = mk_graph(a, bset, |r, _| hfset::pair(r.clone(), s0.clone()));
    vec![
        ("pr has an element outside ran(mk)".into(), product_model(b, n, a, bset, pr.insert(HfSet::empty()), mk)),
        ("mk not injective".into(), product_model(b, n, a, bset, pr, flat)),
    ]
}

/// Pool for the reduction statements: the elements of `a` and `b`, the
/// constant families onto `a` and `b`, and the two projections.
pub fn product_pool(a: &HfSet, b: &HfSet) -> Vec<HfSet> {
    let pr = cartesian(a, b);
    let mut pool: Vec<HfSet> = a.iter().chain(b.iter()).cloned().collect();
    pool.push(hfset::graph(pr.iter().map(|t| (t.clone(), a.clone()))));
    pool.push(hfset::graph(pr.iter().map(|t| (t.clone(), b.clone()))));
    pool.push(mk_graph(a, b, |r, _| r.clone()));
    pool.push(mk_graph(a, b, |_, s| s.clone()));
    pool.sort();
    pool.dedup();
    pool
}

/// Checks the bundle, that `(r,s) ↦ mk(r)(s)` is a bijection onto `pr`, and
/// that the projections obtained from `rec^n` invert `mk` on every pair.
pub fn verify_product(ip: &Interp2, b: &SpecBundle, pool: &[HfSet]) -> SpecVerdict {
    if let Err(v) = check_model(ip, b, pool) {
        return v;
    }
    let n = b.indices.iter().find(|(k, _)| k == "n").map(|(_, v)| *v).unwrap_or(1);
    let get = |name: &str| val(ip, &b.constant(name));
    let (a, bs, pr, mk) = match (get("a"), get("b"), get("pr"), get("mk")) {
        (Ok(a), Ok(bs), Ok(pr), Ok(mk)) => (a, bs, pr, mk),
        _ => return SpecVerdict::Unchecked { reason: "cannot evaluate carriers".into() },
    };
    let image: Vec<HfSet> = a.iter().flat_map(|r| bs.iter().map(|s| hfset::apply(&hfset::apply(&mk, r), s))).collect();
    let distinct = HfSet::from_vec(image.clone());
    if distinct.len() != image.len() {
        return SpecVerdict::Refuted { detail: "mk is not injective".into() };
    }
    if distinct != pr {
        return SpecVerdict::Refuted { detail: "mk is not onto pr".into() };
    }
    let Some(_) = b.constants.iter().find(|(k, _)| *k == rec_name(n)) else {
        return SpecVerdict::Unchecked { reason: format!("bundle lacks rec{}", n) };
    };
    let rec = b.constant(&rec_name(n));
    let (at, bt, prt) = (b.constant("a"), b.constant("b"), b.constant("pr"));
    let fam_a = Term::lam(W, prt.clone(), at.clone());
    let fam_b = Term::lam(W, prt, bt.clone());
    let fst = Term::lam(X, at.clone(), Term::lam(Y, bt.clone(), Term::Var(X)));
    let snd = Term::lam(X, at, Term::lam(Y, bt, Term::Var(Y)));
    let p = match val(ip, &app(&rec, &[&fam_a, &fst])) {
        Ok(p) => p,
        Err(e) => return unchecked(e),
    };
    let q = match val(ip, &app(&rec, &[&fam_b, &snd])) {
        Ok(q) => q,
        Err(e) => return unchecked(e),
    };
    let mut checked = 0;
    for r in a.iter() {
        for s in bs.iter() {
            checked += 1;
            let t = hfset::apply(&hfset::apply(&mk, r), s);
            if hfset::apply(&p, &t) != *r || hfset::apply(&q, &t) != *s {
                return SpecVerdict::Refuted { detail: format!("projections fail at ({}, {})", r, s) };
            }
        }
    }
    SpecVerdict::Verified { checked }
}

// ---------------------------------------------------------------------------
// Conjunction

pub fn bundle_and() -> SpecBundle {
    let mut b = SpecBundle::new("and", &[("and", 50), ("mk", 51), ("rec", 52)], &[]);
    let (and, mk) = (b.constant("and"), b.constant("mk"));
    let (v, w) = (ty(Term::Var(V), 0), ty(Term::Var(W), 0));
    let (f, x, y, z) = (Term::Var(F), Term::Var(X), Term::Var(Y), Term::Var(Z));
    let andvw = ty(app(&and, &[&v.t, &w.t]), 0);
    b.statements.push(Statement2::typing(and.clone(), pi(V, &u(0), &pi(W, &u(0), &u(0))).t));
    b.statements.push(Statement2::typing(mk.clone(), pi(V, &u(0), &pi(W, &u(0), &arr(&v, &arr(&w, &andvw)))).t));
    let case = pi(X, &v, &pi(Y, &w, &ty(app(&f, &[&app(&mk, &[&v.t, &w.t, &x, &y])]), 0)));
    let concl = pi(Z, &andvw, &ty(app(&f, &[&z]), 0));
    let rec = pi(V, &u(0), &pi(W, &u(0), &pi(F, &arr(&andvw, &u(0)), &arr(&case, &concl))));
    b.statements.push(Statement2::typing(b.constant("rec"), rec.t));
    b.finish()
}

/// `rec(p)(q)(f)(θ) = {⟨θ(r)(s), mk(p)(q)(r)(s)⟩}` relative to given `and`, `mk`.
fn and_rec(u0: &HfSet, and: &HfSet, mk: &HfSet) -> HfSet {
    hfset::graph(u0.iter().map(|p| {
        (
            p.clone(),
            hfset::graph(u0.iter().map(|q| {
                let c = hfset::apply(&hfset::apply(and, p), q);
                let mkpq = hfset::apply(&hfset::apply(mk, p), q);
                let per_f = hfset::graph(functions(&c, u0).iter().map(|f| {
                    let fibres: Vec<(HfSet, HfSet)> = p
                        .iter()
                        .map(|r| {
                            let inner: Vec<(HfSet, HfSet)> = q
                                .iter()
                                .map(|s| (s.clone(), hfset::apply(f, &hfset::apply(&hfset::apply(&mkpq, r), s))))
                                .collect();
                            (r.clone(), hfset::product_of_fibres(&inner, usize::MAX).expect("small"))
                        })
                        .collect();
                    let thetas = hfset::product_of_fibres(&fibres, usize::MAX).expect("small");
                    let mkpq = &mkpq;
                    let per_theta = hfset::graph(thetas.iter().map(|th| {
                        let ent = p.iter().flat_map(|r| {
                            q.iter().map(move |s| {
                                (hfset::apply(&hfset::apply(mkpq, r), s), hfset::apply(&hfset::apply(th, r), s))
                            })
                        });
                        (th.clone(), hfset::graph(ent.collect::<Vec<_>>()))
                    }));
                    (f.clone(), per_theta)
                }));
                (q.clone(), per_f)
            })),
        )
    }))
}

fn and_model(b: &SpecBundle, and_val: impl Fn(&HfSet, &HfSet) -> HfSet) -> Interp2 {
    let mut ip = Interp2::new(model_universes(1, Vec::new(), false));
    let u0 = u0_of(&ip);
    let and = hfset::graph(u0.iter().map(|p| (p.clone(), hfset::graph(u0.iter().map(|q| (q.clone(), and_val(p, q)))))));
    let mk = hfset::graph(u0.iter().map(|p| {
        (
            p.clone(),
            hfset::graph(u0.iter().map(|q| (q.clone(), mk_graph(p, q, |_, _| HfSet::empty())))),
        )
    }));
    let rec = and_rec(&u0, &and, &mk);
    ip.set(b.atom("and"), Value::Set(and));
    ip.set(b.atom("mk"), Value::Set(mk));
    ip.set(b.atom("rec"), Value::Set(rec));
    ip
}

pub fn intended_and(b: &SpecBundle) -> Interp2 {
    and_model(b, |p, q| truth(!p.is_empty() && !q.is_empty()))
}

pub fn mutants_and(b: &SpecBundle) -> Vec<(String, Interp2)> {
    vec![
        ("and(1)(1) = 0".into(), and_model(b, |_, _| HfSet::empty())),
        ("and(0)(1) = 1".into(), and_model(b, |p, q| truth(!q.is_empty() || (!p.is_empty() && !q.is_empty())))),
    ]
}

pub fn verify_and(ip: &Interp2, b: &SpecBundle) -> SpecVerdict {
    if let Err(v) = check_model(ip, b, &[]) {
        return v;
    }
    let u0 = u0_of(ip);
    let (and, mk) = match (val(ip, &b.constant("and")), val(ip, &b.constant("mk"))) {
        (Ok(a), Ok(m)) => (a, m),
        (Err(e), _) | (_, Err(e)) => return unchecked(e),
    };
    let mut checked = 0;
    for p in u0.iter() {
        for q in u0.iter() {
            checked += 1;
            let c = hfset::apply(&hfset::apply(&and, p), q);
            if c.is_empty() != (p.is_empty() || q.is_empty()) {
                return SpecVerdict::Refuted { detail: format!("and({})({}) = {}", p, q, c) };
            }
            let mkpq = hfset::apply(&hfset::apply(&mk, p), q);
            let image = HfSet::from_vec(p.iter().flat_map(|r| q.iter().map(|s| hfset::apply(&hfset::apply(&mkpq, r), s))).collect());
            if image != c {
                return SpecVerdict::Refuted { detail: format!("mk({})({}) is not onto", p, q) };
            }
        }
    }
    SpecVerdict::Verified { checked }
}

// ---------------------------------------------------------------------------
// Universal quantification

pub fn bundle_forall(n: u32) -> SpecBundle {
    let mut b = SpecBundle::new("forall", &[("a", 60), ("all_a", 61), ("mk_a", 62), ("rec_a", 63)], &[("n", n)]);
    let a = ty(b.constant("a"), n);
    let (all, mk) = (b.constant("all_a"), b.constant("mk_a"));
    let (q, f, g, z) = (Term::Var(Q), Term::Var(F), Term::Var(G), Term::Var(Z));
    let pred = arr(&a, &u(0));
    let prod = ty(Term::apps(op(n, 0), [a.t.clone(), q.clone()]), n + 1);
    let allq = ty(app(&all, &[&q]), 0);
    b.statements.push(Statement2::typing(a.t.clone(), sort(n)));
    b.statements.push(Statement2::typing(all.clone(), pi(Q, &pred, &u(0)).t));
    b.statements.push(Statement2::typing(mk.clone(), pi(Q, &pred, &arr(&prod, &allq)).t));
    let case = pi(G, &prod, &ty(app(&f, &[&app(&mk, &[&q, &g])]), 0));
    let concl = pi(Z, &allq, &ty(app(&f, &[&z]), 0));
    let rec = pi(Q, &pred, &pi(F, &arr(&allq, &u(0)), &arr(&case, &concl)));
    b.statements.push(Statement2::typing(b.constant("rec_a"), rec.t));
    b.finish()
}

fn forall_model(b: &SpecBundle, n: u32, a: &HfSet, all_val: impl Fn(&HfSet) -> HfSet) -> Interp2 {
    let mut ip = Interp2::new(model_universes(n, vec![a.clone()], false));
    let u0 = u0_of(&ip);
    let thetas = functions(a, &u0);
    let all = hfset::graph(thetas.iter().map(|t| (t.clone(), all_val(t))));
    let mk = hfset::graph(thetas.iter().map(|t| {
        (t.clone(), hfset::graph(hfset::dep_product(t).iter().map(|phi| (phi.clone(), HfSet::empty()))))
    }));
    let rec = hfset::graph(thetas.iter().map(|t| {
        let c = hfset::apply(&all, t);
        let mkt = hfset::apply(&mk, t);
        let prod = hfset::dep_product(t);
        let per_f = hfset::graph(functions(&c, &u0).iter().map(|f| {
            let fibres: Vec<(HfSet, HfSet)> =
                prod.iter().map(|phi| (phi.clone(), hfset::apply(f, &hfset::apply(&mkt, phi)))).collect();
            let hs = hfset::product_of_fibres(&fibres, usize::MAX).expect("small");
            let per_h = hfset::graph(hs.iter().map(|h| {
                (h.clone(), hfset::graph(prod.iter().map(|phi| (hfset::apply(&mkt, phi), hfset::apply(h, phi)))))
            }));
            (f.clone(), per_h)
        }));
        (t.clone(), per_f)
    }));
    ip.set(b.atom("a"), Value::Set(a.clone()));
    ip.set(b.atom("all_a"), Value::Set(all));
    ip.set(b.atom("mk_a"), Value::Set(mk));
    ip.set(b.atom("rec_a"), Value::Set(rec));
    ip
}

pub fn intended_forall(b: &SpecBundle, n: u32, a: &HfSet) -> Interp2 {
    forall_model(b, n, a, |t| truth(!hfset::dep_product(t).is_empty()))
}

pub fn mutants_forall(b: &SpecBundle, n: u32, a: &HfSet) -> Vec<(String, Interp2)> {
    vec![
        ("all_a false everywhere".into(), forall_model(b, n, a, |_| HfSet::empty())),
        ("all_a true everywhere".into(), forall_model(b, n, a, |_| HfSet::nat(1))),
    ]
}

pub fn verify_forall(ip: &Interp2, b: &SpecBundle) -> SpecVerdict {
    if let Err(v) = check_model(ip, b, &[]) {
        return v;
    }
    let u0 = u0_of(ip);
    let (a, all) = match (val(ip, &b.constant("a")), val(ip, &b.constant("all_a"))) {
        (Ok(a), Ok(al)) => (a, al),
        (Err(e), _) | (_, Err(e)) => return unchecked(e),
    };
    let mut checked = 0;
    for t in functions(&a, &u0).iter() {
        checked += 1;
        let holds = !hfset::apply(&all, t).is_empty();
        if holds != !hfset::dep_product(t).is_empty() {
            return SpecVerdict::Refuted { detail: format!("all_a({}) disagrees with the product", t) };
        }
    }
    SpecVerdict::Verified { checked }
}

// ---------------------------------------------------------------------------
// System-1 axioms

/// `(eq : R → R → *)`.
pub fn axiom_eq(r: &Term, eq: &Term, star: &Term) -> Statement1 {
    Statement1::new(eq, &mk_arrow(r.clone(), mk_arrow(r.clone(), star.clone())))
}

fn fresh_vars(avoid: &[&Term], k: usize) -> Vec<VarId> {
    let mut used = crate::binding::VarSet::new();
    for t in avoid {
        used.extend(free_vars(t));
    }
    (0..).filter(|v| !used.contains(v)).take(k).collect()
}

/// `(sub : (t:R) → (u:R) → eq t u → (P : R → *) → P t → P u)` with
/// `t, u, P` the least variables not free in `R`.
pub fn axiom_sub(r: &Term, eq: &Term, sub: &Term, star: &Term) -> Statement1 {
    let vs = fresh_vars(&[r, eq, star], 3);
    let (t, uu, p) = (Term::Var(vs[0]), Term::Var(vs[1]), Term::Var(vs[2]));
    let tail = mk_pi(
        vs[2],
        mk_arrow(r.clone(), star.clone()),
        mk_arrow(Term::beta(p.clone(), t.clone()), Term::beta(p, uu.clone())),
    );
    let body = mk_pi(vs[0], r.clone(), mk_pi(vs[1], r.clone(), mk_arrow(Term::apps(eq.clone(), [t, uu]), tail)));
    Statement1::new(sub, &body)
}

/// `(beta : (x:R) → (λxRS)x → S)`; requires `x ∉ F(R)`.
pub fn axiom_beta(r: &Term, s: &Term, x: VarId, beta: &Term) -> Option<Statement1> {
    if free_vars(r).contains(&x) {
        return None;
    }
    let redex = Term::beta(Term::lam(x, r.clone(), s.clone()), Term::Var(x));
    Some(Statement1::new(beta, &mk_pi(x, r.clone(), mk_arrow(redex, s.clone()))))
}

/// `(eq : (r:□) → r → r → *)` with `r` the least variable not free in `□`, `*`.
pub fn axiom_eq_poly(eq: &Term, boxc: &Term, star: &Term) -> Statement1 {
    let r = least_var_not_free(&[boxc, star]);
    let rv = Term::Var(r);
    Statement1::new(eq, &mk_pi(r, boxc.clone(), mk_arrow(rv.clone(), mk_arrow(rv, star.clone()))))
}

/// `(beta : (r:□) → (x:r) → (λxrS)x → S)`; `r` avoids `x` and `F(S)`.
pub fn axiom_beta_poly(s: &Term, x: VarId, beta: &Term, boxc: &Term) -> Statement1 {
    let r = fresh_vars(&[s, &Term::Var(x), boxc], 1)[0];
    let rv = Term::Var(r);
    let redex = Term::beta(Term::lam(x, rv.clone(), s.clone()), Term::Var(x));
    Statement1::new(beta, &mk_pi(r, boxc.clone(), mk_pi(x, rv, mk_arrow(redex, s.clone()))))
}

/// The fully polymorphic β axiom `(beta : (s:□) → (r:□) → (x:r) → (λxrs)x → s)`.
/// Applying it to a term with `x` free renames the bound `x`; kept as a
/// negative fixture.
pub fn axiom_double_beta(beta: &Term, boxc: &Term) -> (Statement1, VarId, VarId, VarId) {
    let vs = fresh_vars(&[boxc], 3);
    let (s, r, x) = (vs[0], vs[1], vs[2]);
    let redex = Term::beta(Term::lam(x, Term::Var(r), Term::Var(s)), Term::Var(x));
    let t = mk_pi(s, boxc.clone(), mk_pi(r, boxc.clone(), mk_pi(x, Term::Var(r), mk_arrow(redex, Term::Var(s)))));
    (Statement1::new(beta, &t), s, r, x)
}

// ---------------------------------------------------------------------------
// Choice

/// `(x:□) → ¬¬x → x` over the given `□` and `*` constants.
pub fn choice_term(boxc: &Term, star: &Term) -> Term {
    let logic = Logic1::new(star.clone());
    let x = least_var_not_free(&[boxc, star]);
    let xv = Term::Var(x);
    mk_pi(x, boxc.clone(), mk_arrow(logic.neg(logic.neg(xv.clone())), xv))
}

/// Members of `⟦(x:□) → ¬¬x → x⟧` with `⟦*⟧ = {∅,{∅}}` and `⟦□⟧ = box_value`.
pub fn choice_term_enumerate(box_value: &HfSet) -> Result<Vec<HfSet>, EvalError> {
    let (star, boxc) = (Term::Const(0), Term::Const(1));
    let a = Assignment::from_pairs([
        (Atom::Const(0), HfSet::from_vec(vec![HfSet::empty(), HfSet::nat(1)])),
        (Atom::Const(1), box_value.clone()),
    ]);
    let v = Evaluator::default().eval(&a, &choice_term(&boxc, &star))?;
    Ok(v.elements().to_vec())
}

/// `φ(∅) = ∅` and `φ(r)(∅) ∈ r` for every nonempty `r ∈ □`.
pub fn chooses(phi: &HfSet, box_value: &HfSet) -> bool {
    box_value.iter().all(|r| {
        let pr = hfset::apply(phi, r);
        if r.is_empty() {
            pr.is_empty()
        } else {
            hfset::lookup(&pr, &HfSet::empty()).is_some_and(|c| r.contains(&c))
        }
    })
}

/// Renders a term with the bundle's names.
pub fn render_in(b: &SpecBundle, t: &Term) -> String {
    print_term(t, System::Two, Some(&b.table()))
}
