use hfdt_core::infer2::{search_derivation, sort_axioms, Derivation, Gamma2, Rule, RuleData, DEFAULT_SEARCH_BUDGET};
use hfdt_core::syntax::{mk_arrow2, mk_pi2, sort, user_const, Term};
use hfdt_core::system2::Statement2;

pub struct Entry {
    pub name: &'static str,
    pub gamma: Gamma2,
    pub derivation: Derivation,
}

fn c(k: u32) -> Term {
    user_const(k)
}

fn v(k: u32) -> Term {
    Term::Var(k)
}

fn typ(s: Term, p: Term) -> Statement2 {
    Statement2::typing(s, p)
}

fn gamma(stmts: &[Statement2]) -> Gamma2 {
    stmts.iter().cloned().collect()
}

fn searched(name: &'static str, g: &[Statement2], goal: Statement2, depth: usize) -> Entry {
    let gamma = gamma(g);
    let derivation = search_derivation(&gamma, &goal, depth, DEFAULT_SEARCH_BUDGET)
        .expect("budget")
        .unwrap_or_else(|| panic!("{}: no derivation", name));
    Entry { name, gamma, derivation }
}

/// `c2 : c1 ->[0,0] c3`, `c0 : c1`.
fn app_gamma() -> Vec<Statement2> {
    vec![typ(c(0), c(1)), typ(c(2), mk_arrow2(0, 0, c(1), c(3)))]
}

fn app_result() -> Term {
    let Term::Beta(_, fam) = mk_arrow2(0, 0, c(1), c(3)) else { unreachable!() };
    Term::beta((*fam).clone(), c(0))
}

/// `λx:Q. body : (x:Q) ->[m,n] P` from hypotheses `(body : P)` under
/// `(x : Q)`, `(P : u_n)` under `(x : Q)` and `(Q : u_m)`.
fn abstraction(g: &[Statement2], x: u32, q: Term, body: Term, p: Term, m: u32, n: u32) -> Entry {
    let gamma = gamma(g);
    let mut d = Derivation::new();
    let ext = d.extend(0, typ(v(x), q.clone()));
    let b = d.hyp(ext, typ(body.clone(), p.clone()));
    let pk = d.hyp(ext, typ(p.clone(), sort(n)));
    let qk = d.hyp(0, typ(q.clone(), sort(m)));
    d.push(
        0,
        Rule::Ab,
        vec![b, pk, qk],
        typ(Term::lam(x, q.clone(), body), mk_pi2(m, n, x, q.clone(), p)),
        RuleData::Ab { x, q, m, n },
    );
    Entry { name: "", gamma, derivation: d }
}

/// A regression corpus covering every rule, including Cut.
pub fn corpus() -> Vec<Entry> {
    let mut out = Vec::new();

    let g = [typ(c(0), c(1)), typ(c(1), sort(0))];
    let mut d = Derivation::new();
    d.hyp(0, g[0].clone());
    out.push(Entry { name: "hyp", gamma: gamma(&g), derivation: d });

    out.push(searched("app", &app_gamma(), typ(Term::beta(c(2), c(0)), app_result()), 1));

    let g = [typ(c(0), c(1)), Statement2::subreduction(c(1), c(2))];
    out.push(searched("red-predicate", &g, typ(c(0), c(2)), 1));

    let g = [typ(c(0), c(1)), Statement2::reduction(c(0), c(2))];
    let mut d = Derivation::new();
    let a = d.hyp(0, g[0].clone());
    let r = d.hyp(0, g[1].clone());
    d.push(0, Rule::RedSubject, vec![a, r], typ(c(2), c(1)), RuleData::None);
    out.push(Entry { name: "red-subject", gamma: gamma(&g), derivation: d });

    let mut g = app_gamma();
    g.push(Statement2::subreduction(app_result(), c(3)));
    out.push(searched("app-then-beta", &g, typ(Term::beta(c(2), c(0)), c(3)), 2));

    let mut g = app_gamma();
    g.push(Statement2::reduction(Term::beta(c(2), c(0)), c(4)));
    let mut d = Derivation::new();
    let s = d.hyp(0, g[0].clone());
    let f = d.hyp(0, g[1].clone());
    let ap = d.push(0, Rule::App, vec![s, f], typ(Term::beta(c(2), c(0)), app_result()), RuleData::None);
    let red = d.hyp(0, g[2].clone());
    d.push(0, Rule::RedSubject, vec![ap, red], typ(c(4), app_result()), RuleData::None);
    out.push(Entry { name: "app-then-subject", gamma: gamma(&g), derivation: d });

    let g = [typ(c(1), sort(0))];
    let mut e = abstraction(&g, 0, c(1), v(0), c(1), 0, 0);
    e.name = "identity";
    out.push(e);

    let g = [typ(c(0), c(1)), typ(c(1), sort(0)), typ(c(2), sort(0))];
    let mut e = abstraction(&g, 0, c(2), c(0), c(1), 0, 0);
    e.name = "constant-function";
    out.push(e);

    let g: Vec<Statement2> = sort_axioms(2);
    let mut e = abstraction(&g, 0, sort(0), v(0), sort(0), 1, 1);
    e.name = "sort-identity";
    out.push(e);

    // λx:R. λy:R→S. y x, with explicit sort premises.
    let (r, s) = (c(1), c(2));
    let rs = mk_arrow2(0, 0, r.clone(), s.clone());
    let inner = mk_pi2(1, 0, 1, rs.clone(), s.clone());
    let Term::Beta(_, fam) = &rs else { unreachable!() };
    let g = [
        typ(r.clone(), sort(0)),
        typ(s.clone(), sort(0)),
        typ(rs.clone(), sort(1)),
        typ(inner.clone(), sort(2)),
        Statement2::subreduction(Term::beta((**fam).clone(), v(0)), s.clone()),
    ];
    let subj = Term::lam(0, r.clone(), Term::lam(1, rs, Term::beta(v(1), v(0))));
    out.push(searched("tautology", &g, typ(subj, mk_pi2(0, 2, 0, r, inner)), 4));

    let g = [typ(c(0), c(1)), Statement2::subreduction(c(1), c(2))];
    let mut d = Derivation::new();
    let lem = d.lemma(g.to_vec());
    let h1 = d.hyp(lem, g[0].clone());
    let h2 = d.hyp(lem, g[1].clone());
    let l = d.push(lem, Rule::RedPredicate, vec![h1, h2], typ(c(0), c(2)), RuleData::None);
    let g1 = d.hyp(0, g[0].clone());
    d.push(0, Rule::Cut, vec![l, g1], typ(c(0), c(2)), RuleData::None);
    out.push(Entry { name: "cut-lemma", gamma: gamma(&g), derivation: d });

    // Cut whose lemma hypothesis is itself derived by App.
    let mut g = app_gamma();
    g.push(Statement2::subreduction(app_result(), c(3)));
    let goal = typ(Term::beta(c(2), c(0)), c(3));
    let mut d = Derivation::new();
    let lemma_hyp = typ(Term::beta(c(2), c(0)), app_result());
    let lem = d.lemma(vec![lemma_hyp.clone(), g[2].clone()]);
    let h1 = d.hyp(lem, lemma_hyp.clone());
    let h2 = d.hyp(lem, g[2].clone());
    let l = d.push(lem, Rule::RedPredicate, vec![h1, h2], goal.clone(), RuleData::None);
    let s = d.hyp(0, g[0].clone());
    let f = d.hyp(0, g[1].clone());
    let ap = d.push(0, Rule::App, vec![s, f], lemma_hyp, RuleData::None);
    d.push(0, Rule::Cut, vec![l, ap], goal, RuleData::None);
    out.push(Entry { name: "cut-after-app", gamma: gamma(&g), derivation: d });

    out
}

/// Checks an entry and its conclusion in every enumerated model of its
/// hypotheses. Returns the number of models, or a description of the first
/// problem.
pub fn entry_soundness(e: &Entry, cap: usize) -> Result<usize, String> {
    use hfdt_core::infer2::{check_derivation, Preset};
    let verdict = check_derivation(&e.gamma, &e.derivation, Preset::Extensional);
    if !verdict.valid {
        return Err(format!("{}: {:?}", e.name, verdict.diagnostics));
    }
    let root = verdict.root.unwrap();
    let gamma: Vec<Statement2> = e.gamma.iter().cloned().collect();
    let models = super::fleet::models_of(&gamma, &[&root], cap);
    if models.is_empty() {
        return Err(format!("{}: no enumerated model of the hypotheses", e.name));
    }
    let pool = super::fleet::var_pool();
    for ip in &models {
        if !ip.satisfies(&root, &pool).unwrap_or(false) {
            return Err(format!("{}: {} fails under {:?}", e.name, root, ip));
        }
    }
    Ok(models.len())
}
