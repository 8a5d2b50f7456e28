//! Command-line front end.

use std::io::{Read, Write};
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use hfdt_core::binding::{alpha_eq, free_vars, substitute};
use hfdt_core::hfset::HfSet;
use hfdt_core::infer1::{search_subject, Gamma1, Infer1, SearchResult};
use hfdt_core::infer2::{
    check_derivation, derivable_types, is_legal_context, search_derivation, Gamma2, Legality, Preset,
};
use hfdt_core::semantics1::{atoms_of, Atom, Evaluator, Statement1, Verdict};
use hfdt_core::speclib::{self, SpecBundle, SpecVerdict};
use hfdt_core::syntax::sugar::{print_term, AtomTable};
use hfdt_core::syntax::{parse_raw, render_raw, System, Term};
use hfdt_core::system2::{beta_reduce_all, head_alpha_statements, Interp2, Statement2};
use itertools::Itertools;

use crate::config::{Format, Overrides, RunConfig};
use crate::files::{self, FileError};
use crate::report::{Exit, Report};

#[derive(Debug, Parser)]
#[command(name = "hfdt", version, about = "Type inference, derivation checking and finite models for two dependent type systems")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Type system: 1 (ρ-terms, no sorts) or 2 (sorts and product operators).
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub system: Option<u8>,
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Set pool: `rankK` or `sets:S1;S2;...`.
    #[arg(long, global = true)]
    pub pool: Option<String>,
    /// Bind a name before parsing inputs, e.g. `--atom bot=c10`.
    #[arg(long = "atom", global = true, value_parser = parse_kv)]
    pub atoms: Vec<(String, String)>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Reduction hypothesis preset: pure, lean-like or extensional.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub limit: Option<usize>,
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected NAME=TERM, got '{}'", s))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a sugared term or statement and print its raw form.
    Parse { input: String },
    /// Parse a raw term and print it in sugared form.
    Print { input: String },
    /// Free variables of a term.
    Fv { input: String },
    /// `S[T/x]`.
    Subst { s: String, t: String, x: String },
    /// α-equivalence of two terms.
    AlphaEq { a: String, b: String },
    /// Types of a term under Γ.
    Infer {
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        term: String,
    },
    /// System 1: decide Γ ⊢ stmt. System 2: check a derivation file.
    Check {
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        stmt: Option<String>,
        #[arg(long)]
        derivation: Option<String>,
    },
    /// System 1: find a subject of `--goal`. System 2: find a derivation of `--stmt`.
    Search {
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        goal: Option<String>,
        #[arg(long)]
        stmt: Option<String>,
    },
    /// β-normalize a term; optionally list head-α statements.
    Reduce {
        input: String,
        #[arg(long)]
        head_alpha: bool,
        /// Step limit for normalization.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// System 1: enumerate pool models of Γ. System 2: check an interpretation.
    Models {
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        universes: Option<String>,
        #[arg(long)]
        interp: Option<String>,
    },
    /// System 1: pool-relative semantic consequence Γ ⊨ stmt.
    Consequence {
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        stmt: String,
    },
    /// Verify a specification bundle on its intended model and mutants.
    VerifySpec {
        /// false, eq, product, and, forall or choice.
        name: String,
        /// Carrier size (|a| or |□|).
        #[arg(long)]
        size: Option<usize>,
        /// Second carrier size for products.
        #[arg(long)]
        size_b: Option<usize>,
        /// Sort indices l for the product eliminators.
        #[arg(long, value_delimiter = ',')]
        rec_sorts: Option<Vec<u32>>,
        /// Print the bundle as a hypothesis file instead of verifying.
        #[arg(long)]
        emit: bool,
    },
    /// System 2: search for a legal enumeration of a context.
    Legal {
        #[arg(long)]
        gamma: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Parse { .. } => "parse",
            Command::Print { .. } => "print",
            Command::Fv { .. } => "fv",
            Command::Subst { .. } => "subst",
            Command::AlphaEq { .. } => "alpha-eq",
            Command::Infer { .. } => "infer",
            Command::Check { .. } => "check",
            Command::Search { .. } => "search",
            Command::Reduce { .. } => "reduce",
            Command::Models { .. } => "models",
            Command::Consequence { .. } => "consequence",
            Command::VerifySpec { .. } => "verify-spec",
            Command::Legal { .. } => "legal",
        }
    }
}

/// Failure that maps to an exit code with a message on standard error.
#[derive(Debug)]
struct Fail(Exit, String);

impl From<FileError> for Fail {
    fn from(e: FileError) -> Fail {
        Fail(Exit::Usage, e.to_string())
    }
}

type Res<T> = Result<T, Fail>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(Fail(Exit::Usage, msg.into()))
}

struct Ctx<'a> {
    cfg: RunConfig,
    system: System,
    table: AtomTable,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    /// `-` reads standard input, an existing path reads the file, anything
    /// else is taken as inline text.
    fn read(&mut self, arg: &str) -> Res<String> {
        if arg == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| Fail(Exit::Usage, format!("stdin: {}", e)))?;
            return Ok(s);
        }
        if Path::new(arg).is_file() {
            return std::fs::read_to_string(arg).map_err(|e| Fail(Exit::Usage, format!("{}: {}", arg, e)));
        }
        Ok(arg.to_string())
    }

    fn term(&mut self, arg: &str) -> Res<Term> {
        let src = self.read(arg)?;
        Ok(files::parse_term_input(&src, self.system, &mut self.table)?)
    }

    fn statement(&mut self, arg: &str) -> Res<files::Parsed> {
        let src = self.read(arg)?;
        Ok(files::parse_statement_input(&src, self.system, &mut self.table)?)
    }

    fn gamma(&mut self, arg: Option<&str>) -> Res<Vec<files::Parsed>> {
        match arg {
            None => Ok(Vec::new()),
            Some(a) => {
                let src = self.read(a)?;
                Ok(files::parse_dtt(&src, self.system, &mut self.table)?)
            }
        }
    }

    fn gamma1(&mut self, arg: Option<&str>) -> Res<Gamma1> {
        Ok(self.gamma(arg)?.iter().map(|(l, _, r)| Statement1::new(l, r)).collect())
    }

    fn gamma2(&mut self, arg: Option<&str>) -> Res<Gamma2> {
        Ok(self.gamma(arg)?.into_iter().map(files::to_statement2).collect())
    }

    fn pool(&self) -> Res<Vec<HfSet>> {
        Ok(files::parse_pool(&self.cfg.pool)?)
    }

    fn show(&self, t: &Term) -> String {
        print_term(t, self.system, Some(&self.table))
    }

    fn show2(&self, st: &Statement2) -> String {
        st.render(Some(&self.table))
    }

    fn need(&self, system: System, what: &str) -> Res<()> {
        if self.system != system {
            return usage(format!("{} needs --system={}", what, if system == System::One { 1 } else { 2 }));
        }
        Ok(())
    }

    fn preset(&self) -> Res<Preset> {
        Preset::from_name(&self.cfg.preset).map_or_else(|| usage(format!("unknown preset '{}'", self.cfg.preset)), Ok)
    }
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run(args: &[String], stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Usage.code() } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, stdin) {
        Ok((report, cfg)) => {
            let _ = out.write_all(report.render(&cfg).as_bytes());
            report.exit.code()
        }
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "hfdt: {}", msg);
            code.code()
        }
    }
}

fn load_config(g: &GlobalArgs) -> Res<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => {
            let src = std::fs::read_to_string(p).map_err(|e| Fail(Exit::Usage, format!("{}: {}", p, e)))?;
            RunConfig::from_toml(&src).map_err(|e| Fail(Exit::Usage, format!("{}: {}", p, e)))?
        }
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        system: g.system,
        pool: g.pool.clone(),
        atoms: g.atoms.clone(),
        depth: g.depth,
        budget: g.budget,
        preset: g.preset.clone(),
        format: g.format,
        limit: g.limit,
    });
    if !(1..=2).contains(&cfg.system) {
        return usage("system must be 1 or 2");
    }
    Ok(cfg)
}

fn execute(cli: Cli, stdin: &mut dyn Read) -> Res<(Report, RunConfig)> {
    let cfg = load_config(&cli.global)?;
    let system = if cfg.system == 1 { System::One } else { System::Two };
    let mut table = AtomTable::new();
    for (name, src) in &cfg.atoms {
        let t = hfdt_core::syntax::sugar::parse_term(src, system, &mut AtomTable::new())
            .map_err(|e| Fail(Exit::Usage, format!("atom {}: {}", name, e)))?;
        table.bind(name.clone(), t);
    }
    let mut cx = Ctx { cfg, system, table, stdin };
    let mut rep = Report::new(cli.command.name());
    match &cli.command {
        Command::Parse { input } => cmd_parse(&mut cx, &mut rep, input)?,
        Command::Print { input } => {
            let src = cx.read(input)?;
            let t = parse_raw(src.trim(), system).map_err(|e| Fail(Exit::Usage, e.to_string()))?;
            rep.line(cx.show(&t)).field("term", cx.show(&t));
        }
        Command::Fv { input } => {
            let t = cx.term(input)?;
            let names: Vec<String> = free_vars(&t).into_iter().map(|v| cx.show(&Term::Var(v))).collect();
            rep.line(names.join(" ")).field("free", names.join(","));
        }
        Command::Subst { s, t, x } => {
            let (s, t, x) = (cx.term(s)?, cx.term(t)?, cx.term(x)?);
            let Term::Var(x) = x else { return usage("the substituted atom must be a variable") };
            let r = substitute(&s, &t, x);
            rep.line(cx.show(&r)).field("result", cx.show(&r));
        }
        Command::AlphaEq { a, b } => {
            let (a, b) = (cx.term(a)?, cx.term(b)?);
            let eq = alpha_eq(&a, &b);
            rep.line(eq.to_string()).field("alpha_eq", eq);
            if !eq {
                rep.exit(Exit::Refuted);
            }
        }
        Command::Infer { gamma, term } => cmd_infer(&mut cx, &mut rep, gamma.as_deref(), term)?,
        Command::Check { gamma, stmt, derivation } => {
            cmd_check(&mut cx, &mut rep, gamma.as_deref(), stmt.as_deref(), derivation.as_deref())?
        }
        Command::Search { gamma, goal, stmt } => cmd_search(&mut cx, &mut rep, gamma.as_deref(), goal.as_deref(), stmt.as_deref())?,
        Command::Reduce { input, head_alpha, steps } => cmd_reduce(&mut cx, &mut rep, input, *head_alpha, *steps)?,
        Command::Models { gamma, universes, interp } => {
            cmd_models(&mut cx, &mut rep, gamma.as_deref(), universes.as_deref(), interp.as_deref())?
        }
        Command::Consequence { gamma, stmt } => cmd_consequence(&mut cx, &mut rep, gamma.as_deref(), stmt)?,
        Command::VerifySpec { name, size, size_b, rec_sorts, emit } => {
            cmd_verify_spec(&mut cx, &mut rep, name, *size, *size_b, rec_sorts.clone(), *emit)?
        }
        Command::Legal { gamma } => {
            cx.need(System::Two, "legal")?;
            let g = cx.gamma2(Some(gamma))?;
            match is_legal_context(&g, cx.cfg.depth, cx.cfg.budget) {
                Ok(Legality::Legal { order, .. }) => {
                    rep.line("LEGAL");
                    for st in &order {
                        rep.line(format!("  {}", cx.show2(st)));
                    }
                    rep.field("legal", true);
                }
                Ok(Legality::NotShownLegal { reason }) => {
                    rep.line(format!("NOT SHOWN LEGAL: {} (depth {})", reason, cx.cfg.depth)).field("legal", false).exit(Exit::Refuted);
                }
                Err(b) => {
                    rep.line(format!("budget of {} exhausted", b.0)).exit(Exit::Budget);
                }
            }
        }
    }
    Ok((rep, cx.cfg))
}

fn cmd_parse(cx: &mut Ctx<'_>, rep: &mut Report, input: &str) -> Res<()> {
    let src = cx.read(input)?;
    let mut probe = cx.table.clone();
    if let Ok(t) = files::parse_term_input(&src, cx.system, &mut probe) {
        cx.table = probe;
        rep.line(render_raw(&t)).field("raw", render_raw(&t)).field("size", t.size());
        return Ok(());
    }
    let (l, k, r) = cx.statement(input)?;
    let raw = format!("{} {} {}", render_raw(&l), k.symbol(), render_raw(&r));
    rep.line(raw.clone()).field("raw", raw);
    Ok(())
}

fn cmd_infer(cx: &mut Ctx<'_>, rep: &mut Report, gamma: Option<&str>, term: &str) -> Res<()> {
    match cx.system {
        System::One => {
            let g = cx.gamma1(gamma)?;
            let t = cx.term(term)?;
            let types = Infer1::default().typing_set(&g, &t);
            for p in &types {
                rep.line(cx.show(p.term()));
            }
            rep.field("types", types.len());
            if types.is_empty() {
                rep.line("no type").exit(Exit::Refuted);
            }
        }
        System::Two => {
            let g = cx.gamma2(gamma)?;
            let t = cx.term(term)?;
            match derivable_types(&g, &t, cx.cfg.depth, cx.cfg.budget) {
                Ok(types) => {
                    for p in &types {
                        rep.line(cx.show(p));
                    }
                    rep.field("types", types.len());
                    if types.is_empty() {
                        rep.line(format!("no type found <= depth {}", cx.cfg.depth)).exit(Exit::Budget);
                    }
                }
                Err(b) => {
                    rep.line(format!("budget of {} exhausted", b.0)).exit(Exit::Budget);
                }
            }
        }
    }
    Ok(())
}

fn cmd_check(cx: &mut Ctx<'_>, rep: &mut Report, gamma: Option<&str>, stmt: Option<&str>, derivation: Option<&str>) -> Res<()> {
    match (cx.system, stmt, derivation) {
        (System::One, Some(s), None) => {
            let g = cx.gamma1(gamma)?;
            let (l, _, r) = cx.statement(s)?;
            let st = Statement1::new(&l, &r);
            let ok = Infer1::default().derives(&g, &st);
            rep.line(if ok { "DERIVABLE" } else { "NOT DERIVABLE" }).field("derivable", ok);
            if !ok {
                rep.exit(Exit::Refuted);
            }
        }
        (System::Two, None, Some(dpath)) => {
            let g = cx.gamma2(gamma)?;
            let preset = cx.preset()?;
            let src = cx.read(dpath)?;
            let d = files::parse_derivation(&src, &mut cx.table)?;
            let v = check_derivation(&g, &d, preset);
            if v.valid {
                let root = v.root.as_ref().map(|s| cx.show2(s)).unwrap_or_default();
                rep.line(format!("VALID [{}] {}", preset, root));
            } else {
                rep.line(format!("INVALID [{}]", preset));
                for (i, e) in &v.diagnostics {
                    rep.line(format!("  step {}: {}", i.map_or("-".to_string(), |i| i.to_string()), e));
                }
                rep.exit(Exit::Refuted);
            }
            rep.field("valid", v.valid).field("preset", preset).field("steps", d.steps.len());
        }
        (System::One, _, _) => return usage("system 1 check takes --stmt"),
        (System::Two, _, _) => return usage("system 2 check takes --derivation"),
    }
    Ok(())
}

fn cmd_search(cx: &mut Ctx<'_>, rep: &mut Report, gamma: Option<&str>, goal: Option<&str>, stmt: Option<&str>) -> Res<()> {
    let depth = cx.cfg.depth;
    match (cx.system, goal, stmt) {
        (System::One, Some(goal), None) => {
            let g = cx.gamma1(gamma)?;
            let p = cx.term(goal)?;
            match search_subject(&g, &p, depth) {
                SearchResult::Found(t) => {
                    rep.line(format!("FOUND {}", cx.show(&t))).field("subject", cx.show(&t));
                }
                SearchResult::NotFound { depth } => {
                    rep.line(format!("not found ≤ depth {}", depth)).field("found", false).exit(Exit::Budget);
                }
            }
        }
        (System::Two, None, Some(s)) => {
            let g = cx.gamma2(gamma)?;
            let goal = files::to_statement2(cx.statement(s)?);
            match search_derivation(&g, &goal, depth, cx.cfg.budget) {
                Ok(Some(d)) => {
                    for l in files::render_derivation(&d, Some(&cx.table)).lines() {
                        rep.line(l);
                    }
                    rep.field("found", true).field("steps", d.steps.len());
                }
                Ok(None) => {
                    rep.line(format!("not found ≤ depth {}", depth)).field("found", false).exit(Exit::Budget);
                }
                Err(b) => {
                    rep.line(format!("budget of {} exhausted", b.0)).field("found", false).exit(Exit::Budget);
                }
            }
        }
        (System::One, _, _) => return usage("system 1 search takes --goal"),
        (System::Two, _, _) => return usage("system 2 search takes --stmt"),
    }
    Ok(())
}

fn cmd_reduce(cx: &mut Ctx<'_>, rep: &mut Report, input: &str, head_alpha: bool, steps: usize) -> Res<()> {
    let mut t = cx.term(input)?;
    let mut n = 0;
    loop {
        let next = beta_reduce_all(&t);
        let Some(u) = next.into_iter().next() else { break };
        if n == steps {
            rep.line(format!("no normal form within {} steps", steps)).exit(Exit::Budget);
            return Ok(());
        }
        t = u;
        n += 1;
    }
    rep.line(cx.show(&t)).field("normal", cx.show(&t)).field("steps", n);
    if head_alpha {
        let lo = t.max_var().map_or(0, |_| free_vars(&t).iter().next().copied().unwrap_or(0));
        let hi = free_vars(&t).iter().next_back().copied().unwrap_or(0) + 3;
        for st in head_alpha_statements(&t, lo..=hi) {
            rep.line(cx.show2(&st));
        }
    }
    Ok(())
}

fn cmd_models(cx: &mut Ctx<'_>, rep: &mut Report, gamma: Option<&str>, universes: Option<&str>, interp: Option<&str>) -> Res<()> {
    match cx.system {
        System::One => {
            let g: Vec<Statement1> = cx.gamma1(gamma)?.into_iter().collect();
            let pool = cx.pool()?;
            let atoms = gamma_atoms(&g, None);
            let ev = Evaluator::with_guard(cx.cfg.guard);
            let models = ev.enumerate_models(&pool, &atoms, &g).map_err(|e| Fail(Exit::Usage, e.to_string()))?;
            let mut count = 0usize;
            for m in models {
                let m = m.map_err(|e| Fail(Exit::Budget, e.to_string()))?;
                if count < cx.cfg.limit {
                    let row = atoms.iter().map(|a| format!("{}={}", atom_name(&cx.table, *a), m.get(*a))).join(" ");
                    rep.line(row);
                }
                count += 1;
            }
            rep.line(format!("{} models over {} atoms", count, atoms.len())).field("models", count);
        }
        System::Two => {
            let (Some(u), Some(i)) = (universes, interp) else { return usage("system 2 models takes --universes and --interp") };
            let g = cx.gamma2(gamma)?;
            let usrc = cx.read(u)?;
            let isrc = cx.read(i)?;
            let uni = files::parse_universes(&usrc)?;
            for l in uni.capability_report(cx.cfg.guard).to_string().lines() {
                rep.line(format!("# {}", l));
            }
            let ip: Interp2 = files::parse_interp(&isrc, uni, cx.system, &mut cx.table)?;
            let pool = cx.pool()?;
            let mut failed = 0;
            for st in &g {
                let verdict = match ip.satisfies(st, &pool) {
                    Ok(true) => "ok",
                    Ok(false) => {
                        failed += 1;
                        "FAILS"
                    }
                    Err(e) => return Err(Fail(Exit::Budget, e.to_string())),
                };
                rep.line(format!("{}  {}", verdict, cx.show2(st)));
            }
            rep.field("failed", failed);
            if failed > 0 {
                rep.exit(Exit::Refuted);
            }
        }
    }
    Ok(())
}

fn atom_name(table: &AtomTable, a: Atom) -> String {
    table.name_of(&a.term()).map(str::to_string).unwrap_or_else(|| a.to_string())
}

fn gamma_atoms(g: &[Statement1], extra: Option<&Statement1>) -> Vec<Atom> {
    let mut atoms = std::collections::BTreeSet::new();
    for st in g.iter().chain(extra) {
        atoms.extend(atoms_of(st.subject.term()));
        atoms.extend(atoms_of(st.predicate.term()));
    }
    atoms.into_iter().collect()
}

fn cmd_consequence(cx: &mut Ctx<'_>, rep: &mut Report, gamma: Option<&str>, stmt: &str) -> Res<()> {
    cx.need(System::One, "consequence")?;
    let g: Vec<Statement1> = cx.gamma1(gamma)?.into_iter().collect();
    let (l, _, r) = cx.statement(stmt)?;
    let st = Statement1::new(&l, &r);
    let pool = cx.pool()?;
    let atoms = gamma_atoms(&g, Some(&st));
    let ev = Evaluator::with_guard(cx.cfg.guard);
    match ev.check_consequence(&pool, &atoms, &g, &st) {
        Ok(Verdict::Holds { models }) => {
            rep.line(format!("HOLDS relative to pool {} ({} models)", cx.cfg.pool, models))
                .field("holds", true)
                .field("models", models);
        }
        Ok(Verdict::Counterexample(m)) => {
            rep.line(format!("COUNTEREXAMPLE in pool {}", cx.cfg.pool));
            for a in &atoms {
                rep.line(format!("  {} = {}", atom_name(&cx.table, *a), m.get(*a)));
            }
            rep.field("holds", false).exit(Exit::Refuted);
        }
        Err(e) => return Err(Fail(Exit::Budget, e.to_string())),
    }
    Ok(())
}

fn describe(v: &SpecVerdict) -> String {
    match v {
        SpecVerdict::Verified { checked } => format!("VERIFIED ({} checked)", checked),
        SpecVerdict::NotAModel { index, statement } => format!("NOT A MODEL (hypothesis {}: {})", index, statement),
        SpecVerdict::Refuted { detail } => format!("REFUTED ({})", detail),
        SpecVerdict::Unchecked { reason } => format!("UNCHECKED ({})", reason),
    }
}

type Verifier = Box<dyn Fn(&Interp2, &SpecBundle) -> SpecVerdict>;

fn cmd_verify_spec(
    cx: &mut Ctx<'_>,
    rep: &mut Report,
    name: &str,
    size: Option<usize>,
    size_b: Option<usize>,
    rec_sorts: Option<Vec<u32>>,
    emit: bool,
) -> Res<()> {
    if name == "choice" {
        let k = size.unwrap_or(2);
        let boxv = HfSet::nat(k);
        let members = speclib::choice_term_enumerate(&boxv).map_err(|e| Fail(Exit::Budget, e.to_string()))?;
        let all_choose = members.iter().all(|m| speclib::chooses(m, &boxv));
        rep.line(format!("box = {}", boxv));
        for m in members.iter().take(cx.cfg.limit) {
            rep.line(format!("  {}", m));
        }
        rep.line(format!("{} members, all choosing: {}", members.len(), all_choose));
        rep.field("members", members.len()).field("choosing", all_choose);
        if !all_choose {
            rep.exit(Exit::Refuted);
        }
        return Ok(());
    }
    let a = HfSet::nat(size.unwrap_or(match name {
        "eq" => 3,
        _ => 2,
    }));
    let b = HfSet::nat(size_b.unwrap_or(3));
    let sorts = rec_sorts.unwrap_or_else(|| vec![0, 1]);
    let (bundle, intended, mutants, verify): (SpecBundle, Interp2, Vec<(String, Interp2)>, Verifier) =
        match name {
            "false" => {
                let bd = speclib::bundle_false();
                let (i, m) = (speclib::intended_false(&bd), speclib::mutants_false(&bd));
                (bd, i, m, Box::new(speclib::verify_false))
            }
            "eq" => {
                let bd = speclib::bundle_eq(1);
                let (i, m) = (speclib::intended_eq(&bd, 1, &a), speclib::mutants_eq(&bd, 1, &a));
                (bd, i, m, Box::new(speclib::verify_eq))
            }
            "and" => {
                let bd = speclib::bundle_and();
                let (i, m) = (speclib::intended_and(&bd), speclib::mutants_and(&bd));
                (bd, i, m, Box::new(speclib::verify_and))
            }
            "forall" => {
                let bd = speclib::bundle_forall(1);
                let (i, m) = (speclib::intended_forall(&bd, 1, &a), speclib::mutants_forall(&bd, 1, &a));
                (bd, i, m, Box::new(speclib::verify_forall))
            }
            "product" => {
                let bd = speclib::bundle_product_instance(1, &sorts);
                let (i, m) = (speclib::intended_product(&bd, 1, &a, &b), speclib::mutants_product(&bd, 1, &a, &b));
                let pool = speclib::product_pool(&a, &b);
                (bd, i, m, Box::new(move |ip: &Interp2, bd: &SpecBundle| speclib::verify_product(ip, bd, &pool)))
            }
            other => return usage(format!("unknown specification '{}'", other)),
        };
    if emit {
        for l in bundle.render().lines() {
            rep.line(l);
        }
        return Ok(());
    }
    let v = verify(&intended, &bundle);
    rep.line(format!("intended: {}", describe(&v)));
    let mut rejected = 0;
    for (desc, m) in &mutants {
        let mv = verify(m, &bundle);
        if !mv.verified() {
            rejected += 1;
        }
        rep.line(format!("mutant ({}): {}", desc, describe(&mv)));
    }
    rep.field("intended", v.verified()).field("mutants", mutants.len()).field("rejected", rejected);
    if matches!(v, SpecVerdict::Unchecked { .. }) {
        rep.exit(Exit::Budget);
    } else if !v.verified() || rejected < mutants.len() || mutants.is_empty() {
        rep.exit(Exit::Refuted);
    }
    Ok(())
}
