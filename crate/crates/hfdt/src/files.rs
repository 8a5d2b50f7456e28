//! Text formats read and written by the command-line tool.
//!
//! Hypothesis files (`.dtt`) hold one item per line: `# comment`, blank,
//! `atom NAME = TERM`, or a statement. Derivation files add `scope` and
//! `step` lines whose fields are separated by `::`.

use std::collections::BTreeMap;

use hfdt_core::hfset::{self, HfError, HfSet};
use hfdt_core::infer2::{Derivation, Rule, RuleData, Scope, ScopeKind, Step};
use hfdt_core::semantics1::Atom;
use hfdt_core::syntax::sugar::{parse_statement, parse_term, print_statement, print_term, AtomTable, StmtKind};
use hfdt_core::syntax::{SyntaxError, System, Term};
use hfdt_core::system2::{CarrierSpec, Interp2, Statement2, UniverseSpec, Universes, Value};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}: {source}")]
    Syntax { line: usize, source: SyntaxError },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("pool: {0}")]
    Pool(String),
    #[error("set literal: {0}")]
    Set(#[from] HfError),
    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("universes: {0}")]
    Universe(String),
}

pub type Parsed = (Term, StmtKind, Term);

fn content_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Handles an `atom NAME = TERM` line; returns `false` for other lines.
fn atom_line(line: &str, ln: usize, system: System, table: &mut AtomTable) -> Result<bool, FileError> {
    let Some(rest) = line.strip_prefix("atom ") else { return Ok(false) };
    let (name, term) = rest
        .split_once('=')
        .ok_or_else(|| FileError::Format { line: ln, msg: "expected 'atom NAME = TERM'".into() })?;
    let name = name.trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(FileError::Format { line: ln, msg: format!("bad atom name '{}'", name) });
    }
    let t = parse_term(term.trim(), system, &mut AtomTable::new()).map_err(|e| FileError::Syntax { line: ln, source: e })?;
    table.bind(name, t);
    Ok(true)
}

/// Reads a hypothesis file, extending `table` with its atom declarations.
pub fn parse_dtt(src: &str, system: System, table: &mut AtomTable) -> Result<Vec<Parsed>, FileError> {
    let mut out = Vec::new();
    for (ln, line) in content_lines(src) {
        if atom_line(line, ln, system, table)? {
            continue;
        }
        out.push(parse_statement(line, system, table).map_err(|e| FileError::Syntax { line: ln, source: e })?);
    }
    Ok(out)
}

/// Reads a single term: atom declarations followed by exactly one term line.
pub fn parse_term_input(src: &str, system: System, table: &mut AtomTable) -> Result<Term, FileError> {
    let mut term = None;
    for (ln, line) in content_lines(src) {
        if atom_line(line, ln, system, table)? {
            continue;
        }
        if term.is_some() {
            return Err(FileError::Format { line: ln, msg: "expected a single term".into() });
        }
        term = Some(parse_term(line, system, table).map_err(|e| FileError::Syntax { line: ln, source: e })?);
    }
    term.ok_or(FileError::Format { line: 0, msg: "no term given".into() })
}

/// Reads a single statement, with optional atom declarations.
pub fn parse_statement_input(src: &str, system: System, table: &mut AtomTable) -> Result<Parsed, FileError> {
    let mut stmts = parse_dtt(src, system, table)?;
    match stmts.len() {
        1 => Ok(stmts.pop().unwrap()),
        n => Err(FileError::Format { line: 0, msg: format!("expected one statement, found {}", n) }),
    }
}

pub fn to_statement2((l, k, r): Parsed) -> Statement2 {
    Statement2::new(k, l, r)
}

/// `atom` header lines for the names in `table`, sorted by name.
pub fn atom_header(table: &AtomTable, system: System) -> Vec<String> {
    let mut v: Vec<String> = table
        .iter()
        .map(|(n, t)| format!("atom {} = {}", n, print_term(t, system, None)))
        .collect();
    v.sort();
    v
}

// ---------------------------------------------------------------------------
// Derivations

/// Serializes a derivation, one `scope` or `step` line each.
pub fn render_derivation(d: &Derivation, table: Option<&AtomTable>) -> String {
    let st = |s: &Statement2| s.render(table);
    let mut out = String::new();
    for (i, sc) in d.scopes.iter().enumerate().skip(1) {
        match &sc.kind {
            ScopeKind::Extend(s) => {
                out.push_str(&format!("scope {} extend {} :: {}\n", i, sc.parent.unwrap_or(0), st(s)));
            }
            ScopeKind::Lemma(hs) => {
                let hs: Vec<String> = hs.iter().map(st).collect();
                out.push_str(&format!("scope {} lemma :: {}\n", i, hs.join(" ;; ")));
            }
            ScopeKind::Gamma => out.push_str(&format!("scope {} gamma\n", i)),
        }
    }
    for (i, step) in d.steps.iter().enumerate() {
        let prem = if step.premises.is_empty() {
            "-".to_string()
        } else {
            step.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        };
        let data = match &step.data {
            RuleData::None => "-".to_string(),
            RuleData::Ab { x, q, m, n } => {
                let xs = print_term(&Term::Var(*x), System::Two, table);
                format!("x={} m={} n={} q={}", xs, m, n, print_term(q, System::Two, table))
            }
        };
        out.push_str(&format!("step {} {} {} {} :: {} :: {}\n", i, step.scope, step.rule.name(), prem, data, st(&step.conclusion)));
    }
    out
}

fn parse_stmt2(text: &str, ln: usize, table: &mut AtomTable) -> Result<Statement2, FileError> {
    parse_statement(text.trim(), System::Two, table)
        .map(to_statement2)
        .map_err(|e| FileError::Syntax { line: ln, source: e })
}

fn num(s: &str, ln: usize) -> Result<usize, FileError> {
    s.parse().map_err(|_| FileError::Format { line: ln, msg: format!("expected a number, found '{}'", s) })
}

/// Reads a derivation file. Indices on `scope`/`step` lines must be
/// consecutive from 1 and 0 respectively.
pub fn parse_derivation(src: &str, table: &mut AtomTable) -> Result<Derivation, FileError> {
    let mut d = Derivation::new();
    for (ln, line) in content_lines(src) {
        if atom_line(line, ln, System::Two, table)? {
            continue;
        }
        let fmt_err = |msg: &str| FileError::Format { line: ln, msg: msg.to_string() };
        let parts: Vec<&str> = line.split("::").collect();
        let head: Vec<&str> = parts[0].split_whitespace().collect();
        match head.first().copied() {
            Some("scope") => {
                if head.len() < 3 || num(head[1], ln)? != d.scopes.len() {
                    return Err(fmt_err("scope lines must be numbered consecutively from 1"));
                }
                let kind = match (head[2], parts.len()) {
                    ("extend", 2) if head.len() == 4 => {
                        let parent = num(head[3], ln)?;
                        d.scopes.push(Scope { parent: Some(parent), kind: ScopeKind::Extend(parse_stmt2(parts[1], ln, table)?) });
                        continue;
                    }
                    ("lemma", 2) => {
                        let hs = parts[1]
                            .split(";;")
                            .filter(|s| !s.trim().is_empty())
                            .map(|s| parse_stmt2(s, ln, table))
                            .collect::<Result<Vec<_>, _>>()?;
                        ScopeKind::Lemma(hs)
                    }
                    _ => return Err(fmt_err("expected 'scope K extend P :: STMT' or 'scope K lemma :: STMT ;; ...'")),
                };
                d.scopes.push(Scope { parent: None, kind });
            }
            Some("step") => {
                if head.len() != 5 || parts.len() != 3 {
                    return Err(fmt_err("expected 'step I SCOPE RULE PREMISES :: DATA :: STMT'"));
                }
                if num(head[1], ln)? != d.steps.len() {
                    return Err(fmt_err("step lines must be numbered consecutively from 0"));
                }
                let scope = num(head[2], ln)?;
                let rule = Rule::from_name(head[3]).ok_or_else(|| fmt_err("unknown rule"))?;
                let premises = if head[4] == "-" {
                    Vec::new()
                } else {
                    head[4].split(',').map(|p| num(p, ln)).collect::<Result<Vec<_>, _>>()?
                };
                let data = parse_rule_data(parts[1].trim(), ln, table)?;
                let conclusion = parse_stmt2(parts[2], ln, table)?;
                d.steps.push(Step { conclusion, rule, premises, scope, data });
            }
            _ => return Err(fmt_err("expected a 'scope', 'step' or 'atom' line")),
        }
    }
    Ok(d)
}

fn parse_rule_data(text: &str, ln: usize, table: &mut AtomTable) -> Result<RuleData, FileError> {
    if text == "-" {
        return Ok(RuleData::None);
    }
    let bad = || FileError::Format { line: ln, msg: "expected 'x=VAR m=M n=N q=TERM'".into() };
    let (pre, q) = text.split_once("q=").ok_or_else(bad)?;
    let mut fields = BTreeMap::new();
    for kv in pre.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(bad)?;
        fields.insert(k, v);
    }
    let x = match parse_term(fields.get("x").ok_or_else(bad)?, System::Two, table) {
        Ok(Term::Var(x)) => x,
        _ => return Err(bad()),
    };
    let m = num(fields.get("m").ok_or_else(bad)?, ln)? as u32;
    let n = num(fields.get("n").ok_or_else(bad)?, ln)? as u32;
    let q = parse_term(q.trim(), System::Two, table).map_err(|e| FileError::Syntax { line: ln, source: e })?;
    Ok(RuleData::Ab { x, q, m, n })
}

// ---------------------------------------------------------------------------
// Pools, universes and interpretations

/// Parses a pool spec: `rankK` for every set of rank at most `K`, or
/// `sets:S1;S2;...` with set literals.
pub fn parse_pool(spec: &str) -> Result<Vec<HfSet>, FileError> {
    if let Some(k) = spec.strip_prefix("rank") {
        let k: u32 = k.parse().map_err(|_| FileError::Pool(format!("bad rank in '{}'", spec)))?;
        return Ok(hfset::enumerate_pool(k)?);
    }
    if let Some(list) = spec.strip_prefix("sets:") {
        let mut v = list
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<HfSet>())
            .collect::<Result<Vec<_>, _>>()?;
        v.sort();
        v.dedup();
        return Ok(v);
    }
    Err(FileError::Pool(format!("expected 'rankK' or 'sets:...', found '{}'", spec)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CarrierToml {
    #[serde(default)]
    open: bool,
    #[serde(default)]
    members: Vec<String>,
    /// `pool = "rankK"` adds every set of the rank pool.
    #[serde(default)]
    pool: Option<String>,
    /// Lower sorts whose carrier is added as an element.
    #[serde(default)]
    lower: Vec<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UniversesToml {
    #[serde(default)]
    proof_irrelevant: bool,
    #[serde(default)]
    prop_extensional: bool,
    #[serde(default)]
    max_carrier: usize,
    carrier: Vec<CarrierToml>,
}

/// Reads a universe declaration:
///
/// ```toml
/// proof_irrelevant = true
/// [[carrier]]            # u0
/// [[carrier]]            # u1
/// members = ["{0,{0}}"]
/// lower = [0]
/// [[carrier]]
/// open = true
/// ```
pub fn parse_universes(src: &str) -> Result<Universes, FileError> {
    let u: UniversesToml = toml::from_str(src)?;
    let mut carriers = Vec::new();
    for c in u.carrier {
        if c.open {
            carriers.push(CarrierSpec::Open);
            continue;
        }
        let mut members = c.members.iter().map(|m| m.parse::<HfSet>()).collect::<Result<Vec<_>, _>>()?;
        if let Some(p) = &c.pool {
            members.extend(parse_pool(p)?);
        }
        carriers.push(CarrierSpec::Sets { members, lower_as_elements: c.lower });
    }
    let spec = UniverseSpec {
        carriers,
        proof_irrelevant: u.proof_irrelevant,
        prop_extensional: u.prop_extensional,
        max_carrier: u.max_carrier,
    };
    Universes::build(&spec).map_err(|e| FileError::Universe(e.to_string()))
}

/// Reads an interpretation: a TOML table from atom names (or `cK`/`vK`) to
/// set literals. Names resolve through `table`.
pub fn parse_interp(src: &str, universes: Universes, system: System, table: &mut AtomTable) -> Result<Interp2, FileError> {
    let raw: BTreeMap<String, String> = toml::from_str(src)?;
    let mut ip = Interp2::new(std::sync::Arc::new(universes));
    for (name, lit) in raw {
        let t = parse_term(&name, system, table).map_err(|e| FileError::Syntax { line: 0, source: e })?;
        let atom = Atom::of(&t).ok_or_else(|| FileError::Format { line: 0, msg: format!("'{}' is not an atom", name) })?;
        if let Term::Const(k) = t {
            if !matches!(hfdt_core::syntax::Const2::decode(k), hfdt_core::syntax::Const2::User(_)) {
                return Err(FileError::Format { line: 0, msg: format!("'{}' is a sort or operator", name) });
            }
        }
        ip.set(atom, Value::Set(lit.parse()?));
    }
    Ok(ip)
}

/// Renders a statement in either system with names from `table`.
pub fn render_parsed(p: &Parsed, system: System, table: &AtomTable) -> String {
    print_statement(&p.0, p.1, &p.2, system, Some(table))
}
