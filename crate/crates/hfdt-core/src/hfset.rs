//! Hereditarily finite sets in canonical form.
//!
//! Elements are kept sorted under a structural total order (rank, then
//! cardinality, then lexicographic on the sorted element lists), so equality
//! is plain structural equality and rendering is deterministic.
//!
//! Ordered pairs use the Kuratowski encoding `<r,s> = {{r},{r,s}}`. Functions
//! are sets of value-first pairs `<f(x),x>`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

/// Largest rank accepted by [`enumerate_pool`].
pub const MAX_POOL_RANK: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HfError {
    #[error("pool rank {requested} exceeds the ceiling {ceiling}")]
    RankTooLarge { requested: u32, ceiling: u32 },
    #[error("set of {needed} elements exceeds the size guard {limit}")]
    TooLarge { needed: u128, limit: usize },
    #[error("malformed set literal at byte {pos}: {msg}")]
    Parse { pos: usize, msg: &'static str },
}

struct Node {
    rank: u32,
    elems: Vec<HfSet>,
}

/// An immutable hereditarily finite set. Cloning is cheap.
#[derive(Clone)]
pub struct HfSet(Arc<Node>);

impl HfSet {
    pub fn empty() -> HfSet {
        HfSet(Arc::new(Node { rank: 0, elems: Vec::new() }))
    }

    /// Builds a set from arbitrary elements, sorting and deduplicating them.
    pub fn from_vec(mut elems: Vec<HfSet>) -> HfSet {
        elems.sort();
        elems.dedup();
        Self::from_sorted_unchecked(elems)
    }

    fn from_sorted_unchecked(elems: Vec<HfSet>) -> HfSet {
        let rank = elems.iter().map(|e| e.rank() + 1).max().unwrap_or(0);
        HfSet(Arc::new(Node { rank, elems }))
    }

    pub fn singleton(x: HfSet) -> HfSet {
        Self::from_sorted_unchecked(alloc::vec![x])
    }

    /// The unordered pair `{a,b}`.
    pub fn doubleton(a: HfSet, b: HfSet) -> HfSet {
        Self::from_vec(alloc::vec![a, b])
    }

    /// The von Neumann natural `n = {0,...,n-1}`.
    pub fn nat(n: usize) -> HfSet {
        let mut cur = Vec::new();
        for _ in 0..n {
            let next = Self::from_sorted_unchecked(cur.clone());
            cur.push(next);
        }
        Self::from_sorted_unchecked(cur)
    }

    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    pub fn elements(&self) -> &[HfSet] {
        &self.0.elems
    }

    pub fn iter(&self) -> core::slice::Iter<'_, HfSet> {
        self.0.elems.iter()
    }

    pub fn contains(&self, x: &HfSet) -> bool {
        if x.rank() >= self.rank() {
            return false;
        }
        self.0.elems.binary_search(x).is_ok()
    }

    pub fn is_subset(&self, other: &HfSet) -> bool {
        self.len() <= other.len() && self.iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &HfSet) -> HfSet {
        let mut v: Vec<HfSet> = self.0.elems.iter().chain(other.0.elems.iter()).cloned().collect();
        v.sort();
        v.dedup();
        Self::from_sorted_unchecked(v)
    }

    /// `⋃S`: the union of the elements of `self`.
    pub fn big_union(&self) -> HfSet {
        Self::from_vec(self.iter().flat_map(|e| e.iter().cloned()).collect())
    }

    pub fn insert(&self, x: HfSet) -> HfSet {
        match self.0.elems.binary_search(&x) {
            Ok(_) => self.clone(),
            Err(i) => {
                let mut v = self.0.elems.clone();
                v.insert(i, x);
                Self::from_sorted_unchecked(v)
            }
        }
    }

    fn ptr_eq(&self, other: &HfSet) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl PartialEq for HfSet {
    fn eq(&self, other: &HfSet) -> bool {
        self.ptr_eq(other) || (self.rank() == other.rank() && self.0.elems == other.0.elems)
    }
}

impl Eq for HfSet {}

impl Ord for HfSet {
    fn cmp(&self, other: &HfSet) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.len().cmp(&other.len()))
            .then_with(|| self.0.elems.cmp(&other.0.elems))
    }
}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &HfSet) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl core::hash::Hash for HfSet {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        self.len().hash(state);
        for e in self.iter() {
            e.hash(state);
        }
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        if let Some((r, s)) = unpair(self) {
            return write!(f, "<{},{}>", r, s);
        }
        f.write_str("{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            fmt::Display::fmt(e, f)?;
        }
        f.write_str("}")
    }
}

impl FromStr for HfSet {
    type Err = HfError;

    fn from_str(s: &str) -> Result<HfSet, HfError> {
        let mut p = SetParser { src: s.as_bytes(), pos: 0 };
        let v = p.set()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(HfError::Parse { pos: p.pos, msg: "trailing input" });
        }
        Ok(v)
    }
}

struct SetParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl SetParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8, msg: &'static str) -> Result<(), HfError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(HfError::Parse { pos: self.pos, msg })
        }
    }

    fn set(&mut self) -> Result<HfSet, HfError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'0') => {
                self.pos += 1;
                Ok(HfSet::empty())
            }
            Some(b'{') => {
                self.pos += 1;
                let mut elems = Vec::new();
                self.skip_ws();
                if self.src.get(self.pos) == Some(&b'}') {
                    self.pos += 1;
                    return Ok(HfSet::empty());
                }
                loop {
                    elems.push(self.set()?);
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            return Ok(HfSet::from_vec(elems));
                        }
                        _ => return Err(HfError::Parse { pos: self.pos, msg: "expected ',' or '}'" }),
                    }
                }
            }
            Some(b'<') => {
                self.pos += 1;
                let r = self.set()?;
                self.expect(b',', "expected ',' in pair")?;
                let s = self.set()?;
                self.expect(b'>', "expected '>'")?;
                Ok(pair(r, s))
            }
            _ => Err(HfError::Parse { pos: self.pos, msg: "expected '0', '{' or '<'" }),
        }
    }
}

/// Kuratowski pair `{{r},{r,s}}`.
pub fn pair(r: HfSet, s: HfSet) -> HfSet {
    let a = HfSet::singleton(r.clone());
    let b = HfSet::doubleton(r, s);
    HfSet::doubleton(a, b)
}

/// Inverse of [`pair`]; `None` for sets that are not Kuratowski pairs.
pub fn unpair(p: &HfSet) -> Option<(HfSet, HfSet)> {
    match p.elements() {
        [single] if single.len() == 1 => {
            let r = single.elements()[0].clone();
            Some((r.clone(), r))
        }
        [a, b] if a.len() == 1 && b.len() == 2 => {
            let r = &a.elements()[0];
            let (x, y) = (&b.elements()[0], &b.elements()[1]);
            if x == r {
                Some((r.clone(), y.clone()))
            } else if y == r {
                Some((r.clone(), x.clone()))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn pairs(s: &HfSet) -> impl Iterator<Item = (HfSet, HfSet)> + '_ {
    s.iter().filter_map(unpair)
}

/// `dom(S) = {d | ∃r <r,d> ∈ S}`.
pub fn domain(s: &HfSet) -> HfSet {
    HfSet::from_vec(pairs(s).map(|(_, d)| d).collect())
}

/// `ran(S) = {r | ∃d <r,d> ∈ S}`.
pub fn range(s: &HfSet) -> HfSet {
    HfSet::from_vec(pairs(s).map(|(r, _)| r).collect())
}

pub fn inverse(s: &HfSet) -> HfSet {
    HfSet::from_vec(pairs(s).map(|(r, d)| pair(d, r)).collect())
}

/// `R[S] = {r | ∃s∈S <r,s> ∈ R}`.
pub fn image(r: &HfSet, s: &HfSet) -> HfSet {
    HfSet::from_vec(pairs(r).filter(|(_, d)| s.contains(d)).map(|(v, _)| v).collect())
}

/// `R(s) = ⋃R[{s}]`; `∅` outside the domain.
pub fn apply(r: &HfSet, s: &HfSet) -> HfSet {
    let vals: Vec<HfSet> = pairs(r).filter(|(_, d)| d == s).map(|(v, _)| v).collect();
    match vals.len() {
        0 => HfSet::empty(),
        1 => vals.into_iter().next().unwrap(),
        _ => HfSet::from_vec(vals.iter().flat_map(|v| v.iter().cloned()).collect()),
    }
}

/// Value of the unique pair at `x`, if `f` has exactly one.
pub fn lookup(f: &HfSet, x: &HfSet) -> Option<HfSet> {
    let mut found = None;
    for (v, d) in pairs(f) {
        if &d == x {
            if found.is_some() {
                return None;
            }
            found = Some(v);
        }
    }
    found
}

/// `r (R∘S) s ⇔ ∃t (r R t ∧ t S s)`.
pub fn compose(r: &HfSet, s: &HfSet) -> HfSet {
    let rp: Vec<(HfSet, HfSet)> = pairs(r).collect();
    let sp: Vec<(HfSet, HfSet)> = pairs(s).collect();
    let mut out = Vec::new();
    for (a, t) in &rp {
        for (t2, b) in &sp {
            if t == t2 {
                out.push(pair(a.clone(), b.clone()));
            }
        }
    }
    HfSet::from_vec(out)
}

/// Least transitive relation containing the pairs of `r`.
pub fn transitive_closure(r: &HfSet) -> HfSet {
    let mut cur = HfSet::from_vec(r.iter().filter(|e| unpair(e).is_some()).cloned().collect());
    loop {
        let next = cur.union(&compose(&cur, &cur));
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// `F = {<F(x),x> | x ∈ dom F}`.
pub fn is_function(f: &HfSet) -> bool {
    let mut args = Vec::with_capacity(f.len());
    for e in f.iter() {
        match unpair(e) {
            Some((_, d)) => args.push(d),
            None => return false,
        }
    }
    let n = args.len();
    args.sort();
    args.dedup();
    args.len() == n
}

/// Builds the graph `{<v,x>}` from (argument, value) entries.
pub fn graph<I: IntoIterator<Item = (HfSet, HfSet)>>(entries: I) -> HfSet {
    HfSet::from_vec(entries.into_iter().map(|(x, v)| pair(v, x)).collect())
}

/// Number of elements `∏F` would have, saturating.
pub fn dep_product_len(f: &HfSet) -> u128 {
    domain(f)
        .iter()
        .fold(1u128, |acc, x| acc.saturating_mul(apply(f, x).len() as u128))
}

/// `∏F`: all functions on `dom F` choosing `f(x) ∈ F(x)`.
pub fn dep_product(f: &HfSet) -> HfSet {
    dep_product_bounded(f, usize::MAX).expect("unbounded product")
}

/// [`dep_product`] with a size guard on the number of resulting functions.
pub fn dep_product_bounded(f: &HfSet, limit: usize) -> Result<HfSet, HfError> {
    let dom = domain(f);
    let fibres: Vec<(HfSet, HfSet)> = dom.iter().map(|x| (x.clone(), apply(f, x))).collect();
    product_of_fibres(&fibres, limit)
}

/// All choice functions for the given (argument, fibre) list.
pub fn product_of_fibres(fibres: &[(HfSet, HfSet)], limit: usize) -> Result<HfSet, HfError> {
    Ok(HfSet::from_vec(product_of_fibres_vec(fibres, limit)?))
}

/// The choice functions of [`product_of_fibres`] in odometer order (first
/// fibre fastest), without the final sort.
pub fn product_of_fibres_vec(fibres: &[(HfSet, HfSet)], limit: usize) -> Result<Vec<HfSet>, HfError> {
    let needed = fibres.iter().fold(1u128, |acc, (_, v)| acc.saturating_mul(v.len() as u128));
    if needed > limit as u128 {
        return Err(HfError::TooLarge { needed, limit });
    }
    if needed == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(needed as usize);
    let mut idx = alloc::vec![0usize; fibres.len()];
    loop {
        out.push(HfSet::from_vec(
            fibres
                .iter()
                .zip(&idx)
                .map(|((x, vs), &i)| pair(vs.elements()[i].clone(), x.clone()))
                .collect(),
        ));
        let mut k = 0;
        loop {
            if k == fibres.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < fibres[k].1.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Every subset of `s`, in canonical order.
pub fn powerset(s: &HfSet) -> Vec<HfSet> {
    let elems = s.elements();
    let mut out = Vec::with_capacity(1 << elems.len());
    for mask in 0u64..(1u64 << elems.len()) {
        let sub = elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, e)| e.clone())
            .collect();
        out.push(HfSet::from_vec(sub));
    }
    out.sort();
    out
}

/// All sets of rank at most `max_rank`, in canonical order.
pub fn enumerate_pool(max_rank: u32) -> Result<Vec<HfSet>, HfError> {
    if max_rank > MAX_POOL_RANK {
        return Err(HfError::RankTooLarge { requested: max_rank, ceiling: MAX_POOL_RANK });
    }
    let mut pool = alloc::vec![HfSet::empty()];
    for _ in 0..max_rank {
        pool = powerset(&HfSet::from_vec(pool));
    }
    Ok(pool)
}

/// Renders a list of sets one per line.
pub fn render_list(sets: &[HfSet]) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    for x in sets {
        let _ = writeln!(s, "{}", x);
    }
    s
}
