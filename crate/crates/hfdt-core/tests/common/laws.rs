use hfdt_core::binding::{all_vars, alpha_eq, free_char_check, free_vars, is_free_in, substitute};
use hfdt_core::syntax::Term;
use rand::Rng;

use super::logic::Tally;
use super::terms::{random_term, Alphabet};

fn alphabet() -> Alphabet {
    Alphabet::one(3, 4)
}

/// Draws until `cases` draws satisfy the law's precondition.
fn suite<R: Rng>(rng: &mut R, cases: usize, mut one: impl FnMut(&mut R) -> Option<Result<(), String>>) -> Tally {
    let mut tally = Tally::default();
    while tally.checked < cases {
        match one(rng) {
            None => tally.skipped += 1,
            Some(r) => {
                tally.checked += 1;
                if let Err(e) = r {
                    tally.failures.push(e);
                }
            }
        }
    }
    tally
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Option<Result<(), String>> {
    Some(if ok { Ok(()) } else { Err(msg()) })
}

/// `T ≠ x ∧ x ∈ F(S) ⇔ S[T/x] ≠ S`.
pub fn free_char<R: Rng>(rng: &mut R, cases: usize) -> Tally {
    let a = alphabet();
    suite(rng, cases, |rng| {
        let (s, t) = (random_term(rng, &a, 10), random_term(rng, &a, 3));
        let x = rng.gen_range(0..4);
        let (l, r) = free_char_check(&s, &t, x);
        check(l == r, || format!("S={:?} T={:?} x={}", s, t, x))
    })
}

/// `x ∈ F(S) ⇒ F(S[T/x]) = F(λxTS)`.
pub fn free_sub<R: Rng>(rng: &mut R, cases: usize) -> Tally {
    let a = alphabet();
    suite(rng, cases, |rng| {
        let (s, t) = (random_term(rng, &a, 10), random_term(rng, &a, 5));
        let fs: Vec<u32> = free_vars(&s).into_iter().collect();
        if fs.is_empty() {
            return None;
        }
        let x = fs[rng.gen_range(0..fs.len())];
        let ok = free_vars(&substitute(&s, &t, x)) == free_vars(&Term::lam(x, t.clone(), s.clone()));
        check(ok, || format!("S={:?} T={:?} x={}", s, t, x))
    })
}

/// `y ∉ V(S) ⇒ S[y/x][x/y] = S`.
pub fn alpha_reverse<R: Rng>(rng: &mut R, cases: usize) -> Tally {
    let a = alphabet();
    suite(rng, cases, |rng| {
        let s = random_term(rng, &a, 10);
        let (x, y) = (rng.gen_range(0..4), rng.gen_range(0..7));
        if all_vars(&s).contains(&y) {
            return None;
        }
        let back = substitute(&substitute(&s, &Term::Var(y), x), &Term::Var(x), y);
        check(back == s, || format!("S={:?} x={} y={}", s, x, y))
    })
}

/// `x = w ∨ x ∉ F(R) ⇒ R[S/w][T/x] ≡ R[S[T/x]/w]`.
pub fn commutation_absorbed<R: Rng>(rng: &mut R, cases: usize) -> Tally {
    let a = alphabet();
    suite(rng, cases, |rng| {
        let (r, s, t) = (random_term(rng, &a, 8), random_term(rng, &a, 5), random_term(rng, &a, 4));
        let (w, x) = (rng.gen_range(0..4), rng.gen_range(0..4));
        if x != w && is_free_in(x, &r) {
            return None;
        }
        let lhs = substitute(&substitute(&r, &s, w), &t, x);
        let rhs = substitute(&r, &substitute(&s, &t, x), w);
        check(alpha_eq(&lhs, &rhs), || format!("R={:?} S={:?} T={:?} w={} x={}", r, s, t, w, x))
    })
}

/// `x ≠ w ∧ w ∉ F(T) ⇒ R[S/w][T/x] ≡ R[T/x][S[T/x]/w]`.
pub fn commutation_swapped<R: Rng>(rng: &mut R, cases: usize) -> Tally {
    let a = alphabet();
    suite(rng, cases, |rng| {
        let (r, s, t) = (random_term(rng, &a, 8), random_term(rng, &a, 5), random_term(rng, &a, 4));
        let (w, x) = (rng.gen_range(0..4), rng.gen_range(0..4));
        if x == w || is_free_in(w, &t) {
            return None;
        }
        let lhs = substitute(&substitute(&r, &s, w), &t, x);
        let rhs = substitute(&substitute(&r, &t, x), &substitute(&s, &t, x), w);
        check(alpha_eq(&lhs, &rhs), || format!("R={:?} S={:?} T={:?} w={} x={}", r, s, t, w, x))
    })
}
