//! Sign lifting against exhaustive sign enumeration.
//!
//! Instances come from random flip walks over Z2 started at naive schemes,
//! so they satisfy the Brent equations mod 2 but need not lift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ternflip_core::lifting::{lift, lift_many, BinaryScheme, LiftOutcome};
use ternflip_core::{strassen, Format, Role, Scheme, Term, TritVector};

/// `(u, v, w)` digit words of one term over Z2.
type BinTerm = [u64; 3];

fn to_binary(f: Format, terms: &[BinTerm]) -> BinaryScheme {
    let lens = [f.len_of(Role::U), f.len_of(Role::V), f.len_of(Role::W)];
    let vec = |k: usize, d: u64| TritVector::from_words(lens[k], d, 0).unwrap();
    BinaryScheme::new(
        f,
        terms
            .iter()
            .map(|t| Term::new(vec(0, t[0]), vec(1, t[1]), vec(2, t[2])))
            .collect(),
    )
    .unwrap()
}

fn z2_reduce(terms: &mut Vec<BinTerm>) {
    terms.retain(|t| t.iter().all(|&d| d != 0));
    'merge: loop {
        for x in 0..terms.len() {
            for y in x + 1..terms.len() {
                for k in 0..3 {
                    let (p, q) = ((k + 1) % 3, (k + 2) % 3);
                    if terms[x][p] == terms[y][p] && terms[x][q] == terms[y][q] {
                        terms[x][k] ^= terms[y][k];
                        terms.swap_remove(y);
                        terms.retain(|t| t.iter().all(|&d| d != 0));
                        continue 'merge;
                    }
                }
            }
        }
        break;
    }
}

/// Random Z2 flips and splits with occasional reduction, from the naive
/// scheme.
fn z2_walk(f: Format, steps: usize, rng: &mut ChaCha8Rng) -> Vec<BinTerm> {
    let naive = Scheme::naive(f);
    let mut terms: Vec<BinTerm> = naive
        .terms()
        .iter()
        .map(|t| [t.u().digits(), t.v().digits(), t.w().digits()])
        .collect();
    for _ in 0..steps {
        let r = terms.len();
        if r < 2 {
            break;
        }
        let i = rng.random_range(0..r);
        let j = (i + rng.random_range(1..r)) % r;
        let a = rng.random_range(0..3);
        match rng.random_range(0..10) {
            0..=5 if terms[i][a] == terms[j][a] => {
                let (b, c) = if rng.random_bool(0.5) {
                    ((a + 1) % 3, (a + 2) % 3)
                } else {
                    ((a + 2) % 3, (a + 1) % 3)
                };
                terms[i][b] ^= terms[j][b];
                terms[j][c] ^= terms[i][c];
                terms.retain(|t| t.iter().all(|&d| d != 0));
            }
            6..=7 if terms[i][a] != terms[j][a] => {
                let mut extra = terms[i];
                extra[a] ^= terms[j][a];
                terms[i][a] = terms[j][a];
                terms.push(extra);
            }
            8..=9 => z2_reduce(&mut terms),
            _ => {}
        }
    }
    terms
}

/// Tries every sign pattern on every non-zero coefficient.
fn brute_force(b: &BinaryScheme) -> bool {
    let s = b.as_scheme();
    let slots: Vec<(usize, Role, usize)> = s
        .terms()
        .iter()
        .enumerate()
        .flat_map(|(l, t)| {
            Role::ALL
                .into_iter()
                .flat_map(move |r| t.factor(r).nonzeros().map(move |(k, _)| (l, r, k)))
        })
        .collect();
    assert!(slots.len() <= 18);
    let f = s.format();
    for mask in 0u64..1 << slots.len() {
        let mut signs = vec![[0u64; 3]; s.rank()];
        for (bit, &(l, r, k)) in slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                signs[l][Role::ALL.iter().position(|&x| x == r).unwrap()] |= 1 << k;
            }
        }
        let terms = s
            .terms()
            .iter()
            .zip(&signs)
            .map(|(t, sg)| {
                let v = |k: usize, r: Role| {
                    TritVector::from_words(f.len_of(r), t.factor(r).digits(), sg[k]).unwrap()
                };
                Term::new(v(0, Role::U), v(1, Role::V), v(2, Role::W))
            })
            .collect();
        if Scheme::new(f, terms).unwrap().verify().passed() {
            return true;
        }
    }
    false
}

fn nnz(b: &BinaryScheme) -> u32 {
    b.terms().iter().map(Term::weight).sum()
}

fn check_lift(b: &BinaryScheme, liftable: bool) -> LiftOutcome {
    let out = lift(b, 10_000_000).unwrap();
    match &out {
        LiftOutcome::Lifted(found) => {
            assert!(liftable, "lift found a solution the oracle missed");
            let s = &found[0];
            assert!(s.verify().passed());
            assert_eq!(
                BinaryScheme::from_scheme(s).as_scheme().normalized(),
                b.as_scheme().normalized()
            );
        }
        LiftOutcome::Unsat => assert!(!liftable, "lift reported unsat on a liftable instance"),
        LiftOutcome::BudgetExhausted => panic!("budget exhausted on a tiny instance"),
    }
    out
}

/// Term-by-term enumeration; an equation is checked once all its terms are fixed.
fn term_dfs(f: Format, terms: &[BinTerm]) -> bool {
    let (m, n, p) = (f.m(), f.n(), f.p());
    let lens = [m * n, n * p, p * m];
    let bits = |d: u64, len: usize| (0..len).filter(move |&k| d >> k & 1 == 1);
    // equation index per (x, y, z)
    let eq = |x: usize, y: usize, z: usize| (x * lens[1] + y) * lens[2] + z;
    let neq = lens[0] * lens[1] * lens[2];
    let target: Vec<i32> = (0..neq)
        .map(|e| {
            let (z, y, x) = (e % lens[2], e / lens[2] % lens[1], e / (lens[2] * lens[1]));
            let (i, j, j2, k, k2, i2) = (x / n, x % n, y / p, y % p, z / m, z % m);
            i32::from(i == i2 && j == j2 && k == k2)
        })
        .collect();
    let mut last = vec![usize::MAX; neq];
    for (l, t) in terms.iter().enumerate() {
        for x in bits(t[0], lens[0]) {
            for y in bits(t[1], lens[1]) {
                for z in bits(t[2], lens[2]) {
                    last[eq(x, y, z)] = l;
                }
            }
        }
    }
    for e in 0..neq {
        if last[e] == usize::MAX && target[e] != 0 {
            return false;
        }
    }
    let mut sums = vec![0i32; neq];
    fn rec(
        l: usize,
        terms: &[BinTerm],
        lens: [usize; 3],
        sums: &mut Vec<i32>,
        target: &[i32],
        last: &[usize],
        eq: &dyn Fn(usize, usize, usize) -> usize,
    ) -> bool {
        if l == terms.len() {
            return true;
        }
        let t = terms[l];
        let pos: Vec<Vec<usize>> = (0..3)
            .map(|r| (0..lens[r]).filter(|&k| t[r] >> k & 1 == 1).collect())
            .collect();
        // lead of u and v pinned to +1
        let free = (pos[0].len() - 1) + (pos[1].len() - 1) + pos[2].len();
        for mask in 0u64..1 << free {
            let mut bit = 0;
            let mut sign = |skip_first: bool, list: &Vec<usize>| -> Vec<(usize, i32)> {
                list.iter()
                    .enumerate()
                    .map(|(q, &k)| {
                        if skip_first && q == 0 {
                            (k, 1)
                        } else {
                            let s = if mask >> bit & 1 == 1 { -1 } else { 1 };
                            bit += 1;
                            (k, s)
                        }
                    })
                    .collect()
            };
            let (su, sv, sw) = (
                sign(true, &pos[0]),
                sign(true, &pos[1]),
                sign(false, &pos[2]),
            );
            let mut ok = true;
            let mut touched = Vec::new();
            for &(x, a) in &su {
                for &(y, b) in &sv {
                    for &(z, c) in &sw {
                        let e = eq(x, y, z);
                        sums[e] += a * b * c;
                        touched.push((e, a * b * c));
                        if last[e] == l && sums[e] != target[e] {
                            ok = false;
                        }
                    }
                }
            }
            if ok && rec(l + 1, terms, lens, sums, target, last, eq) {
                return true;
            }
            for (e, v) in touched {
                sums[e] -= v;
            }
        }
        false
    }
    rec(0, terms, lens, &mut sums, &target, &last, &eq)
}

#[test]
fn term_oracle_agrees_on_2x2x2_walks() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = Format::new(2, 2, 2).unwrap();
    let (mut tested, mut unsat) = (0, 0);
    while tested < 150 {
        let terms = z2_walk(f, rng.random_range(50..2000), &mut rng);
        if terms.len() > 9 {
            continue;
        }
        let b = to_binary(f, &terms);
        if check_lift(&b, term_dfs(f, &terms)) == LiftOutcome::Unsat {
            unsat += 1;
        }
        tested += 1;
    }
    eprintln!("{tested} instances, {unsat} unsat");
}

#[test]
fn agrees_with_brute_force_on_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let formats = [
        (1, 2, 2),
        (2, 2, 1),
        (2, 1, 2),
        (1, 1, 4),
        (1, 2, 1),
        (1, 3, 1),
        (2, 1, 1),
        (1, 1, 5),
    ];
    let (mut lifted, mut unsat, mut tested) = (0, 0, 0);
    for round in 0..600 {
        let (m, n, p) = formats[round % formats.len()];
        let f = Format::new(m, n, p).unwrap();
        let terms = z2_walk(f, rng.random_range(1..30), &mut rng);
        let b = to_binary(f, &terms);
        assert!(b.verify_mod2());
        if b.rank() > 5 || nnz(&b) > 18 {
            continue;
        }
        let liftable = brute_force(&b);
        match check_lift(&b, liftable) {
            LiftOutcome::Lifted(_) => lifted += 1,
            _ => unsat += 1,
        }
        tested += 1;
    }
    assert!(tested > 200, "only {tested} instances");
    assert!(lifted > 0);
    eprintln!("{tested} instances: {lifted} lifted, {unsat} unsat");
}

/// Found by a Z2 walk on (2,2,2), shrunk by further Z2 flips and frozen:
/// satisfies the Brent equations mod 2 but has no sign assignment over the
/// integers.
const FROZEN: [BinTerm; 9] = [
    [1, 9, 1],
    [5, 9, 8],
    [12, 11, 4],
    [3, 8, 5],
    [2, 12, 1],
    [12, 1, 14],
    [13, 10, 12],
    [8, 5, 2],
    [9, 3, 8],
];

#[test]
fn frozen_unliftable_instance() {
    let f = Format::new(2, 2, 2).unwrap();
    let b = to_binary(f, &FROZEN);
    assert!(b.verify_mod2());
    assert!(!term_dfs(f, &FROZEN));
    assert_eq!(lift(&b, 1_000_000).unwrap(), LiftOutcome::Unsat);
}

#[test]
fn strassen_mod2_lifts_fast() {
    let b = BinaryScheme::from_scheme(&strassen());
    let start = std::time::Instant::now();
    let LiftOutcome::Lifted(found) = lift(&b, 1_000_000).unwrap() else {
        panic!("strassen mod 2 must lift");
    };
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert!(found[0].verify().passed());
}

#[test]
fn lift_many_returns_distinct_normalized_lifts() {
    let b = BinaryScheme::from_scheme(&strassen());
    let LiftOutcome::Lifted(found) = lift_many(&b, 1_000_000, 8).unwrap() else {
        panic!("expected lifts");
    };
    for (k, s) in found.iter().enumerate() {
        assert!(s.verify().passed());
        assert!(s.is_normalized());
        assert!(found[..k].iter().all(|o| o != s));
    }
}
