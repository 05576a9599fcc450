//! Lifting schemes valid over Z2 to schemes with coefficients in {-1, 0, 1}.
//!
//! Every non-zero coefficient of the binary scheme gets an unknown sign.
//! Each Brent equation then reads `Σ s_u · s_v · s_w = δ` over the
//! integers, where the sum runs over the terms touching that equation.
//! A depth-first search assigns signs, most-constrained variable first and
//! `+1` before `-1`. After every assignment the touched equations are
//! checked: a partial sum `S` with `k` open products is dead once
//! `|δ − S| > k`, and when `|δ − S| = k` every open product is forced,
//! which fixes the last free sign of any product with one open variable.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scheme::{Format, Role, Scheme, Term};
use crate::trit::TritVector;

/// A scheme over {0, 1} meant to satisfy the Brent equations modulo 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryScheme {
    format: Format,
    terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftOutcome {
    /// At least one lift was found; holds up to the requested count. Lifts
    /// found before the budget ran out are still reported here.
    Lifted(Vec<Scheme>),
    /// The search space was exhausted without a solution.
    Unsat,
    /// The node budget ran out before a lift or a refutation was found.
    BudgetExhausted,
}

impl BinaryScheme {
    pub fn new(format: Format, terms: Vec<Term>) -> Result<Self> {
        let checked = Scheme::new(format, terms)?;
        for (l, t) in checked.terms().iter().enumerate() {
            if Role::ALL.iter().any(|&r| t.factor(r).signs() != 0) {
                return Err(Error::Domain(format!(
                    "term {l} has a negative coefficient"
                )));
            }
        }
        Ok(Self {
            format,
            terms: checked.into_terms(),
        })
    }

    /// Reduces a scheme modulo 2 by dropping every sign.
    pub fn from_scheme(s: &Scheme) -> Self {
        let erase = |t: &TritVector| TritVector::from_words(t.len(), t.digits(), 0).unwrap();
        Self {
            format: s.format(),
            terms: s
                .terms()
                .iter()
                .map(|t| Term::new(erase(t.u()), erase(t.v()), erase(t.w())))
                .collect(),
        }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The same coefficients read as a ternary scheme with all signs `+1`.
    pub fn as_scheme(&self) -> Scheme {
        Scheme::from_parts_unchecked(self.format, self.terms.clone())
    }

    /// Checks every Brent equation modulo 2.
    pub fn verify_mod2(&self) -> bool {
        self.as_scheme()
            .brent_check(|actual, expected| (actual - expected).rem_euclid(2) == 0)
            .is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Found {
    Done,
    More,
}

struct Equation {
    products: Vec<[u32; 3]>,
    target: i32,
}

struct Solver {
    value: Vec<i8>,
    equations: Vec<Equation>,
    occurs: Vec<Vec<u32>>,
    order: Vec<u32>,
    trail: Vec<u32>,
    nodes: u64,
    budget: u64,
    out_of_budget: bool,
}

impl Solver {
    /// False if the equation can no longer hold; forced signs are pushed
    /// to `forced`.
    fn check(&self, eq: &Equation, forced: &mut Vec<(u32, i8)>) -> bool {
        let mut sum = 0i32;
        let mut open = 0i32;
        for prod in &eq.products {
            let vals = prod.map(|v| self.value[v as usize]);
            if vals.contains(&0) {
                open += 1;
            } else {
                sum += i32::from(vals[0] * vals[1] * vals[2]);
            }
        }
        let gap = eq.target - sum;
        if gap.abs() > open {
            return false;
        }
        if open > 0 && gap.abs() == open {
            let want = gap.signum() as i8;
            for prod in &eq.products {
                let vals = prod.map(|v| self.value[v as usize]);
                let free: Vec<usize> = (0..3).filter(|&k| vals[k] == 0).collect();
                if free.len() == 1 {
                    let k = free[0];
                    let rest: i8 = (0..3).filter(|&q| q != k).map(|q| vals[q]).product();
                    forced.push((prod[k], want * rest));
                }
            }
        }
        true
    }

    fn assign(&mut self, var: u32, val: i8) -> bool {
        let mut queue = vec![(var, val)];
        let mut forced = Vec::new();
        while let Some((v, x)) = queue.pop() {
            let cur = self.value[v as usize];
            if cur != 0 {
                if cur != x {
                    return false;
                }
                continue;
            }
            self.value[v as usize] = x;
            self.trail.push(v);
            for &e in &self.occurs[v as usize] {
                forced.clear();
                if !self.check(&self.equations[e as usize], &mut forced) {
                    return false;
                }
                queue.extend_from_slice(&forced);
            }
        }
        true
    }

    fn undo(&mut self, len: usize) {
        while self.trail.len() > len {
            let v = self.trail.pop().unwrap();
            self.value[v as usize] = 0;
        }
    }

    fn search(&mut self, depth: usize, limit: usize, out: &mut Vec<Vec<i8>>) -> Found {
        let Some(pos) =
            (depth..self.order.len()).find(|&k| self.value[self.order[k] as usize] == 0)
        else {
            out.push(self.value.clone());
            return if out.len() >= limit {
                Found::Done
            } else {
                Found::More
            };
        };
        let var = self.order[pos];
        for val in [1i8, -1] {
            if self.nodes >= self.budget {
                self.out_of_budget = true;
                return Found::Done;
            }
            self.nodes += 1;
            let mark = self.trail.len();
            if self.assign(var, val) && self.search(pos + 1, limit, out) == Found::Done {
                self.undo(mark);
                return Found::Done;
            }
            self.undo(mark);
        }
        Found::More
    }
}

/// Finds one ternary lift of `s`.
pub fn lift(s: &BinaryScheme, budget: u64) -> Result<LiftOutcome> {
    lift_many(s, budget, 1)
}

/// Finds up to `count` lifts of `s`, distinct after sign normalization.
///
/// The first non-zero sign of every term's `u` and `v` is fixed to `+1`,
/// which loses no solutions up to the per-term rescaling
/// `(αu, βv, γw)` with `αβγ = 1`.
pub fn lift_many(s: &BinaryScheme, budget: u64, count: usize) -> Result<LiftOutcome> {
    if !s.verify_mod2() {
        return Err(Error::NotVerified(
            "scheme does not satisfy the Brent equations mod 2".into(),
        ));
    }
    let count = count.max(1);
    let f = s.format();
    let (m, n, p) = (f.m(), f.n(), f.p());
    let (nv, nw) = (n * p, p * m);

    // one variable per non-zero coefficient
    let mut var_of = HashMap::<(usize, usize, usize), u32>::new();
    let mut pinned = Vec::new();
    let mut nvars = 0u32;
    for (l, t) in s.terms().iter().enumerate() {
        for role in Role::ALL {
            for (k, (idx, _)) in t.factor(role).nonzeros().enumerate() {
                var_of.insert((l, role as usize, idx), nvars);
                let lead = k == 0 && role != Role::W;
                if lead || t.has_zero_factor() {
                    pinned.push(nvars);
                }
                nvars += 1;
            }
        }
    }

    let mut grouped = HashMap::<usize, Vec<[u32; 3]>>::new();
    for (l, t) in s.terms().iter().enumerate() {
        if t.has_zero_factor() {
            continue;
        }
        for (x, _) in t.u().nonzeros() {
            for (y, _) in t.v().nonzeros() {
                for (z, _) in t.w().nonzeros() {
                    grouped.entry((x * nv + y) * nw + z).or_default().push([
                        var_of[&(l, 0, x)],
                        var_of[&(l, 1, y)],
                        var_of[&(l, 2, z)],
                    ]);
                }
            }
        }
    }
    let mut keys: Vec<usize> = grouped.keys().copied().collect();
    keys.sort_unstable();
    let equations: Vec<Equation> = keys
        .into_iter()
        .map(|key| {
            let z = key % nw;
            let y = key / nw % nv;
            let x = key / (nw * nv);
            let (i, j) = (x / n, x % n);
            let (j2, k) = (y / p, y % p);
            let (k2, i2) = (z / m, z % m);
            Equation {
                products: grouped.remove(&key).unwrap(),
                target: i32::from(j == j2 && k == k2 && i == i2),
            }
        })
        .collect();

    let mut occurs = vec![Vec::new(); nvars as usize];
    for (e, eq) in equations.iter().enumerate() {
        for prod in &eq.products {
            for &v in prod {
                let list = &mut occurs[v as usize];
                if list.last() != Some(&(e as u32)) {
                    list.push(e as u32);
                }
            }
        }
    }
    let mut order: Vec<u32> = (0..nvars).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(occurs[v as usize].len()));

    let mut solver = Solver {
        value: vec![0; nvars as usize],
        equations,
        occurs,
        order,
        trail: Vec::new(),
        nodes: 0,
        budget,
        out_of_budget: false,
    };
    let mut solutions = Vec::new();
    if pinned.iter().all(|&v| solver.assign(v, 1)) {
        solver.search(0, count, &mut solutions);
    }

    let lifted: Vec<Scheme> = solutions
        .iter()
        .map(|values| {
            let terms = s
                .terms()
                .iter()
                .enumerate()
                .map(|(l, t)| {
                    let mut signed = *t;
                    for role in Role::ALL {
                        let f = t.factor(role);
                        let mut signs = 0u64;
                        for (idx, _) in f.nonzeros() {
                            if values[var_of[&(l, role as usize, idx)] as usize] < 0 {
                                signs |= 1 << idx;
                            }
                        }
                        signed.set(
                            role,
                            TritVector::from_words(f.len(), f.digits(), signs).unwrap(),
                        );
                    }
                    signed
                })
                .collect();
            let mut lifted = Scheme::from_parts_unchecked(f, terms);
            lifted.normalize();
            debug_assert!(lifted.verify().passed());
            lifted
        })
        .collect();

    Ok(if !lifted.is_empty() {
        LiftOutcome::Lifted(lifted)
    } else if solver.out_of_budget {
        LiftOutcome::BudgetExhausted
    } else {
        LiftOutcome::Unsat
    })
}
