//! Isotropy invariants used to tell schemes apart.
//!
//! Each term contributes the triple of matrix ranks of its reshaped factors.
//! From those triples we keep the type polynomial, its symmetrization over
//! the six variable permutations, and the per-role rank sums. Equal reports
//! only mean "possibly equivalent"; different reports prove inequivalence.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::Scheme;
use crate::trit::TritVector;

pub type RankTriple = [u32; 3];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    /// One `(rank U, rank V, rank W)` per term, sorted.
    pub type_poly: Vec<RankTriple>,
    /// Monomial exponents of the S3-symmetrized type polynomial with their
    /// coefficients, in lexicographic order.
    pub symmetric_poly: Vec<(RankTriple, u64)>,
    /// `(Σ rank U, Σ rank V, Σ rank W)`.
    pub rank_sum: RankTriple,
}

/// Exact rank of a small integer matrix by fraction-free (Bareiss) elimination.
pub fn integer_rank(mut a: Vec<Vec<i64>>) -> u32 {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0usize;
    let mut prev = 1i64;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
            }
            a[r][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank as u32
}

/// Rank of `t` reshaped row-major to `rows x cols`.
pub fn factor_rank(t: &TritVector, rows: usize, cols: usize) -> Result<u32> {
    if t.len() != rows * cols {
        return Err(Error::Shape(format!(
            "vector of length {} cannot be reshaped to {rows}x{cols}",
            t.len()
        )));
    }
    let matrix = (0..rows)
        .map(|r| (0..cols).map(|c| i64::from(t.get(r * cols + c))).collect())
        .collect();
    Ok(integer_rank(matrix))
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

pub fn compute_invariants(s: &Scheme) -> InvariantReport {
    let f = s.format();
    let (m, n, p) = (f.m(), f.n(), f.p());
    let mut type_poly: Vec<RankTriple> = s
        .terms()
        .iter()
        .map(|t| {
            [
                factor_rank(t.u(), m, n).unwrap(),
                factor_rank(t.v(), n, p).unwrap(),
                factor_rank(t.w(), p, m).unwrap(),
            ]
        })
        .collect();
    type_poly.sort_unstable();

    let mut symmetric = BTreeMap::<RankTriple, u64>::new();
    for triple in &type_poly {
        for perm in PERMS {
            *symmetric
                .entry([triple[perm[0]], triple[perm[1]], triple[perm[2]]])
                .or_default() += 1;
        }
    }

    let mut rank_sum = [0u32; 3];
    for triple in &type_poly {
        for (acc, r) in rank_sum.iter_mut().zip(triple) {
            *acc += r;
        }
    }

    InvariantReport {
        type_poly,
        symmetric_poly: symmetric.into_iter().collect(),
        rank_sum,
    }
}

impl InvariantReport {
    /// Deterministic text form: type polynomial, symmetrized polynomial,
    /// then the rank-sum exponents in ascending order.
    pub fn fingerprint(&self) -> String {
        let mut out = String::from("type:");
        let mut counts = BTreeMap::<RankTriple, u64>::new();
        for t in &self.type_poly {
            *counts.entry(*t).or_default() += 1;
        }
        write_poly(&mut out, counts.iter().map(|(k, v)| (k, *v)));
        out.push_str(";sym:");
        write_poly(&mut out, self.symmetric_poly.iter().map(|(k, v)| (k, *v)));
        let mut g = self.rank_sum;
        g.sort_unstable();
        let _ = write!(out, ";ranksum:{},{},{}", g[0], g[1], g[2]);
        out
    }

    /// The type polynomial as printable text, e.g. `6*X^1Y^1Z^1 + X^2Y^2Z^2`.
    pub fn type_poly_text(&self) -> String {
        let mut counts = BTreeMap::<RankTriple, u64>::new();
        for t in &self.type_poly {
            *counts.entry(*t).or_default() += 1;
        }
        counts
            .iter()
            .map(|(t, c)| {
                let mono = format!("X^{}Y^{}Z^{}", t[0], t[1], t[2]);
                if *c == 1 {
                    mono
                } else {
                    format!("{c}*{mono}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn write_poly<'a>(out: &mut String, terms: impl Iterator<Item = (&'a RankTriple, u64)>) {
    let mut first = true;
    for (t, c) in terms {
        if !first {
            out.push('+');
        }
        first = false;
        let _ = write!(out, "{c}({},{},{})", t[0], t[1], t[2]);
    }
}
