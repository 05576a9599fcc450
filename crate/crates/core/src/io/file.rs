//! JSON scheme files.
//!
//! ```text
//! {
//!   "m": 2,
//!   "n": 2,
//!   "p": 3,
//!   "rank": 11,
//!   "u": [
//!     [1, 0, 0, 1],
//!     ...
//!   ],
//!   "v": [...],
//!   "w": [...],
//!   "invariants": {...},
//!   "provenance": {...}
//! }
//! ```
//!
//! Rows use the flattening of [`Scheme`](crate::Scheme): `w` columns follow
//! `C` transposed. `rank`, `invariants` and `provenance` are optional on
//! input, so a bare `{m, n, p, u, v, w}` object of coefficient lists is
//! accepted as an import format.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{compute_invariants, RankTriple};
use crate::scheme::{Format, Role, Scheme, Term};
use crate::trit::{TritError, TritVector};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsBlock {
    pub type_poly: Vec<RankTriple>,
    pub rank_sum: RankTriple,
    pub fingerprint: String,
}

impl InvariantsBlock {
    pub fn of(s: &Scheme) -> Self {
        let r = compute_invariants(s);
        Self {
            fingerprint: r.fingerprint(),
            type_poly: r.type_poly,
            rank_sum: r.rank_sum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Provenance {
    pub fn new(source: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            seed,
            tool: Some(format!("ternflip {}", env!("CARGO_PKG_VERSION"))),
            source: Some(source.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeFile {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    #[serde(default)]
    pub rank: Option<usize>,
    pub u: Vec<Vec<i64>>,
    pub v: Vec<Vec<i64>>,
    pub w: Vec<Vec<i64>>,
    #[serde(default)]
    pub invariants: Option<InvariantsBlock>,
    #[serde(default)]
    pub provenance: Option<Provenance>,
}

impl SchemeFile {
    pub fn from_scheme(s: &Scheme, provenance: Option<Provenance>) -> Self {
        let rows = |role| {
            s.coefficients(role)
                .into_iter()
                .map(|r| r.into_iter().map(i64::from).collect())
                .collect()
        };
        let f = s.format();
        Self {
            m: f.m(),
            n: f.n(),
            p: f.p(),
            rank: Some(s.rank()),
            u: rows(Role::U),
            v: rows(Role::V),
            w: rows(Role::W),
            invariants: Some(InvariantsBlock::of(s)),
            provenance,
        }
    }

    /// Checks shapes and coefficient domain and builds the scheme. Does
    /// not verify the Brent equations.
    pub fn to_scheme(&self) -> Result<Scheme> {
        let format = Format::new(self.m, self.n, self.p)?;
        let r = self.u.len();
        if self.v.len() != r || self.w.len() != r {
            return Err(Error::Shape(format!(
                "u, v, w have {}, {}, {} rows",
                r,
                self.v.len(),
                self.w.len()
            )));
        }
        if let Some(rank) = self.rank {
            if rank != r {
                return Err(Error::Shape(format!("rank {rank} but {r} rows")));
            }
        }
        let vector = |role: Role, l: usize, row: &[i64]| -> Result<TritVector> {
            let want = format.len_of(role);
            if row.len() != want {
                return Err(Error::Shape(format!(
                    "{role} row {l} has {} entries, expected {want}",
                    row.len()
                )));
            }
            TritVector::from_integers(row).map_err(|e| match e {
                TritError::OutOfDomain { index, value } => {
                    Error::Domain(format!("{role} row {l} position {index} is {value}"))
                }
                other => Error::Trit(other),
            })
        };
        let terms = (0..r)
            .map(|l| {
                Ok(Term::new(
                    vector(Role::U, l, &self.u[l])?,
                    vector(Role::V, l, &self.v[l])?,
                    vector(Role::W, l, &self.w[l])?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Scheme::new(format, terms)
    }

    /// Deterministic text: one coefficient row per line.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(out, "  \"m\": {},", self.m);
        let _ = writeln!(out, "  \"n\": {},", self.n);
        let _ = writeln!(out, "  \"p\": {},", self.p);
        let _ = writeln!(out, "  \"rank\": {},", self.rank.unwrap_or(self.u.len()));
        let blocks = [("u", &self.u), ("v", &self.v), ("w", &self.w)];
        for (k, (name, rows)) in blocks.iter().enumerate() {
            let _ = write!(out, "  \"{name}\": [");
            for (l, row) in rows.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(i64::to_string).collect();
                let sep = if l + 1 < rows.len() { "," } else { "" };
                let _ = write!(out, "\n    [{}]{sep}", cells.join(", "));
            }
            if !rows.is_empty() {
                out.push_str("\n  ");
            }
            out.push(']');
            let more =
                k + 1 < blocks.len() || self.invariants.is_some() || self.provenance.is_some();
            out.push_str(if more { ",\n" } else { "\n" });
        }
        if let Some(inv) = &self.invariants {
            let json = serde_json::to_string(inv).expect("plain data serializes");
            let sep = if self.provenance.is_some() { "," } else { "" };
            let _ = writeln!(out, "  \"invariants\": {json}{sep}");
        }
        if let Some(prov) = &self.provenance {
            let json = serde_json::to_string(prov).expect("plain data serializes");
            let _ = writeln!(out, "  \"provenance\": {json}");
        }
        out.push_str("}\n");
        out
    }
}

/// Serializes a scheme with its invariants and optional provenance.
pub fn serialize(s: &Scheme, provenance: Option<Provenance>) -> String {
    SchemeFile::from_scheme(s, provenance).to_json()
}

pub fn parse_file(text: &str) -> Result<SchemeFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses scheme text; verification is left to the caller.
pub fn parse(text: &str) -> Result<Scheme> {
    parse_file(text)?.to_scheme()
}
