//! Scheme data model: formats, rank-one terms and the Brent equations.
//!
//! Coefficients are flattened row-major: `u[i*n + j]` multiplies `a_ij`,
//! `v[j*p + k]` multiplies `b_jk`, and `w[k*m + i]` is the weight of the
//! product in `c_ik`. `W` is therefore stored for `C` transposed, so the
//! `w` columns of a `2x2x3` scheme read `c11, c21, c12, c22, c13, c23`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::trit::{LeadSign, TritVector, MAX_TRITS};

/// Largest matrix side accepted by [`Format::new`].
pub const MAX_SIDE: usize = 16;

/// A matrix multiplication problem `(m, n, p)`: `A` is `m x n`, `B` is `n x p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Format {
    m: usize,
    n: usize,
    p: usize,
}

impl Format {
    pub fn new(m: usize, n: usize, p: usize) -> Result<Self> {
        if m == 0 || n == 0 || p == 0 {
            return Err(Error::EmptyFormat);
        }
        if m * n > MAX_TRITS || n * p > MAX_TRITS || p * m > MAX_TRITS || m.max(n).max(p) > MAX_SIDE
        {
            return Err(Error::CapacityExceeded { m, n, p });
        }
        Ok(Self { m, n, p })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.m, self.n, self.p]
    }

    /// Length of the vector stored for `role`.
    #[inline]
    pub fn len_of(&self, role: Role) -> usize {
        match role {
            Role::U => self.m * self.n,
            Role::V => self.n * self.p,
            Role::W => self.p * self.m,
        }
    }

    /// Rank of the schoolbook algorithm.
    pub fn naive_rank(&self) -> usize {
        self.m * self.n * self.p
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.m, self.n, self.p)
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(['x', 'X']).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected MxNxP, got {s:?}")));
        }
        let mut dims = [0usize; 3];
        for (d, part) in dims.iter_mut().zip(&parts) {
            *d = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad dimension {part:?} in {s:?}")))?;
        }
        Format::new(dims[0], dims[1], dims[2])
    }
}

/// One of the three factor positions of a rank-one term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    U,
    V,
    W,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::U, Role::V, Role::W];

    #[inline]
    pub(crate) fn index(self) -> usize {
        self as usize
    }

    /// The two roles other than `self`, in cyclic order.
    #[inline]
    pub fn others(self) -> (Role, Role) {
        match self {
            Role::U => (Role::V, Role::W),
            Role::V => (Role::W, Role::U),
            Role::W => (Role::U, Role::V),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::U => "U",
            Role::V => "V",
            Role::W => "W",
        })
    }
}

/// A rank-one term `u ⊗ v ⊗ w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    factors: [TritVector; 3],
}

impl Term {
    pub fn new(u: TritVector, v: TritVector, w: TritVector) -> Self {
        Self { factors: [u, v, w] }
    }

    #[inline]
    pub fn u(&self) -> &TritVector {
        &self.factors[0]
    }

    #[inline]
    pub fn v(&self) -> &TritVector {
        &self.factors[1]
    }

    #[inline]
    pub fn w(&self) -> &TritVector {
        &self.factors[2]
    }

    #[inline]
    pub fn factor(&self, role: Role) -> &TritVector {
        &self.factors[role.index()]
    }

    #[inline]
    pub(crate) fn set(&mut self, role: Role, value: TritVector) {
        self.factors[role.index()] = value;
    }

    #[inline]
    pub fn has_zero_factor(&self) -> bool {
        self.factors.iter().any(TritVector::is_zero)
    }

    /// Total number of non-zero coefficients in the three factors.
    #[inline]
    pub fn weight(&self) -> u32 {
        self.factors.iter().map(TritVector::weight).sum()
    }

    /// Rescales so the leading coefficients of `u` and `v` are positive,
    /// pushing the compensating signs into `w`.
    #[inline]
    pub fn normalize(&mut self) {
        let [u, v, w] = &mut self.factors;
        if u.first_nonzero_sign() == LeadSign::Negative {
            *u = u.negate();
            *w = w.negate();
        }
        if v.first_nonzero_sign() == LeadSign::Negative {
            *v = v.negate();
            *w = w.negate();
        }
    }

    #[inline]
    pub fn is_normalized(&self) -> bool {
        self.u().first_nonzero_sign() != LeadSign::Negative
            && self.v().first_nonzero_sign() != LeadSign::Negative
    }

    fn sort_key(&self) -> [u64; 6] {
        let [u, v, w] = &self.factors;
        [
            u.digits(),
            u.signs(),
            v.digits(),
            v.signs(),
            w.digits(),
            w.signs(),
        ]
    }
}

/// Location of the first Brent equation that does not hold.
///
/// The equation is indexed by `a[i][j] * b[j2][k] * c[i2][k2]` (0-based);
/// it must sum to 1 exactly when `j == j2`, `k == k2` and `i == i2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrentFailure {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub i2: usize,
    pub j2: usize,
    pub k2: usize,
    pub expected: i32,
    pub actual: i32,
}

impl fmt::Display for BrentFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a{}{} * b{}{} -> c{}{}: expected {}, got {}",
            self.i + 1,
            self.j + 1,
            self.j2 + 1,
            self.k + 1,
            self.i2 + 1,
            self.k2 + 1,
            self.expected,
            self.actual
        )
    }
}

/// Outcome of [`Scheme::verify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verification {
    pub failure: Option<BrentFailure>,
}

impl Verification {
    #[inline]
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// A rank-`r` decomposition of the `(m, n, p)` matrix multiplication tensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scheme {
    format: Format,
    terms: Vec<Term>,
}

impl Scheme {
    /// Checks vector lengths and validity; does not verify correctness.
    pub fn new(format: Format, terms: Vec<Term>) -> Result<Self> {
        for (l, term) in terms.iter().enumerate() {
            for role in Role::ALL {
                let f = term.factor(role);
                if f.len() != format.len_of(role) {
                    return Err(Error::Shape(format!(
                        "term {l}: {role} has length {}, expected {}",
                        f.len(),
                        format.len_of(role)
                    )));
                }
                if !f.is_valid() {
                    return Err(Error::Domain(format!("term {l}: {role} overflowed")));
                }
            }
        }
        Ok(Self { format, terms })
    }

    pub(crate) fn from_parts_unchecked(format: Format, terms: Vec<Term>) -> Self {
        Self { format, terms }
    }

    /// Builds a scheme from integer coefficient rows.
    pub fn from_coefficients<T>(
        format: Format,
        u: &[Vec<T>],
        v: &[Vec<T>],
        w: &[Vec<T>],
    ) -> Result<Self>
    where
        T: Copy + Into<i64>,
    {
        if u.len() != v.len() || u.len() != w.len() {
            return Err(Error::Shape(format!(
                "factor row counts differ: {} / {} / {}",
                u.len(),
                v.len(),
                w.len()
            )));
        }
        let terms = u
            .iter()
            .zip(v)
            .zip(w)
            .map(|((u, v), w)| {
                Ok(Term::new(
                    TritVector::from_integers(u)?,
                    TritVector::from_integers(v)?,
                    TritVector::from_integers(w)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(format, terms)
    }

    /// The schoolbook algorithm: one product per `(i, j, k)`.
    pub fn naive(format: Format) -> Self {
        let (m, n, p) = (format.m, format.n, format.p);
        let mut terms = Vec::with_capacity(format.naive_rank());
        for i in 0..m {
            for j in 0..n {
                for k in 0..p {
                    terms.push(Term::new(
                        TritVector::unit(m * n, i * n + j).unwrap(),
                        TritVector::unit(n * p, j * p + k).unwrap(),
                        TritVector::unit(p * m, k * m + i).unwrap(),
                    ));
                }
            }
        }
        Self { format, terms }
    }

    #[inline]
    pub fn format(&self) -> Format {
        self.format
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    #[inline]
    pub(crate) fn terms_mut(&mut self) -> &mut Vec<Term> {
        &mut self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    /// Integer coefficient rows of one role.
    pub fn coefficients(&self, role: Role) -> Vec<Vec<i8>> {
        self.terms
            .iter()
            .map(|t| t.factor(role).to_integers())
            .collect()
    }

    /// Evaluates every Brent equation in exact integer arithmetic.
    pub fn verify(&self) -> Verification {
        Verification {
            failure: self.brent_check(|actual, expected| actual == expected),
        }
    }

    #[inline]
    pub fn is_correct(&self) -> bool {
        self.verify().passed()
    }

    /// Shared Brent-equation scan; `holds(actual, expected)` decides each
    /// equation so the same routine serves the integer and mod-2 checks.
    pub(crate) fn brent_check(&self, holds: impl Fn(i32, i32) -> bool) -> Option<BrentFailure> {
        let (m, n, p) = (self.format.m, self.format.n, self.format.p);
        let (nu, nv, nw) = (m * n, n * p, p * m);
        let mut tensor = vec![0i32; nu * nv * nw];
        for term in &self.terms {
            for (x, a) in term.u().nonzeros() {
                for (y, b) in term.v().nonzeros() {
                    let ab = i32::from(a * b);
                    let base = (x * nv + y) * nw;
                    for (z, c) in term.w().nonzeros() {
                        tensor[base + z] += ab * i32::from(c);
                    }
                }
            }
        }
        for i in 0..m {
            for j in 0..n {
                for k in 0..p {
                    for i2 in 0..m {
                        for j2 in 0..n {
                            for k2 in 0..p {
                                let x = i * n + j;
                                let y = j2 * p + k;
                                let z = k2 * m + i2;
                                let expected = i32::from(j == j2 && k == k2 && i == i2);
                                let actual = tensor[(x * nv + y) * nw + z];
                                if !holds(actual, expected) {
                                    return Some(BrentFailure {
                                        i,
                                        j,
                                        k,
                                        i2,
                                        j2,
                                        k2,
                                        expected,
                                        actual,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Applies the sign convention to every term in place.
    pub fn normalize(&mut self) {
        for term in &mut self.terms {
            term.normalize();
        }
    }

    pub fn normalized(&self) -> Self {
        let mut s = self.clone();
        s.normalize();
        s
    }

    pub fn is_normalized(&self) -> bool {
        self.terms.iter().all(Term::is_normalized)
    }

    /// Total number of non-zero coefficients across `U`, `V` and `W`.
    pub fn nonzeros(&self) -> u64 {
        self.terms.iter().map(|t| u64::from(t.weight())).sum()
    }

    /// Naive count of additions and subtractions: non-zeros − 2r − m·p.
    pub fn additive_complexity(&self) -> i64 {
        self.nonzeros() as i64 - 2 * self.rank() as i64 - (self.format.m * self.format.p) as i64
    }

    /// Byte string identifying the scheme up to term order and the sign
    /// rescaling handled by [`normalize`](Self::normalize).
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut terms = self.normalized().terms;
        terms.sort_by_key(Term::sort_key);
        let mut key = Vec::with_capacity(3 + terms.len() * 48);
        key.extend(self.format.dims().iter().map(|&d| d as u8));
        for term in &terms {
            for word in term.sort_key() {
                key.extend_from_slice(&word.to_le_bytes());
            }
        }
        key
    }

    /// Orders schemes by rank, then additive complexity.
    pub fn quality_cmp(&self, other: &Self) -> Ordering {
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.additive_complexity().cmp(&other.additive_complexity()))
    }

    /// Computes `A·B` through the scheme's products; used for spot checks.
    pub fn multiply(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let (m, n, p) = (self.format.m, self.format.n, self.format.p);
        assert_eq!(a.len(), m * n);
        assert_eq!(b.len(), n * p);
        let mut c = vec![0i64; m * p];
        for term in &self.terms {
            let left: i64 = term.u().nonzeros().map(|(x, s)| i64::from(s) * a[x]).sum();
            let right: i64 = term.v().nonzeros().map(|(y, s)| i64::from(s) * b[y]).sum();
            let product = left * right;
            for (z, s) in term.w().nonzeros() {
                let (k, i) = (z / m, z % m);
                c[i * p + k] += i64::from(s) * product;
            }
        }
        c
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}: {})", self.format, self.rank())
    }
}
