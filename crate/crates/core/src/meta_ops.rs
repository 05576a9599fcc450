//! Operators that change the format of a scheme.
//!
//! All of them build the new coefficient vectors by index remapping and
//! return a normalized scheme. Correctness follows from the construction;
//! the tests re-check every output against the Brent equations.

use crate::error::{Error, Result};
use crate::scheme::{Format, Scheme, Term};
use crate::trit::TritVector;

/// A permutation of `(m, n, p)`: the output format is
/// `(dims[perm[0]], dims[perm[1]], dims[perm[2]])`.
pub type SizePerm = [usize; 3];

pub const SIZE_PERMS: [SizePerm; 6] = [
    [0, 1, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
    [1, 0, 2],
    [0, 2, 1],
];

fn remap(len: usize, src: &TritVector, map: impl Fn(usize) -> Option<usize>) -> TritVector {
    let mut values = vec![0i8; len];
    for (index, value) in src.nonzeros() {
        if let Some(to) = map(index) {
            values[to] = value;
        }
    }
    TritVector::from_integers(&values).expect("remapped coefficients stay ternary")
}

fn finish(format: Format, terms: Vec<Term>) -> Scheme {
    let mut s = Scheme::from_parts_unchecked(format, terms);
    s.normalize();
    s
}

/// Strassen's rank-7 scheme for `2x2x2`.
pub fn strassen() -> Scheme {
    let u = [
        [1, 0, 0, 1],
        [0, 0, 1, 1],
        [1, 0, 0, 0],
        [0, 0, 0, 1],
        [1, 1, 0, 0],
        [-1, 0, 1, 0],
        [0, 1, 0, -1],
    ];
    let v = [
        [1, 0, 0, 1],
        [1, 0, 0, 0],
        [0, 1, 0, -1],
        [-1, 0, 1, 0],
        [0, 0, 0, 1],
        [1, 1, 0, 0],
        [0, 0, 1, 1],
    ];
    let w = [
        [1, 0, 0, 1],
        [0, 1, 0, -1],
        [0, 0, 1, 1],
        [1, 1, 0, 0],
        [-1, 0, 1, 0],
        [0, 0, 0, 1],
        [1, 0, 0, 0],
    ];
    let rows = |m: &[[i64; 4]; 7]| m.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    let mut s = Scheme::from_coefficients(
        Format::new(2, 2, 2).unwrap(),
        &rows(&u),
        &rows(&v),
        &rows(&w),
    )
    .expect("static scheme is well formed");
    s.normalize();
    s
}

impl Scheme {
    /// Drops the last column of `B` and `C`, then reduces: `(m, n, p) → (m, n, p − 1)`.
    pub fn project(&self) -> Result<Scheme> {
        let f = self.format();
        let (m, n, p) = (f.m(), f.n(), f.p());
        if p < 2 {
            return Err(Error::DimensionTooSmall(f));
        }
        let out = Format::new(m, n, p - 1)?;
        let terms = self
            .terms()
            .iter()
            .map(|t| {
                let v = remap(n * (p - 1), t.v(), |y| {
                    let (j, k) = (y / p, y % p);
                    (k + 1 < p).then(|| j * (p - 1) + k)
                });
                let w = remap((p - 1) * m, t.w(), |z| (z < (p - 1) * m).then_some(z));
                Term::new(*t.u(), v, w)
            })
            .collect();
        let mut s = finish(out, terms);
        s.reduce();
        Ok(s)
    }

    /// Appends a schoolbook `(m, n, 1)` block for a new last column:
    /// `(m, n, p: r) → (m, n, p + 1: r + mn)`.
    pub fn extend(&self) -> Result<Scheme> {
        let f = self.format();
        let (m, n, p) = (f.m(), f.n(), f.p());
        let out = Format::new(m, n, p + 1)?;
        let q = p + 1;
        let mut terms: Vec<Term> = self
            .terms()
            .iter()
            .map(|t| {
                let v = remap(n * q, t.v(), |y| Some(y / p * q + y % p));
                let w = remap(q * m, t.w(), Some);
                Term::new(*t.u(), v, w)
            })
            .collect();
        for i in 0..m {
            for j in 0..n {
                terms.push(Term::new(
                    TritVector::unit(m * n, i * n + j)?,
                    TritVector::unit(n * q, j * q + p)?,
                    TritVector::unit(q * m, p * m + i)?,
                ));
            }
        }
        Ok(finish(out, terms))
    }

    /// Places `self` on the first `p1` columns and `other` on the next `p2`:
    /// `(m, n, p1: r1) + (m, n, p2: r2) → (m, n, p1 + p2: r1 + r2)`.
    pub fn merge(&self, other: &Scheme) -> Result<Scheme> {
        let (f1, f2) = (self.format(), other.format());
        if f1.m() != f2.m() || f1.n() != f2.n() {
            return Err(Error::FormatMismatch(f1, f2));
        }
        let (m, n, p1, p2) = (f1.m(), f1.n(), f1.p(), f2.p());
        let q = p1 + p2;
        let out = Format::new(m, n, q)?;
        let first = self.terms().iter().map(|t| {
            Term::new(
                *t.u(),
                remap(n * q, t.v(), |y| Some(y / p1 * q + y % p1)),
                remap(q * m, t.w(), Some),
            )
        });
        let second = other.terms().iter().map(|t| {
            Term::new(
                *t.u(),
                remap(n * q, t.v(), |y| Some(y / p2 * q + p1 + y % p2)),
                remap(q * m, t.w(), |z| Some(z + p1 * m)),
            )
        });
        Ok(finish(out, first.chain(second).collect()))
    }

    /// `merge(self, self)`.
    pub fn double(&self) -> Result<Scheme> {
        self.merge(self)
    }

    /// Tensor (Kronecker) product; `self` indexes the outer blocks.
    pub fn product(&self, other: &Scheme) -> Result<Scheme> {
        let (f1, f2) = (self.format(), other.format());
        let (m1, n1, p1) = (f1.m(), f1.n(), f1.p());
        let (m2, n2, p2) = (f2.m(), f2.n(), f2.p());
        let (m, n, p) = (m1 * m2, n1 * n2, p1 * p2);
        let out = Format::new(m, n, p)?;
        let kron = |a: &TritVector,
                    b: &TritVector,
                    len: usize,
                    (r2, c2): (usize, usize),
                    (c1, cols): (usize, usize)| {
            // a is an r1 x c1 matrix, b is r2 x c2; output is (r1 r2) x (c1 c2)
            let mut values = vec![0i8; len];
            for (x, sa) in a.nonzeros() {
                let (ra, ca) = (x / c1, x % c1);
                for (y, sb) in b.nonzeros() {
                    let (rb, cb) = (y / c2, y % c2);
                    let row = ra * r2 + rb;
                    let col = ca * c2 + cb;
                    values[row * cols + col] = sa * sb;
                }
            }
            TritVector::from_integers(&values).expect("products of trits are trits")
        };
        let mut terms = Vec::with_capacity(self.rank() * other.rank());
        for t1 in self.terms() {
            for t2 in other.terms() {
                terms.push(Term::new(
                    kron(t1.u(), t2.u(), m * n, (m2, n2), (n1, n)),
                    kron(t1.v(), t2.v(), n * p, (n2, p2), (p1, p)),
                    kron(t1.w(), t2.w(), p * m, (p2, m2), (m1, m)),
                ));
            }
        }
        Ok(finish(out, terms))
    }

    /// 2x2 block composition: the product with Strassen's scheme on the
    /// outside, `(m, n, p: r) → (2m, 2n, 2p: 7r)`.
    pub fn block_compose(&self) -> Result<Scheme> {
        strassen().product(self)
    }

    /// Cyclic role rotation `(u, v, w) → (v, w, u)`: `(m, n, p) → (n, p, m)`.
    fn rotated(&self) -> Scheme {
        let f = self.format();
        let out = Format::new(f.n(), f.p(), f.m()).expect("same capacity");
        let terms = self
            .terms()
            .iter()
            .map(|t| Term::new(*t.v(), *t.w(), *t.u()))
            .collect();
        finish(out, terms)
    }

    /// Transposition `C^T = B^T A^T`: `(m, n, p) → (p, n, m)`.
    fn transposed(&self) -> Scheme {
        let f = self.format();
        let (m, n, p) = (f.m(), f.n(), f.p());
        let out = Format::new(p, n, m).expect("same capacity");
        let terms = self
            .terms()
            .iter()
            .map(|t| {
                // u'[k][j] = v[j][k], v'[j][i] = u[i][j], w'[i][k] = w[k][i]
                let u = remap(p * n, t.v(), |y| Some((y % p) * n + y / p));
                let v = remap(n * m, t.u(), |x| Some((x % n) * m + x / n));
                let w = remap(m * p, t.w(), |z| Some((z % m) * p + z / m));
                Term::new(u, v, w)
            })
            .collect();
        finish(out, terms)
    }

    /// Reorders the format dimensions through the symmetries of the matrix
    /// multiplication tensor. The rank is unchanged.
    pub fn swap_sizes(&self, perm: SizePerm) -> Result<Scheme> {
        Ok(match perm {
            [0, 1, 2] => self.normalized(),
            [1, 2, 0] => self.rotated(),
            [2, 0, 1] => self.rotated().rotated(),
            [2, 1, 0] => self.transposed(),
            [1, 0, 2] => self.transposed().rotated(),
            [0, 2, 1] => self.transposed().rotated().rotated(),
            _ => {
                return Err(Error::Parse(format!(
                    "{perm:?} is not a permutation of [0, 1, 2]"
                )))
            }
        })
    }
}

/// The permutation undoing `perm`.
pub fn inverse_perm(perm: SizePerm) -> SizePerm {
    let mut inv = [0; 3];
    for (t, &s) in perm.iter().enumerate() {
        inv[s] = t;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(m: usize, n: usize, p: usize) -> Format {
        Format::new(m, n, p).unwrap()
    }

    #[test]
    fn strassen_is_correct() {
        let s = strassen();
        assert_eq!(s.rank(), 7);
        assert!(s.verify().passed());
        assert_eq!(s.nonzeros(), 36);
        assert_eq!(s.additive_complexity(), 18);
    }

    #[test]
    fn project_naive() {
        let s = Scheme::naive(f(2, 2, 2)).project().unwrap();
        assert_eq!(s.format(), f(2, 2, 1));
        assert_eq!(s.rank(), 4);
        assert!(s.verify().passed());
        assert!(matches!(
            Scheme::naive(f(2, 2, 1)).project(),
            Err(Error::DimensionTooSmall(_))
        ));
    }

    #[test]
    fn extend_naive() {
        let s = Scheme::naive(f(2, 2, 1)).extend().unwrap();
        assert_eq!(s.format(), f(2, 2, 2));
        assert_eq!(s.rank(), 8);
        assert!(s.verify().passed());
        assert_eq!(s.canonical_key(), Scheme::naive(f(2, 2, 2)).canonical_key());
        assert!(matches!(
            Scheme::naive(f(4, 4, 16)).extend(),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn merge_naive_with_strassen() {
        let s = Scheme::naive(f(2, 2, 1)).merge(&strassen()).unwrap();
        assert_eq!(s.format(), f(2, 2, 3));
        assert_eq!(s.rank(), 11);
        assert!(s.verify().passed());
        assert!(matches!(
            strassen().merge(&Scheme::naive(f(2, 3, 2))),
            Err(Error::FormatMismatch(..))
        ));
    }

    #[test]
    fn double_variants() {
        let d = strassen().double().unwrap();
        assert_eq!((d.format(), d.rank()), (f(2, 2, 4), 14));
        assert!(d.verify().passed());
        assert_eq!(d, strassen().merge(&strassen()).unwrap());

        let one = Scheme::naive(f(1, 1, 1)).double().unwrap();
        assert_eq!((one.format(), one.rank()), (f(1, 1, 2), 2));
        assert!(one.verify().passed());
    }

    #[test]
    fn product_of_strassens() {
        let s = strassen().product(&strassen()).unwrap();
        assert_eq!((s.format(), s.rank()), (f(4, 4, 4), 49));
        assert!(s.verify().passed());

        let id = strassen().product(&Scheme::naive(f(1, 1, 1))).unwrap();
        assert_eq!(id.canonical_key(), strassen().canonical_key());

        let mixed = Scheme::naive(f(1, 2, 3))
            .product(&Scheme::naive(f(2, 1, 2)))
            .unwrap();
        assert_eq!((mixed.format(), mixed.rank()), (f(2, 2, 6), 24));
        assert!(mixed.verify().passed());
    }

    #[test]
    fn block_compose_sizes() {
        let s = Scheme::naive(f(1, 2, 1)).block_compose().unwrap();
        assert_eq!((s.format(), s.rank()), (f(2, 4, 2), 14));
        assert!(s.verify().passed());
    }

    #[test]
    fn swap_sizes_all_perms() {
        let s = Scheme::naive(f(2, 3, 4))
            .project()
            .unwrap()
            .merge(&Scheme::naive(f(2, 3, 1)))
            .unwrap();
        for perm in SIZE_PERMS {
            let t = s.swap_sizes(perm).unwrap();
            let d = s.format().dims();
            assert_eq!(t.format().dims(), [d[perm[0]], d[perm[1]], d[perm[2]]]);
            assert_eq!(t.rank(), s.rank());
            assert!(t.verify().passed(), "{perm:?}");
            let back = t.swap_sizes(inverse_perm(perm)).unwrap();
            assert_eq!(back.canonical_key(), s.canonical_key(), "{perm:?}");
        }
        assert!(s.swap_sizes([0, 0, 1]).is_err());
    }
}
