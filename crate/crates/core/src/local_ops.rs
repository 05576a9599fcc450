//! Local moves on a scheme of fixed format: flip, plus, split, expand and
//! reduce.
//!
//! Every move is all-or-nothing. The replacement vectors are computed first
//! and the scheme is only touched when all of them stay inside {-1, 0, 1};
//! otherwise the move returns [`Rejected::Overflow`] and the scheme is left
//! as it was.

use rand::Rng;
use thiserror::Error;

use crate::scheme::{Role, Scheme, Term};
use crate::trit::Relation;

/// Role orders used by [`Scheme::plus`]: `[shared-left, shared-right, third]`.
pub const ROLE_ORDERS: [[Role; 3]; 6] = [
    [Role::U, Role::V, Role::W],
    [Role::U, Role::W, Role::V],
    [Role::V, Role::U, Role::W],
    [Role::V, Role::W, Role::U],
    [Role::W, Role::U, Role::V],
    [Role::W, Role::V, Role::U],
];

/// Tries per expand call when looking for an eligible pair.
const EXPAND_DRAWS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Rejected {
    #[error("ternary overflow")]
    Overflow,
    #[error("not applicable: {0}")]
    Ineligible(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Equal,
    Negated,
}

/// Two terms whose `role` factors agree, possibly up to sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlipCandidate {
    pub role: Role,
    pub i: usize,
    pub j: usize,
    pub orientation: Orientation,
}

impl FlipCandidate {
    /// The same pair with `i` and `j` exchanged.
    pub fn reversed(self) -> Self {
        Self {
            i: self.j,
            j: self.i,
            ..self
        }
    }
}

/// Which move [`Scheme::expand`] ended up applying.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expansion {
    Plus {
        i: usize,
        j: usize,
        order: [Role; 3],
    },
    Split {
        i: usize,
        j: usize,
        role: Role,
    },
}

fn check_pair(s: &Scheme, i: usize, j: usize) -> Result<(), Rejected> {
    if i == j {
        return Err(Rejected::Ineligible("row indices must differ"));
    }
    if i >= s.rank() || j >= s.rank() {
        return Err(Rejected::Ineligible("row index out of range"));
    }
    Ok(())
}

impl Scheme {
    /// Collects every flip candidate into `out` (cleared first).
    ///
    /// `U` and `V` pairs must be equal; `W` pairs may also be negatives of
    /// each other. Zero factors are skipped and each pair appears once with
    /// `i < j`.
    pub fn flip_candidates_into(&self, out: &mut Vec<FlipCandidate>) {
        out.clear();
        let terms = self.terms();
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                for role in Role::ALL {
                    let a = terms[i].factor(role);
                    if a.is_zero() {
                        continue;
                    }
                    let orientation = match a.relation_raw(terms[j].factor(role)) {
                        Relation::Equal => Orientation::Equal,
                        Relation::Negated if role == Role::W => Orientation::Negated,
                        _ => continue,
                    };
                    out.push(FlipCandidate {
                        role,
                        i,
                        j,
                        orientation,
                    });
                }
            }
        }
    }

    pub fn flip_candidates(&self) -> Vec<FlipCandidate> {
        let mut out = Vec::new();
        self.flip_candidates_into(&mut out);
        out
    }

    /// Rank-preserving flip.
    ///
    /// With shared factor `a` (`a_i = a_j`) and the two other roles `b`, `c`
    /// (their order picked by `swap_sides`):
    /// `a⊗b_i⊗c_i + a⊗b_j⊗c_j → a⊗(b_i + b_j)⊗c_i + a⊗b_j⊗(c_j − c_i)`.
    /// A negated pair first rescales term `j` by `-1` on the shared factor
    /// and on `b`. Both touched terms are re-normalized.
    pub fn flip(&mut self, c: FlipCandidate, swap_sides: bool) -> Result<(), Rejected> {
        check_pair(self, c.i, c.j)?;
        let (mut b, mut cc) = c.role.others();
        if swap_sides {
            std::mem::swap(&mut b, &mut cc);
        }
        let ti = self.terms()[c.i];
        let mut tj = self.terms()[c.j];
        if c.orientation == Orientation::Negated {
            tj.set(c.role, tj.factor(c.role).negate());
            tj.set(b, tj.factor(b).negate());
        }
        if ti.factor(c.role) != tj.factor(c.role) {
            return Err(Rejected::Ineligible("shared factors differ"));
        }
        let bi = ti.factor(b).add_raw(*tj.factor(b));
        let cj = tj.factor(cc).sub_raw(*ti.factor(cc));
        if !bi.is_valid() || !cj.is_valid() {
            return Err(Rejected::Overflow);
        }
        let terms = self.terms_mut();
        terms[c.i].set(b, bi);
        tj.set(cc, cj);
        terms[c.j] = tj;
        terms[c.i].normalize();
        terms[c.j].normalize();
        Ok(())
    }

    /// Rank +1 move for rows whose three factors all differ:
    /// `a_i⊗b_i⊗c_i + a_j⊗b_j⊗c_j → a_i⊗(b_i+b_j)⊗c_i + a_i⊗b_j⊗(c_j−c_i) + (a_j−a_i)⊗b_j⊗c_j`
    /// where `order = [a, b, c]`.
    pub fn plus(&mut self, i: usize, j: usize, order: [Role; 3]) -> Result<(), Rejected> {
        check_pair(self, i, j)?;
        let [ra, rb, rc] = order;
        let (ti, tj) = (self.terms()[i], self.terms()[j]);
        for role in Role::ALL {
            if ti.factor(role).relation_raw(tj.factor(role)) != Relation::Distinct {
                return Err(Rejected::Ineligible(
                    "plus needs three distinct factor pairs",
                ));
            }
        }
        let (ai, bi, ci) = (*ti.factor(ra), *ti.factor(rb), *ti.factor(rc));
        let (aj, bj, cj) = (*tj.factor(ra), *tj.factor(rb), *tj.factor(rc));
        let b_sum = bi.add_raw(bj);
        let c_diff = cj.sub_raw(ci);
        let a_diff = aj.sub_raw(ai);
        if !(b_sum.is_valid() && c_diff.is_valid() && a_diff.is_valid()) {
            return Err(Rejected::Overflow);
        }
        let mut new_i = ti;
        new_i.set(rb, b_sum);
        let mut new_j = ti;
        new_j.set(rb, bj);
        new_j.set(rc, c_diff);
        let mut extra = tj;
        extra.set(ra, a_diff);
        for t in [&mut new_i, &mut new_j, &mut extra] {
            t.normalize();
        }
        let terms = self.terms_mut();
        terms[i] = new_i;
        terms[j] = new_j;
        terms.push(extra);
        Ok(())
    }

    /// Rank +1 move on one role:
    /// `a_i⊗b_i⊗c_i + a_j⊗b_j⊗c_j → a_j⊗b_i⊗c_i + a_j⊗b_j⊗c_j + (a_i−a_j)⊗b_i⊗c_i`.
    pub fn split(&mut self, i: usize, j: usize, role: Role) -> Result<(), Rejected> {
        check_pair(self, i, j)?;
        let (ti, tj) = (self.terms()[i], self.terms()[j]);
        let (ai, aj) = (*ti.factor(role), *tj.factor(role));
        if ai.relation_raw(&aj) != Relation::Distinct {
            return Err(Rejected::Ineligible("split needs distinct factors"));
        }
        let diff = ai.sub_raw(aj);
        if !diff.is_valid() {
            return Err(Rejected::Overflow);
        }
        let mut new_i = ti;
        new_i.set(role, aj);
        let mut extra = ti;
        extra.set(role, diff);
        new_i.normalize();
        extra.normalize();
        let terms = self.terms_mut();
        terms[i] = new_i;
        terms.push(extra);
        Ok(())
    }

    /// Applies `plus` or `split` (fair coin) to a random eligible pair.
    ///
    /// Eligible pairs are found by rejection sampling over uniform draws; the
    /// drawn move is applied once and an overflow is reported, not retried.
    pub fn expand<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Expansion, Rejected> {
        let r = self.rank();
        if r < 2 {
            return Err(Rejected::Ineligible("expand needs rank >= 2"));
        }
        let use_plus = rng.random_bool(0.5);
        for _ in 0..EXPAND_DRAWS {
            let i = rng.random_range(0..r);
            let mut j = rng.random_range(0..r - 1);
            if j >= i {
                j += 1;
            }
            let (ti, tj) = (&self.terms()[i], &self.terms()[j]);
            if use_plus {
                let eligible = Role::ALL.iter().all(|&role| {
                    ti.factor(role).relation_raw(tj.factor(role)) == Relation::Distinct
                });
                if eligible {
                    let order = ROLE_ORDERS[rng.random_range(0..ROLE_ORDERS.len())];
                    self.plus(i, j, order)?;
                    return Ok(Expansion::Plus { i, j, order });
                }
            } else {
                let role = Role::ALL[rng.random_range(0..3)];
                if ti.factor(role).relation_raw(tj.factor(role)) == Relation::Distinct {
                    self.split(i, j, role)?;
                    return Ok(Expansion::Split { i, j, role });
                }
            }
        }
        Err(Rejected::Ineligible("no eligible pair found"))
    }

    /// Tries to merge term `j` into term `i`; returns whether it did.
    fn try_merge(&mut self, i: usize, j: usize) -> bool {
        let (ti, tj) = (self.terms()[i], self.terms()[j]);
        for merged in Role::ALL {
            let (ra, rb) = merged.others();
            let rel_a = ti.factor(ra).relation_raw(tj.factor(ra));
            let rel_b = ti.factor(rb).relation_raw(tj.factor(rb));
            if rel_a == Relation::Distinct || rel_b == Relation::Distinct {
                continue;
            }
            let opposite = (rel_a == Relation::Negated) != (rel_b == Relation::Negated);
            let c = if opposite {
                ti.factor(merged).sub_raw(*tj.factor(merged))
            } else {
                ti.factor(merged).add_raw(*tj.factor(merged))
            };
            if !c.is_valid() {
                continue;
            }
            let terms = self.terms_mut();
            terms[i].set(merged, c);
            terms[i].normalize();
            terms.swap_remove(j);
            return true;
        }
        false
    }

    /// Removes terms with a zero factor and merges pairs sharing two
    /// factors (up to sign) until neither applies. Returns the rank drop.
    pub fn reduce(&mut self) -> usize {
        let before = self.rank();
        self.terms_mut().retain(|t| !t.has_zero_factor());
        'outer: loop {
            let r = self.rank();
            for i in 0..r {
                for j in i + 1..r {
                    if self.try_merge(i, j) {
                        if self.terms()[i].has_zero_factor() {
                            self.terms_mut().swap_remove(i);
                        }
                        continue 'outer;
                    }
                }
            }
            break;
        }
        before - self.rank()
    }

    /// Like [`reduce`](Self::reduce) but only examines pairs involving the
    /// given rows (and rows produced by merging them).
    pub fn reduce_around(&mut self, rows: &[usize]) -> usize {
        let before = self.rank();
        let mut work: Vec<usize> = rows.iter().copied().filter(|&i| i < before).collect();
        while let Some(i) = work.pop() {
            if i >= self.rank() {
                continue;
            }
            if self.terms()[i].has_zero_factor() {
                let last = self.rank() - 1;
                self.terms_mut().swap_remove(i);
                relabel(&mut work, last, i);
                continue;
            }
            let mut merged_at = None;
            for j in 0..self.rank() {
                if j != i && self.try_merge(i, j) {
                    merged_at = Some(j);
                    break;
                }
            }
            if let Some(j) = merged_at {
                // swap_remove(j) moved the old last row into slot j
                let last = self.rank();
                work.retain(|&w| w != j);
                relabel(&mut work, last, j);
                let i = if i == last { j } else { i };
                work.push(i);
            }
        }
        before - self.rank()
    }

    /// Clone-and-apply form of [`flip`](Self::flip).
    pub fn flipped(&self, c: FlipCandidate, swap_sides: bool) -> Result<Scheme, Rejected> {
        let mut s = self.clone();
        s.flip(c, swap_sides)?;
        Ok(s)
    }

    /// Clone-and-apply form of [`reduce`](Self::reduce).
    pub fn reduced(&self) -> Scheme {
        let mut s = self.clone();
        s.reduce();
        s
    }

    /// Builds a scheme with an extra term appended; used by tests and tools.
    pub fn with_term(&self, term: Term) -> Scheme {
        let mut terms = self.terms().to_vec();
        terms.push(term);
        Scheme::from_parts_unchecked(self.format(), terms)
    }
}

fn relabel(work: &mut [usize], from: usize, to: usize) {
    for w in work.iter_mut() {
        if *w == from {
            *w = to;
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::scheme::Format;
    use crate::trit::TritVector;

    fn naive(m: usize, n: usize, p: usize) -> Scheme {
        Scheme::naive(Format::new(m, n, p).unwrap())
    }

    fn tv(values: &[i64]) -> TritVector {
        TritVector::from_integers(values).unwrap()
    }

    #[test]
    fn naive_u_candidates() {
        let s = naive(2, 2, 2);
        let c = s.flip_candidates();
        // rows 0 (a11 b11) and 1 (a11 b12) share u
        assert!(c.contains(&FlipCandidate {
            role: Role::U,
            i: 0,
            j: 1,
            orientation: Orientation::Equal
        }));
        // 8 rows, each u shared by 2 rows, each v by 2, each w by 2
        assert_eq!(c.len(), 12);
    }

    #[test]
    fn distinct_rows_have_no_candidates() {
        let f = Format::new(1, 2, 1).unwrap();
        let s = Scheme::new(
            f,
            vec![
                Term::new(tv(&[1, 0]), tv(&[1, 0]), tv(&[1])),
                Term::new(tv(&[0, 1]), tv(&[0, 1]), tv(&[-1])),
            ],
        )
        .unwrap();
        assert!(s.flip_candidates().iter().all(|c| c.role == Role::W));
        let s = Scheme::new(
            f,
            vec![
                Term::new(tv(&[1, 0]), tv(&[1, 0]), tv(&[1])),
                Term::new(tv(&[0, 1]), tv(&[1, 1]), tv(&[0])),
            ],
        )
        .unwrap();
        assert!(s.flip_candidates().is_empty());
    }

    #[test]
    fn flip_on_naive_matches_formula() {
        let mut s = naive(2, 2, 2);
        let c = FlipCandidate {
            role: Role::U,
            i: 0,
            j: 1,
            orientation: Orientation::Equal,
        };
        let w0 = *s.terms()[0].w();
        let w1 = *s.terms()[1].w();
        s.flip(c, false).unwrap();
        // b = V gets the sum, c = W gets the difference
        assert_eq!(s.terms()[0].v().to_integers(), vec![1, 1, 0, 0]);
        assert_eq!(*s.terms()[1].w(), w1.sub(w0).unwrap());
        assert_eq!(s.rank(), 8);
        assert!(s.verify().passed());
    }

    #[test]
    fn flip_overflow_is_rejected() {
        let f = Format::new(1, 2, 1).unwrap();
        // u shared; v vectors collide at position 0 with equal signs
        let mut s = Scheme::new(
            f,
            vec![
                Term::new(tv(&[1, 0]), tv(&[1, 0]), tv(&[1])),
                Term::new(tv(&[1, 0]), tv(&[1, 1]), tv(&[1])),
            ],
        )
        .unwrap();
        let before = s.clone();
        let c = FlipCandidate {
            role: Role::U,
            i: 0,
            j: 1,
            orientation: Orientation::Equal,
        };
        assert_eq!(s.flip(c, false), Err(Rejected::Overflow));
        assert_eq!(s, before);
    }

    #[test]
    fn plus_and_split_grow_rank() {
        let mut s = naive(2, 2, 2);
        // rows 0 = (a11,b11,c11) and 7 = (a22,b22,c22) differ everywhere
        s.plus(0, 7, [Role::U, Role::V, Role::W]).unwrap();
        assert_eq!(s.rank(), 9);
        assert!(s.verify().passed());

        let mut s = naive(2, 2, 2);
        assert!(matches!(
            s.plus(0, 1, [Role::U, Role::V, Role::W]),
            Err(Rejected::Ineligible(_))
        ));

        let mut s = naive(2, 2, 2);
        s.split(0, 2, Role::U).unwrap();
        assert_eq!(s.rank(), 9);
        assert!(s.verify().passed());
        // after the split rows 0 and 2 share u
        assert!(matches!(
            s.split(0, 2, Role::U),
            Err(Rejected::Ineligible(_))
        ));
    }

    #[test]
    fn plus_overflow_on_difference() {
        let f = Format::new(1, 2, 2).unwrap();
        let mut s = Scheme::new(
            f,
            vec![
                Term::new(tv(&[1, 0]), tv(&[1, 0, 0, 0]), tv(&[1, 0])),
                Term::new(tv(&[-1, 1]), tv(&[0, 1, 0, 0]), tv(&[0, 1])),
            ],
        )
        .unwrap();
        // u_j − u_i = [-2, 1]
        assert_eq!(
            s.plus(0, 1, [Role::U, Role::V, Role::W]),
            Err(Rejected::Overflow)
        );
    }

    #[test]
    fn expand_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut s = naive(2, 2, 2);
        s.expand(&mut rng).unwrap();
        assert_eq!(s.rank(), 9);
        assert!(s.verify().passed());

        let mut one = naive(1, 1, 1);
        assert!(matches!(one.expand(&mut rng), Err(Rejected::Ineligible(_))));
    }

    #[test]
    fn reduce_merges_and_drops() {
        let s = naive(2, 2, 2);
        let dup = s.terms()[0];
        // a duplicated row whose w's sum to 2 cannot merge, so negate w and
        // add a third copy: (t) + (t with -w) + (t) has rank 3 → 1
        let mut neg = dup;
        neg.set(Role::W, dup.w().negate());
        let mut t = s.with_term(neg).with_term(dup);
        assert!(t.verify().passed());
        assert_eq!(t.reduce(), 2);
        assert_eq!(t.rank(), 8);
        assert!(t.verify().passed());

        let zero_w = Term::new(*dup.u(), *dup.v(), TritVector::zero(4).unwrap());
        let mut z = s.with_term(zero_w);
        assert_eq!(z.reduce(), 1);
        assert_eq!(z, s);

        let mut n = naive(2, 2, 2);
        assert_eq!(n.reduce(), 0);
        assert_eq!(n, naive(2, 2, 2));
    }

    #[test]
    fn reduce_honours_negated_pairs() {
        let base = naive(1, 1, 2);
        let t0 = base.terms()[0];
        // (-u) ⊗ v ⊗ w cancels t0; merging it with t0 gives w - w = 0
        let mut neg = t0;
        neg.set(Role::U, t0.u().negate());
        let mut s = base.with_term(neg).with_term(t0);
        assert!(s.verify().passed());
        assert_eq!(s.reduce(), 2);
        assert_eq!(s.rank(), 2);
        assert!(s.verify().passed());
    }

    #[test]
    fn reduce_around_matches_full_reduce() {
        let s = naive(2, 2, 2);
        let dup = s.terms()[5];
        let mut neg = dup;
        neg.set(Role::W, dup.w().negate());
        let t = s.with_term(neg).with_term(dup);
        let mut a = t.clone();
        a.reduce_around(&[8, 9]);
        let mut b = t.clone();
        b.reduce();
        assert_eq!(a.rank(), b.rank());
        assert!(a.verify().passed());
    }
}
