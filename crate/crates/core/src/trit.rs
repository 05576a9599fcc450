//! Packed vectors over {-1, 0, 1}.
//!
//! A [`TritVector`] stores up to 64 coefficients in two machine words:
//! `digits` marks the non-zero positions and `signs` marks which of those
//! are negative. Element `i` lives in bit `i`. Addition and subtraction are
//! evaluated word-wide and report overflow (a sum of `±2`) through the
//! `valid` flag instead of failing, so callers can reject a candidate
//! transformation cheaply.

use std::fmt;

use thiserror::Error;

/// Maximum number of coefficients a [`TritVector`] can hold.
pub const MAX_TRITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TritError {
    #[error("coefficient {value} at position {index} is outside {{-1, 0, 1}}")]
    OutOfDomain { index: usize, value: i64 },
    #[error("vector length {0} is outside 1..=64")]
    Length(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// Relation between two vectors as seen by [`TritVector::compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Equal,
    Negated,
    Distinct,
}

/// Sign of the first non-zero coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeadSign {
    Positive,
    Negative,
    Zero,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TritVector {
    len: u8,
    digits: u64,
    signs: u64,
    valid: bool,
}

#[inline]
fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl TritVector {
    /// The all-zero vector of the given length.
    pub fn zero(len: usize) -> Result<Self, TritError> {
        if len == 0 || len > MAX_TRITS {
            return Err(TritError::Length(len));
        }
        Ok(Self {
            len: len as u8,
            digits: 0,
            signs: 0,
            valid: true,
        })
    }

    /// Vector with a single `+1` at `index`.
    pub fn unit(len: usize, index: usize) -> Result<Self, TritError> {
        let mut v = Self::zero(len)?;
        if index >= len {
            return Err(TritError::Length(index + 1));
        }
        v.digits = 1 << index;
        Ok(v)
    }

    pub fn from_integers<T>(values: &[T]) -> Result<Self, TritError>
    where
        T: Copy + Into<i64>,
    {
        let mut v = Self::zero(values.len())?;
        for (index, &value) in values.iter().enumerate() {
            match value.into() {
                0 => {}
                1 => v.digits |= 1 << index,
                -1 => {
                    v.digits |= 1 << index;
                    v.signs |= 1 << index;
                }
                value => return Err(TritError::OutOfDomain { index, value }),
            }
        }
        Ok(v)
    }

    /// Builds a vector straight from its two words.
    ///
    /// Bits above `len` are rejected, and sign bits must sit on non-zero
    /// positions.
    pub fn from_words(len: usize, digits: u64, signs: u64) -> Result<Self, TritError> {
        let mut v = Self::zero(len)?;
        if digits & !mask(len) != 0 || signs & !digits != 0 {
            return Err(TritError::OutOfDomain {
                index: (digits | signs).trailing_zeros() as usize,
                value: 2,
            });
        }
        v.digits = digits;
        v.signs = signs;
        Ok(v)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    /// Always false; vectors have at least one coefficient.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn digits(&self) -> u64 {
        self.digits
    }

    #[inline]
    pub fn signs(&self) -> u64 {
        self.signs
    }

    #[inline]
    pub fn is_valid(&self) -> bool {
        self.valid
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.digits == 0
    }

    /// Coefficient at `index` as an integer in {-1, 0, 1}.
    #[inline]
    pub fn get(&self, index: usize) -> i8 {
        debug_assert!(index < self.len());
        let bit = 1u64 << index;
        if self.digits & bit == 0 {
            0
        } else if self.signs & bit == 0 {
            1
        } else {
            -1
        }
    }

    pub fn to_integers(&self) -> Vec<i8> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    #[inline]
    fn check_len(&self, other: &Self) -> Result<(), TritError> {
        if self.len != other.len {
            Err(TritError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Word-level sum without the length check.
    #[inline]
    pub(crate) fn add_raw(self, b: Self) -> Self {
        let a = self;
        let digits = a.digits ^ b.digits;
        let signs = ((a.signs & a.digits) | (b.signs & b.digits)) & digits;
        let valid = a.valid && b.valid && (a.digits & b.digits & !(a.signs ^ b.signs)) == 0;
        Self {
            len: a.len,
            digits,
            signs,
            valid,
        }
    }

    /// Word-level difference without the length check.
    #[inline]
    pub(crate) fn sub_raw(self, b: Self) -> Self {
        let a = self;
        let digits = a.digits ^ b.digits;
        let signs = ((a.signs & a.digits) | (!b.signs & b.digits)) & digits;
        let valid = a.valid && b.valid && (a.digits & b.digits & (a.signs ^ b.signs)) == 0;
        Self {
            len: a.len,
            digits,
            signs,
            valid,
        }
    }

    /// Elementwise sum. The result has `valid == false` when any position
    /// would leave {-1, 0, 1}.
    // fallible on length, so not `ops::Add`
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Self) -> Result<Self, TritError> {
        self.check_len(&other)?;
        Ok(self.add_raw(other))
    }

    /// Elementwise difference, with the same overflow rule as [`add`](Self::add).
    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Self) -> Result<Self, TritError> {
        self.check_len(&other)?;
        Ok(self.sub_raw(other))
    }

    #[inline]
    pub fn negate(self) -> Self {
        Self {
            signs: !self.signs & self.digits,
            ..self
        }
    }

    #[inline]
    pub(crate) fn relation_raw(&self, other: &Self) -> Relation {
        if self.digits == other.digits {
            if self.signs == other.signs {
                return Relation::Equal;
            }
            if self.digits != 0 && self.signs == (!other.signs & other.digits) {
                return Relation::Negated;
            }
        }
        Relation::Distinct
    }

    pub fn compare(&self, other: &Self) -> Result<Relation, TritError> {
        self.check_len(other)?;
        Ok(self.relation_raw(other))
    }

    /// Number of non-zero coefficients.
    #[inline]
    pub fn weight(&self) -> u32 {
        self.digits.count_ones()
    }

    #[inline]
    pub fn first_nonzero_sign(&self) -> LeadSign {
        if self.digits == 0 {
            LeadSign::Zero
        } else if self.signs & (self.digits & self.digits.wrapping_neg()) != 0 {
            LeadSign::Negative
        } else {
            LeadSign::Positive
        }
    }

    /// Iterates `(index, coefficient)` over the non-zero positions.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        let mut rest = self.digits;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let index = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let value = if self.signs >> index & 1 == 1 { -1 } else { 1 };
            Some((index, value))
        })
    }
}

impl fmt::Debug for TritVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TritVector({self}")?;
        if !self.valid {
            write!(f, ", invalid")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for TritVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.get(i))?;
        }
        write!(f, "]")
    }
}
