//! Discovery, transformation and verification of fast matrix multiplication
//! schemes whose coefficients lie in {-1, 0, 1}.
//!
//! A [`Scheme`] is a list of rank-one terms `u ⊗ v ⊗ w` over packed
//! [`TritVector`]s. Local moves (flip, plus, split, reduce) walk the space
//! of schemes of one format; meta operators (project, extend, merge,
//! product, swap sizes) move between formats. The [`search`] module runs a
//! population of random walks over both, and [`io`] persists the best
//! scheme per format.

pub mod bundled;
pub mod error;
pub mod invariants;
pub mod io;
pub mod lifting;
pub mod local_ops;
pub mod meta_ops;
pub mod scheme;
pub mod search;
pub mod trit;

pub use error::{Error, Result};
pub use invariants::{compute_invariants, factor_rank, InvariantReport};
pub use lifting::{lift, lift_many, BinaryScheme, LiftOutcome};
pub use local_ops::{Expansion, FlipCandidate, Orientation, Rejected};
pub use meta_ops::{strassen, SizePerm, SIZE_PERMS};
pub use scheme::{BrentFailure, Format, Role, Scheme, Term, Verification};
pub use search::{BestRegistry, Mode, SearchConfig};
pub use trit::{LeadSign, Relation, TritError, TritVector};
