//! Positional scoring rules for rank aggregation.
//!
//! A [`Profile`] holds the finishing order of every race over a common
//! roster. A [`ScoreTable`] assigns points to positions (possibly over
//! several lexicographic tie-break rounds), and [`aggregate`] turns the two
//! into a [`TotalRanking`]. On top of that the crate provides:
//!
//! - [`rules`]: the geometric family `p^(k-j)` with Borda, generalised
//!   plurality and generalised antiplurality as members, custom tables and
//!   the linear-equivalence relation;
//! - [`axioms`]: predicates for the unanimity, majority and reversal axioms
//!   and seeded randomized checkers;
//! - [`witness`]: constructive counterexample profiles;
//! - [`optimal`]: optimal scores estimated from cardinal performance data
//!   and least-squares fitting of a geometric parameter.
//!
//! Ordinal aggregation defaults to exact rational arithmetic so that ties
//! are detected without tolerance. `f64` tables are supported through the
//! same [`Scalar`] trait.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod aggregate;
pub mod axioms;
mod error;
pub mod optimal;
pub mod profile;
pub mod rules;
pub mod scalar;
pub mod witness;

pub use aggregate::{aggregate, total_scores, TotalRanking, WeakOrder};
pub use error::{Error, Result};
pub use profile::{Athlete, Profile, RaceRanking};
pub use rules::{linear_equiv, GeometricParam, ScoreTable, Tiebreak, TrimPolicy};
pub use scalar::{Rational, Scalar};
