//! Expansion calculus on polynomial tuples.
//!
//! The pieces, bottom up:
//!
//! * [`poly`]: dense real polynomials, calculus, Sturm-chain real roots and
//!   interval extrema of `|p|`.
//! * [`tuple_calculus`]: polynomial tuples with the componentwise derivative
//!   and integral operators and the tuple representation of a polynomial.
//! * [`expansion`]: the expansion map, boundary points of its iterates and the
//!   boundary integral.
//! * [`geometry`]: boundary rotations (permutations), stability and spherical
//!   defoliation.
//! * [`bounds`]: certificates for the inequality chains linking the boundary
//!   integral to boundary-point gaps.
//! * [`runners`]: circular-track runner simulation, conditional gap bounds and
//!   a brute-force lonely-runner oracle.
//! * [`cli`] and [`report`]: the `expansionlab` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod expansion;
pub mod geometry;
pub mod poly;
pub mod report;
pub mod runners;
pub mod tuple_calculus;

pub use error::{Error, Result};
pub use expansion::{BoundarySet, ExpansionConfig};
pub use poly::Polynomial;
pub use tuple_calculus::{PointTuple, PolyTuple};
