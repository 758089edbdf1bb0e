//! Exact decision procedures for additive decomposability of finite
//! subsets of n-fold product spaces.
//!
//! A finite set `S` inside `X_1 x ... x X_n` is *good* when every
//! function on it splits as `f(x_1,...,x_n) = u_1(x_1) + ... + u_n(x_n)`.
//! This crate decides goodness, fullness, and relative fullness; solves
//! the decomposition itself; extracts and enumerates loops (the circuits
//! of the point/coordinate incidence matroid); partitions sets into
//! related and maximal relatively full components; and enumerates the
//! extreme points of the unit ball of marginal-free signed measures.
//! All arithmetic is exact rational; every enumeration is deterministic.

pub mod components;
pub mod error;
pub mod generator;
pub mod linalg;
pub mod loops;
pub mod measures;
pub mod model;
pub mod ratio;
pub mod structure;

pub use error::{Error, Result};
pub use model::{
    build_index, CoordFunctionBundle, CoordinateIndex, Point, PointFunction, PointSet,
};
pub use ratio::{format_rat, parse_rat, Rat};

/// Largest point count the exhaustive component oracles will scan.
pub const ORACLE_BOUND: usize = 14;
/// Largest point count loop enumeration will scan.
pub const ENUMERATION_BOUND: usize = 16;
/// Largest point count extreme-point enumeration will scan.
pub const POLYTOPE_BOUND: usize = 10;
