//! Finite subsets of an n-fold product space, with canonical point order
//! and coordinate indexing.
//!
//! A [`PointSet`] holds distinct points of `X_1 x ... x X_n`, where each
//! axis is an abstract label alphabet. Points are kept in a canonical
//! (lexicographic) order so that every downstream computation is
//! deterministic. A [`CoordinateIndex`] assigns one column id to each
//! distinct `(axis, label)` coordinate; the count of those columns is the
//! quantity `N(S)` that drives the fullness arithmetic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ratio::Rat;

/// One element of the product space: a tuple of per-axis labels.
///
/// Labels are opaque strings; no numeric interpretation is ever applied.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    coords: Vec<String>,
}

impl Point {
    pub fn new<I, S>(coords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Point {
            coords: coords.into_iter().map(Into::into).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn label(&self, axis: usize) -> &str {
        &self.coords[axis]
    }

    pub fn labels(&self) -> &[String] {
        &self.coords
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.join(","))
    }
}

/// A finite set of distinct points with a fixed ambient dimension.
///
/// Points are stored in canonical order: lexicographic by label tuple.
/// Insertion order is normalized away at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    n: usize,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(n: usize, points: Vec<Point>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        for p in &points {
            if p.dim() != n {
                return Err(Error::WrongArity {
                    expected: n,
                    got: p.dim(),
                });
            }
        }
        let mut points = points;
        points.sort();
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicatePoint(w[0].to_string()));
            }
        }
        Ok(PointSet { n, points })
    }

    /// Builds a set from string-slice tuples; convenient in tests.
    pub fn from_rows(n: usize, rows: &[&[&str]]) -> Result<Self> {
        let points = rows.iter().map(|r| Point::new(r.iter().copied())).collect();
        PointSet::new(n, points)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Position of `p` in the canonical order, if present.
    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.index_of(p).is_some()
    }

    /// The subset at the given canonical indices (need not be sorted).
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        let mut idx: Vec<usize> = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        PointSet {
            n: self.n,
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }

    /// True if every point of `other` is a point of `self`.
    pub fn contains_set(&self, other: &PointSet) -> bool {
        other.n == self.n && other.iter().all(|p| self.contains(p))
    }

    /// Canonical indices of `other`'s points within `self`.
    pub fn indices_of(&self, other: &PointSet) -> Option<Vec<usize>> {
        other.iter().map(|p| self.index_of(p)).collect()
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Column ids for the distinct coordinates of a point set.
///
/// Column ids are assigned in first-appearance order scanning points in
/// canonical order, axes left to right within a point, so repeated calls
/// agree exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateIndex {
    n: usize,
    columns: BTreeMap<(usize, String), usize>,
    by_column: Vec<(usize, String)>,
    projections: Vec<BTreeSet<String>>,
}

impl CoordinateIndex {
    /// Total coordinate count `N = sum_i |Pi_i S|`.
    pub fn total(&self) -> usize {
        self.by_column.len()
    }

    pub fn column(&self, axis: usize, label: &str) -> Option<usize> {
        self.columns.get(&(axis, label.to_string())).copied()
    }

    /// The `(axis, label)` coordinate carried by a column id.
    pub fn coordinate(&self, column: usize) -> (usize, &str) {
        let (axis, label) = &self.by_column[column];
        (*axis, label)
    }

    /// The projection `Pi_i S` as a label set.
    pub fn projection(&self, axis: usize) -> &BTreeSet<String> {
        &self.projections[axis]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Column ids of a point, one per axis.
    pub fn columns_of(&self, p: &Point) -> Option<Vec<usize>> {
        (0..self.n).map(|i| self.column(i, p.label(i))).collect()
    }
}

/// Builds the coordinate index of a set.
pub fn build_index(set: &PointSet) -> CoordinateIndex {
    let n = set.dim();
    let mut columns = BTreeMap::new();
    let mut by_column = Vec::new();
    let mut projections = vec![BTreeSet::new(); n];
    for p in set.iter() {
        for (axis, projection) in projections.iter_mut().enumerate() {
            let key = (axis, p.label(axis).to_string());
            if !columns.contains_key(&key) {
                columns.insert(key.clone(), by_column.len());
                by_column.push(key);
            }
            projection.insert(p.label(axis).to_string());
        }
    }
    CoordinateIndex {
        n,
        columns,
        by_column,
        projections,
    }
}

/// An exact rational-valued function on a point set, stored in canonical
/// point order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointFunction {
    values: Vec<Rat>,
}

impl PointFunction {
    /// A function from values listed in the set's canonical order.
    pub fn from_values(set: &PointSet, values: Vec<Rat>) -> Result<Self> {
        if values.len() != set.len() {
            return Err(Error::FunctionDomain(format!(
                "{} values for {} points",
                values.len(),
                set.len()
            )));
        }
        Ok(PointFunction { values })
    }

    /// A function from `(point, value)` pairs; every point of the set must
    /// appear exactly once.
    pub fn from_pairs(set: &PointSet, pairs: &[(Point, Rat)]) -> Result<Self> {
        let mut values: Vec<Option<Rat>> = vec![None; set.len()];
        for (p, v) in pairs {
            let i = set
                .index_of(p)
                .ok_or_else(|| Error::FunctionDomain(format!("unknown point {p}")))?;
            if values[i].is_some() {
                return Err(Error::FunctionDomain(format!("point {p} listed twice")));
            }
            values[i] = Some(v.clone());
        }
        let values: Option<Vec<Rat>> = values.into_iter().collect();
        match values {
            Some(v) => Ok(PointFunction { values: v }),
            None => Err(Error::FunctionDomain(
                "function is not defined on every point".into(),
            )),
        }
    }

    pub fn zero(set: &PointSet) -> Self {
        PointFunction {
            values: vec![Rat::zero(); set.len()],
        }
    }

    pub fn value(&self, i: usize) -> &Rat {
        &self.values[i]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }
}

/// One rational-valued function per axis, each defined on that axis's
/// projection. This is the shape of an additive decomposition
/// `f(x_1,...,x_n) = u_1(x_1) + ... + u_n(x_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordFunctionBundle {
    per_axis: Vec<BTreeMap<String, Rat>>,
}

impl CoordFunctionBundle {
    pub fn new(per_axis: Vec<BTreeMap<String, Rat>>) -> Self {
        CoordFunctionBundle { per_axis }
    }

    pub fn dim(&self) -> usize {
        self.per_axis.len()
    }

    pub fn axis(&self, i: usize) -> &BTreeMap<String, Rat> {
        &self.per_axis[i]
    }

    /// `u_1(x_1) + ... + u_n(x_n)` at a point.
    pub fn sum_at(&self, p: &Point) -> Option<Rat> {
        let mut acc = Rat::zero();
        for (axis, map) in self.per_axis.iter().enumerate() {
            acc += map.get(p.label(axis))?;
        }
        Some(acc)
    }
}

pub mod doc {
    //! JSON interchange documents.
    //!
    //! Point sets: `{"n": 2, "points": [["a","x"], ["b","x"]]}`.
    //! Functions and measures: `{"values": [{"point": ["a","x"], "value": "1/2"}]}`.
    //! Rationals travel as canonical `"p/q"` strings.

    use serde::{Deserialize, Serialize};

    use super::{Point, PointFunction, PointSet};
    use crate::error::{Error, Result};
    use crate::ratio::{format_rat, parse_rat, Rat};

    #[derive(Debug, Clone, Serialize, Deserialize)]
    pub struct PointSetDoc {
        pub n: usize,
        pub points: Vec<Vec<String>>,
    }

    #[derive(Debug, Clone, Serialize, Deserialize)]
    pub struct ValueEntry {
        pub point: Vec<String>,
        pub value: String,
    }

    #[derive(Debug, Clone, Serialize, Deserialize)]
    pub struct ValuesDoc {
        pub values: Vec<ValueEntry>,
    }

    /// Parses and validates a point-set document.
    pub fn parse_point_set(text: &str) -> Result<PointSet> {
        let doc: PointSetDoc =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        point_set_from_doc(&doc)
    }

    pub fn point_set_from_doc(doc: &PointSetDoc) -> Result<PointSet> {
        let points = doc
            .points
            .iter()
            .map(|labels| Point::new(labels.iter().cloned()))
            .collect();
        PointSet::new(doc.n, points)
    }

    pub fn point_set_to_doc(set: &PointSet) -> PointSetDoc {
        PointSetDoc {
            n: set.dim(),
            points: set.iter().map(|p| p.labels().to_vec()).collect(),
        }
    }

    /// Canonical serialization: points in canonical order, two-space
    /// indentation, trailing newline.
    pub fn write_point_set(set: &PointSet) -> String {
        let mut s = serde_json::to_string_pretty(&point_set_to_doc(set)).expect("serialize");
        s.push('\n');
        s
    }

    /// Parses `(point, value)` pairs against a set; duplicates rejected,
    /// unknown points rejected.
    pub fn parse_value_pairs(set: &PointSet, text: &str) -> Result<Vec<(Point, Rat)>> {
        let doc: ValuesDoc =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        doc.values
            .iter()
            .map(|e| {
                let p = Point::new(e.point.iter().cloned());
                if !set.contains(&p) {
                    return Err(Error::FunctionDomain(format!("unknown point {p}")));
                }
                Ok((p, parse_rat(&e.value)?))
            })
            .collect()
    }

    /// Parses a total function document over `set`.
    pub fn parse_function(set: &PointSet, text: &str) -> Result<PointFunction> {
        let pairs = parse_value_pairs(set, text)?;
        PointFunction::from_pairs(set, &pairs)
    }

    /// Values in canonical point order as a document.
    pub fn values_to_doc(set: &PointSet, values: &[Rat]) -> ValuesDoc {
        ValuesDoc {
            values: set
                .iter()
                .zip(values)
                .map(|(p, v)| ValueEntry {
                    point: p.labels().to_vec(),
                    value: format_rat(v),
                })
                .collect(),
        }
    }
}
