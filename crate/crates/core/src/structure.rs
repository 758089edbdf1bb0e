//! Goodness, fullness, relative fullness, and the additive-decomposition
//! solver over a point set's incidence system.
//!
//! The incidence system pairs points (rows) with their distinct
//! coordinates (columns). Goodness of a set is exactly linear
//! independence of its rows; the counting identity `N(S) - (n-1) = |S|`
//! upgrades a good set to full; relative fullness asks the column-side
//! kernel to be nothing but the `n-1` constant shifts.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::model::{build_index, CoordFunctionBundle, CoordinateIndex, PointFunction, PointSet};
use crate::ratio::Rat;

/// The 0/1 points-by-coordinates matrix of a set, with both exact and
/// integer views of its rows.
pub struct IncidenceSystem<'a> {
    set: &'a PointSet,
    index: CoordinateIndex,
    rows: Vec<Vec<usize>>,
}

impl<'a> IncidenceSystem<'a> {
    pub fn new(set: &'a PointSet) -> Self {
        let index = build_index(set);
        let rows = set
            .iter()
            .map(|p| index.columns_of(p).expect("point indexed"))
            .collect();
        IncidenceSystem { set, index, rows }
    }

    pub fn set(&self) -> &PointSet {
        self.set
    }

    pub fn index(&self) -> &CoordinateIndex {
        &self.index
    }

    /// `N(S)`, the number of distinct coordinates.
    pub fn coordinates(&self) -> usize {
        self.index.total()
    }

    /// Column ids carried by point `i`, one per axis.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    /// The full `|S| x N` incidence matrix.
    pub fn matrix(&self) -> Mat {
        let mut m = Mat::zero(self.set.len(), self.coordinates());
        for (i, row) in self.rows.iter().enumerate() {
            for &c in row {
                *m.at_mut(i, c) = Rat::from_integer(1.into());
            }
        }
        m
    }

    /// Integer incidence rows for the chosen points (all `N` columns).
    pub(crate) fn int_rows_for(&self, indices: &[usize]) -> Vec<Vec<i128>> {
        indices
            .iter()
            .map(|&i| {
                let mut row = vec![0i128; self.coordinates()];
                for &c in &self.rows[i] {
                    row[c] = 1;
                }
                row
            })
            .collect()
    }

    /// The transposed incidence restricted to the chosen points:
    /// `N` rows, one column per chosen point. Its kernel holds the
    /// coefficient vectors whose formal sum vanishes coordinate-wise.
    pub fn marginal_matrix_for(&self, indices: &[usize]) -> Mat {
        let mut m = Mat::zero(self.coordinates(), indices.len());
        for (j, &i) in indices.iter().enumerate() {
            for &c in &self.rows[i] {
                *m.at_mut(c, j) = Rat::from_integer(1.into());
            }
        }
        m
    }

    /// Rank of the incidence rows of the chosen points.
    pub(crate) fn rank_of(&self, indices: &[usize]) -> usize {
        linalg::intmat::rank_int(&self.int_rows_for(indices))
    }

    pub fn rank(&self) -> usize {
        self.rank_of(&(0..self.set.len()).collect::<Vec<_>>())
    }
}

/// True iff every function on `S` decomposes additively; equivalently,
/// the incidence rows are linearly independent and `S` carries no weak
/// loop.
pub fn is_good(set: &PointSet) -> bool {
    let sys = IncidenceSystem::new(set);
    sys.rank() == set.len()
}

/// True iff `S` is good and the counting identity `N(S) - (n-1) = |S|`
/// holds.
pub fn is_full(set: &PointSet) -> Result<bool> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let sys = IncidenceSystem::new(set);
    Ok(sys.rank() == set.len() && set.len() + set.dim() == sys.coordinates() + 1)
}

/// True iff anchored decompositions over `S` are unique: the column-side
/// kernel has dimension exactly `n - 1`, i.e. `rank = N - (n-1)`.
///
/// The kernel always contains the constant shifts `u_i += c_i` with
/// `sum c_i = 0`, so the rank can never exceed `N - (n-1)`; relative
/// fullness is the equality case.
pub fn is_relatively_full(set: &PointSet) -> Result<bool> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let sys = IncidenceSystem::new(set);
    Ok(sys.rank() + set.dim() == sys.coordinates() + 1)
}

/// One anchor label per axis `0..n-2`; decompositions pin `u_i` to zero
/// at the anchors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorSet {
    anchors: Vec<(usize, String)>,
}

impl AnchorSet {
    /// Anchors at the lexicographically least label of each axis
    /// `0..n-2`.
    pub fn defaults(set: &PointSet) -> Result<AnchorSet> {
        if set.dim() >= 2 && set.is_empty() {
            return Err(Error::EmptySet);
        }
        let index = build_index(set);
        let anchors = (0..set.dim() - 1)
            .map(|axis| {
                let label = index
                    .projection(axis)
                    .iter()
                    .next()
                    .expect("non-empty projection")
                    .clone();
                (axis, label)
            })
            .collect();
        Ok(AnchorSet { anchors })
    }

    /// Validates one anchor per axis `0..n-2` with labels drawn from the
    /// set's projections.
    pub fn new(set: &PointSet, mut anchors: Vec<(usize, String)>) -> Result<AnchorSet> {
        anchors.sort();
        let expected: Vec<usize> = (0..set.dim() - 1).collect();
        let axes: Vec<usize> = anchors.iter().map(|(a, _)| *a).collect();
        if axes != expected {
            return Err(Error::InvalidAnchor(format!(
                "need exactly one anchor per axis 0..{}",
                set.dim().saturating_sub(1)
            )));
        }
        let index = build_index(set);
        for (axis, label) in &anchors {
            if !index.projection(*axis).contains(label) {
                return Err(Error::InvalidAnchor(format!(
                    "label {label:?} not in the axis-{axis} projection"
                )));
            }
        }
        Ok(AnchorSet { anchors })
    }

    pub fn anchors(&self) -> &[(usize, String)] {
        &self.anchors
    }
}

/// An additive decomposition together with the dimension of the
/// remaining solution freedom (0 iff the anchored solution is unique).
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub bundle: CoordFunctionBundle,
    pub freedom_dim: usize,
}

/// Solves `u_1 + ... + u_n = f` with `u_i = 0` at each anchor, returning
/// the free-variables-zero representative, or `None` when `f` does not
/// decompose.
pub fn solve_decomposition(
    set: &PointSet,
    f: &PointFunction,
    anchors: &AnchorSet,
) -> Result<Option<Decomposition>> {
    if f.values().len() != set.len() {
        return Err(Error::FunctionDomain(format!(
            "{} values for {} points",
            f.values().len(),
            set.len()
        )));
    }
    if anchors.anchors().len() + 1 != set.dim() {
        return Err(Error::InvalidAnchor(format!(
            "{} anchors for dimension {}",
            anchors.anchors().len(),
            set.dim()
        )));
    }
    let sys = IncidenceSystem::new(set);
    let n_cols = sys.coordinates();
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(set.len() + anchors.anchors().len());
    let mut rhs: Vec<Rat> = Vec::with_capacity(rows.capacity());
    for i in 0..set.len() {
        let mut row = vec![Rat::zero(); n_cols];
        for &c in sys.row(i) {
            row[c] = Rat::from_integer(1.into());
        }
        rows.push(row);
        rhs.push(f.value(i).clone());
    }
    for (axis, label) in anchors.anchors() {
        let c = sys.index().column(*axis, label).ok_or_else(|| {
            Error::InvalidAnchor(format!("label {label:?} not in the axis-{axis} projection"))
        })?;
        let mut row = vec![Rat::zero(); n_cols];
        row[c] = Rat::from_integer(1.into());
        rows.push(row);
        rhs.push(Rat::zero());
    }
    let stacked = Mat::from_rows(rows)?;
    let Some(solution) = linalg::solve_linear(&stacked, &rhs)? else {
        return Ok(None);
    };
    let freedom_dim = n_cols - linalg::rank(&stacked);
    let mut per_axis: Vec<BTreeMap<String, Rat>> = vec![BTreeMap::new(); set.dim()];
    for (c, value) in solution.iter().enumerate() {
        let (axis, label) = sys.index().coordinate(c);
        per_axis[axis].insert(label.to_string(), value.clone());
    }
    Ok(Some(Decomposition {
        bundle: CoordFunctionBundle::new(per_axis),
        freedom_dim,
    }))
}

/// True iff `f` decomposes additively over `S`, decided by pairing `f`
/// against the fundamental loop measures of a maximal good subset.
pub fn is_good_function(set: &PointSet, f: &PointFunction) -> Result<bool> {
    if f.values().len() != set.len() {
        return Err(Error::FunctionDomain(format!(
            "{} values for {} points",
            f.values().len(),
            set.len()
        )));
    }
    let m = crate::loops::maximal_good_subset(set);
    let basis = crate::loops::uperp_fundamental_basis(set, &m)?;
    for mu in &basis {
        let pairing: Rat = mu.values().iter().zip(f.values()).map(|(a, b)| a * b).sum();
        if !pairing.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Summary of a set's incidence structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub n: usize,
    pub size: usize,
    pub coordinates: usize,
    pub good: bool,
    /// `None` for the empty set, where fullness is undefined.
    pub full: Option<bool>,
    pub relatively_full: Option<bool>,
    pub rank: usize,
    /// Dimension of the column-side kernel (coordinate functions summing
    /// to zero on every point).
    pub kernel_dim: usize,
    /// `|S| - rank`, the number of dependent points.
    pub excess: usize,
}

pub fn structure_report(set: &PointSet) -> StructureReport {
    let sys = IncidenceSystem::new(set);
    let rank = sys.rank();
    let coordinates = sys.coordinates();
    let good = rank == set.len();
    StructureReport {
        n: set.dim(),
        size: set.len(),
        coordinates,
        good,
        full: (!set.is_empty()).then(|| good && set.len() + set.dim() == coordinates + 1),
        relatively_full: (!set.is_empty()).then(|| rank + set.dim() == coordinates + 1),
        rank,
        kernel_dim: coordinates - rank,
        excess: set.len() - rank,
    }
}
