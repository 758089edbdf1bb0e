//! Loop measures, the annihilator of the good functions, and exact
//! enumeration of the extreme points of the marginal-free unit ball
//! `A = {mu : all one-dimensional marginals vanish, |mu|_1 <= 1}`.
//!
//! Extreme points are enumerated generically, without consulting the
//! loop machinery: the ball is lifted to `mu = p - q` with slack `t`,
//! basic feasible solutions of the lifted equality system are scanned,
//! and survivors are filtered by complementarity and by their
//! active-constraint system. Agreement with the loop route is what the
//! acceptance suite checks.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, intmat, Mat};
use crate::loops::{loop_coefficients, LoopCert};
use crate::model::{Point, PointSet};
use crate::ratio::{l1_norm, Rat};
use crate::structure::IncidenceSystem;
use crate::POLYTOPE_BOUND;

/// A rational signed measure on a point set, values in canonical point
/// order, with its total-variation norm cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    values: Vec<Rat>,
    norm: Rat,
}

impl Measure {
    pub fn new(set: &PointSet, values: Vec<Rat>) -> Result<Self> {
        if values.len() != set.len() {
            return Err(Error::FunctionDomain(format!(
                "{} values for {} points",
                values.len(),
                set.len()
            )));
        }
        let norm = l1_norm(&values);
        Ok(Measure { values, norm })
    }

    /// Builds from `(point, value)` pairs; unlisted points carry zero.
    pub fn from_pairs(set: &PointSet, pairs: &[(Point, Rat)]) -> Result<Self> {
        let mut values = vec![Rat::zero(); set.len()];
        for (p, v) in pairs {
            let i = set
                .index_of(p)
                .ok_or_else(|| Error::PointNotInSet(p.to_string()))?;
            values[i] = v.clone();
        }
        Ok(Measure {
            norm: l1_norm(&values),
            values,
        })
    }

    pub fn zero(set: &PointSet) -> Self {
        Measure {
            values: vec![Rat::zero(); set.len()],
            norm: Rat::zero(),
        }
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn norm(&self) -> &Rat {
        &self.norm
    }

    pub fn is_zero(&self) -> bool {
        self.norm.is_zero()
    }

    /// Indices of the points carrying non-zero mass.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn negated(&self) -> Measure {
        Measure {
            values: self.values.iter().map(|v| -v.clone()).collect(),
            norm: self.norm.clone(),
        }
    }
}

/// The transposed incidence map: `N` coordinate rows against `|S|`
/// point columns. Applying it to a measure yields all one-dimensional
/// marginals; the annihilator of the good functions is exactly its
/// kernel.
pub struct MarginalMap {
    rows: Vec<Vec<usize>>,
    coordinates: usize,
    points: usize,
}

impl MarginalMap {
    pub fn new(set: &PointSet) -> Self {
        let sys = IncidenceSystem::new(set);
        MarginalMap {
            rows: (0..set.len()).map(|i| sys.row(i).to_vec()).collect(),
            coordinates: sys.coordinates(),
            points: set.len(),
        }
    }

    pub fn coordinates(&self) -> usize {
        self.coordinates
    }

    /// The marginal vector, one entry per coordinate column.
    pub fn apply(&self, mu: &Measure) -> Result<Vec<Rat>> {
        if mu.values().len() != self.points {
            return Err(Error::FunctionDomain("measure/set size mismatch".into()));
        }
        let mut sums = vec![Rat::zero(); self.coordinates];
        for (i, v) in mu.values().iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for &c in &self.rows[i] {
                sums[c] += v;
            }
        }
        Ok(sums)
    }

    /// The matrix itself, for rank and kernel queries.
    pub fn matrix(&self) -> Mat {
        let mut m = Mat::zero(self.coordinates, self.points);
        for (i, row) in self.rows.iter().enumerate() {
            for &c in row {
                *m.at_mut(c, i) = Rat::from_integer(1.into());
            }
        }
        m
    }
}

/// All one-dimensional marginals of a measure, indexed by coordinate
/// column.
pub fn marginals(set: &PointSet, mu: &Measure) -> Result<Vec<Rat>> {
    MarginalMap::new(set).apply(mu)
}

/// The normalized loop measure `mu_L(x_j) = n_j / sum_k |n_k|`, zero off
/// the loop. Its norm is 1 and its marginals vanish.
pub fn loop_measure(set: &PointSet, cert: &LoopCert) -> Result<Measure> {
    cert.validate(set)?;
    let total = Rat::from_integer(cert.coeff_abs_sum());
    let mut values = vec![Rat::zero(); set.len()];
    for (p, c) in cert.points().iter().zip(cert.coeffs()) {
        let i = set.index_of(p).expect("validated membership");
        values[i] = Rat::from_integer(c.clone()) / &total;
    }
    let mu = Measure {
        norm: l1_norm(&values),
        values,
    };
    debug_assert!(mu.norm.is_one());
    Ok(mu)
}

/// Dimension of the annihilator of the good functions: `|S| - rank`.
pub fn uperp_dimension(set: &PointSet) -> usize {
    let sys = IncidenceSystem::new(set);
    set.len() - sys.rank()
}

/// Kernel dimension of the marginal map restricted to a support:
/// `dim {v : marginals vanish, supp(v) within the given indices}`.
fn support_kernel_dim(sys: &IncidenceSystem<'_>, indices: &[usize]) -> usize {
    indices.len() - sys.rank_of(indices)
}

/// All extreme points of the marginal-free unit ball, in canonical order
/// with opposite-sign pairs adjacent (positive orientation first). For a
/// good set the ball is `{0}` and the zero measure is reported as its
/// unique extreme point.
pub fn enumerate_extreme_points(set: &PointSet) -> Result<Vec<Measure>> {
    if set.len() > POLYTOPE_BOUND {
        return Err(Error::BoundExceeded {
            what: "extreme-point enumeration",
            bound: POLYTOPE_BOUND,
            actual: set.len(),
        });
    }
    let sys = IncidenceSystem::new(set);
    let s = set.len();
    let n_marginal_rows = sys.coordinates();
    // Lifted system: columns p_1..p_s, q_1..q_s, t.
    // Marginal rows: B p - B q = 0. Norm row: 1'p + 1'q + t = 1.
    let ncols = 2 * s + 1;
    let mut rows: Vec<Vec<i128>> = vec![vec![0; ncols]; n_marginal_rows + 1];
    for i in 0..s {
        for &c in sys.row(i) {
            rows[c][i] = 1;
            rows[c][s + i] = -1;
        }
    }
    for slot in rows[n_marginal_rows].iter_mut().take(2 * s) {
        *slot = 1;
    }
    rows[n_marginal_rows][2 * s] = 1;
    let rhs: Vec<i128> = (0..=n_marginal_rows)
        .map(|r| if r == n_marginal_rows { 1 } else { 0 })
        .collect();
    let basis_size = intmat::rank_int(&rows);

    let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for cols in (0..ncols).combinations(basis_size) {
        let candidate = match solve_basis(&rows, &rhs, &cols) {
            Some(z) => z,
            None => continue,
        };
        // Feasibility and complementarity.
        if candidate.iter().any(|v| v.is_negative()) {
            continue;
        }
        let mut mu = vec![Rat::zero(); s];
        let mut complementary = true;
        let mut full = vec![Rat::zero(); ncols];
        for (k, &c) in cols.iter().enumerate() {
            full[c] = candidate[k].clone();
        }
        for i in 0..s {
            if !full[i].is_zero() && !full[s + i].is_zero() {
                complementary = false;
                break;
            }
            mu[i] = &full[i] - &full[s + i];
        }
        if !complementary {
            continue;
        }
        let support: Vec<usize> = (0..s).filter(|&i| !mu[i].is_zero()).collect();
        if support.is_empty() {
            if uperp_dimension(set) == 0 {
                seen.insert(mu);
            }
            continue;
        }
        if support_kernel_dim(&sys, &support) != 1 {
            continue;
        }
        debug_assert!(l1_norm(&mu).is_one());
        seen.insert(mu);
    }

    order_with_pairs(set, seen)
}

/// Solves the lifted system restricted to a column subset; `None` when
/// the subset is not a feasible basis.
fn solve_basis(rows: &[Vec<i128>], rhs: &[i128], cols: &[usize]) -> Option<Vec<Rat>> {
    let aug: Vec<Vec<i128>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, &b)| {
            let mut r: Vec<i128> = cols.iter().map(|&c| row[c]).collect();
            r.push(b);
            r
        })
        .collect();
    match intmat::solve_unique(aug) {
        intmat::SolveInt::Unique(x) => Some(x.into_iter().map(|f| f.to_rat()).collect()),
        intmat::SolveInt::Inconsistent | intmat::SolveInt::Underdetermined => None,
        intmat::SolveInt::Overflow => {
            // Exact fallback over the rationals.
            let m = Mat::from_rows(
                rows.iter()
                    .map(|row| {
                        cols.iter()
                            .map(|&c| Rat::from_integer(row[c].into()))
                            .collect()
                    })
                    .collect(),
            )
            .expect("rectangular");
            if linalg::rank(&m) != cols.len() {
                return None;
            }
            let b: Vec<Rat> = rhs.iter().map(|&v| Rat::from_integer(v.into())).collect();
            linalg::solve_linear(&m, &b).expect("dimensions agree")
        }
    }
}

/// Orders dedup'd extreme points: the zero measure alone, otherwise
/// sign-paired with the positively oriented member first, pairs sorted
/// lexicographically by that member's value vector.
fn order_with_pairs(set: &PointSet, seen: BTreeSet<Vec<Rat>>) -> Result<Vec<Measure>> {
    let mut out = Vec::new();
    let mut reps: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for values in &seen {
        if values.iter().all(Zero::is_zero) {
            out.push(Measure::zero(set));
            continue;
        }
        let first = values.iter().find(|v| !v.is_zero()).expect("non-zero");
        let rep: Vec<Rat> = if first.is_negative() {
            values.iter().map(|v| -v.clone()).collect()
        } else {
            values.clone()
        };
        reps.insert(rep);
    }
    for rep in reps {
        let neg: Vec<Rat> = rep.iter().map(|v| -v.clone()).collect();
        debug_assert!(
            seen.contains(&rep) && seen.contains(&neg),
            "the ball is symmetric, so vertices come in opposite pairs"
        );
        out.push(Measure::new(set, rep)?);
        out.push(Measure::new(set, neg)?);
    }
    Ok(out)
}

/// Decides extremality of a member of the ball: norm exactly 1, support
/// a loop, and the values equal to a signed loop measure. The zero
/// measure is extreme exactly when the ball is `{0}`.
pub fn is_extreme(set: &PointSet, mu: &Measure) -> Result<bool> {
    let margs = marginals(set, mu)?;
    if margs.iter().any(|v| !v.is_zero()) {
        return Err(Error::MarginalsNotZero);
    }
    if mu.norm() > &Rat::one() {
        return Err(Error::NormAboveOne(crate::ratio::format_rat(mu.norm())));
    }
    if mu.is_zero() {
        return Ok(uperp_dimension(set) == 0);
    }
    if !mu.norm().is_one() {
        return Ok(false);
    }
    let sys = IncidenceSystem::new(set);
    let support = mu.support();
    if support_kernel_dim(&sys, &support) != 1 {
        return Ok(false);
    }
    let cert = loop_coefficients(&set.subset(&support))?;
    let reference = loop_measure(set, &cert)?;
    Ok(mu == &reference || mu == &reference.negated())
}
