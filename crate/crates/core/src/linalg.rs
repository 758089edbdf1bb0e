//! Exact rational dense linear algebra: rank, null-space bases, linear
//! solves, and integer primitivization.
//!
//! Elimination is fraction-free (Bareiss): rows are cleared to integers
//! and each update `(p*a - h*b) / prev` divides exactly by the previous
//! pivot, so intermediate entries stay minors of the input instead of
//! blowing up. Pivoting is deterministic: leftmost column, first
//! non-zero row.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::Rat;

/// Dense rational matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer-entry constructor, mostly for tests.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| crate::ratio::rat_int(v)).collect())
                .collect(),
        )
        .expect("rectangular")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum::<Rat>())
            .collect())
    }
}

/// Clears denominators: multiplies the row by the lcm of its denominators.
fn integerize_row(row: &[Rat]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for v in row {
        lcm = lcm.lcm(v.denom());
    }
    row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
}

fn integer_rows(m: &Mat) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|r| integerize_row(m.row(r))).collect()
}

/// Integer arithmetic used by the shared elimination routine. `i128`
/// reports overflow through `None`; `BigInt` never fails.
pub(crate) trait ElimInt: Clone + Sized {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn is_zero_value(&self) -> bool;
    fn mul_checked(&self, other: &Self) -> Option<Self>;
    fn sub_checked(&self, other: &Self) -> Option<Self>;
    /// Exact division; the divisor is non-zero and divides exactly by the
    /// Bareiss minor identity. A remainder means a bug, not bad input.
    fn div_exact(&self, other: &Self) -> Self;
}

impl ElimInt for i128 {
    fn zero_value() -> Self {
        0
    }
    fn one_value() -> Self {
        1
    }
    fn is_zero_value(&self) -> bool {
        *self == 0
    }
    fn mul_checked(&self, other: &Self) -> Option<Self> {
        i128::checked_mul(*self, *other)
    }
    fn sub_checked(&self, other: &Self) -> Option<Self> {
        i128::checked_sub(*self, *other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        debug_assert_eq!(self % other, 0, "inexact Bareiss division");
        self / other
    }
}

impl ElimInt for BigInt {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul_checked(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn sub_checked(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        debug_assert!(Zero::is_zero(&(self % other)), "inexact Bareiss division");
        self / other
    }
}

/// Pivot positions `(row, col)` of an echelonized matrix, in elimination
/// order.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    pub pivots: Vec<(usize, usize)>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Fraction-free forward elimination in place. Returns `None` only if the
/// integer type overflows (callers then retry with `BigInt`).
pub(crate) fn echelon<T: ElimInt>(m: &mut [Vec<T>]) -> Option<Echelon> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = T::one_value();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero_value()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            let head = std::mem::replace(&mut m[i][c], T::zero_value());
            if head.is_zero_value() {
                // Still rescale: Bareiss keeps every row at the same minor
                // depth so later exact divisions stay exact.
                for j in c + 1..cols {
                    let a = m[r][c].mul_checked(&m[i][j])?;
                    m[i][j] = a.div_exact(&prev);
                }
                continue;
            }
            for j in c + 1..cols {
                let a = m[r][c].mul_checked(&m[i][j])?;
                let b = head.mul_checked(&m[r][j])?;
                m[i][j] = a.sub_checked(&b)?.div_exact(&prev);
            }
        }
        prev = m[r][c].clone();
        pivots.push((r, c));
        r += 1;
    }
    Some(Echelon { pivots })
}

/// Exact rank over the rationals.
pub fn rank(m: &Mat) -> usize {
    let mut rows = integer_rows(m);
    echelon(&mut rows)
        .expect("BigInt elimination cannot overflow")
        .rank()
}

/// Back-substitution on an echelonized integer matrix: free columns take
/// the prescribed values, pivot columns are solved bottom-up.
fn back_substitute(
    rows: &[Vec<BigInt>],
    ech: &Echelon,
    ncols: usize,
    free_values: impl Fn(usize) -> Rat,
) -> Vec<Rat> {
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    let mut x = vec![Rat::zero(); ncols];
    for (c, slot) in x.iter_mut().enumerate() {
        if !pivot_cols.contains(&c) {
            *slot = free_values(c);
        }
    }
    for &(r, c) in ech.pivots.iter().rev() {
        let mut acc = Rat::zero();
        for j in c + 1..ncols {
            if !rows[r][j].is_zero() {
                acc += Rat::from_integer(rows[r][j].clone()) * &x[j];
            }
        }
        x[c] = -acc / Rat::from_integer(rows[r][c].clone());
    }
    x
}

/// Flips the sign so the first non-zero entry is positive.
fn sign_normalize(mut v: Vec<Rat>) -> Vec<Rat> {
    if let Some(first) = v.iter().find(|e| !e.is_zero()) {
        if first.is_negative() {
            for e in &mut v {
                *e = -e.clone();
            }
        }
    }
    v
}

/// Exact basis of `{v : Mv = 0}`.
///
/// One vector per free column, free columns in ascending order, the
/// reduced-echelon convention (the chosen free variable set to 1, the
/// rest to 0), each vector sign-normalized so its first non-zero entry
/// is positive.
pub fn nullspace_basis(m: &Mat) -> Vec<Vec<Rat>> {
    let mut rows = integer_rows(m);
    let ech = echelon(&mut rows).expect("BigInt elimination cannot overflow");
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    (0..m.cols())
        .filter(|c| !pivot_cols.contains(c))
        .map(|f| {
            let v = back_substitute(&rows, &ech, m.cols(), |c| {
                if c == f {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            });
            sign_normalize(v)
        })
        .collect()
}

/// One exact solution of `Mx = b` with free variables set to zero, or
/// `None` when the system is inconsistent.
pub fn solve_linear(m: &Mat, b: &[Rat]) -> Result<Option<Vec<Rat>>> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs of length {} against {} rows",
            b.len(),
            m.rows()
        )));
    }
    let mut aug: Vec<Vec<Rat>> = (0..m.rows())
        .map(|r| {
            let mut row = m.row(r).to_vec();
            row.push(b[r].clone());
            row
        })
        .collect();
    let mut rows: Vec<Vec<BigInt>> = aug.drain(..).map(|r| integerize_row(&r)).collect();
    let ech = echelon(&mut rows).expect("BigInt elimination cannot overflow");
    // A pivot in the augmented column is a row 0 = nonzero.
    if ech.pivots.iter().any(|&(_, c)| c == m.cols()) {
        return Ok(None);
    }
    // [M | b] (x; -1) = 0: fix the augmented column at -1, free variables
    // at zero, and back-substitute the pivots.
    let mut x = back_substitute(&rows, &ech, m.cols() + 1, |c| {
        if c == m.cols() {
            -Rat::one()
        } else {
            Rat::zero()
        }
    });
    x.truncate(m.cols());
    Ok(Some(x))
}

/// The integer vector parallel to `v` with coprime entries and a positive
/// first non-zero entry.
pub fn primitive_integer_vector(v: &[Rat]) -> Result<Vec<BigInt>> {
    if v.iter().all(|e| e.is_zero()) {
        return Err(Error::ZeroVector);
    }
    let ints = integerize_row(v);
    let mut g = BigInt::zero();
    for e in &ints {
        g = g.gcd(e);
    }
    let mut out: Vec<BigInt> = ints.iter().map(|e| e / &g).collect();
    if let Some(first) = out.iter().find(|e| !e.is_zero()) {
        if first.is_negative() {
            for e in &mut out {
                *e = -(e.clone());
            }
        }
    }
    Ok(out)
}

pub(crate) mod intmat {
    //! `i128` fast lane for small integer matrices (incidence systems and
    //! the lifted vertex-enumeration tableau). Entries stay minors of
    //! 0/±1 matrices, far below overflow at the bounds this crate
    //! enforces; if an overflow does occur the caller's `BigInt` path
    //! takes over.

    use super::echelon;
    use num_bigint::BigInt;
    use num_integer::Integer;

    use crate::ratio::Rat;

    /// Rank of an integer matrix, falling back to `BigInt` on overflow.
    pub(crate) fn rank_int(rows: &[Vec<i128>]) -> usize {
        let mut m = rows.to_vec();
        if let Some(ech) = echelon(&mut m) {
            return ech.rank();
        }
        let mut big: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        echelon(&mut big)
            .expect("BigInt elimination cannot overflow")
            .rank()
    }

    /// Small exact fraction used during back-substitution.
    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub(crate) struct Frac {
        pub num: i128,
        pub den: i128,
    }

    impl Frac {
        pub fn new(num: i128, den: i128) -> Option<Frac> {
            debug_assert!(den != 0);
            let g = num.gcd(&den);
            let (mut num, mut den) = if g == 0 { (0, 1) } else { (num / g, den / g) };
            if den < 0 {
                num = num.checked_neg()?;
                den = den.checked_neg()?;
            }
            Some(Frac { num, den })
        }

        pub fn zero() -> Frac {
            Frac { num: 0, den: 1 }
        }

        pub fn is_zero(&self) -> bool {
            self.num == 0
        }

        pub fn add(&self, other: &Frac) -> Option<Frac> {
            let a = self.num.checked_mul(other.den)?;
            let b = other.num.checked_mul(self.den)?;
            Frac::new(a.checked_add(b)?, self.den.checked_mul(other.den)?)
        }

        pub fn mul_int(&self, k: i128) -> Option<Frac> {
            Frac::new(self.num.checked_mul(k)?, self.den)
        }

        pub fn div_int(&self, k: i128) -> Option<Frac> {
            debug_assert!(k != 0);
            Frac::new(self.num, self.den.checked_mul(k)?)
        }

        pub fn neg(&self) -> Frac {
            Frac {
                num: -self.num,
                den: self.den,
            }
        }

        pub fn to_rat(self) -> Rat {
            Rat::new(BigInt::from(self.num), BigInt::from(self.den))
        }
    }

    /// Outcome of solving a square-ish augmented integer system exactly.
    pub(crate) enum SolveInt {
        /// Unique solution of the non-augmented variables.
        Unique(Vec<Frac>),
        /// `0 = nonzero` row encountered.
        Inconsistent,
        /// Fewer pivots than variables.
        Underdetermined,
        /// `i128` arithmetic overflowed; retry over the rationals.
        Overflow,
    }

    /// Solves the augmented system whose last column is the right-hand
    /// side, requiring a unique solution.
    pub(crate) fn solve_unique(mut aug: Vec<Vec<i128>>) -> SolveInt {
        let ncols = aug.first().map_or(0, Vec::len);
        debug_assert!(ncols > 0);
        let nvars = ncols - 1;
        let Some(ech) = echelon(&mut aug) else {
            return SolveInt::Overflow;
        };
        if ech.pivots.iter().any(|&(_, c)| c == nvars) {
            return SolveInt::Inconsistent;
        }
        if ech.rank() < nvars {
            return SolveInt::Underdetermined;
        }
        let mut x = vec![Frac::zero(); ncols];
        x[nvars] = Frac { num: -1, den: 1 };
        for &(r, c) in ech.pivots.iter().rev() {
            let mut acc = Frac::zero();
            for j in c + 1..ncols {
                if aug[r][j] != 0 && !x[j].is_zero() {
                    let Some(term) = x[j].mul_int(aug[r][j]) else {
                        return SolveInt::Overflow;
                    };
                    let Some(sum) = acc.add(&term) else {
                        return SolveInt::Overflow;
                    };
                    acc = sum;
                }
            }
            let Some(v) = acc.neg().div_int(aug[r][c]) else {
                return SolveInt::Overflow;
            };
            x[c] = v;
        }
        x.truncate(nvars);
        SolveInt::Unique(x)
    }

}
