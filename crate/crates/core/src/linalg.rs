//! Exact rational linear algebra.
//!
//! Everything here works over `BigRational`; there is no floating point
//! path. Elimination always picks the first nonzero entry of a column as
//! pivot, since exactness makes magnitude-based pivoting pointless.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;
pub type RationalVector = Vec<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("rows are not linearly independent (rank {rank} < {rows})")]
    RankDeficient { rank: usize, rows: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Dense row-major matrix of exact rationals.
///
/// Zero rows are allowed so that an empty constraint set (no fixed
/// equalities) can be represented directly.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed because `rows` may be empty.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigRational>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::Dimension {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(RationalMatrix {
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn from_int_rows<R: AsRef<[BigInt]>>(cols: usize, rows: &[R]) -> Result<Self, LinalgError> {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        Self::from_rows(cols, rows)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect();
        Self::from_rows(cols, rows).expect("ragged rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        RationalMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> RationalVector {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "mul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = BigRational::zero();
                for k in 0..self.cols {
                    let a = self.get(r, k);
                    if !a.is_zero() {
                        acc += a * other.get(k, c);
                    }
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        (m, pivots)
    }

    /// Eliminates in place using only the first `pivot_cols` columns as
    /// pivot candidates. Returns the pivot columns in order.
    fn rref_in_place(&mut self, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..pivot_cols {
            if lead == self.rows {
                break;
            }
            let Some(p) = (lead..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(p, lead);
            let inv = self.get(lead, col).recip();
            for c in col..self.cols {
                let v = self.get(lead, c) * &inv;
                self.set(lead, c, v);
            }
            for r in 0..self.rows {
                if r == lead {
                    continue;
                }
                let factor = self.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let delta = &factor * self.get(lead, c);
                    if !delta.is_zero() {
                        let v = self.get(r, c) - delta;
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            lead += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn to_rational(v: &[BigInt]) -> RationalVector {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Returns the integer vector if every entry has denominator one.
pub fn to_integer(v: &[BigRational]) -> Option<Vec<BigInt>> {
    v.iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

pub fn max_abs(v: &[BigRational]) -> BigRational {
    v.iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// Exact rank over the rationals.
pub fn rank(m: &RationalMatrix) -> usize {
    m.rref().1.len()
}

/// Solves `m x = v`. For underdetermined systems the free variables are set
/// to zero.
pub fn solve_system(m: &RationalMatrix, v: &[BigRational]) -> Result<RationalVector, LinalgError> {
    if v.len() != m.rows {
        return Err(LinalgError::Dimension {
            expected: m.rows,
            got: v.len(),
        });
    }
    let mut aug = RationalMatrix::zeros(m.rows, m.cols + 1);
    for r in 0..m.rows {
        for c in 0..m.cols {
            aug.set(r, c, m.get(r, c).clone());
        }
        aug.set(r, m.cols, v[r].clone());
    }
    let pivots = aug.rref_in_place(m.cols);
    for r in pivots.len()..m.rows {
        if !aug.get(r, m.cols).is_zero() {
            return Err(LinalgError::Inconsistent);
        }
    }
    let mut x = vec![BigRational::zero(); m.cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug.get(r, m.cols).clone();
    }
    Ok(x)
}

/// Basis of the right null space `{x : m x = 0}`, one vector per free column.
pub fn null_space(m: &RationalMatrix) -> Vec<RationalVector> {
    let (r, pivots) = m.rref();
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|free| {
            let mut x = vec![BigRational::zero(); m.cols];
            x[free] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                x[p] = -r.get(row, free).clone();
            }
            x
        })
        .collect()
}

/// True if `v` is a linear combination of the rows of `rows`.
pub fn in_row_space(v: &[BigRational], rows: &RationalMatrix) -> bool {
    if rows.rows() == 0 {
        return v.iter().all(Zero::is_zero);
    }
    solve_system(&rows.transpose(), v).is_ok()
}

/// Orthogonal projection of `c` onto `{x : rows x = 0}`, computed as
/// `c - Rᵀ (R Rᵀ)⁻¹ R c`. Requires `rows` to have full row rank.
pub fn project_orthogonal(c: &[BigRational], rows: &RationalMatrix) -> Result<RationalVector, LinalgError> {
    if c.len() != rows.cols() {
        return Err(LinalgError::Dimension {
            expected: rows.cols(),
            got: c.len(),
        });
    }
    if rows.rows() == 0 {
        return Ok(c.to_vec());
    }
    let r = rank(rows);
    if r < rows.rows() {
        return Err(LinalgError::RankDeficient {
            rank: r,
            rows: rows.rows(),
        });
    }
    let gram = rows.mul(&rows.transpose());
    let rc = rows.mul_vec(c);
    let lambda = solve_system(&gram, &rc)?;
    let back = rows.transpose().mul_vec(&lambda);
    Ok(c.iter().zip(back).map(|(x, y)| x - y).collect())
}
