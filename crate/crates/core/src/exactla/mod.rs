//! Exact integer matrix algebra.
//!
//! Everything here is fraction-free: ranks and determinants use Bareiss
//! elimination, normal forms use unimodular row and column operations.

mod kernel;
mod lll;
mod normal_form;

pub use kernel::{
    bv_bound, kernel_basis, size_reduce, small_kernel_vector, BvBound, IncrementalRank,
    KernelVector,
};
pub use lll::lll_reduce;
pub(crate) use kernel::ser_big;
pub use normal_form::{
    determinantal_divisor, hermite_normal_form, invariant_factors, smith_normal_form,
    HermiteForm, SmithForm,
};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("rows are not linearly independent (rank {rank} < {rows} rows)")]
    RankDeficient { rank: usize, rows: usize },
    #[error("need more unknowns than equations ({rows} x {cols})")]
    NotUnderdetermined { rows: usize, cols: usize },
    #[error("order {k} exceeds the rank {rank}: every {k}x{k} minor vanishes")]
    OrderExceedsRank { k: usize, rank: usize },
    #[error("the kernel is trivial")]
    TrivialKernel,
    #[error("matrix is not unimodular")]
    NotUnimodular,
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<IntMatrix, LinAlgError> {
        if data.len() != rows * cols {
            return Err(LinAlgError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Panics on ragged input; an empty slice gives a 0x0 matrix.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> IntMatrix {
        Self::from_rows_with_cols(rows, 0)
    }

    /// Like [`from_rows`](Self::from_rows) but keeps `cols` when there are no rows.
    pub fn from_rows_with_cols(rows: Vec<Vec<BigInt>>, cols: usize) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(cols, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(cols: &[Vec<BigInt>], rows: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_default()
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Determinant by Bareiss elimination. Panics unless square.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = false;
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m.get(i, k).is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                m.swap_rows(p, k);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        let d = m.get(n - 1, n - 1).clone();
        if sign {
            -d
        } else {
            d
        }
    }

    /// Rank over the rationals by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut prev = BigInt::one();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(p, rank);
            for i in rank + 1..self.rows {
                for j in col + 1..self.cols {
                    let v = (m.get(i, j) * m.get(rank, col) - m.get(i, col) * m.get(rank, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, col, BigInt::zero());
            }
            prev = m.get(rank, col).clone();
            rank += 1;
        }
        rank
    }

    /// `det(A A^T)`.
    pub fn gram_det(&self) -> BigInt {
        self.mul(&self.transpose()).expect("shapes agree").det()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }

    /// Inverse of a unimodular matrix via the adjugate.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::NotUnimodular);
        }
        let det = self.det();
        if !det.abs().is_one() {
            return Err(LinAlgError::NotUnimodular);
        }
        let adj = self.adjugate();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data: adj.data.into_iter().map(|v| v * &det).collect() })
    }

    /// Classical adjugate: `adj(A) A = det(A) I`.
    pub fn adjugate(&self) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut adj = IntMatrix::zeros(n, n);
        if n == 1 {
            adj.set(0, 0, BigInt::one());
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let minor = self.select(&rows, &cols).det();
                adj.set(i, j, if (i + j) % 2 == 0 { minor } else { -minor });
            }
        }
        adj
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows().iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

/// Nested arrays of decimal strings.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(|v| v.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed = rows
            .into_iter()
            .map(|r| r.iter().map(|v| v.parse::<BigInt>().map_err(D::Error::custom)).collect())
            .collect::<Result<Vec<Vec<BigInt>>, _>>()?;
        if parsed.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(D::Error::custom("ragged matrix"));
        }
        Ok(IntMatrix::from_rows(parsed))
    }
}

/// Largest absolute entry of a vector.
pub fn max_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}
