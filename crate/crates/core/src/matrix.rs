//! Small dense matrices over F_p and the row-space algebra built on them.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::gf2;

/// A dense row-major matrix over F_p. Rows are stored as owned vectors of
/// reduced residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    field: FieldModulus,
    cols: usize,
    rows: Vec<Vec<u8>>,
}

/// Output of row reduction: the nonzero rows of the reduced row echelon form
/// and their pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Reduced {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl Matrix {
    pub fn new(field: FieldModulus, cols: usize, rows: Vec<Vec<u8>>) -> Result<Self> {
        for row in &rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            if let Some(&value) = row.iter().find(|&&x| x >= field.p()) {
                return Err(Error::UnreducedEntry {
                    value,
                    p: field.p(),
                });
            }
        }
        Ok(Matrix { field, cols, rows })
    }

    pub(crate) fn from_rows_unchecked(
        field: FieldModulus,
        cols: usize,
        rows: Vec<Vec<u8>>,
    ) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        Matrix { field, cols, rows }
    }

    pub fn empty(field: FieldModulus, cols: usize) -> Self {
        Matrix {
            field,
            cols,
            rows: Vec::new(),
        }
    }

    pub fn zeros(field: FieldModulus, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            cols,
            rows: vec![vec![0; cols]; rows],
        }
    }

    pub fn identity(field: FieldModulus, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0; n];
                r[i] = 1;
                r
            })
            .collect();
        Matrix {
            field,
            cols: n,
            rows,
        }
    }

    pub fn field(&self) -> FieldModulus {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<u8>> {
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.rows[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_compatible(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Matrix::from_rows_unchecked(self.field, self.cols, rows))
    }

    fn check_compatible(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.p(),
                right: other.field.p(),
            });
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        Ok(())
    }

    pub fn transpose(&self) -> Matrix {
        let rows = (0..self.cols)
            .map(|j| self.rows.iter().map(|r| r[j]).collect())
            .collect();
        Matrix::from_rows_unchecked(self.field, self.rows.len(), rows)
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        self.rows.iter().map(|r| self.field.dot(r, v)).collect()
    }

    /// Reduced row echelon form with zero rows dropped.
    ///
    /// Binary matrices of at most 64 columns go through the bit-packed path.
    pub fn rref(&self) -> Reduced {
        if self.field.p() == 2 && self.cols <= 64 {
            self.rref_packed()
        } else {
            self.rref_generic()
        }
    }

    pub(crate) fn rref_packed(&self) -> Reduced {
        let mut packed: Vec<u64> = self.rows.iter().map(|r| gf2::pack(r)).collect();
        let pivots = gf2::rref(&mut packed, self.cols);
        let rows = packed.iter().map(|&w| gf2::unpack(w, self.cols)).collect();
        Reduced {
            matrix: Matrix::from_rows_unchecked(self.field, self.cols, rows),
            pivots,
        }
    }

    pub(crate) fn rref_generic(&self) -> Reduced {
        let f = self.field;
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == rows.len() {
                break;
            }
            let Some(pr) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pr);
            let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
            for x in rows[rank].iter_mut() {
                *x = f.mul(*x, inv);
            }
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[col] != 0 {
                    let c = f.neg(row[col]);
                    f.axpy(c, &pivot_row, row);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        Reduced {
            matrix: Matrix::from_rows_unchecked(f, self.cols, rows),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Basis (in reduced form) of the right null space `{x : M x = 0}`.
    pub fn kernel(&self) -> Matrix {
        let f = self.field;
        let red = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &red.pivots {
            is_pivot[c] = true;
        }
        let rows: Vec<Vec<u8>> = (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u8; self.cols];
                v[free] = 1;
                for (i, &pc) in red.pivots.iter().enumerate() {
                    v[pc] = f.neg(red.matrix.rows[i][free]);
                }
                v
            })
            .collect();
        Matrix::from_rows_unchecked(f, self.cols, rows)
            .rref()
            .matrix
    }

    /// Basis of the intersection of the row spaces of `self` and `other`,
    /// computed as the annihilator of the sum of the two annihilators.
    pub fn intersect(&self, other: &Matrix) -> Result<Matrix> {
        self.check_compatible(other)?;
        let stacked = self.kernel().vstack(&other.kernel())?;
        Ok(stacked.kernel())
    }

    /// Basis of the sum of the two row spaces.
    pub fn row_sum(&self, other: &Matrix) -> Result<Matrix> {
        Ok(self.vstack(other)?.rref().matrix)
    }
}

impl Reduced {
    /// Reduce `v` against the pivots: the result has zeros at every pivot
    /// column and differs from `v` by an element of the row space.
    pub fn reduce(&self, v: &mut [u8]) {
        let f = self.matrix.field;
        for (row, &pc) in self.matrix.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c != 0 {
                f.axpy(f.neg(c), row, v);
            }
        }
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Solve `x · M = target` for the coefficient row `x` against the reduced
    /// basis; `None` when `target` is outside the row space.
    pub fn coordinates(&self, target: &[u8]) -> Option<Vec<u8>> {
        let coeffs: Vec<u8> = self.pivots.iter().map(|&pc| target[pc]).collect();
        let f = self.matrix.field;
        let mut acc = vec![0u8; self.matrix.cols];
        for (row, &c) in self.matrix.rows.iter().zip(&coeffs) {
            f.axpy(c, row, &mut acc);
        }
        (acc == target).then_some(coeffs)
    }
}

/// Lexicographically smallest solution of `A x = t`, if any.
///
/// Lexicographic order is over `x` as a tuple of residues. The kernel of `A`
/// in reduced form has leading pivots, so reducing any particular solution
/// against it clears the pivot coordinates, which yields the minimum.
pub fn lexmin_solution(a: &Matrix, kernel: &Reduced, target: &[u8]) -> Option<Vec<u8>> {
    let f = a.field;
    let cols = a.cols;
    let mut aug_rows = a.rows.clone();
    for (row, &t) in aug_rows.iter_mut().zip(target) {
        row.push(t);
    }
    let aug = Matrix::from_rows_unchecked(f, cols + 1, aug_rows).rref();
    if aug.pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![0u8; cols];
    for (row, &pc) in aug.matrix.rows.iter().zip(&aug.pivots) {
        x[pc] = row[cols];
    }
    kernel.reduce(&mut x);
    Some(x)
}

/// Visit every element of the span of `rows` (including zero), in base-p
/// odometer order over the coefficients. The callback may stop early.
pub fn for_each_in_span(
    field: FieldModulus,
    rows: &[Vec<u8>],
    cols: usize,
    mut visit: impl FnMut(&[u8]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut v = vec![0u8; cols];
    let mut digits = vec![0u8; rows.len()];
    loop {
        visit(&v)?;
        let mut j = 0;
        loop {
            if j == rows.len() {
                return ControlFlow::Continue(());
            }
            field.axpy(1, &rows[j], &mut v);
            digits[j] += 1;
            if digits[j] < field.p() {
                break;
            }
            digits[j] = 0;
            j += 1;
        }
    }
}
