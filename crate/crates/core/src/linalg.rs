//! Dense complex matrices and the rank-revealing QR kernel.
//!
//! Every lattice operation on subspaces reduces to [`range_basis`] or
//! [`kernel_basis`], both of which run faer's blocked column-pivoted
//! Householder QR.

use std::fmt;
use std::ops::Mul;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::householder;
use faer::linalg::matmul::matmul;
use faer::linalg::solvers::ColPivQr;
use faer::traits::Conjugate;
use faer::{Accum, Conj, MatMut, MatRef, Par};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Column-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    /// Builds a `rows x columns.len()` matrix from column vectors.
    pub fn from_columns(rows: usize, columns: &[&[C64]]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for col in columns {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            data.extend_from_slice(col);
        }
        Ok(ComplexMatrix {
            rows,
            cols: columns.len(),
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[C64]> {
        // chunks_exact panics on a zero chunk size
        let rows = self.rows.max(1);
        self.data.chunks_exact(rows).take(self.cols)
    }

    pub(crate) fn columns_mut(&mut self) -> impl Iterator<Item = &mut [C64]> {
        let rows = self.rows.max(1);
        let cols = self.cols;
        self.data.chunks_exact_mut(rows).take(cols)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// `self† * other`.
    pub fn adjoint_mul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "adjoint_mul: row mismatch");
        product(view(self).adjoint(), other)
    }

    /// Largest entry modulus; zero for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack: row mismatch");
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for j1 in 0..self.cols {
            for i1 in 0..self.rows {
                let a = self[(i1, j1)];
                if a == ZERO {
                    continue;
                }
                for j2 in 0..other.cols {
                    for i2 in 0..other.rows {
                        out[(i1 * other.rows + i2, j1 * other.cols + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[j * self.rows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[j * self.rows + i]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product: inner dimension mismatch");
        gemm(self, rhs)
    }
}

/// Column-major view for faer, without copying.
fn view(m: &ComplexMatrix) -> MatRef<'_, C64> {
    MatRef::from_column_major_slice(&m.data, m.rows, m.cols)
}

/// `op(a) * b` into a fresh matrix.
fn product<L: Conjugate<Canonical = C64>>(a: MatRef<'_, L>, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.nrows(), b.cols);
    if out.data.is_empty() || a.ncols() == 0 {
        return out;
    }
    let dst = MatMut::from_column_major_slice_mut(&mut out.data, a.nrows(), b.cols);
    matmul(dst, Accum::Replace, a, view(b), ONE, Par::Seq);
    out
}

fn gemm(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    debug_assert_eq!(a.cols, b.rows);
    product(view(a), b)
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[inline]
pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Column-pivoted QR of `m` with its numerical rank: the number of leading
/// pivots above `eps_rank * max(first pivot, reference)`. `None` for an empty
/// matrix.
fn pivoted_qr(m: &ComplexMatrix, eps_rank: f64, reference: f64) -> (Option<ColPivQr<C64>>, usize) {
    if m.rows == 0 || m.cols == 0 {
        return (None, 0);
    }
    let qr = view(m).col_piv_qr();
    let r = qr.R();
    let cutoff = eps_rank * r[(0, 0)].norm().max(reference);
    // column pivoting makes |R_jj| non-increasing
    let rank = (0..m.rows.min(m.cols)).take_while(|&j| r[(j, j)].norm() > cutoff).count();
    (Some(qr), rank)
}

/// Columns `range` of `Q = H_0 ... H_{rank-1}`. Reflectors past the rank are
/// dropped: they come from numerically zero trailing columns and may be NaN.
fn q_columns(qr: Option<&ColPivQr<C64>>, rank: usize, rows: usize, range: std::ops::Range<usize>) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rows, range.len());
    for (c, t) in range.clone().enumerate() {
        out[(t, c)] = ONE;
    }
    let Some(qr) = qr else { return out };
    if range.is_empty() || rank == 0 {
        return out;
    }
    let (cols, block) = (out.cols, qr.Q_coeff().nrows());
    let dst = MatMut::from_column_major_slice_mut(&mut out.data, rows, cols);
    let scratch = householder::apply_block_householder_sequence_on_the_left_in_place_scratch::<C64>(rows, block, cols);
    householder::apply_block_householder_sequence_on_the_left_in_place_with_conj(
        qr.Q_basis().get(.., ..rank),
        qr.Q_coeff().get(.., ..rank),
        Conj::No,
        dst,
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(scratch)),
    );
    out
}

/// Orthonormal basis of the column space of `m`.
///
/// Directions whose pivot norm is at most `eps_rank * max(largest column norm, reference)`
/// are discarded. Pass `reference = 0` for a purely relative cutoff; pass `1` when
/// the columns come from orthonormal bases so an all-noise input yields rank 0.
pub fn range_basis(m: &ComplexMatrix, eps_rank: f64, reference: f64) -> ComplexMatrix {
    let (qr, rank) = pivoted_qr(m, eps_rank, reference);
    q_columns(qr.as_ref(), rank, m.rows, 0..rank)
}

/// Orthonormal basis of `{x : m x = 0}`, computed as the orthocomplement of
/// the row space of `m`.
pub fn kernel_basis(m: &ComplexMatrix, eps_rank: f64, reference: f64) -> ComplexMatrix {
    let rowspace = m.adjoint();
    let (qr, rank) = pivoted_qr(&rowspace, eps_rank, reference);
    q_columns(qr.as_ref(), rank, m.cols, rank..m.cols)
}

/// `‖M†M − I‖_max`; zero for a matrix with orthonormal columns.
pub fn orthonormality_residual(m: &ComplexMatrix) -> f64 {
    let g = m.adjoint_mul(m);
    g.max_abs_diff(&ComplexMatrix::identity(m.cols))
}
