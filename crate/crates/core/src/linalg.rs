//! Exact dense linear algebra over the rationals.
//!
//! Linear systems are solved by fraction-free (Bareiss) elimination on
//! integer-scaled rows, which keeps intermediate entries bounded by minors of
//! the input. Positive definiteness is certified by the same elimination
//! without pivoting: a symmetric matrix is positive definite iff all of its
//! leading principal minors are positive.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{bit_size_entries, common_denominator, BitSize, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("singular matrix: no nonzero pivot in column {stage}")]
    Singular { stage: usize },
    #[error("constraint matrices are linearly dependent (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
}

fn mismatch(expected: impl fmt::Display, found: impl fmt::Display) -> LinalgError {
    LinalgError::DimensionMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// Scales a slice of rationals to integers: returns `(ints, d)` with
/// `values[i] = ints[i] / d` and `d` the least common denominator.
pub(crate) fn integerize(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let d = common_denominator(values);
    let ints = values.iter().map(|x| x.numer() * (&d / x.denom())).collect();
    (ints, d)
}

/// Product of two row-major `n × n` integer matrices.
pub(crate) fn int_mul(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = BigInt::zero();
            for k in 0..n {
                let x = &a[i * n + k];
                if !x.is_zero() {
                    acc += x * &b[k * n + j];
                }
            }
            out.push(acc);
        }
    }
    out
}

/// `trace(A B)` for row-major `n × n` integer matrices.
pub(crate) fn int_trace_mul(a: &[BigInt], b: &[BigInt], n: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for k in 0..n {
        for l in 0..n {
            let x = &a[k * n + l];
            if !x.is_zero() {
                acc += x * &b[l * n + k];
            }
        }
    }
    acc
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(mismatch(rows * cols, data.len()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(mismatch(format!("{c} columns"), format!("{} columns", row.len())));
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
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

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn bit_size(&self) -> BitSize {
        bit_size_entries(&self.data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| &self[(i, i)]).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    fn first_asymmetry(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Exact product, computed over a common denominator per factor so that
    /// each output entry is reduced only once.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(mismatch(format!("{} rows", self.cols), format!("{} rows", rhs.rows)));
        }
        let (a, da) = integerize(&self.data);
        let (b, db) = integerize(&rhs.data);
        let den = da * db;
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    let x = &a[i * self.cols + k];
                    if x.is_zero() {
                        continue;
                    }
                    acc += x * &b[k * rhs.cols + j];
                }
                data.push(Rational::new(acc, den.clone()));
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if self.cols != v.len() {
            return Err(mismatch(self.cols, v.len()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

/// Symmetric rational matrix; `self[(i, j)] == self[(j, i)]` always holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(mismatch("square matrix", format!("{}x{}", m.rows, m.cols)));
        }
        match m.first_asymmetry() {
            Some((row, col)) => Err(LinalgError::NotSymmetric { row, col }),
            None => Ok(SymMatrix(m)),
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        SymMatrix::new(Matrix::from_rows(rows)?)
    }

    fn assume_symmetric(m: Matrix) -> Self {
        debug_assert!(m.is_symmetric());
        SymMatrix(m)
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(Matrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn diag(values: &[Rational]) -> Self {
        let n = values.len();
        let mut m = Matrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = v.clone();
        }
        SymMatrix(m)
    }

    /// `E_ij + E_ji` (or `E_ii` on the diagonal).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        m.data[i * n + j] = Rational::one();
        m.data[j * n + i] = Rational::one();
        SymMatrix(m)
    }

    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.0.to_rows()
    }

    pub fn bit_size(&self) -> BitSize {
        self.0.bit_size()
    }

    pub fn is_zero(&self) -> bool {
        self.0.data.iter().all(Zero::is_zero)
    }

    pub fn trace(&self) -> Rational {
        self.0.trace()
    }

    fn check_same(&self, other: &SymMatrix) -> Result<(), LinalgError> {
        if self.n() != other.n() {
            return Err(mismatch(format!("order {}", self.n()), format!("order {}", other.n())));
        }
        Ok(())
    }

    /// Trace inner product `⟨self, other⟩ = trace(self·other)`.
    pub fn inner(&self, other: &SymMatrix) -> Rational {
        assert_eq!(self.n(), other.n(), "inner product of matrices of different order");
        let (a, da) = integerize(&self.0.data);
        let (b, db) = integerize(&other.0.data);
        let acc: BigInt = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        Rational::new(acc, da * db)
    }

    /// Squared Frobenius norm.
    pub fn norm_sq(&self) -> Rational {
        self.inner(self)
    }

    /// Maximum absolute row sum `‖·‖_∞`.
    pub fn max_row_sum(&self) -> Rational {
        (0..self.n())
            .map(|i| self.0.row(i).iter().map(|x| x.abs()).sum::<Rational>())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        self.check_same(other).expect("matrix addition");
        let data = self.0.data.iter().zip(&other.0.data).map(|(a, b)| a + b).collect();
        SymMatrix(Matrix {
            data,
            ..self.0.clone_shape()
        })
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        self.check_same(other).expect("matrix subtraction");
        let data = self.0.data.iter().zip(&other.0.data).map(|(a, b)| a - b).collect();
        SymMatrix(Matrix {
            data,
            ..self.0.clone_shape()
        })
    }

    pub fn scale(&self, s: &Rational) -> SymMatrix {
        let data = self.0.data.iter().map(|a| a * s).collect();
        SymMatrix(Matrix {
            data,
            ..self.0.clone_shape()
        })
    }

    pub fn neg(&self) -> SymMatrix {
        let data = self.0.data.iter().map(|a| -a).collect();
        SymMatrix(Matrix {
            data,
            ..self.0.clone_shape()
        })
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, s: &Rational, other: &SymMatrix) -> SymMatrix {
        self.check_same(other).expect("matrix axpy");
        if s.is_zero() {
            return self.clone();
        }
        let data = self.0.data.iter().zip(&other.0.data).map(|(a, b)| a + s * b).collect();
        SymMatrix(Matrix {
            data,
            ..self.0.clone_shape()
        })
    }

    pub fn mul(&self, other: &SymMatrix) -> Matrix {
        self.0.mul(&other.0).expect("square product of equal order")
    }

    /// Congruence `self · middle · self`, symmetric by construction.
    pub fn sandwich(&self, middle: &SymMatrix) -> SymMatrix {
        let left = self.mul(middle);
        let full = left.mul(&self.0).expect("square product");
        SymMatrix::symmetrize(full)
    }

    /// Builds a symmetric matrix from a product known to be symmetric in
    /// exact arithmetic.
    pub fn symmetrize(m: Matrix) -> SymMatrix {
        assert!(m.is_symmetric(), "product expected to be symmetric");
        SymMatrix::assume_symmetric(m)
    }
}

impl Matrix {
    fn clone_shape(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: Vec::new(),
        }
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = Rational;
    fn index(&self, idx: (usize, usize)) -> &Rational {
        &self.0[idx]
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n() {
            let row: Vec<String> = self.0.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Fraction-free forward elimination of `[M | B]`, where `M` is square.
/// Rows are first scaled to integers. Returns the upper-triangular integer
/// system, ready for back substitution.
fn bareiss_forward(m: &Matrix, rhs_cols: &[Vec<Rational>]) -> Result<Vec<Vec<BigInt>>, LinalgError> {
    let n = m.rows;
    let width = n + rhs_cols.len();
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = m.row(i).to_vec();
            row.extend(rhs_cols.iter().map(|c| c[i].clone()));
            integerize(&row).0
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !a[i][k].is_zero());
        let Some(p) = pivot else {
            return Err(LinalgError::Singular { stage: k });
        };
        a.swap(k, p);
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..width {
                let v = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                row[j] = v.div_exact_signed(&prev);
            }
            row[k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    Ok(a)
}

trait ExactDiv {
    fn div_exact_signed(&self, d: &BigInt) -> BigInt;
}

impl ExactDiv for BigInt {
    fn div_exact_signed(&self, d: &BigInt) -> BigInt {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "Bareiss division must be exact");
        q
    }
}

fn back_substitute(a: &[Vec<BigInt>], col: usize) -> Vec<Rational> {
    let n = a.len();
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(a[i][n + col].clone());
        for j in i + 1..n {
            if !a[i][j].is_zero() {
                acc -= Rational::from_integer(a[i][j].clone()) * &x[j];
            }
        }
        x[i] = acc / Rational::from_integer(a[i][i].clone());
    }
    x
}

/// Solves the integer system `M u = w` without fractions: returns `(U, D)`
/// with `u = U / D` and `D > 0`.
pub(crate) fn solve_integer(m: &[Vec<BigInt>], w: &[BigInt]) -> Result<(Vec<BigInt>, BigInt), LinalgError> {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .zip(w)
        .map(|(row, wi)| {
            let mut r = row.clone();
            r.push(wi.clone());
            r
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Err(LinalgError::Singular { stage: k });
        };
        a.swap(k, p);
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..=n {
                let v = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                row[j] = v.div_exact_signed(&prev);
            }
            row[k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return Ok((Vec::new(), BigInt::one()));
    }
    // D·u is integral by Cramer's rule, so every division below is exact
    let d = a[n - 1][n - 1].clone();
    let mut u = vec![BigInt::zero(); n];
    for i in (0..n).rev() {
        let mut acc = &d * &a[i][n];
        for j in i + 1..n {
            if !a[i][j].is_zero() {
                acc -= &a[i][j] * &u[j];
            }
        }
        u[i] = acc.div_exact_signed(&a[i][i]);
    }
    if d.is_negative() {
        Ok((u.into_iter().map(|x| -x).collect(), -d))
    } else {
        Ok((u, d))
    }
}

/// Solves `M X = B` for every column of `B`.
pub fn solve_columns(m: &Matrix, columns: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, LinalgError> {
    if !m.is_square() {
        return Err(mismatch("square matrix", format!("{}x{}", m.rows, m.cols)));
    }
    for c in columns {
        if c.len() != m.rows {
            return Err(mismatch(m.rows, c.len()));
        }
    }
    let a = bareiss_forward(m, columns)?;
    Ok((0..columns.len()).map(|c| back_substitute(&a, c)).collect())
}

/// Exact solution of `M x = rhs`.
pub fn gauss_solve(m: &Matrix, rhs: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    let mut cols = solve_columns(m, &[rhs.to_vec()])?;
    Ok(cols.pop().expect("one column"))
}

/// Exact inverse.
pub fn invert(m: &Matrix) -> Result<Matrix, LinalgError> {
    let n = m.rows;
    let unit: Vec<Vec<Rational>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let cols = solve_columns(m, &unit)?;
    let mut inv = Matrix::zeros(n, n);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            inv.data[i * n + j] = v;
        }
    }
    Ok(inv)
}

/// Inverse of a symmetric nonsingular matrix.
pub fn invert_sym(m: &SymMatrix) -> Result<SymMatrix, LinalgError> {
    Ok(SymMatrix::symmetrize(invert(m.as_matrix())?))
}

/// Outcome of the positive-definiteness test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PdCheck {
    PositiveDefinite,
    /// First nonpositive pivot of the unpivoted `LDLᵀ` factorization
    /// (1-based index).
    NotPositiveDefinite {
        pivot_index: usize,
        pivot: Rational,
    },
}

impl PdCheck {
    pub fn is_pd(&self) -> bool {
        matches!(self, PdCheck::PositiveDefinite)
    }
}

/// Exact positive-definiteness certificate via unpivoted `LDLᵀ`.
///
/// The elimination is carried out fraction-free: after step `k` the pivot
/// entry equals the `(k+1)`-th leading principal minor of the integer-scaled
/// matrix, and the `LDLᵀ` pivot is the ratio of consecutive minors.
pub fn ldl_pd_check(x: &SymMatrix) -> PdCheck {
    let n = x.n();
    let (ints, scale) = integerize(x.entries());
    let mut a: Vec<Vec<BigInt>> = ints.chunks(n.max(1)).map(<[BigInt]>::to_vec).collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let minor = a[k][k].clone();
        if !minor.is_positive() {
            let pivot = Rational::new(minor, &prev * &scale);
            return PdCheck::NotPositiveDefinite {
                pivot_index: k + 1,
                pivot,
            };
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..n {
                let v = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                row[j] = v.div_exact_signed(&prev);
            }
            row[k] = BigInt::zero();
        }
        prev = minor;
    }
    PdCheck::PositiveDefinite
}

/// The linear map `A: Sⁿ → ℝᵐ`, `X ↦ (⟨A_j, X⟩)_j`, its adjoint, and the
/// orthogonal projection onto its kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMap {
    n: usize,
    a: Vec<SymMatrix>,
    gram: Matrix,
    gram_inv: Matrix,
}

impl ConstraintMap {
    /// Fails with [`LinalgError::RankDeficient`] if the `A_j` are dependent.
    pub fn new(n: usize, a: Vec<SymMatrix>) -> Result<Self, LinalgError> {
        for aj in &a {
            if aj.n() != n {
                return Err(mismatch(format!("order {n}"), format!("order {}", aj.n())));
            }
        }
        let m = a.len();
        let mut gram = Matrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = a[i].inner(&a[j]);
                gram.set(j, i, v.clone());
                gram.set(i, j, v);
            }
        }
        let gram_inv = invert(&gram).map_err(|_| LinalgError::RankDeficient {
            rank: matrix_rank(&gram),
            expected: m,
        })?;
        Ok(ConstraintMap { n, a, gram, gram_inv })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn matrices(&self) -> &[SymMatrix] {
        &self.a
    }

    /// Gram matrix `A A*` with entries `⟨A_i, A_j⟩`.
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn apply(&self, x: &SymMatrix) -> Vec<Rational> {
        assert_eq!(x.n(), self.n, "operator applied to matrix of wrong order");
        self.a.iter().map(|aj| aj.inner(x)).collect()
    }

    pub fn adjoint(&self, y: &[Rational]) -> SymMatrix {
        assert_eq!(y.len(), self.m(), "adjoint applied to vector of wrong length");
        self.a
            .iter()
            .zip(y)
            .fold(SymMatrix::zeros(self.n), |acc, (aj, yj)| acc.add_scaled(yj, aj))
    }

    /// `π_L(Y) = Y − A*(AA*)⁻¹A(Y)`.
    pub fn project(&self, y: &SymMatrix) -> SymMatrix {
        if self.a.is_empty() {
            return y.clone();
        }
        let rhs = self.apply(y);
        let z = self.gram_inv.mul_vec(&rhs).expect("gram inverse dimensions");
        y.sub(&self.adjoint(&z))
    }

    pub fn in_kernel(&self, x: &SymMatrix) -> bool {
        self.a.iter().all(|aj| aj.inner(x).is_zero())
    }
}

/// Rank by exact row reduction.
pub fn matrix_rank(m: &Matrix) -> usize {
    row_reduce(m).1.len()
}

/// Reduced row echelon form; returns the matrix and the pivot columns.
fn row_reduce(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut r = m.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !r[(i, col)].is_zero()) else {
            continue;
        };
        for j in 0..cols {
            r.data.swap(row * cols + j, p * cols + j);
        }
        let inv = r[(row, col)].recip();
        for j in 0..cols {
            let v = &r[(row, j)] * &inv;
            r.set(row, j, v);
        }
        for i in 0..rows {
            if i == row || r[(i, col)].is_zero() {
                continue;
            }
            let factor = r[(i, col)].clone();
            for j in 0..cols {
                let v = &r[(i, j)] - &factor * &r[(row, j)];
                r.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (r, pivots)
}

/// Orthogonal basis `B_1 … B_d` of `L = ker A` with `1/4 ≤ ⟨B_i, B_i⟩ ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    elements: Vec<SymMatrix>,
    normsq: Vec<Rational>,
}

impl OrthoBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[SymMatrix] {
        &self.elements
    }

    pub fn normsq(&self) -> &[Rational] {
        &self.normsq
    }
}

/// Index pairs `(i, j)`, `i ≤ j`, enumerating a basis of `Sⁿ`: diagonal
/// positions first, then the strict upper triangle row by row.
fn svec_positions(n: usize) -> Vec<(usize, usize)> {
    let mut pos: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            pos.push((i, j));
        }
    }
    pos
}

fn svec_weight(p: (usize, usize)) -> Rational {
    if p.0 == p.1 {
        Rational::one()
    } else {
        Rational::from_integer(BigInt::from(2))
    }
}

/// Orthogonal basis of the nullspace of `X ↦ (⟨A_j, X⟩)_j` by exact row
/// reduction followed by Gram–Schmidt in the trace inner product. Each
/// element is a dyadic multiple of an integer matrix.
pub fn nullspace_orthobasis(a: &[SymMatrix], n: usize) -> Result<OrthoBasis, LinalgError> {
    let pos = svec_positions(n);
    let dim = pos.len();
    let m = a.len();
    let mut k = Matrix::zeros(m, dim);
    for (j, aj) in a.iter().enumerate() {
        if aj.n() != n {
            return Err(mismatch(format!("order {n}"), format!("order {}", aj.n())));
        }
        for (c, &p) in pos.iter().enumerate() {
            k.set(j, c, svec_weight(p) * &aj[p]);
        }
    }
    let (rref, pivots) = row_reduce(&k);
    if pivots.len() < m {
        return Err(LinalgError::RankDeficient {
            rank: pivots.len(),
            expected: m,
        });
    }
    let weights: Vec<Rational> = pos.iter().map(|&p| svec_weight(p)).collect();
    let inner = |u: &[Rational], v: &[Rational]| -> Rational {
        u.iter().zip(v).zip(&weights).map(|((x, y), w)| x * y * w).sum()
    };

    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    let mut ortho: Vec<(Vec<Rational>, Rational)> = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![Rational::zero(); dim];
        v[f] = Rational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -rref[(row, f)].clone();
        }
        for (u, uu) in &ortho {
            let coeff = inner(&v, u) / uu;
            if coeff.is_zero() {
                continue;
            }
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= &coeff * ui;
            }
        }
        let v = primitive_integer_vector(&v);
        let nn = inner(&v, &v);
        ortho.push((v, nn));
    }

    let mut elements = Vec::with_capacity(ortho.len());
    let mut normsq = Vec::with_capacity(ortho.len());
    let one = Rational::one();
    for (v, nn) in ortho {
        // integer vector, so nn ≥ 1: divide by 2^e until nn / 4^e ≤ 1
        let mut e = 0usize;
        let mut scaled = nn.clone();
        while scaled > one {
            e += 1;
            scaled = &nn / Rational::from_integer(BigInt::one() << (2 * e));
        }
        let factor = Rational::new(BigInt::one(), BigInt::one() << e);
        let mut mat = Matrix::zeros(n, n);
        for (c, &(i, j)) in pos.iter().enumerate() {
            let val = &v[c] * &factor;
            mat.set(i, j, val.clone());
            mat.set(j, i, val);
        }
        elements.push(SymMatrix(mat));
        normsq.push(scaled);
    }
    Ok(OrthoBasis { elements, normsq })
}

/// Scales a nonzero rational vector to coprime integers with the same direction.
fn primitive_integer_vector(v: &[Rational]) -> Vec<Rational> {
    let (ints, _) = integerize(v);
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()
}
