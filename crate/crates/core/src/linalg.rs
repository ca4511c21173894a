//! Small dense and banded linear algebra used by the GP and the transport solver.

use std::ops::{Index, IndexMut};

use crate::scalar::Real;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot} = {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("tridiagonal system is singular at row {0}")]
    Singular(usize),
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::Dimension { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows).map(|i| crate::scalar::dot(self.row(i), v)).collect()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factorizes the lower triangle of a symmetric matrix.
    pub fn new(a: &Matrix<T>) -> Result<Self, LinalgError> {
        let n = a.rows();
        if a.cols() != n {
            return Err(LinalgError::Dimension { expected: n, got: a.cols() });
        }
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let lj = l.row(j);
            let mut diag = a[(j, j)] - crate::scalar::dot(&lj[..j], &lj[..j]);
            if !(diag > T::zero()) || !diag.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { pivot: j, value: diag.as_f64() });
            }
            diag = diag.sqrt();
            l[(j, j)] = diag;
            for i in j + 1..n {
                let (head, tail) = l.data.split_at_mut(i * n);
                let li = &tail[..j];
                let lj = &head[j * n..j * n + j];
                let s = a[(i, j)] - crate::scalar::dot(li, lj);
                tail[j] = s / diag;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &Matrix<T> {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `L x = b`.
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut x = b.to_vec();
        for i in 0..n {
            let row = self.l.row(i);
            let s = crate::scalar::dot(&row[..i], &x[..i]);
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `Lᵀ x = b`.
    pub fn solve_upper(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            x[i] /= self.l[(i, i)];
            let xi = x[i];
            let row = self.l.row(i);
            for k in 0..i {
                x[k] -= row[k] * xi;
            }
        }
        x
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        self.solve_upper(&self.solve_lower(b))
    }

    pub fn log_det(&self) -> T {
        let two = T::lit(2.0);
        (0..self.dim()).map(|i| two * self.l[(i, i)].ln()).sum()
    }

    /// Dense `A⁻¹`, built column by column from the factor.
    pub fn inverse(&self) -> Matrix<T> {
        let n = self.dim();
        // X = L⁻¹ row by row, then A⁻¹ = Xᵀ X as a sum of row outer products.
        let mut x = Matrix::zeros(n, n);
        for i in 0..n {
            let (done, rest) = x.data.split_at_mut(i * n);
            let xi = &mut rest[..n];
            xi[i] = T::one();
            let li = self.l.row(i);
            for k in 0..i {
                let c = li[k];
                let xk = &done[k * n..k * n + k + 1];
                for (a, b) in xi[..=k].iter_mut().zip(xk) {
                    *a -= c * *b;
                }
            }
            let d = T::one() / li[i];
            xi[..=i].iter_mut().for_each(|v| *v *= d);
        }
        let mut inv = Matrix::zeros(n, n);
        for k in 0..n {
            let xk = x.row(k);
            for i in 0..=k {
                let c = xk[i];
                if c == T::zero() {
                    continue;
                }
                let row = &mut inv.data[i * n..i * n + i + 1];
                for (a, b) in row.iter_mut().zip(&xk[..=i]) {
                    *a += c * *b;
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                inv.data[j * n + i] = inv.data[i * n + j];
            }
        }
        inv
    }
}

/// Pre-factored tridiagonal operator for repeated Thomas solves with a fixed matrix.
///
/// Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    lower: Vec<T>,
    c_prime: Vec<T>,
    inv_denom: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn new(lower: &[T], diag: &[T], upper: &[T]) -> Result<Self, LinalgError> {
        let n = diag.len();
        for len in [lower.len(), upper.len()] {
            if len != n {
                return Err(LinalgError::Dimension { expected: n, got: len });
            }
        }
        let mut c_prime = vec![T::zero(); n];
        let mut inv_denom = vec![T::zero(); n];
        let mut prev_c = T::zero();
        for i in 0..n {
            let denom = diag[i] - if i > 0 { lower[i] * prev_c } else { T::zero() };
            if denom == T::zero() || !denom.is_finite() {
                return Err(LinalgError::Singular(i));
            }
            inv_denom[i] = T::one() / denom;
            c_prime[i] = upper[i] * inv_denom[i];
            prev_c = c_prime[i];
        }
        Ok(Self { lower: lower.to_vec(), c_prime, inv_denom })
    }

    pub fn len(&self) -> usize {
        self.inv_denom.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_denom.is_empty()
    }

    /// Solves in place on a strided view: element `i` lives at `data[offset + i * stride]`.
    pub fn solve_strided(&self, data: &mut [T], offset: usize, stride: usize) {
        let n = self.len();
        let mut prev = T::zero();
        for i in 0..n {
            let idx = offset + i * stride;
            let d = data[idx] - if i > 0 { self.lower[i] * prev } else { T::zero() };
            prev = d * self.inv_denom[i];
            data[idx] = prev;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let idx = offset + i * stride;
            let next = data[idx + stride];
            data[idx] -= self.c_prime[i] * next;
        }
    }

    pub fn solve(&self, rhs: &mut [T]) {
        self.solve_strided(rhs, 0, 1);
    }
}
