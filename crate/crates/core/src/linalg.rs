//! Dense linear algebra for small regression problems.
//!
//! The basis dimension stays small (K of order 8, never more than a few
//! dozen), so plain O(n^3) routines over row-major storage are used
//! throughout: Cholesky for the SPD normal equations, partially pivoted LU
//! for general square systems, and cyclic Jacobi sweeps for symmetric
//! eigenvalues.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Mat {
            nrows,
            ncols,
            data: vec![T::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, T::one())
    }

    /// `s * I`.
    pub fn scaled_identity(n: usize, s: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, s);
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Mat { nrows, ncols, data }
    }

    /// Build from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat { nrows, ncols, data }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.ncols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap(a * self.ncols + j, b * self.ncols + j);
        }
    }

    /// `A^T A` (ncols x ncols, symmetric by construction).
    pub fn gram(&self) -> Mat<T> {
        let p = self.ncols;
        let mut g = Mat::zeros(p, p);
        for r in 0..self.nrows {
            let row = self.row(r);
            for i in 0..p {
                for j in i..p {
                    let v = g.get(i, j) + row[i] * row[j];
                    g.set(i, j, v);
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                g.set(i, j, g.get(j, i));
            }
        }
        g
    }

    /// `A^T v` for a length-nrows vector.
    pub fn t_matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.nrows);
        let mut out = vec![T::zero(); self.ncols];
        for (r, &vr) in v.iter().enumerate() {
            let row = self.row(r);
            for (o, x) in out.iter_mut().zip(row) {
                *o = *o + *x * vr;
            }
        }
        out
    }

    /// `A v` for a length-ncols vector.
    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.ncols);
        (0..self.nrows).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn add(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        Mat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        Mat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    /// `A + s*I` for a square matrix.
    pub fn add_scaled_identity(&self, s: T) -> Mat<T> {
        assert_eq!(self.nrows, self.ncols);
        let mut m = self.clone();
        for i in 0..self.nrows {
            m.set(i, i, m.get(i, i) + s);
        }
        m
    }

    /// `(A + A^T) / 2`.
    pub fn symmetrized(&self) -> Mat<T> {
        assert_eq!(self.nrows, self.ncols);
        let half = T::of(0.5);
        Mat::from_fn(self.nrows, self.ncols, |i, j| {
            (self.get(i, j) + self.get(j, i)) * half
        })
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn max_symmetry_gap(&self) -> T {
        assert_eq!(self.nrows, self.ncols);
        let mut gap = T::zero();
        for i in 0..self.nrows {
            for j in (i + 1)..self.ncols {
                gap = gap.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        gap
    }

    /// Dimensions consistent and every entry finite.
    pub fn is_well_formed(&self) -> bool {
        self.data.len() == self.nrows * self.ncols && self.data.iter().all(|v| v.is_finite())
    }

    /// Rows as nested vectors, mainly for serialization into reports.
    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.nrows).map(|i| self.row(i).to_vec()).collect()
    }
}

/// Inner product of two equal-length slices.
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// `x^T A x` for a square `A`.
pub fn quadratic_form<T: Real>(a: &Mat<T>, x: &[T]) -> T {
    dot(x, &a.matvec(x))
}

/// Lower-triangular Cholesky factor of an SPD matrix.
pub struct Cholesky<T> {
    l: Mat<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factor an SPD matrix; `None` when a non-positive (or non-finite)
    /// pivot shows the matrix is not positive definite.
    pub fn factor(a: &Mat<T>) -> Option<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return None;
        }
        let mut l = Mat::zeros(n, n);
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d = d - l.get(j, k) * l.get(j, k);
            }
            if !(d > T::zero()) || !d.is_finite() {
                return None;
            }
            let dj = d.sqrt();
            l.set(j, j, dj);
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s = s - l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / dj);
            }
        }
        Some(Cholesky { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Solve `A x = b` via forward/back substitution.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] = y[i] - self.l.get(i, k) * y[k];
            }
            y[i] = y[i] / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                y[i] = y[i] - self.l.get(k, i) * y[k];
            }
            y[i] = y[i] / self.l.get(i, i);
        }
        y
    }

    /// Explicit symmetric inverse, column by column.
    pub fn inverse(&self) -> Mat<T> {
        let n = self.dim();
        let mut inv = Mat::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            let col = self.solve(&e);
            e[j] = T::zero();
            for (i, &v) in col.iter().enumerate() {
                inv.set(i, j, v);
            }
        }
        inv.symmetrized()
    }
}

/// Solve a general square system by LU with partial pivoting.
///
/// Returns `None` for singular (or badly sized) systems.
pub fn lu_solve<T: Real>(a: &Mat<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return None;
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        let mut best = m.get(col, col).abs();
        for r in (col + 1)..n {
            let v = m.get(r, col).abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if !(best > T::zero()) || !best.is_finite() {
            return None;
        }
        m.swap_rows(piv, col);
        x.swap(piv, col);
        let d = m.get(col, col);
        for r in (col + 1)..n {
            let f = m.get(r, col) / d;
            if f == T::zero() {
                continue;
            }
            for c in col..n {
                let v = m.get(r, c) - f * m.get(col, c);
                m.set(r, c, v);
            }
            x[r] = x[r] - f * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        #[allow(clippy::needless_range_loop)]
        for j in (i + 1)..n {
            s = s - m.get(i, j) * x[j];
        }
        x[i] = s / m.get(i, i);
    }
    Some(x)
}

/// Eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi sweeps.
pub fn sym_eigenvalues<T: Real>(m: &Mat<T>) -> Vec<T> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m.get(0, 0)];
    }
    let mut a = m.symmetrized();
    let two = T::of(2.0);
    for _sweep in 0..64 {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..n {
            for j in 0..n {
                let v = a.get(i, j) * a.get(i, j);
                total = total + v;
                if i != j {
                    off = off + v;
                }
            }
        }
        if off <= T::epsilon() * T::epsilon() * total || off == T::zero() {
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (two * apq);
                let root = (theta * theta + T::one()).sqrt();
                let t = if theta >= T::zero() {
                    T::one() / (theta + root)
                } else {
                    -T::one() / (root - theta)
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut eigs: Vec<T> = (0..n).map(|i| a.get(i, i)).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    eigs
}

/// 2-norm condition number of a symmetric positive definite matrix,
/// `+inf` when the smallest eigenvalue is not strictly positive.
pub fn spd_condition<T: Real>(a: &Mat<T>) -> T {
    let eigs = sym_eigenvalues(a);
    match (eigs.first(), eigs.last()) {
        (Some(&lo), Some(&hi)) if lo > T::zero() => hi / lo,
        _ => T::infinity(),
    }
}
