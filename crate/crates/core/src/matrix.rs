use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::ring::{Ring, Scalar};

/// Dense row-major matrix of exact scalars. Zero-row and zero-column shapes are legal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows of scalars; `cols` fixes the width when there are no rows.
    pub fn from_rows(rows: Vec<Vec<Scalar>>, cols: usize) -> Option<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer literal; panics on ragged input. Meant for tests and fixtures.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| crate::ring::int(v)).collect())
                .collect(),
            cols,
        )
        .expect("rectangular literal")
    }

    pub fn column_vector(v: &[Scalar]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [Scalar] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn in_ring(&self, ring: &Ring) -> bool {
        self.data.iter().all(|a| ring.contains(a))
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn hconcat(&self, other: &Matrix) -> Self {
        assert_eq!(self.rows, other.rows, "hconcat row mismatch");
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vconcat(&self, other: &Matrix) -> Self {
        assert_eq!(self.cols, other.cols, "vconcat column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_rows(&self, range: std::ops::Range<usize>) -> Self {
        Matrix::from_fn(range.len(), self.cols, |i, j| self[(range.start + i, j)].clone())
    }

    pub fn select_columns(&self, range: std::ops::Range<usize>) -> Self {
        Matrix::from_fn(self.rows, range.len(), |i, j| self[(i, range.start + j)].clone())
    }

    pub fn block_diagonal(a: &Matrix, b: &Matrix) -> Self {
        Matrix::from_fn(a.rows + b.rows, a.cols + b.cols, |i, j| {
            match (i < a.rows, j < a.cols) {
                (true, true) => a[(i, j)].clone(),
                (false, false) => b[(i - a.rows, j - a.cols)].clone(),
                _ => Scalar::zero(),
            }
        })
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Self {
        Matrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            &self[(i / other.rows, j / other.cols)] * &other[(i % other.rows, j % other.cols)]
        })
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
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

    /// Replaces rows `a`, `b` by `(p*ra + q*rb, r*ra + s*rb)`.
    pub(crate) fn combine_rows(&mut self, a: usize, b: usize, t: [&Scalar; 4]) {
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = t[0] * &x + t[1] * &y;
            self[(b, j)] = t[2] * &x + t[3] * &y;
        }
    }

    /// Replaces columns `a`, `b` by `(p*ca + q*cb, r*ca + s*cb)`.
    pub(crate) fn combine_cols(&mut self, a: usize, b: usize, t: [&Scalar; 4]) {
        for i in 0..self.rows {
            let x = self[(i, a)].clone();
            let y = self[(i, b)].clone();
            self[(i, a)] = t[0] * &x + t[1] * &y;
            self[(i, b)] = t[2] * &x + t[3] * &y;
        }
    }

    /// row[a] += c * row[b]
    pub(crate) fn add_row_multiple(&mut self, a: usize, b: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            if self[(b, j)].is_zero() {
                continue;
            }
            let v = &self[(b, j)] * c;
            self[(a, j)] += v;
        }
    }

    /// col[a] += c * col[b]
    pub(crate) fn add_col_multiple(&mut self, a: usize, b: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            if self[(i, b)].is_zero() {
                continue;
            }
            let v = &self[(i, b)] * c;
            self[(i, a)] += v;
        }
    }

    pub(crate) fn scale_row(&mut self, a: usize, c: &Scalar) {
        for j in 0..self.cols {
            self[(a, j)] *= c;
        }
    }

    pub(crate) fn scale_col(&mut self, a: usize, c: &Scalar) {
        for i in 0..self.rows {
            self[(i, a)] *= c;
        }
    }

    /// Reduced row echelon form over the fraction field, with pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            m.scale_row(r, &inv);
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = -m[(i, c)].clone();
                    m.add_row_multiple(i, r, &f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Rank over the fraction field.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn determinant(&self) -> Option<Scalar> {
        if !self.is_square() {
            return None;
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Some(Scalar::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = -(&m[(i, c)] / &pivot);
                    m.add_row_multiple(i, c, &f);
                }
            }
        }
        Some(det)
    }

    /// Inverse over the fraction field.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let (r, pivots) = self.hconcat(&Matrix::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(r.select_columns(n..2 * n))
    }

    /// Some solution `X` of `self * X = rhs` over the fraction field (free variables set to 0).
    pub fn solve(&self, rhs: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, rhs.rows);
        let (r, pivots) = self.hconcat(rhs).rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.cols, rhs.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(p, j)] = r[(i, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    /// Basis (as columns) of the right null space over the fraction field.
    pub fn nullspace(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis[(f, k)] = Scalar::one();
            for (i, &p) in pivots.iter().enumerate() {
                basis[(p, k)] = -r[(i, f)].clone();
            }
        }
        basis
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "product of {}x{} and {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add<&Matrix> for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&Matrix> for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        if self.rows == 0 {
            write!(f, "0x{}", self.cols)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::int;

    #[test]
    fn product_and_inverse() {
        let a = Matrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, Matrix::from_i64(&[&[1, -1], &[-1, 2]]));
        assert_eq!(&a * &inv, Matrix::identity(2));
        assert_eq!(a.determinant(), Some(int(1)));
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(a.inverse().is_none());
        assert_eq!(a.rank(), 1);
        let ns = a.nullspace();
        assert_eq!(ns.cols(), 1);
        assert!((&a * &ns).is_zero());
    }

    #[test]
    fn degenerate_shapes() {
        let a = Matrix::zeros(0, 3);
        let b = Matrix::zeros(3, 2);
        let p = &a * &b;
        assert_eq!(p.shape(), (0, 2));
        assert_eq!(a.rank(), 0);
        assert_eq!(a.nullspace().shape(), (3, 3));
        assert_eq!(Matrix::zeros(0, 0).determinant(), Some(int(1)));
    }

    #[test]
    fn kron_shape() {
        let a = Matrix::from_i64(&[&[1, 2]]);
        let k = a.kron(&Matrix::identity(2));
        assert_eq!(k, Matrix::from_i64(&[&[1, 0, 2, 0], &[0, 1, 0, 2]]));
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = Matrix::from_i64(&[&[1, 0], &[0, 2], &[0, 0]]);
        let x = a.solve(&Matrix::from_i64(&[&[3], &[4], &[0]])).unwrap();
        assert_eq!(x, Matrix::from_i64(&[&[3], &[2]]));
        assert!(a.solve(&Matrix::from_i64(&[&[0], &[0], &[1]])).is_none());
    }
}
