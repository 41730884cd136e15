//! Exact linear algebra over the supported principal ideal domains.
//!
//! Conventions:
//! - `hnf` is row-style: `H = U·M` is in row echelon form, each pivot is the
//!   canonical associate (positive over ℤ, a power of `p` over `Z_(p)`) and
//!   entries above a pivot are canonical remainders modulo that pivot.
//! - `snf` returns `D = U·M·V` diagonal with `d₁ | d₂ | …`, each `dᵢ` normalized.
//! - A [`Lattice`] stores its basis as the columns of an `ambient × rank` matrix.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::ring::{Ring, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("lattice is not saturated: invariant factors {0:?}")]
    NotSaturated(Vec<String>),
    #[error("lattice basis columns are linearly dependent")]
    NotIndependent,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub h: Matrix,
    pub u: Matrix,
    /// Pivot column of each nonzero row of `h`, in order.
    pub pivots: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub d: Matrix,
    pub u: Matrix,
    pub v: Matrix,
}

/// Row operations bringing `m[(i, c)]` to zero against the pivot row `r`.
/// Every operation is mirrored on `u`.
fn eliminate_row_entry(ring: &Ring, m: &mut Matrix, u: &mut Matrix, r: usize, i: usize, c: usize) {
    if m[(i, c)].is_zero() {
        return;
    }
    if m[(r, c)].is_zero() {
        m.swap_rows(r, i);
        u.swap_rows(r, i);
        return;
    }
    let a = m[(r, c)].clone();
    let b = m[(i, c)].clone();
    if ring.divides(&a, &b) {
        let q = -(&b / &a);
        m.add_row_multiple(i, r, &q);
        u.add_row_multiple(i, r, &q);
        return;
    }
    let (g, s, t) = ring.gcdext(&a, &b);
    let x = &a / &g;
    let y = -(&b / &g);
    m.combine_rows(r, i, [&s, &t, &y, &x]);
    u.combine_rows(r, i, [&s, &t, &y, &x]);
}

/// Column counterpart of [`eliminate_row_entry`]: clears `m[(r, j)]` against column `c`.
fn eliminate_col_entry(ring: &Ring, m: &mut Matrix, v: &mut Matrix, r: usize, c: usize, j: usize) {
    if m[(r, j)].is_zero() {
        return;
    }
    if m[(r, c)].is_zero() {
        m.swap_cols(c, j);
        v.swap_cols(c, j);
        return;
    }
    let a = m[(r, c)].clone();
    let b = m[(r, j)].clone();
    if ring.divides(&a, &b) {
        let q = -(&b / &a);
        m.add_col_multiple(j, c, &q);
        v.add_col_multiple(j, c, &q);
        return;
    }
    let (g, s, t) = ring.gcdext(&a, &b);
    let x = &a / &g;
    let y = -(&b / &g);
    m.combine_cols(c, j, [&s, &t, &y, &x]);
    v.combine_cols(c, j, [&s, &t, &y, &x]);
}

pub fn hnf(ring: &Ring, m: &Matrix) -> Hnf {
    let mut h = m.clone();
    let mut u = Matrix::identity(m.rows());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        for i in r + 1..m.rows() {
            eliminate_row_entry(ring, &mut h, &mut u, r, i, c);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        let (pivot, unit) = ring.normalize(&h[(r, c)]);
        let inv = unit.recip();
        h.scale_row(r, &inv);
        u.scale_row(r, &inv);
        for i in 0..r {
            let rem = ring.reduce_mod(&h[(i, c)], &pivot);
            let q = -((&h[(i, c)] - rem) / &pivot);
            h.add_row_multiple(i, r, &q);
            u.add_row_multiple(i, r, &q);
        }
        pivots.push(c);
        r += 1;
    }
    Hnf { h, u, pivots }
}

pub fn snf(ring: &Ring, m: &Matrix) -> Snf {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut u = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);
    for t in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, num_bigint::BigInt)> = None;
        for i in t..rows {
            for j in t..cols {
                if let Some(s) = ring.size(&a[(i, j)]) {
                    if best.as_ref().is_none_or(|b| s < b.2) {
                        best = Some((i, j, s));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            for i in t + 1..rows {
                eliminate_row_entry(ring, &mut a, &mut u, t, i, t);
            }
            for j in t + 1..cols {
                eliminate_col_entry(ring, &mut a, &mut v, t, t, j);
            }
            if (t + 1..rows).any(|i| !a[(i, t)].is_zero()) {
                continue;
            }
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !ring.divides(&a[(t, t)], &a[(i, j)]))
            });
            match offender {
                Some(i) => {
                    let one = Scalar::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        let (_, unit) = ring.normalize(&a[(t, t)]);
        let inv = unit.recip();
        a.scale_row(t, &inv);
        u.scale_row(t, &inv);
    }
    Snf { d: a, u, v }
}

/// Nonzero diagonal entries of the Smith form.
pub fn invariant_factors(ring: &Ring, m: &Matrix) -> Vec<Scalar> {
    let d = snf(ring, m).d;
    (0..d.rows().min(d.cols()))
        .map(|i| d[(i, i)].clone())
        .take_while(|x| !x.is_zero())
        .collect()
}

pub fn is_invertible_over(ring: &Ring, m: &Matrix) -> bool {
    m.is_square() && m.in_ring(ring) && m.determinant().is_some_and(|d| ring.is_unit(&d))
}

/// Inverse over the ring, if `m` is invertible there.
pub fn inverse_over(ring: &Ring, m: &Matrix) -> Option<Matrix> {
    if !m.in_ring(ring) {
        return None;
    }
    m.inverse().filter(|inv| inv.in_ring(ring))
}

/// A saturated free submodule of `R^n`, basis stored as columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    ambient_rank: usize,
    basis: Matrix,
}

impl Lattice {
    pub fn zero(ambient_rank: usize) -> Self {
        Lattice {
            ambient_rank,
            basis: Matrix::zeros(ambient_rank, 0),
        }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Lattice {
            ambient_rank,
            basis: Matrix::identity(ambient_rank),
        }
    }

    /// Checks independence and saturation before accepting `basis`.
    pub fn from_basis(ring: &Ring, basis: Matrix) -> Result<Self, LinalgError> {
        let factors = invariant_factors(ring, &basis);
        if factors.len() < basis.cols() {
            return Err(LinalgError::NotIndependent);
        }
        if factors.iter().any(|f| !ring.is_unit(f)) {
            return Err(LinalgError::NotSaturated(
                factors.iter().map(ToString::to_string).collect(),
            ));
        }
        Ok(Lattice {
            ambient_rank: basis.rows(),
            basis,
        })
    }

    /// No checks; used for bases that may violate saturation (e.g. in tests of `split`).
    pub fn from_basis_unchecked(basis: Matrix) -> Self {
        Lattice {
            ambient_rank: basis.rows(),
            basis,
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn into_basis(self) -> Matrix {
        self.basis
    }
}

/// Saturation of the column span of `vectors`, as a canonical (HNF) basis.
pub fn saturate(ring: &Ring, vectors: &Matrix) -> Lattice {
    let n = vectors.rows();
    let k = vectors.rank();
    if k == 0 {
        return Lattice::zero(n);
    }
    let s = snf(ring, vectors);
    let u_inv = inverse_over(ring, &s.u).expect("snf transform is invertible over the ring");
    let span = u_inv.select_columns(0..k);
    let canon = hnf(ring, &span.transpose()).h.select_rows(0..k).transpose();
    Lattice {
        ambient_rank: n,
        basis: canon,
    }
}

/// `{x : m·x = 0}` with a canonical saturated basis.
pub fn kernel_saturated(ring: &Ring, m: &Matrix) -> Lattice {
    let mut ns = m.nullspace();
    for j in 0..ns.cols() {
        let l = ns
            .column(j)
            .iter()
            .fold(num_bigint::BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
        ns.scale_col(j, &Scalar::from_integer(l));
    }
    let lattice = saturate(ring, &ns);
    let factors = invariant_factors(ring, lattice.basis());
    assert!(
        (m * lattice.basis()).is_zero()
            && factors.len() == lattice.rank()
            && factors.iter().all(|f| ring.is_unit(f)),
        "internal invariant violated: kernel basis failed certification"
    );
    lattice
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    /// `k × n`, left inverse of the lattice basis.
    pub retraction: Matrix,
    /// `n × (n-k)`, columns completing the lattice basis to a basis of `R^n`.
    pub complement: Matrix,
}

pub fn split_saturated_inclusion(ring: &Ring, lattice: &Lattice) -> Result<Splitting, LinalgError> {
    let basis = lattice.basis();
    let (n, k) = basis.shape();
    let factors = invariant_factors(ring, basis);
    if factors.len() < k {
        return Err(LinalgError::NotIndependent);
    }
    if factors.iter().any(|f| !ring.is_unit(f)) {
        return Err(LinalgError::NotSaturated(
            factors.iter().map(ToString::to_string).collect(),
        ));
    }
    // Prefer standard vectors at the non-pivot coordinates; they complete the
    // basis exactly when the pivots of the HNF of basisᵀ are units.
    let pivots = hnf(ring, &basis.transpose()).pivots;
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut complement = Matrix::zeros(n, free.len());
    for (j, &f) in free.iter().enumerate() {
        complement[(f, j)] = Scalar::one();
    }
    let mut inv = inverse_over(ring, &basis.hconcat(&complement));
    if inv.is_none() {
        // basis = U⁻¹·[I;0]·V⁻¹, so the trailing columns of U⁻¹ complete it.
        let s = snf(ring, basis);
        let u_inv = inverse_over(ring, &s.u).expect("snf transform is invertible over the ring");
        complement = u_inv.select_columns(k..n);
        inv = inverse_over(ring, &basis.hconcat(&complement));
    }
    let inv = inv.ok_or_else(|| {
        LinalgError::NotSaturated(factors.iter().map(ToString::to_string).collect())
    })?;
    Ok(Splitting {
        retraction: inv.select_rows(0..k),
        complement,
    })
}

/// Coordinates `c` with `basis(L)·c = v`, if `v` lies in `L`.
pub fn membership(ring: &Ring, v: &[Scalar], lattice: &Lattice) -> Option<Vec<Scalar>> {
    if v.len() != lattice.ambient_rank() {
        return None;
    }
    let rhs = Matrix::column_vector(v);
    let c = lattice.basis().solve(&rhs)?;
    let coords = c.column(0);
    if coords.iter().all(|x| ring.contains(x)) && (lattice.basis() * &c) == rhs {
        Some(coords)
    } else {
        None
    }
}

/// Coordinates of every column of `m` in `lattice`, as a `rank × cols` matrix.
pub fn membership_matrix(ring: &Ring, m: &Matrix, lattice: &Lattice) -> Option<Matrix> {
    let mut out = Matrix::zeros(lattice.rank(), m.cols());
    for j in 0..m.cols() {
        let c = membership(ring, &m.column(j), lattice)?;
        for (i, x) in c.into_iter().enumerate() {
            out[(i, j)] = x;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::int;

    fn z() -> Ring {
        Ring::Integers
    }

    #[test]
    fn hnf_identity_and_zero() {
        let h = hnf(&z(), &Matrix::identity(2));
        assert_eq!(h.h, Matrix::identity(2));
        assert_eq!(h.u, Matrix::identity(2));
        let h = hnf(&z(), &Matrix::zeros(1, 2));
        assert_eq!(h.h, Matrix::zeros(1, 2));
        assert_eq!(h.u, Matrix::identity(1));
    }

    #[test]
    fn hnf_worked_example() {
        let m = Matrix::from_i64(&[&[2, 4], &[1, 3]]);
        let h = hnf(&z(), &m);
        assert_eq!(h.h, Matrix::from_i64(&[&[1, 1], &[0, 2]]));
        assert_eq!(&h.u * &m, h.h);
        assert!(is_invertible_over(&z(), &h.u));
    }

    #[test]
    fn snf_examples() {
        let m = Matrix::from_i64(&[&[2, 0], &[0, 3]]);
        let s = snf(&z(), &m);
        assert_eq!(s.d, Matrix::from_i64(&[&[1, 0], &[0, 6]]));
        assert_eq!(&(&s.u * &m) * &s.v, s.d);
        let s5 = snf(&Ring::Localized(5), &m);
        assert_eq!(s5.d, Matrix::identity(2));
        assert_eq!(snf(&z(), &Matrix::zeros(2, 3)).d, Matrix::zeros(2, 3));
    }

    #[test]
    fn invariant_factor_examples() {
        assert_eq!(invariant_factors(&z(), &Matrix::identity(3)), vec![int(1); 3]);
        assert_eq!(invariant_factors(&z(), &Matrix::from_i64(&[&[2]])), vec![int(2)]);
        assert_eq!(
            invariant_factors(&Ring::Localized(3), &Matrix::from_i64(&[&[2]])),
            vec![int(1)]
        );
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_saturated(&z(), &Matrix::from_i64(&[&[1, 1]]));
        assert_eq!(k.basis(), &Matrix::from_i64(&[&[1], &[-1]]));
        let k = kernel_saturated(&z(), &Matrix::from_i64(&[&[2, 2]]));
        assert_eq!(k.basis(), &Matrix::from_i64(&[&[1], &[-1]]));
        assert_eq!(kernel_saturated(&z(), &Matrix::identity(3)).rank(), 0);
    }

    #[test]
    fn split_examples() {
        let k = Lattice::from_basis(&z(), Matrix::from_i64(&[&[1], &[0]])).unwrap();
        let s = split_saturated_inclusion(&z(), &k).unwrap();
        assert_eq!(s.retraction, Matrix::from_i64(&[&[1, 0]]));
        assert_eq!(s.complement, Matrix::from_i64(&[&[0], &[1]]));

        let k = Lattice::from_basis(&z(), Matrix::from_i64(&[&[1], &[1]])).unwrap();
        let s = split_saturated_inclusion(&z(), &k).unwrap();
        assert_eq!(s.retraction, Matrix::from_i64(&[&[1, 0]]));
        assert_eq!(s.complement, Matrix::from_i64(&[&[0], &[1]]));
        assert_eq!(
            k.basis().hconcat(&s.complement).determinant(),
            Some(int(1))
        );

        // saturated, but the HNF pivot 2 is not a unit
        let k = Lattice::from_basis(&z(), Matrix::from_i64(&[&[2], &[3]])).unwrap();
        let s = split_saturated_inclusion(&z(), &k).unwrap();
        assert_eq!(&s.retraction * k.basis(), Matrix::identity(1));
        assert!(is_invertible_over(&z(), &k.basis().hconcat(&s.complement)));

        let bad = Lattice::from_basis_unchecked(Matrix::from_i64(&[&[2], &[0]]));
        assert!(matches!(
            split_saturated_inclusion(&z(), &bad),
            Err(LinalgError::NotSaturated(_))
        ));
        assert!(matches!(
            Lattice::from_basis(&z(), Matrix::from_i64(&[&[2], &[0]])),
            Err(LinalgError::NotSaturated(_))
        ));
    }

    #[test]
    fn membership_examples() {
        let l = Lattice::from_basis(&z(), Matrix::from_i64(&[&[1], &[-1]])).unwrap();
        assert_eq!(membership(&z(), &[int(2), int(-2)], &l), Some(vec![int(2)]));
        assert_eq!(membership(&z(), &[int(1), int(0)], &l), None);
        assert_eq!(membership(&z(), &[int(0), int(0)], &l), Some(vec![int(0)]));
        let zero = Lattice::zero(2);
        assert_eq!(membership(&z(), &[int(0), int(0)], &zero), Some(vec![]));
    }

    #[test]
    fn localized_membership_allows_unit_denominators() {
        let r = Ring::Localized(3);
        let l = Lattice::from_basis(&r, Matrix::from_i64(&[&[2], &[0]])).unwrap();
        assert_eq!(
            membership(&r, &[int(1), int(0)], &l),
            Some(vec![crate::ring::frac(1, 2)])
        );
        assert_eq!(membership(&Ring::Localized(2), &[int(1), int(0)], &l), None);
    }
}
