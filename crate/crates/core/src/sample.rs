//! Seeded random matrices for corpora and tests.

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::linalg::inverse_over;
use crate::matrix::Matrix;
use crate::ring::{int, Ring, Scalar};

fn max_abs(m: &Matrix) -> Scalar {
    m.entries()
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(|| int(0))
}

/// Random matrix invertible over ℤ (hence over every supported ring) with
/// entries bounded by `bound` in absolute value. Returns it with its inverse.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> (Matrix, Matrix) {
    let bound = bound.max(1);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut m = Matrix::from_fn(n, n, |i, j| {
        if perm[i] == j {
            if rng.gen_bool(0.5) {
                int(1)
            } else {
                int(-1)
            }
        } else {
            int(0)
        }
    });
    if n >= 2 {
        let limit = int(bound);
        for _ in 0..2 * n {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = int(rng.gen_range(-bound..=bound));
            let mut next = m.clone();
            next.add_row_multiple(i, j, &c);
            if max_abs(&next) <= limit {
                m = next;
            }
        }
    }
    let inv = inverse_over(&Ring::Integers, &m).expect("product of elementary matrices");
    (m, inv)
}

/// Random invertible matrix over `ring`: a unimodular integer matrix, and over
/// `Z_(p)` additionally a diagonal scaling by small units prime to `p`.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, ring: &Ring, n: usize, bound: i64) -> (Matrix, Matrix) {
    let (m, inv) = random_unimodular(rng, n, bound);
    match ring {
        Ring::Integers => (m, inv),
        Ring::Localized(p) => {
            let units: Vec<Scalar> = (0..n)
                .map(|_| loop {
                    let u = rng.gen_range(1..=bound.max(2));
                    if !(u as u64).is_multiple_of(*p) {
                        break int(u);
                    }
                })
                .collect();
            let scaled = Matrix::from_fn(n, n, |i, j| &m[(i, j)] * &units[i]);
            let scaled_inv = Matrix::from_fn(n, n, |i, j| &inv[(i, j)] / &units[j]);
            (scaled, scaled_inv)
        }
    }
}

/// Strictly upper-triangular matrix with entries in `[-bound, bound]`, with some
/// entries forced to zero so that a range of nilpotency indices appears.
pub fn random_strictly_upper<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> Matrix {
    let density = rng.gen_range(0.2..=1.0);
    Matrix::from_fn(n, n, |i, j| {
        if j > i && rng.gen_bool(density) {
            int(rng.gen_range(-bound..=bound))
        } else {
            int(0)
        }
    })
}

/// Nilpotent `U·T·U⁻¹` with `T` strictly upper triangular and `U` invertible
/// over `ring` with entries in `[-3, 3]`; retried until every entry (numerator
/// and denominator) is bounded by `entry_bound`.
pub fn random_nilpotent<R: Rng + ?Sized>(rng: &mut R, ring: &Ring, n: usize, entry_bound: i64) -> Matrix {
    let limit = int(entry_bound);
    for attempt in 0.. {
        let t_bound = if attempt < 50 { 2 } else { 1 };
        let t = random_strictly_upper(rng, n, t_bound);
        let (u, u_inv) = random_invertible(rng, ring, n, 3);
        let nu = &(&u * &t) * &u_inv;
        let ok = nu
            .entries()
            .iter()
            .all(|x| x.numer().abs() <= *limit.numer() && x.denom() <= limit.numer());
        if ok {
            return nu;
        }
    }
    unreachable!()
}
