//! Reference checks that share no code with the core linear algebra.
//!
//! Ranks come from fraction-free (Bareiss) elimination, and ring-level
//! properties from maximal minors: a `k×n` matrix with `k ≤ n` is surjective
//! over the ring iff its maximal minors generate the unit ideal. Over ℤ that
//! is a gcd of 1, over ℤ_(p) it means some minor is prime to `p`.

use std::collections::BTreeMap;

use kwitness_core::complexes::{position_count, positions, CHOICES};
use kwitness_core::witness::{Certificate, ObjectId, RelationStep};
use kwitness_core::{Matrix, MultiIndex, NilMulticomplex, Ring, Scalar};
use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn in_ring(ring: &Ring, x: &Scalar) -> bool {
    match ring {
        Ring::Integers => x.denom().is_one(),
        Ring::Localized(p) => (x.denom() % BigInt::from(*p)).is_positive(),
    }
}

fn matrix_in_ring(ring: &Ring, m: &Matrix) -> bool {
    m.entries().iter().all(|x| in_ring(ring, x))
}

/// Rows scaled by the lcm of their denominators (a unit over the ring when the row lies in it).
fn integer_rows(m: &Matrix) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

/// Bareiss elimination in place; returns the rank. With a square input of
/// full rank, the last pivot is ± the determinant.
fn bareiss(a: &mut [Vec<BigInt>]) -> (usize, BigInt) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut sign = BigInt::one();
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        if p != r {
            a.swap(p, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[i][j] * &a[r][c] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == rows {
            break;
        }
    }
    (r, sign * prev)
}

pub fn rank(m: &Matrix) -> usize {
    bareiss(&mut integer_rows(m)).0
}

fn det_int(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let (r, d) = bareiss(&mut a);
    if r < n {
        BigInt::zero()
    } else {
        d
    }
}

/// All maximal minors of the integer-scaled matrix.
fn maximal_minors(m: &Matrix) -> Vec<BigInt> {
    let a = integer_rows(m);
    let (r, c) = m.shape();
    if r <= c {
        (0..c)
            .combinations(r)
            .map(|cs| det_int(a.iter().map(|row| cs.iter().map(|&j| row[j].clone()).collect()).collect()))
            .collect()
    } else {
        (0..r)
            .combinations(c)
            .map(|rs| det_int(rs.iter().map(|&i| a[i].clone()).collect()))
            .collect()
    }
}

/// The maximal minors generate the unit ideal of `ring`.
pub fn unit_maximal_minors(ring: &Ring, m: &Matrix) -> bool {
    if !matrix_in_ring(ring, m) {
        return false;
    }
    let minors = maximal_minors(m);
    match ring {
        Ring::Integers => minors.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one(),
        Ring::Localized(p) => {
            let p = BigInt::from(*p);
            minors.iter().any(|x| !(x % &p).is_zero())
        }
    }
}

/// Injective with saturated image.
pub fn split_injective(ring: &Ring, m: &Matrix) -> bool {
    m.rows() >= m.cols() && unit_maximal_minors(ring, m)
}

pub fn surjective(ring: &Ring, m: &Matrix) -> bool {
    m.rows() <= m.cols() && unit_maximal_minors(ring, m)
}

pub fn invertible(ring: &Ring, m: &Matrix) -> bool {
    m.is_square() && unit_maximal_minors(ring, m)
}

/// `0 → A --left--> B --right--> C → 0` is exact over `ring`.
///
/// With `left` split-injective and `right` surjective, exactness in the
/// middle reduces to `right∘left = 0` plus the rank count, because both
/// `im(left)` and `ker(right)` are then saturated of the same rank.
pub fn line_exact(ring: &Ring, left: &Matrix, right: &Matrix) -> bool {
    left.rows() == right.cols()
        && split_injective(ring, left)
        && surjective(ring, right)
        && (right * left).is_zero()
        && rank(left) + rank(right) == left.rows()
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Independent validity check of a Nil object: exact lines, mixed squares,
/// `ν` commuting with every differential, and `ν` nilpotent.
pub fn object_valid(ring: &Ring, o: &NilMulticomplex) -> Check {
    let c = o.base();
    let dim = c.dim();
    let g = c.graded();
    ensure(c.ring() == *ring, || "ring mismatch".into())?;
    ensure(o.nil().len() == position_count(dim), || "wrong number of endomorphisms".into())?;
    for p in positions(dim) {
        let r = g.rank(&p);
        let nu = &o.nil()[p.index()];
        ensure(nu.shape() == (r, r) && matrix_in_ring(ring, nu), || format!("bad endomorphism at {p}"))?;
        for dir in 0..dim {
            for ch in CHOICES {
                let d = c.differential(dir, ch, &p);
                ensure(d.shape() == g.differential_shape(dir, &p) && matrix_in_ring(ring, d), || {
                    format!("bad differential at {p}")
                })?;
            }
        }
    }
    for dir in 0..dim {
        for ch in CHOICES {
            for p in positions(dim).filter(|p| p.coords()[dir] == 0) {
                let left = c.differential(dir, ch, &p.with(dir, 2));
                let right = c.differential(dir, ch, &p.with(dir, 1));
                ensure(line_exact(ring, left, right), || format!("line through {p} in direction {dir} not exact"))?;
            }
        }
    }
    for i in 0..dim {
        for j in i + 1..dim {
            for a in CHOICES {
                for b in CHOICES {
                    for p in positions(dim) {
                        let (Some(pi), Some(pj)) = (p.lowered(i), p.lowered(j)) else { continue };
                        let lhs = c.differential(i, a, &pj) * c.differential(j, b, &p);
                        let rhs = c.differential(j, b, &pi) * c.differential(i, a, &p);
                        ensure(lhs == rhs, || format!("mixed square at {p} fails"))?;
                    }
                }
            }
        }
    }
    for dir in 0..dim {
        for ch in CHOICES {
            for p in positions(dim) {
                let Some(t) = p.lowered(dir) else { continue };
                let d = c.differential(dir, ch, &p);
                ensure(&o.nil()[t.index()] * d == d * &o.nil()[p.index()], || format!("ν square at {p} fails"))?;
            }
        }
    }
    for p in positions(dim) {
        let nu = &o.nil()[p.index()];
        let mut power = Matrix::identity(nu.rows());
        for _ in 0..nu.rows() {
            power = &power * nu;
        }
        ensure(power.is_zero(), || format!("ν not nilpotent at {p}"))?;
    }
    Ok(())
}

fn commutes(a: &NilMulticomplex, b: &NilMulticomplex, maps: &[Matrix]) -> bool {
    let dim = a.base().dim();
    let at = |p: &MultiIndex| &maps[p.index()];
    for dir in 0..dim {
        for ch in CHOICES {
            for p in positions(dim) {
                let Some(t) = p.lowered(dir) else { continue };
                if at(&t) * a.base().differential(dir, ch, &p) != b.base().differential(dir, ch, &p) * at(&p) {
                    return false;
                }
            }
        }
    }
    positions(dim).all(|p| at(&p) * &a.nil()[p.index()] == &b.nil()[p.index()] * at(&p))
}

fn shapes_ok(maps: &[Matrix], dim: usize, shape: impl Fn(&MultiIndex) -> (usize, usize)) -> bool {
    maps.len() == position_count(dim) && positions(dim).all(|p| maps[p.index()].shape() == shape(&p))
}

fn step_valid(cert: &Certificate, step: &RelationStep) -> Check {
    let ring = &cert.ring;
    let get = |id: ObjectId| cert.registry.get(id).ok_or_else(|| format!("missing object {id}"));
    match step {
        RelationStep::ShortExact(s) => {
            let (a, b, c) = (get(s.sub)?, get(s.total)?, get(s.quotient)?);
            let dim = b.base().dim();
            ensure(a.base().dim() == dim && c.base().dim() == dim, || "dimension mismatch".into())?;
            let (ga, gb, gc) = (a.base().graded(), b.base().graded(), c.base().graded());
            ensure(
                shapes_ok(&s.inclusions, dim, |p| (gb.rank(p), ga.rank(p)))
                    && shapes_ok(&s.projections, dim, |p| (gc.rank(p), gb.rank(p)))
                    && shapes_ok(&s.retractions, dim, |p| (ga.rank(p), gb.rank(p)))
                    && shapes_ok(&s.sections, dim, |p| (gb.rank(p), gc.rank(p))),
                || "shape mismatch".into(),
            )?;
            for p in positions(dim) {
                let x = p.index();
                let (i, q) = (&s.inclusions[x], &s.projections[x]);
                ensure(split_injective(ring, i), || format!("inclusion at {p} not split injective"))?;
                ensure(surjective(ring, q), || format!("projection at {p} not surjective"))?;
                ensure((q * i).is_zero() && rank(i) + rank(q) == i.rows(), || format!("not exact at {p}"))?;
                ensure(matrix_in_ring(ring, &s.retractions[x]) && &s.retractions[x] * i == Matrix::identity(i.cols()), || {
                    format!("retraction at {p}")
                })?;
                ensure(matrix_in_ring(ring, &s.sections[x]) && q * &s.sections[x] == Matrix::identity(q.rows()), || {
                    format!("section at {p}")
                })?;
            }
            ensure(commutes(a, b, &s.inclusions), || "inclusion is not a morphism".into())?;
            ensure(commutes(b, c, &s.projections), || "projection is not a morphism".into())
        }
        RelationStep::Diagonal { object, direction } => {
            let o = get(*object)?;
            ensure(*direction < o.base().dim(), || "direction out of range".into())?;
            let pair = &o.base().pairs()[*direction];
            ensure(pair.d == pair.d_tilde && o.nil().iter().all(Matrix::is_zero), || "not diagonal".into())
        }
        RelationStep::Isomorphism { left, right, maps } => {
            let (l, r) = (get(*left)?, get(*right)?);
            let dim = l.base().dim();
            ensure(r.base().dim() == dim && l.base().graded() == r.base().graded(), || "rank mismatch".into())?;
            let g = l.base().graded();
            ensure(shapes_ok(maps, dim, |p| (g.rank(p), g.rank(p))), || "shape mismatch".into())?;
            ensure(maps.iter().all(|m| invertible(ring, m)), || "map not invertible".into())?;
            ensure(commutes(l, r, maps), || "isomorphism is not a morphism".into())
        }
    }
}

/// `Σ cⱼ · contributionⱼ`, summed directly from the step payloads.
pub fn sum_contributions(steps: &[RelationStep], coefficients: &[BigInt]) -> BTreeMap<u32, BigInt> {
    let mut acc: BTreeMap<u32, BigInt> = BTreeMap::new();
    let mut add = |id: ObjectId, v: BigInt| {
        *acc.entry(id.0).or_default() += v;
    };
    for (step, c) in steps.iter().zip(coefficients) {
        match step {
            RelationStep::ShortExact(s) => {
                add(s.total, c.clone());
                add(s.sub, -c);
                add(s.quotient, -c);
            }
            RelationStep::Diagonal { object, .. } => add(*object, c.clone()),
            RelationStep::Isomorphism { left, right, .. } => {
                add(*left, c.clone());
                add(*right, -c);
            }
        }
    }
    acc.retain(|_, v| !v.is_zero());
    acc
}

/// The claim and the target difference as plain maps.
pub fn claim_map(cert: &Certificate) -> BTreeMap<u32, BigInt> {
    cert.claim.terms().map(|(id, c)| (id.0, c.clone())).collect()
}

/// Replays every identity a certificate asserts, given the step coefficients
/// that derive its claim.
pub fn replay_certificate(cert: &Certificate, coefficients: &[BigInt]) -> Check {
    for (id, o) in cert.registry.iter() {
        object_valid(&cert.ring, o).map_err(|e| format!("object {id}: {e}"))?;
    }
    let get = |id: ObjectId| cert.registry.get(id).ok_or_else(|| format!("missing target object {id}"));
    let (nu, zero) = (get(cert.target.nu)?, get(cert.target.zero)?);
    ensure(nu.base() == zero.base(), || "target bases differ".into())?;
    ensure(zero.nil().iter().all(Matrix::is_zero), || "zero target has nonzero ν".into())?;
    let mut expected = BTreeMap::new();
    expected.insert(cert.target.nu.0, BigInt::one());
    *expected.entry(cert.target.zero.0).or_insert_with(BigInt::zero) -= BigInt::one();
    expected.retain(|_, v: &mut BigInt| !v.is_zero());
    ensure(claim_map(cert) == expected, || "claim is not the target difference".into())?;
    for (k, s) in cert.steps.iter().enumerate() {
        step_valid(cert, s).map_err(|e| format!("step {k}: {e}"))?;
    }
    ensure(coefficients.len() == cert.steps.len(), || "coefficient count".into())?;
    ensure(sum_contributions(&cert.steps, coefficients) == expected, || "steps do not sum to the claim".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use kwitness_core::ring::int;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(rows)
    }

    #[test]
    fn ranks_and_minors() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&Matrix::zeros(0, 3)), 0);
        assert_eq!(det_int(integer_rows(&m(&[&[0, 1], &[1, 0]]))), BigInt::from(-1));
        assert_eq!(det_int(integer_rows(&m(&[&[2, 1, 0], &[0, 3, 1], &[1, 0, 4]]))), BigInt::from(25));
        assert!(surjective(&Ring::Integers, &m(&[&[2, 3]])));
        assert!(!surjective(&Ring::Integers, &m(&[&[2, 4]])));
        assert!(surjective(&Ring::Localized(3), &m(&[&[2, 4]])));
        assert!(split_injective(&Ring::Integers, &Matrix::zeros(2, 0)));
    }

    #[test]
    fn lines() {
        let z = Ring::Integers;
        assert!(line_exact(&z, &m(&[&[1], &[0]]), &m(&[&[0, 1]])));
        assert!(!line_exact(&z, &Matrix::zeros(1, 0), &m(&[&[2]])));
        assert!(line_exact(&Ring::Localized(3), &Matrix::zeros(1, 0), &m(&[&[2]])));
        // exact over Q only
        assert!(!line_exact(&z, &m(&[&[2], &[0]]), &m(&[&[0, 1]])));
        let half = Matrix::from_fn(1, 1, |_, _| Scalar::new(1.into(), 2.into()));
        assert!(!invertible(&z, &half));
        assert!(invertible(&Ring::Localized(3), &half));
        assert!(!in_ring(&Ring::Localized(2), &Scalar::new(1.into(), 2.into())));
        assert!(in_ring(&Ring::Localized(2), &int(3)));
    }
}
