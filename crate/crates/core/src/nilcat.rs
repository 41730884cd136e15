//! Multicomplexes with a commuting nilpotent endomorphism, their kernel
//! filtration `0 ⊆ ker ν ⊆ ker ν² ⊆ … ⊆ F`, and the splitting of one layer of
//! that filtration into a short exact sequence of Nil objects.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complexes::{
    positions, validate_multicomplex, BinaryMulticomplex, DifferentialPair, Failure, FailureKind,
    GradedModule, ShapeError, Validation, ValidationReport, CHOICES,
};
use crate::linalg::{
    invariant_factors, inverse_over, kernel_saturated, membership_matrix, split_saturated_inclusion, Lattice,
};
use crate::matrix::Matrix;
use crate::ring::{int, Scalar};

/// A binary multicomplex with an endomorphism `ν` at every position.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NilMulticomplex {
    base: BinaryMulticomplex,
    nil: Vec<Matrix>,
}

impl NilMulticomplex {
    pub fn new(base: BinaryMulticomplex, nil: Vec<Matrix>) -> Result<Self, ShapeError> {
        let n = NilMulticomplex { base, nil };
        n.check_shape()?;
        Ok(n)
    }

    /// `base` with `ν = 0`.
    pub fn zero(base: BinaryMulticomplex) -> Self {
        let nil = positions(base.dim())
            .map(|p| Matrix::zeros(base.rank(&p), base.rank(&p)))
            .collect();
        NilMulticomplex { base, nil }
    }

    /// A free module of rank `nu.rows()` with endomorphism `nu`.
    pub fn module(ring: crate::ring::Ring, nu: Matrix) -> Result<Self, ShapeError> {
        NilMulticomplex::new(BinaryMulticomplex::module(ring, nu.rows()), vec![nu])
    }

    pub fn check_shape(&self) -> Result<(), ShapeError> {
        self.base.check_shape()?;
        let dim = self.base.dim();
        if self.nil.len() != crate::complexes::position_count(dim) {
            return Err(ShapeError::PositionCount {
                expected: crate::complexes::position_count(dim),
                found: self.nil.len(),
            });
        }
        for pos in positions(dim) {
            let r = self.base.rank(&pos);
            let m = &self.nil[pos.index()];
            if m.shape() != (r, r) {
                return Err(ShapeError::EndomorphismShape {
                    position: pos,
                    expected: (r, r),
                    found: m.shape(),
                });
            }
            if !m.in_ring(&self.base.ring()) {
                return Err(ShapeError::NotInRing {
                    ring: self.base.ring(),
                    location: format!("endomorphism at {pos}"),
                });
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &BinaryMulticomplex {
        &self.base
    }

    pub fn base_mut(&mut self) -> &mut BinaryMulticomplex {
        &mut self.base
    }

    pub fn nil(&self) -> &[Matrix] {
        &self.nil
    }

    pub fn nil_mut(&mut self) -> &mut [Matrix] {
        &mut self.nil
    }

    pub fn is_zero_endomorphism(&self) -> bool {
        self.nil.iter().all(Matrix::is_zero)
    }

    pub fn with_zero_endomorphism(&self) -> Self {
        NilMulticomplex::zero(self.base.clone())
    }
}

/// Base validation plus `ν∘d = d∘ν` for every differential and `ν^rank = 0`.
pub fn validate_nil(n: &NilMulticomplex) -> Result<Validation, ShapeError> {
    n.check_shape()?;
    let mut v = validate_multicomplex(&n.base)?;
    let c = &n.base;
    for dir in 0..c.dim() {
        for choice in CHOICES {
            for pos in positions(c.dim()) {
                let Some(target) = pos.lowered(dir) else { continue };
                let d = c.differential(dir, choice, &pos);
                if &n.nil[target.index()] * d != d * &n.nil[pos.index()] {
                    v.report.failures.push(Failure {
                        position: pos,
                        direction: Some(dir),
                        choice: Some(choice),
                        kind: FailureKind::NilCommutation,
                    });
                }
            }
        }
    }
    for pos in positions(c.dim()) {
        let nu = &n.nil[pos.index()];
        if !nu.pow(nu.rows()).is_zero() {
            v.report.failures.push(Failure {
                position: pos,
                direction: None,
                choice: None,
                kind: FailureKind::NotNilpotent,
            });
        }
    }
    if !v.report.passed() {
        v.witness = None;
    }
    Ok(v)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NilError {
    #[error("endomorphism at position index {0} is not nilpotent")]
    NotNilpotent(usize),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NilIndexData {
    /// Least `m` with `ν^m = 0`, per position (0 on rank-0 positions).
    pub per_position: Vec<usize>,
    pub max_index: usize,
    /// Minimum over positions of nonzero rank; 0 if every position is empty.
    pub min_index: usize,
}

pub fn nil_index(n: &NilMulticomplex) -> Result<NilIndexData, NilError> {
    let mut per_position = Vec::with_capacity(n.nil.len());
    for (i, nu) in n.nil.iter().enumerate() {
        let r = nu.rows();
        if r == 0 {
            per_position.push(0);
            continue;
        }
        let mut power = nu.clone();
        let mut m = 1;
        while !power.is_zero() {
            if m >= r {
                return Err(NilError::NotNilpotent(i));
            }
            power = &power * nu;
            m += 1;
        }
        per_position.push(m);
    }
    let max_index = per_position.iter().copied().max().unwrap_or(0);
    let min_index = per_position.iter().copied().filter(|&m| m > 0).min().unwrap_or(0);
    Ok(NilIndexData {
        per_position,
        max_index,
        min_index,
    })
}

/// `K_i = ker ν^i` at every position, for `i = 1..=maxIndex`; `result[i-1][pos]`.
///
/// Inclusions, `ν(K_i) ⊆ K_{i-1}` and freeness of `K_{i+1}/K_i` are all checked.
pub fn kernel_filtration(n: &NilMulticomplex) -> Result<Vec<Vec<Lattice>>, NilError> {
    let ring = n.base.ring();
    let idx = nil_index(n)?;
    let m = idx.max_index;
    let mut levels: Vec<Vec<Lattice>> = Vec::with_capacity(m);
    for i in 1..=m {
        let level: Vec<Lattice> = n
            .nil
            .iter()
            .map(|nu| kernel_saturated(&ring, &nu.pow(i)))
            .collect();
        levels.push(level);
    }
    let violation = |msg: String| Err(NilError::InternalInvariantViolation(msg));
    for (pos, nu) in n.nil.iter().enumerate() {
        let r = nu.rows();
        if m > 0 && levels[m - 1][pos].rank() != r {
            return violation(format!("top of filtration is not the full module at index {pos}"));
        }
        for i in 0..m {
            let k = &levels[i][pos];
            let image = nu * k.basis();
            let lower_ok = if i == 0 {
                image.is_zero()
            } else {
                membership_matrix(&ring, &image, &levels[i - 1][pos]).is_some()
            };
            if !lower_ok {
                return violation(format!("ν(K_{}) not inside K_{} at index {pos}", i + 1, i));
            }
            if i + 1 < m {
                let Some(coords) = membership_matrix(&ring, k.basis(), &levels[i + 1][pos]) else {
                    return violation(format!("K_{} not inside K_{} at index {pos}", i + 1, i + 2));
                };
                let f = invariant_factors(&ring, &coords);
                if f.len() != k.rank() || f.iter().any(|x| !ring.is_unit(x)) {
                    return violation(format!("K_{}/K_{} has torsion at index {pos}", i + 2, i + 1));
                }
            }
        }
    }
    Ok(levels)
}

/// Exponent `e` of the sub-object `ker ν^e` split off by [`layer_split`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Strategy {
    /// `e = maxIndex − 1`: the quotient carries `ν = 0`.
    #[default]
    MaxIndex,
    /// `e = minIndex − 1` (at least 1): the quotient may keep a nonzero `ν`.
    MinIndex,
}

impl Strategy {
    pub fn exponent(&self, idx: &NilIndexData) -> usize {
        match self {
            Strategy::MaxIndex => idx.max_index.saturating_sub(1),
            Strategy::MinIndex => idx.min_index.saturating_sub(1).max(1),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::MaxIndex => write!(f, "max-index"),
            Strategy::MinIndex => write!(f, "min-index"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Sub,
    Quotient,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Sub => write!(f, "sub"),
            Side::Quotient => write!(f, "quotient"),
        }
    }
}

/// A side condition of the layer split that does not hold for this instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitFailure {
    pub exponent: usize,
    pub side: Side,
    pub report: ValidationReport,
    /// The offending object, in its own bases.
    pub object: NilMulticomplex,
}

impl fmt::Display for SplitFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} object ker ν^{} fails validation", self.side, self.exponent)?;
        for fail in &self.report.failures {
            write!(f, "\n  {} line {fail}", self.side)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("split side condition failed: {0}")]
    Failure(Box<SplitFailure>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Nil(#[from] NilError),
}

/// `0 → (K, ν|K) → (F, ν) → (F/K, ν̄) → 0` with all per-position data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiltrationLayer {
    pub exponent: usize,
    pub sub: NilMulticomplex,
    pub quotient: NilMulticomplex,
    /// `rank(F_x) × rank(K_x)`: the saturated basis of `K_x`.
    pub inclusions: Vec<Matrix>,
    /// `rank(Q_x) × rank(F_x)`.
    pub projections: Vec<Matrix>,
    /// `rank(K_x) × rank(F_x)`, left inverse of the inclusion.
    pub retractions: Vec<Matrix>,
    /// `rank(F_x) × rank(Q_x)`, right inverse of the projection.
    pub sections: Vec<Matrix>,
}

pub fn layer_split(n: &NilMulticomplex, strategy: Strategy) -> Result<FiltrationLayer, SplitError> {
    let ring = n.base.ring();
    let dim = n.base.dim();
    let idx = nil_index(n)?;
    if idx.max_index < 2 {
        return Err(SplitError::Precondition(format!(
            "maximal nilpotency index {} < 2",
            idx.max_index
        )));
    }
    let e = strategy.exponent(&idx);
    let internal = |msg: String| SplitError::Nil(NilError::InternalInvariantViolation(msg));

    let mut lattices = Vec::new();
    let mut inclusions = Vec::new();
    let mut retractions = Vec::new();
    let mut projections = Vec::new();
    let mut sections = Vec::new();
    for (i, nu) in n.nil.iter().enumerate() {
        let k = kernel_saturated(&ring, &nu.pow(e));
        let split = split_saturated_inclusion(&ring, &k)
            .map_err(|err| internal(format!("kernel at index {i} does not split: {err}")))?;
        let full = k.basis().hconcat(&split.complement);
        let inv = inverse_over(&ring, &full)
            .ok_or_else(|| internal(format!("splitting basis at index {i} is not invertible")))?;
        let (r, kr) = k.basis().shape();
        inclusions.push(k.basis().clone());
        retractions.push(inv.select_rows(0..kr));
        projections.push(inv.select_rows(kr..r));
        sections.push(split.complement);
        lattices.push(k);
    }

    let sub_ranks: Vec<usize> = lattices.iter().map(Lattice::rank).collect();
    let q_ranks: Vec<usize> = lattices.iter().map(|l| l.ambient_rank() - l.rank()).collect();
    let mut sub_pairs = Vec::with_capacity(dim);
    let mut q_pairs = Vec::with_capacity(dim);
    for dir in 0..dim {
        let mut sub_pair = DifferentialPair { d: Vec::new(), d_tilde: Vec::new() };
        let mut q_pair = DifferentialPair { d: Vec::new(), d_tilde: Vec::new() };
        for choice in CHOICES {
            for pos in positions(dim) {
                let x = pos.index();
                let (ds, dq) = match pos.lowered(dir) {
                    None => (Matrix::zeros(0, sub_ranks[x]), Matrix::zeros(0, q_ranks[x])),
                    Some(t) => {
                        let t = t.index();
                        let d = n.base.differential(dir, choice, &pos);
                        let moved = d * &inclusions[x];
                        let ds = membership_matrix(&ring, &moved, &lattices[t]).ok_or_else(|| {
                            internal(format!("direction {dir} {choice} does not preserve ker ν^{e} at {pos}"))
                        })?;
                        let dq = &(&projections[t] * d) * &sections[x];
                        if &inclusions[t] * &ds != moved || &projections[t] * d != &dq * &projections[x] {
                            return Err(internal(format!(
                                "induced differential square fails at {pos}, direction {dir} {choice}"
                            )));
                        }
                        (ds, dq)
                    }
                };
                sub_pair.get_mut(choice).push(ds);
                q_pair.get_mut(choice).push(dq);
            }
        }
        sub_pairs.push(sub_pair);
        q_pairs.push(q_pair);
    }

    let mut sub_nil = Vec::new();
    let mut q_nil = Vec::new();
    for (x, nu) in n.nil.iter().enumerate() {
        let moved = nu * &inclusions[x];
        let ns = membership_matrix(&ring, &moved, &lattices[x])
            .ok_or_else(|| internal(format!("ν does not preserve ker ν^{e} at index {x}")))?;
        let nq = &(&projections[x] * nu) * &sections[x];
        let identities_hold = &inclusions[x] * &ns == moved
            && &projections[x] * nu == &nq * &projections[x]
            && &retractions[x] * &inclusions[x] == Matrix::identity(sub_ranks[x])
            && &projections[x] * &sections[x] == Matrix::identity(q_ranks[x])
            && (&projections[x] * &inclusions[x]).is_zero();
        if !identities_hold {
            return Err(internal(format!("splitting identities fail at index {x}")));
        }
        sub_nil.push(ns);
        q_nil.push(nq);
    }
    if strategy == Strategy::MaxIndex && q_nil.iter().any(|m| !m.is_zero()) {
        return Err(internal("quotient endomorphism is nonzero for exponent maxIndex − 1".into()));
    }

    let build = |ranks: Vec<usize>, pairs: Vec<DifferentialPair>, nil: Vec<Matrix>| {
        let graded = GradedModule::new(dim, ranks).map_err(|e| internal(e.to_string()))?;
        let base = BinaryMulticomplex::new(ring, graded, pairs).map_err(|e| internal(e.to_string()))?;
        NilMulticomplex::new(base, nil).map_err(|e| internal(e.to_string()))
    };
    let sub = build(sub_ranks, sub_pairs, sub_nil)?;
    let quotient = build(q_ranks, q_pairs, q_nil)?;

    for (side, obj) in [(Side::Sub, &sub), (Side::Quotient, &quotient)] {
        let v = validate_nil(obj).map_err(|e| internal(e.to_string()))?;
        if !v.report.passed() {
            return Err(SplitError::Failure(Box::new(SplitFailure {
                exponent: e,
                side,
                report: v.report,
                object: obj.clone(),
            })));
        }
    }

    Ok(FiltrationLayer {
        exponent: e,
        sub,
        quotient,
        inclusions,
        projections,
        retractions,
        sections,
    })
}

/// Linear constraints `ν(x−eᵢ)·d(x) − d(x)·ν(x) = 0` on the stacked entries of `ν`.
fn commutation_constraints(c: &BinaryMulticomplex) -> (Matrix, Vec<usize>) {
    let dim = c.dim();
    let mut offsets = Vec::new();
    let mut total = 0;
    for p in positions(dim) {
        offsets.push(total);
        total += c.rank(&p) * c.rank(&p);
    }
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut seen = HashSet::new();
    for dir in 0..dim {
        for choice in CHOICES {
            for pos in positions(dim) {
                let Some(t) = pos.lowered(dir) else { continue };
                let d = c.differential(dir, choice, &pos);
                let (rt, rx) = (c.rank(&t), c.rank(&pos));
                for a in 0..rt {
                    for b in 0..rx {
                        let mut row = vec![Scalar::zero(); total];
                        // (ν_t · d)[a][b] = Σ_k ν_t[a][k] d[k][b]
                        for k in 0..rt {
                            row[offsets[t.index()] + a * rt + k] += &d[(k, b)];
                        }
                        // (d · ν_x)[a][b] = Σ_k d[a][k] ν_x[k][b]
                        for k in 0..rx {
                            row[offsets[pos.index()] + k * rx + b] -= &d[(a, k)];
                        }
                        if row.iter().any(|v| !v.is_zero()) && seen.insert(row.clone()) {
                            rows.push(row);
                        }
                    }
                }
            }
        }
    }
    let m = Matrix::from_rows(rows, total).expect("uniform row length");
    (m, offsets)
}

/// Rational nullspace basis with each vector scaled to a primitive integer vector.
///
/// The sampler only needs integral points of the commutant, and saturating a
/// kernel with hundreds of unknowns is far too slow in exact arithmetic.
fn integral_nullspace(m: &Matrix) -> Matrix {
    let mut ns = m.nullspace();
    for j in 0..ns.cols() {
        let col = ns.column(j);
        let l = col.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let g = col
            .iter()
            .fold(BigInt::zero(), |acc, x| acc.gcd(&(x.numer() * (&l / x.denom()))));
        ns.scale_col(j, &Scalar::new(l, g));
    }
    ns
}

/// Nilpotent endomorphisms commuting with every differential of `c`.
///
/// The commutant is computed exactly over the fraction field; each trial draws a
/// small integer combination of one to three basis vectors and keeps it if it
/// is nilpotent at every position. `ν = 0` is always the first element.
pub fn commutant_nilpotent_sample(c: &BinaryMulticomplex, seed: u64, trials: usize) -> Vec<NilMulticomplex> {
    let zero = NilMulticomplex::zero(c.clone());
    let mut out = vec![zero];
    if trials == 0 || c.graded().total_rank() == 0 {
        return out;
    }
    let (constraints, offsets) = commutation_constraints(c);
    let basis = integral_nullspace(&constraints);
    let k = basis.cols();
    if k == 0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = &basis;
    for _ in 0..trials {
        let size = rng.gen_range(1..=k.min(3));
        let mut v = vec![Scalar::zero(); basis.rows()];
        for j in sample(&mut rng, k, size) {
            let coeff = int(*[-2, -1, 1, 2].get(rng.gen_range(0..4)).unwrap_or(&1));
            for (i, slot) in v.iter_mut().enumerate() {
                *slot += &basis[(i, j)] * &coeff;
            }
        }
        let nil: Vec<Matrix> = positions(c.dim())
            .map(|p| {
                let r = c.rank(&p);
                let off = offsets[p.index()];
                Matrix::from_fn(r, r, |a, b| v[off + a * r + b].clone())
            })
            .collect();
        if nil.iter().all(|m| m.pow(m.rows()).is_zero()) {
            let cand = NilMulticomplex {
                base: c.clone(),
                nil,
            };
            if !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    fn z() -> Ring {
        Ring::Integers
    }

    fn diagonal_121() -> BinaryMulticomplex {
        let d2 = Matrix::from_i64(&[&[1], &[0]]);
        let d1 = Matrix::from_i64(&[&[0, 1]]);
        BinaryMulticomplex::line(z(), d2.clone(), d1.clone(), d2, d1).unwrap()
    }

    fn twisted_121() -> BinaryMulticomplex {
        BinaryMulticomplex::line(
            z(),
            Matrix::from_i64(&[&[1], &[0]]),
            Matrix::from_i64(&[&[0, 1]]),
            Matrix::from_i64(&[&[0], &[1]]),
            Matrix::from_i64(&[&[1, 0]]),
        )
        .unwrap()
    }

    fn shifted_121(nu1: Matrix) -> NilMulticomplex {
        NilMulticomplex::new(diagonal_121(), vec![Matrix::zeros(1, 1), nu1, Matrix::zeros(1, 1)]).unwrap()
    }

    #[test]
    fn validate_nil_examples() {
        assert!(validate_nil(&NilMulticomplex::zero(diagonal_121())).unwrap().report.passed());
        let ok = shifted_121(Matrix::from_i64(&[&[0, 1], &[0, 0]]));
        assert!(validate_nil(&ok).unwrap().report.passed());
        let bad = shifted_121(Matrix::identity(2));
        let report = validate_nil(&bad).unwrap().report;
        assert!(report.failures.iter().any(|f| f.kind == FailureKind::NotNilpotent));
    }

    #[test]
    fn nil_index_examples() {
        let idx = |m: Matrix| nil_index(&NilMulticomplex::module(z(), m).unwrap()).unwrap().max_index;
        assert_eq!(idx(Matrix::from_i64(&[&[0, 1], &[0, 0]])), 2);
        assert_eq!(idx(Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]])), 3);
        assert_eq!(idx(Matrix::zeros(3, 3)), 1);
        assert_eq!(idx(Matrix::zeros(0, 0)), 0);
        let not = NilMulticomplex::module(z(), Matrix::identity(2)).unwrap();
        assert_eq!(nil_index(&not), Err(NilError::NotNilpotent(0)));
    }

    #[test]
    fn filtration_of_jordan_block() {
        let nu = Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let f = kernel_filtration(&NilMulticomplex::module(z(), nu).unwrap()).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f[0][0].basis(), &Matrix::from_i64(&[&[1], &[0], &[0]]));
        assert_eq!(f[1][0].basis(), &Matrix::from_i64(&[&[1, 0], &[0, 1], &[0, 0]]));
        assert_eq!(f[2][0].rank(), 3);
    }

    #[test]
    fn filtration_is_saturated() {
        let nu = Matrix::from_i64(&[&[0, 2], &[0, 0]]);
        let f = kernel_filtration(&NilMulticomplex::module(z(), nu).unwrap()).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0][0].basis(), &Matrix::from_i64(&[&[1], &[0]]));
        let f0 = kernel_filtration(&NilMulticomplex::module(z(), Matrix::zeros(2, 2)).unwrap()).unwrap();
        assert_eq!(f0.len(), 1);
        assert_eq!(f0[0][0].rank(), 2);
    }

    #[test]
    fn layer_split_single_module() {
        let n = NilMulticomplex::module(z(), Matrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap();
        let layer = layer_split(&n, Strategy::MaxIndex).unwrap();
        assert_eq!(layer.exponent, 1);
        assert_eq!(layer.inclusions[0], Matrix::from_i64(&[&[1], &[0]]));
        assert_eq!(layer.sub.nil()[0], Matrix::zeros(1, 1));
        assert_eq!(layer.quotient.nil()[0], Matrix::zeros(1, 1));
        assert_eq!(layer.retractions[0], Matrix::from_i64(&[&[1, 0]]));
        assert_eq!(layer.sections[0], Matrix::from_i64(&[&[0], &[1]]));
        assert_eq!(layer.projections[0], Matrix::from_i64(&[&[0, 1]]));
    }

    #[test]
    fn layer_split_reports_non_exact_sub_line() {
        let n = shifted_121(Matrix::from_i64(&[&[0, 1], &[0, 0]]));
        for strategy in [Strategy::MaxIndex, Strategy::MinIndex] {
            match layer_split(&n, strategy) {
                Err(SplitError::Failure(f)) => {
                    assert_eq!(f.side, Side::Sub);
                    assert!(f.report.failures.iter().any(|x| x.position.coords() == [0]
                        && matches!(x.kind, FailureKind::NotSurjective { .. })));
                }
                other => panic!("expected split failure, got {other:?}"),
            }
        }
    }

    #[test]
    fn layer_split_guards_zero_endomorphism() {
        let n = NilMulticomplex::zero(diagonal_121());
        assert!(matches!(layer_split(&n, Strategy::MaxIndex), Err(SplitError::Precondition(_))));
    }

    #[test]
    fn commutant_of_diagonal_line_contains_shift() {
        let c = diagonal_121();
        let sample = commutant_nilpotent_sample(&c, 1, 40);
        assert!(sample[0].is_zero_endomorphism());
        assert!(sample.len() > 1);
        for n in &sample {
            assert!(validate_nil(n).unwrap().report.passed());
            // ν₂ = ν₀ = 0 and ν₁ = [[0, β], [0, 0]]
            assert!(n.nil()[0].is_zero() && n.nil()[2].is_zero());
            let nu1 = &n.nil()[1];
            assert!(nu1[(0, 0)].is_zero() && nu1[(1, 0)].is_zero() && nu1[(1, 1)].is_zero());
        }
    }

    #[test]
    fn commutant_of_twisted_line_is_trivial() {
        let sample = commutant_nilpotent_sample(&twisted_121(), 5, 50);
        assert_eq!(sample.len(), 1);
        assert!(sample[0].is_zero_endomorphism());
        let (constraints, _) = commutation_constraints(&twisted_121());
        // commutant = scalars
        assert_eq!(kernel_saturated(&z(), &constraints).rank(), 1);
    }

    #[test]
    fn zero_trials_give_only_zero() {
        let sample = commutant_nilpotent_sample(&diagonal_121(), 5, 0);
        assert_eq!(sample.len(), 1);
    }
}
