//! Bounded binary multicomplexes of free modules supported on `[0,2]ⁿ`.
//!
//! A position is a [`MultiIndex`] with every coordinate in `{0, 1, 2}`.
//! Positions are enumerated in base-3 order with coordinate 0 least
//! significant; per-position data is stored densely in that order.
//! In direction `i` each of the two differentials `dⁱ` and `d̃ⁱ` maps the
//! module at `x` to the module at `x - eᵢ`. At a position with `xᵢ = 0` the
//! target is outside the support, so the stored matrix is `0 × rank(x)`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{invariant_factors, kernel_saturated, membership_matrix, snf, is_invertible_over, Lattice};
use crate::matrix::Matrix;
use crate::ring::{Ring, Scalar};
use crate::sample::random_invertible;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(coords: Vec<u8>) -> Result<Self, ShapeError> {
        if coords.iter().any(|&c| c > 2) {
            return Err(ShapeError::OutOfSupport(coords));
        }
        Ok(MultiIndex(coords))
    }

    pub fn origin(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn from_index(dim: usize, mut index: usize) -> Self {
        let mut coords = Vec::with_capacity(dim);
        for _ in 0..dim {
            coords.push((index % 3) as u8);
            index /= 3;
        }
        MultiIndex(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u8] {
        &self.0
    }

    pub fn index(&self) -> usize {
        self.0.iter().rev().fold(0, |acc, &c| acc * 3 + c as usize)
    }

    /// `self - e_dir`, if still inside the support.
    pub fn lowered(&self, dir: usize) -> Option<Self> {
        let mut c = self.0.clone();
        c[dir] = c[dir].checked_sub(1)?;
        Some(MultiIndex(c))
    }

    pub fn with(&self, dir: usize, value: u8) -> Self {
        let mut c = self.0.clone();
        c[dir] = value;
        MultiIndex(c)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn position_count(dim: usize) -> usize {
    3usize.pow(dim as u32)
}

pub fn positions(dim: usize) -> impl Iterator<Item = MultiIndex> {
    (0..position_count(dim)).map(move |i| MultiIndex::from_index(dim, i))
}

/// Which member of a differential pair.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Choice {
    D,
    DTilde,
}

pub const CHOICES: [Choice; 2] = [Choice::D, Choice::DTilde];

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Choice::D => write!(f, "d"),
            Choice::DTilde => write!(f, "d~"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShapeError {
    #[error("coordinates {0:?} leave the support [0,2]")]
    OutOfSupport(Vec<u8>),
    #[error("expected {expected} positions, found {found}")]
    PositionCount { expected: usize, found: usize },
    #[error("expected {expected} differential pairs, found {found}")]
    PairCount { expected: usize, found: usize },
    #[error("direction {direction} {choice} at {position}: expected {expected:?}, found {found:?}")]
    MatrixShape {
        direction: usize,
        choice: Choice,
        position: MultiIndex,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("endomorphism at {position}: expected {expected:?}, found {found:?}")]
    EndomorphismShape {
        position: MultiIndex,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("entry outside {ring} in {location}")]
    NotInRing { ring: Ring, location: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("input is not acyclic: {0}")]
    NotAcyclic(ValidationReport),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedModule {
    dim: usize,
    ranks: Vec<usize>,
}

impl GradedModule {
    pub fn new(dim: usize, ranks: Vec<usize>) -> Result<Self, ShapeError> {
        if ranks.len() != position_count(dim) {
            return Err(ShapeError::PositionCount {
                expected: position_count(dim),
                found: ranks.len(),
            });
        }
        Ok(GradedModule { dim, ranks })
    }

    /// Positions not listed get rank 0.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (MultiIndex, usize)>) -> Self {
        let mut ranks = vec![0; position_count(dim)];
        for (pos, r) in entries {
            ranks[pos.index()] = r;
        }
        GradedModule { dim, ranks }
    }

    pub fn zero(dim: usize) -> Self {
        GradedModule {
            dim,
            ranks: vec![0; position_count(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self, pos: &MultiIndex) -> usize {
        self.ranks[pos.index()]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Shape of a direction-`dir` differential leaving `pos` (zero rows on the boundary).
    pub fn differential_shape(&self, dir: usize, pos: &MultiIndex) -> (usize, usize) {
        expected_shape(self, dir, pos)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DifferentialPair {
    pub d: Vec<Matrix>,
    pub d_tilde: Vec<Matrix>,
}

impl DifferentialPair {
    pub fn get(&self, choice: Choice) -> &[Matrix] {
        match choice {
            Choice::D => &self.d,
            Choice::DTilde => &self.d_tilde,
        }
    }

    pub fn get_mut(&mut self, choice: Choice) -> &mut Vec<Matrix> {
        match choice {
            Choice::D => &mut self.d,
            Choice::DTilde => &mut self.d_tilde,
        }
    }

    pub fn diagonal(d: Vec<Matrix>) -> Self {
        DifferentialPair {
            d_tilde: d.clone(),
            d,
        }
    }
}

fn expected_shape(graded: &GradedModule, dir: usize, pos: &MultiIndex) -> (usize, usize) {
    let target = pos.lowered(dir).map_or(0, |t| graded.rank(&t));
    (target, graded.rank(pos))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BinaryMulticomplex {
    ring: Ring,
    graded: GradedModule,
    pairs: Vec<DifferentialPair>,
}

impl BinaryMulticomplex {
    pub fn new(ring: Ring, graded: GradedModule, pairs: Vec<DifferentialPair>) -> Result<Self, ShapeError> {
        let c = BinaryMulticomplex { ring, graded, pairs };
        c.check_shape()?;
        Ok(c)
    }

    /// The zero complex of dimension `dim`.
    pub fn zero(ring: Ring, dim: usize) -> Self {
        let graded = GradedModule::zero(dim);
        let pairs = (0..dim)
            .map(|dir| DifferentialPair::diagonal(zero_differential(&graded, dir)))
            .collect();
        BinaryMulticomplex { ring, graded, pairs }
    }

    /// A single free module of rank `rank`, as a complex of dimension 0.
    pub fn module(ring: Ring, rank: usize) -> Self {
        BinaryMulticomplex {
            ring,
            graded: GradedModule {
                dim: 0,
                ranks: vec![rank],
            },
            pairs: Vec::new(),
        }
    }

    /// One-directional binary complex `N₂ ⇉ N₁ ⇉ N₀` from its four maps.
    pub fn line(ring: Ring, d2: Matrix, d1: Matrix, d2_tilde: Matrix, d1_tilde: Matrix) -> Result<Self, ShapeError> {
        let ranks = vec![d1.rows(), d1.cols(), d2.cols()];
        let graded = GradedModule::new(1, ranks)?;
        let d = vec![Matrix::zeros(0, d1.rows()), d1, d2];
        let d_tilde = vec![Matrix::zeros(0, d1_tilde.rows()), d1_tilde, d2_tilde];
        BinaryMulticomplex::new(ring, graded, vec![DifferentialPair { d, d_tilde }])
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.graded.dim
    }

    pub fn graded(&self) -> &GradedModule {
        &self.graded
    }

    pub fn rank(&self, pos: &MultiIndex) -> usize {
        self.graded.rank(pos)
    }

    pub fn pairs(&self) -> &[DifferentialPair] {
        &self.pairs
    }

    pub fn differential(&self, dir: usize, choice: Choice, pos: &MultiIndex) -> &Matrix {
        &self.pairs[dir].get(choice)[pos.index()]
    }

    /// Mutable access for corpus manipulation; callers must keep the shape.
    pub fn differential_mut(&mut self, dir: usize, choice: Choice, pos: &MultiIndex) -> &mut Matrix {
        &mut self.pairs[dir].get_mut(choice)[pos.index()]
    }

    pub fn check_shape(&self) -> Result<(), ShapeError> {
        let dim = self.graded.dim;
        if self.graded.ranks.len() != position_count(dim) {
            return Err(ShapeError::PositionCount {
                expected: position_count(dim),
                found: self.graded.ranks.len(),
            });
        }
        if self.pairs.len() != dim {
            return Err(ShapeError::PairCount {
                expected: dim,
                found: self.pairs.len(),
            });
        }
        for (dir, pair) in self.pairs.iter().enumerate() {
            for choice in CHOICES {
                let maps = pair.get(choice);
                if maps.len() != position_count(dim) {
                    return Err(ShapeError::PositionCount {
                        expected: position_count(dim),
                        found: maps.len(),
                    });
                }
                for pos in positions(dim) {
                    let m = &maps[pos.index()];
                    let expected = expected_shape(&self.graded, dir, &pos);
                    if m.shape() != expected {
                        return Err(ShapeError::MatrixShape {
                            direction: dir,
                            choice,
                            position: pos,
                            expected,
                            found: m.shape(),
                        });
                    }
                    if !m.in_ring(&self.ring) {
                        return Err(ShapeError::NotInRing {
                            ring: self.ring,
                            location: format!("direction {dir} {choice} at {pos}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Change of basis: `d'(x) = g(x - eᵢ) · d(x) · g(x)⁻¹` for every differential.
    pub fn conjugate(&self, g: &[Matrix], g_inv: &[Matrix]) -> Self {
        let mut out = self.clone();
        for (dir, pair) in out.pairs.iter_mut().enumerate() {
            for choice in CHOICES {
                for pos in positions(self.dim()) {
                    let Some(target) = pos.lowered(dir) else { continue };
                    let m = &pair.get(choice)[pos.index()];
                    let conj = &(&g[target.index()] * m) * &g_inv[pos.index()];
                    pair.get_mut(choice)[pos.index()] = conj;
                }
            }
        }
        out
    }

    /// Tensor product: dimensions add, directions of `self` come first.
    pub fn tensor(&self, other: &BinaryMulticomplex) -> Result<Self, ComplexError> {
        if self.ring != other.ring {
            return Err(ComplexError::RingMismatch(self.ring, other.ring));
        }
        let (n, m) = (self.dim(), other.dim());
        let dim = n + m;
        let split = |pos: &MultiIndex| {
            (
                MultiIndex(pos.0[..n].to_vec()),
                MultiIndex(pos.0[n..].to_vec()),
            )
        };
        let ranks: Vec<usize> = positions(dim)
            .map(|p| {
                let (y, t) = split(&p);
                self.rank(&y) * other.rank(&t)
            })
            .collect();
        let graded = GradedModule { dim, ranks };
        let mut pairs = Vec::with_capacity(dim);
        for dir in 0..dim {
            let build = |choice: Choice| -> Vec<Matrix> {
                positions(dim)
                    .map(|p| {
                        let (y, t) = split(&p);
                        if dir < n {
                            self.differential(dir, choice, &y)
                                .kron(&Matrix::identity(other.rank(&t)))
                        } else {
                            Matrix::identity(self.rank(&y))
                                .kron(other.differential(dir - n, choice, &t))
                        }
                    })
                    .collect()
            };
            pairs.push(DifferentialPair {
                d: build(Choice::D),
                d_tilde: build(Choice::DTilde),
            });
        }
        Ok(BinaryMulticomplex {
            ring: self.ring,
            graded,
            pairs,
        })
    }

    /// Positions `x` with `x_dir = 0`; each indexes the line `x+2e ⇉ x+e ⇉ x`.
    pub fn line_bases(&self, dir: usize) -> impl Iterator<Item = MultiIndex> + '_ {
        positions(self.dim()).filter(move |p| p.0[dir] == 0)
    }
}

fn zero_differential(graded: &GradedModule, dir: usize) -> Vec<Matrix> {
    positions(graded.dim)
        .map(|p| {
            let (r, c) = expected_shape(graded, dir, &p);
            Matrix::zeros(r, c)
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FailureKind {
    /// The left map of a line is not injective (reported at degree 2).
    NotInjective,
    /// `d∘d ≠ 0` along the line (reported at degree 1).
    CompositeNonzero,
    /// The image of the left map is not the saturated kernel of the right map.
    ImageNotKernel,
    /// The right map is not surjective over the ring (reported at degree 0).
    NotSurjective { invariant_factors: Vec<String> },
    /// Mixed-direction square `aⁱ∘bʲ = bʲ∘aⁱ` fails.
    CrossCommutation { other_direction: usize, other_choice: Choice },
    /// `ν∘d ≠ d∘ν`.
    NilCommutation,
    /// `ν^rank ≠ 0`.
    NotNilpotent,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureKind::NotInjective => write!(f, "not exact at degree 2: left map not injective"),
            FailureKind::CompositeNonzero => write!(f, "not exact at degree 1: composite d∘d is nonzero"),
            FailureKind::ImageNotKernel => {
                write!(f, "not exact at degree 1: image differs from saturated kernel")
            }
            FailureKind::NotSurjective { invariant_factors } => write!(
                f,
                "not exact at degree 0: right map not surjective (invariant factors [{}])",
                invariant_factors.join(", ")
            ),
            FailureKind::CrossCommutation {
                other_direction,
                other_choice,
            } => write!(
                f,
                "does not commute with direction {other_direction} {other_choice}"
            ),
            FailureKind::NilCommutation => write!(f, "nilpotent endomorphism does not commute"),
            FailureKind::NotNilpotent => write!(f, "nilpotency: endomorphism is not nilpotent"),
        }
    }
}

/// One violated condition. `direction`/`choice` are absent for conditions
/// that do not involve a differential.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Failure {
    pub position: MultiIndex,
    pub direction: Option<usize>,
    pub choice: Option<Choice>,
    pub kind: FailureKind,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}", self.position)?;
        if let Some(dir) = self.direction {
            write!(f, ", direction {dir}")?;
        }
        if let Some(ch) = self.choice {
            write!(f, ", differential {ch}")?;
        }
        write!(f, ": {}", self.kind)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub failures: Vec<Failure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "pass");
        }
        write!(f, "fail ({} violations)", self.failures.len())?;
        for fail in &self.failures {
            write!(f, "\n  {fail}")?;
        }
        Ok(())
    }
}

/// Evidence that `0 → N₂ → N₁ → N₀ → 0` is exact over the ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LineWitness {
    /// `Z₁ = ker(right)`, saturated.
    pub kernel: Lattice,
    /// Coordinates of the columns of `left` in the kernel basis; invertible over the ring.
    pub image_coordinates: Matrix,
    /// `right · right_inverse = identity`.
    pub right_inverse: Matrix,
}

impl LineWitness {
    /// Replays the witness against the line's maps.
    pub fn replay(&self, ring: &Ring, left: &Matrix, right: &Matrix) -> bool {
        let basis = self.kernel.basis();
        basis.rows() == right.cols()
            && (right * basis).is_zero()
            && invariant_factors(ring, basis).iter().filter(|f| ring.is_unit(f)).count() == basis.cols()
            && self.image_coordinates.rows() == basis.cols()
            && self.image_coordinates.cols() == left.cols()
            && &(basis * &self.image_coordinates) == left
            && is_invertible_over(ring, &self.image_coordinates)
            && self.right_inverse.in_ring(ring)
            && self.right_inverse.shape() == (right.cols(), right.rows())
            && (right * &self.right_inverse) == Matrix::identity(right.rows())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LineRecord {
    pub direction: usize,
    pub choice: Choice,
    pub base: MultiIndex,
    pub witness: LineWitness,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AcyclicityWitness {
    pub lines: Vec<LineRecord>,
}

/// Degree (2, 1 or 0) at which a line defect is located, paired with the kind.
pub type LineDefect = (u8, FailureKind);

/// Exactness check of a three-term line with `left: N₂ → N₁`, `right: N₁ → N₀`.
pub fn check_line(ring: &Ring, left: &Matrix, right: &Matrix) -> Result<LineWitness, Vec<LineDefect>> {
    assert_eq!(left.rows(), right.cols(), "line maps do not compose");
    let mut defects = Vec::new();
    if left.rank() != left.cols() {
        defects.push((2, FailureKind::NotInjective));
    }
    let kernel = kernel_saturated(ring, right);
    let composite_zero = (right * left).is_zero();
    if !composite_zero {
        defects.push((1, FailureKind::CompositeNonzero));
    }
    let image_coordinates = if composite_zero {
        membership_matrix(ring, left, &kernel).filter(|c| is_invertible_over(ring, c))
    } else {
        None
    };
    if composite_zero && image_coordinates.is_none() {
        defects.push((1, FailureKind::ImageNotKernel));
    }
    let factors = invariant_factors(ring, right);
    let surjective = factors.len() == right.rows() && factors.iter().all(|f| ring.is_unit(f));
    if !surjective {
        defects.push((
            0,
            FailureKind::NotSurjective {
                invariant_factors: factors.iter().map(ToString::to_string).collect(),
            },
        ));
    }
    if !defects.is_empty() {
        return Err(defects);
    }
    let s = snf(ring, right);
    let (r0, r1) = right.shape();
    let mut embed = Matrix::zeros(r1, r0);
    for i in 0..r0 {
        embed[(i, i)] = Scalar::one();
    }
    let right_inverse = &(&s.v * &embed) * &s.u;
    debug_assert_eq!(&(right * &right_inverse), &Matrix::identity(r0));
    Ok(LineWitness {
        kernel,
        image_coordinates: image_coordinates.expect("checked above"),
        right_inverse,
    })
}

/// Outcome of [`validate_multicomplex`]; the witness is present iff the report passes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Validation {
    pub report: ValidationReport,
    pub witness: Option<AcyclicityWitness>,
}

/// The line in direction `dir` through `base` (which has `base[dir] = 0`).
pub fn line_maps<'a>(c: &'a BinaryMulticomplex, dir: usize, choice: Choice, base: &MultiIndex) -> (&'a Matrix, &'a Matrix) {
    let left = c.differential(dir, choice, &base.with(dir, 2));
    let right = c.differential(dir, choice, &base.with(dir, 1));
    (left, right)
}

pub fn validate_multicomplex(c: &BinaryMulticomplex) -> Result<Validation, ShapeError> {
    c.check_shape()?;
    let ring = c.ring();
    let dim = c.dim();

    let mut lines = Vec::new();
    for dir in 0..dim {
        for choice in CHOICES {
            for base in c.line_bases(dir) {
                lines.push((dir, choice, base));
            }
        }
    }
    let outcomes: Vec<_> = lines
        .par_iter()
        .map(|(dir, choice, base)| {
            let (left, right) = line_maps(c, *dir, *choice, base);
            check_line(&ring, left, right)
        })
        .collect();

    let mut failures = Vec::new();
    let mut records = Vec::new();
    for ((dir, choice, base), outcome) in lines.into_iter().zip(outcomes) {
        match outcome {
            Ok(witness) => records.push(LineRecord {
                direction: dir,
                choice,
                base,
                witness,
            }),
            Err(defects) => failures.extend(defects.into_iter().map(|(degree, kind)| Failure {
                position: base.with(dir, degree),
                direction: Some(dir),
                choice: Some(choice),
                kind,
            })),
        }
    }

    for i in 0..dim {
        for j in i + 1..dim {
            for ci in CHOICES {
                for cj in CHOICES {
                    for pos in positions(dim) {
                        let (Some(xi), Some(xj)) = (pos.lowered(i), pos.lowered(j)) else {
                            continue;
                        };
                        let lhs = c.differential(i, ci, &xj) * c.differential(j, cj, &pos);
                        let rhs = c.differential(j, cj, &xi) * c.differential(i, ci, &pos);
                        if lhs != rhs {
                            failures.push(Failure {
                                position: pos,
                                direction: Some(i),
                                choice: Some(ci),
                                kind: FailureKind::CrossCommutation {
                                    other_direction: j,
                                    other_choice: cj,
                                },
                            });
                        }
                    }
                }
            }
        }
    }

    let witness = failures.is_empty().then_some(AcyclicityWitness { lines: records });
    Ok(Validation {
        report: ValidationReport { failures },
        witness,
    })
}

/// Directions whose two differentials agree entrywise at every position.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiagonalFlag {
    pub directions: BTreeSet<usize>,
}

impl DiagonalFlag {
    pub fn contains(&self, dir: usize) -> bool {
        self.directions.contains(&dir)
    }
}

pub fn diagonal_directions(c: &BinaryMulticomplex) -> DiagonalFlag {
    DiagonalFlag {
        directions: (0..c.dim())
            .filter(|&dir| c.pairs[dir].d == c.pairs[dir].d_tilde)
            .collect(),
    }
}

/// A multicomplex with a single differential in `direction` and a differential
/// pair in every other direction: the input of the diagonal functor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SingleComplex {
    direction: usize,
    /// Binary multicomplex whose pair in `direction` is `(d, d)`.
    doubled: BinaryMulticomplex,
}

impl SingleComplex {
    /// One-directional chain complex `N₂ → N₁ → N₀`.
    pub fn line(ring: Ring, d2: Matrix, d1: Matrix) -> Result<Self, ShapeError> {
        Ok(SingleComplex {
            direction: 0,
            doubled: BinaryMulticomplex::line(ring, d2.clone(), d1.clone(), d2, d1)?,
        })
    }

    /// The single differential is `d` (or `d̃`, per `choice`) of `c` in `direction`;
    /// the other pair of that direction is dropped.
    pub fn from_binary(c: &BinaryMulticomplex, direction: usize, choice: Choice) -> Self {
        let mut doubled = c.clone();
        let single = c.pairs[direction].get(choice).to_vec();
        doubled.pairs[direction] = DifferentialPair::diagonal(single);
        SingleComplex { direction, doubled }
    }

    /// `base ⊗ line`, with the line's differential as the new last direction.
    pub fn product(base: &BinaryMulticomplex, line: &SingleComplex) -> Result<Self, ComplexError> {
        if line.dim() != 1 {
            return Err(ComplexError::DimensionMismatch(line.dim(), 1));
        }
        Ok(SingleComplex {
            direction: base.dim(),
            doubled: base.tensor(&line.doubled)?,
        })
    }

    pub fn zero(ring: Ring, dim: usize, direction: usize) -> Self {
        SingleComplex {
            direction,
            doubled: BinaryMulticomplex::zero(ring, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.doubled.dim()
    }

    pub fn direction(&self) -> usize {
        self.direction
    }
}

/// Diagonal functor: doubles the single differential into the pair `(d, d)`.
pub fn delta_embed(c: &SingleComplex) -> Result<BinaryMulticomplex, ComplexError> {
    let out = c.doubled.clone();
    let v = validate_multicomplex(&out)?;
    if !v.report.passed() {
        return Err(ComplexError::NotAcyclic(v.report));
    }
    Ok(out)
}

pub fn direct_sum(a: &BinaryMulticomplex, b: &BinaryMulticomplex) -> Result<BinaryMulticomplex, ComplexError> {
    if a.dim() != b.dim() {
        return Err(ComplexError::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.ring != b.ring {
        return Err(ComplexError::RingMismatch(a.ring, b.ring));
    }
    let dim = a.dim();
    let ranks = a
        .graded
        .ranks
        .iter()
        .zip(&b.graded.ranks)
        .map(|(x, y)| x + y)
        .collect();
    let pairs = a
        .pairs
        .iter()
        .zip(&b.pairs)
        .map(|(pa, pb)| {
            let sum = |choice: Choice| {
                pa.get(choice)
                    .iter()
                    .zip(pb.get(choice))
                    .map(|(x, y)| Matrix::block_diagonal(x, y))
                    .collect()
            };
            DifferentialPair {
                d: sum(Choice::D),
                d_tilde: sum(Choice::DTilde),
            }
        })
        .collect();
    Ok(BinaryMulticomplex {
        ring: a.ring,
        graded: GradedModule { dim, ranks },
        pairs,
    })
}

/// Elementary binary line `ℤᵃ ⇉ ℤᵃ⁺ᶜ ⇉ ℤᶜ`: `d` is the standard split
/// inclusion/projection, `d̃` is `d` twisted by an automorphism of the middle
/// term (or equal to `d` when `diagonal`).
pub fn elementary_binary_line<R: Rng + ?Sized>(
    rng: &mut R,
    ring: Ring,
    a: usize,
    c: usize,
    entry_bound: i64,
    diagonal: bool,
) -> BinaryMulticomplex {
    let mid = a + c;
    let d2 = Matrix::from_fn(mid, a, |i, j| if i == j { Scalar::one() } else { Scalar::zero() });
    let d1 = Matrix::from_fn(c, mid, |i, j| if j == a + i { Scalar::one() } else { Scalar::zero() });
    let (d2t, d1t) = if diagonal {
        (d2.clone(), d1.clone())
    } else {
        let (h, h_inv) = random_invertible(rng, &ring, mid, entry_bound);
        (&h * &d2, &d1 * &h_inv)
    };
    BinaryMulticomplex::line(ring, d2, d1, d2t, d1t).expect("shapes agree by construction")
}

/// Seeded acyclic binary multicomplex: a direct sum of tensor products of
/// elementary binary lines (one per direction, each tensored with a small
/// multiplicity module), conjugated by random invertible matrices at every position.
///
/// `rank_bound` bounds the middle rank of each elementary line (and the rank
/// of the module when `dim = 0`); `entry_bound` bounds the entries of the
/// random change-of-basis matrices.
pub fn random_acyclic_binary(ring: Ring, seed: u64, dim: usize, rank_bound: usize, entry_bound: i64) -> BinaryMulticomplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank_bound = rank_bound.max(1);
    let summands = if dim <= 1 { rng.gen_range(1..=2) } else { 1 };
    let mut total: Option<BinaryMulticomplex> = None;
    for _ in 0..summands {
        let multiplicity = rng.gen_range(1..=2);
        let mut piece = BinaryMulticomplex::module(ring, if dim == 0 {
            rng.gen_range(1..=rank_bound)
        } else {
            multiplicity
        });
        for _ in 0..dim {
            let mid = rng.gen_range(1..=rank_bound);
            let a = rng.gen_range(0..=mid);
            let diagonal = rng.gen_bool(1.0 / 3.0);
            let line = elementary_binary_line(&mut rng, ring, a, mid - a, entry_bound, diagonal);
            piece = line.tensor(&piece).expect("same ring");
        }
        total = Some(match total {
            None => piece,
            Some(t) => direct_sum(&t, &piece).expect("same dimension"),
        });
    }
    let total = total.expect("at least one summand");
    let (g, g_inv): (Vec<Matrix>, Vec<Matrix>) = positions(dim)
        .map(|p| random_invertible(&mut rng, &ring, total.rank(&p), entry_bound))
        .unzip();
    total.conjugate(&g, &g_inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Ring {
        Ring::Integers
    }

    pub(crate) fn diagonal_121() -> BinaryMulticomplex {
        let d2 = Matrix::from_i64(&[&[1], &[0]]);
        let d1 = Matrix::from_i64(&[&[0, 1]]);
        BinaryMulticomplex::line(z(), d2.clone(), d1.clone(), d2, d1).unwrap()
    }

    #[test]
    fn multi_index_roundtrip() {
        for dim in 0..4 {
            for (i, p) in positions(dim).enumerate() {
                assert_eq!(p.index(), i);
            }
        }
        assert!(MultiIndex::new(vec![0, 3]).is_err());
    }

    #[test]
    fn validates_121_line() {
        let v = validate_multicomplex(&diagonal_121()).unwrap();
        assert!(v.report.passed(), "{}", v.report);
        let w = v.witness.unwrap();
        assert_eq!(w.lines.len(), 2);
        let c = diagonal_121();
        for rec in &w.lines {
            let (l, r) = line_maps(&c, rec.direction, rec.choice, &rec.base);
            assert!(rec.witness.replay(&z(), l, r));
        }
    }

    #[test]
    fn rejects_non_surjective_line() {
        let d2 = Matrix::zeros(1, 0);
        let d1 = Matrix::from_i64(&[&[2]]);
        let c = BinaryMulticomplex::line(z(), d2.clone(), d1.clone(), d2, d1).unwrap();
        let v = validate_multicomplex(&c).unwrap();
        assert!(!v.report.passed());
        assert!(v.witness.is_none());
        let f = &v.report.failures[0];
        assert_eq!(f.position.coords(), &[0]);
        assert!(matches!(f.kind, FailureKind::NotSurjective { .. }));
        // over Z_(3), 2 is a unit
        let d1 = Matrix::from_i64(&[&[2]]);
        let c3 = BinaryMulticomplex::line(Ring::Localized(3), Matrix::zeros(1, 0), d1.clone(), Matrix::zeros(1, 0), d1).unwrap();
        assert!(validate_multicomplex(&c3).unwrap().report.passed());
    }

    #[test]
    fn dimension_zero_passes_vacuously() {
        let v = validate_multicomplex(&BinaryMulticomplex::module(z(), 3)).unwrap();
        assert!(v.report.passed());
        assert!(v.witness.unwrap().lines.is_empty());
    }

    #[test]
    fn shape_errors_are_reported() {
        let bad = BinaryMulticomplex::line(
            z(),
            Matrix::from_i64(&[&[1], &[0]]),
            Matrix::from_i64(&[&[0, 1]]),
            Matrix::from_i64(&[&[1]]),
            Matrix::from_i64(&[&[0, 1]]),
        );
        assert!(matches!(bad, Err(ShapeError::MatrixShape { .. })));
    }

    #[test]
    fn diagonal_detection() {
        let c = diagonal_121();
        assert!(diagonal_directions(&c).contains(0));
        let twisted = BinaryMulticomplex::line(
            z(),
            Matrix::from_i64(&[&[1], &[0]]),
            Matrix::from_i64(&[&[0, 1]]),
            Matrix::from_i64(&[&[0], &[1]]),
            Matrix::from_i64(&[&[1, 0]]),
        )
        .unwrap();
        assert!(validate_multicomplex(&twisted).unwrap().report.passed());
        assert!(diagonal_directions(&twisted).directions.is_empty());
    }

    #[test]
    fn delta_embed_examples() {
        let id = SingleComplex::line(z(), Matrix::identity(1), Matrix::zeros(0, 1)).unwrap();
        let b = delta_embed(&id).unwrap();
        assert!(diagonal_directions(&b).contains(0));

        let single = SingleComplex::line(z(), Matrix::from_i64(&[&[1], &[0]]), Matrix::from_i64(&[&[0, 1]])).unwrap();
        assert_eq!(delta_embed(&single).unwrap(), diagonal_121());

        let zero = delta_embed(&SingleComplex::zero(z(), 2, 1)).unwrap();
        assert_eq!(zero.graded().total_rank(), 0);

        let not_acyclic = SingleComplex::line(z(), Matrix::zeros(1, 0), Matrix::from_i64(&[&[2]])).unwrap();
        assert!(matches!(delta_embed(&not_acyclic), Err(ComplexError::NotAcyclic(_))));
    }

    #[test]
    fn delta_in_second_direction_of_twisted_line() {
        let twisted = BinaryMulticomplex::line(
            z(),
            Matrix::from_i64(&[&[1], &[0]]),
            Matrix::from_i64(&[&[0, 1]]),
            Matrix::from_i64(&[&[0], &[1]]),
            Matrix::from_i64(&[&[1, 0]]),
        )
        .unwrap();
        let line = SingleComplex::line(z(), Matrix::identity(1), Matrix::zeros(0, 1)).unwrap();
        let c = delta_embed(&SingleComplex::product(&twisted, &line).unwrap()).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(diagonal_directions(&c).directions, BTreeSet::from([1]));
    }

    #[test]
    fn direct_sum_examples() {
        let c = diagonal_121();
        assert_eq!(direct_sum(&c, &BinaryMulticomplex::zero(z(), 1)).unwrap(), c);
        let cc = direct_sum(&c, &c).unwrap();
        assert_eq!(cc.graded().ranks(), &[2, 4, 2]);
        assert!(validate_multicomplex(&cc).unwrap().report.passed());

        let bad = BinaryMulticomplex::line(z(), Matrix::zeros(1, 0), Matrix::from_i64(&[&[2]]), Matrix::zeros(1, 0), Matrix::from_i64(&[&[2]])).unwrap();
        assert!(!validate_multicomplex(&direct_sum(&c, &bad).unwrap()).unwrap().report.passed());
        assert!(matches!(
            direct_sum(&c, &BinaryMulticomplex::zero(z(), 2)),
            Err(ComplexError::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn random_complexes_validate_and_are_deterministic() {
        for dim in 0..=2 {
            for seed in 0..6 {
                for ring in [z(), Ring::Localized(2)] {
                    let c = random_acyclic_binary(ring, seed, dim, 2, 2);
                    let v = validate_multicomplex(&c).unwrap();
                    assert!(v.report.passed(), "seed {seed} dim {dim}: {}", v.report);
                    assert_eq!(c, random_acyclic_binary(ring, seed, dim, 2, 2));
                }
            }
        }
    }
}
