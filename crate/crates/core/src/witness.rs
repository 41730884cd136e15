//! Certificates that `[F, ν] − [F, 0]` vanishes in the Grothendieck group.
//!
//! A certificate registers Nil objects by id and lists relation steps. Each
//! step contributes a formal sum that is zero in K₀:
//! - short exact `0 → A → B → C → 0` contributes `[B] − [A] − [C]`;
//! - a diagonal object `T` contributes `[T]`;
//! - an isomorphism `L ≅ R` contributes `[L] − [R]`.
//!
//! The claim is accepted when it is an integer combination of the step
//! contributions and every step replays exactly. The verifier only uses
//! exact linear algebra, complex validation and [`validate_nil`]; it never
//! touches the splitting code used to build certificates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::complexes::{positions, CHOICES};
use crate::linalg::{hnf, invariant_factors, is_invertible_over, kernel_saturated, membership_matrix};
use crate::matrix::Matrix;
use crate::nilcat::{layer_split, nil_index, validate_nil, NilMulticomplex, SplitError, SplitFailure, Strategy};
use crate::ring::{Ring, Scalar};
use crate::complexes::ValidationReport;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ObjectId(pub u32);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ObjectRegistry {
    entries: BTreeMap<ObjectId, NilMulticomplex>,
}

impl ObjectRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `obj` under the next free id.
    pub fn register(&mut self, obj: NilMulticomplex) -> ObjectId {
        let id = ObjectId(self.entries.keys().next_back().map_or(0, |k| k.0 + 1));
        self.entries.insert(id, obj);
        id
    }

    /// Returns the previous object, if any, stored under `id`.
    pub fn insert(&mut self, id: ObjectId, obj: NilMulticomplex) -> Option<NilMulticomplex> {
        self.entries.insert(id, obj)
    }

    pub fn get(&self, id: ObjectId) -> Option<&NilMulticomplex> {
        self.entries.get(&id)
    }

    pub fn get_mut(&mut self, id: ObjectId) -> Option<&mut NilMulticomplex> {
        self.entries.get_mut(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ObjectId, &NilMulticomplex)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Element of the free abelian group on object ids. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FormalSum {
    terms: BTreeMap<ObjectId, BigInt>,
}

impl FormalSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(id: ObjectId, coefficient: i64) -> Self {
        let mut s = Self::zero();
        s.add_term(id, &BigInt::from(coefficient));
        s
    }

    pub fn add_term(&mut self, id: ObjectId, coefficient: &BigInt) {
        let slot = self.terms.entry(id).or_default();
        *slot += coefficient;
        if slot.is_zero() {
            self.terms.remove(&id);
        }
    }

    pub fn add_scaled(&mut self, other: &FormalSum, factor: &BigInt) {
        for (id, c) in &other.terms {
            self.add_term(*id, &(c * factor));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, id: ObjectId) -> BigInt {
        self.terms.get(&id).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (ObjectId, &BigInt)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.terms.keys().copied()
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (id, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if k > 0 { "+" } else { "" };
            let sep = if k > 0 { " " } else { "" };
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "{sep}{sign}[{id}]")?;
            } else {
                write!(f, "{sep}{sign}{mag}[{id}]")?;
            }
        }
        Ok(())
    }
}

/// Per-position data of `0 → sub → total → quotient → 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShortExactStep {
    pub sub: ObjectId,
    pub total: ObjectId,
    pub quotient: ObjectId,
    pub inclusions: Vec<Matrix>,
    pub projections: Vec<Matrix>,
    pub retractions: Vec<Matrix>,
    pub sections: Vec<Matrix>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RelationStep {
    ShortExact(ShortExactStep),
    Diagonal { object: ObjectId, direction: usize },
    Isomorphism { left: ObjectId, right: ObjectId, maps: Vec<Matrix> },
}

impl RelationStep {
    /// The formal sum this relation declares to be zero.
    pub fn contribution(&self) -> FormalSum {
        let mut s = FormalSum::zero();
        match self {
            RelationStep::ShortExact(step) => {
                s.add_term(step.total, &BigInt::one());
                s.add_term(step.sub, &-BigInt::one());
                s.add_term(step.quotient, &-BigInt::one());
            }
            RelationStep::Diagonal { object, .. } => s.add_term(*object, &BigInt::one()),
            RelationStep::Isomorphism { left, right, .. } => {
                s.add_term(*left, &BigInt::one());
                s.add_term(*right, &-BigInt::one());
            }
        }
        s
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RelationStep::ShortExact(_) => "shortExact",
            RelationStep::Diagonal { .. } => "diagonal",
            RelationStep::Isomorphism { .. } => "isomorphism",
        }
    }

    /// Every matrix carried by the step, in a fixed order.
    pub fn matrices_mut(&mut self) -> Vec<&mut Matrix> {
        match self {
            RelationStep::ShortExact(s) => s
                .inclusions
                .iter_mut()
                .chain(s.projections.iter_mut())
                .chain(s.retractions.iter_mut())
                .chain(s.sections.iter_mut())
                .collect(),
            RelationStep::Diagonal { .. } => Vec::new(),
            RelationStep::Isomorphism { maps, .. } => maps.iter_mut().collect(),
        }
    }
}

/// The pair `(F, ν)`, `(F, 0)` whose class difference the certificate kills.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TargetPair {
    pub nu: ObjectId,
    pub zero: ObjectId,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    pub ring: Ring,
    pub registry: ObjectRegistry,
    pub target: TargetPair,
    pub steps: Vec<RelationStep>,
    /// Asserted to equal an integer combination of the step contributions.
    pub claim: FormalSum,
}

impl Certificate {
    pub fn target_sum(&self) -> FormalSum {
        let mut s = FormalSum::term(self.target.nu, 1);
        s.add_term(self.target.zero, &-BigInt::one());
        s
    }
}

/// Where verification stopped.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CheckStage {
    Object(ObjectId),
    Target,
    Step(usize),
    Claim,
}

impl fmt::Display for CheckStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckStage::Object(id) => write!(f, "object {id}"),
            CheckStage::Target => write!(f, "target pair"),
            CheckStage::Step(i) => write!(f, "step {i}"),
            CheckStage::Claim => write!(f, "claim"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// `combination[j]` is the coefficient of step `j` in the derivation of the claim.
    Accept { combination: Vec<BigInt> },
    Reject { stage: CheckStage, reason: String },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept { combination } => {
                let c: Vec<String> = combination.iter().map(ToString::to_string).collect();
                write!(f, "accept (step coefficients [{}])", c.join(", "))
            }
            Verdict::Reject { stage, reason } => write!(f, "reject at {stage}: {reason}"),
        }
    }
}

/// Integer coefficients `c` with `Σ cⱼ·relationⱼ = target`, if they exist.
pub fn formal_membership(target: &FormalSum, relations: &[FormalSum]) -> Option<Vec<BigInt>> {
    let ids: Vec<ObjectId> = target
        .ids()
        .chain(relations.iter().flat_map(|r| r.ids()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let col = |id: ObjectId| ids.binary_search(&id).expect("collected above");
    let to_scalar = |c: &BigInt| Scalar::from_integer(c.clone());

    let mut rel = Matrix::zeros(relations.len(), ids.len());
    for (i, r) in relations.iter().enumerate() {
        for (id, c) in r.terms() {
            rel[(i, col(id))] = to_scalar(c);
        }
    }
    let mut t = vec![Scalar::zero(); ids.len()];
    for (id, c) in target.terms() {
        t[col(id)] = to_scalar(c);
    }

    // Solve y·H = t row by row along the pivots of H = U·rel, then c = y·U.
    let ring = Ring::Integers;
    let h = hnf(&ring, &rel);
    let mut y = vec![Scalar::zero(); relations.len()];
    for (i, &pc) in h.pivots.iter().enumerate() {
        let mut acc = t[pc].clone();
        for (j, yj) in y.iter().enumerate().take(i) {
            acc -= yj * &h.h[(j, pc)];
        }
        let yi = acc / &h.h[(i, pc)];
        if !yi.is_integer() {
            return None;
        }
        y[i] = yi;
    }
    let coeffs: Vec<BigInt> = (0..relations.len())
        .map(|j| {
            let v: Scalar = y.iter().enumerate().map(|(i, yi)| yi * &h.u[(i, j)]).sum();
            v.to_integer()
        })
        .collect();

    let mut check = FormalSum::zero();
    for (c, r) in coeffs.iter().zip(relations) {
        check.add_scaled(r, c);
    }
    (check == *target).then_some(coeffs)
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn object(cert: &Certificate, id: ObjectId) -> Result<&NilMulticomplex, String> {
    cert.registry.get(id).ok_or_else(|| format!("object {id} is not registered"))
}

fn check_maps_shape(
    name: &str,
    maps: &[Matrix],
    count: usize,
    shape: impl Fn(usize) -> (usize, usize),
    ring: &Ring,
) -> Check {
    ensure(maps.len() == count, || format!("{name}: expected {count} positions, found {}", maps.len()))?;
    for (x, m) in maps.iter().enumerate() {
        ensure(m.shape() == shape(x), || {
            format!("{name} at position index {x}: expected {:?}, found {:?}", shape(x), m.shape())
        })?;
        ensure(m.in_ring(ring), || format!("{name} at position index {x}: entry outside {ring}"))?;
    }
    Ok(())
}

/// `f: A → B` is a chain map of Nil objects: `f·d_A = d_B·f` for every differential, and `f·ν_A = ν_B·f`.
fn check_morphism(name: &str, a: &NilMulticomplex, b: &NilMulticomplex, maps: &[Matrix]) -> Check {
    let dim = a.base().dim();
    for dir in 0..dim {
        for choice in CHOICES {
            for pos in positions(dim) {
                let Some(t) = pos.lowered(dir) else { continue };
                let lhs = &maps[t.index()] * a.base().differential(dir, choice, &pos);
                let rhs = b.base().differential(dir, choice, &pos) * &maps[pos.index()];
                ensure(lhs == rhs, || {
                    format!("{name} does not commute with direction {dir} {choice} at {pos}")
                })?;
            }
        }
    }
    for pos in positions(dim) {
        let x = pos.index();
        ensure(&maps[x] * &a.nil()[x] == &b.nil()[x] * &maps[x], || {
            format!("{name} does not commute with ν at {pos}")
        })?;
    }
    Ok(())
}

fn same_shape(a: &NilMulticomplex, b: &NilMulticomplex) -> bool {
    a.base().ring() == b.base().ring() && a.base().dim() == b.base().dim()
}

fn check_short_exact(cert: &Certificate, s: &ShortExactStep) -> Check {
    let ring = cert.ring;
    let (a, b, c) = (object(cert, s.sub)?, object(cert, s.total)?, object(cert, s.quotient)?);
    ensure(same_shape(a, b) && same_shape(b, c), || "objects differ in ring or dimension".into())?;
    let dim = b.base().dim();
    let n = crate::complexes::position_count(dim);
    let rank = |o: &NilMulticomplex, x: usize| o.base().graded().ranks()[x];
    check_maps_shape("inclusion", &s.inclusions, n, |x| (rank(b, x), rank(a, x)), &ring)?;
    check_maps_shape("projection", &s.projections, n, |x| (rank(c, x), rank(b, x)), &ring)?;
    check_maps_shape("retraction", &s.retractions, n, |x| (rank(a, x), rank(b, x)), &ring)?;
    check_maps_shape("section", &s.sections, n, |x| (rank(b, x), rank(c, x)), &ring)?;

    for pos in positions(dim) {
        let x = pos.index();
        let (i, p) = (&s.inclusions[x], &s.projections[x]);
        ensure(i.rank() == i.cols(), || format!("inclusion at {pos} is not injective"))?;
        let fi = invariant_factors(&ring, i);
        ensure(fi.iter().all(|f| ring.is_unit(f)), || format!("image of inclusion at {pos} is not saturated"))?;
        let fp = invariant_factors(&ring, p);
        ensure(fp.len() == p.rows() && fp.iter().all(|f| ring.is_unit(f)), || {
            format!("projection at {pos} is not surjective")
        })?;
        ensure((p * i).is_zero(), || format!("projection∘inclusion ≠ 0 at {pos}"))?;
        let ker = kernel_saturated(&ring, p);
        let coords = membership_matrix(&ring, i, &ker);
        ensure(coords.is_some_and(|c| is_invertible_over(&ring, &c)), || {
            format!("ker(projection) ≠ im(inclusion) at {pos}")
        })?;
        ensure(&s.retractions[x] * i == Matrix::identity(i.cols()), || {
            format!("retraction∘inclusion ≠ id at {pos}")
        })?;
        ensure(p * &s.sections[x] == Matrix::identity(p.rows()), || {
            format!("projection∘section ≠ id at {pos}")
        })?;
    }
    check_morphism("inclusion", a, b, &s.inclusions)?;
    check_morphism("projection", b, c, &s.projections)
}

fn check_step(cert: &Certificate, step: &RelationStep) -> Check {
    match step {
        RelationStep::ShortExact(s) => check_short_exact(cert, s),
        RelationStep::Diagonal { object: id, direction } => {
            let o = object(cert, *id)?;
            ensure(*direction < o.base().dim(), || format!("direction {direction} out of range"))?;
            let pair = &o.base().pairs()[*direction];
            ensure(pair.d == pair.d_tilde, || format!("direction {direction} is not diagonal"))?;
            ensure(o.is_zero_endomorphism(), || "diagonal object carries a nonzero ν".into())
        }
        RelationStep::Isomorphism { left, right, maps } => {
            let (l, r) = (object(cert, *left)?, object(cert, *right)?);
            ensure(same_shape(l, r), || "objects differ in ring or dimension".into())?;
            ensure(l.base().graded() == r.base().graded(), || "objects have different ranks".into())?;
            let n = crate::complexes::position_count(l.base().dim());
            let ranks = l.base().graded().ranks();
            check_maps_shape("isomorphism", maps, n, |x| (ranks[x], ranks[x]), &cert.ring)?;
            for (x, m) in maps.iter().enumerate() {
                ensure(is_invertible_over(&cert.ring, m), || {
                    format!("map at position index {x} is not invertible over {}", cert.ring)
                })?;
            }
            check_morphism("isomorphism", l, r, maps)
        }
    }
}

fn check_target(cert: &Certificate) -> Check {
    let nu = object(cert, cert.target.nu)?;
    let zero = object(cert, cert.target.zero)?;
    ensure(nu.base() == zero.base(), || "target objects have different base complexes".into())?;
    ensure(zero.is_zero_endomorphism(), || "zero target carries a nonzero ν".into())
}

/// Replays every check; the earliest failing stage (objects, target, steps in order, claim) is reported.
pub fn verify_certificate(cert: &Certificate) -> Verdict {
    let reject = |stage, reason| Verdict::Reject { stage, reason };

    let objects: Vec<(ObjectId, &NilMulticomplex)> = cert.registry.iter().collect();
    let object_checks: Vec<Check> = objects
        .par_iter()
        .map(|(_, o)| {
            ensure(o.base().ring() == cert.ring, || "ring differs from certificate ring".into())?;
            match validate_nil(o) {
                Err(e) => Err(format!("shape: {e}")),
                Ok(v) if !v.report.passed() => Err(v.report.to_string()),
                Ok(_) => Ok(()),
            }
        })
        .collect();
    for ((id, _), check) in objects.iter().zip(object_checks) {
        if let Err(reason) = check {
            return reject(CheckStage::Object(*id), reason);
        }
    }

    if let Err(reason) = check_target(cert) {
        return reject(CheckStage::Target, reason);
    }

    let step_checks: Vec<Check> = cert.steps.par_iter().map(|s| check_step(cert, s)).collect();
    if let Some((i, Err(reason))) = step_checks.into_iter().enumerate().find(|(_, c)| c.is_err()) {
        return reject(CheckStage::Step(i), reason);
    }

    if cert.claim != cert.target_sum() {
        return reject(
            CheckStage::Claim,
            format!("claim {} is not the target difference {}", cert.claim, cert.target_sum()),
        );
    }
    let relations: Vec<FormalSum> = cert.steps.iter().map(RelationStep::contribution).collect();
    match formal_membership(&cert.claim, &relations) {
        Some(combination) => Verdict::Accept { combination },
        None => reject(
            CheckStage::Claim,
            format!("{} is not in the span of the step relations", cert.claim),
        ),
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ReductionFailureKind {
    InvalidInput(ValidationReport),
    Split(Box<SplitFailure>),
    InternalInvariantViolation(String),
}

/// Why no certificate could be produced for `input`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionFailure {
    pub input: NilMulticomplex,
    pub strategy: Strategy,
    /// Recursion depth (0 = the input itself) at which the failure occurred.
    pub depth: usize,
    pub kind: ReductionFailureKind,
}

impl fmt::Display for ReductionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "reduction failed ({} strategy, depth {}): ", self.strategy, self.depth)?;
        match &self.kind {
            ReductionFailureKind::InvalidInput(r) => write!(f, "invalid input: {r}"),
            ReductionFailureKind::Split(s) => write!(f, "{s}"),
            ReductionFailureKind::InternalInvariantViolation(m) => write!(f, "internal invariant violated: {m}"),
        }
    }
}

struct Driver<'a> {
    input: &'a NilMulticomplex,
    strategy: Strategy,
    max_depth: usize,
    registry: ObjectRegistry,
    steps: Vec<RelationStep>,
}

impl Driver<'_> {
    fn fail(&self, depth: usize, kind: ReductionFailureKind) -> ReductionFailure {
        ReductionFailure {
            input: self.input.clone(),
            strategy: self.strategy,
            depth,
            kind,
        }
    }

    fn identity_iso(&mut self, left: ObjectId, right: ObjectId, obj: &NilMulticomplex) {
        let maps = obj
            .base()
            .graded()
            .ranks()
            .iter()
            .map(|&r| Matrix::identity(r))
            .collect();
        self.steps.push(RelationStep::Isomorphism { left, right, maps });
    }

    /// Emits steps whose contributions sum (all with coefficient ±1) to `[nu_id] − [zero_id]`.
    #[allow(clippy::result_large_err)]
    fn reduce_pair(&mut self, nu_id: ObjectId, zero_id: ObjectId, obj: &NilMulticomplex, depth: usize) -> Result<(), ReductionFailure> {
        if nu_id == zero_id {
            return Ok(());
        }
        if obj.is_zero_endomorphism() {
            self.identity_iso(nu_id, zero_id, obj);
            return Ok(());
        }
        if depth >= self.max_depth {
            return Err(self.fail(
                depth,
                ReductionFailureKind::InternalInvariantViolation(format!("recursion exceeded {} levels", self.max_depth)),
            ));
        }
        let layer = layer_split(obj, self.strategy).map_err(|e| match e {
            SplitError::Failure(f) => self.fail(depth, ReductionFailureKind::Split(f)),
            other => self.fail(depth, ReductionFailureKind::InternalInvariantViolation(other.to_string())),
        })?;

        let sub_zero = layer.sub.with_zero_endomorphism();
        let k_nu = self.registry.register(layer.sub.clone());
        let k_zero = if layer.sub.is_zero_endomorphism() {
            k_nu
        } else {
            self.registry.register(sub_zero)
        };
        let q_nu = self.registry.register(layer.quotient.clone());
        let q_zero = self.registry.register(layer.quotient.with_zero_endomorphism());

        for (sub, total, quotient) in [(k_nu, nu_id, q_nu), (k_zero, zero_id, q_zero)] {
            self.steps.push(RelationStep::ShortExact(ShortExactStep {
                sub,
                total,
                quotient,
                inclusions: layer.inclusions.clone(),
                projections: layer.projections.clone(),
                retractions: layer.retractions.clone(),
                sections: layer.sections.clone(),
            }));
        }
        self.reduce_pair(k_nu, k_zero, &layer.sub, depth + 1)?;
        self.reduce_pair(q_nu, q_zero, &layer.quotient, depth + 1)
    }
}

/// Builds a certificate that `[N, ν] − [N, 0] = 0` by telescoping the kernel filtration.
#[allow(clippy::result_large_err)] // failures are rare and carry their input
pub fn reduce_nil_generator(n: &NilMulticomplex, strategy: Strategy) -> Result<Certificate, ReductionFailure> {
    let invalid = |report| ReductionFailure {
        input: n.clone(),
        strategy,
        depth: 0,
        kind: ReductionFailureKind::InvalidInput(report),
    };
    match validate_nil(n) {
        Err(e) => {
            return Err(ReductionFailure {
                input: n.clone(),
                strategy,
                depth: 0,
                kind: ReductionFailureKind::InternalInvariantViolation(format!("shape: {e}")),
            })
        }
        Ok(v) if !v.report.passed() => return Err(invalid(v.report)),
        Ok(_) => {}
    }
    let max_depth = nil_index(n).map(|i| i.max_index).unwrap_or(0).max(1);
    let mut driver = Driver {
        input: n,
        strategy,
        max_depth,
        registry: ObjectRegistry::new(),
        steps: Vec::new(),
    };
    let nu_id = driver.registry.register(n.clone());
    let zero_id = driver.registry.register(n.with_zero_endomorphism());
    driver.reduce_pair(nu_id, zero_id, n, 0)?;

    let target = TargetPair { nu: nu_id, zero: zero_id };
    let mut claim = FormalSum::term(nu_id, 1);
    claim.add_term(zero_id, &-BigInt::one());
    Ok(Certificate {
        ring: n.base().ring(),
        registry: driver.registry,
        target,
        steps: driver.steps,
        claim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::BinaryMulticomplex;

    fn z() -> Ring {
        Ring::Integers
    }

    fn n0_example() -> NilMulticomplex {
        NilMulticomplex::module(z(), Matrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap()
    }

    #[test]
    fn membership_examples() {
        let (a, b) = (ObjectId(0), ObjectId(1));
        let mut r = FormalSum::term(a, 1);
        r.add_term(b, &BigInt::from(-1));
        assert_eq!(formal_membership(&r, std::slice::from_ref(&r)), Some(vec![BigInt::from(1)]));
        assert_eq!(formal_membership(&FormalSum::term(a, 1), &[FormalSum::term(a, 2)]), None);
        assert_eq!(formal_membership(&FormalSum::zero(), &[]), Some(vec![]));
        assert_eq!(formal_membership(&FormalSum::term(a, 1), &[]), None);
    }

    #[test]
    fn telescoping_membership() {
        let cert = reduce_nil_generator(&n0_example(), Strategy::MaxIndex).unwrap();
        let rel: Vec<FormalSum> = cert.steps.iter().map(RelationStep::contribution).collect();
        let c = formal_membership(&cert.claim, &rel).unwrap();
        assert_eq!(c, vec![BigInt::from(1), BigInt::from(-1), BigInt::from(1)]);
    }

    #[test]
    fn n0_certificate_shape_and_acceptance() {
        let cert = reduce_nil_generator(&n0_example(), Strategy::MaxIndex).unwrap();
        let kinds: Vec<_> = cert.steps.iter().map(RelationStep::kind_name).collect();
        assert_eq!(kinds, ["shortExact", "shortExact", "isomorphism"]);
        assert!(verify_certificate(&cert).is_accept(), "{}", verify_certificate(&cert));
    }

    #[test]
    fn zero_endomorphism_gives_trivial_certificate() {
        let n = NilMulticomplex::zero(BinaryMulticomplex::module(z(), 3));
        let cert = reduce_nil_generator(&n, Strategy::MaxIndex).unwrap();
        assert_eq!(cert.steps.len(), 1);
        assert!(matches!(&cert.steps[0], RelationStep::Isomorphism { maps, .. } if maps[0] == Matrix::identity(3)));
        assert!(verify_certificate(&cert).is_accept());
    }

    #[test]
    fn tampered_inclusion_is_rejected() {
        let mut cert = reduce_nil_generator(&n0_example(), Strategy::MaxIndex).unwrap();
        if let RelationStep::ShortExact(s) = &mut cert.steps[0] {
            s.inclusions[0][(0, 0)] += Scalar::one();
        }
        assert!(matches!(verify_certificate(&cert), Verdict::Reject { stage: CheckStage::Step(0), .. }));
    }

    #[test]
    fn empty_certificate_with_nonzero_claim_is_rejected() {
        let mut cert = reduce_nil_generator(&n0_example(), Strategy::MaxIndex).unwrap();
        cert.steps.clear();
        assert!(matches!(verify_certificate(&cert), Verdict::Reject { stage: CheckStage::Claim, .. }));
    }

    #[test]
    fn diagonal_121_shift_fails_to_reduce() {
        let d2 = Matrix::from_i64(&[&[1], &[0]]);
        let d1 = Matrix::from_i64(&[&[0, 1]]);
        let base = BinaryMulticomplex::line(z(), d2.clone(), d1.clone(), d2, d1).unwrap();
        let n = NilMulticomplex::new(
            base,
            vec![Matrix::zeros(1, 1), Matrix::from_i64(&[&[0, 1], &[0, 0]]), Matrix::zeros(1, 1)],
        )
        .unwrap();
        let err = reduce_nil_generator(&n, Strategy::MaxIndex).unwrap_err();
        assert_eq!(err.depth, 0);
        assert!(matches!(err.kind, ReductionFailureKind::Split(_)));
        assert!(err.to_string().contains("not exact at degree 0"));
    }

    #[test]
    fn diagonal_step_checks_zero_endomorphism() {
        let d = Matrix::identity(1);
        let base = BinaryMulticomplex::line(z(), d.clone(), Matrix::zeros(0, 1), d, Matrix::zeros(0, 1)).unwrap();
        let obj = NilMulticomplex::zero(base.clone());
        let mut cert = reduce_nil_generator(&obj, Strategy::MaxIndex).unwrap();
        let t = cert.registry.register(obj);
        cert.steps.push(RelationStep::Diagonal { object: t, direction: 0 });
        assert!(verify_certificate(&cert).is_accept());
        cert.steps.push(RelationStep::Diagonal { object: t, direction: 1 });
        assert!(matches!(verify_certificate(&cert), Verdict::Reject { stage: CheckStage::Step(2), .. }));
    }

    #[test]
    fn formal_sum_display() {
        let mut s = FormalSum::term(ObjectId(0), 1);
        s.add_term(ObjectId(3), &BigInt::from(-2));
        assert_eq!(s.to_string(), "[#0] -2[#3]");
        assert_eq!(FormalSum::zero().to_string(), "0");
    }
}
