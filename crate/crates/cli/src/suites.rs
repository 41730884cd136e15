//! Self-test suites. Each returns a [`SuiteReport`]; the nil suites also hand
//! back their accepted certificates for the membership cross-check.

use std::fmt;
use std::time::{Duration, Instant};

use kwitness_core::complexes::{positions, validate_multicomplex, CHOICES};
use kwitness_core::linalg::{hnf, kernel_saturated, snf, split_saturated_inclusion};
use kwitness_core::nilcat::validate_nil;
use kwitness_core::witness::{
    reduce_nil_generator, verify_certificate, ObjectId, ReductionFailure, ReductionFailureKind,
};
use kwitness_core::{BinaryMulticomplex, Certificate, Choice, Matrix, MultiIndex, Ring, Strategy, Verdict};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use crate::corpus::{self, stream};
use crate::format;
use crate::oracle;

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub details: Vec<String>,
    /// Number of instances examined.
    pub instances: usize,
    pub elapsed: Duration,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {} ({:.2} s)", self.name, self.summary, self.elapsed.as_secs_f64())?;
        for d in &self.details {
            write!(f, "\n    {d}")?;
        }
        Ok(())
    }
}

/// A certificate the verifier accepted, with its derivation coefficients.
#[derive(Debug, Clone)]
pub struct Accepted {
    pub cert: Certificate,
    pub combination: Vec<BigInt>,
}

const MAX_DETAILS: usize = 10;

fn truncate(mut lines: Vec<String>) -> Vec<String> {
    if lines.len() > MAX_DETAILS {
        let extra = lines.len() - MAX_DETAILS;
        lines.truncate(MAX_DETAILS);
        lines.push(format!("... and {extra} more"));
    }
    lines
}

enum Outcome {
    Accepted(Accepted),
    Rejected(String),
    Failed(Box<ReductionFailure>),
}

fn reduce_and_verify(n: &kwitness_core::NilMulticomplex, strategy: Strategy) -> Outcome {
    match reduce_nil_generator(n, strategy) {
        Err(f) => Outcome::Failed(Box::new(f)),
        Ok(cert) => match verify_certificate(&cert) {
            Verdict::Accept { combination } => Outcome::Accepted(Accepted { cert, combination }),
            v => Outcome::Rejected(v.to_string()),
        },
    }
}

/// Random nilpotent endomorphisms of free modules: every one must reduce and verify.
pub fn nil0(ring: Ring, seed: u64, samples: usize, max_rank: usize, entry_bound: i64) -> (SuiteReport, Vec<Accepted>) {
    let start = Instant::now();
    let outcomes: Vec<Outcome> = (0..samples as u64)
        .into_par_iter()
        .map(|i| reduce_and_verify(&corpus::nil0_sample(ring, seed, i, max_rank, entry_bound), Strategy::MaxIndex))
        .collect();
    let mut accepted = Vec::new();
    let mut details = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Accepted(a) => accepted.push(a),
            Outcome::Rejected(v) => details.push(format!("sample {i}: certificate rejected: {v}")),
            Outcome::Failed(f) => details.push(format!("sample {i}: {f}")),
        }
    }
    let report = SuiteReport {
        name: format!("nil0 over {ring}"),
        passed: accepted.len() == samples,
        summary: format!("{}/{samples} certificates accepted (rank ≤ {max_rank}, entries ≤ {entry_bound})", accepted.len()),
        details: truncate(details),
        instances: samples,
        elapsed: start.elapsed(),
    };
    (report, accepted)
}

/// Checks that a failure report serializes, parses back to the input and re-validates.
fn failure_reloads(f: &ReductionFailure) -> Result<String, String> {
    let text = format::write_failure_report(f);
    let (back, annotation) = format::parse_instance(&text).map_err(|e| format!("report does not parse: {e}"))?;
    if back != f.input {
        return Err("report does not reproduce the input".into());
    }
    if !validate_nil(&back).map_err(|e| e.to_string())?.report.passed() {
        return Err("input does not re-validate".into());
    }
    let annotation = annotation.ok_or("report has no annotation")?;
    if let ReductionFailureKind::Split(s) = &f.kind {
        if annotation.failures.is_empty() {
            return Err("split failure without diagnostics".into());
        }
        let obj = format::annotation_object(back.base().ring(), &annotation)
            .ok_or("split failure without the failing object")?
            .map_err(|e| format!("failing object does not parse: {e}"))?;
        if obj != s.object {
            return Err("failing object does not round-trip".into());
        }
    }
    Ok(annotation.failures.first().cloned().unwrap_or(annotation.message))
}

/// `start` is taken before the instances are generated, so elapsed covers generation.
fn soundness_suite(
    name: String,
    start: Instant,
    instances: Vec<(String, kwitness_core::NilMulticomplex)>,
) -> (SuiteReport, Vec<Accepted>) {
    let total = instances.len();
    let outcomes: Vec<Outcome> = instances.par_iter().map(|(_, n)| reduce_and_verify(n, Strategy::MaxIndex)).collect();
    let mut accepted = Vec::new();
    let mut problems = Vec::new();
    let mut logged = Vec::new();
    let mut failures = 0;
    let mut nonzero = 0;
    for ((label, n), o) in instances.iter().zip(outcomes) {
        match o {
            Outcome::Accepted(a) => {
                if !n.is_zero_endomorphism() {
                    nonzero += 1;
                }
                accepted.push(a);
            }
            Outcome::Rejected(v) => problems.push(format!("{label}: emitted certificate rejected: {v}")),
            Outcome::Failed(f) => {
                failures += 1;
                match failure_reloads(&f) {
                    Ok(first) => logged.push(format!("{label}: reduction failure at depth {} logged: {first}", f.depth)),
                    Err(e) => problems.push(format!("{label}: failure report unusable: {e}")),
                }
            }
        }
    }
    let passed = problems.is_empty();
    let mut details = problems;
    details.extend(logged);
    let report = SuiteReport {
        name,
        passed,
        summary: format!(
            "{}/{} certificates accepted ({} with nonzero ν), {} reduction failures logged, {} of {total} instances",
            accepted.len(),
            total - failures,
            nonzero,
            failures,
            total,
        ),
        details: truncate(details),
        instances: total,
        elapsed: start.elapsed(),
    };
    (report, accepted)
}

/// One-directional corpus as written by `gen --dim 1`: soundness only.
pub fn nil1(seed: u64, count: usize) -> (SuiteReport, Vec<Accepted>) {
    let start = Instant::now();
    let instances = (0..count as u64)
        .into_par_iter()
        .map(|i| (format!("instance {i}"), corpus::generate(Ring::Integers, seed, i, 1, 2)))
        .collect();
    soundness_suite("nil1 soundness".into(), start, instances)
}

/// Curated two-directional nets: soundness only.
pub fn nil2(seed: u64, min_count: usize) -> (SuiteReport, Vec<Accepted>) {
    let start = Instant::now();
    soundness_suite("nil2 nets".into(), start, corpus::curated_nets(seed, min_count))
}

/// The validator's verdict on random lines against the independent oracle.
pub fn oracle(seed: u64, count: usize) -> SuiteReport {
    let start = Instant::now();
    let rows: Vec<(bool, bool)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let (ring, left, right) = corpus::random_line(seed, i);
            let c = BinaryMulticomplex::line(ring, left.clone(), right.clone(), left.clone(), right.clone())
                .expect("composable shapes");
            let validator = validate_multicomplex(&c).expect("shape-valid").report.passed();
            (validator, oracle::line_exact(&ring, &left, &right))
        })
        .collect();
    let agree = rows.iter().filter(|(a, b)| a == b).count();
    let exact = rows.iter().filter(|(_, b)| *b).count();
    let details = rows
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, (a, b))| format!("line {i}: validator {a}, oracle {b}"))
        .collect();
    SuiteReport {
        name: "acyclicity oracle".into(),
        passed: agree == count,
        summary: format!("{agree}/{count} verdicts agree ({exact} exact, {} not exact)", count - exact),
        details: truncate(details),
        instances: count,
        elapsed: start.elapsed(),
    }
}

#[derive(Clone, Debug)]
enum Location {
    Differential(ObjectId, usize, Choice, MultiIndex),
    Nil(ObjectId, MultiIndex),
    Step(usize, usize),
}

fn locations(cert: &mut Certificate) -> Vec<Location> {
    let mut out = Vec::new();
    let ids: Vec<ObjectId> = cert.registry.iter().map(|(id, _)| id).collect();
    for id in ids {
        let o = cert.registry.get(id).expect("listed");
        let c = o.base();
        for p in positions(c.dim()) {
            for dir in 0..c.dim() {
                for ch in CHOICES {
                    let m = c.differential(dir, ch, &p);
                    if m.rows() > 0 && m.cols() > 0 {
                        out.push(Location::Differential(id, dir, ch, p.clone()));
                    }
                }
            }
            if c.rank(&p) > 0 {
                out.push(Location::Nil(id, p.clone()));
            }
        }
    }
    for (k, step) in cert.steps.iter_mut().enumerate() {
        for (j, m) in step.matrices_mut().into_iter().enumerate() {
            if m.rows() > 0 && m.cols() > 0 {
                out.push(Location::Step(k, j));
            }
        }
    }
    out
}

fn matrix_at<'a>(cert: &'a mut Certificate, loc: &Location) -> &'a mut Matrix {
    match loc {
        Location::Differential(id, dir, ch, p) => {
            cert.registry.get_mut(*id).expect("listed").base_mut().differential_mut(*dir, *ch, p)
        }
        Location::Nil(id, p) => &mut cert.registry.get_mut(*id).expect("listed").nil_mut()[p.index()],
        Location::Step(k, j) => cert.steps[*k].matrices_mut().swap_remove(*j),
    }
}

fn tamper_pool(seed: u64) -> Vec<Accepted> {
    let mut pool: Vec<Accepted> = Vec::new();
    for (k, ring) in [Ring::Integers, Ring::Localized(3)].into_iter().enumerate() {
        let (_, acc) = nil0(ring, seed ^ 0x7a3d, 12, 5, 9);
        pool.extend(acc.into_iter().filter(|a| a.cert.steps.len() > 1).take(5 + k));
    }
    let (_, acc) = nil1(seed ^ 0x51, 12);
    pool.extend(acc.into_iter().filter(|a| a.cert.steps.len() > 1).take(5));
    pool
}

/// Single-entry mutations of accepted certificates. A mutant may only be
/// accepted if the independent replay confirms every identity still holds,
/// and the two must agree on every mutant.
pub fn tamper(seed: u64, count: usize) -> SuiteReport {
    let start = Instant::now();
    let pool = tamper_pool(seed);
    if pool.is_empty() {
        return SuiteReport {
            name: "tamper resistance".into(),
            passed: false,
            summary: "no certificates to mutate".into(),
            details: Vec::new(),
            instances: 0,
            elapsed: start.elapsed(),
        };
    }
    let results: Vec<(bool, bool, String)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed ^ 0x7a3e, i);
            let base = &pool[i as usize % pool.len()];
            let mut cert = base.cert.clone();
            let locs = locations(&mut cert);
            let loc = locs[rng.gen_range(0..locs.len())].clone();
            let delta = kwitness_core::ring::int(if rng.gen_bool(0.5) { 1 } else { -1 });
            let m = matrix_at(&mut cert, &loc);
            let (r, c) = (rng.gen_range(0..m.rows()), rng.gen_range(0..m.cols()));
            m[(r, c)] += delta;
            let verdict = verify_certificate(&cert);
            let coeffs = match &verdict {
                Verdict::Accept { combination } => combination.clone(),
                _ => base.combination.clone(),
            };
            let intact = oracle::replay_certificate(&cert, &coeffs).is_ok();
            (verdict.is_accept(), intact, format!("mutant {i} at {loc:?} entry ({r},{c})"))
        })
        .collect();
    let accepted_broken: Vec<&String> = results.iter().filter(|(a, ok, _)| *a && !*ok).map(|r| &r.2).collect();
    let rejected_intact: Vec<&String> = results.iter().filter(|(a, ok, _)| !*a && *ok).map(|r| &r.2).collect();
    let rejected = results.iter().filter(|(a, _, _)| !*a).count();
    let benign = results.iter().filter(|(_, ok, _)| *ok).count();
    let mut details: Vec<String> = accepted_broken.iter().map(|s| format!("accepted with a broken identity: {s}")).collect();
    details.extend(rejected_intact.iter().map(|s| format!("rejected with all identities intact: {s}")));
    SuiteReport {
        name: "tamper resistance".into(),
        passed: accepted_broken.is_empty() && rejected_intact.is_empty(),
        summary: format!(
            "{} mutants accepted with a changed identity; {rejected}/{count} rejected, {benign} left every identity intact (from {} certificates)",
            accepted_broken.len(),
            pool.len()
        ),
        details: truncate(details),
        instances: count,
        elapsed: start.elapsed(),
    }
}

fn random_matrix(rng: &mut impl Rng) -> Matrix {
    let (r, c) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
    let entry = |rng: &mut dyn rand::RngCore| kwitness_core::ring::int(rng.gen_range(-9..=9));
    if rng.gen_bool(0.5) || r == 0 || c == 0 {
        Matrix::from_fn(r, c, |_, _| entry(rng))
    } else {
        // deliberately rank deficient
        let k = rng.gen_range(0..r.min(c));
        let a = Matrix::from_fn(r, k, |_, _| kwitness_core::ring::int(rng.gen_range(-3..=3)));
        let b = Matrix::from_fn(k, c, |_, _| kwitness_core::ring::int(rng.gen_range(-3..=3)));
        &a * &b
    }
}

fn linalg_instance(ring: &Ring, m: &Matrix) -> Result<(), String> {
    let r = oracle::rank(m);
    let h = hnf(ring, m);
    if &h.u * m != h.h || !oracle::invertible(ring, &h.u) {
        return Err("hnf: U·M ≠ H or U not invertible".into());
    }
    if h.pivots.len() != r || h.pivots.windows(2).any(|w| w[0] >= w[1]) {
        return Err("hnf: pivots are not a staircase of length rank".into());
    }
    for (i, &pc) in h.pivots.iter().enumerate() {
        let p = &h.h[(i, pc)];
        if ring.normalize(p).0 != *p || (i + 1..h.h.rows()).any(|k| !h.h[(k, pc)].is_zero()) {
            return Err(format!("hnf: pivot column {pc} not normalized"));
        }
        if (0..i).any(|k| ring.reduce_mod(&h.h[(k, pc)], p) != h.h[(k, pc)]) {
            return Err(format!("hnf: column {pc} not reduced above its pivot"));
        }
        if (0..pc).any(|c| !h.h[(i, c)].is_zero()) {
            return Err(format!("hnf: row {i} nonzero left of its pivot"));
        }
    }
    if (r..h.h.rows()).any(|i| (0..h.h.cols()).any(|c| !h.h[(i, c)].is_zero())) {
        return Err("hnf: nonzero row below the rank".into());
    }

    let s = snf(ring, m);
    if &(&s.u * m) * &s.v != s.d || !oracle::invertible(ring, &s.u) || !oracle::invertible(ring, &s.v) {
        return Err("snf: U·M·V ≠ D or a transform is not invertible".into());
    }
    for i in 0..s.d.rows() {
        for j in 0..s.d.cols() {
            if i != j && !s.d[(i, j)].is_zero() {
                return Err("snf: D not diagonal".into());
            }
        }
    }
    let diag: Vec<_> = (0..r).map(|i| s.d[(i, i)].clone()).collect();
    if diag.iter().any(|x| x.is_zero() || ring.normalize(x).0 != *x) || diag.windows(2).any(|w| !ring.divides(&w[0], &w[1])) {
        return Err("snf: invariant factors not normalized or not a divisor chain".into());
    }
    if (r..s.d.rows().min(s.d.cols())).any(|i| !s.d[(i, i)].is_zero()) {
        return Err("snf: more nonzero diagonal entries than the rank".into());
    }

    let k = kernel_saturated(ring, m);
    let b = k.basis();
    if !(m * b).is_zero() || b.cols() + r != m.cols() || oracle::rank(b) != b.cols() {
        return Err("kernel: wrong basis".into());
    }
    if !oracle::split_injective(ring, b) {
        return Err("kernel: basis not saturated".into());
    }
    let sp = split_saturated_inclusion(ring, &k).map_err(|e| format!("split: {e}"))?;
    if &sp.retraction * b != Matrix::identity(b.cols()) || !oracle::invertible(ring, &b.hconcat(&sp.complement)) {
        return Err("split: retraction or complement wrong".into());
    }
    Ok(())
}

/// HNF, SNF, kernel and splitting postconditions on random matrices.
pub fn linalg(seed: u64, count: usize) -> SuiteReport {
    let start = Instant::now();
    let results: Vec<Result<(), String>> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed ^ 0x11a6, i);
            let ring = [Ring::Integers, Ring::Integers, Ring::Localized(2), Ring::Localized(3), Ring::Localized(5)]
                [rng.gen_range(0..5)];
            let m = random_matrix(&mut rng);
            linalg_instance(&ring, &m).map_err(|e| format!("instance {i} over {ring}: {e}"))
        })
        .collect();
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    SuiteReport {
        name: "exact linalg replay".into(),
        passed: failures.is_empty(),
        summary: format!("{} failures in {count} instances", failures.len()),
        details: truncate(failures),
        instances: count,
        elapsed: start.elapsed(),
    }
}

/// Sums every accepted certificate's step contributions directly and compares with its claim.
pub fn membership_crosscheck(accepted: &[Accepted]) -> SuiteReport {
    let start = Instant::now();
    let bad: Vec<String> = accepted
        .par_iter()
        .enumerate()
        .filter(|(_, a)| oracle::sum_contributions(&a.cert.steps, &a.combination) != oracle::claim_map(&a.cert))
        .map(|(i, _)| format!("certificate {i}: summation differs from claim"))
        .collect();
    SuiteReport {
        name: "formal membership cross-check".into(),
        passed: bad.is_empty(),
        summary: format!("{} discrepancies over {} accepted certificates", bad.len(), accepted.len()),
        details: truncate(bad),
        instances: accepted.len(),
        elapsed: start.elapsed(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Nil0,
    Nil1,
    Nil2,
    Linalg,
    Oracle,
    Tamper,
}

/// Runs a named suite at its acceptance size.
pub fn run(suite: Suite, seed: u64) -> Vec<SuiteReport> {
    match suite {
        Suite::Nil0 => {
            let mut reports = Vec::new();
            let mut all = Vec::new();
            let (r, a) = nil0(Ring::Integers, seed, 200, 6, 9);
            reports.push(r);
            all.extend(a);
            for p in [2, 3, 5] {
                let (r, a) = nil0(Ring::Localized(p), seed, 100, 6, 9);
                reports.push(r);
                all.extend(a);
            }
            reports.push(membership_crosscheck(&all));
            reports
        }
        Suite::Nil1 => {
            let (r, a) = nil1(seed, 100);
            vec![r, membership_crosscheck(&a)]
        }
        Suite::Nil2 => {
            let (r, a) = nil2(seed, 12);
            vec![r, membership_crosscheck(&a)]
        }
        Suite::Linalg => vec![linalg(seed, 1000)],
        Suite::Oracle => vec![oracle(seed, 500)],
        Suite::Tamper => vec![tamper(seed, 100)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(nil0(Ring::Integers, 3, 10, 4, 9).0.passed);
        assert!(oracle(3, 40).passed);
        assert!(linalg(3, 40).passed);
    }

    #[test]
    fn crosscheck_detects_a_wrong_combination() {
        let (_, mut acc) = nil0(Ring::Integers, 5, 4, 4, 9);
        let a = acc.iter_mut().find(|a| !a.combination.is_empty()).unwrap();
        a.combination[0] += BigInt::from(1);
        assert!(!membership_crosscheck(&acc).passed);
    }
}
