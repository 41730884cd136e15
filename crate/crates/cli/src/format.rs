//! JSON files for instances, certificates and failure reports.
//!
//! Scalars are written as decimal strings (`"3"`, `"-1/2"`); on input plain
//! JSON integers are accepted too. Positions are coordinate arrays, matrices
//! are arrays of rows. Matrices that are zero may be omitted, and ranks that
//! are zero may be omitted. Serialization is byte-deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use kwitness_core::complexes::{positions, position_count, DifferentialPair, GradedModule};
use kwitness_core::witness::{
    Certificate, FormalSum, ObjectId, ObjectRegistry, ReductionFailure, ReductionFailureKind, RelationStep,
    ShortExactStep, TargetPair,
};
use kwitness_core::{BinaryMulticomplex, Matrix, MultiIndex, NilMulticomplex, Ring, Scalar};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    /// Dotted path to the offending field, empty for syntax errors.
    pub field: String,
    pub message: String,
}

impl FormatError {
    fn at(field: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "field `{}`: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for FormatError {}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::at("", e.to_string())
    }
}

type Result<T> = std::result::Result<T, FormatError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum RingSpec {
    Integers,
    Localized { prime: u64 },
}

impl RingSpec {
    pub fn from_ring(ring: Ring) -> Self {
        match ring {
            Ring::Integers => RingSpec::Integers,
            Ring::Localized(p) => RingSpec::Localized { prime: p },
        }
    }

    pub fn to_ring(&self) -> Result<Ring> {
        match self {
            RingSpec::Integers => Ok(Ring::Integers),
            RingSpec::Localized { prime } => {
                Ring::localized(*prime).map_err(|e| FormatError::at("ring.prime", e.to_string()))
            }
        }
    }
}

/// A scalar as text: `"n"` or `"n/d"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarText(pub Scalar);

impl Serialize for ScalarText {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

fn parse_scalar(text: &str) -> std::result::Result<Scalar, String> {
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| format!("`{text}` is not an integer or fraction"))?;
    let d = BigInt::from_str(d).map_err(|_| format!("`{text}` is not an integer or fraction"))?;
    if d.is_zero() {
        return Err(format!("`{text}` has zero denominator"));
    }
    Ok(Scalar::new(n, d))
}

impl<'de> Deserialize<'de> for ScalarText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ScalarText;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer or a string \"n\" or \"n/d\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ScalarText, E> {
                Ok(ScalarText(Scalar::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ScalarText, E> {
                Ok(ScalarText(Scalar::from_integer(v.into())))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ScalarText, E> {
                parse_scalar(v).map(ScalarText).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionedMatrix {
    pub position: Vec<u8>,
    pub matrix: Vec<Vec<ScalarText>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankEntry {
    pub position: Vec<u8>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DirectionFile {
    #[serde(default)]
    pub d: Vec<PositionedMatrix>,
    #[serde(default)]
    pub d_tilde: Vec<PositionedMatrix>,
}

/// Audit block attached to failure reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Annotation {
    pub kind: String,
    pub strategy: String,
    pub depth: usize,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<usize>,
    #[serde(default)]
    pub failures: Vec<String>,
    /// The object whose validation failed, in its own bases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<Box<ObjectFile>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InstanceFile {
    pub format: u32,
    pub ring: RingSpec,
    pub dimension: usize,
    #[serde(default)]
    pub ranks: Vec<RankEntry>,
    #[serde(default)]
    pub differentials: Vec<DirectionFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nil: Option<Vec<PositionedMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ObjectFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    pub dimension: usize,
    #[serde(default)]
    pub ranks: Vec<RankEntry>,
    #[serde(default)]
    pub differentials: Vec<DirectionFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nil: Option<Vec<PositionedMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetFile {
    pub nu: u32,
    pub zero: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum StepFile {
    ShortExact {
        sub: u32,
        total: u32,
        quotient: u32,
        inclusions: Vec<PositionedMatrix>,
        projections: Vec<PositionedMatrix>,
        retractions: Vec<PositionedMatrix>,
        sections: Vec<PositionedMatrix>,
    },
    Diagonal {
        object: u32,
        direction: usize,
    },
    Isomorphism {
        left: u32,
        right: u32,
        maps: Vec<PositionedMatrix>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimTerm {
    pub object: u32,
    pub coefficient: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CertificateFile {
    pub format: u32,
    pub ring: RingSpec,
    pub objects: Vec<ObjectFile>,
    pub target: TargetFile,
    pub steps: Vec<StepFile>,
    pub claim: Vec<ClaimTerm>,
}

fn rows_of(m: &Matrix) -> Vec<Vec<ScalarText>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(ScalarText).collect())
        .collect()
}

fn positioned(pos: &MultiIndex, m: &Matrix) -> PositionedMatrix {
    PositionedMatrix {
        position: pos.coords().to_vec(),
        matrix: rows_of(m),
    }
}

/// Nonzero matrices only; the omitted ones are zero of the implied shape.
fn sparse_list(dim: usize, maps: &[Matrix]) -> Vec<PositionedMatrix> {
    positions(dim)
        .filter(|p| !maps[p.index()].is_zero())
        .map(|p| positioned(&p, &maps[p.index()]))
        .collect()
}

fn dense_list(dim: usize, maps: &[Matrix]) -> Vec<PositionedMatrix> {
    positions(dim).map(|p| positioned(&p, &maps[p.index()])).collect()
}

pub fn object_file(n: &NilMulticomplex, id: Option<u32>) -> ObjectFile {
    let c = n.base();
    let dim = c.dim();
    let ranks = positions(dim)
        .filter(|p| c.rank(p) > 0)
        .map(|p| RankEntry {
            position: p.coords().to_vec(),
            rank: c.rank(&p),
        })
        .collect();
    let differentials = c
        .pairs()
        .iter()
        .map(|pair| DirectionFile {
            d: sparse_list(dim, &pair.d),
            d_tilde: sparse_list(dim, &pair.d_tilde),
        })
        .collect();
    let nil = (!n.is_zero_endomorphism()).then(|| sparse_list(dim, n.nil()));
    ObjectFile {
        id,
        dimension: dim,
        ranks,
        differentials,
        nil,
    }
}

fn position_of(coords: &[u8], dim: usize, field: &str) -> Result<MultiIndex> {
    if coords.len() != dim {
        return Err(FormatError::at(
            field,
            format!("position has {} coordinates, expected {dim}", coords.len()),
        ));
    }
    MultiIndex::new(coords.to_vec()).map_err(|e| FormatError::at(field, e.to_string()))
}

/// Rows to a matrix. An empty row list means zero rows with `default_cols` columns.
fn matrix_of(rows: &[Vec<ScalarText>], default_cols: usize, field: &str) -> Result<Matrix> {
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, default_cols));
    }
    let cols = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(FormatError::at(
            format!("{field}[{i}]"),
            format!("row has {} entries, expected {cols}", rows[i].len()),
        ));
    }
    let rows = rows.iter().map(|r| r.iter().map(|s| s.0.clone()).collect()).collect();
    Ok(Matrix::from_rows(rows, cols).expect("rectangular"))
}

/// Fills a per-position list; omitted positions are zero of shape `shape(pos)`.
/// With `strict`, every given matrix must have exactly that shape.
fn fill(
    list: &[PositionedMatrix],
    dim: usize,
    field: &str,
    shape: impl Fn(&MultiIndex) -> (usize, usize),
    strict: bool,
) -> Result<Vec<Matrix>> {
    let mut out: Vec<Option<Matrix>> = vec![None; position_count(dim)];
    for (k, pm) in list.iter().enumerate() {
        let f = format!("{field}[{k}]");
        let pos = position_of(&pm.position, dim, &format!("{f}.position"))?;
        let (r, c) = shape(&pos);
        let m = matrix_of(&pm.matrix, c, &format!("{f}.matrix"))?;
        if strict && m.shape() != (r, c) {
            return Err(FormatError::at(
                format!("{f}.matrix"),
                format!("expected a {r}×{c} matrix at {pos}, found {}×{}", m.rows(), m.cols()),
            ));
        }
        if out[pos.index()].replace(m).is_some() {
            return Err(FormatError::at(f, format!("position {pos} given twice")));
        }
    }
    Ok(positions(dim)
        .zip(out)
        .map(|(p, m)| {
            m.unwrap_or_else(|| {
                let (r, c) = shape(&p);
                Matrix::zeros(r, c)
            })
        })
        .collect())
}

fn build_object(
    ring: Ring,
    dimension: usize,
    ranks: &[RankEntry],
    differentials: &[DirectionFile],
    nil: Option<&[PositionedMatrix]>,
    prefix: &str,
) -> Result<NilMulticomplex> {
    let mut rank_vec = vec![0; position_count(dimension)];
    let mut seen = vec![false; rank_vec.len()];
    for (k, e) in ranks.iter().enumerate() {
        let pos = position_of(&e.position, dimension, &format!("{prefix}ranks[{k}].position"))?;
        if std::mem::replace(&mut seen[pos.index()], true) {
            return Err(FormatError::at(
                format!("{prefix}ranks[{k}]"),
                format!("position {pos} given twice"),
            ));
        }
        rank_vec[pos.index()] = e.rank;
    }
    let graded = GradedModule::new(dimension, rank_vec).map_err(|e| FormatError::at(format!("{prefix}ranks"), e.to_string()))?;
    if differentials.len() != dimension {
        return Err(FormatError::at(
            format!("{prefix}differentials"),
            format!("expected {dimension} directions, found {}", differentials.len()),
        ));
    }
    let mut pairs = Vec::with_capacity(dimension);
    for (dir, df) in differentials.iter().enumerate() {
        for (name, list) in [("d", &df.d), ("dTilde", &df.d_tilde)] {
            for (k, pm) in list.iter().enumerate() {
                if pm.position.get(dir) == Some(&0) {
                    return Err(FormatError::at(
                        format!("{prefix}differentials[{dir}].{name}[{k}].position"),
                        "no differential leaves a position with coordinate 0 in its direction",
                    ));
                }
            }
        }
        let shape = |p: &MultiIndex| graded.differential_shape(dir, p);
        let f = format!("{prefix}differentials[{dir}]");
        pairs.push(DifferentialPair {
            d: fill(&df.d, dimension, &format!("{f}.d"), shape, true)?,
            d_tilde: fill(&df.d_tilde, dimension, &format!("{f}.dTilde"), shape, true)?,
        });
    }
    let square = |p: &MultiIndex| (graded.rank(p), graded.rank(p));
    let nil = fill(nil.unwrap_or(&[]), dimension, &format!("{prefix}nil"), square, true)?;
    let base = BinaryMulticomplex::new(ring, graded, pairs).map_err(|e| FormatError::at(prefix.trim_end_matches('.'), e.to_string()))?;
    NilMulticomplex::new(base, nil).map_err(|e| FormatError::at(prefix.trim_end_matches('.'), e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn instance_file(n: &NilMulticomplex, annotation: Option<Annotation>) -> InstanceFile {
    let o = object_file(n, None);
    InstanceFile {
        format: FORMAT_VERSION,
        ring: RingSpec::from_ring(n.base().ring()),
        dimension: o.dimension,
        ranks: o.ranks,
        differentials: o.differentials,
        nil: o.nil,
        annotation,
    }
}

pub fn write_instance(n: &NilMulticomplex) -> String {
    to_json(&instance_file(n, None))
}

fn check_version(format: u32) -> Result<()> {
    if format != FORMAT_VERSION {
        return Err(FormatError::at(
            "format",
            format!("unsupported format version {format}, expected {FORMAT_VERSION}"),
        ));
    }
    Ok(())
}

pub fn instance_from_file(file: &InstanceFile) -> Result<NilMulticomplex> {
    check_version(file.format)?;
    let ring = file.ring.to_ring()?;
    build_object(ring, file.dimension, &file.ranks, &file.differentials, file.nil.as_deref(), "")
}

/// Parses an instance (a failure report's annotation, if any, is returned alongside).
pub fn parse_instance(text: &str) -> Result<(NilMulticomplex, Option<Annotation>)> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let n = instance_from_file(&file)?;
    Ok((n, file.annotation))
}

/// Failure report: the input instance plus an annotation describing the failure.
pub fn failure_report(f: &ReductionFailure) -> InstanceFile {
    let (kind, side, exponent, failures, object) = match &f.kind {
        ReductionFailureKind::InvalidInput(r) => (
            "invalidInput",
            None,
            None,
            r.failures.iter().map(ToString::to_string).collect(),
            None,
        ),
        ReductionFailureKind::Split(s) => (
            "splitFailure",
            Some(s.side.to_string()),
            Some(s.exponent),
            s.report.failures.iter().map(ToString::to_string).collect(),
            Some(Box::new(object_file(&s.object, None))),
        ),
        ReductionFailureKind::InternalInvariantViolation(_) => ("internalInvariantViolation", None, None, Vec::new(), None),
    };
    let annotation = Annotation {
        kind: kind.to_string(),
        strategy: f.strategy.to_string(),
        depth: f.depth,
        message: f.to_string(),
        side,
        exponent,
        failures,
        object,
    };
    instance_file(&f.input, Some(annotation))
}

pub fn write_failure_report(f: &ReductionFailure) -> String {
    to_json(&failure_report(f))
}

/// Rebuilds the annotated object of a failure report.
pub fn annotation_object(ring: Ring, a: &Annotation) -> Option<Result<NilMulticomplex>> {
    a.object.as_ref().map(|o| {
        build_object(ring, o.dimension, &o.ranks, &o.differentials, o.nil.as_deref(), "annotation.object.")
    })
}

pub fn certificate_file(cert: &Certificate) -> CertificateFile {
    let objects = cert.registry.iter().map(|(id, o)| object_file(o, Some(id.0))).collect();
    let dim_of = |id: ObjectId| cert.registry.get(id).map_or(0, |o| o.base().dim());
    let steps = cert
        .steps
        .iter()
        .map(|s| match s {
            RelationStep::ShortExact(s) => {
                let dim = dim_of(s.total);
                StepFile::ShortExact {
                    sub: s.sub.0,
                    total: s.total.0,
                    quotient: s.quotient.0,
                    inclusions: dense_list(dim, &s.inclusions),
                    projections: dense_list(dim, &s.projections),
                    retractions: dense_list(dim, &s.retractions),
                    sections: dense_list(dim, &s.sections),
                }
            }
            RelationStep::Diagonal { object, direction } => StepFile::Diagonal {
                object: object.0,
                direction: *direction,
            },
            RelationStep::Isomorphism { left, right, maps } => StepFile::Isomorphism {
                left: left.0,
                right: right.0,
                maps: dense_list(dim_of(*left), maps),
            },
        })
        .collect();
    let claim = cert
        .claim
        .terms()
        .map(|(id, c)| ClaimTerm {
            object: id.0,
            coefficient: c.to_string(),
        })
        .collect();
    CertificateFile {
        format: FORMAT_VERSION,
        ring: RingSpec::from_ring(cert.ring),
        objects,
        target: TargetFile {
            nu: cert.target.nu.0,
            zero: cert.target.zero.0,
        },
        steps,
        claim,
    }
}

pub fn write_certificate(cert: &Certificate) -> String {
    to_json(&certificate_file(cert))
}

pub fn certificate_from_file(file: &CertificateFile) -> Result<Certificate> {
    check_version(file.format)?;
    let ring = file.ring.to_ring()?;
    let mut registry = ObjectRegistry::new();
    for (k, o) in file.objects.iter().enumerate() {
        let prefix = format!("objects[{k}].");
        let id = o
            .id
            .ok_or_else(|| FormatError::at(format!("objects[{k}].id"), "missing object id"))?;
        let obj = build_object(ring, o.dimension, &o.ranks, &o.differentials, o.nil.as_deref(), &prefix)?;
        if registry.insert(ObjectId(id), obj).is_some() {
            return Err(FormatError::at(format!("objects[{k}].id"), format!("duplicate id {id}")));
        }
    }
    let lookup = |id: u32, field: &str| {
        registry
            .get(ObjectId(id))
            .ok_or_else(|| FormatError::at(field, format!("unknown object id {id}")))
    };
    let ranks = |o: &NilMulticomplex| o.base().graded().clone();

    let mut steps = Vec::with_capacity(file.steps.len());
    for (k, s) in file.steps.iter().enumerate() {
        let f = format!("steps[{k}]");
        steps.push(match s {
            StepFile::ShortExact {
                sub,
                total,
                quotient,
                inclusions,
                projections,
                retractions,
                sections,
            } => {
                let a = ranks(lookup(*sub, &format!("{f}.sub"))?);
                let b = ranks(lookup(*total, &format!("{f}.total"))?);
                let c = ranks(lookup(*quotient, &format!("{f}.quotient"))?);
                let dim = b.dim();
                RelationStep::ShortExact(ShortExactStep {
                    sub: ObjectId(*sub),
                    total: ObjectId(*total),
                    quotient: ObjectId(*quotient),
                    inclusions: fill(inclusions, dim, &format!("{f}.inclusions"), |p| (b.rank(p), a.rank(p)), false)?,
                    projections: fill(projections, dim, &format!("{f}.projections"), |p| (c.rank(p), b.rank(p)), false)?,
                    retractions: fill(retractions, dim, &format!("{f}.retractions"), |p| (a.rank(p), b.rank(p)), false)?,
                    sections: fill(sections, dim, &format!("{f}.sections"), |p| (b.rank(p), c.rank(p)), false)?,
                })
            }
            StepFile::Diagonal { object, direction } => {
                lookup(*object, &format!("{f}.object"))?;
                RelationStep::Diagonal {
                    object: ObjectId(*object),
                    direction: *direction,
                }
            }
            StepFile::Isomorphism { left, right, maps } => {
                let l = ranks(lookup(*left, &format!("{f}.left"))?);
                lookup(*right, &format!("{f}.right"))?;
                RelationStep::Isomorphism {
                    left: ObjectId(*left),
                    right: ObjectId(*right),
                    maps: fill(maps, l.dim(), &format!("{f}.maps"), |p| (l.rank(p), l.rank(p)), false)?,
                }
            }
        });
    }

    let mut claim = FormalSum::zero();
    let mut seen = BTreeMap::new();
    for (k, t) in file.claim.iter().enumerate() {
        let c = BigInt::from_str(t.coefficient.trim())
            .map_err(|_| FormatError::at(format!("claim[{k}].coefficient"), "not an integer"))?;
        if seen.insert(t.object, ()).is_some() {
            return Err(FormatError::at(format!("claim[{k}].object"), "object listed twice"));
        }
        claim.add_term(ObjectId(t.object), &c);
    }
    Ok(Certificate {
        ring,
        registry,
        target: TargetPair {
            nu: ObjectId(file.target.nu),
            zero: ObjectId(file.target.zero),
        },
        steps,
        claim,
    })
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let file: CertificateFile = serde_json::from_str(text)?;
    certificate_from_file(&file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use kwitness_core::witness::reduce_nil_generator;
    use kwitness_core::Strategy;

    fn n0() -> NilMulticomplex {
        NilMulticomplex::module(Ring::Integers, Matrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap()
    }

    #[test]
    fn scalar_text() {
        assert_eq!(parse_scalar("-3/6").unwrap(), Scalar::new((-1).into(), 2.into()));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        let v: Vec<ScalarText> = serde_json::from_str(r#"[1, "2", "-1/2"]"#).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1","2","-1/2"]"#);
    }

    #[test]
    fn instance_round_trip() {
        let text = write_instance(&n0());
        let (back, ann) = parse_instance(&text).unwrap();
        assert_eq!(back, n0());
        assert!(ann.is_none());
        assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn hand_written_instance() {
        let text = r#"{"format": 1, "ring": {"kind": "localized", "prime": 3},
            "dimension": 1, "ranks": [{"position": [0], "rank": 1}, {"position": [1], "rank": 1}],
            "differentials": [{"d": [{"position": [1], "matrix": [["1/2"]]}],
                               "dTilde": [{"position": [1], "matrix": [[2]]}]}]}"#;
        let (n, _) = parse_instance(text).unwrap();
        assert_eq!(n.base().ring(), Ring::Localized(3));
        assert!(n.is_zero_endomorphism());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = r#"{"format": 1, "ring": {"kind": "integers"}, "dimension": 0,
            "ranks": [{"position": [], "rank": 2}], "nil": [{"position": [], "matrix": [[0, 1]]}]}"#;
        let e = parse_instance(bad).unwrap_err();
        assert_eq!(e.field, "nil[0].matrix");
        let e = parse_instance("{\"format\": 1,").unwrap_err();
        assert!(e.message.contains("line 1 column"), "{}", e.message);
        let e = parse_instance(r#"{"format": 1, "ring": {"kind": "localized", "prime": 4}, "dimension": 0}"#).unwrap_err();
        assert_eq!(e.field, "ring.prime");
        let e = parse_instance(r#"{"format": 1, "ring": {"kind": "localized", "prime": 3}, "dimension": 0,
            "ranks": [{"position": [], "rank": 1}], "nil": [{"position": [], "matrix": [["1/3"]]}]}"#).unwrap_err();
        assert!(e.to_string().contains("entry outside"), "{e}");
    }

    #[test]
    fn certificate_round_trip() {
        let cert = reduce_nil_generator(&n0(), Strategy::MaxIndex).unwrap();
        let text = write_certificate(&cert);
        let back = parse_certificate(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(write_certificate(&back), text);
    }
}
