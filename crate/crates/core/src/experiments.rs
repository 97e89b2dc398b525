//! Family statistics for `|Cl[2]|`, monogeniser audits, growth counts and
//! the quadratic genus baseline.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classgroup::{class_group, ClassGroupConfig, ClassGroupResult, Status};
use crate::cubicforms::{
    monogeniser_multiplicity, quadratic_genus_two_rank, reduce_form, unit_constant_translates,
    BinaryCubicForm, MonicCubic, MONOGENISER_BOUND,
};
use crate::exactmath::arith::is_squarefree;
use crate::exactmath::{format_rational, intstr, parse_rational};
use crate::families::{enumerate_b112, enumerate_f1, FamilyKind, FamilyMember, FamilySpec, Heights, Ordering, SignatureFilter};
use crate::{Error, Result};

/// Share of heuristic results above which a run is repeated once at
/// doubled precision.
pub const HEURISTIC_ESCALATION_SHARE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Certified,
    Heuristic,
    Oracle,
    Error,
}

impl From<Status> for RecordStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Certified => RecordStatus::Certified,
            Status::Heuristic => RecordStatus::Heuristic,
            Status::Oracle => RecordStatus::Oracle,
        }
    }
}

impl RecordStatus {
    fn as_str(self) -> &'static str {
        match self {
            RecordStatus::Certified => "certified",
            RecordStatus::Heuristic => "heuristic",
            RecordStatus::Oracle => "oracle",
            RecordStatus::Error => "error",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "certified" => RecordStatus::Certified,
            "heuristic" => RecordStatus::Heuristic,
            "oracle" => RecordStatus::Oracle,
            "error" => RecordStatus::Error,
            _ => return Err(Error::Parse(format!("unknown status {s:?}"))),
        })
    }

    /// Whether the record enters averages.
    pub fn is_trusted(self) -> bool {
        matches!(self, RecordStatus::Certified | RecordStatus::Oracle)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    #[serde(with = "intstr")]
    pub a: BigInt,
    #[serde(with = "intstr")]
    pub b: BigInt,
    #[serde(with = "intstr")]
    pub c: BigInt,
    #[serde(with = "intstr")]
    pub disc: BigInt,
    pub heights: Heights,
    pub elementary_divisors: Vec<u64>,
    pub h: u64,
    pub two_rank: u32,
    pub cl2_size: u64,
    pub certification_status: RecordStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl FieldRecord {
    pub fn from_result(m: &FamilyMember, r: std::result::Result<&ClassGroupResult, &Error>) -> Self {
        let mut rec = Self {
            a: m.form.a.clone(),
            b: m.form.b.clone(),
            c: m.form.c.clone(),
            disc: m.disc.clone(),
            heights: m.heights.clone(),
            elementary_divisors: Vec::new(),
            h: 0,
            two_rank: 0,
            cl2_size: 0,
            certification_status: RecordStatus::Error,
            error: None,
        };
        match r {
            Ok(r) => {
                rec.elementary_divisors = r.elementary_divisors.clone();
                rec.h = r.h;
                rec.two_rank = r.two_rank;
                rec.cl2_size = r.cl2_size;
                rec.certification_status = r.certification.status.into();
            }
            Err(e) => rec.error = Some(e.to_string()),
        }
        rec
    }

    pub fn form(&self) -> MonicCubic {
        MonicCubic::new(self.a.clone(), self.b.clone(), self.c.clone())
    }
}

/// Flat CSV layout of [`FieldRecord`].
#[derive(Debug, Serialize, Deserialize)]
struct RecordRow {
    a: String,
    b: String,
    c: String,
    disc: String,
    height_symmetric: String,
    height_weighted_squared: String,
    height_covariant: String,
    h: u64,
    elementary_divisors: String,
    two_rank: u32,
    cl2_size: u64,
    certification_status: String,
    error: String,
}

/// Comment line opening every record CSV.
pub const RECORDS_SCHEMA: &str = "# schema: cubiclab.records/1";

fn opt_q(q: &Option<BigRational>) -> String {
    q.as_ref().map(format_rational).unwrap_or_default()
}

fn parse_opt_q(s: &str) -> Result<Option<BigRational>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_rational(s).map(Some)
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

/// Records as CSV, preceded by the schema comment.
pub fn write_records_csv<W: std::io::Write>(mut out: W, records: &[FieldRecord]) -> Result<()> {
    writeln!(out, "{RECORDS_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(RecordRow {
            a: r.a.to_string(),
            b: r.b.to_string(),
            c: r.c.to_string(),
            disc: r.disc.to_string(),
            height_symmetric: opt_q(&r.heights.symmetric),
            height_weighted_squared: opt_q(&r.heights.weighted_squared),
            height_covariant: opt_q(&r.heights.covariant),
            h: r.h,
            elementary_divisors: r
                .elementary_divisors
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            two_rank: r.two_rank,
            cl2_size: r.cl2_size,
            certification_status: r.certification_status.as_str().into(),
            error: r.error.clone().unwrap_or_default(),
        })?;
    }
    if records.is_empty() {
        w.write_record([
            "a",
            "b",
            "c",
            "disc",
            "height_symmetric",
            "height_weighted_squared",
            "height_covariant",
            "h",
            "elementary_divisors",
            "two_rank",
            "cl2_size",
            "certification_status",
            "error",
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_records_csv`].
pub fn read_records_csv<R: std::io::Read>(input: R) -> Result<Vec<FieldRecord>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        let row: RecordRow = row?;
        out.push(FieldRecord {
            a: parse_int(&row.a)?,
            b: parse_int(&row.b)?,
            c: parse_int(&row.c)?,
            disc: parse_int(&row.disc)?,
            heights: Heights {
                symmetric: parse_opt_q(&row.height_symmetric)?,
                weighted_squared: parse_opt_q(&row.height_weighted_squared)?,
                covariant: parse_opt_q(&row.height_covariant)?,
            },
            elementary_divisors: row
                .elementary_divisors
                .split(';')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad divisor {s:?}"))))
                .collect::<Result<_>>()?,
            h: row.h,
            two_rank: row.two_rank,
            cl2_size: row.cl2_size,
            certification_status: RecordStatus::parse(&row.certification_status)?,
            error: (!row.error.is_empty()).then_some(row.error),
        });
    }
    Ok(out)
}

mod opt_ratstr {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_str(&crate::exactmath::format_rational(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| crate::exactmath::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Aggregates over the certified and oracle records; `None` when there
/// are none.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyStats {
    /// All records, whatever their status.
    pub count: usize,
    /// Records entering the averages.
    pub trusted_count: usize,
    #[serde(with = "opt_ratstr")]
    pub avg_cl2: Option<BigRational>,
    #[serde(with = "opt_ratstr")]
    pub avg_cl2_sq: Option<BigRational>,
    #[serde(with = "opt_ratstr")]
    pub proportion_rank1: Option<BigRational>,
    #[serde(with = "opt_ratstr")]
    pub proportion_rank_ge1: Option<BigRational>,
    pub excluded_heuristic_count: usize,
    pub error_count: usize,
    /// No record entered the averages.
    pub empty: bool,
    /// Heuristic results were recomputed at doubled precision.
    #[serde(default)]
    pub escalated: bool,
    /// More than the tolerated share stayed heuristic after escalation.
    #[serde(default)]
    pub heuristic_share_exceeded: bool,
}

pub fn aggregate(records: &[FieldRecord]) -> FamilyStats {
    let trusted: Vec<&FieldRecord> = records
        .iter()
        .filter(|r| r.certification_status.is_trusted())
        .collect();
    let n = trusted.len();
    let ratio = |num: BigInt| (n > 0).then(|| BigRational::new(num, BigInt::from(n)));
    let sum = |f: &dyn Fn(&FieldRecord) -> BigInt| trusted.iter().map(|r| f(r)).sum::<BigInt>();
    FamilyStats {
        count: records.len(),
        trusted_count: n,
        avg_cl2: ratio(sum(&|r| BigInt::from(r.cl2_size))),
        avg_cl2_sq: ratio(sum(&|r| BigInt::from(r.cl2_size) * BigInt::from(r.cl2_size))),
        proportion_rank1: ratio(sum(&|r| BigInt::from(u8::from(r.two_rank == 1)))),
        proportion_rank_ge1: ratio(sum(&|r| BigInt::from(u8::from(r.two_rank >= 1)))),
        excluded_heuristic_count: records
            .iter()
            .filter(|r| r.certification_status == RecordStatus::Heuristic)
            .count(),
        error_count: records
            .iter()
            .filter(|r| r.certification_status == RecordStatus::Error)
            .count(),
        empty: n == 0,
        escalated: false,
        heuristic_share_exceeded: false,
    }
}

fn compute(m: &FamilyMember, config: &ClassGroupConfig) -> FieldRecord {
    let r = m.to_field(config.precision).and_then(|k| class_group(&k, config));
    FieldRecord::from_result(m, r.as_ref())
}

fn heuristic_share(records: &[FieldRecord]) -> f64 {
    let n = records
        .iter()
        .filter(|r| r.certification_status == RecordStatus::Heuristic)
        .count();
    n as f64 / records.len().max(1) as f64
}

/// Class groups of every member of the family, in enumeration order, with
/// their statistics. Per-field failures are recorded, not raised.
pub fn run_family_experiment(
    spec: &FamilySpec,
    config: &ClassGroupConfig,
) -> Result<(Vec<FieldRecord>, FamilyStats)> {
    let members = spec.members()?;
    let mut records: Vec<FieldRecord> = members.par_iter().map(|m| compute(m, config)).collect();
    let mut escalated = false;
    if heuristic_share(&records) > HEURISTIC_ESCALATION_SHARE {
        escalated = true;
        let mut hi = config.clone();
        hi.precision = config.precision.saturating_mul(2);
        hi.max_precision = config.max_precision.saturating_mul(2);
        let redo: Vec<(usize, FieldRecord)> = records
            .par_iter()
            .enumerate()
            .filter(|(_, r)| r.certification_status == RecordStatus::Heuristic)
            .map(|(i, _)| (i, compute(&members[i], &hi)))
            .collect();
        for (i, r) in redo {
            records[i] = r;
        }
    }
    let mut stats = aggregate(&records);
    stats.escalated = escalated;
    stats.heuristic_share_exceeded = heuristic_share(&records) > HEURISTIC_ESCALATION_SHARE;
    Ok((records, stats))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthCount {
    pub x: u64,
    /// Isomorphism classes with `|disc| < x` and 2-rank exactly 1.
    pub count: usize,
    /// Distinct fields with `|disc| < x` in the window.
    pub fields: usize,
    /// Fields left out because their class group stayed heuristic or failed.
    pub untrusted: usize,
}

/// Fields of 2-rank 1 and `|disc| < x` found in the family window for `x`:
/// symmetric height at most `x^(1/4)` for `+B^2_{1,1}`, covariant height at
/// most `x` for `F_1`.
pub fn growth_count(
    kind: FamilyKind,
    filter: SignatureFilter,
    x: u64,
    config: &ClassGroupConfig,
) -> Result<GrowthCount> {
    if x < 1 {
        return Err(Error::domain("growth counts need X >= 1"));
    }
    let xb = BigInt::from(x);
    let members = match kind {
        FamilyKind::B112 => {
            let cap = BigInt::from(x).nth_root(4);
            enumerate_b112(&BigRational::from_integer(cap), Ordering::Symmetric, filter)?
        }
        FamilyKind::F1 => enumerate_f1(&BigRational::from_integer(xb.clone()), filter)?,
    };
    let mut seen = BTreeSet::new();
    let mut fields: Vec<&FamilyMember> = Vec::new();
    for m in &members {
        if m.disc.magnitude() >= xb.magnitude() {
            continue;
        }
        if seen.insert(reduce_form(&BinaryCubicForm::from_monic(&m.form))?) {
            fields.push(m);
        }
    }
    let records: Vec<FieldRecord> = fields.par_iter().map(|m| compute(m, config)).collect();
    Ok(GrowthCount {
        x,
        count: records
            .iter()
            .filter(|r| r.certification_status.is_trusted() && r.two_rank == 1)
            .count(),
        fields: records.len(),
        untrusted: records
            .iter()
            .filter(|r| !r.certification_status.is_trusted())
            .count(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    #[serde(with = "intstr")]
    pub a: BigInt,
    #[serde(with = "intstr")]
    pub b: BigInt,
    #[serde(with = "intstr")]
    pub c: BigInt,
    /// Translation classes of unit monogenisers of the same field.
    pub multiplicity: usize,
    pub occurrences: usize,
    /// Translates of the polynomial with constant coefficient 1.
    pub unit_translates: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub search_bound: u64,
    pub entries: Vec<AuditEntry>,
    pub max_multiplicity: usize,
    pub max_unit_translates: usize,
}

/// Monogeniser multiplicities and unit translate counts of every sampled
/// field, failing hard when either bound is exceeded.
pub fn audit_monogenisers(sample: &[FieldRecord], search_bound: u64) -> Result<AuditReport> {
    let entries = sample
        .par_iter()
        .map(|r| {
            let f = r.form();
            let translates = unit_constant_translates(&f).len();
            if translates > 3 {
                return Err(Error::AuditFailure(format!("{f} has {translates} unit translates")));
            }
            let m = monogeniser_multiplicity(&f, search_bound)?;
            if m.count > MONOGENISER_BOUND {
                return Err(Error::AuditFailure(format!("{f} has multiplicity {}", m.count)));
            }
            Ok(AuditEntry {
                a: r.a.clone(),
                b: r.b.clone(),
                c: r.c.clone(),
                multiplicity: m.count,
                occurrences: m.occurrences,
                unit_translates: translates,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AuditReport {
        search_bound,
        max_multiplicity: entries.iter().map(|e| e.multiplicity).max().unwrap_or(0),
        max_unit_translates: entries.iter().map(|e| e.unit_translates).max().unwrap_or(0),
        entries,
    })
}

/// Records carrying only the polynomial, for audits that need no class
/// group.
pub fn bare_records(members: &[FamilyMember]) -> Vec<FieldRecord> {
    members
        .iter()
        .map(|m| FieldRecord::from_result(m, Err(&Error::domain("not computed"))))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusRow {
    pub d: i64,
    pub two_rank: u32,
}

/// Genus 2-ranks of `Q(sqrt d)` for the squarefree `d < 0` in the range.
pub fn genus_baseline(d_range: RangeInclusive<i64>) -> Result<Vec<GenusRow>> {
    let mut out = Vec::new();
    for d in d_range {
        if d >= 0 || !is_squarefree(&BigInt::from(d))? {
            continue;
        }
        out.push(GenusRow {
            d,
            two_rank: quadratic_genus_two_rank(d)?,
        });
    }
    Ok(out)
}

/// `cl2_size` re-derived from the 2-rank; used to check records.
pub fn cl2_from_rank(two_rank: u32) -> u64 {
    1u64 << two_rank
}
