//! Batch command line front end.
//!
//! Exit codes: 0 success or feasible, 1 infeasible, 2 usage or input
//! error, 3 reference mismatch, 4 audit failure, 5 runtime failure.

mod cache;
mod reference;

pub use cache::{cache_key, config_hash, toolchain, Cache, CacheEntry, CACHE_SCHEMA};
pub use reference::{ingest_reference, ingest_reference_str, ReferenceRow, ReferenceTable, REFERENCE_HEADER};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::classgroup::{class_group, class_group_oracle, ClassGroupConfig, ClassGroupResult};
use crate::cubicforms::MonicCubic;
use crate::exactmath::parse_rational;
use crate::experiments::{audit_monogenisers, bare_records, genus_baseline, run_family_experiment, write_records_csv};
use crate::families::{FamilyKind, FamilySpec, Ordering, SignatureFilter};
use crate::moments::{is_feasible, min_mass_at, MomentProblem, Verdict, DEFAULT_TRUNCATION};
use crate::numberfield::make_field;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFERENCE_MISMATCH: i32 = 3;
pub const EXIT_AUDIT_FAILURE: i32 = 4;
pub const EXIT_RUNTIME: i32 = 5;

/// Comment line opening every enumeration CSV.
pub const ENUMERATE_SCHEMA: &str = "# schema: cubiclab.enumerate/1";
pub const CLASSGROUP_SCHEMA: &str = "cubiclab.classgroup/1";
pub const STATS_SCHEMA: &str = "cubiclab.stats/1";
pub const MOMENTS_SCHEMA: &str = "cubiclab.moments/1";
pub const AUDIT_SCHEMA: &str = "cubiclab.audit/1";
pub const GENUS_SCHEMA: &str = "cubiclab.genus/1";

#[derive(Parser, Debug)]
#[command(name = "cubiclab", version, about = "Unit-monogenised cubic fields and their class groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_parser = parse_kind)]
    family: FamilyKind,
    /// symmetric or weighted for b112, covariant for f1 (the default for each).
    #[arg(long, value_parser = parse_ordering)]
    ordering: Option<Ordering>,
    /// Height cap, an integer or P/Q.
    #[arg(long, value_parser = parse_q)]
    cap: BigRational,
    #[arg(long, value_parser = parse_signature, default_value = "real")]
    signature: SignatureFilter,
}

impl FamilyArgs {
    fn spec(&self) -> crate::Result<FamilySpec> {
        let ordering = self.ordering.unwrap_or(match self.family {
            FamilyKind::B112 => Ordering::Symmetric,
            FamilyKind::F1 => Ordering::Covariant,
        });
        FamilySpec::new(self.family, self.signature, ordering, self.cap.clone())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List family members as CSV.
    Enumerate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Class group of the field of x^3 + a x^2 + b x + c, as JSON.
    Classgroup {
        /// Coefficients a,b,c.
        #[arg(long, value_parser = parse_poly, allow_hyphen_values = true)]
        poly: MonicCubic,
        /// Use the exhaustive oracle instead of relation search.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Class groups of a whole family: record CSV plus statistics JSON.
    Experiment {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        stats: PathBuf,
        /// Record CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Feasibility of a |Cl[2]| moment vector, with certificate.
    Moments {
        #[arg(long, default_value_t = 0)]
        min_exp: u32,
        /// Comma separated exponents removed from the support.
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<u32>,
        #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
        m1: BigRational,
        #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
        m2: BigRational,
        /// Also minimise the mass at this exponent.
        #[arg(long)]
        min_mass_at: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: u32,
    },
    /// Monogeniser multiplicities and unit translates over a family.
    AuditMonogenisers {
        #[arg(long, value_parser = parse_kind)]
        family: FamilyKind,
        #[arg(long, value_parser = parse_q)]
        cap: BigRational,
        #[arg(long)]
        search_bound: u64,
        #[arg(long, value_parser = parse_signature, default_value = "both")]
        signature: SignatureFilter,
    },
    /// Genus 2-ranks of imaginary quadratic fields Q(sqrt d), lo <= d <= hi.
    Genus {
        #[arg(long, allow_hyphen_values = true, default_value_t = -200)]
        lo: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -1)]
        hi: i64,
    },
}

fn parse_kind(s: &str) -> std::result::Result<FamilyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_ordering(s: &str) -> std::result::Result<Ordering, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_signature(s: &str) -> std::result::Result<SignatureFilter, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_q(s: &str) -> std::result::Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_poly(s: &str) -> std::result::Result<MonicCubic, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected a,b,c, got {s:?}"));
    }
    let c: Vec<BigInt> = parts
        .iter()
        .map(|p| p.parse().map_err(|_| format!("{p:?} is not an integer")))
        .collect::<std::result::Result<_, _>>()?;
    Ok(MonicCubic::new(c[0].clone(), c[1].clone(), c[2].clone()))
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Parse(_) => EXIT_USAGE,
            Error::ReferenceMismatch(_) => EXIT_REFERENCE_MISMATCH,
            Error::AuditFailure(_) => EXIT_AUDIT_FAILURE,
            Error::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_RUNTIME,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::result::Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let res = match cli.cmd {
        Command::Enumerate { family, out: path } => cmd_enumerate(&family, path, out),
        Command::Classgroup {
            poly,
            oracle,
            cache,
            reference,
            seed,
        } => cmd_classgroup(&poly, oracle, cache, reference, seed, out, err),
        Command::Experiment {
            family,
            seed,
            stats,
            out: path,
        } => cmd_experiment(&family, seed, stats, path, out, err),
        Command::Moments {
            min_exp,
            exclude,
            m1,
            m2,
            min_mass_at,
            truncation,
        } => cmd_moments(min_exp, exclude, m1, m2, min_mass_at, truncation, out),
        Command::AuditMonogenisers {
            family,
            cap,
            search_bound,
            signature,
        } => cmd_audit(family, cap, search_bound, signature, out),
        Command::Genus { lo, hi } => cmd_genus(lo, hi, out),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "cubiclab: {}", f.msg);
            f.code
        }
    }
}

fn open_out(path: Option<PathBuf>, out: &mut dyn Write) -> std::result::Result<Box<dyn Write + '_>, Failure> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(out),
    })
}

fn cmd_enumerate(family: &FamilyArgs, path: Option<PathBuf>, out: &mut dyn Write) -> CmdResult {
    let spec = family.spec()?;
    let members = spec.members()?;
    let mut sink = open_out(path, out)?;
    writeln!(sink, "{ENUMERATE_SCHEMA}")?;
    writeln!(sink, "a,b,c,disc,height_symmetric,height_weighted,height_covariant")?;
    for m in &members {
        let q = |x: &Option<BigRational>| x.as_ref().map(crate::exactmath::format_rational).unwrap_or_default();
        let weighted = m.heights.weighted().map(|w| format!("{w:.6}")).unwrap_or_default();
        writeln!(
            sink,
            "{},{},{},{},{},{},{}",
            m.form.a,
            m.form.b,
            m.form.c,
            m.disc,
            q(&m.heights.symmetric),
            weighted,
            q(&m.heights.covariant)
        )?;
    }
    sink.flush()?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ClassGroupOutput<'a> {
    schema: &'static str,
    poly: [String; 3],
    disc: String,
    #[serde(flatten)]
    result: &'a ClassGroupResult,
}

fn cmd_classgroup(
    poly: &MonicCubic,
    oracle: bool,
    cache: Option<PathBuf>,
    reference: Option<PathBuf>,
    seed: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    if !poly.is_irreducible() {
        return Err(Error::domain(format!("{poly} is reducible over Q")).into());
    }
    let mut config = ClassGroupConfig::from_env()?;
    config.seed = seed;
    let k = make_field(poly, config.precision)?;
    let key = cache_key(&k.reduced_form);
    let hash = config_hash(&config, oracle);
    let mut store = cache.as_deref().map(Cache::open).transpose()?;
    let cached = store.as_ref().and_then(|c| c.get(&key, &hash)).cloned();
    let result = match cached {
        Some(r) => r,
        None => {
            let r = if oracle {
                class_group_oracle(&k)?
            } else {
                class_group(&k, &config)?
            };
            if let Some(s) = store.as_mut() {
                s.put(&key, &hash, &r)?;
            }
            r
        }
    };
    emit_json(
        out,
        &ClassGroupOutput {
            schema: CLASSGROUP_SCHEMA,
            poly: [poly.a.to_string(), poly.b.to_string(), poly.c.to_string()],
            disc: k.disc.to_string(),
            result: &result,
        },
    )?;
    if let Some(path) = reference {
        let table = ingest_reference(&path)?;
        for (line, reason) in &table.rejected {
            writeln!(err, "cubiclab: {}:{line}: rejected: {reason}", path.display())?;
        }
        for w in &table.warnings {
            writeln!(err, "cubiclab: warning: {w}")?;
        }
        match table.lookup(poly)? {
            Some(row) if row.elementary_divisors != result.elementary_divisors => {
                return Err(Error::ReferenceMismatch(format!(
                    "{poly}: computed divisors {:?}, reference row {} has {:?}",
                    result.elementary_divisors, row.form, row.elementary_divisors
                ))
                .into());
            }
            Some(_) => {}
            None => writeln!(err, "cubiclab: warning: no reference row for {poly}")?,
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct StatsOutput<'a> {
    schema: &'static str,
    spec: &'a FamilySpec,
    seed: u64,
    #[serde(flatten)]
    stats: &'a crate::experiments::FamilyStats,
}

fn cmd_experiment(
    family: &FamilyArgs,
    seed: u64,
    stats_path: PathBuf,
    path: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let spec = family.spec()?;
    let mut config = ClassGroupConfig::from_env()?;
    config.seed = seed;
    let (records, stats) = run_family_experiment(&spec, &config)?;
    let mut sink = open_out(path, out)?;
    write_records_csv(&mut sink, &records)?;
    sink.flush()?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(&stats_path)?);
    emit_json(
        &mut f,
        &StatsOutput {
            schema: STATS_SCHEMA,
            spec: &spec,
            seed,
            stats: &stats,
        },
    )?;
    f.flush()?;
    if stats.heuristic_share_exceeded {
        writeln!(
            err,
            "cubiclab: warning: {} of {} class groups remain heuristic after raising the precision",
            stats.excluded_heuristic_count, stats.count
        )?;
    }
    if stats.error_count > 0 {
        writeln!(err, "cubiclab: warning: {} fields failed", stats.error_count)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    schema: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

fn cmd_moments(
    min_exp: u32,
    exclude: Vec<u32>,
    m1: BigRational,
    m2: BigRational,
    min_mass: Option<u32>,
    truncation: u32,
    out: &mut dyn Write,
) -> CmdResult {
    let problem = MomentProblem::new(min_exp, exclude, m1, m2)?;
    let Some(target) = min_mass else {
        let cert = is_feasible(&problem);
        emit_json(out, &Tagged { schema: MOMENTS_SCHEMA, body: &cert })?;
        return Ok(match cert.verdict {
            Verdict::Feasible => EXIT_OK,
            Verdict::Infeasible => EXIT_INFEASIBLE,
        });
    };
    match min_mass_at(&problem, target, truncation) {
        Ok(cert) => {
            emit_json(out, &Tagged { schema: MOMENTS_SCHEMA, body: &cert })?;
            Ok(EXIT_OK)
        }
        Err(Error::Infeasible(cert)) => {
            emit_json(out, &Tagged { schema: MOMENTS_SCHEMA, body: &*cert })?;
            Ok(EXIT_INFEASIBLE)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_audit(
    family: FamilyKind,
    cap: BigRational,
    search_bound: u64,
    signature: SignatureFilter,
    out: &mut dyn Write,
) -> CmdResult {
    if family != FamilyKind::B112 {
        return Err(Error::domain("monogeniser audits run over the b112 family").into());
    }
    let spec = FamilySpec::new(family, signature, Ordering::Symmetric, cap)?;
    let members = spec.members()?;
    let report = audit_monogenisers(&bare_records(&members), search_bound)?;
    emit_json(out, &Tagged { schema: AUDIT_SCHEMA, body: &report })?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct GenusOutput {
    schema: &'static str,
    rows: Vec<crate::experiments::GenusRow>,
}

fn cmd_genus(lo: i64, hi: i64, out: &mut dyn Write) -> CmdResult {
    if lo > hi || hi >= 0 {
        return Err(Error::domain("need lo <= hi < 0").into());
    }
    let rows = genus_baseline(lo..=hi)?;
    emit_json(out, &GenusOutput { schema: GENUS_SCHEMA, rows })?;
    Ok(EXIT_OK)
}
