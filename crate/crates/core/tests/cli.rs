use std::path::Path;

use cubiclab::cli::{run, EXIT_INFEASIBLE, EXIT_OK, EXIT_REFERENCE_MISMATCH, EXIT_USAGE};
use cubiclab::experiments::{aggregate, read_records_csv, FamilyStats};
use cubiclab::families::{FamilyKind, FamilySpec, Ordering, SignatureFilter};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn cubiclab(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("cubiclab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("bad JSON ({e}): {s}"))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cubiclab(&[]).code, EXIT_USAGE);
    assert_eq!(cubiclab(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(cubiclab(&["classgroup", "--poly", "1,2"]).code, EXIT_USAGE);
    assert_eq!(cubiclab(&["classgroup", "--poly", "1,x,2"]).code, EXIT_USAGE);
    let reducible = cubiclab(&["classgroup", "--poly", "0,0,-1"]);
    assert_eq!(reducible.code, EXIT_USAGE);
    assert!(reducible.err.contains("reducible"), "{}", reducible.err);
    assert_eq!(cubiclab(&["genus", "--lo", "5", "--hi", "9"]).code, EXIT_USAGE);
    let f1_audit = ["audit-monogenisers", "--family", "f1", "--cap", "10", "--search-bound", "5"];
    assert_eq!(cubiclab(&f1_audit).code, EXIT_USAGE);
    assert_eq!(cubiclab(&["moments", "--m1", "1/0", "--m2", "3"]).code, EXIT_USAGE);
}

#[test]
fn help_and_version_exit_0() {
    let v = cubiclab(&["--version"]);
    assert_eq!(v.code, EXIT_OK);
    assert!(v.out.contains(env!("CARGO_PKG_VERSION")));
    assert_eq!(cubiclab(&["classgroup", "--help"]).code, EXIT_OK);
}

#[test]
fn classgroup_reports_divisors() {
    let r = cubiclab(&["classgroup", "--poly", "0,4,-1"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v = json(&r.out);
    assert_eq!(v["schema"], "cubiclab.classgroup/1");
    assert_eq!(v["disc"], "-283");
    assert_eq!(v["elementary_divisors"], serde_json::json!([2]));
    let oracle = json(&cubiclab(&["classgroup", "--poly", "0,4,-1", "--oracle"]).out);
    assert_eq!(oracle["elementary_divisors"], v["elementary_divisors"]);
}

#[test]
fn cache_round_trip_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let args = ["classgroup", "--poly", "1,-2,-1", "--cache", path_str(&cache)];
    let first = cubiclab(&args);
    assert_eq!(first.code, EXIT_OK, "{}", first.err);
    assert!(cache.exists());
    let second = cubiclab(&args);
    assert_eq!(second.code, EXIT_OK, "{}", second.err);
    assert_eq!(first.out, second.out);
    // another polynomial for the same field hits the same entry
    let translate = cubiclab(&["classgroup", "--poly", "5,6,1", "--cache", path_str(&cache)]);
    let (a, b) = (json(&first.out), json(&translate.out));
    assert_eq!(a["elementary_divisors"], b["elementary_divisors"]);
    assert_eq!(a["disc"], b["disc"]);
}

#[test]
fn reference_tables_are_checked() {
    let dir = tempfile::tempdir().unwrap();
    let good = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/reference.csv");
    let ok = cubiclab(&["classgroup", "--poly", "0,4,-1", "--reference", path_str(&good)]);
    assert_eq!(ok.code, EXIT_OK, "{}", ok.err);

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b,c,disc,h,divisors\n0,4,-1,-283,1,\n").unwrap();
    let mismatch = cubiclab(&["classgroup", "--poly", "0,4,-1", "--reference", path_str(&bad)]);
    assert_eq!(mismatch.code, EXIT_REFERENCE_MISMATCH);
    assert!(mismatch.err.contains("reference"), "{}", mismatch.err);

    let missing = cubiclab(&["classgroup", "--poly", "0,1,-1", "--reference", path_str(&bad)]);
    assert_eq!(missing.code, EXIT_OK);
    assert!(missing.err.contains("no reference row"), "{}", missing.err);
}

#[test]
fn moments_exit_codes_follow_the_verdict() {
    let infeasible = cubiclab(&["moments", "--exclude", "1", "--m1", "3/2", "--m2", "3"]);
    assert_eq!(infeasible.code, EXIT_INFEASIBLE);
    assert_eq!(json(&infeasible.out)["verdict"], "infeasible");
    let feasible = cubiclab(&["moments", "--exclude", "1", "--m1", "2", "--m2", "6"]);
    assert_eq!(feasible.code, EXIT_OK, "{}", feasible.err);
    assert_eq!(json(&feasible.out)["verdict"], "feasible");
}

#[test]
fn enumerate_lists_every_member() {
    let r = cubiclab(&["enumerate", "--family", "b112", "--cap", "12", "--signature", "both"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let mut lines = r.out.lines();
    assert_eq!(lines.next(), Some("# schema: cubiclab.enumerate/1"));
    assert!(lines.next().unwrap().starts_with("a,b,c,disc"));
    let spec = FamilySpec::new(
        FamilyKind::B112,
        SignatureFilter::Both,
        Ordering::Symmetric,
        BigRational::from_integer(BigInt::from(12)),
    )
    .unwrap();
    assert_eq!(lines.count(), spec.members().unwrap().len());
}

#[test]
fn experiments_are_deterministic_and_stats_recompute() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run_id in 0..2 {
        let csv = dir.path().join(format!("records{run_id}.csv"));
        let stats = dir.path().join(format!("stats{run_id}.json"));
        let r = cubiclab(&[
            "experiment",
            "--family",
            "b112",
            "--cap",
            "15",
            "--seed",
            "7",
            "--out",
            path_str(&csv),
            "--stats",
            path_str(&stats),
        ]);
        assert_eq!(r.code, EXIT_OK, "{}", r.err);
        outputs.push((std::fs::read_to_string(&csv).unwrap(), std::fs::read_to_string(&stats).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);

    let (csv, stats) = &outputs[0];
    let records = read_records_csv(csv.as_bytes()).unwrap();
    assert!(!records.is_empty());
    let written: FamilyStats = serde_json::from_value(json(stats)).unwrap();
    let recomputed = aggregate(&records);
    assert_eq!(written.count, recomputed.count);
    assert_eq!(written.trusted_count, recomputed.trusted_count);
    assert_eq!(written.avg_cl2, recomputed.avg_cl2);
    assert_eq!(written.avg_cl2_sq, recomputed.avg_cl2_sq);
    assert_eq!(written.proportion_rank1, recomputed.proportion_rank1);
    assert_eq!(written.proportion_rank_ge1, recomputed.proportion_rank_ge1);
}

#[test]
fn audit_and_genus_emit_json() {
    let audit = cubiclab(&["audit-monogenisers", "--family", "b112", "--cap", "10", "--search-bound", "10"]);
    assert_eq!(audit.code, EXIT_OK, "{}", audit.err);
    let v = json(&audit.out);
    assert!(v["max_unit_translates"].as_u64().unwrap() <= 3);
    assert!(v["entries"].as_array().is_some_and(|e| !e.is_empty()));

    let genus = cubiclab(&["genus", "--lo", "-20", "--hi", "-1"]);
    assert_eq!(genus.code, EXIT_OK, "{}", genus.err);
    assert!(!json(&genus.out)["rows"].as_array().unwrap().is_empty());
}
