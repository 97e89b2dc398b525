//! Reference tables of known class groups, as CSV with header
//! `a,b,c,disc,h,divisors` (divisors separated by `;`).

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use serde::Serialize;

use crate::classgroup::is_divisibility_chain;
use crate::cubicforms::{reduce_form, BinaryCubicForm, MonicCubic};
use crate::{Error, Result};

pub const REFERENCE_HEADER: [&str; 6] = ["a", "b", "c", "disc", "h", "divisors"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReferenceRow {
    pub form: MonicCubic,
    #[serde(with = "crate::exactmath::intstr")]
    pub disc: BigInt,
    pub h: u64,
    pub elementary_divisors: Vec<u64>,
}

#[derive(Clone, Debug, Default)]
pub struct ReferenceTable {
    /// Valid rows keyed by the reduced form of their field.
    pub rows: BTreeMap<BinaryCubicForm, ReferenceRow>,
    /// `(line, reason)` for every rejected row.
    pub rejected: Vec<(u64, String)>,
    pub warnings: Vec<String>,
}

impl ReferenceTable {
    pub fn lookup(&self, f: &MonicCubic) -> Result<Option<&ReferenceRow>> {
        Ok(self.rows.get(&reduce_form(&BinaryCubicForm::from_monic(f))?))
    }
}

fn parse_row(rec: &csv::StringRecord) -> std::result::Result<ReferenceRow, String> {
    if rec.len() != REFERENCE_HEADER.len() {
        return Err(format!("expected 6 fields, found {}", rec.len()));
    }
    let int = |i: usize| -> std::result::Result<BigInt, String> {
        rec[i]
            .trim()
            .parse()
            .map_err(|_| format!("{} is not an integer: {:?}", REFERENCE_HEADER[i], &rec[i]))
    };
    let form = MonicCubic::new(int(0)?, int(1)?, int(2)?);
    let disc = int(3)?;
    let h: u64 = rec[4]
        .trim()
        .parse()
        .map_err(|_| format!("h is not a positive integer: {:?}", &rec[4]))?;
    let divisors = rec[5]
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| format!("bad divisor {s:?}")))
        .collect::<std::result::Result<Vec<u64>, String>>()?;
    let actual = form.discriminant();
    if actual != disc {
        return Err(format!("disc {disc} does not match {form}, whose discriminant is {actual}"));
    }
    if !form.is_irreducible() {
        return Err(format!("{form} is reducible"));
    }
    if !divisors.is_empty() && !is_divisibility_chain(&divisors) {
        return Err(format!("divisors {divisors:?} do not form a divisibility chain"));
    }
    if h == 0 || divisors.iter().product::<u64>() != h {
        return Err(format!("divisors {divisors:?} do not multiply to h = {h}"));
    }
    Ok(ReferenceRow {
        form,
        disc,
        h,
        elementary_divisors: divisors,
    })
}

/// Reads and validates a reference table. Bad rows are collected with
/// their line numbers; a bad header is an error.
pub fn ingest_reference(path: &Path) -> Result<ReferenceTable> {
    let text = std::fs::read_to_string(path)?;
    ingest_reference_str(&text)
}

pub fn ingest_reference_str(text: &str) -> Result<ReferenceTable> {
    let mut table = ReferenceTable::default();
    if text.trim().is_empty() {
        table.warnings.push("reference table is empty".into());
        return Ok(table);
    }
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if header != REFERENCE_HEADER {
        return Err(Error::Parse(format!(
            "reference header must be {}, found {}",
            REFERENCE_HEADER.join(","),
            header.join(",")
        )));
    }
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        match parse_row(&rec) {
            Ok(row) => {
                let key = match reduce_form(&BinaryCubicForm::from_monic(&row.form)) {
                    Ok(k) => k,
                    Err(e) => {
                        table.rejected.push((line, e.to_string()));
                        continue;
                    }
                };
                if let Some(prev) = table.rows.get(&key) {
                    if prev.elementary_divisors != row.elementary_divisors {
                        table
                            .rejected
                            .push((line, format!("contradicts the earlier row for {}", prev.form)));
                    }
                    continue;
                }
                table.rows.insert(key, row);
            }
            Err(reason) => table.rejected.push((line, reason)),
        }
    }
    if table.rows.is_empty() {
        table.warnings.push("reference table has no valid rows".into());
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_rows() {
        let t = ingest_reference_str(
            "a,b,c,disc,h,divisors\n0,-1,-1,-23,1,\n0,4,-1,-283,2,2\n0,1,-1,-30,1,\n0,-3,1,81,2,3\n",
        )
        .unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rejected.len(), 2);
        assert_eq!(t.rejected[0].0, 4);
        assert!(t.rejected[1].1.contains("multiply"));
        let r = t.lookup(&MonicCubic::new(0, 4, -1)).unwrap().unwrap();
        assert_eq!(r.elementary_divisors, vec![2]);
    }

    #[test]
    fn empty_and_bad_header() {
        let t = ingest_reference_str("").unwrap();
        assert!(t.rows.is_empty() && !t.warnings.is_empty());
        assert!(ingest_reference_str("a,b,c,h\n").is_err());
    }
}
