//! Published constants shipped with the crate and comparison against them.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assemble::Pair;
use crate::patchgen::Family;

use super::{BenchError, ResultTable, TableId};

/// Relative tolerance of `exact-geometry` cells.
pub const EXACT_TOL: f64 = 0.05;

const HEADER: [&str; 7] = ["source", "family", "h", "r", "pair", "beta", "class"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceClass {
    /// The mesh is fully determined; values must agree within [`EXACT_TOL`].
    ExactGeometry,
    /// The mesh is a reconstruction; values are reported only.
    Reconstructed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCell {
    /// Table, row and column the value was transcribed from.
    pub source: String,
    pub family: String,
    pub h: f64,
    pub r: u32,
    pub pair: String,
    pub beta: f64,
    pub class: ToleranceClass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    pub cells: Vec<ReferenceCell>,
}

impl Reference {
    pub fn parse(text: &str) -> Result<Reference, BenchError> {
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header != HEADER {
            return Err(BenchError::SchemaMismatch(format!("reference columns {header:?}, expected {HEADER:?}")));
        }
        let cells = reader
            .deserialize()
            .collect::<Result<Vec<ReferenceCell>, _>>()
            .map_err(|e| BenchError::SchemaMismatch(e.to_string()))?;
        Ok(Reference { cells })
    }

    pub fn load(path: &Path) -> Result<Reference, BenchError> {
        Reference::parse(&std::fs::read_to_string(path)?)
    }

    /// The reference shipped for a table preset; `None` for `custom`.
    pub fn builtin(table: TableId) -> Option<Reference> {
        let text = match table {
            TableId::Table1 => include_str!("../../reference/table1.csv"),
            TableId::Table2 => include_str!("../../reference/table2.csv"),
            TableId::LShape => include_str!("../../reference/lshape.csv"),
            TableId::Table4 => include_str!("../../reference/table4.csv"),
            TableId::TriGood => include_str!("../../reference/tri_good.csv"),
            TableId::TriBad => include_str!("../../reference/tri_bad.csv"),
            TableId::Custom => return None,
        };
        Some(Reference::parse(text).expect("shipped reference parses"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Reconstructed geometry; reported only.
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffRow {
    pub source: String,
    pub family: Family,
    pub h: f64,
    pub r: u32,
    pub reference: f64,
    pub computed: f64,
    pub rel_error: f64,
    pub class: ToleranceClass,
    pub verdict: Verdict,
}

impl fmt::Display for DiffRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<24} {:<22} h={:<6e} r={} reference {:>10.4e} computed {:>10.4e} rel.err {:>8.2e} {}",
            self.source, self.family, self.h, self.r, self.reference, self.computed, self.rel_error, self.verdict
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffReport {
    pub rows: Vec<DiffRow>,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &DiffRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }
}

/// Matches computed cells to reference cells by `(family, h, r, pair)`.
/// Reference cells without a computed counterpart are skipped; an empty
/// intersection is a schema mismatch.
pub fn compare_to_reference(result: &ResultTable, reference: &Reference) -> Result<DiffReport, BenchError> {
    let mut rows = Vec::new();
    for cell in &reference.cells {
        let family: Family = cell
            .family
            .parse()
            .map_err(|_| BenchError::SchemaMismatch(format!("unknown family `{}` in reference", cell.family)))?;
        let pair: Pair = cell
            .pair
            .parse()
            .map_err(|_| BenchError::SchemaMismatch(format!("unknown pair `{}` in reference", cell.pair)))?;
        let Some(row) = result
            .rows
            .iter()
            .find(|row| row.family == family && row.r == cell.r && row.pair == pair && same_h(row.h, cell.h))
        else {
            continue;
        };
        let rel_error = (row.beta - cell.beta).abs() / cell.beta.abs();
        let verdict = match cell.class {
            ToleranceClass::Reconstructed => Verdict::Info,
            ToleranceClass::ExactGeometry if rel_error <= EXACT_TOL => Verdict::Pass,
            ToleranceClass::ExactGeometry => Verdict::Fail,
        };
        rows.push(DiffRow {
            source: cell.source.clone(),
            family,
            h: cell.h,
            r: cell.r,
            reference: cell.beta,
            computed: row.beta,
            rel_error,
            class: cell.class,
            verdict,
        });
    }
    if rows.is_empty() {
        return Err(BenchError::SchemaMismatch("no computed cell matches the reference".into()));
    }
    Ok(DiffReport { rows })
}

fn same_h(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{run_experiment, ExperimentConfig};

    #[test]
    fn shipped_references_parse() {
        for t in TableId::ALL {
            if let Some(r) = Reference::builtin(t) {
                assert!(!r.cells.is_empty(), "{t}");
                for c in &r.cells {
                    assert!(c.family.parse::<Family>().is_ok());
                    assert!(c.beta > 0.0);
                }
            }
        }
        assert_eq!(Reference::builtin(TableId::Table1).unwrap().cells.len(), 20);
        assert_eq!(Reference::builtin(TableId::Table4).unwrap().cells.len(), 12);
    }

    #[test]
    fn tampered_reference_fails() {
        let result = run_experiment(&ExperimentConfig::single(Family::EdgeD, &[1e-2])).unwrap();
        let good = Reference::parse("source,family,h,r,pair,beta,class\nt,EdgeD,1e-2,0,q2q1,0.256,exact-geometry\n").unwrap();
        assert!(compare_to_reference(&result, &good).unwrap().passed());
        let bad = Reference::parse("source,family,h,r,pair,beta,class\nt,EdgeD,1e-2,0,q2q1,0.356,exact-geometry\n").unwrap();
        let report = compare_to_reference(&result, &bad).unwrap();
        assert!(!report.passed());
        assert_eq!(report.failures().count(), 1);
        let info = Reference::parse("source,family,h,r,pair,beta,class\nt,EdgeD,1e-2,0,q2q1,0.356,reconstructed\n").unwrap();
        assert!(compare_to_reference(&result, &info).unwrap().passed());
    }

    #[test]
    fn schema_mismatch() {
        let result = run_experiment(&ExperimentConfig::single(Family::EdgeD, &[1e-2])).unwrap();
        let other = Reference::parse("source,family,h,r,pair,beta,class\nt,EdgeF,1e-2,0,q2q1,0.477,exact-geometry\n").unwrap();
        assert!(matches!(compare_to_reference(&result, &other), Err(BenchError::SchemaMismatch(_))));
        assert!(matches!(Reference::parse("family,h,beta\nEdgeD,1e-2,0.256\n"), Err(BenchError::SchemaMismatch(_))));
        assert!(matches!(
            Reference::parse("source,family,h,r,pair,beta,class\nt,EdgeD,1e-2,0,q2q1,0.2,approximate\n"),
            Err(BenchError::SchemaMismatch(_))
        ));
    }
}
