//! Running a grid of `(family, h, r)` cells and writing the result table.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::assemble::{assemble_saddle, build_dofmap, Pair};
use crate::patchgen::{build_patch, Family, PatchSpec};
use crate::spectra::{compute_infsup, fit_decay};

use super::{BenchError, ExperimentConfig, TableId};

/// One computed cell. A failed cell has `beta = NaN` and a `note`.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub family: Family,
    pub h: f64,
    pub r: u32,
    pub pair: Pair,
    pub beta: f64,
    pub residual: f64,
    /// Seconds spent on the cell. Not written to CSV, which stays reproducible.
    pub wall_time: f64,
    pub note: String,
}

impl Row {
    pub fn ok(&self) -> bool {
        self.note.is_empty()
    }
}

/// Decay exponent of one column (fixed family and `r`, varying `h`).
#[derive(Clone, Debug, PartialEq)]
pub struct Footer {
    pub family: Family,
    pub r: u32,
    /// `Err` with a reason when the fit is not possible.
    pub exponent: Result<f64, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub table: TableId,
    pub seed: u64,
    /// In `(family, h, r)` order, families in configuration order, `h`
    /// descending, `r` ascending.
    pub rows: Vec<Row>,
    pub footers: Vec<Footer>,
}

impl ResultTable {
    pub fn get(&self, family: Family, h: f64, r: u32) -> Option<&Row> {
        self.rows.iter().find(|row| row.family == family && row.h == h && row.r == r)
    }

    /// `beta` of the cell, NaN when absent or failed.
    pub fn beta(&self, family: Family, h: f64, r: u32) -> f64 {
        self.get(family, h, r).map_or(f64::NAN, |row| row.beta)
    }

    pub fn footer(&self, family: Family, r: u32) -> Option<&Footer> {
        self.footers.iter().find(|f| f.family == family && f.r == r)
    }

    pub fn to_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["family", "h", "r", "pair", "beta", "residual", "note"])?;
        for row in &self.rows {
            w.write_record([
                row.family.name().to_string(),
                format!("{:e}", row.h),
                row.r.to_string(),
                row.pair.name().to_string(),
                format!("{:.10e}", row.beta),
                format!("{:.3e}", row.residual),
                row.note.clone(),
            ])?;
        }
        let mut out = String::from_utf8(w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?)
            .expect("csv output is utf-8");
        for f in &self.footers {
            let value = match &f.exponent {
                Ok(e) => format!("{e:.4}"),
                Err(why) => format!("NaN ({why})"),
            };
            let _ = writeln!(out, "# decay exponent {} r={}: {}", f.family, f.r, value);
        }
        Ok(out)
    }

    /// The table laid out with one row per `h` (or per `r` when `h` is fixed)
    /// and one column per family.
    pub fn to_markdown(&self) -> String {
        let mut families: Vec<Family> = Vec::new();
        let mut hs: Vec<f64> = Vec::new();
        let mut rs: Vec<u32> = Vec::new();
        for row in &self.rows {
            if !families.contains(&row.family) {
                families.push(row.family);
            }
            if !hs.contains(&row.h) {
                hs.push(row.h);
            }
            if !rs.contains(&row.r) {
                rs.push(row.r);
            }
        }
        rs.sort_unstable();
        let by_r = hs.len() == 1 && rs.len() > 1;

        let mut out = format!("Table `{}`\n\n", self.table);
        let key = if by_r { "r" } else { "h" };
        let _ = write!(out, "| {key} |");
        let mut columns: Vec<(Family, Option<u32>)> = Vec::new();
        for &f in &families {
            if by_r {
                columns.push((f, None));
                let _ = write!(out, " {f} |");
            } else {
                let mut frs: Vec<u32> = self.rows.iter().filter(|row| row.family == f).map(|row| row.r).collect();
                frs.sort_unstable();
                frs.dedup();
                for r in frs {
                    columns.push((f, Some(r)));
                    if rs.len() > 1 {
                        let _ = write!(out, " {f} r={r} |");
                    } else {
                        let _ = write!(out, " {f} |");
                    }
                }
            }
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(columns.len()));
        out.push('\n');

        let cell = |row: Option<&Row>| match row {
            Some(row) if row.ok() => format_beta(row.beta),
            Some(_) => "NaN".to_string(),
            None => String::new(),
        };
        if by_r {
            for &r in &rs {
                let _ = write!(out, "| {r} |");
                for &(f, _) in &columns {
                    let _ = write!(out, " {} |", cell(self.get(f, hs[0], r)));
                }
                out.push('\n');
            }
        } else {
            for &h in &hs {
                let _ = write!(out, "| {h:e} |");
                for &(f, r) in &columns {
                    let _ = write!(out, " {} |", cell(self.get(f, h, r.unwrap_or(0))));
                }
                out.push('\n');
            }
            out.push_str("| decay exponent |");
            for &(f, r) in &columns {
                let value = match self.footer(f, r.unwrap_or(0)).map(|x| &x.exponent) {
                    Some(Ok(e)) => format!("{e:.2}"),
                    _ => "-".to_string(),
                };
                let _ = write!(out, " {value} |");
            }
            out.push('\n');
        }
        let failed: Vec<&Row> = self.rows.iter().filter(|row| !row.ok()).collect();
        if !failed.is_empty() {
            out.push('\n');
            for row in failed {
                let _ = writeln!(out, "- {} h={:e} r={}: {}", row.family, row.h, row.r, row.note);
            }
        }
        out
    }
}

/// Three significant digits below 0.1, four above, as in printed tables.
fn format_beta(beta: f64) -> String {
    if beta < 0.1 {
        format!("{beta:.2e}")
    } else {
        format!("{beta:.4}")
    }
}

/// The mesh of one cell, triangulated when a quadrilateral family is run with `P2P1`.
pub fn cell_spec(family: Family, h: f64, r: Option<u32>, pair: Option<Pair>) -> PatchSpec {
    let mut spec = PatchSpec::new(family, h);
    if let Some(r) = r {
        spec = spec.with_refinement(r);
    }
    if pair == Some(Pair::P2P1) {
        spec = spec.with_triangulation(true);
    }
    spec
}

fn run_cell(spec: PatchSpec, k: usize) -> Row {
    let start = Instant::now();
    let pair = if spec.triangulated { Pair::P2P1 } else { Pair::Q2Q1 };
    let result = (|| -> Result<(f64, f64), BenchError> {
        let mesh = build_patch(&spec)?;
        let dofs = build_dofmap(&mesh, pair)?;
        let saddle = assemble_saddle(&mesh, &dofs)?;
        let res = compute_infsup(&saddle, k)?;
        Ok((res.beta, res.residual))
    })();
    let (beta, residual, note) = match result {
        Ok((b, res)) => (b, res, String::new()),
        Err(e) => (f64::NAN, f64::NAN, e.to_string()),
    };
    Row {
        family: spec.family,
        h: spec.h,
        r: spec.r,
        pair,
        beta,
        residual,
        wall_time: start.elapsed().as_secs_f64(),
        note,
    }
}

/// Runs every `(family, h, r)` cell of the configuration on the rayon pool.
/// Failing cells are recorded, not propagated.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable, BenchError> {
    cfg.validate()?;
    let mut hs = cfg.hs.clone();
    hs.sort_by(|a, b| b.total_cmp(a));
    let mut specs = Vec::new();
    for &family in &cfg.families {
        let rs: Vec<Option<u32>> = match &cfg.rs {
            Some(rs) => {
                let mut rs = rs.clone();
                rs.sort_unstable();
                rs.into_iter().map(Some).collect()
            }
            None => vec![None],
        };
        for &h in &hs {
            for &r in &rs {
                specs.push(cell_spec(family, h, r, cfg.pair));
            }
        }
    }
    let rows: Vec<Row> = specs.par_iter().map(|&s| run_cell(s, cfg.k)).collect();

    let mut footers = Vec::new();
    for &family in &cfg.families {
        let mut rs: Vec<u32> = rows.iter().filter(|row| row.family == family).map(|row| row.r).collect();
        rs.sort_unstable();
        rs.dedup();
        for r in rs {
            let column: Vec<&Row> = rows.iter().filter(|row| row.family == family && row.r == r).collect();
            let exponent = if column.len() < 3 {
                Err(format!("{} mesh size(s)", column.len()))
            } else if column.iter().any(|row| !row.ok()) {
                Err("failed cells".to_string())
            } else {
                let h: Vec<f64> = column.iter().map(|row| row.h).collect();
                let b: Vec<f64> = column.iter().map(|row| row.beta).collect();
                fit_decay(&h, &b).map_err(|e| e.to_string())
            };
            footers.push(Footer { family, r, exponent });
        }
    }
    Ok(ResultTable {
        table: cfg.table,
        seed: cfg.seed,
        rows,
        footers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let t = run_experiment(&ExperimentConfig::single(Family::EdgeD, &[1e-2])).unwrap();
        assert_eq!(t.rows.len(), 1);
        let row = &t.rows[0];
        assert!(row.ok());
        assert_eq!(row.pair, Pair::Q2Q1);
        assert!((row.beta - 0.256).abs() < 0.0005, "{}", row.beta);
        assert!(row.residual < 1e-8);
        assert!(t.footers[0].exponent.is_err());
    }

    #[test]
    fn failing_cell_is_recorded() {
        // h >= H is rejected by the mesh builder
        let t = run_experiment(&ExperimentConfig::single(Family::EdgeD, &[0.9, 1e-2])).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(t.rows[0].beta.is_nan());
        assert!(!t.rows[0].note.is_empty());
        assert!(t.rows[1].ok());
        assert!(t.to_csv().unwrap().contains("NaN"));
    }

    #[test]
    fn output_order_and_reproducibility() {
        let mut cfg = ExperimentConfig::single(Family::EdgeF, &[1e-3, 1e-1, 1e-2]);
        cfg.families.push(Family::EdgeD);
        let a = run_experiment(&cfg).unwrap();
        let hs: Vec<f64> = a.rows.iter().map(|r| r.h).collect();
        assert_eq!(hs, vec![1e-1, 1e-2, 1e-3, 1e-1, 1e-2, 1e-3]);
        assert_eq!(a.rows[0].family, Family::EdgeF);
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert!(a.footer(Family::EdgeF, 0).unwrap().exponent.as_ref().unwrap().abs() < 0.05);
        let md = a.to_markdown();
        assert!(md.contains("| h | EdgeF | EdgeD |"), "{md}");
        assert!(md.contains("decay exponent"));
    }

    #[test]
    fn p2p1_triangulates_quadrilateral_families() {
        let mut cfg = ExperimentConfig::single(Family::EdgeD, &[1e-2]);
        cfg.pair = Some(Pair::P2P1);
        let t = run_experiment(&cfg).unwrap();
        assert_eq!(t.rows[0].pair, Pair::P2P1);
        assert!(t.rows[0].ok(), "{}", t.rows[0].note);
    }

    #[test]
    fn refinement_table_is_laid_out_by_r() {
        let mut cfg = ExperimentConfig::for_table(TableId::Table4);
        cfg.families = vec![Family::RefinedEdge];
        cfg.rs = Some(vec![2, 1]);
        let t = run_experiment(&cfg).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.r).collect::<Vec<_>>(), vec![1, 2]);
        let md = t.to_markdown();
        assert!(md.contains("| r | RefinedEdge |"), "{md}");
        assert!(md.contains("| 1 | 0.2075 |"), "{md}");
    }
}
