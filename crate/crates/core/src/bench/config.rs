//! Experiment configuration: table presets, overrides and the key=value file format.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::assemble::Pair;
use crate::patchgen::Family;

use super::BenchError;

/// The mesh sizes of every table that varies `h`.
pub const DEFAULT_HS: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

/// Fixed `h` of the refinement table.
pub const REFINEMENT_H: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableId {
    /// Edge patches, `Q2 x Q1`.
    Table1,
    /// Corner patches, `Q2 x Q1`.
    Table2,
    LShape,
    /// Refined patches at fixed `h`.
    Table4,
    /// Triangulated patches satisfying the hypotheses, `P2 x P1`.
    TriGood,
    /// The triangulated patch violating the edge hypothesis.
    TriBad,
    Custom,
}

impl TableId {
    pub const ALL: [TableId; 7] = [
        TableId::Table1,
        TableId::Table2,
        TableId::LShape,
        TableId::Table4,
        TableId::TriGood,
        TableId::TriBad,
        TableId::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::Table1 => "table1",
            TableId::Table2 => "table2",
            TableId::LShape => "lshape",
            TableId::Table4 => "table4",
            TableId::TriGood => "tri_good",
            TableId::TriBad => "tri_bad",
            TableId::Custom => "custom",
        }
    }

    /// Columns of the table, in display order. Empty for `custom`.
    pub fn families(self) -> &'static [Family] {
        match self {
            TableId::Table1 => &[Family::EdgeA, Family::EdgeC, Family::EdgeD, Family::EdgeF],
            TableId::Table2 => &[Family::CornerB, Family::CornerC, Family::CornerD],
            TableId::LShape => &[Family::LShape],
            TableId::Table4 => &[Family::RefinedEdge, Family::RefinedOverlappedEdge, Family::RefinedCorner],
            TableId::TriGood => &[Family::TriEdge, Family::TriOverlappedEdge, Family::TriCorner],
            TableId::TriBad => &[Family::TriEdgeBad],
            TableId::Custom => &[],
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<TableId, BenchError> {
        TableId::ALL
            .iter()
            .copied()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| BenchError::Config(format!("unknown table `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Format, BenchError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(BenchError::Config(format!("unknown format `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub table: TableId,
    /// Columns; defaults to the table's families.
    pub families: Vec<Family>,
    pub hs: Vec<f64>,
    /// Refinement levels; `None` uses each family's default.
    pub rs: Option<Vec<u32>>,
    /// Element pair; `None` follows the mesh. `P2P1` on a quadrilateral
    /// family triangulates it.
    pub pair: Option<Pair>,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Number of eigenvalues computed per cell.
    pub k: usize,
    /// Recorded with the results. The computation itself draws no random numbers.
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn for_table(table: TableId) -> ExperimentConfig {
        let (hs, rs) = match table {
            TableId::Table4 => (vec![REFINEMENT_H], Some(vec![1, 2, 3, 4])),
            _ => (DEFAULT_HS.to_vec(), None),
        };
        ExperimentConfig {
            table,
            families: table.families().to_vec(),
            hs,
            rs,
            pair: None,
            format: Format::Csv,
            out: None,
            k: 5,
            seed: 0,
        }
    }

    /// A one-column custom experiment.
    pub fn single(family: Family, hs: &[f64]) -> ExperimentConfig {
        ExperimentConfig {
            families: vec![family],
            hs: hs.to_vec(),
            ..ExperimentConfig::for_table(TableId::Custom)
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.families.is_empty() {
            return Err(BenchError::Config("no families to run".into()));
        }
        if self.hs.is_empty() {
            return Err(BenchError::Config("no mesh sizes to run".into()));
        }
        if let Some(h) = self.hs.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(BenchError::Config(format!("mesh size {h} is not positive")));
        }
        for (i, a) in self.hs.iter().enumerate() {
            if self.hs[..i].contains(a) {
                return Err(BenchError::Config(format!("mesh size {a} listed twice")));
            }
        }
        if let Some(rs) = &self.rs {
            if rs.is_empty() {
                return Err(BenchError::Config("empty refinement list".into()));
            }
        }
        if self.k == 0 {
            return Err(BenchError::Config("k must be at least 1".into()));
        }
        if self.pair == Some(Pair::Q2Q1) {
            if let Some(f) = self.families.iter().find(|f| f.is_triangulated()) {
                return Err(BenchError::Config(format!("{f} is triangulated, q2q1 does not apply")));
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Keys: `table`,
    /// `family`, `h`, `r`, `pair`, `format`, `out`, `k`, `seed`. Lists are
    /// comma separated.
    pub fn from_kv(text: &str) -> Result<ExperimentConfig, BenchError> {
        let mut pairs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("line {}: expected key = value", n + 1)))?;
            pairs.push((key.trim().to_ascii_lowercase(), value.trim().to_string()));
        }
        let table = match pairs.iter().find(|(k, _)| k == "table") {
            Some((_, v)) => v.parse()?,
            None => TableId::Custom,
        };
        let mut cfg = ExperimentConfig::for_table(table);
        for (key, value) in &pairs {
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), BenchError> {
        let bad = |what: &str| BenchError::Config(format!("invalid {what} `{value}`"));
        match key {
            "table" => {
                let t: TableId = value.parse()?;
                if t != self.table {
                    *self = ExperimentConfig { format: self.format, out: self.out.clone(), ..ExperimentConfig::for_table(t) };
                }
            }
            "family" | "families" => {
                self.families = list(value).map(|s| s.parse::<Family>().map_err(|_| bad("family"))).collect::<Result<_, _>>()?;
            }
            "h" => self.hs = list(value).map(|s| s.parse::<f64>().map_err(|_| bad("h"))).collect::<Result<_, _>>()?,
            "r" => self.rs = Some(list(value).map(|s| s.parse::<u32>().map_err(|_| bad("r"))).collect::<Result<_, _>>()?),
            "pair" => self.pair = Some(value.parse().map_err(|_| bad("pair"))?),
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "k" => self.k = value.parse().map_err(|_| bad("k"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            _ => return Err(BenchError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let t4 = ExperimentConfig::for_table(TableId::Table4);
        assert_eq!(t4.hs, vec![1e-3]);
        assert_eq!(t4.rs, Some(vec![1, 2, 3, 4]));
        assert_eq!(ExperimentConfig::for_table(TableId::Table1).families.len(), 4);
        for t in TableId::ALL {
            assert_eq!(t.name().parse::<TableId>().unwrap(), t);
        }
    }

    #[test]
    fn key_value_file() {
        let cfg = ExperimentConfig::from_kv(
            "# a custom run\nfamily = EdgeD, EdgeF\nh = 1e-2, 1e-3 # two sizes\npair = q2q1\nformat = markdown\nk = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.table, TableId::Custom);
        assert_eq!(cfg.families, vec![Family::EdgeD, Family::EdgeF]);
        assert_eq!(cfg.hs, vec![1e-2, 1e-3]);
        assert_eq!(cfg.format, Format::Markdown);
        assert_eq!(cfg.k, 3);
        cfg.validate().unwrap();

        let t = ExperimentConfig::from_kv("h = 1e-2\ntable = table2\n").unwrap();
        assert_eq!(t.families, TableId::Table2.families());
        assert_eq!(t.hs, vec![1e-2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::from_kv("h 1e-2").is_err());
        assert!(ExperimentConfig::from_kv("colour = red").is_err());
        assert!(ExperimentConfig::from_kv("family = EdgeZ").is_err());
        let mut cfg = ExperimentConfig::single(Family::EdgeD, &[1e-2, 1e-2]);
        assert!(cfg.validate().is_err());
        cfg.hs = vec![-1.0];
        assert!(cfg.validate().is_err());
        let mut tri = ExperimentConfig::single(Family::TriEdge, &[1e-2]);
        tri.pair = Some(Pair::Q2Q1);
        assert!(tri.validate().is_err());
        assert!(ExperimentConfig::for_table(TableId::Custom).validate().is_err());
    }
}
