//! Experiment harness: grids of inf-sup constants over families, mesh sizes
//! and refinement levels, with CSV and Markdown output and comparison against
//! the shipped reference tables.

mod config;
mod reference;
mod table;

pub use config::{ExperimentConfig, Format, TableId, DEFAULT_HS, REFINEMENT_H};
pub use reference::{
    compare_to_reference, DiffReport, DiffRow, Reference, ReferenceCell, ToleranceClass, Verdict, EXACT_TOL,
};
pub use table::{cell_spec, run_experiment, Footer, ResultTable, Row};

use crate::assemble::AssembleError;
use crate::patchgen::MeshError;
use crate::spectra::SpectraError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("reference schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Assemble(#[from] AssembleError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl ResultTable {
    /// The table in the requested format.
    pub fn render(&self, format: Format) -> Result<String, BenchError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Markdown => Ok(self.to_markdown()),
        }
    }
}
