pub mod fit;
pub mod init;
pub mod predict;
pub mod simulate;
pub mod summarize;
pub mod theory;

use std::path::PathBuf;

use lsh_core::hypercore::{read_hypergraph, Hypergraph};

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::Outputs;

pub(crate) fn outputs(cfg: &RunConfig) -> CliResult<Outputs> {
    let dir = cfg.path("out_dir")?.unwrap_or_else(|| PathBuf::from("."));
    Outputs::create(&dir)
}

/// Reads the `input` hypergraph, which must exist at startup.
pub(crate) fn input(cfg: &RunConfig) -> CliResult<Hypergraph> {
    let p = cfg.existing_path("input")?;
    let (h, report) = read_hypergraph(&p)?;
    if report.duplicates + report.singletons > 0 {
        log::warn!(
            "{}: dropped {} repeated and {} single-node hyperedges",
            p.display(),
            report.duplicates,
            report.singletons
        );
    }
    Ok(h)
}
