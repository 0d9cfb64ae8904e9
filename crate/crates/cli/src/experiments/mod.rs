pub mod curves;
pub mod norms;
pub mod tube;

use std::path::Path;

use anyhow::Context;
use mrpi_core::linalg::Matrix;
use mrpi_core::norms::{ContractionReport, ShaperRegistry};
use mrpi_core::sets::BoxSet;
use mrpi_core::systems::{default_target_rho, random_schur};

use crate::config::RunConfig;
use crate::failure::usage;

/// Seeded Schur system and its disturbance box `[−0.1, 0.1]ⁿ`.
pub fn random_system(dim: usize, seed: u64) -> anyhow::Result<(Matrix, BoxSet)> {
    let a = random_schur(dim, default_target_rho(dim), seed)?;
    let w = BoxSet::symmetric(vec![0.1; dim])?;
    Ok((a, w))
}

/// Runs the named shaper and insists on a contraction.
pub fn shape(spec: &str, a: &Matrix) -> anyhow::Result<ContractionReport> {
    let shaper = ShaperRegistry::default().create(spec).map_err(|e| usage(format!("`norm`: {e}")))?;
    let report = shaper.shape(a)?;
    if !report.is_contractive() {
        return Err(usage(format!(
            "norm `{spec}` gives gamma = {} >= 1 for this system (rho = {}); choose another norm",
            report.gamma, report.rho
        )));
    }
    Ok(report)
}

pub fn write_output(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Creates the output directory and writes `manifest.txt`: the resolved
/// config, then `# key = value` metadata lines.
pub fn write_manifest(cfg: &RunConfig, metadata: &[(String, String)]) -> anyhow::Result<()> {
    std::fs::create_dir_all(&cfg.output_dir).with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    let mut text = cfg.to_manifest();
    for (k, v) in metadata {
        text.push_str(&format!("# {k} = {v}\n"));
    }
    write_output(&cfg.output_dir, "manifest.txt", &text)
}
