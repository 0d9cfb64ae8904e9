//! Run configuration: built-in defaults, then an optional `key = value` file,
//! then command-line flags.

use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::Context;
use mrpi_core::bound::ExponentConvention;
use mrpi_core::norms::{DiagonalGrid, ShaperRegistry};
use mrpi_core::tubempc::TubeRegistry;

use crate::failure::usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Exp1,
    Exp2,
    Exp3,
    Exp4,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Exp1 => "exp1",
            Experiment::Exp2 => "exp2",
            Experiment::Exp3 => "exp3",
            Experiment::Exp4 => "exp4",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub n_range: RangeInclusive<usize>,
    pub dir_count: usize,
    pub k_ref: usize,
    pub epsilon: f64,
    pub convention: ExponentConvention,
    /// Shaper spec, see [`ShaperRegistry`].
    pub norm: String,
    /// Grid id for the diagonal shaper in exp2.
    pub diag_grid: String,
    pub output_dir: PathBuf,
    pub rollouts: usize,
    pub steps: usize,
    pub horizon: usize,
    /// Tube method specs, see [`TubeRegistry`].
    pub methods: Vec<String>,
}

/// Keys accepted in config files, in manifest order.
pub const KEYS: &[&str] = &[
    "seed",
    "dims",
    "n_range",
    "dir_count",
    "k_ref",
    "epsilon",
    "exponent_convention",
    "norm",
    "diag_grid",
    "output_dir",
    "rollouts",
    "steps",
    "horizon",
    "methods",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> anyhow::Result<T> {
    value.parse::<T>().map_err(|_| usage(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list(value: &str) -> Vec<String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

/// `lo..hi` or `lo..=hi`, both inclusive.
fn parse_range(value: &str) -> anyhow::Result<RangeInclusive<usize>> {
    let (lo, hi) = value.split_once("..").ok_or_else(|| usage(format!("`n_range`: expected lo..hi, got `{value}`")))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: usize = parse_num("n_range", lo.trim())?;
    let hi: usize = parse_num("n_range", hi.trim())?;
    if lo > hi {
        return Err(usage(format!("`n_range`: empty range {lo}..{hi}")));
    }
    Ok(lo..=hi)
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (dims, n_range) = match experiment {
            Experiment::Exp1 | Experiment::Exp2 => (vec![6], 1..=30),
            Experiment::Exp3 => (vec![10, 15, 20], 1..=20),
            Experiment::Exp4 => (vec![2], 1..=30),
        };
        Self {
            experiment,
            seed: 0,
            dims,
            n_range,
            dir_count: 2000,
            k_ref: 200,
            epsilon: 1e-3,
            convention: ExponentConvention::N,
            norm: "lyapunov".into(),
            diag_grid: "geom:3:5".into(),
            output_dir: PathBuf::from("out").join(experiment.to_string()),
            rollouts: 100,
            steps: 50,
            horizon: 10,
            methods: vec!["baseline".into(), "certified".into()],
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        let value = value.trim();
        match key {
            "seed" => self.seed = parse_num(key, value)?,
            "dims" => {
                self.dims = parse_list(value).iter().map(|d| parse_num(key, d)).collect::<anyhow::Result<_>>()?;
            }
            "n_range" => self.n_range = parse_range(value)?,
            "dir_count" => self.dir_count = parse_num(key, value)?,
            "k_ref" => self.k_ref = parse_num(key, value)?,
            "epsilon" => self.epsilon = parse_num(key, value)?,
            "exponent_convention" => self.convention = value.parse().map_err(|_| usage(format!("`{key}`: expected N or N+1, got `{value}`")))?,
            "norm" => self.norm = value.to_string(),
            "diag_grid" => self.diag_grid = value.to_string(),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "rollouts" => self.rollouts = parse_num(key, value)?,
            "steps" => self.steps = parse_num(key, value)?,
            "horizon" => self.horizon = parse_num(key, value)?,
            "methods" => self.methods = parse_list(value),
            _ => return Err(usage(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; blank lines and `#` comments are
    /// skipped.
    pub fn apply_file(&mut self, path: &Path) -> anyhow::Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("{}:{}: expected `key = value`", path.display(), lineno + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(usage("`dims` must list positive dimensions"));
        }
        if self.experiment == Experiment::Exp4 && self.dims != [2] {
            return Err(usage("exp4 runs on a fixed 2-D plant; `dims` must be 2"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(usage(format!("`epsilon` must be positive, got {}", self.epsilon)));
        }
        let last = self.convention.terms(*self.n_range.end());
        if last > self.k_ref {
            return Err(usage(format!("`k_ref` = {} is below the largest compared horizon {last}", self.k_ref)));
        }
        if self.horizon == 0 {
            return Err(usage("`horizon` must be at least 1"));
        }
        ShaperRegistry::default().create(&self.norm).map_err(|e| usage(format!("`norm`: {e}")))?;
        DiagonalGrid::parse(&self.diag_grid).map_err(|e| usage(format!("`diag_grid`: {e}")))?;
        let tubes = TubeRegistry::default();
        if self.methods.is_empty() {
            return Err(usage("`methods` must name at least one tube method"));
        }
        for m in &self.methods {
            tubes.create(m).map_err(|e| usage(format!("`methods`: {e}")))?;
        }
        Ok(())
    }

    fn value_of(&self, key: &str) -> String {
        let join = |v: &[String]| v.join(",");
        match key {
            "seed" => self.seed.to_string(),
            "dims" => join(&self.dims.iter().map(ToString::to_string).collect::<Vec<_>>()),
            "n_range" => format!("{}..{}", self.n_range.start(), self.n_range.end()),
            "dir_count" => self.dir_count.to_string(),
            "k_ref" => self.k_ref.to_string(),
            "epsilon" => self.epsilon.to_string(),
            "exponent_convention" => self.convention.to_string(),
            "norm" => self.norm.clone(),
            "diag_grid" => self.diag_grid.clone(),
            "output_dir" => self.output_dir.display().to_string(),
            "rollouts" => self.rollouts.to_string(),
            "steps" => self.steps.to_string(),
            "horizon" => self.horizon.to_string(),
            "methods" => join(&self.methods),
            _ => unreachable!("manifest key list and value_of disagree"),
        }
    }

    /// The resolved configuration as a config file, preceded by comment lines
    /// naming the tool version and subcommand.
    pub fn to_manifest(&self) -> String {
        let mut out = format!("# mrpi {}\n# command = {}\n", env!("CARGO_PKG_VERSION"), self.experiment);
        for key in KEYS {
            out.push_str(&format!("{key} = {}\n", self.value_of(key)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips() {
        let mut cfg = RunConfig::defaults(Experiment::Exp3);
        cfg.set("n_range", "2..=9").unwrap();
        cfg.set("exponent_convention", "N+1").unwrap();
        cfg.set("methods", "baseline, certified:12").unwrap();
        let dir = std::env::temp_dir().join(format!("mrpi-manifest-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("manifest.txt");
        std::fs::write(&path, cfg.to_manifest()).unwrap();
        let mut back = RunConfig::defaults(Experiment::Exp3);
        back.apply_file(&path).unwrap();
        assert_eq!(back, cfg);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn bad_values_are_usage_errors() {
        let mut cfg = RunConfig::defaults(Experiment::Exp1);
        for (k, v) in [("seed", "-1"), ("n_range", "5..2"), ("exponent_convention", "M"), ("colour", "red")] {
            let err = cfg.set(k, v).unwrap_err();
            assert_eq!(crate::failure::exit_code(&err), 2, "{k}");
        }
        cfg.set("norm", "mahalanobis").unwrap();
        assert_eq!(crate::failure::exit_code(&cfg.validate().unwrap_err()), 2);
    }
}
