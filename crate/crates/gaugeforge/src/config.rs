//! Run configuration: one TOML file plus `--set key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gaugeforge_core::gauge::ContinuationConfig;
use gaugeforge_core::pipeline::{BoundaryKind, PipelineConfig};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "defaults::m")]
    pub m: usize,
    #[serde(default = "defaults::n")]
    pub n: usize,
    #[serde(rename = "N", default = "defaults::points")]
    pub points: usize,
    #[serde(default)]
    pub omega: OmegaConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub monitors: MonitorConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub study: StudyConfig,
    #[serde(default = "defaults::output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OmegaKind {
    Zero,
    Constant,
    Random,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OmegaConfig {
    pub kind: OmegaKind,
    pub seed: u64,
    pub target_norm: f64,
    pub smoothness_passes: usize,
    /// Potential file for `gauge`, `solve` and `morrey`; defaults to `<output_dir>/omega.gfld`.
    pub file: Option<PathBuf>,
}

impl Default for OmegaConfig {
    fn default() -> Self {
        OmegaConfig {
            kind: OmegaKind::Random,
            seed: 1,
            target_norm: 0.05,
            smoothness_passes: 2,
            file: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKindConfig {
    Linear,
    Trig,
    File,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryConfig {
    pub kind: BoundaryKindConfig,
    /// GFLD vector field sampled on the whole lattice, for `kind = "file"`.
    pub file: Option<PathBuf>,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        BoundaryConfig {
            kind: BoundaryKindConfig::Linear,
            file: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub newton_tol: f64,
    pub steps: usize,
    pub newton_max: usize,
    pub omega_guard: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let c = ContinuationConfig::default();
        SolverConfig {
            tol: 1e-10,
            newton_tol: c.newton_tol,
            steps: c.steps,
            newton_max: c.newton_max,
            omega_guard: c.omega_guard,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorConfig {
    pub eps0: f64,
    pub eps1: f64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        let c = ContinuationConfig::default();
        MonitorConfig {
            eps0: c.eps0_monitor,
            eps1: c.eps1_monitor,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub lambda: f64,
    /// Empty means the origin plus four off-center points.
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    /// Empty means `m/(m−2)`, `m/(m−2) + 1/2`, `2m/(m−2)`.
    pub exponents: Vec<f64>,
    /// Unit vectors `X` drawn for the maximum-principle checks.
    pub samples: usize,
    pub sample_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            lambda: 0.5,
            centers: Vec::new(),
            radii: vec![0.125, 0.25],
            exponents: Vec::new(),
            samples: 20,
            sample_seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    /// Points per axis for the refinement study.
    pub grids: Vec<usize>,
    /// Target norms for `gauge` sweep mode; empty runs the single configured potential.
    pub sweep: Vec<f64>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            grids: vec![17, 33, 65],
            sweep: Vec::new(),
        }
    }
}

mod defaults {
    use std::path::PathBuf;

    pub fn m() -> usize {
        3
    }
    pub fn n() -> usize {
        3
    }
    pub fn points() -> usize {
        33
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("out")
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config uses defaults")
    }
}

impl RunConfig {
    /// Reads `path` (if given), applies `key=value` overrides in order and validates.
    /// Relative paths inside the file resolve against the file's directory.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let (mut table, base) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                let table: toml::Table = text
                    .parse()
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                (table, p.parent().map(Path::to_path_buf))
            }
            None => (toml::Table::new(), None),
        };
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let mut cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        if let Some(base) = base {
            cfg.resolve_paths(&base);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        if let Some(f) = self.omega.file.as_mut() {
            fix(f);
        }
        if let Some(f) = self.boundary.file.as_mut() {
            fix(f);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |s: &str| Err(CliError::Config(s.to_string()));
        if !(3..=5).contains(&self.m) {
            return err("m must be 3, 4 or 5");
        }
        if !(2..=gaugeforge_core::liealg::MAX_N).contains(&self.n) {
            return err("n must lie in 2..=8");
        }
        if !(self.omega.target_norm >= 0.0) {
            return err("omega.target_norm must be >= 0");
        }
        if !(self.experiment.lambda > 0.0 && self.experiment.lambda < 1.0) {
            return err("experiment.lambda must lie in (0, 1)");
        }
        if self.experiment.centers.iter().any(|c| c.len() != self.m) {
            return err("experiment.centers must have m coordinates each");
        }
        if self
            .experiment
            .radii
            .iter()
            .any(|&r| !(r > 0.0 && r <= 0.25))
        {
            return err("experiment.radii must lie in (0, 1/4]");
        }
        if self.experiment.exponents.iter().any(|&p| !(p >= 1.0)) {
            return err("experiment.exponents must be >= 1");
        }
        if self.study.sweep.iter().any(|&t| !(t >= 0.0)) {
            return err("study.sweep target norms must be >= 0");
        }
        if self.boundary.kind == BoundaryKindConfig::File && self.boundary.file.is_none() {
            return err("boundary.kind = \"file\" needs boundary.file");
        }
        if let Some(f) = &self.boundary.file {
            if self.boundary.kind == BoundaryKindConfig::File && !f.exists() {
                return Err(CliError::Config(format!(
                    "boundary file {} does not exist",
                    f.display()
                )));
            }
        }
        self.continuation().validate()?;
        Ok(())
    }

    pub fn continuation(&self) -> ContinuationConfig {
        ContinuationConfig {
            steps: self.solver.steps,
            newton_tol: self.solver.newton_tol,
            newton_max: self.solver.newton_max,
            eps0_monitor: self.monitors.eps0,
            eps1_monitor: self.monitors.eps1,
            omega_guard: self.solver.omega_guard,
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            continuation: self.continuation(),
            tol: self.solver.tol,
            samples: self.experiment.samples,
            sample_seed: self.experiment.sample_seed,
        }
    }

    pub fn builtin_boundary(&self) -> Option<BoundaryKind> {
        match self.boundary.kind {
            BoundaryKindConfig::Linear => Some(BoundaryKind::Linear),
            BoundaryKindConfig::Trig => Some(BoundaryKind::Trig),
            BoundaryKindConfig::File => None,
        }
    }

    pub fn omega_path(&self) -> PathBuf {
        self.omega
            .file
            .clone()
            .unwrap_or_else(|| self.output_dir.join("omega.gfld"))
    }

    pub fn centers(&self) -> Vec<Vec<f64>> {
        if !self.experiment.centers.is_empty() {
            return self.experiment.centers.clone();
        }
        let m = self.m;
        let axis = |d: usize, t: f64| {
            let mut c = vec![0.0; m];
            c[d] = t;
            c
        };
        let mut diag = vec![0.125; m];
        diag[0] = -0.25;
        diag[m - 1] = -0.125;
        vec![
            vec![0.0; m],
            axis(0, 0.25),
            axis(1, -0.25),
            axis(m - 1, 0.25),
            diag,
        ]
    }

    pub fn exponents(&self) -> Vec<f64> {
        if self.experiment.exponents.is_empty() {
            gaugeforge_core::subcritical::default_exponents(self.m)
        } else {
            self.experiment.exponents.clone()
        }
    }
}

/// `a.b.c=value`; `value` is parsed as a TOML value, falling back to a string.
fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects key=value, got {item:?}")))?;
    let value = parse_value(raw.trim());
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad key {key:?}")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("{key}: {p} is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}
