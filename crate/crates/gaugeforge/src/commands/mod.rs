//! One module per subcommand, sharing grid setup and field loading.

mod gauge;
mod gen;
mod morrey;
mod solve;
mod study;

use std::fs;
use std::path::{Path, PathBuf};

use gaugeforge_core::domain::{Field, GridDomain};
use gaugeforge_core::gauge::AntisymmetricPotential;
use gaugeforge_core::liealg::antisym_random;
use gaugeforge_core::pipeline::boundary_field;

use crate::config::{OmegaKind, RunConfig};
use crate::error::{CliError, Result};
use crate::gfld;

pub use gauge::gauge;
pub use gen::gen;
pub use morrey::morrey;
pub use solve::solve;
pub use study::study;

/// Grid and configuration shared by every command.
pub struct Context {
    pub cfg: RunConfig,
    pub dom: GridDomain,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        let dom = GridDomain::ball(cfg.m, cfg.points)?;
        Ok(Context { cfg, dom })
    }

    pub fn ensure_output_dir(&self) -> Result<&Path> {
        let dir = &self.cfg.output_dir;
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(dir)
    }

    pub fn output(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    /// Reads a field written by an earlier command, failing with a hint if it is absent.
    fn read_field(&self, path: &Path, made_by: &str) -> Result<gfld::LatticeField> {
        if !path.exists() {
            return Err(CliError::Config(format!(
                "{} not found; run `gaugeforge {made_by}` with this configuration first",
                path.display()
            )));
        }
        let lf = gfld::read(path)?;
        lf.check_grid(&self.dom, path)?;
        Ok(lf)
    }

    pub fn load_omega(&self) -> Result<AntisymmetricPotential> {
        let path = self.cfg.omega_path();
        let lf = self.read_field(&path, "gen")?;
        let n = lf.header.n as usize;
        if lf.shape() != (n, n) {
            return Err(CliError::Format {
                path,
                reason: "potential must hold n×n blocks".into(),
            });
        }
        let omega = lf.to_field(&self.dom);
        Ok(AntisymmetricPotential::new(
            &self.dom,
            omega,
            self.cfg.omega.smoothness_passes,
        )?)
    }

    /// An `n×n` gauge field (`A`, `P`, `Q`); boundary values are the identity.
    pub fn load_gauge_matrix(&self, name: &str, n: usize) -> Result<Field> {
        let path = self.output(name);
        let lf = self.read_field(&path, "gauge")?;
        if lf.shape() != (n, n) {
            return Err(CliError::Format {
                path,
                reason: format!("expected {n}×{n} blocks to match the potential"),
            });
        }
        let mut f = lf.to_field(&self.dom);
        f.boundary_mut()
            .copy_from_slice(Field::identity(&self.dom, n).boundary());
        Ok(f)
    }

    /// A state field written by `solve`, with boundary values reset to the Dirichlet data.
    pub fn load_state(&self, name: &str, n: usize) -> Result<Field> {
        let path = self.output(name);
        let lf = self.read_field(&path, "solve")?;
        if lf.shape() != (n, 1) {
            return Err(CliError::Format {
                path,
                reason: format!("expected {n}-vectors"),
            });
        }
        let mut v = lf.to_field(&self.dom);
        let g = self.boundary_data(n)?;
        v.boundary_mut().copy_from_slice(g.boundary());
        Ok(v)
    }

    /// Dirichlet data `g` for an `n`-vector solution.
    pub fn boundary_data(&self, n: usize) -> Result<Field> {
        if let Some(kind) = self.cfg.builtin_boundary() {
            return Ok(boundary_field(&self.dom, n, kind));
        }
        let path = self.cfg.boundary.file.clone().expect("validated");
        let lf = gfld::read(&path)?;
        lf.check_grid(&self.dom, &path)?;
        if lf.shape() != (n, 1) {
            return Err(CliError::Format {
                path,
                reason: format!("boundary data must hold {n}-vectors"),
            });
        }
        let mut g = lf.to_field(&self.dom);
        g.interior_mut().fill(0.0);
        Ok(g)
    }
}

/// The configured potential built directly on `dom` (used by `gen` and `study`).
pub fn build_potential(cfg: &RunConfig, dom: &GridDomain) -> Result<AntisymmetricPotential> {
    let o = &cfg.omega;
    let om = match o.kind {
        OmegaKind::Zero => AntisymmetricPotential::zero(dom, cfg.n),
        OmegaKind::Constant => {
            AntisymmetricPotential::constant(dom, &antisym_random(cfg.n, o.seed), o.target_norm)?
        }
        OmegaKind::Random => {
            AntisymmetricPotential::random(dom, cfg.n, o.seed, o.target_norm, o.smoothness_passes)?
        }
    };
    Ok(om)
}

fn kind_name(kind: OmegaKind) -> &'static str {
    match kind {
        OmegaKind::Zero => "zero",
        OmegaKind::Constant => "constant",
        OmegaKind::Random => "random",
    }
}
