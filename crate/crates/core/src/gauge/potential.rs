use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{lp_norm, BallSpec, Field, GridDomain, Neighbor};
use crate::error::{Error, Result};
use crate::liealg::{AntisymMatrix, Mat};
use crate::math::cos;

const RANDOM_MODES: usize = 6;

/// An so(n)-valued field `Ω` together with its `L^{m/2}` norm.
#[derive(Clone, Debug)]
pub struct AntisymmetricPotential {
    pub omega: Field,
    pub l_half_m_norm: f64,
    pub smoothness_passes: usize,
}

impl AntisymmetricPotential {
    /// Wraps an existing field after checking node-wise antisymmetry.
    pub fn new(dom: &GridDomain, omega: Field, smoothness_passes: usize) -> Result<Self> {
        if omega.rows() != omega.cols() || omega.num_nodes() != dom.num_interior() {
            return Err(Error::InvalidInput(
                "potential must be a square matrix field".into(),
            ));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidInput(
                "potential has non-finite entries".into(),
            ));
        }
        let defect = omega.max_antisymmetry_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidInput(alloc::format!(
                "potential not antisymmetric (defect {defect:.3e})"
            )));
        }
        let norm = half_m_norm(dom, &omega);
        Ok(AntisymmetricPotential {
            omega,
            l_half_m_norm: norm,
            smoothness_passes,
        })
    }

    pub fn zero(dom: &GridDomain, n: usize) -> Self {
        AntisymmetricPotential {
            omega: Field::matrix(dom, n),
            l_half_m_norm: 0.0,
            smoothness_passes: 1,
        }
    }

    /// Constant potential `a`, rescaled so that `‖Ω‖_{L^{m/2}} = target_norm`.
    pub fn constant(dom: &GridDomain, a: &AntisymMatrix, target_norm: f64) -> Result<Self> {
        let n = a.n();
        let omega = Field::constant(dom, n, n, a.to_mat().as_slice());
        let mut p = Self::new(dom, omega, 1)?;
        p.rescale(dom, target_norm)?;
        Ok(p)
    }

    /// Seeded smooth random potential: a few random so(n)-valued plane waves,
    /// mollified by `passes` rounds of neighbour averaging and rescaled to
    /// `target_norm`. The waves are sampled from the continuum, so the same seed
    /// describes the same field at every resolution.
    pub fn random(
        dom: &GridDomain,
        n: usize,
        seed: u64,
        target_norm: f64,
        passes: usize,
    ) -> Result<Self> {
        if !(target_norm >= 0.0) {
            return Err(Error::InvalidInput(
                "target_norm must be non-negative".into(),
            ));
        }
        if n < 2 || n > crate::liealg::MAX_N {
            return Err(Error::InvalidInput(alloc::format!(
                "matrix size n = {n} unsupported"
            )));
        }
        let m = dom.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = AntisymMatrix::algebra_dim(n);
        let mut modes: Vec<(Mat, [f64; crate::domain::MAX_DIM], f64)> = Vec::new();
        for _ in 0..RANDOM_MODES {
            let coords: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let a = AntisymMatrix::from_coords(n, &coords).to_mat();
            let mut k = [0.0; crate::domain::MAX_DIM];
            for kd in k.iter_mut().take(m) {
                *kd = rng.gen_range(-2.0..=2.0);
            }
            let phase = rng.gen_range(0.0..core::f64::consts::TAU);
            modes.push((a, k, phase));
        }
        let mut omega = Field::from_fn(dom, n, n, |x, out| {
            out.iter_mut().for_each(|v| *v = 0.0);
            for (a, k, phase) in &modes {
                let arg: f64 = core::f64::consts::PI
                    * x.iter().zip(k).map(|(a, b)| a * b).sum::<f64>()
                    + phase;
                let c = cos(arg);
                for (o, e) in out.iter_mut().zip(a.as_slice()) {
                    *o += c * e;
                }
            }
        });
        for _ in 0..passes {
            omega = mollify(dom, &omega);
        }
        let mut p = Self::new(dom, omega, passes)?;
        p.rescale(dom, target_norm)?;
        Ok(p)
    }

    /// Multiplies the field so its `L^{m/2}` norm becomes `target`.
    pub fn rescale(&mut self, dom: &GridDomain, target: f64) -> Result<()> {
        if !(target >= 0.0) {
            return Err(Error::InvalidInput(
                "target_norm must be non-negative".into(),
            ));
        }
        if target == 0.0 {
            self.omega.scale(0.0);
            self.l_half_m_norm = 0.0;
            return Ok(());
        }
        if self.l_half_m_norm == 0.0 {
            return Err(Error::InvalidInput(
                "cannot rescale a zero potential".into(),
            ));
        }
        self.omega.scale(target / self.l_half_m_norm);
        self.l_half_m_norm = half_m_norm(dom, &self.omega);
        Ok(())
    }

    /// `tΩ`, with its norm.
    pub fn scaled(&self, t: f64) -> Self {
        AntisymmetricPotential {
            omega: self.omega.scaled(t),
            l_half_m_norm: self.l_half_m_norm * t.abs(),
            smoothness_passes: self.smoothness_passes,
        }
    }

    pub fn n(&self) -> usize {
        self.omega.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.omega.interior().iter().all(|&x| x == 0.0)
    }
}

fn half_m_norm(dom: &GridDomain, f: &Field) -> f64 {
    lp_norm(dom, f, dom.dim() as f64 / 2.0, BallSpec::Whole).unwrap_or(0.0)
}

/// One round of averaging each node with its interior lattice neighbours.
pub fn mollify(dom: &GridDomain, f: &Field) -> Field {
    let b = f.block();
    let mut out = Field::zeros(dom, f.rows(), f.cols());
    for i in 0..dom.num_interior() {
        let mut acc = [0.0; 64];
        acc[..b].copy_from_slice(f.node(i));
        let mut count = 1.0;
        for k in 0..dom.arms() {
            if let Neighbor::Interior(j) = dom.neighbor(i, k) {
                for (a, v) in acc.iter_mut().zip(f.node(j as usize)) {
                    *a += v;
                }
                count += 1.0;
            }
        }
        for (o, a) in out.node_mut(i).iter_mut().zip(&acc[..b]) {
            *o = a / count;
        }
    }
    out
}
