//! End-to-end runs: potential → gauge → solves, plus refinement helpers.

use alloc::vec::Vec;

use crate::domain::{Field, GridDomain};
use crate::elliptic::Multigrid;
use crate::error::Result;
use crate::gauge::{
    assemble_a, construct_p_with, construct_q_with, verify_gauge, AntisymmetricPotential,
    ContinuationConfig, ContinuationTrace, GaugeTriple, QReport, VerificationReport,
};
use crate::math::{cos, log2, now};
use crate::subcritical::{
    conservation_residual, conservation_residual_beyond, relative_l2, solve_conservation_with,
    solve_direct_with, StateField,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    /// `g_j(x) = (j + 1) + x_{j mod m}`.
    Linear,
    /// `g_j(x) = cos(πx_{j mod m}/2 + j)`.
    Trig,
}

/// Boundary data for an `n`-vector solution; interior values are zero.
pub fn boundary_field(dom: &GridDomain, n: usize, kind: BoundaryKind) -> Field {
    let mut g = Field::vector(dom, n);
    g.set_boundary_fn(dom, |x, o| {
        let m = x.len();
        for (j, oj) in o.iter_mut().enumerate() {
            let t = x[j % m];
            *oj = match kind {
                BoundaryKind::Linear => (j + 1) as f64 + t,
                BoundaryKind::Trig => cos(core::f64::consts::FRAC_PI_2 * t + j as f64),
            };
        }
    });
    g
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub continuation: ContinuationConfig,
    /// Relative tolerance for the `Q` solve and the state solves.
    pub tol: f64,
    /// Random unit vectors for the maximum-principle checks.
    pub samples: usize,
    pub sample_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            continuation: ContinuationConfig::default(),
            tol: 1e-10,
            samples: 20,
            sample_seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GaugeRun {
    pub triple: GaugeTriple,
    pub q_report: QReport,
    pub verification: VerificationReport,
    pub trace: ContinuationTrace,
    pub wall_time: f64,
}

/// `construct_P → construct_Q → assemble_A → verify_gauge` on one multigrid hierarchy.
pub fn run_gauge(
    pre: &Multigrid,
    dom: &GridDomain,
    omega: &AntisymmetricPotential,
    cfg: &PipelineConfig,
) -> Result<GaugeRun> {
    let start = now();
    let (u, p, trace) = construct_p_with(pre, dom, omega, &cfg.continuation)?;
    let (q, q_report) = construct_q_with(pre, dom, &p, cfg.tol)?;
    let triple = assemble_a(dom, u, p, q, omega, cfg.continuation.steps);
    let verification = verify_gauge(dom, &triple, &q_report, cfg.samples, cfg.sample_seed);
    Ok(GaugeRun {
        triple,
        q_report,
        verification,
        trace,
        wall_time: now() - start,
    })
}

#[derive(Clone, Debug)]
pub struct SolveRun {
    pub direct: StateField,
    pub conservation: StateField,
    /// `‖v_cons − v_direct‖_{L²} / ‖v_direct‖_{L²}`.
    pub equivalence_error: f64,
    /// Conservation residual of the direct solution.
    pub conservation_residual: f64,
    /// The same over nodes farther than 1/4 from the sphere.
    pub conservation_residual_core: f64,
}

const CORE_DEPTH: f64 = 0.25;

pub fn run_solve(
    pre: &Multigrid,
    dom: &GridDomain,
    omega: &AntisymmetricPotential,
    a: &Field,
    g: &Field,
    tol: f64,
) -> Result<SolveRun> {
    let direct = solve_direct_with(pre, dom, omega, g, tol)?;
    let conservation = solve_conservation_with(pre, dom, a, g, tol)?;
    let equivalence_error = relative_l2(dom, &conservation.v, &direct.v);
    let res = conservation_residual(dom, a, &direct.v);
    let core = conservation_residual_beyond(dom, a, &direct.v, CORE_DEPTH);
    Ok(SolveRun {
        direct,
        conservation,
        equivalence_error,
        conservation_residual: res,
        conservation_residual_core: core,
    })
}

/// `log₂(e_k / e_{k+1})` for successive halvings of `h`.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| log2(w[0] / w[1])).collect()
}

/// A member of the seeded random-potential suite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteMember {
    pub seed: u64,
    pub n: usize,
    pub target_norm: f64,
    pub smoothness_passes: usize,
}

impl SuiteMember {
    pub fn potential(&self, dom: &GridDomain) -> Result<AntisymmetricPotential> {
        AntisymmetricPotential::random(
            dom,
            self.n,
            self.seed,
            self.target_norm,
            self.smoothness_passes,
        )
    }
}

/// Ten seeded members cycling through `n ∈ {2, 3}` and
/// `‖Ω‖_{L^{m/2}} ∈ {0.025, 0.05, 0.1}`.
pub fn default_suite() -> Vec<SuiteMember> {
    const NORMS: [f64; 3] = [0.025, 0.05, 0.1];
    (0..10u64)
        .map(|k| SuiteMember {
            seed: 1000 + k,
            n: 2 + (k as usize % 2),
            target_norm: NORMS[k as usize % 3],
            smoothness_passes: 2,
        })
        .collect()
}
