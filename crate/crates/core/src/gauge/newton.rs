use alloc::vec::Vec;

use super::AntisymmetricPotential;
use crate::domain::{gradient, laplacian, lp_norm, BallSpec, Field, GridDomain};
use crate::elliptic::{solve_perturbed_with, ArmCoefficients, LinearOperatorSpec, Multigrid};
use crate::error::{Error, Monitor, Result};
use crate::liealg::{dexp_conj_inverse, exp_remainder, AntisymMatrix, Mat};
use crate::math::{abs_pow, sqrt};

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationConfig {
    pub steps: usize,
    /// Newton stops once `‖residual_F‖_{L^{m/2}} ≤ newton_tol · max(‖Ω‖, 1)`.
    pub newton_tol: f64,
    pub newton_max: usize,
    /// Bound on `∫|∇P|^m`.
    pub eps0_monitor: f64,
    /// Bound on `‖Δ_h(P − Id)‖_{L^{m/2}}`.
    pub eps1_monitor: f64,
    /// Largest `‖Ω‖_{L^{m/2}}` accepted before any work is done.
    pub omega_guard: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            steps: 8,
            newton_tol: 1e-9,
            newton_max: 20,
            eps0_monitor: 0.1,
            eps1_monitor: 1.0,
            omega_guard: 1.0,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.newton_tol > 0.0
            && self.eps0_monitor > 0.0
            && self.eps1_monitor > 0.0
            && self.omega_guard > 0.0;
        if self.steps == 0 || self.newton_max == 0 || !positive {
            return Err(Error::InvalidInput(
                "continuation parameters must be positive, steps >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Per-stage record of a continuation run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContinuationTrace {
    /// `‖residual_F‖_{L^{m/2}}` after each Newton iterate, one list per stage.
    pub newton_residuals: Vec<Vec<f64>>,
    /// `‖Δ_h(P − Id)‖ / ‖PᵗΔ_hP − (Δ_hP)ᵗP‖` at the end of each stage.
    pub second_order_ratio: Vec<f64>,
    /// `∫|∇P|^m` at the end of each stage.
    pub gradient_energy: Vec<f64>,
    /// `‖Δ_h(P − Id)‖_{L^{m/2}}` at the end of each stage.
    pub second_order_norm: Vec<f64>,
    pub newton_iterations: usize,
    pub linear_iterations: usize,
}

/// `P = exp(U)` written as `Id + U + R(U)` so that `Δ_h P` can be formed from
/// `Δ_h U + Δ_h R` without cancelling against the identity.
pub fn exp_field(dom: &GridDomain, u: &Field) -> (Field, Field) {
    let n = u.rows();
    let mut rem = Field::matrix(dom, n);
    for i in 0..dom.num_interior() {
        rem.set_mat(i, &exp_remainder(&u.mat(i)));
    }
    for j in 0..dom.num_boundary() {
        rem.set_bnd_mat(j, &exp_remainder(&u.bnd_mat(j)));
    }
    let mut p = Field::identity(dom, n);
    p.axpy(1.0, u);
    p.axpy(1.0, &rem);
    let mut lap = laplacian(dom, u);
    lap.axpy(1.0, &laplacian(dom, &rem));
    (p, lap)
}

/// `½(PᵗΔ_hP − (Δ_hPᵗ)P) + Ω` with `P = exp(U)`; zero exactly on solutions of
/// the gauge equation.
pub fn residual_f(dom: &GridDomain, u: &Field, omega: &AntisymmetricPotential) -> Field {
    let (p, lap) = exp_field(dom, u);
    residual_from(dom, &p, &lap, &omega.omega)
}

fn residual_from(dom: &GridDomain, p: &Field, lap: &Field, omega: &Field) -> Field {
    let n = p.rows();
    let mut out = Field::matrix(dom, n);
    for i in 0..dom.num_interior() {
        let m = p.mat(i).transpose() * lap.mat(i);
        out.set_mat(i, &(m.skew() + omega.mat(i)));
    }
    out
}

/// `Ω₀ = skew(P₀ᵗΔ_hP₀)` and the arm coefficients `C_k = P_iᵗ(P_k − P_i)`
/// assembled into the discrete linearization
///
/// ```text
/// Lζ = Δ_hζ + ½ Σ_k a_k (C_k δζ_k + δζ_k C_kᵗ) + [Ω₀, ζ]
/// ```
///
/// which is the exact derivative of `residual_F` along `P ↦ P(Id + ζ)`.
pub fn linearized_operator<'a>(dom: &'a GridDomain, p0: &Field) -> LinearOperatorSpec<'a> {
    let n = p0.rows();
    let mut lap = laplacian(dom, p0);
    lap.clear_boundary();
    let mut fl = ArmCoefficients::zeros(dom, n);
    let mut fr = ArmCoefficients::zeros(dom, n);
    let mut zl = Field::matrix(dom, n);
    let mut zr = Field::matrix(dom, n);
    for i in 0..dom.num_interior() {
        let pi = p0.mat(i);
        let pit = pi.transpose();
        for k in 0..dom.arms() {
            let pk = Mat::from_slice(n, p0.arm_value(dom, i, k));
            let c = (pit * (pk - pi)).scale(0.5 * dom.lap_weight(i, k));
            fl.get_mut(i, k).copy_from_slice(c.as_slice());
            fr.get_mut(i, k).copy_from_slice(c.transpose().as_slice());
        }
        let om = (pit * lap.mat(i)).skew();
        zl.set_mat(i, &om);
        zr.set_mat(i, &(-om));
    }
    LinearOperatorSpec {
        domain: dom,
        rows: n,
        cols: n,
        first_left: Some(fl),
        first_right: Some(fr),
        zero_left: Some(zl),
        zero_right: Some(zr),
    }
}

/// `L_{P₀} ζ` for an antisymmetric field `ζ` with zero boundary values.
pub fn linearized_apply(dom: &GridDomain, p0: &Field, zeta: &Field) -> Field {
    linearized_operator(dom, p0).apply(zeta)
}

/// `∫|∇P|^m`, with `|∇P|² = Σ_d ‖∂_dP‖_F²`.
pub fn gradient_energy(dom: &GridDomain, p: &Field) -> f64 {
    let m = dom.dim();
    let g = gradient(dom, p);
    let mut acc = 0.0;
    for i in 0..dom.num_interior() {
        let s: f64 = g
            .iter()
            .map(|gd| gd.node(i).iter().map(|x| x * x).sum::<f64>())
            .sum();
        acc += abs_pow(sqrt(s), m as f64);
    }
    acc * dom.cell_volume()
}

fn half_m(dom: &GridDomain, f: &Field) -> f64 {
    lp_norm(dom, f, dom.dim() as f64 / 2.0, BallSpec::Whole).unwrap_or(0.0)
}

/// Newton–continuation along `Ω_t = tΩ`, `t = 1/steps, …, 1`.
///
/// Returns `U` (antisymmetric, zero on the boundary), `P = exp(U)` and the trace.
pub fn construct_p(
    dom: &GridDomain,
    omega: &AntisymmetricPotential,
    cfg: &ContinuationConfig,
) -> Result<(Field, Field, ContinuationTrace)> {
    let pre = Multigrid::new(dom);
    construct_p_with(&pre, dom, omega, cfg)
}

pub fn construct_p_with(
    pre: &Multigrid,
    dom: &GridDomain,
    omega: &AntisymmetricPotential,
    cfg: &ContinuationConfig,
) -> Result<(Field, Field, ContinuationTrace)> {
    cfg.validate()?;
    let n = omega.n();
    let mut trace = ContinuationTrace::default();
    let mut u = Field::matrix(dom, n);
    if omega.is_zero() {
        return Ok((u, Field::identity(dom, n), trace));
    }
    if omega.smoothness_passes == 0 {
        return Err(Error::InvalidInput(
            "potential must be mollified (smoothness_passes >= 1)".into(),
        ));
    }
    if omega.l_half_m_norm > cfg.omega_guard {
        return Err(Error::InvalidInput(alloc::format!(
            "|Omega|_(m/2) = {:.3e} above the guard {:.3e}",
            omega.l_half_m_norm,
            cfg.omega_guard
        )));
    }
    let target = cfg.newton_tol * f64::max(omega.l_half_m_norm, 1.0);
    let mut t_prev = 0.0;
    for stage in 1..=cfg.steps {
        let t = stage as f64 / cfg.steps as f64;
        if t_prev > 0.0 {
            u.scale(t / t_prev);
        }
        t_prev = t;
        let om_t = omega.scaled(t);
        let mut history = Vec::new();
        let mut iter = 0;
        let p = loop {
            let (p, lap) = exp_field(dom, &u);
            let r = residual_from(dom, &p, &lap, &om_t.omega);
            let rn = half_m(dom, &r);
            history.push(rn);
            if !rn.is_finite() || rn > 1e6 * history[0].max(target) {
                trace.newton_residuals.push(history);
                return Err(Error::MonitorBreach {
                    monitor: Monitor::Newton,
                    stage,
                    value: rn,
                    threshold: target,
                });
            }
            if rn <= target {
                break p;
            }
            if iter == cfg.newton_max {
                trace.newton_residuals.push(history);
                return Err(Error::MonitorBreach {
                    monitor: Monitor::Newton,
                    stage,
                    value: rn,
                    threshold: target,
                });
            }
            iter += 1;
            let spec = linearized_operator(dom, &p);
            let mut rhs = r;
            rhs.scale(-1.0);
            let forcing = (0.1 * rn).clamp(1e-13, 5e-5);
            let (zeta, rep) =
                solve_perturbed_with(pre, &spec, &rhs, &Field::matrix(dom, n), forcing)?;
            trace.linear_iterations += rep.iterations;
            for i in 0..dom.num_interior() {
                let ui = AntisymMatrix::from_mat(&u.mat(i));
                let z = AntisymMatrix::from_mat(&zeta.mat(i));
                let eta = dexp_conj_inverse(&ui, &z)?;
                let next = AntisymMatrix::from_mat(&(ui.to_mat() + eta.to_mat()));
                u.set_mat(i, &next.to_mat());
            }
        };
        trace.newton_iterations += iter;
        trace.newton_residuals.push(history);

        let energy = gradient_energy(dom, &p);
        let (_, lap) = exp_field(dom, &u);
        let second = half_m(dom, &lap);
        let mut two_omega0 = Field::matrix(dom, n);
        for i in 0..dom.num_interior() {
            let m = p.mat(i).transpose() * lap.mat(i);
            two_omega0.set_mat(i, &(m - m.transpose()));
        }
        let denom = half_m(dom, &two_omega0);
        trace
            .second_order_ratio
            .push(if denom > 0.0 { second / denom } else { 0.0 });
        trace.gradient_energy.push(energy);
        trace.second_order_norm.push(second);
        if energy > cfg.eps0_monitor {
            return Err(Error::MonitorBreach {
                monitor: Monitor::GradientEnergy,
                stage,
                value: energy,
                threshold: cfg.eps0_monitor,
            });
        }
        if second > cfg.eps1_monitor {
            return Err(Error::MonitorBreach {
                monitor: Monitor::SecondOrder,
                stage,
                value: second,
                threshold: cfg.eps1_monitor,
            });
        }
    }
    let (p, _) = exp_field(dom, &u);
    Ok((u, p, trace))
}
