//! Construction of the gauge `A = QP` for `−Δv = Ωv` with antisymmetric `Ω`.
//!
//! `P = exp(U)` solves `skew(PᵗΔP) + Ω = 0` with `P = Id` on the sphere and is
//! found by Newton continuation along `tΩ` ([`construct_p`]). `Q` then solves
//! the linear system `ΔQ + 2Σ_d ∂_dQ G_d + Q Σ_d G_d² = 0`, `G_d = ∂_dP Pᵗ`,
//! with `Q = Id` on the sphere ([`construct_q`]). Their product satisfies
//! `ΔA + AΩ = 0` up to discretization error, and [`verify_gauge`] measures the
//! distance of `A` and `Q` to O(n) together with the supporting estimates.

mod newton;
mod potential;

pub use newton::{
    construct_p, construct_p_with, exp_field, gradient_energy, linearized_apply,
    linearized_operator, residual_f, ContinuationConfig, ContinuationTrace,
};
pub use potential::{mollify, AntisymmetricPotential};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{gradient, laplacian, lp_norm, BallSpec, Field, GridDomain};
use crate::elliptic::{
    solve_perturbed_with, ArmCoefficients, LinearOperatorSpec, Multigrid, SolveReport,
};
use crate::error::Result;
use crate::liealg::{project_orthogonal, Mat, MAX_N};
use crate::math::{powf, sqrt};

/// Side information from [`construct_q`].
#[derive(Clone, Debug)]
pub struct QReport {
    pub solve: SolveReport,
    /// `−Σ_d G_d²`, node-wise symmetric positive semi-definite.
    pub coefficient: Field,
    /// Smallest eigenvalue of the coefficient over all nodes.
    pub coefficient_min_eigenvalue: f64,
    /// Largest `‖C − Cᵗ‖_F` of the coefficient.
    pub coefficient_symmetry_defect: f64,
    /// `∫|∇P|^m`.
    pub gradient_energy: f64,
}

/// `G_d = skew(∂_dP Pᵗ)` at interior nodes.
fn connection(dom: &GridDomain, p: &Field) -> Vec<Field> {
    let n = p.rows();
    let grads = gradient(dom, p);
    grads
        .iter()
        .map(|gd| {
            let mut out = Field::matrix(dom, n);
            for i in 0..dom.num_interior() {
                out.set_mat(i, &(gd.mat(i) * p.mat(i).transpose()).skew());
            }
            out
        })
        .collect()
}

/// Solves for `Q` with `Q = Id` on the boundary.
///
/// Fails with `SolverDivergence` if the Krylov solve does not converge, which
/// happens when `∫|∇P|^m` is too large for the perturbed operator.
pub fn construct_q(dom: &GridDomain, p: &Field, tol: f64) -> Result<(Field, QReport)> {
    let pre = Multigrid::new(dom);
    construct_q_with(&pre, dom, p, tol)
}

pub fn construct_q_with(
    pre: &Multigrid,
    dom: &GridDomain,
    p: &Field,
    tol: f64,
) -> Result<(Field, QReport)> {
    let n = p.rows();
    let energy = gradient_energy(dom, p);
    let g = connection(dom, p);
    let mut fr = ArmCoefficients::zeros(dom, n);
    let mut c = Field::matrix(dom, n);
    let mut coeff = Field::matrix(dom, n);
    let mut min_eig = f64::INFINITY;
    let mut sym_defect: f64 = 0.0;
    for i in 0..dom.num_interior() {
        let mut ci = Mat::zeros(n);
        for (d, gd) in g.iter().enumerate() {
            let gi = gd.mat(i);
            ci += gi * gi;
            for side in 0..2 {
                let k = 2 * d + side;
                let w = 2.0 * dom.grad_weight(i, k);
                fr.get_mut(i, k).copy_from_slice(gi.scale(w).as_slice());
            }
        }
        c.set_mat(i, &ci);
        let neg = -ci;
        coeff.set_mat(i, &neg);
        sym_defect = sym_defect.max(neg.symmetry_defect());
        let (ev, _) = neg.sym().sym_eigenvalues();
        min_eig = min_eig.min(ev[0]);
    }
    if dom.num_interior() == 0 {
        min_eig = 0.0;
    }
    let spec = LinearOperatorSpec {
        domain: dom,
        rows: n,
        cols: n,
        first_left: None,
        first_right: Some(fr),
        zero_left: None,
        zero_right: Some(c),
    };
    let ident = Field::identity(dom, n);
    if g.iter().all(|gd| gd.interior().iter().all(|&x| x == 0.0)) {
        // No connection: the boundary data itself is the solution.
        let solve = SolveReport {
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
            wall_time: 0.0,
        };
        return Ok((
            ident,
            QReport {
                solve,
                coefficient: coeff,
                coefficient_min_eigenvalue: min_eig,
                coefficient_symmetry_defect: sym_defect,
                gradient_energy: energy,
            },
        ));
    }
    // Q = Id + E with E = 0 on the boundary and ΔE + 2Σ∂E·G + EC = −C, so the
    // relative tolerance is measured against the small forcing, not the lift.
    let mut rhs = spec.zero_right.clone().unwrap();
    rhs.scale(-1.0);
    let (mut q, solve) = solve_perturbed_with(pre, &spec, &rhs, &Field::matrix(dom, n), tol)?;
    q.axpy(1.0, &ident);
    Ok((
        q,
        QReport {
            solve,
            coefficient: coeff,
            coefficient_min_eigenvalue: min_eig,
            coefficient_symmetry_defect: sym_defect,
            gradient_energy: energy,
        },
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeDiagnostics {
    /// `‖residual_F(U, Ω)‖_{L^{m/2}}`.
    pub residual_p: f64,
    /// `‖Δ_hA + AΩ‖_{L^{m/2}}`.
    pub residual_a: f64,
    /// `max_{B_{1/2}} dist(A, O(n))`.
    pub dist_a_on: f64,
    /// `‖Δ_h(X − Id)‖_{L^{m/2}}` for `X` in `{"A", "P", "Q"}`.
    pub w2_proxy_norms: BTreeMap<String, f64>,
    pub continuation_steps: usize,
}

#[derive(Clone, Debug)]
pub struct GaugeTriple {
    pub u: Field,
    pub p: Field,
    pub q: Field,
    pub a: Field,
    pub diagnostics: GaugeDiagnostics,
}

fn half_m(dom: &GridDomain, f: &Field) -> f64 {
    lp_norm(dom, f, dom.dim() as f64 / 2.0, BallSpec::Whole).unwrap_or(0.0)
}

fn inner_half(dom: &GridDomain) -> BallSpec {
    BallSpec::ball(&[0.0; crate::domain::MAX_DIM][..dom.dim()], 0.5)
}

fn w2_proxy(dom: &GridDomain, x: &Field) -> f64 {
    let mut d = x.clone();
    d.axpy(-1.0, &Field::identity(dom, x.rows()));
    half_m(dom, &laplacian(dom, &d))
}

/// `A = QP` and its diagnostics.
pub fn assemble_a(
    dom: &GridDomain,
    u: Field,
    p: Field,
    q: Field,
    omega: &AntisymmetricPotential,
    continuation_steps: usize,
) -> GaugeTriple {
    let a = q.mul(&p);
    let mut res = laplacian(dom, &a);
    res.axpy(1.0, &a.mul(&omega.omega));
    res.clear_boundary();
    let residual_a = half_m(dom, &res);
    let residual_p = half_m(dom, &residual_f(dom, &u, omega));
    let region = inner_half(dom);
    let mut dist: f64 = 0.0;
    for i in 0..dom.num_interior() {
        if region.contains(dom, dom.coords(i)) {
            let d = match project_orthogonal(&a.mat(i)) {
                Ok(pr) => pr.dist,
                Err(_) => f64::INFINITY,
            };
            dist = dist.max(d);
        }
    }
    let mut w2 = BTreeMap::new();
    w2.insert(String::from("A"), w2_proxy(dom, &a));
    w2.insert(String::from("P"), w2_proxy(dom, &p));
    w2.insert(String::from("Q"), w2_proxy(dom, &q));
    GaugeTriple {
        u,
        p,
        q,
        a,
        diagnostics: GaugeDiagnostics {
            residual_p,
            residual_a,
            dist_a_on: dist,
            w2_proxy_norms: w2,
            continuation_steps,
        },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub residual_a: f64,
    pub dist_a_on: f64,
    /// `max_{B_{1/2}} dist(Q, O(n))`.
    pub dist_q_on: f64,
    /// `∫|∇P|^m`.
    pub gradient_energy: f64,
    /// `dist_q_on / (∫|∇P|^m)^{2/m}`.
    pub dist_q_ratio: f64,
    /// `‖Δ_h(Q − Id)‖_{L^{m/2}}`.
    pub q_proxy: f64,
    /// `q_proxy / (∫|∇P|^m)^{2/m}`.
    pub q_proxy_ratio: f64,
    /// `max_X sup_{B_{1/2}}(|X|² − |QᵗX|²) / ∫(|X|² − |QᵗX|²)`.
    pub harnack_ratio: f64,
    /// `max_{nodes, X} |QᵗX|²`.
    pub max_qtx_sq: f64,
    /// `min_{nodes, X} Δ_h(XᵗQQᵗX)`.
    pub min_subharmonic: f64,
    /// Largest `‖S − Sᵗ‖_F` from projecting `Q` on `B_{1/2}`.
    pub s_symmetry_defect: f64,
    pub coefficient_min_eigenvalue: f64,
    pub coefficient_symmetry_defect: f64,
    pub samples: usize,
}

impl VerificationReport {
    pub fn all_finite(&self) -> bool {
        [
            self.residual_a,
            self.dist_a_on,
            self.dist_q_on,
            self.gradient_energy,
            self.dist_q_ratio,
            self.q_proxy,
            self.q_proxy_ratio,
            self.harnack_ratio,
            self.max_qtx_sq,
            self.min_subharmonic,
            self.s_symmetry_defect,
            self.coefficient_min_eigenvalue,
            self.coefficient_symmetry_defect,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// Seeded unit vectors in ℝ^n.
pub fn random_unit_vectors(n: usize, count: usize, seed: u64) -> Vec<[f64; MAX_N]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut x = [0.0; MAX_N];
        for v in x.iter_mut().take(n) {
            *v = rng.gen_range(-1.0..=1.0);
        }
        let r = sqrt(x.iter().map(|v| v * v).sum());
        if r > 0.1 && r <= 1.0 {
            x.iter_mut().for_each(|v| *v /= r);
            out.push(x);
        }
    }
    out
}

/// Measures the gauge properties of an assembled triple using `samples`
/// seeded unit vectors `X`.
pub fn verify_gauge(
    dom: &GridDomain,
    triple: &GaugeTriple,
    q_report: &QReport,
    samples: usize,
    seed: u64,
) -> VerificationReport {
    let m = dom.dim() as f64;
    let n = triple.q.rows();
    let q = &triple.q;
    let region = inner_half(dom);

    let mut dist_q: f64 = 0.0;
    let mut s_defect: f64 = 0.0;
    for i in 0..dom.num_interior() {
        if region.contains(dom, dom.coords(i)) {
            match project_orthogonal(&q.mat(i)) {
                Ok(pr) => {
                    dist_q = dist_q.max(pr.dist);
                    s_defect = s_defect.max(pr.s.symmetry_defect());
                }
                Err(_) => dist_q = f64::INFINITY,
            }
        }
    }
    let energy = q_report.gradient_energy;
    let scale = powf(energy, 2.0 / m);
    let ratio = |x: f64| if scale > 0.0 { x / scale } else { 0.0 };
    let q_proxy = w2_proxy(dom, q);

    let xs = random_unit_vectors(n, samples, seed);
    let mut max_sq: f64 = 0.0;
    let mut min_sub = f64::INFINITY;
    let mut harnack: f64 = 0.0;
    let mut f = Field::scalar(dom);
    for x in &xs {
        let x2: f64 = x[..n].iter().map(|v| v * v).sum();
        for i in 0..dom.num_interior() {
            let qt = q.mat(i).transpose();
            let y = qt.mul_vec(&x[..n]);
            let s: f64 = y[..n].iter().map(|v| v * v).sum();
            f.node_mut(i)[0] = s;
            max_sq = max_sq.max(s);
        }
        f.boundary_mut().iter_mut().for_each(|v| *v = x2);
        let lap = laplacian(dom, &f);
        for i in 0..dom.num_interior() {
            min_sub = min_sub.min(lap.node(i)[0]);
        }
        let mut sup: f64 = 0.0;
        let mut integral = 0.0;
        for i in 0..dom.num_interior() {
            let d = x2 - f.node(i)[0];
            integral += d;
            if region.contains(dom, dom.coords(i)) {
                sup = sup.max(d);
            }
        }
        integral *= dom.cell_volume();
        if integral > 0.0 {
            harnack = harnack.max(sup / integral);
        }
    }
    if xs.is_empty() || dom.num_interior() == 0 {
        min_sub = 0.0;
    }
    VerificationReport {
        residual_a: triple.diagnostics.residual_a,
        dist_a_on: triple.diagnostics.dist_a_on,
        dist_q_on: dist_q,
        gradient_energy: energy,
        dist_q_ratio: ratio(dist_q),
        q_proxy,
        q_proxy_ratio: ratio(q_proxy),
        harnack_ratio: harnack,
        max_qtx_sq: max_sq,
        min_subharmonic: min_sub,
        s_symmetry_defect: s_defect,
        coefficient_min_eigenvalue: q_report.coefficient_min_eigenvalue,
        coefficient_symmetry_defect: q_report.coefficient_symmetry_defect,
        samples,
    }
}
