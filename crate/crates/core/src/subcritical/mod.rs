//! The Schrödinger system `−Δv = Ωv`, its conservation form
//! `div(∇(Av) − 2∇A·v) = 0`, and local decay (Morrey) experiments.

mod morrey;

pub use morrey::{
    decay_experiment, default_exponents, fit_gamma, integrability_report, least_squares_slope,
    local_decomposition, DecayReport, DecayRow, IntegrabilityReport, LocalDecomposition,
};

use alloc::vec::Vec;

use crate::domain::{divergence, gradient, laplacian, Field, GridDomain};
use crate::elliptic::{
    solve_perturbed_with, ArmCoefficients, LinearOperatorSpec, Multigrid, SolveReport,
};
use crate::error::{Error, Result};
use crate::gauge::AntisymmetricPotential;
use crate::liealg::{gemm_acc, Mat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSource {
    Direct,
    Conservation,
    Manufactured,
}

/// A vector-valued solution with its provenance and solve record.
#[derive(Clone, Debug)]
pub struct StateField {
    pub v: Field,
    pub source: StateSource,
    pub report: SolveReport,
}

/// `Δ_hv + Ωv = 0` in the interior, `v = g` on the boundary.
pub fn solve_direct(
    dom: &GridDomain,
    omega: &AntisymmetricPotential,
    g: &Field,
    tol: f64,
) -> Result<StateField> {
    let pre = Multigrid::new(dom);
    solve_direct_with(&pre, dom, omega, g, tol)
}

pub fn solve_direct_with(
    pre: &Multigrid,
    dom: &GridDomain,
    omega: &AntisymmetricPotential,
    g: &Field,
    tol: f64,
) -> Result<StateField> {
    let n = omega.n();
    if g.rows() != n || g.cols() != 1 {
        return Err(Error::InvalidInput(
            "boundary data must be an n-vector field".into(),
        ));
    }
    let mut spec = LinearOperatorSpec::laplacian(dom, n, 1);
    spec.zero_left = Some(omega.omega.clone());
    let (v, report) = solve_perturbed_with(pre, &spec, &Field::vector(dom, n), g, tol)?;
    Ok(StateField {
        v,
        source: StateSource::Direct,
        report,
    })
}

/// `T(v) = Δ_h(Av) − 2 div_h(∇_hA·v)`, using `v`'s boundary values.
pub fn conservation_operator(dom: &GridDomain, a: &Field, v: &Field) -> Field {
    let av = a.mul(v);
    let mut t = laplacian(dom, &av);
    let ga = gradient(dom, a);
    let flux: Vec<Field> = ga.iter().map(|gd| gd.mul(v)).collect();
    t.axpy(-2.0, &divergence(dom, &flux));
    t
}

/// L¹ norm of [`conservation_operator`] over nodes farther than `2h` from the sphere.
pub fn conservation_residual(dom: &GridDomain, a: &Field, v: &Field) -> f64 {
    conservation_residual_beyond(dom, a, v, 2.0 * dom.spacing())
}

/// L¹ norm of [`conservation_operator`] over nodes farther than `depth` from the sphere.
pub fn conservation_residual_beyond(dom: &GridDomain, a: &Field, v: &Field, depth: f64) -> f64 {
    let t = conservation_operator(dom, a, v);
    let mut acc = 0.0;
    for i in 0..dom.num_interior() {
        if dom.distance_to_boundary(i) > depth {
            acc += crate::math::sqrt(t.node(i).iter().map(|x| x * x).sum());
        }
    }
    acc * dom.cell_volume()
}

/// Solves `T(v) = 0`, `v = g` on the boundary. The equation is multiplied by
/// `A_i⁻¹` node-wise so that its principal part is the plain Laplacian.
pub fn solve_conservation(dom: &GridDomain, a: &Field, g: &Field, tol: f64) -> Result<StateField> {
    let pre = Multigrid::new(dom);
    solve_conservation_with(&pre, dom, a, g, tol)
}

pub fn solve_conservation_with(
    pre: &Multigrid,
    dom: &GridDomain,
    a: &Field,
    g: &Field,
    tol: f64,
) -> Result<StateField> {
    let n = a.rows();
    if g.rows() != n || g.cols() != 1 {
        return Err(Error::InvalidInput(
            "boundary data must be an n-vector field".into(),
        ));
    }
    let ga = gradient(dom, a);
    let mut fl = ArmCoefficients::zeros(dom, n);
    let mut zl = Field::matrix(dom, n);
    for i in 0..dom.num_interior() {
        let ai = a.mat(i);
        let inv = ai
            .inverse()
            .ok_or_else(|| Error::InvalidInput(alloc::format!("gauge singular at node {i}")))?;
        let mut z = Mat::zeros(n);
        for k in 0..dom.arms() {
            let d = k / 2;
            let ak = Mat::from_slice(n, a.arm_value(dom, i, k));
            let gk = Mat::from_slice(n, ga[d].arm_value(dom, i, k));
            let gi = ga[d].mat(i);
            let lw = dom.lap_weight(i, k);
            let gw = dom.grad_weight(i, k);
            let coeff = (ak - ai).scale(lw) - gk.scale(2.0 * gw);
            fl.get_mut(i, k).copy_from_slice((inv * coeff).as_slice());
            z += (ak - ai).scale(lw) - (gk - gi).scale(2.0 * gw);
        }
        zl.set_mat(i, &(inv * z));
    }
    let mut spec = LinearOperatorSpec::laplacian(dom, n, 1);
    spec.first_left = Some(fl);
    spec.zero_left = Some(zl);
    let (v, report) = solve_perturbed_with(pre, &spec, &Field::vector(dom, n), g, tol)?;
    Ok(StateField {
        v,
        source: StateSource::Conservation,
        report,
    })
}

/// `‖v − u‖_{L²} / ‖u‖_{L²}`.
pub fn relative_l2(dom: &GridDomain, v: &Field, u: &Field) -> f64 {
    use crate::domain::{lp_norm, BallSpec};
    let d = lp_norm(dom, &v.sub(u), 2.0, BallSpec::Whole).unwrap_or(0.0);
    let s = lp_norm(dom, u, 2.0, BallSpec::Whole).unwrap_or(0.0);
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

/// The exact solution `v = e^{k·x}(cos l·x, sin l·x)` of `−Δv = 2(k·l)Jv`
/// for `|k| = |l|`, `J = [[0, 1], [−1, 0]]`.
#[derive(Clone, Copy, Debug)]
pub struct Manufactured {
    pub k: [f64; crate::domain::MAX_DIM],
    pub l: [f64; crate::domain::MAX_DIM],
    pub m: usize,
}

impl Manufactured {
    pub fn new(k: &[f64], l: &[f64]) -> Result<Self> {
        let m = k.len();
        if l.len() != m || m > crate::domain::MAX_DIM {
            return Err(Error::InvalidInput(
                "k and l must share the dimension".into(),
            ));
        }
        let kk: f64 = k.iter().map(|x| x * x).sum();
        let ll: f64 = l.iter().map(|x| x * x).sum();
        if (kk - ll).abs() > 1e-12 * kk.max(1.0) {
            return Err(Error::InvalidInput("|k| must equal |l|".into()));
        }
        let mut a = [0.0; crate::domain::MAX_DIM];
        let mut b = [0.0; crate::domain::MAX_DIM];
        a[..m].copy_from_slice(k);
        b[..m].copy_from_slice(l);
        Ok(Manufactured { k: a, l: b, m })
    }

    pub fn k_dot_l(&self) -> f64 {
        self.k[..self.m]
            .iter()
            .zip(&self.l[..self.m])
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `2(k·l)J`.
    pub fn omega_matrix(&self) -> Mat {
        let c = 2.0 * self.k_dot_l();
        Mat::from_slice(2, &[0.0, c, -c, 0.0])
    }

    pub fn value(&self, x: &[f64]) -> [f64; 2] {
        let e = crate::math::exp(x.iter().zip(&self.k).map(|(a, b)| a * b).sum());
        let t: f64 = x.iter().zip(&self.l).map(|(a, b)| a * b).sum();
        [e * crate::math::cos(t), e * crate::math::sin(t)]
    }

    pub fn potential(&self, dom: &GridDomain) -> Result<AntisymmetricPotential> {
        let om = Field::constant(dom, 2, 2, self.omega_matrix().as_slice());
        AntisymmetricPotential::new(dom, om, 1)
    }

    pub fn field(&self, dom: &GridDomain) -> Field {
        Field::from_fn(dom, 2, 1, |x, o| o.copy_from_slice(&self.value(x)))
    }
}

/// `Ωv` node-wise, for checks.
pub fn apply_potential(dom: &GridDomain, omega: &Field, v: &Field) -> Field {
    let n = omega.rows();
    let mut out = Field::vector(dom, n);
    for i in 0..dom.num_interior() {
        gemm_acc(omega.node(i), v.node(i), out.node_mut(i), n, n, 1);
    }
    out
}

#[cfg(test)]
mod tests;
