use alloc::vec::Vec;

use super::{Field, GridDomain, Neighbor, MAX_DIM};
use crate::error::{Error, Result};
use crate::math::{abs_pow, powf, sqrt};

/// Integration region for [`lp_norm`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BallSpec {
    /// Every interior node of the domain.
    Whole,
    /// Nodes strictly inside `B_r(x₀)`, decided by node centers.
    Ball { center: [f64; MAX_DIM], radius: f64 },
}

impl BallSpec {
    pub fn ball(center: &[f64], radius: f64) -> Self {
        let mut c = [0.0; MAX_DIM];
        c[..center.len()].copy_from_slice(center);
        BallSpec::Ball { center: c, radius }
    }

    /// Membership rule shared with [`GridDomain::sub_ball`].
    #[inline]
    pub fn contains(&self, dom: &GridDomain, x: &[f64]) -> bool {
        match self {
            BallSpec::Whole => true,
            BallSpec::Ball { center, radius } => {
                let d2: f64 = x
                    .iter()
                    .zip(center.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                radius * radius - d2 > 1e-9 * dom.spacing() * radius
            }
        }
    }
}

/// Shortley–Weller Laplacian at interior nodes. Output boundary values are zero.
pub fn laplacian(dom: &GridDomain, f: &Field) -> Field {
    let b = f.block();
    let mut out = Field::zeros(dom, f.rows(), f.cols());
    for i in 0..dom.num_interior() {
        let fi = f.node(i);
        let w = dom.lap_weights(i);
        let o = out.node_mut(i);
        for (k, &a) in w.iter().enumerate() {
            let fk = f.arm_value(dom, i, k);
            for c in 0..b {
                o[c] += a * (fk[c] - fi[c]);
            }
        }
    }
    out
}

/// Fills the boundary values of a derived field by linear extrapolation along
/// each boundary arm from the node and its opposite neighbour (constant when
/// both arms of the axis leave the domain).
pub fn extrapolate_boundary(dom: &GridDomain, f: &mut Field) {
    let b = f.block();
    let mut tmp = [0.0; 64];
    for j in 0..dom.num_boundary() {
        let arm = &dom.boundary_arms()[j];
        let i = arm.node as usize;
        let k = arm.arm as usize;
        let opp = k ^ 1;
        let fi = f.node(i);
        match dom.neighbor(i, opp) {
            Neighbor::Interior(o) => {
                let t = arm.length / dom.arm_length(i, opp);
                let fo = f.node(o as usize);
                for c in 0..b {
                    tmp[c] = fi[c] + t * (fi[c] - fo[c]);
                }
            }
            Neighbor::Boundary(_) => tmp[..b].copy_from_slice(fi),
        }
        f.bnd_mut(j).copy_from_slice(&tmp[..b]);
    }
}

/// Three-point (non-uniform where arms are short) first derivatives; uses the
/// field's boundary values on boundary arms. Returned components carry
/// extrapolated boundary values.
pub fn gradient(dom: &GridDomain, f: &Field) -> Vec<Field> {
    let m = dom.dim();
    let b = f.block();
    let mut out: Vec<Field> = (0..m)
        .map(|_| Field::zeros(dom, f.rows(), f.cols()))
        .collect();
    for i in 0..dom.num_interior() {
        let fi = f.node(i);
        let w = dom.grad_weights(i);
        for d in 0..m {
            let fm = f.arm_value(dom, i, 2 * d);
            let fp = f.arm_value(dom, i, 2 * d + 1);
            let (wm, wp) = (w[2 * d], w[2 * d + 1]);
            let o = out[d].node_mut(i);
            for c in 0..b {
                o[c] = wm * (fm[c] - fi[c]) + wp * (fp[c] - fi[c]);
            }
        }
    }
    for g in out.iter_mut() {
        extrapolate_boundary(dom, g);
    }
    out
}

/// `Σ_d ∂_d F_d` with the same three-point derivative as [`gradient`].
pub fn divergence(dom: &GridDomain, fs: &[Field]) -> Field {
    assert_eq!(fs.len(), dom.dim());
    let b = fs[0].block();
    let mut out = Field::zeros(dom, fs[0].rows(), fs[0].cols());
    for i in 0..dom.num_interior() {
        let w = dom.grad_weights(i);
        for (d, f) in fs.iter().enumerate() {
            let fi = f.node(i);
            let fm = f.arm_value(dom, i, 2 * d);
            let fp = f.arm_value(dom, i, 2 * d + 1);
            let (wm, wp) = (w[2 * d], w[2 * d + 1]);
            let o = out.node_mut(i);
            for c in 0..b {
                o[c] += wm * (fm[c] - fi[c]) + wp * (fp[c] - fi[c]);
            }
        }
    }
    out
}

/// Discrete `2∇F·∇G`: `Σ_k a_k (F_k − F_i)(G_k − G_i)` with matrix products
/// taken in order. It is the defect in the exact product rule
/// `Δ_h(FG) = (Δ_hF)G + F(Δ_hG) + pairing(F, G)`.
pub fn pairing(dom: &GridDomain, f: &Field, g: &Field) -> Field {
    assert_eq!(f.cols(), g.rows());
    let (r, kk, c) = (f.rows(), f.cols(), g.cols());
    let mut out = Field::zeros(dom, r, c);
    let mut df = [0.0; 64];
    let mut dg = [0.0; 64];
    for i in 0..dom.num_interior() {
        let fi = f.node(i);
        let gi = g.node(i);
        for (k, &a) in dom.lap_weights(i).iter().enumerate() {
            let fk = f.arm_value(dom, i, k);
            let gk = g.arm_value(dom, i, k);
            for t in 0..r * kk {
                df[t] = a * (fk[t] - fi[t]);
            }
            for t in 0..kk * c {
                dg[t] = gk[t] - gi[t];
            }
            crate::liealg::gemm_acc(&df[..r * kk], &dg[..kk * c], out.node_mut(i), r, kk, c);
        }
    }
    out
}

/// `(Σ h^m |f_i|^p)^{1/p}` over the interior nodes in `region`, with block
/// values measured in the Frobenius norm. `p = ∞` gives the maximum.
pub fn lp_norm(dom: &GridDomain, f: &Field, p: f64, region: BallSpec) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(alloc::format!(
            "exponent p = {p} below 1"
        )));
    }
    let mut acc = 0.0;
    let mut count = 0usize;
    for i in 0..dom.num_interior() {
        if !region.contains(dom, dom.coords(i)) {
            continue;
        }
        count += 1;
        let v = sqrt(f.node(i).iter().map(|x| x * x).sum());
        if p.is_infinite() {
            acc = f64::max(acc, v);
        } else {
            acc += abs_pow(v, p);
        }
    }
    if count == 0 {
        return Err(Error::EmptyRegion);
    }
    if p.is_infinite() {
        Ok(acc)
    } else {
        Ok(powf(acc * dom.cell_volume(), 1.0 / p))
    }
}

/// `‖Δ_h f‖_{L^q}`, the proxy for the `W^{2,q}_0` norm.
pub fn sobolev2_norm(dom: &GridDomain, f: &Field, q: f64) -> f64 {
    lp_norm(dom, &laplacian(dom, f), q, BallSpec::Whole).unwrap_or(0.0)
}
