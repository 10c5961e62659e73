//! Discrete geometry of a ball in ℝ^m.
//!
//! A [`GridDomain`] is the set of nodes of the uniform lattice `h·ℤ^m ∩ [−1, 1]^m`
//! lying strictly inside a ball. Each interior node has `2m` arms, one per axis
//! direction; an arm ends either at another interior node (length `h`) or at the
//! point where the axis line meets the sphere (length `s ≤ h`), which is where
//! Dirichlet data lives. The Laplacian uses the Shortley–Weller weights for
//! unequal arms, so every off-diagonal weight is positive and the discrete
//! maximum principle holds.
//!
//! Arms are numbered `2d` (towards −e_d) and `2d + 1` (towards +e_d).

mod field;
mod ops;

pub use field::Field;
pub use ops::{
    divergence, extrapolate_boundary, gradient, laplacian, lp_norm, pairing, sobolev2_norm,
    BallSpec,
};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 5;

/// Far end of an arm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Neighbor {
    Interior(u32),
    Boundary(u32),
}

/// An arm that leaves the ball: Dirichlet data is imposed at `point`.
#[derive(Clone, Debug)]
pub struct BoundaryArm {
    /// Interior node owning the arm.
    pub node: u32,
    /// Arm number, `2d` or `2d + 1`.
    pub arm: u8,
    /// Distance from the node to the sphere along the axis.
    pub length: f64,
    /// Lexicographic index of the exterior lattice node the arm points to.
    pub ghost: Option<usize>,
    point: [f64; MAX_DIM],
}

impl BoundaryArm {
    pub fn point(&self, m: usize) -> &[f64] {
        &self.point[..m]
    }

    pub fn axis(&self) -> usize {
        self.arm as usize / 2
    }
}

#[derive(Clone, Debug)]
pub struct GridDomain {
    m: usize,
    n_axis: usize,
    h: f64,
    center: [f64; MAX_DIM],
    radius: f64,
    grid_index: Vec<usize>,
    coords: Vec<f64>,
    neighbors: Vec<Neighbor>,
    arm_len: Vec<f64>,
    lap_w: Vec<f64>,
    lap_diag: Vec<f64>,
    grad_w: Vec<f64>,
    boundary: Vec<BoundaryArm>,
}

impl GridDomain {
    /// The unit ball B^m on an N-point-per-axis lattice.
    pub fn ball(m: usize, n_axis: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidInput(alloc::format!(
                "dimension m = {m}: the construction requires m >= 3"
            )));
        }
        if m > MAX_DIM {
            return Err(Error::InvalidInput(alloc::format!(
                "dimension m = {m} above the supported maximum {MAX_DIM}"
            )));
        }
        if n_axis < 9 || n_axis % 2 == 0 {
            return Err(Error::InvalidInput(alloc::format!(
                "points per axis N = {n_axis}: need an odd N >= 9"
            )));
        }
        Ok(Self::build(m, n_axis, &[0.0; MAX_DIM][..m], 1.0))
    }

    /// `B_r(x₀)` on the same lattice, with its own Shortley–Weller arms.
    pub fn sub_ball(&self, center: &[f64], radius: f64) -> Result<Self> {
        if center.len() != self.m {
            return Err(Error::InvalidInput(
                "sub-ball center has wrong dimension".into(),
            ));
        }
        let dist = sqrt(
            center
                .iter()
                .zip(&self.center[..self.m])
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        );
        if !(radius > 0.0) || dist + radius > self.radius * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(alloc::format!(
                "sub-ball (|x0| = {dist:.4}, r = {radius:.4}) not contained in the domain"
            )));
        }
        if 2.0 * radius < 4.0 * self.h * (1.0 - 1e-9) {
            return Err(Error::InvalidInput(alloc::format!(
                "sub-ball radius {radius:.4} spans fewer than 5 nodes at h = {:.4}",
                self.h
            )));
        }
        Ok(Self::build(self.m, self.n_axis, center, radius))
    }

    /// Same ball on the lattice with twice the spacing, for multigrid.
    pub(crate) fn coarse(&self) -> Option<Self> {
        if self.n_axis < 5 || (self.n_axis - 1) % 2 != 0 {
            return None;
        }
        let nc = (self.n_axis - 1) / 2 + 1;
        let d = Self::build(self.m, nc, &self.center[..self.m], self.radius);
        if d.num_interior() == 0 {
            None
        } else {
            Some(d)
        }
    }

    fn inside(&self, x: &[f64]) -> bool {
        let d2: f64 = x
            .iter()
            .zip(&self.center[..self.m])
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        self.radius * self.radius - d2 > 1e-9 * self.h * self.radius
    }

    fn build(m: usize, n_axis: usize, center: &[f64], radius: f64) -> Self {
        let h = 2.0 / (n_axis - 1) as f64;
        let mut c = [0.0; MAX_DIM];
        c[..m].copy_from_slice(center);
        let mut dom = GridDomain {
            m,
            n_axis,
            h,
            center: c,
            radius,
            grid_index: Vec::new(),
            coords: Vec::new(),
            neighbors: Vec::new(),
            arm_len: Vec::new(),
            lap_w: Vec::new(),
            lap_diag: Vec::new(),
            grad_w: Vec::new(),
            boundary: Vec::new(),
        };

        // Lattice index range covering the ball along each axis.
        let mut lo = [0usize; MAX_DIM];
        let mut hi = [0usize; MAX_DIM];
        for d in 0..m {
            let a = ((c[d] - radius + 1.0) / h).floor_safe().max(0.0) as usize;
            let b = ((c[d] + radius + 1.0) / h)
                .ceil_safe()
                .min((n_axis - 1) as f64) as usize;
            lo[d] = a;
            hi[d] = b;
        }

        let mut idx = lo;
        let mut x = [0.0; MAX_DIM];
        'outer: loop {
            for d in 0..m {
                x[d] = -1.0 + idx[d] as f64 * h;
            }
            if dom.inside(&x[..m]) {
                dom.grid_index.push(dom.lex(&idx[..m]));
                dom.coords.extend_from_slice(&x[..m]);
            }
            // odometer, last axis fastest: keeps grid_index sorted
            let mut d = m;
            loop {
                if d == 0 {
                    break 'outer;
                }
                d -= 1;
                if idx[d] < hi[d] {
                    idx[d] += 1;
                    for e in d + 1..m {
                        idx[e] = lo[e];
                    }
                    break;
                }
            }
        }

        let count = dom.grid_index.len();
        let arms = 2 * m;
        dom.neighbors.reserve(count * arms);
        dom.arm_len.reserve(count * arms);
        for i in 0..count {
            let gi = dom.grid_index[i];
            let multi = dom.unlex(gi);
            let xi: [f64; MAX_DIM] = {
                let mut t = [0.0; MAX_DIM];
                t[..m].copy_from_slice(&dom.coords[i * m..i * m + m]);
                t
            };
            for d in 0..m {
                for side in 0..2 {
                    let sign: isize = if side == 0 { -1 } else { 1 };
                    let j = multi[d] as isize + sign;
                    let on_grid = j >= 0 && (j as usize) < n_axis;
                    let mut found = None;
                    let mut ghost = None;
                    if on_grid {
                        let mut nb = multi;
                        nb[d] = j as usize;
                        let g = dom.lex(&nb[..m]);
                        found = dom.locate(g);
                        ghost = Some(g);
                    }
                    match found {
                        Some(k) => {
                            dom.neighbors.push(Neighbor::Interior(k));
                            dom.arm_len.push(h);
                        }
                        None => {
                            let rel = xi[d] - c[d];
                            let rest: f64 =
                                (0..m).map(|e| (xi[e] - c[e]) * (xi[e] - c[e])).sum::<f64>()
                                    - rel * rel;
                            let disc = (radius * radius - rest).max(0.0);
                            let t = -(sign as f64) * rel + sqrt(disc);
                            let s = t.clamp(1e-12 * h, h);
                            let mut p = xi;
                            p[d] += sign as f64 * s;
                            let id = dom.boundary.len() as u32;
                            dom.boundary.push(BoundaryArm {
                                node: i as u32,
                                arm: (2 * d + side) as u8,
                                length: s,
                                ghost,
                                point: p,
                            });
                            dom.neighbors.push(Neighbor::Boundary(id));
                            dom.arm_len.push(s);
                        }
                    }
                }
            }
        }

        dom.lap_w = alloc::vec![0.0; count * arms];
        dom.grad_w = alloc::vec![0.0; count * arms];
        dom.lap_diag = alloc::vec![0.0; count];
        for i in 0..count {
            let mut diag = 0.0;
            for d in 0..m {
                let hm = dom.arm_len[i * arms + 2 * d];
                let hp = dom.arm_len[i * arms + 2 * d + 1];
                let wm = 2.0 / (hm * (hm + hp));
                let wp = 2.0 / (hp * (hm + hp));
                dom.lap_w[i * arms + 2 * d] = wm;
                dom.lap_w[i * arms + 2 * d + 1] = wp;
                diag -= wm + wp;
                dom.grad_w[i * arms + 2 * d] = -hp / (hm * (hm + hp));
                dom.grad_w[i * arms + 2 * d + 1] = hm / (hp * (hm + hp));
            }
            dom.lap_diag[i] = diag;
        }
        dom
    }

    fn lex(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &v| acc * self.n_axis + v)
    }

    fn unlex(&self, mut g: usize) -> [usize; MAX_DIM] {
        let mut out = [0usize; MAX_DIM];
        for d in (0..self.m).rev() {
            out[d] = g % self.n_axis;
            g /= self.n_axis;
        }
        out
    }

    /// Interior index of the lattice node with lexicographic index `g`.
    pub fn locate(&self, g: usize) -> Option<u32> {
        self.grid_index.binary_search(&g).ok().map(|k| k as u32)
    }

    /// Multi-index of an arbitrary lattice node.
    pub fn lattice_multi_index(&self, g: usize) -> [usize; MAX_DIM] {
        self.unlex(g)
    }

    pub fn lattice_index(&self, multi: &[usize]) -> usize {
        self.lex(multi)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Points per axis of the underlying lattice.
    pub fn points_per_axis(&self) -> usize {
        self.n_axis
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn center(&self) -> &[f64] {
        &self.center[..self.m]
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Quadrature weight of every interior node.
    pub fn cell_volume(&self) -> f64 {
        let mut v = 1.0;
        for _ in 0..self.m {
            v *= self.h;
        }
        v
    }

    /// Total lattice size `N^m`.
    pub fn lattice_len(&self) -> usize {
        let mut v = 1;
        for _ in 0..self.m {
            v *= self.n_axis;
        }
        v
    }

    pub fn num_interior(&self) -> usize {
        self.grid_index.len()
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary.len()
    }

    #[inline]
    pub fn arms(&self) -> usize {
        2 * self.m
    }

    #[inline]
    pub fn coords(&self, i: usize) -> &[f64] {
        &self.coords[i * self.m..(i + 1) * self.m]
    }

    pub fn grid_index(&self, i: usize) -> usize {
        self.grid_index[i]
    }

    #[inline]
    pub fn neighbor(&self, i: usize, k: usize) -> Neighbor {
        self.neighbors[i * 2 * self.m + k]
    }

    #[inline]
    pub fn arm_length(&self, i: usize, k: usize) -> f64 {
        self.arm_len[i * 2 * self.m + k]
    }

    /// Shortley–Weller weight of arm `k` at node `i`.
    #[inline]
    pub fn lap_weight(&self, i: usize, k: usize) -> f64 {
        self.lap_w[i * 2 * self.m + k]
    }

    #[inline]
    pub fn lap_weights(&self, i: usize) -> &[f64] {
        &self.lap_w[i * 2 * self.m..(i + 1) * 2 * self.m]
    }

    #[inline]
    pub fn lap_diag(&self, i: usize) -> f64 {
        self.lap_diag[i]
    }

    /// Weight of arm `k` in the three-point first derivative along its axis.
    #[inline]
    pub fn grad_weight(&self, i: usize, k: usize) -> f64 {
        self.grad_w[i * 2 * self.m + k]
    }

    #[inline]
    pub fn grad_weights(&self, i: usize) -> &[f64] {
        &self.grad_w[i * 2 * self.m..(i + 1) * 2 * self.m]
    }

    pub fn boundary_arms(&self) -> &[BoundaryArm] {
        &self.boundary
    }

    /// True when all `2m` arms of node `i` end at interior nodes.
    pub fn has_full_stencil(&self, i: usize) -> bool {
        (0..self.arms()).all(|k| matches!(self.neighbor(i, k), Neighbor::Interior(_)))
    }

    /// Distance from node `i` to the bounding sphere.
    pub fn distance_to_boundary(&self, i: usize) -> f64 {
        let x = self.coords(i);
        let d2: f64 = x
            .iter()
            .zip(self.center())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        self.radius - sqrt(d2)
    }

    /// Nearest lattice node to `x` (coordinates, not necessarily interior).
    pub fn snap_to_lattice(&self, x: &[f64]) -> [f64; MAX_DIM] {
        let mut out = [0.0; MAX_DIM];
        for d in 0..self.m {
            let k = ((x[d] + 1.0) / self.h + 0.5).floor_safe();
            let k = k.clamp(0.0, (self.n_axis - 1) as f64);
            out[d] = -1.0 + k * self.h;
        }
        out
    }
}

trait FloorCeil {
    fn floor_safe(self) -> f64;
    fn ceil_safe(self) -> f64;
}

impl FloorCeil for f64 {
    fn floor_safe(self) -> f64 {
        libm::floor(self)
    }
    fn ceil_safe(self) -> f64 {
        libm::ceil(self)
    }
}
