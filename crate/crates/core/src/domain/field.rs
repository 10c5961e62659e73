use alloc::vec;
use alloc::vec::Vec;

use super::{GridDomain, Neighbor};
use crate::liealg::Mat;

/// Block-valued grid function: a `rows × cols` block at every interior node and
/// at every boundary arm point. Blocks are stored row-major, node after node.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    rows: usize,
    cols: usize,
    interior: Vec<f64>,
    boundary: Vec<f64>,
}

impl Field {
    pub fn zeros(dom: &GridDomain, rows: usize, cols: usize) -> Self {
        Field {
            rows,
            cols,
            interior: vec![0.0; dom.num_interior() * rows * cols],
            boundary: vec![0.0; dom.num_boundary() * rows * cols],
        }
    }

    pub fn scalar(dom: &GridDomain) -> Self {
        Self::zeros(dom, 1, 1)
    }

    pub fn vector(dom: &GridDomain, n: usize) -> Self {
        Self::zeros(dom, n, 1)
    }

    pub fn matrix(dom: &GridDomain, n: usize) -> Self {
        Self::zeros(dom, n, n)
    }

    /// The same block everywhere, boundary included.
    pub fn constant(dom: &GridDomain, rows: usize, cols: usize, block: &[f64]) -> Self {
        assert_eq!(block.len(), rows * cols);
        let mut f = Self::zeros(dom, rows, cols);
        for c in f.interior.chunks_exact_mut(rows * cols) {
            c.copy_from_slice(block);
        }
        for c in f.boundary.chunks_exact_mut(rows * cols) {
            c.copy_from_slice(block);
        }
        f
    }

    pub fn identity(dom: &GridDomain, n: usize) -> Self {
        Self::constant(dom, n, n, Mat::identity(n).as_slice())
    }

    /// Samples `f(x, out)` at interior nodes and boundary arm points.
    pub fn from_fn<F>(dom: &GridDomain, rows: usize, cols: usize, mut f: F) -> Self
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let mut out = Self::zeros(dom, rows, cols);
        let b = rows * cols;
        for i in 0..dom.num_interior() {
            f(dom.coords(i), &mut out.interior[i * b..(i + 1) * b]);
        }
        let m = dom.dim();
        for (j, arm) in dom.boundary_arms().iter().enumerate() {
            f(arm.point(m), &mut out.boundary[j * b..(j + 1) * b]);
        }
        out
    }

    /// Overwrites the boundary values with samples of `g`.
    pub fn set_boundary_fn<F>(&mut self, dom: &GridDomain, mut g: F)
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let b = self.block();
        let m = dom.dim();
        for (j, arm) in dom.boundary_arms().iter().enumerate() {
            g(arm.point(m), &mut self.boundary[j * b..(j + 1) * b]);
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn block(&self) -> usize {
        self.rows * self.cols
    }

    pub fn num_nodes(&self) -> usize {
        self.interior.len() / self.block()
    }

    pub fn same_shape(&self, other: &Field) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.interior.len() == other.interior.len()
            && self.boundary.len() == other.boundary.len()
    }

    #[inline]
    pub fn node(&self, i: usize) -> &[f64] {
        let b = self.block();
        &self.interior[i * b..(i + 1) * b]
    }

    #[inline]
    pub fn node_mut(&mut self, i: usize) -> &mut [f64] {
        let b = self.block();
        &mut self.interior[i * b..(i + 1) * b]
    }

    #[inline]
    pub fn bnd(&self, j: usize) -> &[f64] {
        let b = self.block();
        &self.boundary[j * b..(j + 1) * b]
    }

    #[inline]
    pub fn bnd_mut(&mut self, j: usize) -> &mut [f64] {
        let b = self.block();
        &mut self.boundary[j * b..(j + 1) * b]
    }

    /// Value at the far end of arm `k` of node `i`.
    #[inline]
    pub fn arm_value(&self, dom: &GridDomain, i: usize, k: usize) -> &[f64] {
        match dom.neighbor(i, k) {
            Neighbor::Interior(j) => self.node(j as usize),
            Neighbor::Boundary(j) => self.bnd(j as usize),
        }
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    pub fn interior_mut(&mut self) -> &mut [f64] {
        &mut self.interior
    }

    pub fn boundary(&self) -> &[f64] {
        &self.boundary
    }

    pub fn boundary_mut(&mut self) -> &mut [f64] {
        &mut self.boundary
    }

    pub fn mat(&self, i: usize) -> Mat {
        debug_assert_eq!(self.rows, self.cols);
        Mat::from_slice(self.rows, self.node(i))
    }

    pub fn bnd_mat(&self, j: usize) -> Mat {
        debug_assert_eq!(self.rows, self.cols);
        Mat::from_slice(self.rows, self.bnd(j))
    }

    pub fn set_mat(&mut self, i: usize, a: &Mat) {
        self.node_mut(i).copy_from_slice(a.as_slice());
    }

    pub fn set_bnd_mat(&mut self, j: usize, a: &Mat) {
        self.bnd_mut(j).copy_from_slice(a.as_slice());
    }

    /// `self += a · other`, boundary included.
    pub fn axpy(&mut self, a: f64, other: &Field) {
        debug_assert!(self.same_shape(other));
        for (x, y) in self.interior.iter_mut().zip(&other.interior) {
            *x += a * y;
        }
        for (x, y) in self.boundary.iter_mut().zip(&other.boundary) {
            *x += a * y;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.interior.iter_mut().for_each(|x| *x *= a);
        self.boundary.iter_mut().for_each(|x| *x *= a);
    }

    pub fn scaled(&self, a: f64) -> Field {
        let mut f = self.clone();
        f.scale(a);
        f
    }

    pub fn add(&self, other: &Field) -> Field {
        let mut f = self.clone();
        f.axpy(1.0, other);
        f
    }

    pub fn sub(&self, other: &Field) -> Field {
        let mut f = self.clone();
        f.axpy(-1.0, other);
        f
    }

    pub fn clear_boundary(&mut self) {
        self.boundary.iter_mut().for_each(|x| *x = 0.0);
    }

    pub fn is_finite(&self) -> bool {
        self.interior
            .iter()
            .chain(&self.boundary)
            .all(|x| x.is_finite())
    }

    /// Node-wise matrix product `self · other`, boundary included.
    pub fn mul(&self, other: &Field) -> Field {
        assert_eq!(self.cols, other.rows);
        let (r, k, c) = (self.rows, self.cols, other.cols);
        let mut out = Field {
            rows: r,
            cols: c,
            interior: vec![0.0; self.num_nodes() * r * c],
            boundary: vec![0.0; self.boundary.len() / self.block() * r * c],
        };
        for i in 0..self.num_nodes() {
            crate::liealg::gemm_acc(
                &self.interior[i * r * k..(i + 1) * r * k],
                &other.interior[i * k * c..(i + 1) * k * c],
                &mut out.interior[i * r * c..(i + 1) * r * c],
                r,
                k,
                c,
            );
        }
        for j in 0..self.boundary.len() / self.block() {
            crate::liealg::gemm_acc(
                &self.boundary[j * r * k..(j + 1) * r * k],
                &other.boundary[j * k * c..(j + 1) * k * c],
                &mut out.boundary[j * r * c..(j + 1) * r * c],
                r,
                k,
                c,
            );
        }
        out
    }

    /// Largest `‖X + Xᵗ‖_F` over interior nodes.
    pub fn max_antisymmetry_defect(&self) -> f64 {
        (0..self.num_nodes())
            .map(|i| self.mat(i).antisymmetry_defect())
            .fold(0.0, f64::max)
    }

    /// Largest `‖XᵗX − I‖_F` over all nodes and arm points.
    pub fn max_orthogonality_defect(&self) -> f64 {
        let n = self.rows;
        let id = Mat::identity(n);
        let nb = self.boundary.len() / self.block();
        (0..self.num_nodes())
            .map(|i| self.mat(i))
            .chain((0..nb).map(|j| self.bnd_mat(j)))
            .map(|a| (a.transpose() * a - id).frobenius())
            .fold(0.0, f64::max)
    }

    /// Pointwise Frobenius norm as a scalar field.
    pub fn pointwise_norm(&self) -> Field {
        let b = self.block();
        let f = |c: &[f64]| crate::math::sqrt(c.iter().map(|x| x * x).sum());
        Field {
            rows: 1,
            cols: 1,
            interior: self.interior.chunks_exact(b).map(f).collect(),
            boundary: self.boundary.chunks_exact(b).map(f).collect(),
        }
    }

    /// Copies the interior values of `self` (on `dom`) onto the nodes of `sub`
    /// that `dom` also contains. Boundary values are left at zero.
    pub fn restrict_to(&self, dom: &GridDomain, sub: &GridDomain) -> Field {
        let mut out = Field::zeros(sub, self.rows, self.cols);
        for i in 0..sub.num_interior() {
            if let Some(j) = dom.locate(sub.grid_index(i)) {
                out.node_mut(i).copy_from_slice(self.node(j as usize));
            }
        }
        out
    }

    /// Values at interior nodes written into a dense `N^m` lattice array, exterior
    /// nodes set to `fill`. Layout: node-major, block row-major.
    pub fn to_lattice(&self, dom: &GridDomain, fill: &[f64]) -> Vec<f64> {
        let b = self.block();
        let len = dom.lattice_len();
        let mut out = Vec::with_capacity(len * b);
        for _ in 0..len {
            out.extend_from_slice(fill);
        }
        for i in 0..dom.num_interior() {
            let g = dom.grid_index(i);
            out[g * b..(g + 1) * b].copy_from_slice(self.node(i));
        }
        out
    }

    /// Inverse of [`Field::to_lattice`]. Boundary arm values are interpolated
    /// linearly between the interior node and the exterior lattice node the arm
    /// points to; arms leaving the lattice take the interior value.
    pub fn from_lattice(dom: &GridDomain, rows: usize, cols: usize, data: &[f64]) -> Field {
        let b = rows * cols;
        assert_eq!(data.len(), dom.lattice_len() * b);
        let mut out = Field::zeros(dom, rows, cols);
        for i in 0..dom.num_interior() {
            let g = dom.grid_index(i);
            out.node_mut(i).copy_from_slice(&data[g * b..(g + 1) * b]);
        }
        let h = dom.spacing();
        let mut tmp = [0.0; 64];
        for (j, arm) in dom.boundary_arms().iter().enumerate() {
            let inner = dom.grid_index(arm.node as usize);
            let t = arm.length / h;
            for c in 0..b {
                let a = data[inner * b + c];
                tmp[c] = match arm.ghost {
                    Some(g) => (1.0 - t) * a + t * data[g * b + c],
                    None => a,
                };
            }
            out.bnd_mut(j).copy_from_slice(&tmp[..b]);
        }
        out
    }
}
