//! Geometric V-cycle for the zero-Dirichlet Shortley–Weller Laplacian, used as
//! the fixed linear preconditioner (an approximate `Δ₀⁻¹`) inside the Krylov
//! solvers. Every level is the same ball rediscretized on a lattice with twice
//! the spacing.

use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{GridDomain, Neighbor};

const PRE_SWEEPS: usize = 2;
const POST_SWEEPS: usize = 2;
const COARSE_NODES: usize = 600;

struct Transfer {
    // fine node i interpolates from coarse nodes idx[ptr[i]..ptr[i+1]]
    ptr: Vec<u32>,
    idx: Vec<u32>,
    w: Vec<f64>,
    scale: f64,
}

struct Level {
    dom: GridDomain,
    to_coarse: Option<Transfer>,
}

struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
}

impl DenseLu {
    fn new(dom: &GridDomain) -> Self {
        let n = dom.num_interior();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = dom.lap_diag(i);
            for k in 0..dom.arms() {
                if let Neighbor::Interior(j) = dom.neighbor(i, k) {
                    a[i * n + j as usize] += dom.lap_weight(i, k);
                }
            }
        }
        let mut piv = vec![0; n];
        for col in 0..n {
            let mut p = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[p * n + col].abs() {
                    p = r;
                }
            }
            piv[col] = p;
            if p != col {
                for c in 0..n {
                    a.swap(col * n + c, p * n + c);
                }
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                a[r * n + col] = f;
                if f != 0.0 {
                    for c in col + 1..n {
                        a[r * n + c] -= f * a[col * n + c];
                    }
                }
            }
        }
        DenseLu { n, lu: a, piv }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = self.n;
        for col in 0..n {
            x.swap(col, self.piv[col]);
        }
        for r in 0..n {
            let mut s = x[r];
            for c in 0..r {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for c in r + 1..n {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s / self.lu[r * n + r];
        }
    }
}

pub struct Multigrid {
    levels: Vec<Level>,
    coarse: DenseLu,
}

impl Multigrid {
    pub fn new(dom: &GridDomain) -> Self {
        let mut levels = vec![Level {
            dom: dom.clone(),
            to_coarse: None,
        }];
        loop {
            let fine = &levels.last().unwrap().dom;
            if fine.num_interior() <= COARSE_NODES {
                break;
            }
            let Some(coarse) = fine.coarse() else { break };
            let t = build_transfer(fine, &coarse);
            levels.last_mut().unwrap().to_coarse = Some(t);
            levels.push(Level {
                dom: coarse,
                to_coarse: None,
            });
        }
        let coarse = DenseLu::new(&levels.last().unwrap().dom);
        Multigrid { levels, coarse }
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// One V-cycle from a zero initial guess: `z ≈ Δ₀⁻¹ r` for `b` stacked components.
    pub fn apply(&self, r: &[f64], z: &mut [f64], b: usize) {
        self.cycle(0, r, z, b);
    }

    fn cycle(&self, l: usize, f: &[f64], u: &mut [f64], b: usize) {
        let lev = &self.levels[l];
        let dom = &lev.dom;
        let n = dom.num_interior();
        if l + 1 == self.levels.len() {
            let mut col = vec![0.0; n];
            for c in 0..b {
                for i in 0..n {
                    col[i] = f[i * b + c];
                }
                self.coarse.solve(&mut col);
                for i in 0..n {
                    u[i * b + c] = col[i];
                }
            }
            return;
        }
        u.iter_mut().for_each(|x| *x = 0.0);
        for _ in 0..PRE_SWEEPS {
            gauss_seidel(dom, f, u, b, false);
        }
        let mut res = vec![0.0; n * b];
        residual(dom, f, u, &mut res, b);
        let t = lev.to_coarse.as_ref().unwrap();
        let nc = self.levels[l + 1].dom.num_interior();
        let mut fc = vec![0.0; nc * b];
        for i in 0..n {
            for p in t.ptr[i] as usize..t.ptr[i + 1] as usize {
                let j = t.idx[p] as usize;
                let w = t.w[p] * t.scale;
                for c in 0..b {
                    fc[j * b + c] += w * res[i * b + c];
                }
            }
        }
        let mut uc = vec![0.0; nc * b];
        self.cycle(l + 1, &fc, &mut uc, b);
        for i in 0..n {
            for p in t.ptr[i] as usize..t.ptr[i + 1] as usize {
                let j = t.idx[p] as usize;
                let w = t.w[p];
                for c in 0..b {
                    u[i * b + c] += w * uc[j * b + c];
                }
            }
        }
        for _ in 0..POST_SWEEPS {
            gauss_seidel(dom, f, u, b, true);
        }
    }
}

fn gauss_seidel(dom: &GridDomain, f: &[f64], u: &mut [f64], b: usize, backward: bool) {
    let n = dom.num_interior();
    let mut acc = [0.0; 64];
    for s in 0..n {
        let i = if backward { n - 1 - s } else { s };
        acc[..b].copy_from_slice(&f[i * b..(i + 1) * b]);
        for k in 0..dom.arms() {
            if let Neighbor::Interior(j) = dom.neighbor(i, k) {
                let a = dom.lap_weight(i, k);
                let j = j as usize;
                for c in 0..b {
                    acc[c] -= a * u[j * b + c];
                }
            }
        }
        let d = 1.0 / dom.lap_diag(i);
        for c in 0..b {
            u[i * b + c] = acc[c] * d;
        }
    }
}

fn residual(dom: &GridDomain, f: &[f64], u: &[f64], r: &mut [f64], b: usize) {
    for i in 0..dom.num_interior() {
        let d = dom.lap_diag(i);
        for c in 0..b {
            r[i * b + c] = f[i * b + c] - d * u[i * b + c];
        }
        for k in 0..dom.arms() {
            if let Neighbor::Interior(j) = dom.neighbor(i, k) {
                let a = dom.lap_weight(i, k);
                let j = j as usize;
                for c in 0..b {
                    r[i * b + c] -= a * u[j * b + c];
                }
            }
        }
    }
}

fn build_transfer(fine: &GridDomain, coarse: &GridDomain) -> Transfer {
    let m = fine.dim();
    let mut ptr = Vec::with_capacity(fine.num_interior() + 1);
    let mut idx = Vec::new();
    let mut w = Vec::new();
    ptr.push(0u32);
    for i in 0..fine.num_interior() {
        let multi = fine.lattice_multi_index(fine.grid_index(i));
        // tensor product of 1-D linear interpolation stencils
        let mut choices = [[(0usize, 0.0f64); 2]; crate::domain::MAX_DIM];
        let mut counts = [0usize; crate::domain::MAX_DIM];
        for d in 0..m {
            let v = multi[d];
            if v % 2 == 0 {
                choices[d][0] = (v / 2, 1.0);
                counts[d] = 1;
            } else {
                choices[d][0] = ((v - 1) / 2, 0.5);
                choices[d][1] = ((v + 1) / 2, 0.5);
                counts[d] = 2;
            }
        }
        let total: usize = counts[..m].iter().product();
        for t in 0..total {
            let mut rem = t;
            let mut cm = [0usize; crate::domain::MAX_DIM];
            let mut weight = 1.0;
            for d in 0..m {
                let pick = rem % counts[d];
                rem /= counts[d];
                cm[d] = choices[d][pick].0;
                weight *= choices[d][pick].1;
            }
            if let Some(j) = coarse.locate(coarse.lattice_index(&cm[..m])) {
                idx.push(j);
                w.push(weight);
            }
        }
        ptr.push(idx.len() as u32);
    }
    let mut scale = 1.0;
    for _ in 0..m {
        scale *= 0.5;
    }
    Transfer { ptr, idx, w, scale }
}
