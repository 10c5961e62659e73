//! Linear solves on a [`GridDomain`]: the zero-Dirichlet Laplacian and its
//! first/zero-order perturbations, for scalar, vector and matrix unknowns.
//!
//! Both solvers run right-preconditioned BiCGStab. The Shortley–Weller matrix is
//! not symmetric once arms are shortened, so conjugate gradients does not apply
//! even to the pure Laplacian. The preconditioner is one multigrid V-cycle for
//! `Δ₀`, the same for every call on a given domain.

mod multigrid;

use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{Field, GridDomain};
use crate::error::{Error, Result};
use crate::liealg::gemm_acc;
use crate::math::{now, sqrt};

pub use multigrid::Multigrid;

/// Iteration cap for a single Krylov solve.
pub const MAX_ITERATIONS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `‖rhs − Lu‖₂ / ‖rhs − L(0 ⊕ g)‖₂`, recomputed from scratch at exit.
    pub relative_residual: f64,
    pub converged: bool,
    /// Seconds; zero without the `std` feature.
    pub wall_time: f64,
}

/// Per-node, per-arm square coefficient blocks.
#[derive(Clone, Debug)]
pub struct ArmCoefficients {
    dim: usize,
    arms: usize,
    data: Vec<f64>,
}

impl ArmCoefficients {
    pub fn zeros(dom: &GridDomain, dim: usize) -> Self {
        ArmCoefficients {
            dim,
            arms: dom.arms(),
            data: vec![0.0; dom.num_interior() * dom.arms() * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> &[f64] {
        let s = self.dim * self.dim;
        let o = (i * self.arms + k) * s;
        &self.data[o..o + s]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, k: usize) -> &mut [f64] {
        let s = self.dim * self.dim;
        let o = (i * self.arms + k) * s;
        &mut self.data[o..o + s]
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| f64::max(a, x.abs()))
    }
}

/// The operator
///
/// ```text
/// (Lu)_i = Σ_k a_k (u_k − u_i)
///        + Σ_k F_{ik} (u_k − u_i) + Σ_k (u_k − u_i) G_{ik}
///        + Z_i u_i + u_i Y_i
/// ```
///
/// acting on `rows × cols` blocks. The first sum is the Shortley–Weller
/// Laplacian; `F` (`first_left`) and `G` (`first_right`) are arm-wise first-order
/// coefficients, so `Σ_k β_k c (u_k − u_i)` with gradient weights `β_k`
/// represents `c·∂u`; `Z` (`zero_left`) and `Y` (`zero_right`) are zero-order.
#[derive(Clone, Debug)]
pub struct LinearOperatorSpec<'a> {
    pub domain: &'a GridDomain,
    pub rows: usize,
    pub cols: usize,
    pub first_left: Option<ArmCoefficients>,
    pub first_right: Option<ArmCoefficients>,
    pub zero_left: Option<Field>,
    pub zero_right: Option<Field>,
}

impl<'a> LinearOperatorSpec<'a> {
    /// The bare Laplacian.
    pub fn laplacian(domain: &'a GridDomain, rows: usize, cols: usize) -> Self {
        LinearOperatorSpec {
            domain,
            rows,
            cols,
            first_left: None,
            first_right: None,
            zero_left: None,
            zero_right: None,
        }
    }

    /// Largest first-order coefficient entry, scaled by `h` so it is comparable
    /// to a gradient coefficient.
    pub fn first_order_max(&self) -> f64 {
        let h = self.domain.spacing();
        let a = self.first_left.as_ref().map_or(0.0, |c| c.max_abs());
        let b = self.first_right.as_ref().map_or(0.0, |c| c.max_abs());
        h * f64::max(a, b)
    }

    pub fn zero_order_max(&self) -> f64 {
        let f = |z: &Option<Field>| {
            z.as_ref().map_or(0.0, |z| {
                z.interior().iter().fold(0.0, |a, x| f64::max(a, x.abs()))
            })
        };
        f64::max(f(&self.zero_left), f(&self.zero_right))
    }

    /// Applies the operator to `u`, reading Dirichlet data from `u`'s boundary values.
    pub fn apply(&self, u: &Field) -> Field {
        let mut out = Field::zeros(self.domain, self.rows, self.cols);
        self.apply_parts(u, true, true, true, out.interior_mut());
        out
    }

    /// Laplacian part only.
    pub fn apply_base(&self, u: &Field) -> Field {
        let mut out = Field::zeros(self.domain, self.rows, self.cols);
        self.apply_parts(u, true, false, false, out.interior_mut());
        out
    }

    /// First-order part only.
    pub fn apply_first_order(&self, u: &Field) -> Field {
        let mut out = Field::zeros(self.domain, self.rows, self.cols);
        self.apply_parts(u, false, true, false, out.interior_mut());
        out
    }

    /// Zero-order part only.
    pub fn apply_zero_order(&self, u: &Field) -> Field {
        let mut out = Field::zeros(self.domain, self.rows, self.cols);
        self.apply_parts(u, false, false, true, out.interior_mut());
        out
    }

    fn apply_parts(&self, u: &Field, base: bool, first: bool, zero: bool, out: &mut [f64]) {
        self.apply_raw(u.interior(), Some(u.boundary()), base, first, zero, out);
    }

    fn apply_raw(
        &self,
        x: &[f64],
        bnd: Option<&[f64]>,
        base: bool,
        first: bool,
        zero: bool,
        out: &mut [f64],
    ) {
        use crate::domain::Neighbor;
        let dom = self.domain;
        let (r, c) = (self.rows, self.cols);
        let b = r * c;
        let fl = if first {
            self.first_left.as_ref()
        } else {
            None
        };
        let fr = if first {
            self.first_right.as_ref()
        } else {
            None
        };
        let zl = if zero { self.zero_left.as_ref() } else { None };
        let zr = if zero { self.zero_right.as_ref() } else { None };
        let zero_block = [0.0; 64];
        let mut diff = [0.0; 64];
        for i in 0..dom.num_interior() {
            let xi = &x[i * b..(i + 1) * b];
            let o = &mut out[i * b..(i + 1) * b];
            o.iter_mut().for_each(|v| *v = 0.0);
            for k in 0..dom.arms() {
                let xk = match dom.neighbor(i, k) {
                    Neighbor::Interior(j) => &x[j as usize * b..(j as usize + 1) * b],
                    Neighbor::Boundary(j) => match bnd {
                        Some(bv) => &bv[j as usize * b..(j as usize + 1) * b],
                        None => &zero_block[..b],
                    },
                };
                for t in 0..b {
                    diff[t] = xk[t] - xi[t];
                }
                if base {
                    let a = dom.lap_weight(i, k);
                    for t in 0..b {
                        o[t] += a * diff[t];
                    }
                }
                if let Some(f) = fl {
                    gemm_acc(f.get(i, k), &diff[..b], o, r, r, c);
                }
                if let Some(g) = fr {
                    gemm_acc(&diff[..b], g.get(i, k), o, r, c, c);
                }
            }
            if let Some(z) = zl {
                gemm_acc(z.node(i), xi, o, r, r, c);
            }
            if let Some(y) = zr {
                gemm_acc(xi, y.node(i), o, r, c, c);
            }
        }
    }

    fn apply_homogeneous(&self, x: &[f64], out: &mut [f64]) {
        self.apply_raw(x, None, true, true, true, out);
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 1e-14 && tol < 1e-4 {
        Ok(())
    } else {
        Err(Error::InvalidInput(alloc::format!(
            "tolerance {tol:e} outside (1e-14, 1e-4)"
        )))
    }
}

/// Solves `Δ_h u = rhs` with `u = g` on the boundary, `g` read from the
/// boundary values of `g`. Non-convergence is reported, not raised.
pub fn solve_dirichlet(
    dom: &GridDomain,
    rhs: &Field,
    g: &Field,
    tol: f64,
) -> Result<(Field, SolveReport)> {
    let pre = Multigrid::new(dom);
    solve_dirichlet_with(&pre, dom, rhs, g, tol)
}

pub fn solve_dirichlet_with(
    pre: &Multigrid,
    dom: &GridDomain,
    rhs: &Field,
    g: &Field,
    tol: f64,
) -> Result<(Field, SolveReport)> {
    let spec = LinearOperatorSpec::laplacian(dom, rhs.rows(), rhs.cols());
    solve_general(pre, &spec, rhs, g, tol)
}

/// Solves `L u = rhs`, `u = g` on the boundary, for a perturbed operator.
/// Failure to converge is an error carrying the perturbation sizes.
pub fn solve_perturbed(
    spec: &LinearOperatorSpec<'_>,
    rhs: &Field,
    g: &Field,
    tol: f64,
) -> Result<(Field, SolveReport)> {
    let pre = Multigrid::new(spec.domain);
    solve_perturbed_with(&pre, spec, rhs, g, tol)
}

pub fn solve_perturbed_with(
    pre: &Multigrid,
    spec: &LinearOperatorSpec<'_>,
    rhs: &Field,
    g: &Field,
    tol: f64,
) -> Result<(Field, SolveReport)> {
    let (u, rep) = solve_general(pre, spec, rhs, g, tol)?;
    if !rep.converged {
        return Err(Error::SolverDivergence {
            iterations: rep.iterations,
            relative_residual: rep.relative_residual,
            first_order_max: spec.first_order_max(),
            zero_order_max: spec.zero_order_max(),
        });
    }
    Ok((u, rep))
}

fn solve_general(
    pre: &Multigrid,
    spec: &LinearOperatorSpec<'_>,
    rhs: &Field,
    g: &Field,
    tol: f64,
) -> Result<(Field, SolveReport)> {
    check_tol(tol)?;
    let dom = spec.domain;
    if rhs.rows() != spec.rows
        || rhs.cols() != spec.cols
        || rhs.num_nodes() != dom.num_interior()
        || !g.same_shape(rhs)
    {
        return Err(Error::InvalidInput(
            "field shapes do not match the operator".into(),
        ));
    }
    if !rhs.is_finite() || !g.is_finite() {
        return Err(Error::InvalidInput(
            "non-finite right-hand side or boundary data".into(),
        ));
    }
    let start = now();
    // Move the Dirichlet data to the right-hand side.
    let mut lift = Field::zeros(dom, spec.rows, spec.cols);
    lift.boundary_mut().copy_from_slice(g.boundary());
    let lg = spec.apply(&lift);
    let b: Vec<f64> = rhs
        .interior()
        .iter()
        .zip(lg.interior())
        .map(|(r, l)| r - l)
        .collect();
    let block = spec.rows * spec.cols;
    let (x, iterations, rel, converged) = bicgstab(
        |v, out| spec.apply_homogeneous(v, out),
        |v, out| pre.apply(v, out, block),
        &b,
        tol,
        MAX_ITERATIONS,
    );
    let mut u = lift;
    u.interior_mut().copy_from_slice(&x);
    Ok((
        u,
        SolveReport {
            iterations,
            relative_residual: rel,
            converged,
            wall_time: now() - start,
        },
    ))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// Right-preconditioned BiCGStab from a zero initial guess. Returns the
/// iterate, iteration count, true relative residual and convergence flag.
fn bicgstab<A, M>(
    apply: A,
    precond: M,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, usize, f64, bool)
where
    A: Fn(&[f64], &mut [f64]),
    M: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return (x, 0, 0.0, true);
    }
    let mut r = b.to_vec();
    let mut it = 0;
    let mut phat = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let true_residual = |x: &[f64], r: &mut [f64], tmp: &mut [f64]| {
        apply(x, tmp);
        for ((ri, bi), ti) in r.iter_mut().zip(b).zip(tmp.iter()) {
            *ri = bi - ti;
        }
        norm(r) / bnorm
    };
    'restart: loop {
        let rhat = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        v.iter_mut().for_each(|e| *e = 0.0);
        p.iter_mut().for_each(|e| *e = 0.0);
        while it < max_iter {
            it += 1;
            let rho_new = dot(&rhat, &r);
            if rho_new.abs() < 1e-300 {
                let rel = true_residual(&x, &mut r, &mut t);
                if rel <= tol {
                    return (x, it, rel, true);
                }
                continue 'restart;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            precond(&p, &mut phat);
            apply(&phat, &mut v);
            let rv = dot(&rhat, &v);
            if rv.abs() < 1e-300 {
                continue 'restart;
            }
            alpha = rho / rv;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            if norm(&s) / bnorm <= 0.5 * tol {
                for i in 0..n {
                    x[i] += alpha * phat[i];
                }
                let rel = true_residual(&x, &mut r, &mut t);
                if rel <= tol {
                    return (x, it, rel, true);
                }
                continue 'restart;
            }
            precond(&s, &mut shat);
            apply(&shat, &mut t);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            for i in 0..n {
                x[i] += alpha * phat[i] + omega * shat[i];
                r[i] = s[i] - omega * t[i];
            }
            if norm(&r) / bnorm <= 0.5 * tol {
                let rel = true_residual(&x, &mut r, &mut t);
                if rel <= tol {
                    return (x, it, rel, true);
                }
                continue 'restart;
            }
            if omega == 0.0 || !omega.is_finite() {
                continue 'restart;
            }
        }
        let rel = true_residual(&x, &mut r, &mut t);
        return (x, it, rel, rel <= tol);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{lp_norm, BallSpec};

    #[test]
    fn zero_data_gives_zero() {
        let dom = GridDomain::ball(3, 17).unwrap();
        let z = Field::scalar(&dom);
        let (u, rep) = solve_dirichlet(&dom, &z, &z, 1e-10).unwrap();
        assert!(rep.converged);
        assert!(u.interior().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let dom = GridDomain::ball(3, 9).unwrap();
        let z = Field::scalar(&dom);
        assert!(solve_dirichlet(&dom, &z, &z, 1e-3).is_err());
        assert!(solve_dirichlet(&dom, &z, &z, 1e-15).is_err());
    }

    #[test]
    fn linear_boundary_data_is_reproduced() {
        let dom = GridDomain::ball(3, 33).unwrap();
        let g = Field::from_fn(&dom, 1, 1, |x, o| o[0] = x[0]);
        let (u, rep) = solve_dirichlet(&dom, &Field::scalar(&dom), &g, 1e-12).unwrap();
        assert!(rep.converged && rep.relative_residual <= 1e-12);
        let err = u
            .sub(&g)
            .interior()
            .iter()
            .fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn manufactured_quadratic_converges() {
        // u = |x|² − 1 has Δu = 2m = 6 and vanishes on the sphere.
        let mut errs = Vec::new();
        for n in [17, 33] {
            let dom = GridDomain::ball(3, n).unwrap();
            let exact = Field::from_fn(&dom, 1, 1, |x, o| {
                o[0] = x.iter().map(|t| t * t).sum::<f64>() - 1.0
            });
            let rhs = Field::constant(&dom, 1, 1, &[6.0]);
            let (u, _) = solve_dirichlet(&dom, &rhs, &Field::scalar(&dom), 1e-12).unwrap();
            let e = u
                .sub(&exact)
                .interior()
                .iter()
                .fold(0.0f64, |a, x| a.max(x.abs()));
            errs.push(e);
        }
        // Shortley–Weller reproduces quadratics, so the error sits at solver level.
        assert!(errs.iter().all(|&e| e < 1e-9), "{errs:?}");
    }

    #[test]
    fn manufactured_smooth_second_order() {
        let mut errs = Vec::new();
        for n in [17, 33, 65] {
            let dom = GridDomain::ball(3, n).unwrap();
            let f = |x: &[f64]| (x[0] + 0.5 * x[1]).sin() * x[2].exp();
            let exact = Field::from_fn(&dom, 1, 1, |x, o| o[0] = f(x));
            let rhs = Field::from_fn(&dom, 1, 1, |x, o| o[0] = -0.25 * f(x));
            let (u, rep) = solve_dirichlet(&dom, &rhs, &exact, 1e-11).unwrap();
            assert!(rep.converged);
            errs.push(
                u.sub(&exact)
                    .interior()
                    .iter()
                    .fold(0.0f64, |a, x| a.max(x.abs())),
            );
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() > 1.7, "{errs:?}");
        }
    }

    #[test]
    fn maximum_principle() {
        let dom = GridDomain::ball(3, 33).unwrap();
        let rhs = Field::from_fn(&dom, 1, 1, |x, o| {
            o[0] = -(1.0 + x[0] * x[0]) * (3.0 * x[1]).cos().abs()
        });
        let g = Field::from_fn(&dom, 1, 1, |x, o| o[0] = 0.1 * (1.0 + x[2]));
        let (u, _) = solve_dirichlet(&dom, &rhs, &g, 1e-11).unwrap();
        assert!(u.interior().iter().all(|&x| x >= -1e-10));
    }

    #[test]
    fn superposition() {
        let dom = GridDomain::ball(3, 17).unwrap();
        let r1 = Field::from_fn(&dom, 1, 1, |x, o| o[0] = x[0] * x[1]);
        let r2 = Field::from_fn(&dom, 1, 1, |x, o| o[0] = (2.0 * x[2]).cos());
        let z = Field::scalar(&dom);
        let tol = 1e-11;
        let (u1, _) = solve_dirichlet(&dom, &r1, &z, tol).unwrap();
        let (u2, _) = solve_dirichlet(&dom, &r2, &z, tol).unwrap();
        let mut comb = r1.scaled(2.0);
        comb.axpy(-3.0, &r2);
        let (u, _) = solve_dirichlet(&dom, &comb, &z, tol).unwrap();
        let mut want = u1.scaled(2.0);
        want.axpy(-3.0, &u2);
        let scale = lp_norm(&dom, &u, 2.0, BallSpec::Whole).unwrap();
        let diff = lp_norm(&dom, &u.sub(&want), 2.0, BallSpec::Whole).unwrap();
        assert!(diff <= 10.0 * tol * scale.max(1.0) * 10.0, "{diff}");
    }

    #[test]
    fn mean_value_growth_for_harmonic() {
        let dom = GridDomain::ball(3, 33).unwrap();
        // harmonic, not the trivial constant
        let g = Field::from_fn(&dom, 1, 1, |x, o| o[0] = 1.0 + x[0] * x[1] + 0.5 * x[2]);
        let (u, _) = solve_dirichlet(&dom, &Field::scalar(&dom), &g, 1e-11).unwrap();
        let p = 3.0;
        let c = [0.125, 0.0, -0.125];
        let mut prev = 0.0;
        for rho in [0.15, 0.25, 0.35, 0.45, 0.55] {
            let region = BallSpec::ball(&c, rho);
            let count = (0..dom.num_interior())
                .filter(|&i| region.contains(&dom, dom.coords(i)))
                .count();
            let avg =
                lp_norm(&dom, &u, p, region).unwrap().powf(p) / (count as f64 * dom.cell_volume());
            assert!(avg >= prev * 0.98, "{rho}: {avg} < {prev}");
            prev = avg;
        }
    }

    fn coupled_spec(dom: &GridDomain, n: usize) -> LinearOperatorSpec<'_> {
        let mut fl = ArmCoefficients::zeros(dom, n);
        let mut fr = ArmCoefficients::zeros(dom, n);
        for i in 0..dom.num_interior() {
            let x = dom.coords(i).to_vec();
            for k in 0..dom.arms() {
                let w = dom.grad_weight(i, k);
                for (t, v) in fl.get_mut(i, k).iter_mut().enumerate() {
                    *v = 0.3 * w * ((t as f64) + x[0]).sin();
                }
                for (t, v) in fr.get_mut(i, k).iter_mut().enumerate() {
                    *v = 0.2 * w * ((t as f64) * x[1]).cos();
                }
            }
        }
        let zl = Field::from_fn(dom, n, n, |x, o| {
            for (t, v) in o.iter_mut().enumerate() {
                *v = 0.5 * (t as f64 - x[2]);
            }
        });
        let zr = Field::from_fn(dom, n, n, |x, o| {
            for (t, v) in o.iter_mut().enumerate() {
                *v = 0.1 * (x[0] * t as f64).sin();
            }
        });
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

    #[test]
    fn operator_is_sum_of_parts() {
        let dom = GridDomain::ball(3, 17).unwrap();
        let spec = coupled_spec(&dom, 3);
        let u = Field::from_fn(&dom, 3, 3, |x, o| {
            for (t, v) in o.iter_mut().enumerate() {
                *v = (x[0] * t as f64 + x[1]).sin();
            }
        });
        let whole = spec.apply(&u);
        let parts = spec
            .apply_base(&u)
            .add(&spec.apply_first_order(&u))
            .add(&spec.apply_zero_order(&u));
        let d = whole
            .sub(&parts)
            .interior()
            .iter()
            .fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(d < 1e-9);
    }

    #[test]
    fn perturbed_round_trip() {
        let dom = GridDomain::ball(3, 17).unwrap();
        let spec = coupled_spec(&dom, 3);
        let star = Field::from_fn(&dom, 3, 3, |x, o| {
            for (t, v) in o.iter_mut().enumerate() {
                *v = (1.0 - x.iter().map(|s| s * s).sum::<f64>()) * (t as f64 + x[1]).cos();
            }
        });
        let g = Field::from_fn(&dom, 3, 3, |x, o| {
            for (t, v) in o.iter_mut().enumerate() {
                *v = 0.1 * t as f64 * x[0];
            }
        });
        let mut star = star;
        star.boundary_mut().copy_from_slice(g.boundary());
        let rhs = spec.apply(&star);
        let tol = 1e-10;
        let (u, rep) = solve_perturbed(&spec, &rhs, &g, tol).unwrap();
        assert!(rep.converged && rep.relative_residual <= tol);
        let e = lp_norm(&dom, &u.sub(&star), 2.0, BallSpec::Whole).unwrap()
            / lp_norm(&dom, &star, 2.0, BallSpec::Whole).unwrap();
        assert!(e <= 1e3 * tol, "{e}");
    }

    #[test]
    fn zero_perturbation_matches_dirichlet() {
        let dom = GridDomain::ball(3, 17).unwrap();
        let spec = LinearOperatorSpec::laplacian(&dom, 2, 2);
        let rhs = Field::from_fn(&dom, 2, 2, |x, o| {
            o.copy_from_slice(&[x[0], 1.0, -x[1] * x[2], 0.5]);
        });
        let g = Field::from_fn(&dom, 2, 2, |x, o| {
            o.copy_from_slice(&[1.0, x[0], 0.0, x[2]])
        });
        let tol = 1e-10;
        let (u, _) = solve_perturbed(&spec, &rhs, &g, tol).unwrap();
        for c in 0..4 {
            let rc = Field::from_fn(&dom, 1, 1, |x, o| {
                let mut t = [0.0; 4];
                t.copy_from_slice(&[x[0], 1.0, -x[1] * x[2], 0.5]);
                o[0] = t[c];
            });
            let gc = Field::from_fn(&dom, 1, 1, |x, o| o[0] = [1.0, x[0], 0.0, x[2]][c]);
            let (uc, _) = solve_dirichlet(&dom, &rc, &gc, tol).unwrap();
            for i in 0..dom.num_interior() {
                assert!((uc.node(i)[0] - u.node(i)[c]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn divergence_reports_monitors() {
        let dom = GridDomain::ball(3, 9).unwrap();
        let mut spec = LinearOperatorSpec::laplacian(&dom, 1, 1);
        // −Δ − λ with λ far past the first Dirichlet eigenvalue, plus strong drift
        spec.zero_left = Some(Field::constant(&dom, 1, 1, &[-1e6]));
        let mut fl = ArmCoefficients::zeros(&dom, 1);
        for i in 0..dom.num_interior() {
            for k in 0..dom.arms() {
                fl.get_mut(i, k)[0] = 1e8 * if (i + k) % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
        spec.first_left = Some(fl);
        let rhs = Field::constant(&dom, 1, 1, &[1.0]);
        match solve_perturbed(&spec, &rhs, &Field::scalar(&dom), 1e-12) {
            Err(Error::SolverDivergence { zero_order_max, .. }) => assert_eq!(zero_order_max, 1e6),
            Ok((_, rep)) => assert!(rep.converged),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn multigrid_hierarchy_depth() {
        let dom = GridDomain::ball(3, 65).unwrap();
        assert!(Multigrid::new(&dom).num_levels() >= 3);
    }
}
