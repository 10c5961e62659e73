use alloc::vec::Vec;

use crate::domain::{
    divergence, gradient, laplacian, lp_norm, BallSpec, Field, GridDomain, Neighbor,
};
use crate::elliptic::{solve_dirichlet_with, Multigrid, SolveReport};
use crate::error::{Error, Result};
use crate::math::{abs_pow, ln, powf, sqrt};

/// `w = Av` on a sub-ball split as `w = φ + ξ`, with `Δ_hφ = 2div_h(∇_hA·v)`,
/// `φ = 0` on the sub-sphere, and `ξ = w − φ`.
#[derive(Clone, Debug)]
pub struct LocalDecomposition {
    pub sub: GridDomain,
    pub w: Field,
    pub phi: Field,
    pub xi: Field,
    pub rhs: Field,
    pub report: SolveReport,
}

/// Values of `f` (on `dom`) along the lattice line through global node `i` in
/// direction of arm `k`, at offset `s` (in units of `h`), by Lagrange
/// interpolation through up to four nearby samples (cubic when available).
fn line_value(dom: &GridDomain, f: &Field, i: usize, k: usize, s: f64, out: &mut [f64]) {
    let h = dom.spacing();
    let b = f.block();
    let mut ts = [0.0; 4];
    let mut vals: [&[f64]; 4] = [&[]; 4];
    let mut n = 0;
    ts[n] = 0.0;
    vals[n] = f.node(i);
    n += 1;
    match dom.neighbor(i, k ^ 1) {
        Neighbor::Interior(j) => {
            ts[n] = -1.0;
            vals[n] = f.node(j as usize);
        }
        Neighbor::Boundary(j) => {
            ts[n] = -dom.arm_length(i, k ^ 1) / h;
            vals[n] = f.bnd(j as usize);
        }
    }
    n += 1;
    let mut cur = i;
    let mut t = 0.0;
    for _ in 0..2 {
        match dom.neighbor(cur, k) {
            Neighbor::Interior(j) => {
                t += 1.0;
                ts[n] = t;
                vals[n] = f.node(j as usize);
                n += 1;
                cur = j as usize;
            }
            Neighbor::Boundary(j) => {
                t += dom.arm_length(cur, k) / h;
                ts[n] = t;
                vals[n] = f.bnd(j as usize);
                n += 1;
                break;
            }
        }
    }
    out[..b].iter_mut().for_each(|o| *o = 0.0);
    for a in 0..n {
        let mut w = 1.0;
        for c in 0..n {
            if c != a {
                w *= (s - ts[c]) / (ts[a] - ts[c]);
            }
        }
        for (o, v) in out[..b].iter_mut().zip(vals[a]) {
            *o += w * v;
        }
    }
}

/// Decomposes `w = Av` on `B_r(x₀)`, with `x₀` moved to the nearest lattice node.
pub fn local_decomposition(
    dom: &GridDomain,
    a: &Field,
    v: &Field,
    center: &[f64],
    r: f64,
    tol: f64,
) -> Result<LocalDecomposition> {
    let ga = gradient(dom, a);
    let w = a.mul(v);
    decompose(dom, &ga, &w, v, center, r, tol)
}

fn decompose(
    dom: &GridDomain,
    ga: &[Field],
    w: &Field,
    v: &Field,
    center: &[f64],
    r: f64,
    tol: f64,
) -> Result<LocalDecomposition> {
    let m = dom.dim();
    if center.len() != m {
        return Err(Error::InvalidInput("center dimension mismatch".into()));
    }
    let c = dom.snap_to_lattice(center);
    let sub = dom.sub_ball(&c[..m], r)?;
    let flux: Vec<Field> = ga.iter().map(|g| g.mul(v)).collect();
    let mut f = divergence(dom, &flux);
    f.scale(2.0);
    let rhs = f.restrict_to(dom, &sub);

    let mut w_sub = w.restrict_to(dom, &sub);
    let mut tmp = [0.0; 64];
    for (j, arm) in sub.boundary_arms().iter().enumerate() {
        let i_sub = arm.node as usize;
        let i = dom
            .locate(sub.grid_index(i_sub))
            .ok_or_else(|| Error::InvalidInput("sub-ball leaves the domain".into()))?;
        line_value(
            dom,
            w,
            i as usize,
            arm.arm as usize,
            arm.length / dom.spacing(),
            &mut tmp,
        );
        w_sub.bnd_mut(j).copy_from_slice(&tmp[..w.block()]);
    }

    let pre = Multigrid::new(&sub);
    let zero = Field::zeros(&sub, w.rows(), w.cols());
    let (phi, report) = solve_dirichlet_with(&pre, &sub, &rhs, &zero, tol)?;
    let xi = w_sub.sub(&phi);
    Ok(LocalDecomposition {
        sub,
        w: w_sub,
        phi,
        xi,
        rhs,
        report,
    })
}

impl LocalDecomposition {
    /// `‖Δ_hξ‖_{L¹}` over the sub-ball, relative to `‖w‖_{L¹}`.
    pub fn harmonic_defect(&self) -> f64 {
        let lap = laplacian(&self.sub, &self.xi);
        let d = lp_norm(&self.sub, &lap, 1.0, BallSpec::Whole).unwrap_or(0.0);
        let s = lp_norm(&self.sub, &self.w, 1.0, BallSpec::Whole).unwrap_or(0.0);
        if s > 0.0 {
            d / s
        } else {
            d
        }
    }
}

/// One `(x₀, r)` experiment, with `p = m/(m−2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow {
    pub center: Vec<f64>,
    pub radius: f64,
    /// `∫_{B_r}|w|^p` and `∫_{B_{λr}}|w|^p`.
    pub w_r: f64,
    pub w_lr: f64,
    pub ratio: f64,
    pub xi_r: f64,
    pub xi_lr: f64,
    pub harmonic_ratio: f64,
    pub phi_r: f64,
    /// `‖A⁻¹‖_∞` on the sub-ball, spectral norm.
    pub a_inv_max: f64,
    /// `∫_{B_r}|∇A|^m`.
    pub grad_a_energy: f64,
    /// `∫|φ|^p / (‖A⁻¹‖_∞ (∫|∇A|^m)^{1/(m−2)} ∫|w|^p)`; zero when `φ = 0`.
    pub phi_bound_const: f64,
    /// `5h/r`.
    pub slack: f64,
    pub harmonic_defect: f64,
    pub solve: SolveReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub lambda: f64,
    pub exponent: f64,
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub rows: Vec<DecayRow>,
    /// Smallest fitted exponent over the centers.
    pub gamma_hat: f64,
    pub gamma_per_center: Vec<f64>,
}

impl DecayReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ratio).collect()
    }

    pub fn harmonic_ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.harmonic_ratio).collect()
    }

    pub fn phi_bound_consts(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.phi_bound_const).collect()
    }
}

fn integral_p(dom: &GridDomain, f: &Field, p: f64, region: BallSpec) -> f64 {
    lp_norm(dom, f, p, region)
        .map(|n| powf(n, p))
        .unwrap_or(0.0)
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Runs [`local_decomposition`] for every `(x₀, r)` and fits `γ̂`.
pub fn decay_experiment(
    dom: &GridDomain,
    a: &Field,
    v: &Field,
    centers: &[Vec<f64>],
    radii: &[f64],
    lambda: f64,
    tol: f64,
) -> Result<DecayReport> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidInput("lambda must lie in (0, 1)".into()));
    }
    let m = dom.dim();
    let p = m as f64 / (m as f64 - 2.0);
    let h = dom.spacing();
    let ga = gradient(dom, a);
    let w = a.mul(v);
    let mut grad_norm = Field::scalar(dom);
    for i in 0..dom.num_interior() {
        let s: f64 = ga
            .iter()
            .map(|g| g.node(i).iter().map(|x| x * x).sum::<f64>())
            .sum();
        grad_norm.node_mut(i)[0] = sqrt(s);
    }
    let mut rows = Vec::new();
    let mut snapped = Vec::new();
    for c in centers {
        let cs = dom.snap_to_lattice(c);
        let cs = &cs[..m];
        snapped.push(cs.to_vec());
        for &r in radii {
            let d = decompose(dom, &ga, &w, v, cs, r, tol)?;
            let inner = BallSpec::ball(cs, lambda * r);
            let w_r = integral_p(&d.sub, &d.w, p, BallSpec::Whole);
            let w_lr = integral_p(&d.sub, &d.w, p, inner);
            let xi_r = integral_p(&d.sub, &d.xi, p, BallSpec::Whole);
            let xi_lr = integral_p(&d.sub, &d.xi, p, inner);
            let phi_r = integral_p(&d.sub, &d.phi, p, BallSpec::Whole);
            let outer = BallSpec::ball(cs, r);
            let grad_a_energy = integral_p(dom, &grad_norm, m as f64, outer);
            let mut a_inv_max: f64 = 0.0;
            for i in 0..dom.num_interior() {
                if outer.contains(dom, dom.coords(i)) {
                    let ai = a.mat(i);
                    let (ev, n) = (ai.transpose() * ai).sym_eigenvalues();
                    let smallest = ev[..n].iter().cloned().fold(f64::INFINITY, f64::min);
                    a_inv_max = a_inv_max.max(1.0 / sqrt(smallest.max(0.0)));
                }
            }
            let den = a_inv_max * powf(grad_a_energy, 1.0 / (m as f64 - 2.0)) * w_r;
            let phi_bound_const = if phi_r == 0.0 { 0.0 } else { phi_r / den };
            let harmonic_defect = d.harmonic_defect();
            rows.push(DecayRow {
                center: cs.to_vec(),
                radius: r,
                w_r,
                w_lr,
                ratio: ratio(w_lr, w_r),
                xi_r,
                xi_lr,
                harmonic_ratio: ratio(xi_lr, xi_r),
                phi_r,
                a_inv_max,
                grad_a_energy,
                phi_bound_const,
                slack: 5.0 * h / r,
                harmonic_defect,
                solve: d.report,
            });
        }
    }
    let gamma_per_center: Vec<f64> = snapped.iter().map(|c| fit_gamma(dom, v, c, p)).collect();
    let gamma_hat = gamma_per_center
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    Ok(DecayReport {
        lambda,
        exponent: p,
        centers: snapped,
        radii: radii.to_vec(),
        rows,
        gamma_hat: if gamma_hat.is_finite() {
            gamma_hat
        } else {
            0.0
        },
        gamma_per_center,
    })
}

const GAMMA_RADII: usize = 8;

/// Least-squares slope `s` of `log ∫_{B_r(c)}|v|^p` against `log r` on
/// geometric radii in `[4h, 1/4]`, returned as `γ̂ = s(m−2)/m` so that
/// `r^{−γ̂}(∫_{B_r}|v|^p)^{(m−2)/m}` stays bounded.
pub fn fit_gamma(dom: &GridDomain, v: &Field, center: &[f64], p: f64) -> f64 {
    let m = dom.dim() as f64;
    let (lo, hi) = (4.0 * dom.spacing(), 0.25);
    if lo >= hi {
        return 0.0;
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in 0..GAMMA_RADII {
        let r = lo * powf(hi / lo, j as f64 / (GAMMA_RADII - 1) as f64);
        let val = integral_p(dom, v, p, BallSpec::ball(center, r));
        if val > 0.0 {
            xs.push(ln(r));
            ys.push(ln(val));
        }
    }
    if xs.len() < 2 {
        return 0.0;
    }
    least_squares_slope(&xs, &ys) * (m - 2.0) / m
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Interior integrability table for a solution `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrabilityReport {
    /// `(p, ‖v‖_{L^p(B_{1/2})})`.
    pub norms: Vec<(f64, f64)>,
    pub gamma_hat: f64,
    /// `(r, r^{−γ̂}∫_{B_r(0)}|Δ_hv|)`.
    pub profile: Vec<(f64, f64)>,
}

/// Default exponents `m/(m−2)`, `m/(m−2) + 1/2`, `2m/(m−2)`.
pub fn default_exponents(m: usize) -> Vec<f64> {
    let p = m as f64 / (m as f64 - 2.0);
    alloc::vec![p, p + 0.5, 2.0 * p]
}

pub fn integrability_report(
    dom: &GridDomain,
    v: &Field,
    exponents: &[f64],
    radii: &[f64],
) -> Result<IntegrabilityReport> {
    let m = dom.dim();
    let origin = [0.0; crate::domain::MAX_DIM];
    let half = BallSpec::ball(&origin[..m], 0.5);
    let mut norms = Vec::new();
    for &p in exponents {
        norms.push((p, lp_norm(dom, v, p, half)?));
    }
    let pm = m as f64 / (m as f64 - 2.0);
    let gamma_hat = fit_gamma(dom, v, &origin[..m], pm);
    let lap = laplacian(dom, v);
    let mut profile = Vec::new();
    for &r in radii {
        let l1 = lp_norm(dom, &lap, 1.0, BallSpec::ball(&origin[..m], r)).unwrap_or(0.0);
        profile.push((r, l1 * abs_pow(r, -gamma_hat)));
    }
    Ok(IntegrabilityReport {
        norms,
        gamma_hat,
        profile,
    })
}

#[cfg(test)]
pub(super) fn line_value_for_tests(
    dom: &GridDomain,
    f: &Field,
    i: usize,
    k: usize,
    s: f64,
    out: &mut [f64],
) {
    line_value(dom, f, i, k, s, out)
}
