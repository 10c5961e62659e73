//! Matrix algebra on so(n) and SO(n).
//!
//! Exponential, the conjugated differential `D(U)·W = exp(−U) d/dt exp(U + tW)|₀`,
//! its inverse, and the Frobenius-nearest projection onto O(n) together with the
//! symmetric remainder `S = R⁻¹(Q − R)`.

mod mat;

pub(crate) use mat::{dense_solve, gemm_acc};
pub use mat::{Mat, MAX_N};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Largest ‖U‖_F accepted by [`dexp_conj_inverse`].
pub const DEXP_GUARD: f64 = 1.0;

const MAX_DIM_SO: usize = MAX_N * (MAX_N - 1) / 2;

/// Element of so(n), stored by its strict upper triangle so `Mᵗ = −M` holds by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AntisymMatrix {
    n: usize,
    upper: [f64; MAX_DIM_SO],
}

impl AntisymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_N);
        AntisymMatrix {
            n,
            upper: [0.0; MAX_DIM_SO],
        }
    }

    /// Dimension of so(n).
    pub fn algebra_dim(n: usize) -> usize {
        n * (n - 1) / 2
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coordinates in the basis `E_ij − E_ji`, i < j, row by row.
    pub fn coords(&self) -> &[f64] {
        &self.upper[..Self::algebra_dim(self.n)]
    }

    pub fn from_coords(n: usize, c: &[f64]) -> Self {
        let mut a = Self::zeros(n);
        a.upper[..Self::algebra_dim(n)].copy_from_slice(c);
        a
    }

    /// Skew part of `m`; exact for antisymmetric input.
    pub fn from_mat(m: &Mat) -> Self {
        let n = m.n();
        let mut a = Self::zeros(n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                a.upper[k] = 0.5 * (m[(i, j)] - m[(j, i)]);
                k += 1;
            }
        }
        a
    }

    /// Planar generator J with J₀₁ = 1 (n = 2 rotation `[[cos, sin], [−sin, cos]]` = exp(θJ)).
    pub fn planar(n: usize, theta: f64) -> Self {
        assert!(n >= 2);
        let mut a = Self::zeros(n);
        a.upper[0] = theta;
        a
    }

    pub fn to_mat(&self) -> Mat {
        let n = self.n;
        let mut m = Mat::zeros(n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                m[(i, j)] = self.upper[k];
                m[(j, i)] = -self.upper[k];
                k += 1;
            }
        }
        m
    }

    pub fn frobenius(&self) -> f64 {
        sqrt(2.0 * self.coords().iter().map(|x| x * x).sum::<f64>())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut a = *self;
        a.upper.iter_mut().for_each(|x| *x *= s);
        a
    }
}

/// Element of SO(n).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMatrix(Mat);

impl RotationMatrix {
    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    /// ‖RᵗR − Id‖_F
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat::identity(self.0.n())).frobenius()
    }
}

/// Dense matrix exponential by scaling and squaring of a Taylor polynomial.
pub fn expm(a: &Mat) -> Mat {
    let n = a.n();
    let norm = a.norm1();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a.scale(scale);
    // ‖x‖ ≤ 1/2: 20 terms reach the double-precision floor.
    let mut term = Mat::identity(n);
    let mut sum = Mat::identity(n);
    for k in 1..=20 {
        term = (term * x).scale(1.0 / k as f64);
        sum += term;
        if term.max_abs() <= 1e-18 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// `exp(U)` for antisymmetric `U`; lands in SO(n).
pub fn exp_so(u: &AntisymMatrix) -> RotationMatrix {
    RotationMatrix(expm(&u.to_mat()))
}

/// `exp(U) − Id − U`, accurate for small `U` (no cancellation against the identity).
pub fn exp_remainder(u: &Mat) -> Mat {
    let n = u.n();
    if u.norm1() > 1.0 {
        return expm(u) - Mat::identity(n) - *u;
    }
    let mut term = (*u * *u).scale(0.5);
    let mut sum = term;
    for k in 3..=40 {
        term = (term * *u).scale(1.0 / k as f64);
        sum += term;
        if term.max_abs() <= 1e-19 * sum.max_abs() || term.max_abs() == 0.0 {
            break;
        }
    }
    sum
}

/// `D(U)·W = Σ_k (−ad_U)^k W / (k+1)!` on plain matrices.
pub fn dexp_conj_mat(u: &Mat, w: &Mat) -> Mat {
    let mut term = *w;
    let mut sum = *w;
    let mut fact = 1.0;
    for k in 1..80 {
        // (−ad_U) X = X U − U X
        term = term * *u - *u * term;
        fact *= (k + 1) as f64;
        let contrib = term.scale(1.0 / fact);
        sum += contrib;
        let c = contrib.max_abs();
        if c == 0.0 || (c <= 1e-18 * sum.max_abs() && k > 2) {
            break;
        }
    }
    sum
}

/// Conjugated differential of the exponential, `exp(−U) d/dt exp(U + tW)|_{t=0}`.
pub fn dexp_conj(u: &AntisymMatrix, w: &AntisymMatrix) -> AntisymMatrix {
    AntisymMatrix::from_mat(&dexp_conj_mat(&u.to_mat(), &w.to_mat()))
}

/// Solves `D(U)·W = Z` for `W` by assembling the map on the so(n) basis.
pub fn dexp_conj_inverse(u: &AntisymMatrix, z: &AntisymMatrix) -> Result<AntisymMatrix> {
    let norm = u.frobenius();
    if !(norm <= DEXP_GUARD) {
        return Err(Error::SeriesGuard {
            norm,
            limit: DEXP_GUARD,
        });
    }
    let n = u.n();
    let d = AntisymMatrix::algebra_dim(n);
    if d == 0 {
        return Ok(*z);
    }
    let um = u.to_mat();
    let mut a = [0.0; MAX_DIM_SO * MAX_DIM_SO];
    let mut basis = [0.0; MAX_DIM_SO];
    for col in 0..d {
        basis[..d].iter_mut().for_each(|x| *x = 0.0);
        basis[col] = 1.0;
        let e = AntisymMatrix::from_coords(n, &basis[..d]);
        let img = AntisymMatrix::from_mat(&dexp_conj_mat(&um, &e.to_mat()));
        for (row, v) in img.coords().iter().enumerate() {
            a[row * d + col] = *v;
        }
    }
    let mut rhs = [0.0; MAX_DIM_SO];
    rhs[..d].copy_from_slice(z.coords());
    if !dense_solve(&mut a[..d * d], &mut rhs[..d], d) {
        return Err(Error::InvalidInput("D(U) singular".into()));
    }
    Ok(AntisymMatrix::from_coords(n, &rhs[..d]))
}

/// Outcome of projecting a matrix onto O(n).
#[derive(Clone, Copy, Debug)]
pub struct ProjectionResult {
    /// Nearest orthogonal matrix in the Frobenius metric.
    pub r: Mat,
    /// `R⁻¹(Q − R)`; symmetric at the minimiser.
    pub s: Mat,
    /// `‖S‖_F = dist(Q, O(n))`.
    pub dist: f64,
    pub det_r: f64,
}

/// Polar orthogonal factor via the Newton iteration `R ← (R + R⁻ᵗ)/2`.
///
/// Requires σ_min(Q) > 1/2.
pub fn project_orthogonal(q: &Mat) -> Result<ProjectionResult> {
    let (ev, _) = (q.transpose() * *q).sym_eigenvalues();
    let sigma_min = sqrt(ev[0].max(0.0));
    if !(sigma_min > 0.5) {
        return Err(Error::FarFromOrthogonal { sigma_min });
    }
    let mut r = *q;
    for _ in 0..100 {
        let inv_t = match r.inverse() {
            Some(inv) => inv.transpose(),
            None => return Err(Error::FarFromOrthogonal { sigma_min: 0.0 }),
        };
        let next = (r + inv_t).scale(0.5);
        let step = (next - r).frobenius();
        r = next;
        if step <= 1e-14 {
            break;
        }
    }
    // One more sweep lands exactly on the fixed point to rounding.
    if let Some(inv) = r.inverse() {
        r = (r + inv.transpose()).scale(0.5);
    }
    let s = r.transpose() * (*q - r);
    Ok(ProjectionResult {
        r,
        s,
        dist: s.frobenius(),
        det_r: r.det(),
    })
}

/// Deterministic antisymmetric matrix with upper-triangle entries uniform in [−1, 1].
pub fn antisym_random(n: usize, seed: u64) -> AntisymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = AntisymMatrix::algebra_dim(n);
    let mut c = [0.0; MAX_DIM_SO];
    for x in c.iter_mut().take(d) {
        *x = rng.gen_range(-1.0..=1.0);
    }
    AntisymMatrix::from_coords(n, &c[..d])
}
