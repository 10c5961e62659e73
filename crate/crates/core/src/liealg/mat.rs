use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::math::{abs, sqrt};

/// Largest supported matrix size.
pub const MAX_N: usize = 8;
const CAP: usize = MAX_N * MAX_N;

/// Dense real n×n matrix, n ≤ 8, stored row-major on the stack.
#[derive(Clone, Copy)]
pub struct Mat {
    n: usize,
    a: [f64; CAP],
}

impl core::fmt::Debug for Mat {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("Mat[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{:.6e}", self[(i, j)])?;
            }
        }
        f.write_str("]")
    }
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.as_slice() == other.as_slice()
    }
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_N, "matrix size {n} outside 1..={MAX_N}");
        Mat { n, a: [0.0; CAP] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds from a row-major slice of length n².
    pub fn from_slice(n: usize, s: &[f64]) -> Self {
        assert_eq!(s.len(), n * n);
        let mut m = Self::zeros(n);
        m.a[..n * n].copy_from_slice(s);
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.a[..self.n * self.n]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        let len = self.n * self.n;
        &mut self.a[..len]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        m.as_mut_slice().iter_mut().for_each(|x| *x *= s);
        m
    }

    /// ½(M − Mᵗ)
    pub fn skew(&self) -> Self {
        Self::from_fn(self.n, |i, j| 0.5 * (self[(i, j)] - self[(j, i)]))
    }

    /// ½(M + Mᵗ)
    pub fn sym(&self) -> Self {
        Self::from_fn(self.n, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn commutator(&self, other: &Mat) -> Mat {
        *self * *other - *other * *self
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        sqrt(self.as_slice().iter().map(|x| x * x).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |acc, &x| acc.max(abs(x)))
    }

    /// Operator 1-norm (max column sum).
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| abs(self[(i, j)])).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// ‖M + Mᵗ‖_F
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self[(i, j)] + self[(j, i)];
                s += d * d;
            }
        }
        sqrt(s)
    }

    /// ‖M − Mᵗ‖_F
    pub fn symmetry_defect(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self[(i, j)] - self[(j, i)];
                s += d * d;
            }
        }
        sqrt(s)
    }

    /// LU factorisation with partial pivoting. Returns `None` when a pivot vanishes.
    fn lu(&self) -> Option<(Mat, [usize; MAX_N], f64)> {
        let n = self.n;
        let mut lu = *self;
        let mut perm = [0usize; MAX_N];
        for (i, p) in perm.iter_mut().enumerate().take(n) {
            *p = i;
        }
        let mut sign = 1.0;
        for k in 0..n {
            let mut piv = k;
            let mut best = abs(lu[(k, k)]);
            for i in k + 1..n {
                let v = abs(lu[(i, k)]);
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = t;
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= f * v;
                }
            }
        }
        Some((lu, perm, sign))
    }

    pub fn det(&self) -> f64 {
        match self.lu() {
            None => 0.0,
            Some((lu, _, sign)) => (0..self.n).fold(sign, |acc, i| acc * lu[(i, i)]),
        }
    }

    pub fn inverse(&self) -> Option<Mat> {
        let n = self.n;
        let (lu, perm, _) = self.lu()?;
        let mut inv = Mat::zeros(n);
        for col in 0..n {
            let mut x = [0.0; MAX_N];
            for i in 0..n {
                x[i] = if perm[i] == col { 1.0 } else { 0.0 };
            }
            for i in 0..n {
                for k in 0..i {
                    x[i] -= lu[(i, k)] * x[k];
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    x[i] -= lu[(i, k)] * x[k];
                }
                x[i] /= lu[(i, i)];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Some(inv)
    }

    /// Eigenvalues of the symmetric part, ascending (cyclic Jacobi).
    pub fn sym_eigenvalues(&self) -> ([f64; MAX_N], usize) {
        let n = self.n;
        let mut a = self.sym();
        for _sweep in 0..64 {
            let mut off = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            let fro = a.frobenius();
            if off <= 1e-30 * (1.0 + fro * fro) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = if theta == 0.0 {
                        1.0
                    } else {
                        let sgn = if theta > 0.0 { 1.0 } else { -1.0 };
                        sgn / (abs(theta) + sqrt(theta * theta + 1.0))
                    };
                    let c = 1.0 / sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev = [0.0; MAX_N];
        for (i, e) in ev.iter_mut().enumerate().take(n) {
            *e = a[(i, i)];
        }
        ev[..n].sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
        (ev, n)
    }

    pub fn mul_vec(&self, x: &[f64]) -> [f64; MAX_N] {
        let mut y = [0.0; MAX_N];
        for i in 0..self.n {
            y[i] = (0..self.n).map(|j| self[(i, j)] * x[j]).sum();
        }
        y
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.a[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

impl Add for Mat {
    type Output = Mat;
    fn add(mut self, rhs: Mat) -> Mat {
        self += rhs;
        self
    }
}

impl AddAssign for Mat {
    fn add_assign(&mut self, rhs: Mat) {
        debug_assert_eq!(self.n, rhs.n);
        for (x, y) in self.as_mut_slice().iter_mut().zip(rhs.as_slice()) {
            *x += *y;
        }
    }
}

impl Sub for Mat {
    type Output = Mat;
    fn sub(mut self, rhs: Mat) -> Mat {
        self -= rhs;
        self
    }
}

impl SubAssign for Mat {
    fn sub_assign(&mut self, rhs: Mat) {
        debug_assert_eq!(self.n, rhs.n);
        for (x, y) in self.as_mut_slice().iter_mut().zip(rhs.as_slice()) {
            *x -= *y;
        }
    }
}

impl Neg for Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.scale(-1.0)
    }
}

impl Mul for Mat {
    type Output = Mat;
    fn mul(self, rhs: Mat) -> Mat {
        let n = self.n;
        debug_assert_eq!(n, rhs.n);
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * rhs.a[k * n + j];
                }
            }
        }
        out
    }
}

/// `out += a · b` for row-major blocks: a is r×k, b is k×c.
#[inline]
pub(crate) fn gemm_acc(a: &[f64], b: &[f64], out: &mut [f64], r: usize, k: usize, c: usize) {
    for i in 0..r {
        for l in 0..k {
            let ail = a[i * k + l];
            if ail == 0.0 {
                continue;
            }
            let brow = &b[l * c..l * c + c];
            let orow = &mut out[i * c..i * c + c];
            for j in 0..c {
                orow[j] += ail * brow[j];
            }
        }
    }
}

/// Solves the dense square system `a x = b` in place (a is d×d row-major); returns false if singular.
pub(crate) fn dense_solve(a: &mut [f64], b: &mut [f64], d: usize) -> bool {
    for k in 0..d {
        let mut piv = k;
        let mut best = abs(a[k * d + k]);
        for i in k + 1..d {
            let v = abs(a[i * d + k]);
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return false;
        }
        if piv != k {
            for j in 0..d {
                a.swap(k * d + j, piv * d + j);
            }
            b.swap(k, piv);
        }
        let dkk = a[k * d + k];
        for i in k + 1..d {
            let f = a[i * d + k] / dkk;
            if f == 0.0 {
                continue;
            }
            for j in k..d {
                a[i * d + j] -= f * a[k * d + j];
            }
            b[i] -= f * b[k];
        }
    }
    for i in (0..d).rev() {
        let mut s = b[i];
        for j in i + 1..d {
            s -= a[i * d + j] * b[j];
        }
        b[i] = s / a[i * d + i];
    }
    true
}
