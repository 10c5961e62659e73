//! Scalar float helpers that work without `std`.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn powf(x: f64, p: f64) -> f64 {
    libm::pow(x, p)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn tgamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// |x|^p with the convention 0^p = 0 and a fast path for the common integer cases.
#[inline]
pub fn abs_pow(x: f64, p: f64) -> f64 {
    let a = abs(x);
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else if p == 3.0 {
        a * a * a
    } else if a == 0.0 {
        0.0
    } else {
        powf(a, p)
    }
}

/// Volume of the unit ball in dimension `m`.
pub fn unit_ball_volume(m: usize) -> f64 {
    let half = m as f64 / 2.0;
    powf(core::f64::consts::PI, half) / tgamma(half + 1.0)
}

/// Monotonic seconds, when a clock is available.
#[cfg(feature = "std")]
pub(crate) fn now() -> f64 {
    extern crate std;
    use std::sync::OnceLock;
    use std::time::Instant;
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed().as_secs_f64()
}

#[cfg(not(feature = "std"))]
pub(crate) fn now() -> f64 {
    0.0
}
