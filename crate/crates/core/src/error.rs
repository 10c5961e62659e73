use alloc::string::String;
use core::fmt;

/// Which a-posteriori smallness monitor tripped during gauge construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monitor {
    /// `∫|∇P|^m` above the configured threshold.
    GradientEnergy,
    /// `‖Δ_h(P − Id)‖_{L^{m/2}}` above the configured threshold.
    SecondOrder,
    /// Newton failed to reach the residual tolerance within the iteration budget.
    Newton,
}

impl fmt::Display for Monitor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Monitor::GradientEnergy => f.write_str("eps0 (gradient energy)"),
            Monitor::SecondOrder => f.write_str("eps1 (second-order norm)"),
            Monitor::Newton => f.write_str("newton convergence"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Rejected arguments: bad grid sizes, mismatched shapes, tolerances out of range.
    InvalidInput(String),
    /// A norm was requested over a region containing no grid nodes.
    EmptyRegion,
    /// `dexp_conj_inverse` called with `‖U‖_F` beyond the series guard.
    SeriesGuard { norm: f64, limit: f64 },
    /// Matrix too far from O(n) (or singular) for the polar projection.
    FarFromOrthogonal { sigma_min: f64 },
    /// Krylov iteration failed on a perturbed operator.
    SolverDivergence {
        iterations: usize,
        relative_residual: f64,
        first_order_max: f64,
        zero_order_max: f64,
    },
    /// Gauge construction stopped because a smallness monitor was violated.
    MonitorBreach {
        monitor: Monitor,
        stage: usize,
        value: f64,
        threshold: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::EmptyRegion => f.write_str("integration region contains no grid nodes"),
            Error::SeriesGuard { norm, limit } => write!(
                f,
                "|U|_F = {norm:.3e} exceeds the dexp series guard {limit}; use smaller continuation steps"
            ),
            Error::FarFromOrthogonal { sigma_min } => write!(
                f,
                "matrix too far from O(n) for projection (sigma_min = {sigma_min:.3e})"
            ),
            Error::SolverDivergence {
                iterations,
                relative_residual,
                first_order_max,
                zero_order_max,
            } => write!(
                f,
                "Krylov solve diverged after {iterations} iterations (relative residual {relative_residual:.3e}); \
                 perturbation monitors: first-order {first_order_max:.3e}, zero-order {zero_order_max:.3e}"
            ),
            Error::MonitorBreach {
                monitor,
                stage,
                value,
                threshold,
            } => write!(
                f,
                "monitor {monitor} breached at continuation stage {stage}: {value:.3e} > {threshold:.3e}"
            ),
        }
    }
}

#[cfg(feature = "std")]
extern crate std;

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
