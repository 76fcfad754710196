use thiserror::Error;

/// Errors raised by the tuning toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("leading cubic coefficient {0:e} is negligible relative to the others")]
    DegenerateLeadingCoefficient(f64),

    #[error("symmetric eigensolver did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("closed loop is not Hurwitz (rightmost pole real part {max_real})")]
    UnstableClosedLoop { max_real: f64 },

    #[error("gains do not stabilize the loop; the inverse Riccati problem is undefined")]
    UnstableGains,

    #[error("controller zeros are real in the w-plane (kp^2 >= 4 ki kd)")]
    RealZeros,

    #[error("w-plane zero angle {phi} lies outside the under-damped wedge for q = {q}")]
    OutsideWedge { phi: f64, q: f64 },

    #[error("desired damping {desired} is not reachable for any q in (0, 1]")]
    TargetUnreachable { desired: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Non-fatal conditions the caller may want to surface.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// A synthesized gain is zero or negative.
    NonPositiveGain { name: &'static str, value: f64 },
    /// A reconstructed state weight is negative.
    IndefiniteWeights { index: usize, value: f64 },
    /// The real pole is closer than three times the dominant decay rate.
    WeakDominance { m_actual: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::NonPositiveGain { name, value } => {
                write!(f, "gain {name} = {value} is not positive")
            }
            Warning::IndefiniteWeights { index, value } => {
                write!(f, "weight Q{} = {value} is negative", index + 1)
            }
            Warning::WeakDominance { m_actual } => {
                write!(f, "relative dominance {m_actual:.4} is below 3")
            }
        }
    }
}
