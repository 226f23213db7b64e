/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),

    #[error("dimension {n} exceeds the supported maximum of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("eigenvalue iteration did not converge within the sweep budget (ill-conditioned input)")]
    EigenNoConvergence,

    #[error("matrix is numerically singular")]
    Singular,

    #[error("system matrix A is singular: the model has a pole at the origin")]
    PoleAtOrigin,

    #[error("singular frequency-response solve at omega = {omega} rad/s; an imaginary-axis pole is nearby, use residue analysis instead")]
    SingularAtFrequency { omega: f64 },

    #[error("realization is not minimal (controllability/observability rank deficient)")]
    NonMinimal,

    #[error("invalid frequency grid: {0}")]
    InvalidGrid(&'static str),

    #[error("effective frequency grid is empty")]
    EmptyGrid,

    #[error("no pole of the system near omega = {omega} rad/s")]
    NoPoleNear { omega: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("linear constraint B + A Y C' = 0 is inconsistent: the realization violates the NI lemma conditions, so the system is not negative imaginary")]
    ConstraintInconsistent,

    #[error("no certificate found within the search budget; this outcome is inconclusive and is NOT a proof that the system fails the negative-imaginary property")]
    NoCertificateFound,

    #[error("state (e, u, edot) lies outside the sector beyond tolerance at t = {t}")]
    OutsideSector { t: f64 },

    #[error("mode-switch bisection failed to make progress at t = {t}; reduce the step size")]
    EventResolution { t: f64 },

    #[error("chattering guard tripped after {events} mode switches; run aborted")]
    Chattering { events: usize },

    #[error("closed-loop return difference |1 - G*Dh| = {value:e} at omega = {omega} rad/s is below the safe minimum")]
    NearSingularLoop { omega: f64, value: f64 },

    #[error("the requested storage-function monitor needs a Y certificate")]
    MissingCertificate,
}
