use thiserror::Error;

/// Failures raised by the model, spectral, scattering and dynamics routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coupling g1 = {g_1} MHz is below g_min = {g_min} MHz (no pseudo-Hermitian realization)")]
    CouplingBelowMinimum { g_1: f64, g_min: f64 },

    #[error("no physical solution: {0}")]
    NoPhysicalSolution(String),

    #[error("no discriminant sign change in ({lo}, {hi}] MHz")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("self-energy pole on the real axis at {omega} MHz")]
    PoleAtRealFrequency { omega: f64 },

    #[error("response denominator vanishes at {omega} MHz (|D| = {magnitude:e})")]
    SingularDenominator { omega: f64, magnitude: f64 },

    #[error("time step {dt} us exceeds stability bound {bound} us")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("state norm diverged at t = {time} us")]
    DivergenceDetected { time: f64 },

    #[error("spectrum too degenerate to fit: separation {separation:e} MHz below {limit:e} MHz")]
    DegenerateSpectrum { separation: f64, limit: f64 },

    #[error("matrix is not numerically diagonalizable (condition number {condition:e})")]
    NotDiagonalizable { condition: f64 },

    #[error("triple-root verification failed (relative residual {residual:e})")]
    Ep3VerificationFailed { residual: f64 },
}

impl Error {
    /// Variant name, used as the diagnostic tag printed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::CouplingBelowMinimum { .. } => "CouplingBelowMinimum",
            Error::NoPhysicalSolution(_) => "NoPhysicalSolution",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::PoleAtRealFrequency { .. } => "PoleAtRealFrequency",
            Error::SingularDenominator { .. } => "SingularDenominator",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::DivergenceDetected { .. } => "DivergenceDetected",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            Error::NotDiagonalizable { .. } => "NotDiagonalizable",
            Error::Ep3VerificationFailed { .. } => "Ep3VerificationFailed",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
