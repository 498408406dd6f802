//! Process-level error taxonomy. Every failure is classified into one of
//! three exit codes so scripted callers can branch on the kind of failure:
//!
//! * `2` — invalid input (bad flags, malformed config file, out-of-range
//!   physics parameters). Clap's own usage errors also exit with 2.
//! * `3` — a numerical routine failed on admissible input (non-convergent
//!   gap iteration, probe pinned on the band-edge divergence).
//! * `4` — filesystem trouble while writing results.

use polaron_waveguide::{
    DynamicsError, ModelError, PolaronError, ScatteringError, SelfEnergyError, ToulouseError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerics(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl AppError {
    /// Process exit code for this failure class.
    pub fn code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Numerics(_) => 3,
            AppError::Io(_) => 4,
        }
    }
}

impl From<ModelError> for AppError {
    fn from(e: ModelError) -> Self {
        AppError::Validation(e.to_string())
    }
}

impl From<PolaronError> for AppError {
    fn from(e: PolaronError) -> Self {
        match e {
            PolaronError::NonConvergence { .. } => AppError::Numerics(e.to_string()),
            _ => AppError::Validation(e.to_string()),
        }
    }
}

impl From<SelfEnergyError> for AppError {
    fn from(e: SelfEnergyError) -> Self {
        match e {
            SelfEnergyError::BandEdgeDivergence { .. } => AppError::Numerics(e.to_string()),
            _ => AppError::Validation(e.to_string()),
        }
    }
}

impl From<ScatteringError> for AppError {
    fn from(e: ScatteringError) -> Self {
        match e {
            ScatteringError::SelfEnergy(inner) => inner.into(),
            ScatteringError::Polaron(inner) => inner.into(),
            ScatteringError::NoCoupling { .. } => AppError::Numerics(e.to_string()),
            ScatteringError::EmptyScan => AppError::Validation(e.to_string()),
        }
    }
}

impl From<ToulouseError> for AppError {
    fn from(e: ToulouseError) -> Self {
        match e {
            ToulouseError::Scattering(inner) => inner.into(),
            _ => AppError::Validation(e.to_string()),
        }
    }
}

impl From<DynamicsError> for AppError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Model(inner) => inner.into(),
            DynamicsError::Polaron(inner) => inner.into(),
            _ => AppError::Validation(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for AppError {
    fn from(e: serde_json::Error) -> Self {
        AppError::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}
