//! Error types shared across the crate.

use thiserror::Error;

/// Domain errors raised by the model, GBZ, topology, pump, and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// |mu| = |gamma|: the GBZ radius is zero or infinite (maximal nonreciprocity).
    #[error("|mu| = |gamma| (mu = {mu}, gamma = {gamma}); GBZ radius is 0 or infinite")]
    DegenerateGBZ { mu: f64, gamma: f64 },

    /// |E| at or below the EP tolerance: eigenvectors coalesce and the matrix may be defective.
    #[error("|E| = {abs_e:.3e} <= tol = {tol:.3e}; eigenvectors coalesce")]
    ExceptionalPoint { abs_e: f64, tol: f64 },

    /// t2(t) vanished: the beta-dependence of E^2 degenerates.
    #[error("|t2| < 1e-12 at drive phase {phase}")]
    DegenerateDrive { phase: f64 },

    /// phi congruent to 0 mod 2*pi: the two admissible roots coincide trivially.
    #[error("phi = {phi} is congruent to 0 mod 2*pi")]
    DegeneratePhi { phi: f64 },

    /// The two beta roots failed the equal-magnitude admissibility condition.
    #[error("root magnitudes differ by {spread:.3e} (tol {tol:.3e})")]
    AdmissibilityViolation { spread: f64, tol: f64 },

    /// A grid point violated the gap precondition of a Chern or pump run.
    #[error(
        "GaplessSpectrum: min |E| = {min_abs_e:.3e} at (momentum = {momentum:.6}, phase = {phase:.6})"
    )]
    GaplessSpectrum {
        min_abs_e: f64,
        momentum: f64,
        phase: f64,
    },

    /// A plaquette flux reached the branch cut: the grid is too coarse.
    #[error("max plaquette flux {max_flux} >= pi; grid too coarse")]
    NotConverged { max_flux: f64 },

    /// The biorthogonal overlap drifted: integrator failure or an EP crossing.
    #[error(
        "OverlapCollapse: |<psi_L|psi_R>| drifted by {drift:.3e} at time {time:.6} (momentum = {momentum:.6})"
    )]
    OverlapCollapse {
        drift: f64,
        time: f64,
        momentum: f64,
    },

    /// The dense eigensolver did not converge.
    #[error("dense eigensolver failed to converge")]
    NoConvergence,

    /// An argument fell outside its documented domain.
    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable name, used by the CLI diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DegenerateGBZ { .. } => "DegenerateGBZ",
            Error::ExceptionalPoint { .. } => "ExceptionalPoint",
            Error::DegenerateDrive { .. } => "DegenerateDrive",
            Error::DegeneratePhi { .. } => "DegeneratePhi",
            Error::AdmissibilityViolation { .. } => "AdmissibilityViolation",
            Error::GaplessSpectrum { .. } => "GaplessSpectrum",
            Error::NotConverged { .. } => "NotConverged",
            Error::OverlapCollapse { .. } => "OverlapCollapse",
            Error::NoConvergence => "NoConvergence",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
