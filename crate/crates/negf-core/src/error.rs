//! Error type shared by all engine modules.

use alloc::string::String;
use core::fmt;

/// Failure modes of the transport engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix dimensions incompatible with the requested operation.
    DimensionMismatch(String),
    /// A matrix required to be Hermitian is not, beyond tolerance.
    NotHermitian { defect: f64, tol: f64 },
    /// A broadening or density matrix violates positive semidefiniteness.
    NotPositiveSemidefinite { min_eigenvalue: f64, tol: f64 },
    /// Decimation did not reach the requested residual.
    DecimationNotConverged { residual: f64, tol: f64, iterations: usize },
    /// Linear solve hit a (numerically) singular matrix.
    SingularMatrix,
    /// Hermitian eigensolver failed to reduce the off-diagonal norm.
    EigenNotConverged { off_norm: f64 },
    /// A trace expected to be real carries too large an imaginary part.
    ImaginaryResidue { residue: f64, tol: f64 },
    /// Eigenchannel matrix asymmetric beyond tolerance before symmetrization.
    AsymmetryResidue { residue: f64, tol: f64 },
    /// Contour bottom does not sit below the full spectral support.
    SpectrumBound { drift: f64, tol: f64 },
    /// Parameter outside its documented domain.
    InvalidParameter(String),
    /// Magnetoresistance undefined because the reference conductance vanishes.
    UndefinedMagnetoresistance { g_pc: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::NotHermitian { defect, tol } => {
                write!(f, "matrix not Hermitian: defect {defect:.3e} exceeds {tol:.3e}")
            }
            Error::NotPositiveSemidefinite { min_eigenvalue, tol } => write!(
                f,
                "matrix not positive semidefinite: min eigenvalue {min_eigenvalue:.3e} below -{tol:.3e}"
            ),
            Error::DecimationNotConverged { residual, tol, iterations } => write!(
                f,
                "surface GF decimation stalled at residual {residual:.3e} (tol {tol:.3e}) after {iterations} iterations"
            ),
            Error::SingularMatrix => write!(f, "singular matrix in linear solve"),
            Error::EigenNotConverged { off_norm } => {
                write!(f, "Hermitian eigensolver stalled at off-diagonal norm {off_norm:.3e}")
            }
            Error::ImaginaryResidue { residue, tol } => write!(
                f,
                "imaginary residue {residue:.3e} on a real trace exceeds {tol:.3e}"
            ),
            Error::AsymmetryResidue { residue, tol } => write!(
                f,
                "eigenchannel matrix asymmetry {residue:.3e} exceeds {tol:.3e}"
            ),
            Error::SpectrumBound { drift, tol } => write!(
                f,
                "contour bottom above spectral support: refinement drift {drift:.3e} exceeds {tol:.3e}"
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::UndefinedMagnetoresistance { g_pc } => write!(
                f,
                "magnetoresistance undefined: parallel conductance {g_pc:.3e} below guard"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
