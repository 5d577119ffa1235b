//! Fourier–Jacobi style restriction of exceptional-group modular forms.

pub mod arith;
pub mod coeff;
pub mod jordan;
pub mod lattice;
pub mod octonion;
pub mod qseries;
pub mod restriction;
pub mod solver;

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Jordan(#[from] jordan::JordanError),
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error(transparent)]
    QSeries(#[from] qseries::QSeriesError),
    #[error(transparent)]
    Coeff(#[from] coeff::CoeffError),
    #[error(transparent)]
    Restriction(#[from] restriction::RestrictionError),
    #[error(transparent)]
    Solve(#[from] solver::SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: malformed, out of domain, inconsistent.
    Validation,
    /// Well-formed input outside what is implemented.
    Unsupported,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use coeff::CoeffError as C;
        use qseries::QSeriesError as Q;
        use restriction::RestrictionError as R;
        fn q(e: &Q) -> ErrorKind {
            match e {
                Q::UnsupportedWeight(_) | Q::UnknownSeries(_) => ErrorKind::Unsupported,
                _ => ErrorKind::Validation,
            }
        }
        fn c(e: &C) -> ErrorKind {
            match e {
                C::UnsupportedProfile { .. } => ErrorKind::Unsupported,
                C::QSeries(e) => q(e),
                _ => ErrorKind::Validation,
            }
        }
        match self {
            Error::Lattice(lattice::LatticeError::NormOutOfRange { .. }) => ErrorKind::Unsupported,
            Error::QSeries(e) => q(e),
            Error::Coeff(e) | Error::Restriction(R::Coeff(e)) => c(e),
            Error::Restriction(R::NoClosedForm { .. }) => ErrorKind::Unsupported,
            Error::Restriction(R::Lattice(lattice::LatticeError::NormOutOfRange { .. })) => ErrorKind::Unsupported,
            _ => ErrorKind::Validation,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Validation => 2,
            ErrorKind::Unsupported => 3,
        }
    }
}
