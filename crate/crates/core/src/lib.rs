//! Numerical verification toolkit for spectral identities of automorphic
//! forms on the modular surface.
//!
//! The crate evaluates Whittaker functions, archimedean period integrals,
//! Fourier expansions of Maass forms, holomorphic forms and Eisenstein
//! series, and degree one to three L-functions, all generically over a
//! scalar type implementing [`Real`] (`f64` or the bundled double-double
//! [`Dd`]). On top of the evaluators, [`verify`] assembles two-sided checks
//! that recompute each closed-form identity by an independent route
//! (quadrature against closed form, series against unfolded integral) and
//! reports signed errors against a requested tolerance.
//!
//! Concrete aliases for the two supported working precisions are exported
//! at the crate root: [`F64`]/[`C64`] and [`F128`]/[`C128`].

#![warn(missing_docs)]

pub mod archimedean;
pub mod dd;
pub mod forms;
pub mod hyper;
pub mod lfun;
pub mod quad;
pub mod real;
pub mod special;
pub mod verify;
pub mod whittaker;

pub use dd::Dd;
pub use real::Real;

use num_complex::Complex;

/// Native double precision scalar.
pub type F64 = f64;
/// Double-double scalar with roughly 31 significant decimal digits.
pub type F128 = Dd;
/// Complex number over [`F64`].
pub type C64 = Complex<f64>;
/// Complex number over [`F128`].
pub type C128 = Complex<Dd>;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the mathematical domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iteration failed to reach the requested tolerance.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// Text that should contain a number or a record could not be read.
    #[error("parse error: {0}")]
    Parse(String),
    /// A required data file or record is absent.
    #[error("missing fixture: {0}")]
    MissingFixture(String),
}

impl Error {
    /// Domain error with a formatted message.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Convergence failure with a formatted message.
    pub fn no_convergence(msg: impl Into<String>) -> Self {
        Error::NoConvergence(msg.into())
    }

    /// Parse failure quoting the offending text.
    pub fn parse(text: impl fmt::Display) -> Self {
        Error::Parse(format!("could not parse {text:?}", text = text.to_string()))
    }

    /// Missing fixture with its path or label.
    pub fn missing_fixture(what: impl Into<String>) -> Self {
        Error::MissingFixture(what.into())
    }
}

use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// A truncated series value together with an a-posteriori tail estimate.
///
/// The estimate is carried in `f64` regardless of the working scalar: it
/// measures the neglected remainder, never the value itself, so double
/// precision is always enough headroom.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue<T> {
    /// Sum of the retained terms.
    pub value: Complex<T>,
    /// Upper estimate for the absolute value of the dropped tail.
    pub tail: f64,
}
