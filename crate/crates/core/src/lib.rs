pub mod asymptotic;
pub mod bigcomplex;
pub mod diagonal_law;
pub mod error;
pub mod exppoly;
pub mod helstrom;
pub mod linalg;
pub mod montecarlo;
pub mod oracle;
pub mod params;
pub mod poly;
pub mod positivity;
pub mod quad;
pub mod specfun;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use params::EnsembleParams;
pub use specfun::{BigFloat, Rational, DEFAULT_PREC};
