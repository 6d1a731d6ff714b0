//! Finite-volume localization diagnostics: window spectra, Green's functions
//! by determinant quotients, `(m, k)`-regularity, eigenvector decay and the
//! sets `A_{k,r}`.

mod decay;
mod experiment;
mod green;
mod operator;
mod regularity;

pub use decay::*;
pub use experiment::*;
pub use green::*;
pub use operator::*;
pub use regularity::*;
