//! Trigonometric products: the sine-product identities and bounds over full
//! residue systems, and the ε-uniformity measure of node sets together with
//! the Lagrange-interpolation argument that uses it.

mod products;
mod report;
mod uniformity;

pub use products::*;
pub use report::*;
pub use uniformity::*;
