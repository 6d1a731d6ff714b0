//! m-functions by Möbius contraction, the conjugation `C_E` to rotations,
//! the rotation angle `φ(E, x)`, the cohomological equation and the
//! reducibility probe built on them.

mod cohomology;
mod conjugation;
mod iterate;

pub use cohomology::{
    cohomological_residual, cohomological_solve, cohomological_solve_lenient, decay_exponent_a, divisor,
    reducibility_probe, CohomologicalSolution, ProbeReport, SMALL_DIVISOR,
};
pub use conjugation::{
    conjugated_step, conjugation_c, inverse, phi_grid, real_mobius, rotation_angle_phi, rotation_part, PhiGrid,
};
pub use iterate::{
    complex_potential, in_domain_omega, m_iterate, m_real_grid, m_real_limit, m_value, mobius, schrodinger_mobius,
    MIterate, RealLimit, UpperHalfPlanePoint, DELTA_LEVELS,
};
