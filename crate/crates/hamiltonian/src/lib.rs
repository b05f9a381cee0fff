//! The modified-KdV Hamiltonian with a quasi-linear perturbation.
//!
//! H(u) = ½∫u_x² − (ς/4)∫u⁴ + ∫f(x, u, u_x), integrals with respect to the
//! normalized measure dx/2π, on the space of zero-average real fields. The
//! perturbation density f is a trigonometric polynomial in x and polynomial
//! in (u, u_x), vanishing at least to order five, so every derivative that
//! the linearized theory needs is exact. A variant adds λM² with λ = 3ς/4.

mod density;
mod model;

pub use density::{DensitySpec, Monomial, PolyDensity, Trig};
pub use model::{mass, poisson_bracket, symplectic_form, Model, ModelError};
