//! Truncated Fourier representation of real periodic fields on T^ν × T_x,
//! with the norms, projectors and operator containers the rest of the
//! workspace builds on.
//!
//! Conventions used throughout the workspace:
//! - integrals are normalized means, ∫ := (1/2π)^(ν+1) ∫ dφ dx, so a field's
//!   mean equals its (0,0) Fourier coefficient and Parseval reads
//!   ∫ u² = Σ |u_{l,j}|²;
//! - ⟨l,j⟩ := (1 + |l|² + j²)^{1/2} (Japanese bracket) weights all Sobolev and
//!   decay norms, and truncation cuts on the same bracket so the smoothing
//!   inequalities hold exactly.

pub mod decay;
pub mod field;
pub mod grid;
pub mod lattice;
pub mod linalg;
pub mod lip;
pub mod par;

pub use decay::DecayOperator;
pub use field::{FieldError, Projection, TorusField};
pub use lattice::{LatticeOp, ModeSet};
pub use lip::ParamFamily;

pub type C64 = num_complex::Complex64;

/// Low Sobolev threshold s₀ = (ν+2)/2.
pub fn s0(nu: usize) -> f64 {
    (nu as f64 + 2.0) / 2.0
}

/// ⟨l,j⟩ = (1 + |l|² + j²)^{1/2}.
pub fn bracket(l: &[i64], j: i64) -> f64 {
    let l2: i64 = l.iter().map(|&a| a * a).sum();
    ((1 + l2 + j * j) as f64).sqrt()
}

/// ⟨l⟩ = (1 + |l|²)^{1/2}.
pub fn bracket_l(l: &[i64]) -> f64 {
    let l2: i64 = l.iter().map(|&a| a * a).sum();
    ((1 + l2) as f64).sqrt()
}
