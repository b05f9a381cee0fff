//! Embedded-torus functional setting.
//!
//! An invariant torus is sought as an embedding φ ↦ (φ + Θ(φ), y(φ), z(φ)):
//! corrected angles and actions on the tangential sites plus a normal
//! remainder, composed with the square-root action coordinates and the
//! quartic normalization. This crate carries the scaling parameters, the
//! twist between amplitudes and frequencies, the embedding map, the split of
//! the rescaled energy into its normal form and the perturbation, and the
//! first-order invariance residual F(i, ζ) whose zeros are invariant tori.
//!
//! Transcendental quantities (square roots and complex exponentials of the
//! unknowns) are evaluated on a fixed oversampled angle grid and analyzed
//! back onto the coefficient box; that sampling is part of the definition of
//! the discretized functional, so residuals are exactly reproducible.

mod embed;
mod embedding;
mod energy;
mod functional;
mod params;
mod twist;

pub use embed::{
    a_eps_point, assemble_field, assemble_scalar, da_dtheta_coeff, da_dy_coeff, embed_a_eps,
    phi_of_flat, sample_sizes, slice_at, EmbedError,
};
pub use embedding::{EmbeddingError, TorusEmbedding};
pub use energy::{
    dtheta_n, e_of_xi, grad_n_z, grad_script_h, h_eps_point, n_quadratic_form, script_h,
    split_n_p, EnergyError,
};
pub use functional::{
    d_omega, d_omega_inv, f_operator, grad_h_eps_point, min_small_divisor, FPart, FunctionalError,
};
pub use params::{Params, ParamsError};
pub use twist::{freq_amp, omega_bar, twist_inverse, twist_matrix, xi_of_omega};
