//! Approximate right inverse of the linearized torus equation.
//!
//! The route: correct the embedding to an isotropic one, build the torus-
//! adapted symplectic chart around it, Taylor-expand the transported
//! Hamiltonian to second order, and solve the resulting triangular system
//! exactly — the off-triangular remainder is carried by the torus residual,
//! so the composite inverts the true linearization up to a defect linear in
//! ‖F(i₀)‖. The normal-direction solver is pluggable: anything that inverts
//! 𝓛_ω = Π⊥(D_ω − ∂ₓK02)Π⊥ serves, from the dense small-box factorization
//! here to the conjugation-based reduction built elsewhere.

mod chart;
mod inverse;
mod isotropy;
mod ktaylor;
mod smallmat;
mod solve;

pub use chart::{
    build_chart, chart_point, dg_apply, dg_inv_apply, dg_point, dg_point_inv,
    two_form, ChartData, ChartError, ChartPoint,
};
pub use inverse::{
    approx_inverse_defect, df_directional, t0_apply, InverseDefect, InverseError,
};
pub use isotropy::{
    isotropic_correction, isotropy_data, laplace_phi_inv, IsotropyData,
    IsotropyError,
};
pub use ktaylor::{
    k02_apply, k02_operator, k_taylor, neglected_sup, twist_block, KTaylor,
    TaylorError,
};
pub use solve::{
    d_apply, solve_d, DSolution, DefectReport, LatticeSolve, NormalSolve,
    SolveError,
};
