//! The assembled approximate right inverse: transport the data through the
//! chart differential, solve the triangular system, transport back. Its
//! quality is audited against a direct directional derivative of the
//! functional, with the loss-of-derivatives budget μ = τ + 2 in the
//! denominator norm.

use crate::chart::{dg_apply, dg_inv_apply, ChartData};
use crate::ktaylor::KTaylor;
use crate::solve::{solve_d, DSolution, NormalSolve, SolveError};
use fourier_core::s0;
use hamiltonian::Model;
use thiserror::Error;
use torus_functional::{f_operator, FPart, FunctionalError, Params, TorusEmbedding};
use weak_bnf::BirkhoffGenerator;

#[derive(Debug, Error)]
pub enum InverseError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}

/// T₀ g = DG̃(φ,0,0) ∘ 𝔻⁻¹ ∘ DG(φ,0,0)⁻¹ g: the candidate correction
/// (î, ζ̂) for the data g, plus the solve diagnostics.
pub fn t0_apply(
    k: &KTaylor,
    chart: &ChartData,
    params: &Params,
    omega: &[f64],
    linv: &dyn NormalSolve,
    g: &TorusEmbedding,
) -> Result<(TorusEmbedding, DSolution), SolveError> {
    let u = dg_inv_apply(chart, g);
    let sol = solve_d(k, chart, params, omega, linv, &u)?;
    let tangent = TorusEmbedding {
        theta: sol.psi.clone(),
        y: sol.eta.clone(),
        z: sol.w.clone(),
        zeta: sol.zeta.clone(),
    };
    let out = dg_apply(chart, &tangent);
    Ok((out, sol))
}

/// Directional derivative of the functional at (i₀, ζ₀) along (î, ζ̂) by
/// extrapolated central differences on an exactly evaluated functional; the
/// step is normalized against the direction's size.
pub fn df_directional(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    omega: &[f64],
    emb: &TorusEmbedding,
    dir: &TorusEmbedding,
) -> Result<TorusEmbedding, FunctionalError> {
    let nu = model.nu();
    let scale = dir.norm(s0(nu)) + dir.zeta_norm();
    if scale == 0.0 {
        return Ok(TorusEmbedding::trivial(nu, params.n_phi, params.n_x));
    }
    let h = 5e-3 / scale;
    let f_at = |t: f64| -> Result<TorusEmbedding, FunctionalError> {
        let mut e = emb.clone();
        e.axpy(t, dir);
        f_operator(model, gen, params, omega, &e, FPart::Full)
    };
    let diff = |hh: f64| -> Result<TorusEmbedding, FunctionalError> {
        let hi = f_at(hh)?;
        let lo = f_at(-hh)?;
        let mut d = TorusEmbedding::trivial(nu, params.n_phi, params.n_x);
        d.axpy(0.5 / hh, &hi);
        d.axpy(-0.5 / hh, &lo);
        Ok(d)
    };
    let d1 = diff(h)?;
    let d2 = diff(h / 2.0)?;
    let mut out = TorusEmbedding::trivial(nu, params.n_phi, params.n_x);
    out.axpy(4.0 / 3.0, &d2);
    out.axpy(-1.0 / 3.0, &d1);
    Ok(out)
}

/// The audited quality of one inverse application.
pub struct InverseDefect {
    /// ‖(d_{i,ζ}F ∘ T₀ − 1) g‖_{s₀} / ‖g‖_{s₀+μ}, μ = τ + 2.
    pub defect: f64,
    /// ‖F(i₀, ζ₀)‖_{s₀} — the size the defect is expected to scale with.
    pub residual_s0: f64,
    pub cond_m1: f64,
}

/// Apply T₀, differentiate the functional along the result, and compare
/// with the data. `emb` is the torus the derivative is taken at (the
/// uncorrected iterate); `chart` and `k` belong to its isotropic correction.
#[allow(clippy::too_many_arguments)]
pub fn approx_inverse_defect(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    omega: &[f64],
    emb: &TorusEmbedding,
    chart: &ChartData,
    k: &KTaylor,
    linv: &dyn NormalSolve,
    g: &TorusEmbedding,
) -> Result<InverseDefect, InverseError> {
    let (h, sol) = t0_apply(k, chart, params, omega, linv, g)?;
    let r = df_directional(model, gen, params, omega, emb, &h)?;
    let diff = r.sub(g);
    let s = s0(model.nu());
    let mu = params.tau + 2.0;
    let denom = (g.norm(s + mu) + g.zeta_norm()).max(1e-300);
    let defect = diff.norm(s) / denom;
    let residual_s0 =
        f_operator(model, gen, params, omega, emb, FPart::Full)?.norm(s);
    Ok(InverseDefect { defect, residual_s0, cond_m1: sol.cond_m1 })
}
