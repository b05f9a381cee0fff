//! Exact triangular solve of the chart-linearized equation
//!
//!   ω·∂_φ ψ̂ − K20 η̂ − K11ᵀ ŵ = g₁
//!   ω·∂_φ η̂ + [∂_φθ₀]ᵀ ζ̂      = g₂
//!   𝓛_ω ŵ  − ∂ₓ(K11 η̂)        = g₃ ,   𝓛_ω = ω·∂_φ − ∂ₓK02 .
//!
//! ζ̂ is forced by the average of g₂; the zero-average part of η̂ follows by
//! transport inversion; the constant part ⟨η̂⟩ is chosen so the angle
//! equation's right side averages to zero, which needs the invertibility of
//! ⟨M₁⟩ = ⟨K20 + K11ᵀ𝓛_ω⁻¹∂ₓK11⟩ — the twist, at leading order. Every
//! coefficient product is truncated straight back to the working box, and
//! `d_apply` recomputes the identical quantities, so the round trip is exact
//! to rounding, not to a discretization tolerance.

use crate::chart::ChartData;
use crate::ktaylor::KTaylor;
use crate::smallmat::{invert_small, one_norm_small};
use fourier_core::grid::product;
use fourier_core::linalg::Lu;
use fourier_core::{C64, FieldError, LatticeOp, TorusField};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use torus_functional::{d_omega, d_omega_inv, min_small_divisor, FunctionalError, Params, TorusEmbedding};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("frequency fails the small-divisor bound: min |ω·l|⟨l⟩^τ = {min:.3e} < γ = {gamma:.3e}")]
    Diophantine { min: f64, gamma: f64 },
    #[error("average action block is numerically singular (cond ≈ {0:.3e})")]
    IllConditioned(f64),
    #[error("normal operator: {0}")]
    Normal(String),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Handle on the normal-sector operator 𝓛_ω. Production passes the inverse
/// obtained from the conjugation-to-constant-coefficients pipeline; tests
/// may use a direct lattice factorization.
pub trait NormalSolve: Sync {
    fn apply(&self, u: &TorusField) -> TorusField;
    fn solve(&self, g: &TorusField) -> Result<TorusField, SolveError>;
}

/// Direct LU factorization of 𝓛_ω = D_ω − ∂ₓ∘K02 on a mode lattice. Exact
/// and simple; cubic in the lattice dimension, so for small boxes only.
pub struct LatticeSolve {
    op: LatticeOp,
    lu: Lu,
}

impl LatticeSolve {
    pub fn new(omega: &[f64], k02: &LatticeOp) -> Result<Self, SolveError> {
        let modes = k02.modes().clone();
        let om = omega.to_vec();
        let dw = LatticeOp::diag(modes.clone(), |l, _j| {
            let s: f64 = l.iter().zip(&om).map(|(&li, oi)| li as f64 * oi).sum();
            C64::new(0.0, s)
        });
        let dx = LatticeOp::diag(modes, |_l, j| C64::new(0.0, j as f64));
        let op = dw.sub(&dx.compose(k02));
        let lu = Lu::factor(op.mat())
            .map_err(|e| SolveError::Normal(format!("factorization failed: {e}")))?;
        Ok(LatticeSolve { op, lu })
    }

    pub fn op(&self) -> &LatticeOp {
        &self.op
    }
}

impl NormalSolve for LatticeSolve {
    fn apply(&self, u: &TorusField) -> TorusField {
        self.op.apply_field(u)
    }

    fn solve(&self, g: &TorusField) -> Result<TorusField, SolveError> {
        let b = self.op.modes().gather(g);
        Ok(self.op.modes().scatter(&self.lu.solve_vec(&b)))
    }
}

/// Solution tuple of the triangular system, plus the diagnostics the run
/// log wants.
pub struct DSolution {
    pub psi: Vec<TorusField>,
    pub eta: Vec<TorusField>,
    pub w: TorusField,
    pub zeta: Vec<f64>,
    pub eta_avg: Vec<f64>,
    pub cond_m1: f64,
}

/// One line of the per-iteration defect log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DefectReport {
    pub iteration: usize,
    pub residual_s0: f64,
    pub defect: f64,
    pub cond_m1: f64,
}

/// (K20 η̂)_row, truncated to the block's box.
fn k20_row(k: &KTaylor, eta: &[TorusField], row: usize) -> TorusField {
    let nu = k.nu;
    let mut out = TorusField::zero(
        k.k20[0].nu(),
        k.k20[0].n_phi(),
        0,
    );
    for l in 0..nu {
        out.axpy(1.0, &product(&[&k.k20[row * nu + l], &eta[l]]));
    }
    out
}

/// K11 η̂ as a (φ, x)-field on the block's box.
fn k11_eta(k: &KTaylor, eta: &[TorusField]) -> TorusField {
    let mut out = TorusField::zero(k.k11[0].nu(), k.k11[0].n_phi(), k.k11[0].n_x());
    for (col, e) in k.k11.iter().zip(eta) {
        out.axpy(1.0, &product(&[col, e]));
    }
    out
}

/// (K11ᵀ ŵ)_row = ∫ (K11 ē_row) ŵ dμ_x as a φ-function — the x-average of
/// the pointwise product, exact on the working box.
fn k11t_w(k: &KTaylor, w: &TorusField, row: usize) -> TorusField {
    let p = product(&[&k.k11[row], w]);
    let mut out = TorusField::zero(p.nu(), p.n_phi(), 0);
    let mut l = vec![0i64; p.nu()];
    for idx in 0..p.coeffs().len() {
        let j = p.decode(idx, &mut l);
        if j == 0 {
            let t = out.index_of(&l, 0);
            out.coeffs_mut()[t] = p.coeffs()[idx];
        }
    }
    out
}

const AVG_TOL: f64 = 1e-8;

pub fn solve_d(
    k: &KTaylor,
    chart: &ChartData,
    params: &Params,
    omega: &[f64],
    linv: &dyn NormalSolve,
    g: &TorusEmbedding,
) -> Result<DSolution, SolveError> {
    let nu = k.nu;
    let gamma = params.gamma();
    let min = min_small_divisor(omega, params.n_phi, params.tau);
    if min < gamma {
        return Err(SolveError::Diophantine { min, gamma });
    }

    // counter-term and the action equation
    let zeta: Vec<f64> = g.y.iter().map(|f| f.mean()).collect();
    let shift = chart.dtheta_t_const(&zeta);
    let mut eta0 = Vec::with_capacity(nu);
    for i in 0..nu {
        let mut rhs = g.y[i].clone();
        rhs.axpy(-1.0, &shift[i]);
        eta0.push(d_omega_inv(&rhs, omega, AVG_TOL)?);
    }

    // normal equation, split into the η̂₀ part and the ν constant directions
    let mut rhs_w = g.z.clone();
    rhs_w.axpy(1.0, &k11_eta(k, &eta0).dx(1)?);
    let w0 = linv.solve(&rhs_w)?;
    let mut w_cols = Vec::with_capacity(nu);
    for col in &k.k11 {
        w_cols.push(linv.solve(&col.dx(1)?)?);
    }

    // ⟨M₁⟩ η̂-average equation
    let mut m1 = vec![0.0; nu * nu];
    for r in 0..nu {
        for c in 0..nu {
            m1[r * nu + c] = k.k20[r * nu + c].mean() + k11t_w(k, &w_cols[c], r).mean();
        }
    }
    let inv = invert_small(&m1, nu)
        .map_err(|p| SolveError::IllConditioned(1.0 / p.max(1e-300)))?;
    let cond_m1 = one_norm_small(&m1, nu) * one_norm_small(&inv, nu);
    if cond_m1 > 1e12 {
        return Err(SolveError::IllConditioned(cond_m1));
    }
    let avg_rhs: Vec<f64> = (0..nu)
        .map(|r| {
            g.theta[r].mean() + k20_row(k, &eta0, r).mean() + k11t_w(k, &w0, r).mean()
        })
        .collect();
    let eta_avg: Vec<f64> = (0..nu)
        .map(|r| -(0..nu).map(|c| inv[r * nu + c] * avg_rhs[c]).sum::<f64>())
        .collect();

    // assemble η̂ and ŵ, then the angle equation
    let mut eta = eta0;
    for i in 0..nu {
        let mut c = TorusField::zero(nu, eta[i].n_phi(), 0);
        c.set(&vec![0i64; nu], 0, C64::new(eta_avg[i], 0.0));
        eta[i].axpy(1.0, &c);
    }
    let mut w = w0;
    for l in 0..nu {
        w.axpy(eta_avg[l], &w_cols[l]);
    }
    let mut psi = Vec::with_capacity(nu);
    for r in 0..nu {
        let mut rhs = g.theta[r].clone();
        rhs.axpy(1.0, &k20_row(k, &eta, r));
        rhs.axpy(1.0, &k11t_w(k, &w, r));
        psi.push(d_omega_inv(&rhs, omega, AVG_TOL)?);
    }
    Ok(DSolution { psi, eta, w, zeta, eta_avg, cond_m1 })
}

/// Forward application of the triangular system — the exact inverse check
/// of `solve_d`, sharing every product helper with it.
pub fn d_apply(
    k: &KTaylor,
    chart: &ChartData,
    omega: &[f64],
    linv: &dyn NormalSolve,
    sol: &DSolution,
) -> Result<TorusEmbedding, SolveError> {
    let nu = k.nu;
    let shift = chart.dtheta_t_const(&sol.zeta);
    let mut theta = Vec::with_capacity(nu);
    let mut y = Vec::with_capacity(nu);
    for r in 0..nu {
        let mut t = d_omega(&sol.psi[r], omega);
        t.axpy(-1.0, &k20_row(k, &sol.eta, r));
        t.axpy(-1.0, &k11t_w(k, &sol.w, r));
        theta.push(t);
        let mut a = d_omega(&sol.eta[r], omega);
        a.axpy(1.0, &shift[r]);
        y.push(a);
    }
    let mut z = linv.apply(&sol.w);
    z.axpy(-1.0, &k11_eta(k, &sol.eta).dx(1)?);
    Ok(TorusEmbedding { theta, y, z, zeta: vec![0.0; nu] })
}
