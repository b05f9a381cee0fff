use crate::embed::{
    a_eps_point, assemble_field, assemble_scalar, da_dtheta_coeff, da_dy_coeff, phi_of_flat,
    sample_sizes, slice_at, EmbedError,
};
use crate::embedding::{EmbeddingError, TorusEmbedding};
use crate::energy::{dtheta_n, flow_grad, grad_n_z, EnergyError};
use crate::params::Params;
use crate::twist::{freq_amp, xi_of_omega};
use fourier_core::{bracket_l, C64, Projection, TorusField};
use hamiltonian::Model;
use thiserror::Error;
use weak_bnf::BirkhoffGenerator;

#[derive(Debug, Error)]
pub enum FunctionalError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("cannot invert the angle derivative: φ-average has size {0:.3e}")]
    AverageNotZero(f64),
}

/// ω·∂_φ as a Fourier multiplier i(ω·l).
pub fn d_omega(u: &TorusField, omega: &[f64]) -> TorusField {
    assert_eq!(omega.len(), u.nu());
    let mut out = u.clone();
    let mut l = vec![0i64; u.nu()];
    for idx in 0..out.coeffs().len() {
        out.decode(idx, &mut l);
        let f: f64 = l.iter().zip(omega).map(|(&li, &w)| li as f64 * w).sum();
        out.coeffs_mut()[idx] *= C64::new(0.0, f);
    }
    out
}

/// Inverse of ω·∂_φ on zero-φ-average fields; the φ-average column must be
/// zero (up to `tol` relative) and is zeroed in the output.
pub fn d_omega_inv(u: &TorusField, omega: &[f64], tol: f64) -> Result<TorusField, FunctionalError> {
    assert_eq!(omega.len(), u.nu());
    let mut out = u.clone();
    let mut l = vec![0i64; u.nu()];
    let scale = 1.0 + u.l2_norm();
    for idx in 0..out.coeffs().len() {
        out.decode(idx, &mut l);
        if l.iter().all(|&li| li == 0) {
            let c = out.coeffs()[idx].norm();
            if c > tol * scale {
                return Err(FunctionalError::AverageNotZero(c));
            }
            out.coeffs_mut()[idx] = C64::new(0.0, 0.0);
        } else {
            let f: f64 = l.iter().zip(omega).map(|(&li, &w)| li as f64 * w).sum();
            out.coeffs_mut()[idx] /= C64::new(0.0, f);
        }
    }
    Ok(out)
}

/// min over 0 < |l| ≤ n_phi of |ω·l|·⟨l⟩^τ — the diophantine floor of ω on
/// the box, which turns the mode-wise division into a tame bound.
pub fn min_small_divisor(omega: &[f64], n_phi: usize, tau: f64) -> f64 {
    let nu = omega.len();
    let side = 2 * n_phi + 1;
    let total = side.pow(nu as u32);
    let mut best = f64::INFINITY;
    for flat in 0..total {
        let mut rest = flat;
        let mut l = vec![0i64; nu];
        for a in (0..nu).rev() {
            l[a] = (rest % side) as i64 - n_phi as i64;
            rest /= side;
        }
        if l.iter().all(|&li| li == 0) {
            continue;
        }
        let dot: f64 = l.iter().zip(omega).map(|(&li, &w)| li as f64 * w).sum();
        let v = dot.abs() * bracket_l(&l).powf(tau);
        if v < best {
            best = v;
        }
    }
    best
}

/// Which part of the Hamiltonian drives the functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FPart {
    /// The full rescaled energy.
    Full,
    /// Only the normal form α(ξ)·y + ½(N(θ)z, z) — the counterterm and the
    /// angle derivative stay.
    LinearOnly,
}

struct PointData {
    dy: Vec<f64>,
    dtheta: Vec<f64>,
    dz_col: TorusField,
}

/// Exact gradient of H_ε at one torus point, by the chain rule through the
/// embedding: (∂_y H_ε, ∂_θ H_ε, ∇_z H_ε). The z-gradient is taken in the
/// normal sector (tangential and average modes projected out). The closed
/// embedding partials touch only the ±j̄_i modes, so each angle/action slot
/// is a single paired coefficient of the transported gradient.
pub fn grad_h_eps_point(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    xi: &[f64],
    theta: &[f64],
    y: &[f64],
    z: &TorusField,
) -> Result<(Vec<f64>, Vec<f64>, TorusField), FunctionalError> {
    let nu = model.nu();
    let (eps, b) = (params.eps, params.b());
    let u = a_eps_point(model, params, xi, theta, y, z)?;
    let (_, _, g) = flow_grad(model, gen, &u).map_err(EnergyError::from)?;
    let scale = eps.powf(-2.0 * b);
    let mut dy = Vec::with_capacity(nu);
    let mut dtheta = Vec::with_capacity(nu);
    for i in 0..nu {
        let gj = g.get(&[], model.sites()[i]);
        let cy = da_dy_coeff(model, params, xi, theta, y, i)?;
        let ct = da_dtheta_coeff(model, params, xi, theta, y, i)?;
        dy.push(scale * 2.0 * (gj * cy.conj()).re);
        dtheta.push(scale * 2.0 * (gj * ct.conj()).re);
    }
    let gz = g
        .project(&model.sites_full(), Projection::Normal)
        .scaled(eps.powf(-b));
    Ok((dy, dtheta, gz))
}

fn point_fields(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    xi: &[f64],
    part: FPart,
    theta: &[f64],
    y: &[f64],
    z: &TorusField,
) -> Result<PointData, FunctionalError> {
    match part {
        FPart::Full => {
            let (dy, dtheta, gz) = grad_h_eps_point(model, gen, params, xi, theta, y, z)?;
            Ok(PointData { dy, dtheta, dz_col: gz.dx(1).unwrap() })
        }
        FPart::LinearOnly => {
            let dy = freq_amp(model, params.eps, xi);
            let dtheta = dtheta_n(model, params, xi, theta, z);
            let dz_col = grad_n_z(model, params, xi, theta, z).dx(1).unwrap();
            Ok(PointData { dy, dtheta, dz_col })
        }
    }
}

/// The invariance residual of an embedding at frequency ω:
///   (ω·∂_φ θ − ∂_y H,  ω·∂_φ y + ∂_θ H + ζ,  ω·∂_φ z − ∂_x ∇_z H),
/// assembled on the params box from the oversampled angle grid. The returned
/// shape reuses the embedding slots with ζ = 0.
pub fn f_operator(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    omega: &[f64],
    emb: &TorusEmbedding,
    part: FPart,
) -> Result<TorusEmbedding, FunctionalError> {
    let nu = model.nu();
    assert_eq!(omega.len(), nu);
    emb.validate(model, params.n_phi, params.n_x)?;
    let xi = xi_of_omega(model, params.eps, omega);
    crate::embed::check_xi(&xi)?;

    let (p_phi, _) = sample_sizes(params.n_phi, params.n_x);
    let pts = p_phi.pow(nu as u32);
    let data = fourier_core::par::par_map_range(pts, |g| {
        let phi = phi_of_flat(g, nu, p_phi);
        let (theta, y, z) = slice_at(emb, &phi);
        point_fields(model, gen, params, &xi, part, &theta, &y, &z)
    });
    let mut points = Vec::with_capacity(pts);
    for d in data {
        points.push(d?);
    }

    let mut f_theta = Vec::with_capacity(nu);
    let mut f_y = Vec::with_capacity(nu);
    for i in 0..nu {
        // sampled parts, with the constant ω_i (resp. ζ_i) folded in
        let dy_samples: Vec<f64> = points.iter().map(|p| p.dy[i] - omega[i]).collect();
        let dt_samples: Vec<f64> = points.iter().map(|p| p.dtheta[i] + emb.zeta[i]).collect();
        let mut ft = d_omega(&emb.theta[i], omega);
        ft.axpy(-1.0, &assemble_scalar(nu, params.n_phi, p_phi, &dy_samples));
        f_theta.push(ft);
        let mut fy = d_omega(&emb.y[i], omega);
        fy.axpy(1.0, &assemble_scalar(nu, params.n_phi, p_phi, &dt_samples));
        f_y.push(fy);
    }

    let cols: Vec<TorusField> = points.into_iter().map(|p| p.dz_col).collect();
    let mut fz = d_omega(&emb.z, omega);
    fz.axpy(-1.0, &assemble_field(nu, params.n_phi, params.n_x, p_phi, &cols));

    let mut out = TorusEmbedding { theta: f_theta, y: f_y, z: fz, zeta: vec![0.0; nu] };
    out.enforce_reality();
    Ok(out)
}
