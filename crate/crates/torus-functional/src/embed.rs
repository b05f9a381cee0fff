use crate::embedding::TorusEmbedding;
use crate::params::Params;
use fourier_core::grid::{from_grid, next_pow2, to_grid, Grid};
use fourier_core::{C64, TorusField};
use hamiltonian::Model;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("radicand ξ_{site} + ε^(2b−2)·{site}·y went nonpositive ({min:.3e})")]
    Radicand { site: i64, min: f64 },
    #[error("amplitude ξ[{index}] = {value:.3e} is not positive")]
    XiSign { index: usize, value: f64 },
}

pub(crate) fn check_xi(xi: &[f64]) -> Result<(), EmbedError> {
    for (index, &value) in xi.iter().enumerate() {
        if value <= 0.0 {
            return Err(EmbedError::XiSign { index, value });
        }
    }
    Ok(())
}

/// Per-site radicands w_i = ξ_i + ε^{2(b−1)} j̄_i y_i at one point of the torus.
fn radicands(model: &Model, params: &Params, xi: &[f64], y: &[f64]) -> Result<Vec<f64>, EmbedError> {
    let r = params.eps.powf(2.0 * (params.b() - 1.0));
    model
        .sites()
        .iter()
        .zip(xi.iter().zip(y))
        .map(|(&j, (&x, &yi))| {
            let w = x + r * j as f64 * yi;
            if w <= 0.0 {
                Err(EmbedError::Radicand { site: j, min: w })
            } else {
                Ok(w)
            }
        })
        .collect()
}

/// One point of the embedding: u = ε Σ_i √w_i e^{iθ_i} e^{ij̄_i x} + c.c. + ε^b z,
/// an x-only field on a box holding both the sites and z.
pub fn a_eps_point(
    model: &Model,
    params: &Params,
    xi: &[f64],
    theta: &[f64],
    y: &[f64],
    z: &TorusField,
) -> Result<TorusField, EmbedError> {
    assert_eq!(z.nu(), 0);
    check_xi(xi)?;
    let w = radicands(model, params, xi, y)?;
    let n_x = z.n_x().max(model.sites().last().copied().unwrap_or(0) as usize);
    let mut u = z.resize(0, n_x).unwrap().scaled(params.eps.powf(params.b()));
    for ((&j, &wi), &ti) in model.sites().iter().zip(&w).zip(theta) {
        let c = params.eps * wi.sqrt() * C64::from_polar(1.0, ti);
        let cur = u.get(&[], j);
        u.set_pair(&[], j, cur + c);
    }
    Ok(u)
}

/// ∂A/∂y_i at a point: (ε^{2b−1} j̄_i / √w_i) cos(θ_i + j̄_i x), returned as the
/// coefficient on the +j̄_i mode (the −j̄_i one is its conjugate).
pub fn da_dy_coeff(
    model: &Model,
    params: &Params,
    xi: &[f64],
    theta: &[f64],
    y: &[f64],
    i: usize,
) -> Result<C64, EmbedError> {
    check_xi(xi)?;
    let w = radicands(model, params, xi, y)?;
    let j = model.sites()[i] as f64;
    let amp = params.eps.powf(2.0 * params.b() - 1.0) * j / (2.0 * w[i].sqrt());
    Ok(amp * C64::from_polar(1.0, theta[i]))
}

/// ∂A/∂θ_i at a point: −2ε√w_i sin(θ_i + j̄_i x), as the +j̄_i coefficient.
pub fn da_dtheta_coeff(
    model: &Model,
    params: &Params,
    xi: &[f64],
    theta: &[f64],
    y: &[f64],
    i: usize,
) -> Result<C64, EmbedError> {
    check_xi(xi)?;
    let w = radicands(model, params, xi, y)?;
    Ok(C64::new(0.0, params.eps * w[i].sqrt()) * C64::from_polar(1.0, theta[i]))
}

/// φ-sampling sizes used whenever a transcendental quantity is pushed back
/// onto the coefficient box: 2× oversampled in φ, alias-free in x.
pub fn sample_sizes(n_phi: usize, n_x: usize) -> (usize, usize) {
    (next_pow2(2 * (2 * n_phi + 1)), next_pow2(2 * n_x + 2))
}

pub fn phi_of_flat(flat: usize, nu: usize, p_phi: usize) -> Vec<f64> {
    let mut idx = vec![0usize; nu];
    let mut rest = flat;
    for a in (0..nu).rev() {
        idx[a] = rest % p_phi;
        rest /= p_phi;
    }
    idx.iter()
        .map(|&k| 2.0 * std::f64::consts::PI * k as f64 / p_phi as f64)
        .collect()
}

/// Point data of an embedding at one angle: shifted angles θ = φ + Θ(φ),
/// actions y(φ), and the x-slice of z.
pub fn slice_at(emb: &TorusEmbedding, phi: &[f64]) -> (Vec<f64>, Vec<f64>, TorusField) {
    let theta: Vec<f64> = phi
        .iter()
        .zip(&emb.theta)
        .map(|(&p, t)| p + t.eval_at(phi, 0.0))
        .collect();
    let y: Vec<f64> = emb.y.iter().map(|f| f.eval_at(phi, 0.0)).collect();
    (theta, y, emb.z.at_phi(phi))
}

/// Assemble a (φ, x) field from per-φ-point x-fields by joint sampling. Each
/// column is truncated to `n_x` first, so the x-analysis is alias-free; the
/// φ-analysis defines the box truncation of the sampled quantity.
pub fn assemble_field(
    nu: usize,
    n_phi: usize,
    n_x: usize,
    p_phi: usize,
    columns: &[TorusField],
) -> TorusField {
    let p_x = next_pow2(2 * n_x + 2);
    let pts = p_phi.pow(nu as u32);
    assert_eq!(columns.len(), pts);
    let mut values = vec![C64::new(0.0, 0.0); pts * p_x];
    for (g, col) in columns.iter().enumerate() {
        let truncated = if col.n_x() > n_x {
            let mut t = TorusField::zero(0, 0, n_x);
            for j in -(n_x as i64)..=n_x as i64 {
                t.set(&[], j, col.get(&[], j));
            }
            t
        } else {
            col.resize(0, n_x).unwrap()
        };
        let row = to_grid(&truncated, 1, p_x);
        values[g * p_x..(g + 1) * p_x].copy_from_slice(&row.values);
    }
    let grid = Grid { nu, p_phi, p_x, values };
    let mut out = from_grid(&grid, n_phi, n_x);
    out.enforce_reality();
    out
}

/// Assemble a φ-only field (n_x = 0) from real samples.
pub fn assemble_scalar(nu: usize, n_phi: usize, p_phi: usize, samples: &[f64]) -> TorusField {
    let pts = p_phi.pow(nu as u32);
    assert_eq!(samples.len(), pts);
    let values = samples.iter().map(|&v| C64::new(v, 0.0)).collect();
    let grid = Grid { nu, p_phi, p_x: 1, values };
    let mut out = from_grid(&grid, n_phi, 0);
    out.enforce_reality();
    out
}

/// The full embedding map: the (φ, x)-field A_ε(φ + Θ(φ), y(φ), z(φ)) on the
/// params box, sampled over the oversampled angle grid.
pub fn embed_a_eps(
    model: &Model,
    params: &Params,
    xi: &[f64],
    emb: &TorusEmbedding,
) -> Result<TorusField, EmbedError> {
    check_xi(xi)?;
    let nu = model.nu();
    let (p_phi, _) = sample_sizes(params.n_phi, params.n_x);
    let pts = p_phi.pow(nu as u32);
    let columns = fourier_core::par::par_map_range(pts, |g| {
        let phi = phi_of_flat(g, nu, p_phi);
        let (theta, y, z) = slice_at(emb, &phi);
        a_eps_point(model, params, xi, &theta, &y, &z)
    });
    let mut cols = Vec::with_capacity(pts);
    for c in columns {
        cols.push(c?);
    }
    let n_x_out = params.n_x.max(model.sites().last().copied().unwrap_or(0) as usize);
    Ok(assemble_field(nu, params.n_phi, n_x_out, p_phi, &cols))
}
