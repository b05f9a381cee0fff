use crate::embed::{a_eps_point, check_xi, EmbedError};
use crate::params::Params;
use crate::twist::freq_amp;
use fourier_core::grid::integral_of_product;
use fourier_core::{C64, Projection, TorusField};
use hamiltonian::Model;
use thiserror::Error;
use weak_bnf::{BirkhoffGenerator, FlowError, WindowJacobian};

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Energy after the quartic normalization, 𝓚(u) = K(Φ_B u).
pub fn script_h(model: &Model, gen: &BirkhoffGenerator, u: &TorusField) -> Result<f64, FlowError> {
    Ok(model.eval_h(&gen.apply(u, weak_bnf::Direction::Forward)?))
}

/// Gradient of the composed energy: ∇𝓚(u) from ∇K(Φ_B u) transported back
/// through the exact mode-space Jacobian of the flow.
pub fn grad_script_h(
    model: &Model,
    gen: &BirkhoffGenerator,
    u: &TorusField,
) -> Result<TorusField, FlowError> {
    let (fu, jac) = gen.flow_with_jacobian(u, 1.0)?;
    Ok(jac.pullback(&model.grad_h(&fu)))
}

pub(crate) fn flow_grad(
    model: &Model,
    gen: &BirkhoffGenerator,
    u: &TorusField,
) -> Result<(TorusField, WindowJacobian, TorusField), FlowError> {
    let (fu, jac) = gen.flow_with_jacobian(u, 1.0)?;
    let w = model.grad_h(&fu);
    let g = jac.pullback(&w);
    Ok((fu, jac, g))
}

/// Rescaled energy at one torus point: H_ε = ε^{−2b} 𝓚(A_ε(θ, y, z)),
/// constant part included.
pub fn h_eps_point(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    xi: &[f64],
    theta: &[f64],
    y: &[f64],
    z: &TorusField,
) -> Result<f64, EnergyError> {
    let u = a_eps_point(model, params, xi, theta, y, z)?;
    Ok(script_h(model, gen, &u)? * params.eps.powf(-2.0 * params.b()))
}

/// The ξ-constant produced by the rescaling: the action-independent part of
/// H_ε, collected from the quadratic energy and the normalized quartic.
/// Subtracting it makes the N + P split exact.
pub fn e_of_xi(model: &Model, params: &Params, xi: &[f64]) -> f64 {
    let (eps, b, sgn) = (params.eps, params.b(), model.sign());
    let quad: f64 = model
        .sites()
        .iter()
        .zip(xi)
        .map(|(&j, &x)| (j * j) as f64 * x)
        .sum();
    let sum: f64 = xi.iter().sum();
    let sum_sq: f64 = xi.iter().map(|x| x * x).sum();
    let quart = if model.lambda() != 0.0 {
        sum_sq
    } else {
        sum_sq - 2.0 * sum * sum
    };
    eps.powf(2.0 - 2.0 * b) * quad + 1.5 * sgn * eps.powf(4.0 - 2.0 * b) * quart
}

/// The tangential slice v_ε(θ, 0) = Σ_i √ξ_i e^{iθ_i} e^{ij̄_i x} + c.c. as an
/// x-field on a box wide enough for its square times a z-slice.
pub(crate) fn v_slice(model: &Model, xi: &[f64], theta: &[f64], n_x: usize) -> TorusField {
    let top = model.sites().last().copied().unwrap_or(0) as usize;
    let mut v = TorusField::zero(0, 0, n_x.max(top));
    for ((&j, &x), &t) in model.sites().iter().zip(xi).zip(theta) {
        v.set_pair(&[], j, x.sqrt() * C64::from_polar(1.0, t));
    }
    v
}

/// Multiplier of the normal quadratic form: q = v_ε(θ,0)², with the x-average
/// removed in the x-independent variant (its mass term moves the average into
/// the twist).
pub(crate) fn n_multiplier(model: &Model, xi: &[f64], theta: &[f64]) -> TorusField {
    let v = v_slice(model, xi, theta, 0);
    let q = fourier_core::grid::powi(&v.resize(0, 2 * v.n_x()).unwrap(), 2);
    if model.lambda() != 0.0 {
        q.pi0()
    } else {
        q
    }
}

/// ½(N(θ)z, z) = ½∫z_x² − (3ς/2)ε²∫q z².
pub fn n_quadratic_form(
    model: &Model,
    params: &Params,
    xi: &[f64],
    theta: &[f64],
    z: &TorusField,
) -> f64 {
    assert_eq!(z.nu(), 0);
    let zx = z.dx(1).unwrap();
    let q = n_multiplier(model, xi, theta);
    0.5 * integral_of_product(&[&zx, &zx])
        - 1.5 * model.sign() * params.eps * params.eps * integral_of_product(&[&q, &z, &z])
}

/// ∇_z of the normal form: −z_xx − 3ςε² Π_⊥(q z), projected off the sites and
/// the average.
pub fn grad_n_z(
    model: &Model,
    params: &Params,
    xi: &[f64],
    theta: &[f64],
    z: &TorusField,
) -> TorusField {
    let q = n_multiplier(model, xi, theta);
    let wide = z.resize(0, z.n_x() + q.n_x()).unwrap();
    let qz = fourier_core::grid::mul(&wide, &q);
    let mut out = qz.scaled(-3.0 * model.sign() * params.eps * params.eps);
    out.axpy(-1.0, &z.dx(2).unwrap().resize(0, out.n_x()).unwrap());
    out.project(&model.sites_full(), Projection::Normal)
}

/// ∂_{θ_i} ½(N(θ)z, z) = −3ςε² ∫ v ∂_{θ_i}v z². The x-average of v∂_θv
/// vanishes, so the x-independent variant gives the same value.
pub fn dtheta_n(
    model: &Model,
    params: &Params,
    xi: &[f64],
    theta: &[f64],
    z: &TorusField,
) -> Vec<f64> {
    let v = v_slice(model, xi, theta, 0);
    (0..model.nu())
        .map(|i| {
            let j = model.sites()[i];
            let mut dv = TorusField::zero(0, 0, v.n_x());
            dv.set_pair(&[], j, C64::new(0.0, xi[i].sqrt()) * C64::from_polar(1.0, theta[i]));
            -3.0 * model.sign() * params.eps * params.eps
                * integral_of_product(&[&v, &dv, z, z])
        })
        .collect()
}

/// Point values (N, P) with H_ε = e(ξ) + N + P: N = α(ξ)·y + ½(N(θ)z,z) in
/// closed form, P by subtraction from the composed energy.
pub fn split_n_p(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    xi: &[f64],
    theta: &[f64],
    y: &[f64],
    z: &TorusField,
) -> Result<(f64, f64), EnergyError> {
    check_xi(xi)?;
    let alpha = freq_amp(model, params.eps, xi);
    let n_val: f64 = alpha.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
        + n_quadratic_form(model, params, xi, theta, z);
    let h = h_eps_point(model, gen, params, xi, theta, y, z)?;
    Ok((n_val, h - e_of_xi(model, params, xi) - n_val))
}
