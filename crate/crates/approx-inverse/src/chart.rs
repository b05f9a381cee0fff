//! Chart adapted to an embedded torus: angles reparametrize the torus,
//! actions ride in the conormal directions, and the normal component is an
//! affine offset from the torus. For an isotropic torus the differential at
//! (ψ, 0, 0) preserves the 2-form 𝒲 = Σ dθ_i ∧ dy_i ⊕ ∫(∂ₓ⁻¹ẑ₁)ẑ₂, which is
//! what makes the transformed Hamiltonian's Taylor blocks meaningful.
//!
//! The w-to-action block uses (∂_θz̃₀)ᵀ∂ₓ⁻¹w written as −(∂ₓ⁻¹∂_θz̃₀, w):
//! ∂ₓ⁻¹ is antisymmetric, and keeping the integrated columns around avoids
//! re-integrating every probe.

use crate::smallmat::{invert_small, mat_t_vec, mat_vec};
use fourier_core::grid::{pairing, to_grid};
use fourier_core::par::par_map_range;
use fourier_core::{FieldError, TorusField};
use thiserror::Error;
use torus_functional::{assemble_field, assemble_scalar, phi_of_flat, sample_sizes, TorusEmbedding};

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("angle jacobian numerically singular (pivot ratio {0:.3e})")]
    SingularJacobian(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Frozen chart blocks at one angle of the sampling grid. Matrices are
/// row-major ν×ν; `dtheta[i·ν+k]` is ∂_{φ_k}θ₀_i.
pub struct ChartPoint {
    pub phi: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub dtheta_inv: Vec<f64>,
    pub dy: Vec<f64>,
    /// ∂_{φ_m} z₀ — x-slices, one per angle direction.
    pub dz: Vec<TorusField>,
    /// ∂ₓ⁻¹ of (∂_θ z̃₀)_k ∘ θ₀ = Σ_m ∂_{φ_m}z₀ · [∂θ₀]⁻¹_{mk}.
    pub ztw_int: Vec<TorusField>,
}

/// Chart differential of a torus, sampled on the standard oversampled angle
/// grid, plus the exact mode-space angle jacobian for constant-vector
/// products.
pub struct ChartData {
    pub nu: usize,
    pub n_phi: usize,
    pub n_x: usize,
    pub p_phi: usize,
    pub points: Vec<ChartPoint>,
    /// ∂_{φ_k}Θ₀_i at [i·ν+k], on the embedding box.
    pub theta_dphi: Vec<TorusField>,
}

impl ChartData {
    pub fn pts(&self) -> usize {
        self.p_phi.pow(self.nu as u32)
    }

    /// [∂_φθ₀]ᵀ c for a constant vector c — exact in mode space.
    pub fn dtheta_t_const(&self, c: &[f64]) -> Vec<TorusField> {
        let nu = self.nu;
        (0..nu)
            .map(|k| {
                let mut f = TorusField::zero(nu, self.n_phi, 0);
                f.set(&vec![0i64; nu], 0, fourier_core::C64::new(c[k], 0.0));
                for i in 0..nu {
                    f.axpy(c[i], &self.theta_dphi[i * nu + k]);
                }
                f
            })
            .collect()
    }
}

pub fn build_chart(emb: &TorusEmbedding) -> Result<ChartData, ChartError> {
    let nu = emb.nu();
    let (p_phi, _) = sample_sizes(emb.n_phi(), emb.n_x());
    let pts = p_phi.pow(nu as u32);

    let mut theta_dphi = Vec::with_capacity(nu * nu);
    let mut y_dphi = Vec::with_capacity(nu * nu);
    for i in 0..nu {
        for k in 0..nu {
            theta_dphi.push(emb.theta[i].dphi(k));
            y_dphi.push(emb.y[i].dphi(k));
        }
    }
    let th_g: Vec<Vec<fourier_core::C64>> =
        theta_dphi.iter().map(|f| to_grid(f, p_phi, 1).values).collect();
    let y_g: Vec<Vec<fourier_core::C64>> =
        y_dphi.iter().map(|f| to_grid(f, p_phi, 1).values).collect();
    let z_dphi: Vec<TorusField> = (0..nu).map(|m| emb.z.dphi(m)).collect();

    let made = par_map_range(pts, |g| -> Result<ChartPoint, ChartError> {
        let phi = phi_of_flat(g, nu, p_phi);
        let mut dtheta = vec![0.0; nu * nu];
        let mut dy = vec![0.0; nu * nu];
        for i in 0..nu {
            for k in 0..nu {
                let delta = if i == k { 1.0 } else { 0.0 };
                dtheta[i * nu + k] = delta + th_g[i * nu + k][g].re;
                dy[i * nu + k] = y_g[i * nu + k][g].re;
            }
        }
        let dtheta_inv = invert_small(&dtheta, nu).map_err(ChartError::SingularJacobian)?;
        let dz: Vec<TorusField> = z_dphi.iter().map(|f| f.at_phi(&phi)).collect();
        let mut ztw_int = Vec::with_capacity(nu);
        for k in 0..nu {
            let mut col = TorusField::zero(0, 0, emb.n_x());
            for m in 0..nu {
                col.axpy(dtheta_inv[m * nu + k], &dz[m]);
            }
            ztw_int.push(col.dx(-1)?);
        }
        Ok(ChartPoint { phi, dtheta, dtheta_inv, dy, dz, ztw_int })
    });
    let mut points = Vec::with_capacity(pts);
    for p in made {
        points.push(p?);
    }
    Ok(ChartData {
        nu,
        n_phi: emb.n_phi(),
        n_x: emb.n_x(),
        p_phi,
        points,
        theta_dphi,
    })
}

/// Evaluate the chart at one point: θ = θ₀(ψ), y = y_δ(ψ) + [∂_ψθ₀]⁻ᵀη +
/// (∂_θz̃₀)ᵀ∂ₓ⁻¹w, z = z₀(ψ) + w. `w` is an x-slice with zero average.
pub fn chart_point(
    emb: &TorusEmbedding,
    psi: &[f64],
    eta: &[f64],
    w: &TorusField,
) -> Result<(Vec<f64>, Vec<f64>, TorusField), ChartError> {
    let nu = emb.nu();
    let theta: Vec<f64> = (0..nu).map(|i| psi[i] + emb.theta[i].eval_at(psi, 0.0)).collect();
    let mut dtheta = vec![0.0; nu * nu];
    for i in 0..nu {
        for k in 0..nu {
            let delta = if i == k { 1.0 } else { 0.0 };
            dtheta[i * nu + k] = delta + emb.theta[i].dphi(k).eval_at(psi, 0.0);
        }
    }
    let dtheta_inv = invert_small(&dtheta, nu).map_err(ChartError::SingularJacobian)?;
    let dz: Vec<TorusField> = (0..nu).map(|m| emb.z.dphi(m).at_phi(psi)).collect();
    let mut y = Vec::with_capacity(nu);
    for k in 0..nu {
        let mut col = TorusField::zero(0, 0, emb.n_x());
        for m in 0..nu {
            col.axpy(dtheta_inv[m * nu + k], &dz[m]);
        }
        let ztw_int = col.dx(-1)?;
        let conormal: f64 = (0..nu).map(|i| dtheta_inv[i * nu + k] * eta[i]).sum();
        y.push(emb.y[k].eval_at(psi, 0.0) + conormal - pairing(&ztw_int, w));
    }
    let mut z = emb.z.at_phi(psi);
    z.axpy(1.0, w);
    Ok((theta, y, z))
}

/// Differential of the chart at (φ, 0, 0), applied to one tangent triple.
pub fn dg_point(
    pt: &ChartPoint,
    nu: usize,
    psihat: &[f64],
    etahat: &[f64],
    what: &TorusField,
) -> (Vec<f64>, Vec<f64>, TorusField) {
    let th = mat_vec(&pt.dtheta, psihat, nu);
    let mut yh = mat_vec(&pt.dy, psihat, nu);
    for k in 0..nu {
        // [∂θ₀]⁻ᵀ η̂ and the w-to-action pairing
        yh[k] += (0..nu).map(|i| pt.dtheta_inv[i * nu + k] * etahat[i]).sum::<f64>();
        yh[k] -= pairing(&pt.ztw_int[k], what);
    }
    let mut zh = what.clone();
    for m in 0..nu {
        zh.axpy(psihat[m], &pt.dz[m]);
    }
    (th, yh, zh)
}

/// Inverse of `dg_point` — the block triangular structure solved backwards.
pub fn dg_point_inv(
    pt: &ChartPoint,
    nu: usize,
    thetahat: &[f64],
    yhat: &[f64],
    zhat: &TorusField,
) -> (Vec<f64>, Vec<f64>, TorusField) {
    let psihat = mat_vec(&pt.dtheta_inv, thetahat, nu);
    let mut what = zhat.clone();
    for m in 0..nu {
        what.axpy(-psihat[m], &pt.dz[m]);
    }
    let dy_psi = mat_vec(&pt.dy, &psihat, nu);
    let pre: Vec<f64> = (0..nu)
        .map(|k| yhat[k] - dy_psi[k] + pairing(&pt.ztw_int[k], &what))
        .collect();
    let etahat = mat_t_vec(&pt.dtheta, &pre, nu);
    (psihat, etahat, what)
}

fn sample_triple(chart: &ChartData, u: &TorusEmbedding) -> Vec<(Vec<f64>, Vec<f64>, TorusField)> {
    let nu = chart.nu;
    let t_g: Vec<Vec<fourier_core::C64>> =
        u.theta.iter().map(|f| to_grid(f, chart.p_phi, 1).values).collect();
    let y_g: Vec<Vec<fourier_core::C64>> =
        u.y.iter().map(|f| to_grid(f, chart.p_phi, 1).values).collect();
    par_map_range(chart.pts(), |g| {
        let phi = phi_of_flat(g, nu, chart.p_phi);
        let th: Vec<f64> = (0..nu).map(|i| t_g[i][g].re).collect();
        let yy: Vec<f64> = (0..nu).map(|i| y_g[i][g].re).collect();
        (th, yy, u.z.at_phi(&phi))
    })
}

fn assemble_triple(
    chart: &ChartData,
    data: Vec<(Vec<f64>, Vec<f64>, TorusField)>,
    zeta: &[f64],
) -> TorusEmbedding {
    let nu = chart.nu;
    let mut theta = Vec::with_capacity(nu);
    let mut y = Vec::with_capacity(nu);
    for i in 0..nu {
        let t: Vec<f64> = data.iter().map(|d| d.0[i]).collect();
        let a: Vec<f64> = data.iter().map(|d| d.1[i]).collect();
        theta.push(assemble_scalar(nu, chart.n_phi, chart.p_phi, &t));
        y.push(assemble_scalar(nu, chart.n_phi, chart.p_phi, &a));
    }
    let cols: Vec<TorusField> = data.into_iter().map(|d| d.2).collect();
    let z = assemble_field(nu, chart.n_phi, chart.n_x, chart.p_phi, &cols);
    let mut out = TorusEmbedding { theta, y, z, zeta: zeta.to_vec() };
    out.enforce_reality();
    out
}

/// DG_δ(φ,0,0) applied to a tangent embedding; ζ rides through unchanged.
pub fn dg_apply(chart: &ChartData, u: &TorusEmbedding) -> TorusEmbedding {
    let samples = sample_triple(chart, u);
    let data: Vec<_> = samples
        .into_iter()
        .zip(&chart.points)
        .map(|((th, yy, z), pt)| dg_point(pt, chart.nu, &th, &yy, &z))
        .collect();
    assemble_triple(chart, data, &u.zeta)
}

/// DG_δ(φ,0,0)⁻¹ applied to a tangent embedding; ζ rides through unchanged.
pub fn dg_inv_apply(chart: &ChartData, u: &TorusEmbedding) -> TorusEmbedding {
    let samples = sample_triple(chart, u);
    let data: Vec<_> = samples
        .into_iter()
        .zip(&chart.points)
        .map(|((th, yy, z), pt)| dg_point_inv(pt, chart.nu, &th, &yy, &z))
        .collect();
    assemble_triple(chart, data, &u.zeta)
}

/// 𝒲(u, v) at a phase-space point: Σ_i (θ̂₁ŷ₂ − ŷ₁θ̂₂)_i + ∫(∂ₓ⁻¹ẑ₁)ẑ₂ dμ.
/// The ẑ slices must have zero average.
pub fn two_form(
    t1: &[f64],
    y1: &[f64],
    z1: &TorusField,
    t2: &[f64],
    y2: &[f64],
    z2: &TorusField,
) -> f64 {
    let pairs: f64 = t1
        .iter()
        .zip(y2)
        .zip(y1.iter().zip(t2))
        .map(|((a, b), (c, d))| a * b - c * d)
        .sum();
    pairs + pairing(&z1.dx(-1).expect("zero-average z"), z2)
}
