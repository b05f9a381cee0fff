//! Isotropy of an embedded torus and the action shift that restores it.
//!
//! Pulling the ambient 1-form Λ[θ̂, ŷ, ẑ] = −y·θ̂ + ½(∂ₓ⁻¹z, ẑ) back along
//! φ ↦ (θ₀(φ), y₀(φ), z₀(φ)) gives Σ_k a_k(φ) dφ_k; the torus is isotropic
//! exactly when the 2-form entries A_kj = ∂_{φ_k}a_j − ∂_{φ_j}a_k all vanish.
//! Shifting the actions by [∂_φθ₀]⁻ᵀρ with ρ_j = Δ_φ⁻¹ Σ_k ∂_{φ_k}A_kj
//! removes A identically: A is closed, so the cyclic identity turns dρ into
//! A with no remainder. The corrected torus is what the adapted chart and
//! the triangular solve downstream are built on.

use crate::smallmat::solve_small;
use fourier_core::grid::{next_pow2, product, to_grid};
use fourier_core::par::par_map_range;
use fourier_core::{C64, FieldError, TorusField};
use thiserror::Error;
use torus_functional::{assemble_scalar, TorusEmbedding};

#[derive(Debug, Error)]
pub enum IsotropyError {
    #[error("angle jacobian numerically singular (pivot ratio {0:.3e})")]
    SingularJacobian(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Exact product of two φ-functions: the output box is the sum of the input
/// boxes, so nothing is truncated.
pub(crate) fn phi_mul(a: &TorusField, b: &TorusField) -> TorusField {
    let n = a.n_phi() + b.n_phi();
    product(&[&a.resize(n, 0).expect("grow"), b])
}

/// ∫ u(φ, ·) v(φ, ·) dμ_x as a function of φ, exact on the summed φ-box.
pub(crate) fn x_pair(u: &TorusField, v: &TorusField) -> TorusField {
    let n_phi = u.n_phi() + v.n_phi();
    let n_x = u.n_x().max(v.n_x());
    let w = product(&[&u.resize(n_phi, n_x).expect("grow"), v]);
    let mut out = TorusField::zero(w.nu(), n_phi, 0);
    let mut l = vec![0i64; w.nu()];
    for idx in 0..w.coeffs().len() {
        let j = w.decode(idx, &mut l);
        if j == 0 {
            let k = out.index_of(&l, 0);
            out.coeffs_mut()[k] = w.coeffs()[idx];
        }
    }
    out
}

/// The pulled-back action 1-form of a torus and its exterior derivative.
pub struct IsotropyData {
    nu: usize,
    /// a_k(φ), on twice the embedding box (the products are kept exact).
    pub a: Vec<TorusField>,
    /// A_kj for k < j, row-major over the strict upper triangle.
    akj: Vec<TorusField>,
}

impl IsotropyData {
    /// A_kj with the antisymmetry folded in; k = j gives the zero field.
    pub fn a_form(&self, k: usize, j: usize) -> TorusField {
        assert!(k < self.nu && j < self.nu);
        if k == j {
            return TorusField::zero(self.a[0].nu(), self.a[0].n_phi(), 0);
        }
        let (lo, hi) = (k.min(j), k.max(j));
        let idx = lo * self.nu - lo * (lo + 1) / 2 + (hi - lo - 1);
        if k < j {
            self.akj[idx].clone()
        } else {
            self.akj[idx].scaled(-1.0)
        }
    }

    /// sup-style size of the 2-form — zero exactly when the torus is
    /// isotropic on its box.
    pub fn defect(&self) -> f64 {
        self.akj.iter().map(|f| f.max_coeff()).fold(0.0, f64::max)
    }
}

pub fn isotropy_data(emb: &TorusEmbedding) -> Result<IsotropyData, IsotropyError> {
    let nu = emb.nu();
    let zint = emb.z.dx(-1)?;
    let mut a = Vec::with_capacity(nu);
    for k in 0..nu {
        // a_k = −y_k − Σ_i y_i ∂_{φ_k}Θ_i + ½ (∂_{φ_k}z, ∂ₓ⁻¹z)
        let mut ak = emb.y[k].resize(2 * emb.n_phi(), 0)?.scaled(-1.0);
        for i in 0..nu {
            ak.axpy(-1.0, &phi_mul(&emb.y[i], &emb.theta[i].dphi(k)));
        }
        ak.axpy(0.5, &x_pair(&emb.z.dphi(k), &zint));
        ak.enforce_reality();
        a.push(ak);
    }
    let mut akj = Vec::new();
    for k in 0..nu {
        for j in k + 1..nu {
            let mut f = a[j].dphi(k);
            f.axpy(-1.0, &a[k].dphi(j));
            akj.push(f);
        }
    }
    Ok(IsotropyData { nu, a, akj })
}

/// Δ_φ⁻¹ on zero-average φ-functions: divide each mode by −|l|²; the l = 0
/// coefficient is forced to zero.
pub fn laplace_phi_inv(u: &TorusField) -> TorusField {
    let mut out = u.clone();
    let mut l = vec![0i64; u.nu()];
    for idx in 0..out.coeffs().len() {
        out.decode(idx, &mut l);
        let l2: i64 = l.iter().map(|v| v * v).sum();
        if l2 == 0 {
            out.coeffs_mut()[idx] = C64::new(0.0, 0.0);
        } else {
            out.coeffs_mut()[idx] /= -(l2 as f64);
        }
    }
    out
}

/// Shift the actions so the torus becomes isotropic; angles and normal
/// component are untouched. Returns the corrected embedding together with
/// the 1-form data of the input (whose `defect` measures how far the input
/// was from isotropic). Errs if ∂_φθ₀ degenerates at a sample point.
pub fn isotropic_correction(
    emb: &TorusEmbedding,
) -> Result<(TorusEmbedding, IsotropyData), IsotropyError> {
    let nu = emb.nu();
    let data = isotropy_data(emb)?;
    if nu < 2 {
        // a single angle carries no 2-form
        return Ok((emb.clone(), data));
    }
    let rho: Vec<TorusField> = (0..nu)
        .map(|j| {
            let mut s = TorusField::zero(nu, 2 * emb.n_phi(), 0);
            for k in 0..nu {
                if k != j {
                    s.axpy(1.0, &data.a_form(k, j).dphi(k));
                }
            }
            laplace_phi_inv(&s)
        })
        .collect();

    // Δy = [∂_φθ₀]⁻ᵀ ρ pointwise on a grid oversampled for ρ's box.
    let p = next_pow2(2 * (2 * 2 * emb.n_phi() + 1));
    let pts = p.pow(nu as u32);
    let rho_g: Vec<Vec<C64>> = rho.iter().map(|f| to_grid(f, p, 1).values).collect();
    let mut dth_g: Vec<Vec<C64>> = Vec::with_capacity(nu * nu);
    for i in 0..nu {
        for k in 0..nu {
            dth_g.push(to_grid(&emb.theta[i].dphi(k), p, 1).values);
        }
    }
    let solved = par_map_range(pts, |g| {
        let mut m = vec![0.0; nu * nu];
        for i in 0..nu {
            for k in 0..nu {
                // transposed entry: we solve [∂θ₀]ᵀ Δy = ρ
                let delta = if i == k { 1.0 } else { 0.0 };
                m[k * nu + i] = delta + dth_g[i * nu + k][g].re;
            }
        }
        let mut rhs: Vec<f64> = (0..nu).map(|j| rho_g[j][g].re).collect();
        solve_small(&mut m, &mut rhs, nu).map(|_| rhs)
    });
    let mut samples = vec![vec![0.0; pts]; nu];
    for (g, r) in solved.into_iter().enumerate() {
        let dy = r.map_err(IsotropyError::SingularJacobian)?;
        for i in 0..nu {
            samples[i][g] = dy[i];
        }
    }
    let mut out = emb.clone();
    for i in 0..nu {
        out.y[i].axpy(1.0, &assemble_scalar(nu, emb.n_phi(), p, &samples[i]));
    }
    out.enforce_reality();
    Ok((out, data))
}
