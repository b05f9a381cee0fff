//! Hamiltonian evaluation, gradients, vector fields, and the bracket/form
//! pair on the zero-average phase space.

use fourier_core::{grid, TorusField};

use crate::density::{DensityError, PolyDensity};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("sign must be ±1, got {0}")]
    BadSign(f64),
    #[error("lambda must be 0 or 3ς/4 = {expect}, got {got}")]
    BadLambda { expect: f64, got: f64 },
    #[error("sites must be positive and distinct: {0:?}")]
    BadSites(Vec<i64>),
    #[error(transparent)]
    Density(#[from] DensityError),
}

#[derive(Clone, Debug)]
pub struct Model {
    sign: f64,
    lambda: f64,
    density: PolyDensity,
    /// positive tangential sites j̄_1 < … < j̄_ν
    sites: Vec<i64>,
}

impl Model {
    pub fn new(
        sign: f64,
        lambda: f64,
        density: PolyDensity,
        sites: Vec<i64>,
    ) -> Result<Self, ModelError> {
        if sign != 1.0 && sign != -1.0 {
            return Err(ModelError::BadSign(sign));
        }
        let expect = 0.75 * sign;
        if lambda != 0.0 && lambda != expect {
            return Err(ModelError::BadLambda { expect, got: lambda });
        }
        let mut sites = sites;
        sites.sort_unstable();
        let ok = !sites.is_empty()
            && sites.iter().all(|&j| j >= 1)
            && sites.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(ModelError::BadSites(sites));
        }
        Ok(Model { sign, lambda, density, sites })
    }

    pub fn plain(sign: f64, density: PolyDensity, sites: Vec<i64>) -> Result<Self, ModelError> {
        Self::new(sign, 0.0, density, sites)
    }

    /// K = H + (3ς/4)M²: the mass-corrected variant that empties the
    /// resonant quartic normal form.
    pub fn lambda_variant(
        sign: f64,
        density: PolyDensity,
        sites: Vec<i64>,
    ) -> Result<Self, ModelError> {
        Self::new(sign, 0.75 * sign, density, sites)
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn density(&self) -> &PolyDensity {
        &self.density
    }
    /// Positive sites; the symmetric full set is S = sites ∪ −sites.
    pub fn sites(&self) -> &[i64] {
        &self.sites
    }
    pub fn nu(&self) -> usize {
        self.sites.len()
    }
    pub fn sites_full(&self) -> Vec<i64> {
        let mut s: Vec<i64> = self.sites.iter().map(|&j| -j).collect();
        s.extend_from_slice(&self.sites);
        s.sort_unstable();
        s
    }

    /// Output box that holds every term of ∇H exactly.
    fn grad_box(&self, n_x: usize) -> usize {
        let cubic = 3 * n_x;
        let dens = self
            .density
            .monomials()
            .iter()
            .map(|m| {
                let deg = (m.p + m.q) as usize;
                let harm = if m.kind == crate::density::Trig::Const {
                    0
                } else {
                    m.m.unsigned_abs() as usize
                };
                // ∂_u or ∂_x∂_{u_x} keeps degree ≤ deg − 1 fields plus the harmonic
                deg.saturating_sub(1) * n_x + harm
            })
            .max()
            .unwrap_or(0);
        cubic.max(dens).max(n_x)
    }

    /// H(u) = ½∫u_x² − (ς/4)∫u⁴ + ∫f + λM(u)².
    pub fn eval_h(&self, u: &TorusField) -> f64 {
        assert_eq!(u.nu(), 0, "H is defined on x-only fields");
        let ux = u.dx(1).expect("dx");
        let quad = 0.5 * grid::pairing(&ux, &ux);
        let quart = grid::integral_of_product(&[u, u, u, u]);
        let pert = self.density.integral_on(u);
        let m = mass(u);
        quad - 0.25 * self.sign * quart + pert + self.lambda * m * m
    }

    /// L²-gradient (zero-average representative):
    /// π₀[−u_xx − ςu³ + (∂_u f) − ∂_x(∂_{u_x} f) + 4λM·u].
    pub fn grad_h(&self, u: &TorusField) -> TorusField {
        assert_eq!(u.nu(), 0, "∇H is defined on x-only fields");
        let nx = self.grad_box(u.n_x());
        let ub = u.resize(u.n_phi(), nx).expect("widening");
        let mut g = ub.dx(2).expect("dx").scaled(-1.0);
        g.axpy(-self.sign, &grid::powi(&ub, 3));
        let fu = self.density.du();
        if !fu.is_empty() {
            g = g.add(&fu.eval_on(&ub));
        }
        let fux = self.density.dux();
        if !fux.is_empty() {
            g = g.sub(&fux.eval_on(&ub).dx(1).expect("dx"));
        }
        if self.lambda != 0.0 {
            g.axpy(4.0 * self.lambda * mass(u), &ub);
        }
        g.pi0()
    }

    /// X_H = ∂_x ∇H — the right-hand side of u_t = X_H(u).
    pub fn vector_field(&self, u: &TorusField) -> TorusField {
        self.grad_h(u).dx(1).expect("dx")
    }

    /// N₄ = −∂_x[(∂_u f) − ∂_x(∂_{u_x} f)]: the quasi-linear part of X_H.
    pub fn n4(&self, u: &TorusField) -> TorusField {
        assert_eq!(u.nu(), 0);
        let nx = self.grad_box(u.n_x());
        let ub = u.resize(u.n_phi(), nx).expect("widening");
        let mut r = TorusField::zero(0, 0, nx);
        let fu = self.density.du();
        if !fu.is_empty() {
            r = r.add(&fu.eval_on(&ub));
        }
        let fux = self.density.dux();
        if !fux.is_empty() {
            r = r.sub(&fux.eval_on(&ub).dx(1).expect("dx"));
        }
        r.dx(1).expect("dx").scaled(-1.0)
    }
}

/// M(u) = ∫u² dμ = Σ|u_j|².
pub fn mass(u: &TorusField) -> f64 {
    grid::pairing(u, u)
}

/// Ω(u, v) = ∫(∂_x^{-1}u)·v dμ; antisymmetric, non-degenerate on zero-average
/// fields.
pub fn symplectic_form(u: &TorusField, v: &TorusField) -> f64 {
    let pu = u.dx(-1).expect("zero-average input");
    grid::pairing(&pu, v)
}

/// {F, G}(u) = ∫ ∇F(u) ∂_x ∇G(u) dμ for gradient callbacks.
pub fn poisson_bracket(
    grad_f: impl Fn(&TorusField) -> TorusField,
    grad_g: impl Fn(&TorusField) -> TorusField,
    u: &TorusField,
) -> f64 {
    let gf = grad_f(u);
    let gg = grad_g(u).dx(1).expect("dx");
    // boxes may differ: pair on the wider one
    let nx = gf.n_x().max(gg.n_x());
    let np = gf.n_phi().max(gg.n_phi());
    let a = gf.resize(np, nx).expect("widening");
    let b = gg.resize(np, nx).expect("widening");
    grid::pairing(&a, &b)
}
