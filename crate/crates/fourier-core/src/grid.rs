//! Collocation grids: coefficient ↔ grid transforms, alias-free products and
//! integrals of products.
//!
//! Aliasing bookkeeping: a product of total Fourier degree d·N pollutes the
//! retained window |j| ≤ N only through grid harmonics ≥ P − N, so any grid
//! with P > (d+1)·N is exact on the window. `grid_for_degree` rounds that up
//! to a power of two.

use crate::field::TorusField;
use crate::C64;
use rustfft::FftPlanner;

pub fn next_pow2(n: usize) -> usize {
    let mut p = 1usize;
    while p < n {
        p <<= 1;
    }
    p
}

/// Smallest power of two exceeding (degree+1)·n (and at least 4).
pub fn grid_for_degree(n: usize, degree: usize) -> usize {
    next_pow2(((degree + 1) * n + 1).max(4))
}

/// In-place FFT along one axis of a row-major multi-dim array.
fn fft_axis(data: &mut [C64], shape: &[usize], axis: usize, inverse: bool) {
    let n = shape[axis];
    if n == 1 {
        return;
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let stride: usize = shape[axis + 1..].iter().product();
    let block = stride * n;
    let rows = data.len() / block;
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    for r in 0..rows {
        let base = r * block;
        for s in 0..stride {
            for k in 0..n {
                scratch[k] = data[base + k * stride + s];
            }
            fft.process(&mut scratch);
            for k in 0..n {
                data[base + k * stride + s] = scratch[k];
            }
        }
    }
}

pub struct Grid {
    pub nu: usize,
    pub p_phi: usize,
    pub p_x: usize,
    pub values: Vec<C64>,
}

impl Grid {
    pub fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.p_phi; self.nu];
        s.push(self.p_x);
        s
    }

    pub fn len(&self) -> usize {
        self.p_phi.pow(self.nu as u32) * self.p_x
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pointwise product into self.
    pub fn mul_assign(&mut self, o: &Grid) {
        assert_eq!(self.len(), o.values.len());
        for (a, b) in self.values.iter_mut().zip(&o.values) {
            *a *= b;
        }
    }

    pub fn apply_real(&mut self, f: impl Fn(f64) -> f64) {
        for v in &mut self.values {
            *v = C64::new(f(v.re), 0.0);
        }
    }

    /// Normalized mean over the grid — the exact integral of the represented
    /// trig polynomial when the grid is alias-free for it.
    pub fn mean(&self) -> f64 {
        let s: C64 = self.values.iter().sum();
        (s / self.len() as f64).re
    }
}

/// Synthesize u on a (p_phi, …, p_x) grid: unnormalized inverse DFT of the
/// coefficient box scattered into wavenumber bins.
pub fn to_grid(u: &TorusField, p_phi: usize, p_x: usize) -> Grid {
    assert!(p_phi > 2 * u.n_phi() && p_x > 2 * u.n_x());
    let nu = u.nu();
    let len = p_phi.pow(nu as u32) * p_x;
    let mut values = vec![C64::new(0.0, 0.0); len];
    let mut l = vec![0i64; nu];
    let coeffs = u.coeffs();
    for idx in 0..coeffs.len() {
        let z = coeffs[idx];
        if z.norm() == 0.0 {
            continue;
        }
        let j = u.decode(idx, &mut l);
        let mut bin = 0usize;
        for &li in &l {
            let b = li.rem_euclid(p_phi as i64) as usize;
            bin = bin * p_phi + b;
        }
        bin = bin * p_x + j.rem_euclid(p_x as i64) as usize;
        values[bin] = z;
    }
    let mut g = Grid { nu, p_phi, p_x, values };
    let shape = g.shape();
    for a in 0..=nu {
        fft_axis(&mut g.values, &shape, a, true);
    }
    g
}

/// Analyze a grid back into a coefficient box (forward DFT / grid size),
/// keeping |l_i| ≤ n_phi, |j| ≤ n_x. No reality fix-up: complex fields (e.g.
/// single-mode probe columns) pass through unchanged.
pub fn from_grid(g: &Grid, n_phi: usize, n_x: usize) -> TorusField {
    let mut vals = g.values.clone();
    let shape = g.shape();
    for a in 0..=g.nu {
        fft_axis(&mut vals, &shape, a, false);
    }
    let norm = 1.0 / g.len() as f64;
    let mut out = TorusField::zero(g.nu, n_phi, n_x);
    let mut l = vec![0i64; g.nu];
    let total = out.coeffs().len();
    for idx in 0..total {
        let j = out.decode(idx, &mut l);
        let mut bin = 0usize;
        for &li in &l {
            bin = bin * g.p_phi + li.rem_euclid(g.p_phi as i64) as usize;
        }
        bin = bin * g.p_x + j.rem_euclid(g.p_x as i64) as usize;
        out.coeffs_mut()[idx] = vals[bin] * norm;
    }
    out
}

/// Alias-free pointwise product, truncated back to the shape of the first
/// factor. Complex-linear (no reality assumption).
pub fn product_raw(fields: &[&TorusField]) -> TorusField {
    assert!(!fields.is_empty());
    let f0 = fields[0];
    let d = fields.len();
    let n_phi_max = fields.iter().map(|f| f.n_phi()).max().unwrap();
    let n_x_max = fields.iter().map(|f| f.n_x()).max().unwrap();
    let p_phi = if f0.nu() == 0 { 1 } else { grid_for_degree(n_phi_max, d) };
    let p_x = grid_for_degree(n_x_max, d);
    let mut acc = to_grid(f0, p_phi.max(2 * f0.n_phi() + 1), p_x);
    for f in &fields[1..] {
        assert_eq!(f.nu(), f0.nu());
        let g = to_grid(f, acc.p_phi, acc.p_x);
        acc.mul_assign(&g);
    }
    from_grid(&acc, f0.n_phi(), f0.n_x())
}

/// `product_raw` for real fields: conjugate-pair round-off is symmetrized.
pub fn product(fields: &[&TorusField]) -> TorusField {
    let mut out = product_raw(fields);
    out.enforce_reality();
    out
}

pub fn mul(a: &TorusField, b: &TorusField) -> TorusField {
    product(&[a, b])
}

pub fn powi(a: &TorusField, k: usize) -> TorusField {
    assert!(k >= 1);
    let v: Vec<&TorusField> = std::iter::repeat(a).take(k).collect();
    product(&v)
}

/// Exact normalized integral ∫ f_1 ⋯ f_d dμ (no truncation loss: computed on
/// a grid alias-free for the full product).
pub fn integral_of_product(fields: &[&TorusField]) -> f64 {
    assert!(!fields.is_empty());
    let f0 = fields[0];
    let d = fields.len();
    let n_phi_max = fields.iter().map(|f| f.n_phi()).max().unwrap();
    let n_x_max = fields.iter().map(|f| f.n_x()).max().unwrap();
    let p_phi = if f0.nu() == 0 { 1 } else { grid_for_degree(n_phi_max, d) };
    let p_x = grid_for_degree(n_x_max, d);
    let mut acc = to_grid(f0, p_phi.max(2 * f0.n_phi() + 1), p_x);
    for f in &fields[1..] {
        let g = to_grid(f, acc.p_phi, acc.p_x);
        acc.mul_assign(&g);
    }
    acc.mean()
}

/// L² pairing ⟨u,v⟩ = ∫ u v dμ = Σ u_{l,j} conj(v_{l,j}).
pub fn pairing(u: &TorusField, v: &TorusField) -> f64 {
    assert!(u.same_shape(v));
    let mut acc = C64::new(0.0, 0.0);
    for (a, b) in u.coeffs().iter().zip(v.coeffs()) {
        acc += a * b.conj();
    }
    acc.re
}

/// Apply a real scalar function pointwise: u ↦ f∘u, computed on a grid with
/// `headroom`× the minimal size (non-polynomial f is never alias-free; callers
/// pick the headroom their accuracy needs).
pub fn map_pointwise(
    u: &TorusField,
    headroom: usize,
    f: impl Fn(f64) -> f64,
) -> TorusField {
    let p_phi = if u.nu() == 0 { 1 } else { grid_for_degree(u.n_phi(), headroom) };
    let p_x = grid_for_degree(u.n_x(), headroom);
    let mut g = to_grid(u, p_phi.max(2 * u.n_phi() + 1), p_x);
    g.apply_real(&f);
    let mut out = from_grid(&g, u.n_phi(), u.n_x());
    out.enforce_reality();
    out
}
