//! Taylor blocks of the rescaled Hamiltonian in the torus-adapted chart:
//! K(ψ, η, w) up to the quadratic terms that the triangular solve consumes.
//!
//! K00, K10 and K01 come from exact point gradients transported through the
//! chart. K20 and K11 differentiate those gradients once more in η by
//! extrapolated central differences — the chart is linear in (η, w), so no
//! second-order chart terms are missed. The quadratic normal block K02 is
//! not materialized here; `k02_apply` exposes its action by the same
//! differentiation for diagnostics and small-scale factorizations, while
//! production runs pass a reduced operator handle to the solver instead.

use crate::chart::{ChartData, ChartPoint};
use crate::smallmat::mat_vec;
use fourier_core::grid::pairing;
use fourier_core::par::par_map_range;
use fourier_core::{C64, FieldError, LatticeOp, ModeSet, TorusField};
use hamiltonian::Model;
use thiserror::Error;
use torus_functional::{
    assemble_field, assemble_scalar, grad_h_eps_point, h_eps_point, slice_at, twist_matrix,
    xi_of_omega, EnergyError, FunctionalError, Params, TorusEmbedding,
};
use weak_bnf::BirkhoffGenerator;

#[derive(Debug, Error)]
pub enum TaylorError {
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Chart Taylor blocks on the embedding box. `k20` is row-major ν×ν and
/// symmetrized; `k11` holds the columns K11·ē_l as (φ, x)-fields.
pub struct KTaylor {
    pub nu: usize,
    pub k00: TorusField,
    pub k10: Vec<TorusField>,
    pub k01: TorusField,
    pub k20: Vec<TorusField>,
    pub k11: Vec<TorusField>,
    /// Largest entry removed by symmetrizing K20 — a finite-difference
    /// quality gauge.
    pub k20_asym: f64,
}

/// Central difference with one Richardson sweep: error O(h⁴).
fn extrap(d_h: f64, d_h2: f64) -> f64 {
    (4.0 * d_h2 - d_h) / 3.0
}

fn extrap_field(d_h: &TorusField, d_h2: &TorusField) -> TorusField {
    let mut out = d_h2.scaled(4.0 / 3.0);
    out.axpy(-1.0 / 3.0, d_h);
    out
}

struct PointGrad {
    hy: Vec<f64>,
    /// ∇_w of K at the point: the transported z-gradient minus the action
    /// feedback through the w-to-y block.
    gw: TorusField,
}

fn point_grad(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    xi: &[f64],
    pt: &ChartPoint,
    theta: &[f64],
    y: &[f64],
    z: &TorusField,
) -> Result<PointGrad, TaylorError> {
    let (hy, _ht, gz) = grad_h_eps_point(model, gen, params, xi, theta, y, z)?;
    let nx = gz.n_x().max(pt.ztw_int.first().map_or(0, |f| f.n_x()));
    let mut gw = gz.resize(0, nx)?;
    for (i, zi) in pt.ztw_int.iter().enumerate() {
        gw.axpy(-hy[i], &zi.resize(0, nx)?);
    }
    Ok(PointGrad { hy, gw })
}

const FD_ETA: f64 = 1e-3;

/// Blocks of K at (ψ, 0, 0) over the whole sampling grid.
pub fn k_taylor(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    omega: &[f64],
    emb: &TorusEmbedding,
    chart: &ChartData,
) -> Result<KTaylor, TaylorError> {
    let nu = model.nu();
    let xi = xi_of_omega(model, params.eps, omega);
    let pts = chart.pts();

    struct PointBlocks {
        k00: f64,
        k10: Vec<f64>,
        k01: TorusField,
        k20: Vec<f64>,
        k11: Vec<TorusField>,
    }

    let made = par_map_range(pts, |g| -> Result<PointBlocks, TaylorError> {
        let pt = &chart.points[g];
        let (theta, y, z) = slice_at(emb, &pt.phi);
        let k00 = h_eps_point(model, gen, params, &xi, &theta, &y, &z)?;
        let base = point_grad(model, gen, params, &xi, pt, &theta, &y, &z)?;
        let k10 = mat_vec(&pt.dtheta_inv, &base.hy, nu);

        let mut k20 = vec![0.0; nu * nu];
        let mut k11 = Vec::with_capacity(nu);
        for l in 0..nu {
            // η̂ = ē_l moves the actions along the conormal row
            let shift = |t: f64| -> Vec<f64> {
                (0..nu).map(|i| y[i] + t * pt.dtheta_inv[l * nu + i]).collect()
            };
            let eval = |t: f64| -> Result<(Vec<f64>, TorusField), TaylorError> {
                let p = point_grad(model, gen, params, &xi, pt, &theta, &shift(t), &z)?;
                Ok((mat_vec(&pt.dtheta_inv, &p.hy, nu), p.gw))
            };
            let h = FD_ETA;
            let (kp, wp) = eval(h)?;
            let (km, wm) = eval(-h)?;
            let (kp2, wp2) = eval(h / 2.0)?;
            let (km2, wm2) = eval(-h / 2.0)?;
            for k in 0..nu {
                let d1 = (kp[k] - km[k]) / (2.0 * h);
                let d2 = (kp2[k] - km2[k]) / h;
                k20[k * nu + l] = extrap(d1, d2);
            }
            let mut d1 = wp.sub(&wm);
            d1.scale(1.0 / (2.0 * h));
            let mut d2 = wp2.sub(&wm2);
            d2.scale(1.0 / h);
            k11.push(extrap_field(&d1, &d2));
        }
        Ok(PointBlocks { k00, k10, k01: base.gw, k20, k11 })
    });
    let mut blocks = Vec::with_capacity(pts);
    for b in made {
        blocks.push(b?);
    }

    let scal = |pick: &dyn Fn(&PointBlocks) -> f64| -> TorusField {
        let s: Vec<f64> = blocks.iter().map(pick).collect();
        assemble_scalar(nu, chart.n_phi, chart.p_phi, &s)
    };
    let k00 = scal(&|b| b.k00);
    let k10: Vec<TorusField> = (0..nu).map(|i| scal(&|b| b.k10[i])).collect();
    let mut k20: Vec<TorusField> =
        (0..nu * nu).map(|e| scal(&|b| b.k20[e])).collect();
    let mut k20_asym = 0.0f64;
    for k in 0..nu {
        for l in k + 1..nu {
            let diff = k20[k * nu + l].sub(&k20[l * nu + k]);
            k20_asym = k20_asym.max(diff.max_coeff());
            let mut sym = k20[k * nu + l].clone();
            sym.axpy(1.0, &k20[l * nu + k]);
            sym.scale(0.5);
            k20[k * nu + l] = sym.clone();
            k20[l * nu + k] = sym;
        }
    }

    let field = |pick: &dyn Fn(&PointBlocks) -> TorusField| -> TorusField {
        let cols: Vec<TorusField> = blocks.iter().map(pick).collect();
        assemble_field(nu, chart.n_phi, chart.n_x, chart.p_phi, &cols)
    };
    let k01 = field(&|b| b.k01.clone());
    let k11: Vec<TorusField> = (0..nu).map(|l| field(&|b| b.k11[l].clone())).collect();

    Ok(KTaylor { nu, k00, k10, k01, k20, k11, k20_asym })
}

/// Action of the quadratic normal block: w ↦ ∂_w∇_wK(ψ, 0, 0)[w], by the
/// same extrapolated differentiation of the exact w-gradient. The chart's
/// w-direction also moves the actions, which is included.
pub fn k02_apply(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    omega: &[f64],
    emb: &TorusEmbedding,
    chart: &ChartData,
    w: &TorusField,
) -> Result<TorusField, TaylorError> {
    let nu = model.nu();
    let xi = xi_of_omega(model, params.eps, omega);
    let made = par_map_range(chart.pts(), |g| -> Result<TorusField, TaylorError> {
        let pt = &chart.points[g];
        let (theta, y, z) = slice_at(emb, &pt.phi);
        let wg = w.at_phi(&pt.phi);
        let eval = |t: f64| -> Result<TorusField, TaylorError> {
            let mut zt = z.clone();
            zt.axpy(t, &wg);
            let yt: Vec<f64> =
                (0..nu).map(|i| y[i] - t * pairing(&pt.ztw_int[i], &wg)).collect();
            Ok(point_grad(model, gen, params, &xi, pt, &theta, &yt, &zt)?.gw)
        };
        let h = FD_ETA;
        let mut d1 = eval(h)?.sub(&eval(-h)?);
        d1.scale(1.0 / (2.0 * h));
        let mut d2 = eval(h / 2.0)?.sub(&eval(-h / 2.0)?);
        d2.scale(1.0 / h);
        Ok(extrap_field(&d1, &d2))
    });
    let mut cols = Vec::with_capacity(chart.pts());
    for c in made {
        cols.push(c?);
    }
    Ok(assemble_field(nu, chart.n_phi, chart.n_x, chart.p_phi, &cols))
}

/// Materialize K02 on a mode lattice, column by column. Real directions are
/// differentiated and the complex columns assembled by linearity; mirrored
/// modes reuse the conjugate column. Meant for small boxes — factoring the
/// full normal operator at production size goes through the reduction
/// pipeline instead.
pub fn k02_operator(
    model: &Model,
    gen: &BirkhoffGenerator,
    params: &Params,
    omega: &[f64],
    emb: &TorusEmbedding,
    chart: &ChartData,
    modes: &ModeSet,
) -> Result<LatticeOp, TaylorError> {
    let nu = modes.nu();
    let dim = modes.dim();
    let mut op = LatticeOp::zero(modes.clone());
    let mut l = vec![0i64; nu];
    let mut lm = vec![0i64; nu];
    for idx in 0..dim {
        let j = modes.decode(idx, &mut l);
        for (a, b) in lm.iter_mut().zip(&l) {
            *a = -b;
        }
        let mirror = modes.flat(&lm, -j).expect("mirror-closed lattice");
        if mirror < idx {
            for r in 0..dim {
                let jr = modes.decode(r, &mut l);
                for (a, b) in lm.iter_mut().zip(&l) {
                    *a = -b;
                }
                let rm = modes.flat(&lm, -jr).expect("mirror-closed lattice");
                let v = op.mat()[(rm, mirror)].conj();
                op.mat_mut()[(r, idx)] = v;
            }
            continue;
        }
        let mut e_re = TorusField::zero(nu, modes.n_phi(), modes.n_x());
        e_re.set(&l, j, C64::new(0.5, 0.0));
        e_re.set(&lm, -j, C64::new(0.5, 0.0));
        let mut e_im = TorusField::zero(nu, modes.n_phi(), modes.n_x());
        e_im.set(&l, j, C64::new(0.0, -0.5));
        e_im.set(&lm, -j, C64::new(0.0, 0.5));
        let col_re = modes.gather(&k02_apply(model, gen, params, omega, emb, chart, &e_re)?);
        let col_im = modes.gather(&k02_apply(model, gen, params, omega, emb, chart, &e_im)?);
        for r in 0..dim {
            op.mat_mut()[(r, idx)] = col_re[r] + C64::new(0.0, 1.0) * col_im[r];
        }
    }
    Ok(op)
}

/// The flat-torus action hessian ε^{2b}·𝔸·D_S the K20 block reduces to when
/// the density and the torus corrections are switched off.
pub fn twist_block(model: &Model, params: &Params) -> Vec<f64> {
    let nu = model.nu();
    let a = twist_matrix(model);
    let scale = params.eps.powf(2.0 * params.b());
    let mut out = vec![0.0; nu * nu];
    for k in 0..nu {
        for lix in 0..nu {
            out[k * nu + lix] = scale * a[k * nu + lix] * model.sites()[lix].abs() as f64;
        }
    }
    out
}

/// Sup-size of the blocks the triangular solve drops: the angle derivatives
/// of K10, K00 (twice), and K01. Each is residual-sized at a solution, which
/// is what makes the dropped part quadratic.
pub fn neglected_sup(k: &KTaylor) -> [f64; 3] {
    let nu = k.nu;
    let mut r10 = 0.0f64;
    let mut r00 = 0.0f64;
    let mut r01 = 0.0f64;
    for d in 0..nu {
        for f in &k.k10 {
            r10 = r10.max(f.dphi(d).max_coeff());
        }
        for e in 0..nu {
            r00 = r00.max(k.k00.dphi(d).dphi(e).max_coeff());
        }
        r01 = r01.max(k.k01.dphi(d).max_coeff());
    }
    [r10, r00, r01]
}
