//! The assembled approximate right inverse: linearity in the data, and a
//! defect that scales linearly with the torus residual.

use approx_inverse::{
    approx_inverse_defect, build_chart, k02_operator, k_taylor, t0_apply, ChartData, KTaylor,
    LatticeSolve,
};
use fourier_core::{s0, C64, ModeSet};
use hamiltonian::{Model, PolyDensity};
use torus_functional::{freq_amp, Params, TorusEmbedding};
use weak_bnf::{BirkhoffGenerator, SiteSet};

const N_PHI: usize = 3;
const N_X: usize = 6;

struct Fix {
    model: Model,
    gen: BirkhoffGenerator,
    params: Params,
    omega: Vec<f64>,
    emb: TorusEmbedding,
    chart: ChartData,
    k: KTaylor,
    linv: LatticeSolve,
}

/// Flat torus plus a smooth size-t deformation; at one angle every torus is
/// isotropic, so the chart applies as is.
fn fixture(t: f64) -> Fix {
    let model = Model::plain(1.0, PolyDensity::empty(), vec![1]).unwrap();
    let gen = BirkhoffGenerator::build(SiteSet::new(vec![1]).unwrap(), 1.0);
    let params = Params::new(0.05, 0.1, 3.0, N_PHI, N_X, 1).unwrap();
    let omega = freq_amp(&model, 0.05, &[0.8]);
    let mut emb = TorusEmbedding::trivial(1, N_PHI, N_X);
    emb.theta[0].set_pair(&[1], 0, C64::new(0.3 * t, -0.2 * t));
    emb.theta[0].set_pair(&[2], 0, C64::new(-0.1 * t, 0.15 * t));
    emb.y[0].set(&[0], 0, C64::new(0.05 * t, 0.0));
    emb.y[0].set_pair(&[1], 0, C64::new(0.2 * t, 0.1 * t));
    for (l, j, re, im) in [(1i64, 2i64, 0.25, -0.1), (-1, 3, 0.1, 0.2), (2, 2, -0.15, 0.05)] {
        emb.z.set_pair(&[l], j, C64::new(re * t, im * t));
    }
    emb.enforce_reality();
    let chart = build_chart(&emb).unwrap();
    let k = k_taylor(&model, &gen, &params, &omega, &emb, &chart).unwrap();
    let modes = ModeSet::normal(1, N_PHI, N_X, &model.sites_full());
    let k02 = k02_operator(&model, &gen, &params, &omega, &emb, &chart, &modes).unwrap();
    let linv = LatticeSolve::new(&omega, &k02).unwrap();
    Fix { model, gen, params, omega, emb, chart, k, linv }
}

fn probe(which: u64) -> TorusEmbedding {
    let mut g = TorusEmbedding::trivial(1, N_PHI, N_X);
    let s = 1.0 + which as f64 * 0.3;
    g.theta[0].set(&[0], 0, C64::new(0.4 * s, 0.0));
    g.theta[0].set_pair(&[1], 0, C64::new(0.3, -0.1 * s));
    g.y[0].set(&[0], 0, C64::new(-0.2 * s, 0.0));
    g.y[0].set_pair(&[2], 0, C64::new(0.15 * s, 0.25));
    g.z.set_pair(&[1], 2, C64::new(0.5, 0.2 * s));
    g.z.set_pair(&[-2], 3, C64::new(-0.3 * s, 0.1));
    g.z.set_pair(&[0], 4, C64::new(0.2, -0.3 * s));
    g.enforce_reality();
    g
}

#[test]
fn inverse_is_linear_in_the_data() {
    let f = fixture(5e-3);
    let g1 = probe(1);
    let g2 = probe(2);
    let mut g3 = g1.clone();
    g3.axpy(2.0, &g2);

    let (h1, _) = t0_apply(&f.k, &f.chart, &f.params, &f.omega, &f.linv, &g1).unwrap();
    let (h2, _) = t0_apply(&f.k, &f.chart, &f.params, &f.omega, &f.linv, &g2).unwrap();
    let (h3, s3) = t0_apply(&f.k, &f.chart, &f.params, &f.omega, &f.linv, &g3).unwrap();
    assert!(s3.cond_m1 >= 1.0 && s3.cond_m1.is_finite());

    let mut expect = h1.clone();
    expect.axpy(2.0, &h2);
    let scale = h3.norm(s0(1)) + h3.zeta_norm();
    let diff = h3.sub(&expect);
    assert!(
        diff.norm(s0(1)) + diff.zeta_norm() <= 1e-9 * (1.0 + scale),
        "linearity defect {:.3e} at scale {scale:.3e}",
        diff.norm(s0(1)) + diff.zeta_norm()
    );
}

#[test]
fn defect_scales_with_the_torus_residual() {
    let g = probe(0);
    let mut defects = Vec::new();
    let mut residuals = Vec::new();
    for t in [1e-3, 1e-2] {
        let f = fixture(t);
        let d = approx_inverse_defect(
            &f.model, &f.gen, &f.params, &f.omega, &f.emb, &f.chart, &f.k, &f.linv, &g,
        )
        .unwrap();
        assert!(d.cond_m1.is_finite());
        assert!(d.residual_s0 > 0.0);
        defects.push(d.defect);
        residuals.push(d.residual_s0);
    }
    assert!(
        residuals[1] > residuals[0],
        "residual should grow with the deformation: {residuals:?}"
    );
    let slope = (defects[1] / defects[0]).ln() / 10f64.ln();
    assert!(
        (0.5..=1.5).contains(&slope),
        "defect {:.3e} -> {:.3e}, slope {slope:.2}",
        defects[0],
        defects[1]
    );
    assert!(
        defects[0] <= 1e-3,
        "defect at the small deformation should be small, got {:.3e}",
        defects[0]
    );
}
