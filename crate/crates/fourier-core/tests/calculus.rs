mod common;

use common::{assert_close, random_field, two_cos};
use fourier_core::{grid, C64, Projection, TorusField};

#[test]
fn project_splits_tangential_and_normal() {
    // S⁺ = {3}: 2cos(3x) is tangential, 2cos(6x) normal
    let u = two_cos(1, 1, 8, 3).add(&two_cos(1, 1, 8, 6));
    let s_full = [-3i64, 3];
    let v = u.project(&s_full, Projection::Tangential);
    let z = u.project(&s_full, Projection::Normal);
    assert_close(v.sub(&two_cos(1, 1, 8, 3)).l2_norm(), 0.0, 1e-15, "tangential part");
    assert_close(z.sub(&two_cos(1, 1, 8, 6)).l2_norm(), 0.0, 1e-15, "normal part");
    assert_close(v.add(&z).sub(&u).l2_norm(), 0.0, 1e-15, "v + z = u");
}

#[test]
fn dx_of_two_cos_is_minus_two_sin() {
    let u = two_cos(1, 0, 2, 1);
    let du = u.dx(1).unwrap();
    // −2 sin x at x = 0.3
    for &x in &[0.0, 0.3, 1.7, 4.0] {
        assert_close(du.eval_at(&[0.0], x), -2.0 * x.sin(), 1e-13, "∂_x 2cos");
    }
}

#[test]
fn dx_inv_undoes_dx() {
    for seed in 0..6 {
        let u = random_field(2, 2, 5, seed, true);
        let back = u.dx(1).unwrap().dx(-1).unwrap();
        assert_close(back.sub(&u).l2_norm(), 0.0, 1e-13, "∂_x^{-1}∂_x = id");
        let fwd = u.dx(-1).unwrap().dx(1).unwrap();
        assert_close(fwd.sub(&u).l2_norm(), 0.0, 1e-13, "∂_x∂_x^{-1} = id");
    }
}

#[test]
fn dx_inv_requires_zero_average() {
    let mut u = two_cos(1, 0, 2, 1);
    u.set(&[0], 0, C64::new(1.0, 0.0)); // inject an x-average
    assert!(u.dx(-1).is_err());
}

#[test]
fn truncation_smoothing_exact_on_random_fields() {
    // ‖Π_N u‖_{s+α} ≤ N^α ‖u‖_s and ‖u − Π_N u‖_s ≤ N^{−α} ‖u‖_{s+α},
    // both from the bracket cut itself — no constant
    let mut checked = 0;
    for seed in 0..100 {
        let u = random_field(1, 4, 8, seed, false);
        for &n in &[2.0, 4.0, 7.5] {
            for &(s, alpha) in &[(0.0, 1.0), (1.0, 0.5), (0.5, 2.0)] {
                let head = u.truncate(n);
                let tail = u.sub(&head);
                assert!(
                    head.sobolev_norm(s + alpha) <= n.powf(alpha) * u.sobolev_norm(s) * (1.0 + 1e-12),
                    "smoothing violated: seed {seed} N {n} s {s} α {alpha}"
                );
                assert!(
                    tail.sobolev_norm(s) <= n.powf(-alpha) * u.sobolev_norm(s + alpha) * (1.0 + 1e-12),
                    "tail bound violated: seed {seed} N {n} s {s} α {alpha}"
                );
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 900);
}

#[test]
fn truncate_plus_tail_is_identity() {
    let u = random_field(2, 3, 5, 42, false);
    let sum = u.truncate(3.0).add(&u.truncate_tail(3.0));
    assert_close(sum.sub(&u).l2_norm(), 0.0, 1e-15, "Π_N + Π_N^⊥ = id");
}

#[test]
fn product_matches_pointwise_evaluation() {
    // convolution result sampled on the torus vs product of samples
    for seed in 0..5 {
        let u = random_field(1, 2, 3, seed, false);
        let v = random_field(1, 2, 3, seed + 50, false);
        // output is clipped to the first factor's box, so widen it first
        let w = grid::mul(&u.resize(4, 6).unwrap(), &v);
        assert_eq!(w.n_x(), 6);
        let pts = [(0.0, 0.0), (0.7, 1.3), (2.1, 5.0), (4.4, 0.2), (5.9, 3.3)];
        for &(p, x) in &pts {
            let lhs = w.eval_at(&[p], x);
            let rhs = u.eval_at(&[p], x) * v.eval_at(&[p], x);
            assert_close(lhs, rhs, 1e-12, "product vs pointwise");
        }
    }
}

#[test]
fn cubic_product_is_alias_free() {
    let u = random_field(1, 1, 4, 3, false);
    let w = grid::product(&[&u.resize(3, 12).unwrap(), &u, &u]);
    let pts = [(0.5, 0.9), (3.0, 2.2)];
    for &(p, x) in &pts {
        let e = u.eval_at(&[p], x);
        assert_close(w.eval_at(&[p], x), e * e * e, 1e-12, "cube");
    }
}

#[test]
fn integral_of_product_is_parseval() {
    // normalized measure: ∫u² = Σ|u_{l,j}|²
    for seed in 0..4 {
        let u = random_field(1, 2, 4, seed, false);
        let p: f64 = u.coeffs().iter().map(|z| z.norm_sqr()).sum();
        assert_close(grid::integral_of_product(&[&u, &u]), p, 1e-12, "Parseval");
        assert_close(grid::pairing(&u, &u), p, 1e-12, "pairing");
    }
}

#[test]
fn map_pointwise_exp_of_small_symbol() {
    // e^{p(x)} computed on the grid vs series: ‖p‖ small keeps the spectrum
    // effectively inside the box
    let mut p = two_cos(1, 0, 12, 1);
    p.scale(0.05);
    let ep = grid::map_pointwise(&p, 4, f64::exp);
    for &x in &[0.0, 0.9, 2.5, 5.1] {
        assert_close(ep.eval_at(&[0.0], x), (0.1 * x.cos()).exp(), 1e-12, "exp symbol");
    }
}

#[test]
fn reality_closure_under_arithmetic() {
    for seed in 0..5 {
        let u = random_field(2, 2, 4, seed, false);
        let v = random_field(2, 2, 4, seed + 9, false);
        assert!(u.reality_defect() <= 1e-15);
        assert!(grid::mul(&u, &v).reality_defect() <= 1e-13);
        assert!(u.add(&v).reality_defect() <= 1e-15);
        assert!(u.dx(1).unwrap().reality_defect() <= 1e-15);
        assert!(u.project(&[1, -1], Projection::Normal).reality_defect() <= 1e-15);
        assert!(u.truncate(3.0).reality_defect() <= 1e-15);
    }
}

#[test]
fn resize_and_broadcast_round_trip() {
    let u = random_field(1, 2, 3, 5, false);
    let big = u.resize(4, 7).unwrap();
    let back = big.resize(2, 3).unwrap();
    assert_close(back.sub(&u).l2_norm(), 0.0, 1e-15, "resize round trip");
}

#[test]
fn resize_refuses_to_drop_modes() {
    let mut u = TorusField::zero(1, 2, 3);
    u.set_pair(&[1], 2, C64::new(0.4, 0.2));
    assert!(u.resize(0, 3).is_err());
    assert!(u.resize(2, 1).is_err());
    assert!(u.resize(1, 2).is_ok());
}

#[test]
fn phi_average_picks_l_equals_zero() {
    let mut u = two_cos(1, 2, 3, 1);
    u.set_pair(&[1], 2, C64::new(0.4, 0.2));
    let avg = u.phi_average();
    assert_eq!(avg.nu(), 0);
    assert_close(avg.eval_at(&[], 0.7), 2.0 * (0.7f64).cos(), 1e-13, "φ-average");
}
