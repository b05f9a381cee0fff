//! The pulled-back 1-form, its exterior derivative, and the action shift
//! that removes it.

use approx_inverse::{isotropic_correction, isotropy_data, laplace_phi_inv, IsotropyError};
use fourier_core::{C64, TorusField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_functional::TorusEmbedding;

fn random_field(seed: u64, nu: usize, n_phi: usize, n_x: usize, band: i64, amp: f64) -> TorusField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = TorusField::zero(nu, n_phi, n_x);
    for _ in 0..10 {
        let l: Vec<i64> = (0..nu).map(|_| rng.gen_range(-band..=band)).collect();
        let j = if n_x == 0 { 0 } else { rng.gen_range(1..=n_x.min(4) as i64) };
        if l.iter().all(|&a| a == 0) && j == 0 {
            continue;
        }
        f.set_pair(&l, j, C64::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)));
    }
    f
}

/// Small torus with band-limited angle, action, and normal components; the
/// normal slice only uses modes off the first two sites.
fn wobbly_torus(seed: u64, n_phi: usize, n_x: usize, amp: f64) -> TorusEmbedding {
    let nu = 2;
    let mut emb = TorusEmbedding::trivial(nu, n_phi, n_x);
    for i in 0..nu {
        emb.theta[i] = random_field(seed + i as u64, nu, n_phi, 0, 2, amp);
        emb.y[i] = random_field(seed + 10 + i as u64, nu, n_phi, 0, 2, amp);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 99);
    for _ in 0..8 {
        let l: Vec<i64> = (0..nu).map(|_| rng.gen_range(-2i64..=2)).collect();
        let j = rng.gen_range(3..=n_x as i64);
        emb.z.set_pair(&l, j, C64::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)));
    }
    emb.enforce_reality();
    emb
}

#[test]
fn trivial_torus_is_already_isotropic() {
    let emb = TorusEmbedding::trivial(2, 4, 5);
    let data = isotropy_data(&emb).unwrap();
    assert_eq!(data.defect(), 0.0);
    let (fixed, _) = isotropic_correction(&emb).unwrap();
    for i in 0..2 {
        assert_eq!(fixed.y[i].sub(&emb.y[i]).max_coeff(), 0.0);
    }
}

#[test]
fn constant_actions_shift_the_form_but_need_no_correction() {
    let mut emb = TorusEmbedding::trivial(2, 4, 5);
    let c = [0.7, -0.3];
    for i in 0..2 {
        emb.y[i].set(&[0, 0], 0, C64::new(c[i], 0.0));
    }
    let data = isotropy_data(&emb).unwrap();
    // a_k = −c_k exactly, so the 2-form vanishes
    for k in 0..2 {
        assert!((data.a[k].get(&[0, 0], 0).re + c[k]).abs() <= 1e-15);
        assert!(data.a[k].sub(&data.a[k].phi_average().broadcast_phi(2, 8)).max_coeff() <= 1e-15);
    }
    assert!(data.defect() <= 1e-15);
    let (fixed, _) = isotropic_correction(&emb).unwrap();
    for i in 0..2 {
        assert!(fixed.y[i].sub(&emb.y[i]).max_coeff() <= 1e-14);
    }
}

#[test]
fn angle_laplacian_inverts_on_zero_average_fields() {
    let mut u = random_field(5, 2, 4, 0, 4, 1.0);
    u.set(&[0, 0], 0, C64::new(0.0, 0.0));
    let v = laplace_phi_inv(&u);
    let mut lap = TorusField::zero(2, 4, 0);
    for k in 0..2 {
        lap.axpy(1.0, &v.dphi(k).dphi(k));
    }
    assert!(lap.sub(&u).max_coeff() <= 1e-12 * u.max_coeff());
}

#[test]
fn action_shift_makes_the_torus_isotropic() {
    let emb = wobbly_torus(11, 8, 5, 3e-3);
    let (fixed, data0) = isotropic_correction(&emb).unwrap();
    let before = data0.defect();
    assert!(before > 1e-9, "test torus should start anisotropic, got {before:.3e}");

    let data1 = isotropy_data(&fixed).unwrap();
    let after = data1.defect();
    assert!(
        after <= 1e-10 && after <= before * 1e-3,
        "2-form defect {before:.3e} -> {after:.3e}"
    );

    // only the actions move
    for i in 0..2 {
        assert_eq!(fixed.theta[i].sub(&emb.theta[i]).max_coeff(), 0.0);
    }
    assert_eq!(fixed.z.sub(&emb.z).max_coeff(), 0.0);
}

#[test]
fn antisymmetric_accessor_folds_the_triangle() {
    let emb = wobbly_torus(12, 6, 5, 1e-2);
    let data = isotropy_data(&emb).unwrap();
    for k in 0..2 {
        for j in 0..2 {
            let sum = data.a_form(k, j).sub(&data.a_form(j, k).scaled(-1.0));
            assert!(sum.max_coeff() <= 1e-15);
        }
    }
    assert_eq!(data.a_form(1, 1).max_coeff(), 0.0);
}

#[test]
fn degenerate_angle_jacobian_is_reported() {
    // ∂_{φ₁}θ₁ = 1 − cos φ₁ vanishes on the φ₁ = 0 slice
    let mut emb = TorusEmbedding::trivial(2, 4, 3);
    emb.theta[0].set_pair(&[1, 0], 0, C64::new(0.0, 0.5));
    match isotropic_correction(&emb) {
        Err(IsotropyError::SingularJacobian(_)) => {}
        other => panic!("expected a singular jacobian, got {:?}", other.map(|_| ())),
    }
}
