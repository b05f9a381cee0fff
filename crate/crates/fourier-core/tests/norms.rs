mod common;

use common::{assert_close, random_decay, random_field, two_cos};
use fourier_core::lip::{LipError, ParamFamily};
use fourier_core::{C64, DecayOperator, TorusField};
use std::collections::HashMap;

#[test]
fn sobolev_zero_field() {
    let u = TorusField::zero(2, 3, 5);
    assert_eq!(u.sobolev_norm(0.0), 0.0);
    assert_eq!(u.sobolev_norm(2.5), 0.0);
}

#[test]
fn sobolev_two_cos_s0_is_sqrt2() {
    // u = 2cos(x): u_{0,±1} = 1, Parseval gives √2
    let u = two_cos(1, 0, 2, 1);
    assert_close(u.sobolev_norm(0.0), 2.0f64.sqrt(), 1e-15, "‖2cos x‖_0");
    assert_close(u.l2_norm(), 2.0f64.sqrt(), 1e-15, "l2");
}

#[test]
fn sobolev_two_cos_s1_is_2() {
    // ⟨0,±1⟩² = 2 per mode: (2·2)^{1/2} = 2
    let u = two_cos(1, 0, 2, 1);
    assert_close(u.sobolev_norm(1.0), 2.0, 1e-15, "‖2cos x‖_1");
}

#[test]
fn sobolev_monotone_in_s() {
    for seed in 0..5 {
        let u = random_field(2, 3, 6, seed, false);
        let mut prev = u.sobolev_norm(0.0);
        for k in 1..8 {
            let s = k as f64 * 0.5;
            let cur = u.sobolev_norm(s);
            assert!(cur >= prev - 1e-12, "not monotone at s={s}");
            prev = cur;
        }
    }
}

#[test]
fn sobolev_negative_s_rejected() {
    let u = two_cos(1, 0, 2, 1);
    let r = std::panic::catch_unwind(|| u.sobolev_norm(-1.0));
    assert!(r.is_err());
}

#[test]
fn decay_identity_is_one() {
    let js: Vec<i64> = (-5i64..=5).filter(|&j| j != 0).collect();
    let a = DecayOperator::identity(1, 3, js);
    for &s in &[0.0, 1.0, 2.5] {
        assert_close(a.decay_norm(s), 1.0, 1e-15, "identity decay norm");
    }
}

#[test]
fn decay_mult_op_equals_sobolev_of_symbol() {
    // |T_p|_s = ‖p‖_s once every diagonal of p is realized by some (j,j') pair
    let p = {
        let mut p = two_cos(1, 2, 3, 1);
        p.set_pair(&[1], 2, C64::new(0.3, 0.1));
        p.set_pair(&[-2], 3, C64::new(-0.2, 0.05));
        p
    };
    let js: Vec<i64> = (-8i64..=8).collect();
    let a = DecayOperator::mult_op(&p, &js);
    for &s in &[0.0, 1.0, 2.0] {
        assert_close(a.decay_norm(s), p.sobolev_norm(s), 1e-13, "mult op norm");
    }
}

#[test]
fn decay_random_sparse_matches_bruteforce() {
    // independent oracle: bucket sups by (l, j−j') in a hash map
    for seed in 0..4 {
        let js: Vec<i64> = (-4i64..=4).filter(|&j| j != 0).collect();
        let a = random_decay(1, 2, &js, seed);
        let mut sup: HashMap<(Vec<i64>, i64), f64> = HashMap::new();
        let mut l = vec![0i64; 1];
        for lf in 0..a.lcount() {
            a.decode_l(lf, &mut l);
            for &j in a.js() {
                for &jp in a.js() {
                    let v = a.get(&l, j, jp).norm();
                    let e = sup.entry((l.clone(), j - jp)).or_insert(0.0);
                    if v > *e {
                        *e = v;
                    }
                }
            }
        }
        let brute: f64 = sup.values().map(|v| v * v).sum::<f64>().sqrt();
        assert_close(a.decay_norm(0.0), brute, 1e-13, "brute-force s=0");
    }
}

#[test]
fn lip_constant_family_has_zero_seminorm() {
    let e = random_field(1, 2, 4, 7, false);
    let fam = ParamFamily::new(
        0.5,
        vec![(vec![1.0], e.clone()), (vec![2.0], e.clone()), (vec![3.5], e.clone())],
    )
    .unwrap();
    assert_close(fam.lip_seminorm(1.0).unwrap(), 0.0, 1e-15, "const lip");
    assert_close(fam.lip_gamma_norm(1.0), e.sobolev_norm(1.0), 1e-15, "const sup");
}

#[test]
fn lip_linear_family_matches_closed_form() {
    // u(ω) = ω₁·e on ω ∈ {0.5, 1.5}: sup = 1.5‖e‖, quotient = ‖e‖
    let e = random_field(1, 2, 4, 8, false);
    let gamma = 0.25;
    let s = 1.0;
    let fam = ParamFamily::new(
        gamma,
        vec![(vec![0.5], e.scaled(0.5)), (vec![1.5], e.scaled(1.5))],
    )
    .unwrap();
    let en = e.sobolev_norm(s);
    assert_close(fam.sup_norm(s), 1.5 * en, 1e-13, "sup");
    assert_close(fam.lip_seminorm(s).unwrap(), en, 1e-13, "lip");
    assert_close(fam.lip_gamma_norm(s), 1.5 * en + gamma * en, 1e-13, "lip-gamma");
}

#[test]
fn lip_quadratic_family_matches_pairwise_oracle() {
    // u(ω ) = ω₁²·e on {0,1,3}: quotients |a+b|‖e‖ → max 4‖e‖, sup 9‖e‖
    let e = random_field(1, 1, 3, 9, false);
    let gamma = 2.0;
    let s = 0.0;
    let fam = ParamFamily::new(
        gamma,
        vec![
            (vec![0.0], e.scaled(0.0)),
            (vec![1.0], e.scaled(1.0)),
            (vec![3.0], e.scaled(9.0)),
        ],
    )
    .unwrap();
    let en = e.sobolev_norm(s);
    assert_close(fam.lip_seminorm(s).unwrap(), 4.0 * en, 1e-13, "pairwise max");
    assert_close(fam.lip_gamma_norm(s), 9.0 * en + gamma * 4.0 * en, 1e-13, "lip-gamma");
}

#[test]
fn lip_too_few_samples_signaled() {
    let e = random_field(1, 1, 3, 10, false);
    let fam = ParamFamily::new(1.0, vec![(vec![0.0], e)]).unwrap();
    match fam.lip_seminorm(0.0) {
        Err(LipError::TooFewSamples { needed: 2, have: 1 }) => {}
        other => panic!("expected TooFewSamples, got {other:?}"),
    }
}

#[test]
fn lip_duplicate_samples_rejected() {
    let e = random_field(1, 1, 3, 11, false);
    let r = ParamFamily::new(1.0, vec![(vec![1.0], e.clone()), (vec![1.0], e)]);
    assert!(matches!(r, Err(LipError::DuplicateSample(1))));
}

#[test]
fn lip_works_for_operators_too() {
    let js: Vec<i64> = (-3i64..=3).filter(|&j| j != 0).collect();
    let a = random_decay(1, 1, &js, 12);
    let fam = ParamFamily::new(
        1.0,
        vec![(vec![0.0], a.scaled(C64::new(1.0, 0.0))), (vec![1.0], a.scaled(C64::new(2.0, 0.0)))],
    )
    .unwrap();
    let n = a.decay_norm(0.5);
    assert_close(fam.lip_gamma_norm(0.5), 2.0 * n + n, 1e-13, "operator family");
}
