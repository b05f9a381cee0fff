#![allow(dead_code)]

use fourier_core::{C64, DecayOperator, TorusField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random real field filling the whole box; `zero_avg` clears the j = 0 column.
pub fn random_field(nu: usize, n_phi: usize, n_x: usize, seed: u64, zero_avg: bool) -> TorusField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = TorusField::zero(nu, n_phi, n_x);
    for idx in 0..u.coeffs().len() {
        u.coeffs_mut()[idx] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    u.enforce_reality();
    if zero_avg {
        let out = u.pi0();
        return out;
    }
    u
}

/// Random real Töplitz operator with entries on every stored slot.
pub fn random_decay(nu: usize, n_phi: usize, js: &[i64], seed: u64) -> DecayOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DecayOperator::zero(nu, n_phi, js.to_vec());
    let js = a.js().to_vec();
    let lc = a.lcount();
    let mut l = vec![0i64; nu];
    for lf in 0..lc {
        a.decode_l(lf, &mut l);
        for &j in &js {
            for &jp in &js {
                let v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                // decay in the off-diagonal distance keeps norms finite-ish
                let w = 1.0 / (1.0 + ((j - jp).abs() as f64).powi(2) + (l.iter().map(|x| x * x).sum::<i64>() as f64));
                a.set(&l, j, jp, v * w);
            }
        }
    }
    symmetrize_reality(&mut a);
    a
}

/// Make conj(A(l,j,j')) = A(−l,−j,−j') exactly by averaging mirror pairs.
pub fn symmetrize_reality(a: &mut DecayOperator) {
    let js = a.js().to_vec();
    let lc = a.lcount();
    let nu = a.nu();
    let mut l = vec![0i64; nu];
    for lf in 0..lc {
        a.decode_l(lf, &mut l);
        let lm: Vec<i64> = l.iter().map(|x| -x).collect();
        for &j in &js {
            for &jp in &js {
                if !js.contains(&(-j)) || !js.contains(&(-jp)) {
                    continue;
                }
                let v = a.get(&l, j, jp);
                let w = a.get(&lm, -j, -jp);
                let avg = (v + w.conj()) * 0.5;
                a.set(&l, j, jp, avg);
                a.set(&lm, -j, -jp, avg.conj());
            }
        }
    }
}

/// 2cos(k x): coefficients u_{0,±k} = 1.
pub fn two_cos(nu: usize, n_phi: usize, n_x: usize, k: i64) -> TorusField {
    let mut u = TorusField::zero(nu, n_phi, n_x);
    let l0 = vec![0i64; nu];
    u.set_pair(&l0, k, C64::new(1.0, 0.0));
    u
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
        "{what}: {a} vs {b} (tol {tol})"
    );
}
