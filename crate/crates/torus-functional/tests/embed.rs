use fourier_core::{C64, TorusField};
use hamiltonian::{Model, PolyDensity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_functional::{
    a_eps_point, da_dtheta_coeff, da_dy_coeff, embed_a_eps, EmbedError, Params, TorusEmbedding,
};

fn model_one_site() -> Model {
    Model::new(1.0, 0.0, PolyDensity::empty(), vec![3]).unwrap()
}

fn params(n_phi: usize, n_x: usize) -> Params {
    Params::new(0.05, 0.1, 3.0, n_phi, n_x, 1).unwrap()
}

#[test]
fn trivial_embedding_is_a_shifted_cosine() {
    let model = model_one_site();
    let p = params(6, 8);
    let xi = [1.44];
    let emb = TorusEmbedding::trivial(1, p.n_phi, p.n_x);
    let u = embed_a_eps(&model, &p, &xi, &emb).unwrap();

    let amp = p.eps * 1.2;
    let c = u.get(&[1], 3);
    assert!((c - C64::new(amp, 0.0)).norm() <= 1e-14, "site coefficient {c}");
    assert!((u.get(&[-1], -3) - C64::new(amp, 0.0)).norm() <= 1e-14);
    assert!(u.reality_defect() <= 1e-14);

    let mut rest = u.clone();
    rest.set_pair(&[1], 3, C64::new(0.0, 0.0));
    assert!(rest.l2_norm() <= 1e-14, "unexpected extra modes {:.3e}", rest.l2_norm());

    let (phi, x) = (0.7f64, 0.2f64);
    let want = 2.0 * amp * (phi + 3.0 * x).cos();
    assert!((u.eval_at(&[phi], x) - want).abs() <= 1e-13);
}

#[test]
fn normal_part_enters_linearly_with_its_scaling() {
    let model = model_one_site();
    let p = params(4, 6);
    let xi = [1.0];
    let mut emb = TorusEmbedding::trivial(1, p.n_phi, p.n_x);
    emb.z.set_pair(&[2], 5, C64::new(0.3, -0.1));
    emb.z.set_pair(&[0], 1, C64::new(0.05, 0.02));
    let u = embed_a_eps(&model, &p, &xi, &emb).unwrap();
    let scale = p.eps.powf(p.b());
    assert!((u.get(&[2], 5) - scale * C64::new(0.3, -0.1)).norm() <= 1e-14);
    assert!((u.get(&[0], 1) - scale * C64::new(0.05, 0.02)).norm() <= 1e-14);
    assert!((u.get(&[1], 3) - C64::new(p.eps, 0.0)).norm() <= 1e-14);
}

#[test]
fn nonpositive_radicand_is_a_domain_error() {
    let model = model_one_site();
    let p = params(4, 6);
    let xi = [0.5];
    // constant action pushing ξ + ε^{2(b-1)}·3·y below zero
    let bad = -0.51 / (p.eps.powf(2.0 * (p.b() - 1.0)) * 3.0);
    let mut emb = TorusEmbedding::trivial(1, p.n_phi, p.n_x);
    emb.y[0].set_pair(&[0], 0, C64::new(bad, 0.0));
    match embed_a_eps(&model, &p, &xi, &emb) {
        Err(EmbedError::Radicand { site: 3, min }) => assert!(min <= 0.0),
        other => panic!("expected radicand error, got {other:?}"),
    }
    // and ξ itself must be positive
    assert!(matches!(
        embed_a_eps(&model, &p, &[-1.0], &emb),
        Err(EmbedError::XiSign { index: 0, .. })
    ));
}

#[test]
fn point_partials_match_finite_differences() {
    let model = Model::new(-1.0, 0.0, PolyDensity::empty(), vec![1, 4]).unwrap();
    let p = params(4, 6);
    let xi = [1.3, 0.8];
    let theta = [0.4, -1.1];
    let y = [0.2, -0.15];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut z = TorusField::zero(0, 0, 6);
    for j in [2i64, 3, 5, 6] {
        z.set_pair(&[], j, C64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)));
    }

    for i in 0..2 {
        let site = model.sites()[i];
        let cy = da_dy_coeff(&model, &p, &xi, &theta, &y, i).unwrap();
        let ct = da_dtheta_coeff(&model, &p, &xi, &theta, &y, i).unwrap();
        let delta = 1e-6;
        let fd = |plus: &TorusField, minus: &TorusField| {
            plus.sub(minus).scaled(1.0 / (2.0 * delta))
        };

        let mut yp = y;
        yp[i] += delta;
        let mut ym = y;
        ym[i] -= delta;
        let up = a_eps_point(&model, &p, &xi, &theta, &yp, &z).unwrap();
        let um = a_eps_point(&model, &p, &xi, &theta, &ym, &z).unwrap();
        let dy = fd(&up, &um);
        assert!((dy.get(&[], site) - cy).norm() <= 1e-8 * (1.0 + cy.norm()));

        let mut tp = theta;
        tp[i] += delta;
        let mut tm = theta;
        tm[i] -= delta;
        let up = a_eps_point(&model, &p, &xi, &tp, &y, &z).unwrap();
        let um = a_eps_point(&model, &p, &xi, &tm, &y, &z).unwrap();
        let dt = fd(&up, &um);
        assert!((dt.get(&[], site) - ct).norm() <= 1e-8 * (1.0 + ct.norm()));
    }
}

#[test]
fn embedding_validation_catches_leaks() {
    let model = model_one_site();
    let mut emb = TorusEmbedding::trivial(1, 4, 6);
    emb.validate(&model, 4, 6).unwrap();
    emb.z.set_pair(&[1], 3, C64::new(0.1, 0.0)); // tangential mode in z
    assert!(emb.validate(&model, 4, 6).is_err());

    let mut emb2 = TorusEmbedding::trivial(1, 4, 6);
    emb2.theta[0].set_pair(&[2], 0, C64::new(0.1, 0.05));
    emb2.theta[0].coeffs_mut()[0] += C64::new(0.0, 0.3); // break reality by hand
    assert!(emb2.validate(&model, 4, 6).is_err());
}

#[test]
fn embedding_survives_json_roundtrip() {
    let mut emb = TorusEmbedding::trivial(2, 3, 5);
    emb.theta[0].set_pair(&[1, 0], 0, C64::new(0.2, 0.1));
    emb.y[1].set_pair(&[0, 2], 0, C64::new(-0.05, 0.3));
    emb.z.set_pair(&[1, -1], 4, C64::new(0.7, -0.2));
    emb.zeta = vec![0.25, -0.5];
    let back = TorusEmbedding::from_json(&emb.to_json()).unwrap();
    assert_eq!(emb.zeta, back.zeta);
    assert!(emb.sub(&back).norm(0.0) <= 1e-15);
}
