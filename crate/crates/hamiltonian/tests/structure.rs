use fourier_core::{grid, C64, TorusField};
use hamiltonian::{
    mass, poisson_bracket, symplectic_form, DensitySpec, Model, Monomial, PolyDensity, Trig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_u(n_x: usize, seed: u64) -> TorusField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = TorusField::zero(0, 0, n_x);
    for j in 1..=n_x as i64 {
        let z = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        u.set_pair(&[], j, z);
    }
    u
}

#[test]
fn symplectic_form_is_antisymmetric() {
    for seed in 0..6 {
        let u = random_u(5, seed);
        let v = random_u(5, seed + 50);
        let a = symplectic_form(&u, &v);
        let b = symplectic_form(&v, &u);
        assert!((a + b).abs() <= 1e-13 * (1.0 + a.abs()));
        assert!(symplectic_form(&u, &u).abs() <= 1e-13);
    }
}

#[test]
fn symplectic_form_of_sin_cos_pair() {
    // Ω(2cos x, −2 sin x) = ∫ (2 sin x)(−2 sin x) dμ = −2
    let mut u = TorusField::zero(0, 0, 2);
    u.set_pair(&[], 1, C64::new(1.0, 0.0));
    let mut v = TorusField::zero(0, 0, 2);
    v.set_pair(&[], 1, C64::new(0.0, 1.0)); // −2 sin x
    let w = symplectic_form(&u, &v);
    assert!((w - (-2.0)).abs() <= 1e-14, "Omega = {w}");
}

#[test]
fn bracket_of_h_with_itself_vanishes() {
    let f = PolyDensity::new(vec![Monomial { c: 0.01, kind: Trig::Cos, m: 1, p: 5, q: 0 }])
        .unwrap();
    let model = Model::plain(1.0, f, vec![1]).unwrap();
    for seed in 0..4 {
        let u = random_u(4, seed);
        let g = |w: &TorusField| model.grad_h(w);
        let b = poisson_bracket(&g, &g, &u);
        assert!(b.abs() <= 1e-12, "{{H,H}} = {b}");
    }
}

#[test]
fn bracket_is_antisymmetric() {
    // F = ∫u³, ∇F = π₀(3u²); G = M, ∇G = 2u
    let grad_f = |w: &TorusField| {
        let box3 = grid::grid_for_degree(w.n_x(), 2).next_power_of_two().max(w.n_x());
        let wb = w.resize(0, box3).unwrap();
        grid::product(&[&wb, w]).scaled(3.0).pi0()
    };
    let grad_g = |w: &TorusField| w.scaled(2.0);
    for seed in 0..6 {
        let u = random_u(5, seed);
        let fg = poisson_bracket(&grad_f, &grad_g, &u);
        let gf = poisson_bracket(&grad_g, &grad_f, &u);
        assert!((fg + gf).abs() <= 1e-10 * (1.0 + fg.abs()), "{fg} vs {gf}");
    }
}

#[test]
fn bracket_satisfies_leibniz_rule() {
    // {FG, E} = F{G,E} + G{F,E} with F = ∫u³, G = M, E = H
    let model = Model::plain(1.0, PolyDensity::empty(), vec![1]).unwrap();
    let f_of = |w: &TorusField| {
        let wb = w.resize(0, grid::grid_for_degree(w.n_x(), 3)).unwrap();
        grid::product(&[&wb, w, w]).mean()
    };
    let grad_f = |w: &TorusField| {
        let wb = w.resize(0, grid::grid_for_degree(w.n_x(), 2)).unwrap();
        grid::product(&[&wb, w]).scaled(3.0).pi0()
    };
    let grad_g = |w: &TorusField| w.scaled(2.0);
    let grad_e = |w: &TorusField| model.grad_h(w);
    // ∇(FG) = F·∇G + G·∇F
    for seed in 0..6 {
        let u = random_u(5, seed);
        let (fv, gv) = (f_of(&u), mass(&u));
        let grad_fg = |w: &TorusField| {
            let mut out = grad_f(w).scaled(mass(w));
            let gg = grad_g(w).resize(0, out.n_x()).unwrap();
            out.axpy(f_of(w), &gg);
            out
        };
        let lhs = poisson_bracket(&grad_fg, &grad_e, &u);
        let rhs = fv * poisson_bracket(&grad_g, &grad_e, &u)
            + gv * poisson_bracket(&grad_f, &grad_e, &u);
        assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }
}

#[test]
fn mass_of_two_cos_is_two() {
    let mut u = TorusField::zero(0, 0, 2);
    u.set_pair(&[], 1, C64::new(1.0, 0.0));
    assert!((mass(&u) - 2.0).abs() <= 1e-15);
}

#[test]
fn density_rejects_low_order() {
    let r = PolyDensity::new(vec![Monomial { c: 1.0, kind: Trig::Const, m: 0, p: 2, q: 2 }]);
    assert!(r.is_err());
    let ok = PolyDensity::new(vec![Monomial { c: 1.0, kind: Trig::Const, m: 0, p: 2, q: 3 }]);
    assert!(ok.is_ok());
}

#[test]
fn density_rejects_bad_harmonic_and_coefficient() {
    assert!(PolyDensity::new(vec![Monomial { c: 1.0, kind: Trig::Cos, m: 0, p: 5, q: 0 }])
        .is_err());
    assert!(PolyDensity::new(vec![Monomial {
        c: f64::NAN,
        kind: Trig::Const,
        m: 0,
        p: 5,
        q: 0
    }])
    .is_err());
}

#[test]
fn model_rejects_bad_sign_lambda_sites() {
    assert!(Model::new(2.0, 0.0, PolyDensity::empty(), vec![1]).is_err());
    assert!(Model::new(1.0, 0.5, PolyDensity::empty(), vec![1]).is_err());
    assert!(Model::new(-1.0, 0.75, PolyDensity::empty(), vec![1]).is_err()); // λ must be 3ς/4
    assert!(Model::new(1.0, 0.0, PolyDensity::empty(), vec![0]).is_err());
    assert!(Model::new(1.0, 0.0, PolyDensity::empty(), vec![2, 2]).is_err());
    assert!(Model::new(1.0, 0.0, PolyDensity::empty(), vec![-3]).is_err());
    let m = Model::new(-1.0, -0.75, PolyDensity::empty(), vec![3, 1]).unwrap();
    assert_eq!(m.sites(), &[1, 3]);
    assert_eq!(m.sites_full(), vec![-3, -1, 1, 3]);
    assert_eq!(m.nu(), 2);
}

#[test]
fn density_spec_parses_config_entries() {
    let specs = vec![
        DensitySpec { c: 0.01, kind: "cos".into(), m: 2, p: 3, q: 2 },
        DensitySpec { c: 0.005, kind: "const".into(), m: 0, p: 5, q: 0 },
    ];
    let f = DensitySpec::parse_all(&specs).unwrap();
    assert_eq!(f.monomials().len(), 2);
    assert_eq!(f.monomials()[0].kind, Trig::Cos);
    assert_eq!(f.max_harmonic(), 2);
    assert_eq!(f.max_degree(), 5);

    let bad = vec![DensitySpec { c: 1.0, kind: "tan".into(), m: 1, p: 5, q: 0 }];
    assert!(DensitySpec::parse_all(&bad).is_err());
}

#[test]
fn derivative_densities_are_exact() {
    // f = c·u³u_x²: ∂_u f = 3c·u²u_x², ∂_{u_x} f = 2c·u³u_x
    let f = PolyDensity::new(vec![Monomial { c: 0.5, kind: Trig::Const, m: 0, p: 3, q: 2 }])
        .unwrap();
    let du = f.du();
    assert_eq!(du.monomials().len(), 1);
    assert_eq!(du.monomials()[0].c, 1.5);
    assert_eq!((du.monomials()[0].p, du.monomials()[0].q), (2, 2));
    let dux = f.dux();
    assert_eq!(dux.monomials()[0].c, 1.0);
    assert_eq!((dux.monomials()[0].p, dux.monomials()[0].q), (3, 1));
    // p = 0 term drops out of du
    let g = PolyDensity::new(vec![Monomial { c: 1.0, kind: Trig::Const, m: 0, p: 0, q: 5 }])
        .unwrap();
    assert!(g.du().is_empty());
    assert_eq!(g.dux().monomials()[0].c, 5.0);
}
