use fourier_core::{C64, TorusField};
use hamiltonian::{Model, Monomial, PolyDensity, Trig};
use weak_bnf::{quartic_part, verify_normal_form, BirkhoffGenerator, SiteSet};

fn quintic_density() -> PolyDensity {
    PolyDensity::new(vec![
        Monomial { c: 0.01, kind: Trig::Cos, m: 1, p: 5, q: 0 },
        Monomial { c: 0.004, kind: Trig::Const, m: 0, p: 3, q: 2 },
    ])
    .unwrap()
}

#[test]
fn single_site_tangential_quartic() {
    // S⁺ = {1}, z = 0, |u₁|² = ξ: quartic = (3ς/4)(2ξ² − 4ξ²) = −(3ς/2)ξ²
    for sign in [1.0, -1.0] {
        let sites = SiteSet::new(vec![1]).unwrap();
        let gen = BirkhoffGenerator::build(sites, sign);
        let model = Model::plain(sign, PolyDensity::empty(), vec![1]).unwrap();
        let mut v = TorusField::zero(0, 0, gen.cutoff() as usize);
        v.set_pair(&[], 1, C64::new(0.6, 0.3));
        let xi = v.get(&[], 1).norm_sqr();
        let q = quartic_part(&model, &gen, &v, 0.2).unwrap();
        let want = -1.5 * sign * xi * xi;
        assert!((q - want).abs() <= 1e-8 * (1.0 + want.abs()), "{q} vs {want}");
    }
}

#[test]
fn lambda_variant_drops_cross_sum() {
    // λ = 3ς/4 and z = 0: quartic = (3ς/4)Σ|u_j|⁴ = (3ς/2)ξ² — opposite sign
    // from the plain model on a single site.
    let sign = 1.0;
    let sites = SiteSet::new(vec![1]).unwrap();
    let gen = BirkhoffGenerator::build(sites, sign);
    let model = Model::lambda_variant(sign, PolyDensity::empty(), vec![1]).unwrap();
    let mut v = TorusField::zero(0, 0, gen.cutoff() as usize);
    v.set_pair(&[], 1, C64::new(0.5, -0.4));
    let xi = v.get(&[], 1).norm_sqr();
    let q = quartic_part(&model, &gen, &v, 0.2).unwrap();
    let want = 1.5 * xi * xi;
    assert!((q - want).abs() <= 1e-8 * (1.0 + want.abs()), "{q} vs {want}");
}

#[test]
fn z_only_sector_is_untouched() {
    // v = 0: quartic = −(ς/4)∫z⁴
    let sign = -1.0;
    let sites = SiteSet::new(vec![1]).unwrap();
    let gen = BirkhoffGenerator::build(sites.clone(), sign);
    let model = Model::plain(sign, PolyDensity::empty(), vec![1]).unwrap();
    let mut z = TorusField::zero(0, 0, gen.cutoff() as usize);
    z.set_pair(&[], 2, C64::new(0.4, 0.2));
    z.set_pair(&[], 3, C64::new(-0.3, 0.5));
    let q = quartic_part(&model, &gen, &z, 0.2).unwrap();
    let want = -0.25 * sign * fourier_core::grid::integral_of_product(&[&z, &z, &z, &z]);
    assert!((q - want).abs() <= 1e-8 * (1.0 + want.abs()), "{q} vs {want}");
}

#[test]
fn full_report_single_site() {
    let sites = SiteSet::new(vec![1]).unwrap();
    let gen = BirkhoffGenerator::build(sites, 1.0);
    let model = Model::plain(1.0, quintic_density(), vec![1]).unwrap();
    let amps = [0.1, 0.075, 0.05, 0.035];
    let rep = verify_normal_form(&model, &gen, &amps, 20, 42).unwrap();
    assert!(rep.quartic_rel_err <= 1e-6, "quartic rel err {:.3e}", rep.quartic_rel_err);
    assert!(rep.v4_rel_err <= 1e-6, "v4 rel err {:.3e}", rep.v4_rel_err);
    assert!(rep.v3z_max <= 1e-8, "v3z {:.3e}", rep.v3z_max);
    assert!(rep.bracket_rel_err <= 1e-6, "bracket rel err {:.3e}", rep.bracket_rel_err);
    assert!(rep.residual_slope >= 4.9, "residual slope {:.3}", rep.residual_slope);
    assert!(rep.symplectic_defect <= 1e-9, "symplectic defect {:.3e}", rep.symplectic_defect);
    assert!(rep.admissible);
    // report serializes for the CLI
    let txt = serde_json::to_string(&rep).unwrap();
    assert!(txt.contains("residual_slope"));
}

#[test]
fn full_report_two_sites_opposite_sign() {
    let sites = SiteSet::new(vec![1, 2]).unwrap();
    let gen = BirkhoffGenerator::build(sites, -1.0);
    let model = Model::plain(-1.0, quintic_density(), vec![1, 2]).unwrap();
    let amps = [0.1, 0.075, 0.05, 0.035];
    let rep = verify_normal_form(&model, &gen, &amps, 8, 7).unwrap();
    assert!(rep.quartic_rel_err <= 1e-6, "quartic rel err {:.3e}", rep.quartic_rel_err);
    assert!(rep.v3z_max <= 1e-8, "v3z {:.3e}", rep.v3z_max);
    assert!(rep.residual_slope >= 4.9, "residual slope {:.3}", rep.residual_slope);
}

#[test]
fn resonant_site_sum_identity() {
    // Σ over S-quadruples with zero index and cube sums of u_{j₁}…u_{j₄}
    // equals 3M(v)² − 3Σ_{j∈S}|u_j|⁴.
    let sites = SiteSet::new(vec![1, 3, 4]).unwrap();
    let full = sites.full();
    let mut v = TorusField::zero(0, 0, 5);
    v.set_pair(&[], 1, C64::new(0.3, -0.2));
    v.set_pair(&[], 3, C64::new(-0.1, 0.45));
    v.set_pair(&[], 4, C64::new(0.2, 0.1));
    let mut acc = C64::new(0.0, 0.0);
    for &j1 in &full {
        for &j2 in &full {
            for &j3 in &full {
                let j4 = -(j1 + j2 + j3);
                if !full.contains(&j4) {
                    continue;
                }
                if j1.pow(3) + j2.pow(3) + j3.pow(3) + j4.pow(3) != 0 {
                    continue;
                }
                acc += v.get(&[], j1) * v.get(&[], j2) * v.get(&[], j3) * v.get(&[], j4);
            }
        }
    }
    let m: f64 = full.iter().map(|&j| v.get(&[], j).norm_sqr()).sum();
    let p4: f64 = full.iter().map(|&j| v.get(&[], j).norm_sqr().powi(2)).sum();
    let want = 3.0 * m * m - 3.0 * p4;
    assert!(acc.im.abs() <= 1e-14);
    assert!((acc.re - want).abs() <= 1e-12 * (1.0 + want.abs()), "{} vs {want}", acc.re);
}
