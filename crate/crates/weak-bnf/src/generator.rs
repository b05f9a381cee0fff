use crate::sites::{cube_identity, SiteSet};
use fourier_core::C64;
use std::collections::BTreeMap;

/// Quartic generator F = Σ F_{j₁j₂j₃j₄} u_{j₁}u_{j₂}u_{j₃}u_{j₄} whose time-1
/// flow removes the quartic monomials with exactly one index off-site and
/// normalizes the on-site ones. Coefficients are iς/(4Σjᵢ³) on quadruples
/// with zero index sum, nonzero cube sum, and at least three indices in S.
#[derive(Debug, Clone)]
pub struct BirkhoffGenerator {
    sites: SiteSet,
    sign: f64,
    /// all ordered quadruples of the support, with their (permutation-symmetric) coefficient
    coeffs: BTreeMap<[i64; 4], C64>,
    /// flow right-hand side, grouped by output mode:
    /// u̇_j = Σ c · u_a u_b u_c over the stored (a,b,c,c̃) with c̃ = 4ij·F_{(−j)abc}
    per_j: BTreeMap<i64, Vec<([i64; 3], C64)>>,
}

impl BirkhoffGenerator {
    pub fn build(sites: SiteSet, sign: f64) -> Self {
        assert!(sign == 1.0 || sign == -1.0);
        let full = sites.full();
        let mut coeffs: BTreeMap<[i64; 4], C64> = BTreeMap::new();
        for &s1 in &full {
            for &s2 in &full {
                for &s3 in &full {
                    let j4 = -(s1 + s2 + s3);
                    if j4 == 0 {
                        continue;
                    }
                    for p in 0..4 {
                        let mut q = [j4; 4];
                        let mut others = [s1, s2, s3].into_iter();
                        for (slot, v) in q.iter_mut().enumerate() {
                            if slot != p {
                                *v = others.next().unwrap();
                            }
                        }
                        let cube = cube_identity(q[0], q[1], q[2], q[3]).unwrap();
                        if cube == 0 {
                            continue;
                        }
                        let f = C64::new(0.0, sign / (4.0 * cube as f64));
                        coeffs.insert(q, f);
                    }
                }
            }
        }
        let mut per_j: BTreeMap<i64, Vec<([i64; 3], C64)>> = BTreeMap::new();
        for (q, &f) in &coeffs {
            let j = -q[0];
            let c = C64::new(0.0, 4.0 * j as f64) * f;
            per_j.entry(j).or_default().push(([q[1], q[2], q[3]], c));
        }
        BirkhoffGenerator { sites, sign, coeffs, per_j }
    }

    pub fn sites(&self) -> &SiteSet {
        &self.sites
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn cutoff(&self) -> i64 {
        self.sites.cutoff()
    }

    /// F coefficient of an ordered quadruple (zero off the support).
    pub fn coeff(&self, q: [i64; 4]) -> C64 {
        self.coeffs.get(&q).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn support(&self) -> &BTreeMap<[i64; 4], C64> {
        &self.coeffs
    }

    /// F evaluated at a mode vector indexed by j + cutoff.
    pub fn eval(&self, y: &[C64]) -> C64 {
        let c = self.cutoff();
        let mut acc = C64::new(0.0, 0.0);
        for (q, &f) in &self.coeffs {
            acc += f
                * y[(q[0] + c) as usize]
                * y[(q[1] + c) as usize]
                * y[(q[2] + c) as usize]
                * y[(q[3] + c) as usize];
        }
        acc
    }

    /// X_F at a mode vector: out_j = 4ij Σ F_{(−j)abc} y_a y_b y_c.
    pub(crate) fn vector_field(&self, y: &[C64], out: &mut [C64]) {
        let c = self.cutoff();
        out.fill(C64::new(0.0, 0.0));
        for (&j, terms) in &self.per_j {
            let mut acc = C64::new(0.0, 0.0);
            for &([a, b, d], coef) in terms {
                acc += coef * y[(a + c) as usize] * y[(b + c) as usize] * y[(d + c) as usize];
            }
            out[(j + c) as usize] = acc;
            debug_assert!(
                self.sites.contains(j) || j.abs() <= 3 * self.sites.max(),
                "flow leaks outside the window"
            );
        }
    }

    /// Row-major Jacobian ∂(X_F)_j/∂u_q of the window field, every window
    /// coordinate treated as an independent complex variable (the cubic field
    /// is holomorphic in them, so this restricts to the real Jacobian on the
    /// reality subspace).
    pub(crate) fn vector_field_jacobian(&self, y: &[C64], a: &mut [C64]) {
        let c = self.cutoff();
        let d = (2 * c + 1) as usize;
        debug_assert_eq!(y.len(), d);
        debug_assert_eq!(a.len(), d * d);
        a.fill(C64::new(0.0, 0.0));
        for (&j, terms) in &self.per_j {
            let row = (j + c) as usize * d;
            for &([p, q, r], coef) in terms {
                let (ip, iq, ir) = ((p + c) as usize, (q + c) as usize, (r + c) as usize);
                a[row + ip] += coef * y[iq] * y[ir];
                a[row + iq] += coef * y[ip] * y[ir];
                a[row + ir] += coef * y[ip] * y[iq];
            }
        }
    }

    /// {H₂, F}(u) over a mode vector, via ∂_{u_j}F position-by-position:
    /// −Σ_q 4i q₁³ F_q y_{q₁}y_{q₂}y_{q₃}y_{q₄}. Imaginary part cancels by
    /// reality of the coefficients.
    pub fn bracket_h2(&self, y: &[C64]) -> f64 {
        let c = self.cutoff();
        let mut acc = C64::new(0.0, 0.0);
        for (q, &f) in &self.coeffs {
            let cube = (q[0] as f64).powi(3);
            let prod = y[(q[0] + c) as usize]
                * y[(q[1] + c) as usize]
                * y[(q[2] + c) as usize]
                * y[(q[3] + c) as usize];
            acc += C64::new(0.0, -4.0 * cube) * f * prod;
        }
        debug_assert!(acc.im.abs() <= 1e-10 * (1.0 + acc.re.abs()));
        acc.re
    }
}
