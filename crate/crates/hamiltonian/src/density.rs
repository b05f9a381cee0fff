//! Polynomial perturbation densities c·trig(mx)·u^p·u_x^q and their exact
//! symbolic derivatives.

use fourier_core::{grid, C64, TorusField};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Const,
    Cos,
    Sin,
}

#[derive(Clone, Copy, Debug)]
pub struct Monomial {
    pub c: f64,
    pub kind: Trig,
    pub m: i64,
    pub p: u32,
    pub q: u32,
}

#[derive(Debug, thiserror::Error)]
pub enum DensityError {
    #[error("monomial {0}: u^{1} u_x^{2} has order {3} < 5")]
    OrderTooLow(usize, u32, u32, u32),
    #[error("monomial {0}: coefficient {1} not finite")]
    BadCoefficient(usize, f64),
    #[error("monomial {0}: harmonic m must be ≥ 1 for cos/sin (got {1})")]
    BadHarmonic(usize, i64),
    #[error("unknown trig kind {0:?}")]
    BadKind(String),
}

#[derive(Clone, Debug, Default)]
pub struct PolyDensity {
    monomials: Vec<Monomial>,
}

impl PolyDensity {
    /// Perturbation density: every monomial must vanish to order five.
    pub fn new(monomials: Vec<Monomial>) -> Result<Self, DensityError> {
        for (i, mo) in monomials.iter().enumerate() {
            if mo.p + mo.q < 5 {
                return Err(DensityError::OrderTooLow(i, mo.p, mo.q, mo.p + mo.q));
            }
            if !mo.c.is_finite() {
                return Err(DensityError::BadCoefficient(i, mo.c));
            }
            if mo.kind != Trig::Const && mo.m < 1 {
                return Err(DensityError::BadHarmonic(i, mo.m));
            }
        }
        Ok(PolyDensity { monomials })
    }

    /// No order check — derivatives of valid densities land here.
    pub fn raw(monomials: Vec<Monomial>) -> Self {
        PolyDensity { monomials }
    }

    pub fn empty() -> Self {
        PolyDensity { monomials: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.iter().all(|m| m.c == 0.0)
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut d = self.clone();
        for m in &mut d.monomials {
            m.c *= a;
        }
        d
    }

    /// ∂f/∂u.
    pub fn du(&self) -> PolyDensity {
        PolyDensity {
            monomials: self
                .monomials
                .iter()
                .filter(|m| m.p > 0)
                .map(|m| Monomial { c: m.c * m.p as f64, p: m.p - 1, ..*m })
                .collect(),
        }
    }

    /// ∂f/∂u_x.
    pub fn dux(&self) -> PolyDensity {
        PolyDensity {
            monomials: self
                .monomials
                .iter()
                .filter(|m| m.q > 0)
                .map(|m| Monomial { c: m.c * m.q as f64, q: m.q - 1, ..*m })
                .collect(),
        }
    }

    pub fn max_harmonic(&self) -> i64 {
        self.monomials
            .iter()
            .map(|m| if m.kind == Trig::Const { 0 } else { m.m })
            .max()
            .unwrap_or(0)
    }

    pub fn max_degree(&self) -> u32 {
        self.monomials.iter().map(|m| m.p + m.q).max().unwrap_or(0)
    }

    fn trig_field(kind: Trig, m: i64, like: &TorusField) -> TorusField {
        let mut t = TorusField::zero(like.nu(), like.n_phi(), like.n_x());
        let l0 = vec![0i64; like.nu()];
        match kind {
            Trig::Const => {
                let idx = t.index_of(&l0, 0);
                t.coeffs_mut()[idx] = C64::new(1.0, 0.0);
            }
            Trig::Cos => t.set_pair(&l0, m, C64::new(0.5, 0.0)),
            Trig::Sin => t.set_pair(&l0, m, C64::new(0.0, -0.5)),
        }
        t
    }

    /// Evaluate f(x, w, w_x) as a field on w's box (alias-free inside it).
    pub fn eval_on(&self, w: &TorusField) -> TorusField {
        let wx = w.dx(1).expect("dx(1) is total");
        let mut acc = TorusField::zero(w.nu(), w.n_phi(), w.n_x());
        for mo in &self.monomials {
            if mo.c == 0.0 {
                continue;
            }
            assert!(
                mo.kind == Trig::Const || mo.m.unsigned_abs() as usize <= w.n_x(),
                "harmonic {} exceeds the x box {}",
                mo.m,
                w.n_x()
            );
            let trig = Self::trig_field(mo.kind, mo.m, w);
            let mut factors: Vec<&TorusField> = vec![&trig];
            for _ in 0..mo.p {
                factors.push(w);
            }
            for _ in 0..mo.q {
                factors.push(&wx);
            }
            let term = grid::product(&factors);
            acc.axpy(mo.c, &term);
        }
        acc
    }

    /// Exact ∫ f(x, w, w_x) dμ — quadrature on a grid alias-free for the
    /// full degree, no truncation in between.
    pub fn integral_on(&self, w: &TorusField) -> f64 {
        // one shared box wide enough for every trig harmonic
        let nx = (self.max_harmonic().unsigned_abs() as usize).max(w.n_x());
        let wr = w.resize(w.n_phi(), nx).expect("widening cannot fail");
        let wx = wr.dx(1).expect("dx(1) is total");
        let mut acc = 0.0;
        for mo in &self.monomials {
            if mo.c == 0.0 {
                continue;
            }
            let trig = Self::trig_field(mo.kind, mo.m, &wr);
            let mut factors: Vec<&TorusField> = vec![&trig];
            for _ in 0..mo.p {
                factors.push(&wr);
            }
            for _ in 0..mo.q {
                factors.push(&wx);
            }
            acc += mo.c * grid::integral_of_product(&factors);
        }
        acc
    }
}

/// Config-file form of one monomial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensitySpec {
    pub c: f64,
    pub kind: String,
    #[serde(default)]
    pub m: i64,
    pub p: u32,
    pub q: u32,
}

impl DensitySpec {
    pub fn parse_all(specs: &[DensitySpec]) -> Result<PolyDensity, DensityError> {
        let mut monomials = Vec::with_capacity(specs.len());
        for s in specs {
            let kind = match s.kind.as_str() {
                "const" => Trig::Const,
                "cos" => Trig::Cos,
                "sin" => Trig::Sin,
                other => return Err(DensityError::BadKind(other.to_string())),
            };
            monomials.push(Monomial { c: s.c, kind, m: s.m, p: s.p, q: s.q });
        }
        PolyDensity::new(monomials)
    }
}
