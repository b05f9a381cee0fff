use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("eps must lie in (0,1), got {0}")]
    Eps(f64),
    #[error("a must lie strictly inside (0, 1/6), got {0}")]
    Exponent(f64),
    #[error("tau = {tau} too small for {nu} frequencies (need tau ≥ ν + 2)")]
    Tau { tau: f64, nu: usize },
    #[error("angle/space box must be nonempty, got ({n_phi}, {n_x})")]
    Box { n_phi: usize, n_x: usize },
}

/// Scaling and truncation parameters of the embedded-torus problem. The
/// amplitude `eps` and the exponent `a` fix the rescaling power b = 1 + a/2
/// and the small-divisor size γ = ε^{2+a} = ε^{2b}; `tau` is the diophantine
/// exponent; (n_phi, n_x) is the Fourier box all embeddings live on.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Params {
    pub eps: f64,
    pub a: f64,
    pub tau: f64,
    pub n_phi: usize,
    pub n_x: usize,
}

impl Params {
    pub fn new(eps: f64, a: f64, tau: f64, n_phi: usize, n_x: usize, nu: usize) -> Result<Self, ParamsError> {
        let p = Params { eps, a, tau, n_phi, n_x };
        p.validate(nu)?;
        Ok(p)
    }

    pub fn validate(&self, nu: usize) -> Result<(), ParamsError> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(ParamsError::Eps(self.eps));
        }
        if !(self.a > 0.0 && self.a < 1.0 / 6.0) {
            return Err(ParamsError::Exponent(self.a));
        }
        if self.tau < (nu + 2) as f64 {
            return Err(ParamsError::Tau { tau: self.tau, nu });
        }
        if self.n_phi == 0 || self.n_x == 0 {
            return Err(ParamsError::Box { n_phi: self.n_phi, n_x: self.n_x });
        }
        Ok(())
    }

    pub fn b(&self) -> f64 {
        1.0 + 0.5 * self.a
    }

    /// γ = ε^{2+a}; the same number as ε^{2b}.
    pub fn gamma(&self) -> f64 {
        self.eps.powf(2.0 + self.a)
    }
}
