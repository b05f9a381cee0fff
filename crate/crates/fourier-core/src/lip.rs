//! Lipschitz-in-parameter norms over finite sample families.
//!
//! The continuum objects depend on the frequency vector ω; numerically we
//! hold a finite set of samples and replace the Lipschitz seminorm by the
//! max difference quotient over sample pairs. That is a lower bound on the
//! true seminorm — good enough for the monotone decay diagnostics it feeds.

use crate::decay::DecayOperator;
use crate::field::TorusField;

pub trait LipNorm {
    fn norm_s(&self, s: f64) -> f64;
    fn diff(&self, other: &Self) -> Self;
}

impl LipNorm for TorusField {
    fn norm_s(&self, s: f64) -> f64 {
        self.sobolev_norm(s)
    }
    fn diff(&self, other: &Self) -> Self {
        self.sub(other)
    }
}

impl LipNorm for DecayOperator {
    fn norm_s(&self, s: f64) -> f64 {
        self.decay_norm(s)
    }
    fn diff(&self, other: &Self) -> Self {
        self.sub(other)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LipError {
    #[error("parameter family needs at least {needed} samples, has {have}")]
    TooFewSamples { needed: usize, have: usize },
    #[error("duplicate parameter sample at index {0}")]
    DuplicateSample(usize),
    #[error("gamma must be positive, got {0}")]
    BadGamma(f64),
}

/// Objects sampled at finitely many parameter points ω ∈ R^ν.
pub struct ParamFamily<T> {
    gamma: f64,
    samples: Vec<(Vec<f64>, T)>,
}

fn omega_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl<T: LipNorm> ParamFamily<T> {
    pub fn new(gamma: f64, samples: Vec<(Vec<f64>, T)>) -> Result<Self, LipError> {
        if !(gamma > 0.0) {
            return Err(LipError::BadGamma(gamma));
        }
        if samples.is_empty() {
            return Err(LipError::TooFewSamples { needed: 1, have: 0 });
        }
        let dim = samples[0].0.len();
        for (i, (w, _)) in samples.iter().enumerate() {
            assert_eq!(w.len(), dim, "parameter dimension mismatch");
            for (wj, _) in samples.iter().take(i) {
                if omega_dist(w, wj) == 0.0 {
                    return Err(LipError::DuplicateSample(i));
                }
            }
        }
        Ok(ParamFamily { gamma, samples })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sup_norm(&self, s: f64) -> f64 {
        self.samples.iter().fold(0.0f64, |acc, (_, t)| acc.max(t.norm_s(s)))
    }

    /// Max difference quotient ‖T(ω)−T(ω')‖_s / |ω−ω'| over sample pairs.
    pub fn lip_seminorm(&self, s: f64) -> Result<f64, LipError> {
        if self.samples.len() < 2 {
            return Err(LipError::TooFewSamples { needed: 2, have: self.samples.len() });
        }
        let mut best = 0.0f64;
        for i in 0..self.samples.len() {
            for j in 0..i {
                let (wi, ti) = &self.samples[i];
                let (wj, tj) = &self.samples[j];
                let d = omega_dist(wi, wj);
                best = best.max(ti.diff(tj).norm_s(s) / d);
            }
        }
        Ok(best)
    }

    /// ‖·‖_s^{sup} + γ ‖·‖_s^{lip}; with one sample the Lipschitz part is 0.
    pub fn lip_gamma_norm(&self, s: f64) -> f64 {
        let lip = if self.samples.len() >= 2 { self.lip_seminorm(s).unwrap() } else { 0.0 };
        self.sup_norm(s) + self.gamma * lip
    }
}
