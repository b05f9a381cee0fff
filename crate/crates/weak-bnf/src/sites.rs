use fourier_core::par;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SiteError {
    #[error("sites must be positive and distinct: {0:?}")]
    BadSites(Vec<i64>),
}

#[derive(Debug, Error)]
pub enum CubeError {
    #[error("index sum must vanish, got {0}")]
    NonzeroSum(i64),
}

/// Tangential sites: positive representatives j̄₁ < … < j̄_ν of the
/// symmetric set S = {±j̄_i}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteSet {
    plus: Vec<i64>,
}

impl SiteSet {
    pub fn new(mut plus: Vec<i64>) -> Result<Self, SiteError> {
        plus.sort_unstable();
        let ok = !plus.is_empty()
            && plus.iter().all(|&j| j >= 1)
            && plus.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(SiteError::BadSites(plus));
        }
        Ok(SiteSet { plus })
    }

    pub fn nu(&self) -> usize {
        self.plus.len()
    }

    pub fn plus(&self) -> &[i64] {
        &self.plus
    }

    /// S = {±j̄_i}, sorted.
    pub fn full(&self) -> Vec<i64> {
        let mut s: Vec<i64> = self.plus.iter().map(|&j| -j).collect();
        s.reverse();
        s.extend_from_slice(&self.plus);
        s
    }

    pub fn contains(&self, j: i64) -> bool {
        self.plus.binary_search(&j.abs()).is_ok() && j != 0
    }

    pub fn max(&self) -> i64 {
        *self.plus.last().unwrap()
    }

    /// Mode cutoff for the normal-form window: every generator quadruple has
    /// all indices strictly below this.
    pub fn cutoff(&self) -> i64 {
        3 * self.max() + 1
    }
}

/// j₁³+j₂³+j₃³+j₄³ = −3(j₁+j₂)(j₁+j₃)(j₂+j₃) whenever the indices sum to zero.
pub fn cube_identity(j1: i64, j2: i64, j3: i64, j4: i64) -> Result<i64, CubeError> {
    let s = j1 + j2 + j3 + j4;
    if s != 0 {
        return Err(CubeError::NonzeroSum(s));
    }
    let factored = -3 * (j1 + j2) * (j1 + j3) * (j2 + j3);
    let direct = j1.pow(3) + j2.pow(3) + j3.pow(3) + j4.pow(3);
    assert_eq!(factored, direct, "cube identity violated at ({j1},{j2},{j3},{j4})");
    Ok(factored)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Admissibility {
    Admissible,
    /// 2Σj̄²/(2ν−1) = j²+jk+k² with j,k outside S, j ≠ k.
    Violation { j: i64, k: i64 },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

/// Non-degeneracy of the site set: 2Σj̄²/(2ν−1) must avoid the quadratic form
/// j²+jk+k² over pairs outside S. `skip` (the x-independent-density variant)
/// accepts every site set. Since j²+jk+k² ≥ (j²+k²)/2, candidates satisfy
/// |j|,|k| ≤ √(2t)+1; for each j the form is quadratic in k, so k comes from
/// the discriminant 4t−3j² being a perfect square.
pub fn admissible(sites: &SiteSet, skip: bool) -> Admissibility {
    if skip {
        return Admissibility::Admissible;
    }
    let two_nu_m1 = 2 * sites.nu() as i64 - 1;
    let sum2: i64 = sites.plus().iter().map(|&j| j * j).sum();
    if (2 * sum2) % two_nu_m1 != 0 {
        return Admissibility::Admissible;
    }
    let t = 2 * sum2 / two_nu_m1;
    let jmax = ((2.0 * t as f64).sqrt().ceil() as i64) + 1;
    let hits = par::par_map_range((2 * jmax + 1) as usize, |idx| {
        let j = idx as i64 - jmax;
        let d = 4 * t - 3 * j * j;
        if d < 0 {
            return None;
        }
        let r = (d as u64).isqrt() as i64;
        if r * r != d {
            return None;
        }
        let mut best: Option<(i64, i64)> = None;
        for k in [(-j + r) / 2, (-j - r) / 2] {
            if (2 * k + j).pow(2) != d {
                continue; // parity mismatch
            }
            debug_assert_eq!(j * j + j * k + k * k, t);
            if j != k && !sites.contains(j) && !sites.contains(k) {
                best = match best {
                    Some(b) if b <= (j, k) => Some(b),
                    _ => Some((j, k)),
                };
            }
        }
        best
    });
    match hits.into_iter().flatten().min() {
        Some((j, k)) => Admissibility::Violation { j, k },
        None => Admissibility::Admissible,
    }
}
