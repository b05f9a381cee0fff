use hamiltonian::Model;

/// Unperturbed tangential frequencies ω̄_i = j̄_i³.
pub fn omega_bar(model: &Model) -> Vec<f64> {
    model.sites().iter().map(|&j| (j * j * j) as f64).collect()
}

/// Frequency-to-amplitude matrix 𝔸 (row-major ν×ν): α(ξ) = ω̄ + ε²𝔸ξ.
/// Plain model: 𝔸 = 3ς D_S (I − 2U) with U the all-ones matrix; the
/// x-independent variant keeps only the diagonal 3ς D_S.
pub fn twist_matrix(model: &Model) -> Vec<f64> {
    let nu = model.nu();
    let sgn = model.sign();
    let diagonal_only = model.lambda() != 0.0;
    let mut m = vec![0.0; nu * nu];
    for (i, &ji) in model.sites().iter().enumerate() {
        for k in 0..nu {
            let delta = if i == k { 1.0 } else { 0.0 };
            m[i * nu + k] = if diagonal_only {
                3.0 * sgn * ji as f64 * delta
            } else {
                3.0 * sgn * ji as f64 * (delta - 2.0)
            };
        }
    }
    m
}

/// Closed-form inverse of the twist matrix: (I − 2U)⁻¹ = I − 2U/(2ν−1), so
/// 𝔸⁻¹ = (3ς)⁻¹ (I − 2U/(2ν−1)) D_S⁻¹.
pub fn twist_inverse(model: &Model) -> Vec<f64> {
    let nu = model.nu();
    let sgn = model.sign();
    let diagonal_only = model.lambda() != 0.0;
    let mut m = vec![0.0; nu * nu];
    for i in 0..nu {
        for (k, &jk) in model.sites().iter().enumerate() {
            let delta = if i == k { 1.0 } else { 0.0 };
            m[i * nu + k] = if diagonal_only {
                delta / (3.0 * sgn * jk as f64)
            } else {
                (delta - 2.0 / (2.0 * nu as f64 - 1.0)) / (3.0 * sgn * jk as f64)
            };
        }
    }
    m
}

fn apply(m: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    assert_eq!(m.len(), n * n);
    (0..n).map(|i| (0..n).map(|k| m[i * n + k] * v[k]).sum()).collect()
}

/// Tangential frequency vector α(ξ) = ω̄ + ε²𝔸ξ of an amplitude vector.
pub fn freq_amp(model: &Model, eps: f64, xi: &[f64]) -> Vec<f64> {
    assert_eq!(xi.len(), model.nu());
    let a_xi = apply(&twist_matrix(model), xi);
    omega_bar(model)
        .iter()
        .zip(&a_xi)
        .map(|(w, d)| w + eps * eps * d)
        .collect()
}

/// Amplitudes selected by a frequency: ξ(ω) = ε⁻²𝔸⁻¹(ω − ω̄).
pub fn xi_of_omega(model: &Model, eps: f64, omega: &[f64]) -> Vec<f64> {
    assert_eq!(omega.len(), model.nu());
    let d: Vec<f64> = omega
        .iter()
        .zip(omega_bar(model))
        .map(|(w, wb)| w - wb)
        .collect();
    apply(&twist_inverse(model), &d)
        .into_iter()
        .map(|x| x / (eps * eps))
        .collect()
}
