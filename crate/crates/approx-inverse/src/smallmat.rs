//! Dense ν×ν real kernels for the per-angle chart blocks. ν is tiny, so
//! everything is row-major slices and partial-pivot elimination; a pivot
//! below 1e-13 of the matrix scale is reported instead of divided by.

pub(crate) fn mat_vec(m: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..n {
        for k in 0..n {
            out[i] += m[i * n + k] * v[k];
        }
    }
    out
}

pub(crate) fn mat_t_vec(m: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..n {
        for k in 0..n {
            out[i] += m[k * n + i] * v[k];
        }
    }
    out
}

/// Solve m·x = rhs in place (rhs becomes x). Err carries the relative size
/// of the failing pivot.
pub(crate) fn solve_small(m: &mut [f64], rhs: &mut [f64], n: usize) -> Result<(), f64> {
    let scale = m.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1e-300);
    for col in 0..n {
        let mut piv = col;
        let mut pv = m[col * n + col].abs();
        for r in col + 1..n {
            let v = m[r * n + col].abs();
            if v > pv {
                piv = r;
                pv = v;
            }
        }
        if pv <= 1e-13 * scale {
            return Err(pv / scale);
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
            rhs.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r * n + c] -= f * m[col * n + c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    for col in (0..n).rev() {
        let mut v = rhs[col];
        for c in col + 1..n {
            v -= m[col * n + c] * rhs[c];
        }
        rhs[col] = v / m[col * n + col];
    }
    Ok(())
}

pub(crate) fn invert_small(m: &[f64], n: usize) -> Result<Vec<f64>, f64> {
    let mut out = vec![0.0; n * n];
    for c in 0..n {
        let mut work = m.to_vec();
        let mut rhs = vec![0.0; n];
        rhs[c] = 1.0;
        solve_small(&mut work, &mut rhs, n)?;
        for r in 0..n {
            out[r * n + c] = rhs[r];
        }
    }
    Ok(out)
}

/// Max column sum — the induced 1-norm.
pub(crate) fn one_norm_small(m: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|c| (0..n).map(|r| m[r * n + c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
