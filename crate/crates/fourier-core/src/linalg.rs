//! Dense complex linear algebra on `ndarray` storage.
//!
//! Everything here is written against row-major `Array2<C64>`. The matrices
//! that show up downstream are conjugation stages and truncated linearized
//! operators: dense, moderately sized (a few thousand rows), and needed in
//! exact arithmetic order for reproducibility. Factorizations are therefore
//! plain partial-pivot LU with a deterministic elimination order; parallelism
//! only splits the trailing-update rows, which does not reorder any sum.

use ndarray::{Array1, Array2};

use crate::par;
use crate::C64;

pub fn identity(n: usize) -> Array2<C64> {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        m[(i, i)] = C64::new(1.0, 0.0);
    }
    m
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Maximum absolute column sum.
pub fn one_norm(a: &Array2<C64>) -> f64 {
    let (r, c) = a.dim();
    let mut best = 0.0f64;
    for jc in 0..c {
        let mut s = 0.0;
        for ir in 0..r {
            s += a[(ir, jc)].norm();
        }
        best = best.max(s);
    }
    best
}

pub fn matvec(a: &Array2<C64>, x: &[C64]) -> Vec<C64> {
    let (r, c) = a.dim();
    assert_eq!(c, x.len());
    let sa = a.as_slice().expect("matvec: non-contiguous matrix");
    let mut y = vec![C64::new(0.0, 0.0); r];
    for ir in 0..r {
        let row = &sa[ir * c..(ir + 1) * c];
        let mut acc = C64::new(0.0, 0.0);
        for jc in 0..c {
            acc += row[jc] * x[jc];
        }
        y[ir] = acc;
    }
    y
}

fn matmul_rows(out: &mut [C64], rows: std::ops::Range<usize>, a: &[C64], b: &[C64], k: usize, n: usize) {
    // i-k-j kernel: the inner j loop streams rows of b.
    for (ri, i) in rows.enumerate() {
        let orow = &mut out[ri * n..(ri + 1) * n];
        let arow = &a[i * k..(i + 1) * k];
        for kk in 0..k {
            let av = arow[kk];
            if av.norm_sqr() == 0.0 {
                continue;
            }
            let brow = &b[kk * n..(kk + 1) * n];
            for jj in 0..n {
                orow[jj] += av * brow[jj];
            }
        }
    }
}

pub fn matmul_seq(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (m, k) = a.dim();
    let (k2, n) = b.dim();
    assert_eq!(k, k2, "matmul: inner dimensions differ");
    let sa = a.as_slice().expect("matmul: non-contiguous lhs");
    let sb = b.as_slice().expect("matmul: non-contiguous rhs");
    let mut out = vec![C64::new(0.0, 0.0); m * n];
    matmul_rows(&mut out, 0..m, sa, sb, k, n);
    Array2::from_shape_vec((m, n), out).unwrap()
}

/// Row-parallel product. Each output row is still accumulated in a single
/// fixed k-order, so the result is bitwise independent of the thread count.
pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (m, k) = a.dim();
    let (k2, n) = b.dim();
    assert_eq!(k, k2, "matmul: inner dimensions differ");
    if m * n * k < 64 * 64 * 64 {
        return matmul_seq(a, b);
    }
    let sa = a.as_slice().expect("matmul: non-contiguous lhs");
    let sb = b.as_slice().expect("matmul: non-contiguous rhs");
    let mut out = vec![C64::new(0.0, 0.0); m * n];
    let chunk = (m / (8 * par::threads().max(1))).max(1);
    par::par_chunks_mut(&mut out, chunk * n, |ci, slab| {
        let r0 = ci * chunk;
        let r1 = (r0 + slab.len() / n).min(m);
        matmul_rows(slab, r0..r1, sa, sb, k, n);
    });
    Array2::from_shape_vec((m, n), out).unwrap()
}

/// Partial-pivot LU of a square matrix; `piv[k]` is the row swapped into
/// position k at step k.
pub struct Lu {
    lu: Array2<C64>,
    piv: Vec<usize>,
}

#[derive(Debug, thiserror::Error)]
#[error("singular matrix: pivot {pivot:.3e} at column {col} (threshold {threshold:.3e})")]
pub struct SingularError {
    pub col: usize,
    pub pivot: f64,
    pub threshold: f64,
}

impl Lu {
    pub fn factor(a: &Array2<C64>) -> Result<Self, SingularError> {
        let (n, n2) = a.dim();
        assert_eq!(n, n2, "lu: matrix not square");
        let mut lu = a.clone();
        let mut piv = vec![0usize; n];
        let scale = max_abs(a).max(1.0);
        let thresh = scale * (n as f64) * f64::EPSILON;
        let s = lu.as_slice_mut().expect("lu: non-contiguous");
        for k in 0..n {
            // pivot search down column k
            let mut best = k;
            let mut bmag = s[k * n + k].norm();
            for r in (k + 1)..n {
                let m = s[r * n + k].norm();
                if m > bmag {
                    bmag = m;
                    best = r;
                }
            }
            if bmag <= thresh {
                return Err(SingularError { col: k, pivot: bmag, threshold: thresh });
            }
            piv[k] = best;
            if best != k {
                for c in 0..n {
                    s.swap(k * n + c, best * n + c);
                }
            }
            let inv = C64::new(1.0, 0.0) / s[k * n + k];
            for r in (k + 1)..n {
                let f = s[r * n + k] * inv;
                s[r * n + k] = f;
            }
            // trailing update, row-parallel for large systems
            let (head, tail) = s.split_at_mut((k + 1) * n);
            let prow = &head[k * n..k * n + n];
            let rows_left = n - k - 1;
            if rows_left * (n - k) > 16384 {
                par::par_chunks_mut(tail, n, |_, row| {
                    let f = row[k];
                    if f.norm_sqr() != 0.0 {
                        for c in (k + 1)..n {
                            row[c] -= f * prow[c];
                        }
                    }
                });
            } else {
                for rr in 0..rows_left {
                    let row = &mut tail[rr * n..(rr + 1) * n];
                    let f = row[k];
                    if f.norm_sqr() != 0.0 {
                        for c in (k + 1)..n {
                            row[c] -= f * prow[c];
                        }
                    }
                }
            }
        }
        Ok(Lu { lu, piv })
    }

    pub fn n(&self) -> usize {
        self.lu.dim().0
    }

    pub fn parts(&self) -> (&Array2<C64>, &[usize]) {
        (&self.lu, &self.piv)
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n();
        assert_eq!(b.len(), n);
        let s = self.lu.as_slice().unwrap();
        let mut x = b.to_vec();
        // full-row swaps during factorization leave L in the *final* row
        // order, so the whole permutation goes on first
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        for k in 0..n {
            let xk = x[k];
            if xk.norm_sqr() != 0.0 {
                for r in (k + 1)..n {
                    let f = s[r * n + k];
                    if f.norm_sqr() != 0.0 {
                        x[r] -= f * xk;
                    }
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for c in (k + 1)..n {
                acc -= s[k * n + c] * x[c];
            }
            x[k] = acc / s[k * n + k];
        }
        x
    }

    /// Solve A X = B column by column (columns run in parallel).
    pub fn solve_mat(&self, b: &Array2<C64>) -> Array2<C64> {
        let n = self.n();
        let (rb, cb) = b.dim();
        assert_eq!(rb, n);
        let cols: Vec<Vec<C64>> = par::par_map_range(cb, |jc| {
            let col: Vec<C64> = (0..n).map(|ir| b[(ir, jc)]).collect();
            self.solve_vec(&col)
        });
        let mut out = Array2::zeros((n, cb));
        for (jc, col) in cols.iter().enumerate() {
            for ir in 0..n {
                out[(ir, jc)] = col[ir];
            }
        }
        out
    }
}

/// Matrix exponential by scaling and squaring with a plain Taylor tail.
/// Tolerance is driven to round-off; intended for conjugation generators
/// whose norm is already small-ish, not for stiff dissipative systems.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let (n, n2) = a.dim();
    assert_eq!(n, n2, "expm: matrix not square");
    let nrm = one_norm(a);
    let s = if nrm > 0.25 {
        ((nrm / 0.25).log2().ceil() as i32).max(0) as u32
    } else {
        0
    };
    let scale = C64::new(1.0 / f64::powi(2.0, s as i32), 0.0);
    let b = a.mapv(|z| z * scale);
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=60u32 {
        term = matmul(&term, &b);
        term.mapv_inplace(|z| z / C64::new(k as f64, 0.0));
        let t = max_abs(&term);
        sum = &sum + &term;
        if t < 1e-17 * (1.0 + max_abs(&sum)) {
            break;
        }
    }
    for _ in 0..s {
        sum = matmul(&sum, &sum);
    }
    sum
}

pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    let (r, c) = a.dim();
    let mut out = Array2::zeros((c, r));
    for ir in 0..r {
        for jc in 0..c {
            out[(jc, ir)] = a[(ir, jc)].conj();
        }
    }
    out
}

pub fn hermitian_defect(a: &Array2<C64>) -> f64 {
    let (r, c) = a.dim();
    assert_eq!(r, c);
    let mut d = 0.0f64;
    for ir in 0..r {
        for jc in 0..c {
            d = d.max((a[(ir, jc)] - a[(jc, ir)].conj()).norm());
        }
    }
    d / (1.0 + max_abs(a))
}

pub fn frobenius(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Solve x' = M x from t=0 to t=1 with classical RK4 on a fixed step count
/// chosen from ‖M‖; used for flow maps of non-autonomous generators via
/// `steps`-uniform sampling by the caller.
pub fn rk4_flow<F: Fn(f64) -> Array2<C64>>(n: usize, steps: usize, m_of_t: F) -> Array2<C64> {
    let mut u = identity(n);
    let h = 1.0 / steps as f64;
    let hc = C64::new(h, 0.0);
    for k in 0..steps {
        let t = k as f64 * h;
        let m1 = m_of_t(t);
        let m2 = m_of_t(t + 0.5 * h);
        let m4 = m_of_t(t + h);
        let k1 = matmul(&m1, &u);
        let k2 = matmul(&m2, &(&u + &k1.mapv(|z| z * hc * 0.5)));
        let k3 = matmul(&m2, &(&u + &k2.mapv(|z| z * hc * 0.5)));
        let k4 = matmul(&m4, &(&u + &k3.mapv(|z| z * hc)));
        u = &u
            + &(&(&k1 + &k4) + &(&k2 + &k3).mapv(|z| z * 2.0))
                .mapv(|z| z * hc / 6.0);
    }
    u
}

pub fn col_to_vec(a: &Array2<C64>, jc: usize) -> Vec<C64> {
    (0..a.dim().0).map(|ir| a[(ir, jc)]).collect()
}

pub fn from_cols(n: usize, cols: Vec<Vec<C64>>) -> Array2<C64> {
    let m = cols.len();
    let mut out = Array2::zeros((n, m));
    for (jc, col) in cols.iter().enumerate() {
        assert_eq!(col.len(), n);
        for ir in 0..n {
            out[(ir, jc)] = col[ir];
        }
    }
    out
}

pub fn approx_eq_mat(a: &Array2<C64>, b: &Array2<C64>, tol: f64) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}

pub fn array1_norm(x: &Array1<C64>) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b.iter()).map(|(x, y)| x - y).collect()
}
