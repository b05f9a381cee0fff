//! Dense operator representation on the product mode lattice.
//!
//! A `ModeSet` flattens the pairs (l, j) with |l_i| ≤ n_phi and j drawn from
//! an explicit list (typically the normal directions: j ∉ S, j ≠ 0) into one
//! index. A `LatticeOp` is a dense matrix over that index — the working form
//! for conjugation stages whose matrix elements genuinely depend on (l, l')
//! and not only on l − l'.
//!
//! Row/column order is l-major, then position in the sorted j list, so a
//! Töplitz-in-l operator expands into a block-banded matrix.

use ndarray::Array2;

use crate::decay::DecayOperator;
use crate::field::TorusField;
use crate::linalg;
use crate::par;
use crate::{bracket, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet {
    nu: usize,
    n_phi: usize,
    n_x: usize,
    js: Vec<i64>,
}

impl ModeSet {
    pub fn new(nu: usize, n_phi: usize, n_x: usize, mut js: Vec<i64>) -> Self {
        js.sort_unstable();
        js.dedup();
        assert!(!js.is_empty(), "ModeSet: empty j list");
        assert!(
            js.iter().all(|&j| j.unsigned_abs() as usize <= n_x),
            "ModeSet: j outside the x box"
        );
        ModeSet { nu, n_phi, n_x, js }
    }

    /// All j with 0 < |j| ≤ n_x and j ∉ s_full: the normal directions.
    pub fn normal(nu: usize, n_phi: usize, n_x: usize, s_full: &[i64]) -> Self {
        let js: Vec<i64> = (-(n_x as i64)..=n_x as i64)
            .filter(|&j| j != 0 && !s_full.contains(&j))
            .collect();
        Self::new(nu, n_phi, n_x, js)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }
    pub fn n_phi(&self) -> usize {
        self.n_phi
    }
    pub fn n_x(&self) -> usize {
        self.n_x
    }
    pub fn js(&self) -> &[i64] {
        &self.js
    }

    pub fn l_count(&self) -> usize {
        (2 * self.n_phi + 1).pow(self.nu as u32)
    }

    pub fn dim(&self) -> usize {
        self.l_count() * self.js.len()
    }

    pub fn j_index(&self, j: i64) -> Option<usize> {
        self.js.binary_search(&j).ok()
    }

    pub fn l_flat(&self, l: &[i64]) -> Option<usize> {
        assert_eq!(l.len(), self.nu);
        let w = 2 * self.n_phi + 1;
        let mut f = 0usize;
        for &li in l {
            if li.unsigned_abs() as usize > self.n_phi {
                return None;
            }
            f = f * w + (li + self.n_phi as i64) as usize;
        }
        Some(f)
    }

    pub fn flat(&self, l: &[i64], j: i64) -> Option<usize> {
        let jf = self.j_index(j)?;
        Some(self.l_flat(l)? * self.js.len() + jf)
    }

    /// Inverse of `flat`; fills `l` and returns j.
    pub fn decode(&self, idx: usize, l: &mut [i64]) -> i64 {
        assert_eq!(l.len(), self.nu);
        let nj = self.js.len();
        let j = self.js[idx % nj];
        let mut f = idx / nj;
        let w = 2 * self.n_phi + 1;
        for i in (0..self.nu).rev() {
            l[i] = (f % w) as i64 - self.n_phi as i64;
            f /= w;
        }
        j
    }

    /// Gather a field's coefficients on this lattice (modes off the j list
    /// are dropped — callers project first when that matters).
    pub fn gather(&self, u: &TorusField) -> Vec<C64> {
        assert_eq!(u.nu(), self.nu);
        assert_eq!(u.n_phi(), self.n_phi);
        assert_eq!(u.n_x(), self.n_x);
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        let mut l = vec![0i64; self.nu];
        for idx in 0..self.dim() {
            let j = self.decode(idx, &mut l);
            v[idx] = u.get(&l, j);
        }
        v
    }

    pub fn scatter(&self, v: &[C64]) -> TorusField {
        assert_eq!(v.len(), self.dim());
        let mut u = TorusField::zero(self.nu, self.n_phi, self.n_x);
        let mut l = vec![0i64; self.nu];
        for idx in 0..self.dim() {
            let j = self.decode(idx, &mut l);
            let fi = u.index_of(&l, j);
            u.coeffs_mut()[fi] = v[idx];
        }
        u
    }

    /// Basis field for lattice index `idx`: one coefficient set to 1.
    /// Complex probe — reality is *not* enforced on it.
    pub fn basis_field(&self, idx: usize) -> TorusField {
        let mut u = TorusField::zero(self.nu, self.n_phi, self.n_x);
        let mut l = vec![0i64; self.nu];
        let j = self.decode(idx, &mut l);
        let fi = u.index_of(&l, j);
        u.coeffs_mut()[fi] = C64::new(1.0, 0.0);
        u
    }

    /// Sobolev weight of lattice index `idx`.
    pub fn weight(&self, idx: usize, s: f64) -> f64 {
        let mut l = vec![0i64; self.nu];
        let j = self.decode(idx, &mut l);
        bracket(&l, j).powf(s)
    }
}

#[derive(Clone)]
pub struct LatticeOp {
    modes: ModeSet,
    m: Array2<C64>,
}

impl LatticeOp {
    pub fn new(modes: ModeSet, m: Array2<C64>) -> Self {
        assert_eq!(m.dim(), (modes.dim(), modes.dim()));
        LatticeOp { modes, m }
    }

    pub fn zero(modes: ModeSet) -> Self {
        let d = modes.dim();
        LatticeOp { modes, m: Array2::zeros((d, d)) }
    }

    pub fn identity(modes: ModeSet) -> Self {
        let d = modes.dim();
        LatticeOp { modes, m: linalg::identity(d) }
    }

    pub fn diag(modes: ModeSet, f: impl Fn(&[i64], i64) -> C64) -> Self {
        let d = modes.dim();
        let mut m = Array2::zeros((d, d));
        let mut l = vec![0i64; modes.nu()];
        for idx in 0..d {
            let j = modes.decode(idx, &mut l);
            m[(idx, idx)] = f(&l, j);
        }
        LatticeOp { modes, m }
    }

    /// Assemble the matrix of a complex-linear map by probing every basis
    /// column. `f` must be linear over C; anything built from convolutions
    /// and derivatives is, anything that conjugates coefficients is not.
    pub fn from_apply(modes: &ModeSet, f: impl Fn(&TorusField) -> TorusField + Sync) -> Self {
        let d = modes.dim();
        let cols: Vec<Vec<C64>> = par::par_map_range(d, |c| {
            let probe = modes.basis_field(c);
            let out = f(&probe);
            modes.gather(&out)
        });
        LatticeOp { modes: modes.clone(), m: linalg::from_cols(d, cols) }
    }

    /// Expand a Töplitz-in-l operator onto the lattice.
    pub fn from_decay(op: &DecayOperator, modes: &ModeSet) -> Self {
        let d = modes.dim();
        let mut m = Array2::zeros((d, d));
        let mut lr = vec![0i64; modes.nu()];
        let mut lc = vec![0i64; modes.nu()];
        let mut dl = vec![0i64; modes.nu()];
        for r in 0..d {
            let jr = modes.decode(r, &mut lr);
            for c in 0..d {
                let jc = modes.decode(c, &mut lc);
                for i in 0..modes.nu() {
                    dl[i] = lr[i] - lc[i];
                }
                let v = op.get(&dl, jr, jc);
                if v.norm() > 0.0 {
                    m[(r, c)] = v;
                }
            }
        }
        LatticeOp { modes: modes.clone(), m }
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }
    pub fn mat(&self) -> &Array2<C64> {
        &self.m
    }
    pub fn mat_mut(&mut self) -> &mut Array2<C64> {
        &mut self.m
    }
    pub fn into_mat(self) -> Array2<C64> {
        self.m
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        linalg::matvec(&self.m, v)
    }

    pub fn apply_field(&self, u: &TorusField) -> TorusField {
        let v = self.modes.gather(u);
        self.modes.scatter(&self.apply(&v))
    }

    pub fn compose(&self, other: &LatticeOp) -> LatticeOp {
        assert_eq!(self.modes, other.modes);
        LatticeOp { modes: self.modes.clone(), m: linalg::matmul(&self.m, &other.m) }
    }

    pub fn add(&self, other: &LatticeOp) -> LatticeOp {
        assert_eq!(self.modes, other.modes);
        LatticeOp { modes: self.modes.clone(), m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &LatticeOp) -> LatticeOp {
        assert_eq!(self.modes, other.modes);
        LatticeOp { modes: self.modes.clone(), m: &self.m - &other.m }
    }

    pub fn scaled(&self, z: C64) -> LatticeOp {
        LatticeOp { modes: self.modes.clone(), m: self.m.mapv(|w| w * z) }
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.m)
    }

    /// Largest |entry| off the (l,j)-diagonal.
    pub fn off_diag_max(&self) -> f64 {
        let d = self.modes.dim();
        let mut best = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                if r != c {
                    best = best.max(self.m[(r, c)].norm());
                }
            }
        }
        best
    }

    pub fn diag_entries(&self) -> Vec<C64> {
        (0..self.modes.dim()).map(|i| self.m[(i, i)]).collect()
    }

    /// s-decay norm: bucket entries by (l−l', j−j'), take the sup on each
    /// diagonal, then the weighted l² sum over diagonals.
    pub fn decay_norm(&self, s: f64) -> f64 {
        let nu = self.modes.nu();
        let np = self.modes.n_phi();
        let w = 4 * np + 1; // dl range is [−2n_phi, 2n_phi]
        let njd = 2 * self.modes.n_x() + 1; // |dj| ≤ 2 n_x covers the j list span
        let wjd = 2 * njd + 1;
        let mut sup = vec![0.0f64; w.pow(nu as u32) * wjd];
        let d = self.modes.dim();
        let mut lr = vec![0i64; nu];
        let mut lc = vec![0i64; nu];
        for r in 0..d {
            let jr = self.modes.decode(r, &mut lr);
            for c in 0..d {
                let v = self.m[(r, c)].norm();
                if v == 0.0 {
                    continue;
                }
                let jc = self.modes.decode(c, &mut lc);
                let mut f = 0usize;
                for i in 0..nu {
                    f = f * w + (lr[i] - lc[i] + 2 * np as i64) as usize;
                }
                let dj = (jr - jc + njd as i64) as usize;
                let b = f * wjd + dj;
                if v > sup[b] {
                    sup[b] = v;
                }
            }
        }
        let mut total = 0.0f64;
        let mut dl = vec![0i64; nu];
        for (b, &v) in sup.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let dj = (b % wjd) as i64 - njd as i64;
            let mut f = b / wjd;
            for i in (0..nu).rev() {
                dl[i] = (f % w) as i64 - 2 * np as i64;
                f /= w;
            }
            total += bracket(&dl, dj).powf(2.0 * s) * v * v;
        }
        total.sqrt()
    }

    pub fn dagger(&self) -> LatticeOp {
        LatticeOp { modes: self.modes.clone(), m: linalg::dagger(&self.m) }
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.m)
    }

    /// How far the operator sits from the class {𝒟_ω + ∂_x·(Hermitian)}.
    /// Factor out ∂_x row-wise, subtract the transport diagonal, and measure
    /// the Hermitian defect of what is left. Requires 0 ∉ j list.
    pub fn hamiltonian_defect(&self, omega: &[f64]) -> f64 {
        assert_eq!(omega.len(), self.modes.nu());
        let d = self.modes.dim();
        let mut g = Array2::<C64>::zeros((d, d));
        let mut lr = vec![0i64; self.modes.nu()];
        for r in 0..d {
            let jr = self.modes.decode(r, &mut lr);
            assert!(jr != 0, "hamiltonian_defect: j = 0 mode in lattice");
            let inv = C64::new(0.0, 1.0) * (jr as f64); // row factor is i j
            for c in 0..d {
                g[(r, c)] = self.m[(r, c)] / inv;
            }
            let wl: f64 = omega.iter().zip(lr.iter()).map(|(o, &li)| o * li as f64).sum();
            g[(r, r)] -= C64::new(wl / jr as f64, 0.0);
        }
        let mut defect = 0.0f64;
        for r in 0..d {
            for c in 0..=r {
                defect = defect.max((g[(r, c)] - g[(c, r)].conj()).norm());
            }
        }
        defect / (1.0 + linalg::max_abs(&g))
    }

    /// Reality structure: L real (maps real fields to real fields) iff
    /// L_{(l,j),(l',j')} = conj(L_{(−l,−j),(−l',−j')}).
    pub fn reality_defect(&self) -> f64 {
        let d = self.modes.dim();
        let mut lr = vec![0i64; self.modes.nu()];
        let mut lc = vec![0i64; self.modes.nu()];
        let mut lrm = vec![0i64; self.modes.nu()];
        let mut worst = 0.0f64;
        for r in 0..d {
            let jr = self.modes.decode(r, &mut lr);
            for i in 0..self.modes.nu() {
                lrm[i] = -lr[i];
            }
            let rm = match self.modes.flat(&lrm, -jr) {
                Some(x) => x,
                None => continue,
            };
            for c in 0..d {
                let jc = self.modes.decode(c, &mut lc);
                let lcm: Vec<i64> = lc.iter().map(|&x| -x).collect();
                let cm = match self.modes.flat(&lcm, -jc) {
                    Some(x) => x,
                    None => continue,
                };
                worst = worst.max((self.m[(r, c)] - self.m[(rm, cm)].conj()).norm());
            }
        }
        worst / (1.0 + self.max_abs())
    }
}
