use crate::{bracket, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("shape mismatch: ({0},{1},{2}) vs ({3},{4},{5})")]
    Shape(usize, usize, usize, usize, usize, usize),
    #[error("x-antiderivative of a field with nonzero x-average (|mean| = {0:.3e})")]
    NonzeroAverage(f64),
    #[error("reality violated on load: defect {0:.3e}")]
    Reality(f64),
    #[error("mode ({0:?},{1}) outside the truncation box")]
    OutOfBox(Vec<i64>, i64),
    #[error("bad serialized entry: {0}")]
    BadEntry(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Tangential modes: j ∈ S (every l kept).
    Tangential,
    /// Normal modes: j ∉ S and j ≠ 0.
    Normal,
}

/// Real function on T^ν × T_x as a dense box of Fourier coefficients,
/// |l_i| ≤ n_phi, |j| ≤ n_x; u(φ,x) = Σ c_{l,j} e^{i(l·φ + jx)}.
///
/// Invariant kept by every operation here: c_{−l,−j} = conj(c_{l,j}).
/// Phase-space members additionally have c_{l,0} = 0; that is enforced at the
/// call sites that require it (coefficient functions like a₀(φ,x) legitimately
/// carry an x-average).
#[derive(Debug, Clone)]
pub struct TorusField {
    nu: usize,
    n_phi: usize,
    n_x: usize,
    c: Vec<C64>,
}

impl TorusField {
    pub fn zero(nu: usize, n_phi: usize, n_x: usize) -> Self {
        let len = (2 * n_phi + 1).pow(nu as u32) * (2 * n_x + 1);
        TorusField { nu, n_phi, n_x, c: vec![C64::new(0.0, 0.0); len] }
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
    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }
    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.c
    }

    pub fn same_shape(&self, o: &TorusField) -> bool {
        self.nu == o.nu && self.n_phi == o.n_phi && self.n_x == o.n_x
    }

    fn lsize(&self) -> usize {
        2 * self.n_phi + 1
    }
    fn xsize(&self) -> usize {
        2 * self.n_x + 1
    }

    pub fn index_of(&self, l: &[i64], j: i64) -> usize {
        debug_assert_eq!(l.len(), self.nu);
        let mut idx = 0usize;
        for &li in l {
            debug_assert!(li.unsigned_abs() as usize <= self.n_phi);
            idx = idx * self.lsize() + (li + self.n_phi as i64) as usize;
        }
        idx * self.xsize() + (j + self.n_x as i64) as usize
    }

    /// Inverse of `index_of`; writes l into `l_buf` (length ν) and returns j.
    pub fn decode(&self, idx: usize, l_buf: &mut [i64]) -> i64 {
        let j = (idx % self.xsize()) as i64 - self.n_x as i64;
        let mut rest = idx / self.xsize();
        for i in (0..self.nu).rev() {
            l_buf[i] = (rest % self.lsize()) as i64 - self.n_phi as i64;
            rest /= self.lsize();
        }
        j
    }

    /// Index of the mode (−l,−j). Every axis has odd length so this is a
    /// per-axis reflection.
    pub fn mirror_index(&self, idx: usize) -> usize {
        let xs = self.xsize();
        let ls = self.lsize();
        let mut rest = idx / xs;
        let jm = (xs - 1) - idx % xs;
        let mut mult = xs;
        let mut out = jm;
        for _ in 0..self.nu {
            let v = rest % ls;
            out += ((ls - 1) - v) * mult;
            mult *= ls;
            rest /= ls;
        }
        out
    }

    pub fn get(&self, l: &[i64], j: i64) -> C64 {
        self.c[self.index_of(l, j)]
    }

    pub fn set(&mut self, l: &[i64], j: i64, v: C64) {
        let k = self.index_of(l, j);
        self.c[k] = v;
    }

    /// Set c_{l,j} = v and c_{−l,−j} = conj(v) in one go. A self-conjugate
    /// mode (l = 0, j = 0) keeps only the real part.
    pub fn set_pair(&mut self, l: &[i64], j: i64, v: C64) {
        let k = self.index_of(l, j);
        let m = self.mirror_index(k);
        if k == m {
            self.c[k] = C64::new(v.re, 0.0);
        } else {
            self.c[k] = v;
            self.c[m] = v.conj();
        }
    }

    pub fn for_each_mode(&self, mut f: impl FnMut(&[i64], i64, usize)) {
        let mut l = vec![0i64; self.nu];
        for idx in 0..self.c.len() {
            let j = self.decode(idx, &mut l);
            f(&l, j, idx);
        }
    }

    pub fn reality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.c.len() {
            let m = self.mirror_index(idx);
            let d = (self.c[idx] - self.c[m].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// Symmetrize conjugate pairs; removes FFT round-off drift (~1e−16),
    /// never call it to hide a real defect.
    pub fn enforce_reality(&mut self) {
        for idx in 0..self.c.len() {
            let m = self.mirror_index(idx);
            if m > idx {
                let avg = 0.5 * (self.c[idx] + self.c[m].conj());
                self.c[idx] = avg;
                self.c[m] = avg.conj();
            } else if m == idx {
                self.c[idx] = C64::new(self.c[idx].re, 0.0);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|z| z.norm() == 0.0)
    }

    /// Max |c| over all modes.
    pub fn max_coeff(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, a: f64) {
        for z in &mut self.c {
            *z *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> TorusField {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub fn add(&self, o: &TorusField) -> TorusField {
        assert!(self.same_shape(o));
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(&o.c) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, o: &TorusField) -> TorusField {
        assert!(self.same_shape(o));
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(&o.c) {
            *a -= b;
        }
        out
    }

    pub fn axpy(&mut self, a: f64, o: &TorusField) {
        assert!(self.same_shape(o));
        for (x, y) in self.c.iter_mut().zip(&o.c) {
            *x += a * y;
        }
    }

    /// ‖u‖_s = (Σ ⟨l,j⟩^{2s} |c|²)^{1/2}; s ≥ 0.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        assert!(s >= 0.0, "negative Sobolev index");
        let mut l = vec![0i64; self.nu];
        let mut acc = 0.0f64;
        for idx in 0..self.c.len() {
            let n2 = self.c[idx].norm_sqr();
            if n2 > 0.0 {
                let j = self.decode(idx, &mut l);
                acc += bracket(&l, j).powf(2.0 * s) * n2;
            }
        }
        acc.sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// k ≥ 0: ∂_x^k (multiply by (ij)^k). k < 0: |k| periodic primitives;
    /// requires zero x-average.
    pub fn dx(&self, k: i32) -> Result<TorusField, FieldError> {
        let mut out = self.clone();
        let mut l = vec![0i64; self.nu];
        if k >= 0 {
            for idx in 0..out.c.len() {
                let j = out.decode(idx, &mut l);
                let f = C64::new(0.0, j as f64).powu(k as u32);
                out.c[idx] *= f;
            }
        } else {
            let avg = self.x_average_sup();
            if avg > 1e-13 * (1.0 + self.max_coeff()) {
                return Err(FieldError::NonzeroAverage(avg));
            }
            for idx in 0..out.c.len() {
                let j = out.decode(idx, &mut l);
                if j == 0 {
                    out.c[idx] = C64::new(0.0, 0.0);
                } else {
                    let f = C64::new(0.0, j as f64).powu((-k) as u32);
                    out.c[idx] /= f;
                }
            }
        }
        Ok(out)
    }

    /// ∂_{φ_k}: multiply each mode by i l_k.
    pub fn dphi(&self, k: usize) -> TorusField {
        assert!(k < self.nu);
        let mut out = self.clone();
        let mut l = vec![0i64; self.nu];
        for idx in 0..out.c.len() {
            out.decode(idx, &mut l);
            out.c[idx] *= C64::new(0.0, l[k] as f64);
        }
        out
    }

    /// sup over l of |c_{l,0}| — the size of the x-average as a function of φ.
    pub fn x_average_sup(&self) -> f64 {
        let mut l = vec![0i64; self.nu];
        let mut worst = 0.0f64;
        for idx in 0..self.c.len() {
            let j = self.decode(idx, &mut l);
            if j == 0 {
                worst = worst.max(self.c[idx].norm());
            }
        }
        worst
    }

    /// π₀: drop the j = 0 modes (subtract the x-average).
    pub fn pi0(&self) -> TorusField {
        let mut out = self.clone();
        let mut l = vec![0i64; self.nu];
        for idx in 0..out.c.len() {
            let j = out.decode(idx, &mut l);
            if j == 0 {
                out.c[idx] = C64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Keep tangential (j ∈ S) or normal (j ∉ S, j ≠ 0) modes.
    pub fn project(&self, s_full: &[i64], part: Projection) -> TorusField {
        let mut out = self.clone();
        let mut l = vec![0i64; self.nu];
        for idx in 0..out.c.len() {
            let j = out.decode(idx, &mut l);
            let tangential = s_full.contains(&j);
            let keep = match part {
                Projection::Tangential => tangential,
                Projection::Normal => !tangential && j != 0,
            };
            if !keep {
                out.c[idx] = C64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Keep modes with ⟨l,j⟩ < n. Cutting on the same bracket that weights the
    /// norms makes ‖Π_N u‖_{s+α} ≤ N^α ‖u‖_s and ‖Π_N^⊥ u‖_s ≤ N^{−α}‖u‖_{s+α}
    /// exact.
    pub fn truncate(&self, n: f64) -> TorusField {
        let mut out = self.clone();
        let mut l = vec![0i64; self.nu];
        for idx in 0..out.c.len() {
            let j = out.decode(idx, &mut l);
            if bracket(&l, j) >= n {
                out.c[idx] = C64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Complement of `truncate`: keep only ⟨l,j⟩ ≥ n.
    pub fn truncate_tail(&self, n: f64) -> TorusField {
        self.sub(&self.truncate(n))
    }

    /// Copy into a (possibly) larger box; modes outside the target box must
    /// be absent.
    pub fn resize(&self, n_phi: usize, n_x: usize) -> Result<TorusField, FieldError> {
        let mut out = TorusField::zero(self.nu, n_phi, n_x);
        let mut l = vec![0i64; self.nu];
        for idx in 0..self.c.len() {
            let j = self.decode(idx, &mut l);
            let z = self.c[idx];
            if z.norm() == 0.0 {
                continue;
            }
            if l.iter().any(|&a| a.unsigned_abs() as usize > n_phi)
                || j.unsigned_abs() as usize > n_x
            {
                return Err(FieldError::OutOfBox(l.clone(), j));
            }
            let k = out.index_of(&l, j);
            out.c[k] = z;
        }
        Ok(out)
    }

    /// The φ-average: l = 0 slice as an x-only field.
    pub fn phi_average(&self) -> TorusField {
        let mut out = TorusField::zero(0, 0, self.n_x);
        let l0 = vec![0i64; self.nu];
        for j in -(self.n_x as i64)..=(self.n_x as i64) {
            let v = self.get(&l0, j);
            let k = out.index_of(&[], j);
            out.c[k] = v;
        }
        out
    }

    /// Mean over both φ and x (the (0,0) coefficient; real by reality).
    pub fn mean(&self) -> f64 {
        let l0 = vec![0i64; self.nu];
        self.get(&l0, 0).re
    }

    /// Direct evaluation at a point (slow; diagnostics and warped grids).
    pub fn eval_at(&self, phi: &[f64], x: f64) -> f64 {
        assert_eq!(phi.len(), self.nu);
        let mut l = vec![0i64; self.nu];
        let mut acc = C64::new(0.0, 0.0);
        for idx in 0..self.c.len() {
            let z = self.c[idx];
            if z.norm() == 0.0 {
                continue;
            }
            let j = self.decode(idx, &mut l);
            let mut ph = j as f64 * x;
            for (li, pi) in l.iter().zip(phi) {
                ph += *li as f64 * pi;
            }
            acc += z * C64::from_polar(1.0, ph);
        }
        acc.re
    }

    /// Promote an x-only field (ν = 0) to the (ν, n_phi) box, constant in φ.
    pub fn broadcast_phi(&self, nu: usize, n_phi: usize) -> TorusField {
        assert_eq!(self.nu, 0);
        let mut out = TorusField::zero(nu, n_phi, self.n_x);
        let l0 = vec![0i64; nu];
        for j in -(self.n_x as i64)..=(self.n_x as i64) {
            let v = self.get(&[], j);
            if v.norm() > 0.0 {
                let k = out.index_of(&l0, j);
                out.c[k] = v;
            }
        }
        out
    }

    /// Evaluate the φ-dependence at a fixed angle, leaving an x-only field.
    pub fn at_phi(&self, phi: &[f64]) -> TorusField {
        assert_eq!(phi.len(), self.nu);
        let mut out = TorusField::zero(0, 0, self.n_x);
        let mut l = vec![0i64; self.nu];
        for idx in 0..self.c.len() {
            let z = self.c[idx];
            if z.norm() == 0.0 {
                continue;
            }
            let j = self.decode(idx, &mut l);
            let mut ph = 0.0;
            for (li, pi) in l.iter().zip(phi) {
                ph += *li as f64 * pi;
            }
            let k = out.index_of(&[], j);
            out.c[k] += z * C64::from_polar(1.0, ph);
        }
        out.enforce_reality();
        out
    }
}

impl TorusField {
    pub fn to_json(&self) -> serde_json::Value {
        let mut entries = Vec::new();
        let mut l = vec![0i64; self.nu];
        for idx in 0..self.c.len() {
            let z = self.c[idx];
            if z.norm() == 0.0 {
                continue;
            }
            let j = self.decode(idx, &mut l);
            let mut row: Vec<serde_json::Value> =
                l.iter().map(|&a| serde_json::json!(a)).collect();
            row.push(serde_json::json!(j));
            row.push(serde_json::json!(z.re));
            row.push(serde_json::json!(z.im));
            entries.push(serde_json::Value::Array(row));
        }
        serde_json::json!({
            "nu": self.nu,
            "n_phi": self.n_phi,
            "n_x": self.n_x,
            "entries": entries,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<TorusField, FieldError> {
        let bad = |m: &str| FieldError::BadEntry(m.to_string());
        let nu = v["nu"].as_u64().ok_or_else(|| bad("nu"))? as usize;
        let n_phi = v["n_phi"].as_u64().ok_or_else(|| bad("n_phi"))? as usize;
        let n_x = v["n_x"].as_u64().ok_or_else(|| bad("n_x"))? as usize;
        let mut out = TorusField::zero(nu, n_phi, n_x);
        let entries = v["entries"].as_array().ok_or_else(|| bad("entries"))?;
        for e in entries {
            let row = e.as_array().ok_or_else(|| bad("entry row"))?;
            if row.len() != nu + 3 {
                return Err(bad(&format!("entry of length {} (want {})", row.len(), nu + 3)));
            }
            let mut l = vec![0i64; nu];
            for i in 0..nu {
                l[i] = row[i].as_i64().ok_or_else(|| bad("l"))?;
            }
            let j = row[nu].as_i64().ok_or_else(|| bad("j"))?;
            let re = row[nu + 1].as_f64().ok_or_else(|| bad("re"))?;
            let im = row[nu + 2].as_f64().ok_or_else(|| bad("im"))?;
            if l.iter().any(|&a| a.unsigned_abs() as usize > n_phi)
                || j.unsigned_abs() as usize > n_x
            {
                return Err(FieldError::OutOfBox(l, j));
            }
            let k = out.index_of(&l, j);
            out.c[k] = C64::new(re, im);
        }
        let d = out.reality_defect();
        if d > 1e-10 * (1.0 + out.max_coeff()) {
            return Err(FieldError::Reality(d));
        }
        Ok(out)
    }
}
