//! Töplitz-in-time operators A_{j}^{j'}(l): a φ-dependent family of x-mode
//! matrices acting on fields, with the s-decay norm
//! |A|_s² = Σ_{l,m} ⟨l,m⟩^{2s} (sup_{j−j'=m} |A_j^{j'}(l)|)².

use crate::field::{FieldError, TorusField};
use crate::{bracket, par, C64};

#[derive(Debug, Clone)]
pub struct DecayOperator {
    nu: usize,
    n_phi: usize,
    /// Sorted x-modes the operator acts on (rows and columns).
    js: Vec<i64>,
    /// Row-major [(2n_phi+1)^ν][nj][nj]; block (l)[r][c] = A_{js[r]}^{js[c]}(l).
    e: Vec<C64>,
}

impl DecayOperator {
    pub fn zero(nu: usize, n_phi: usize, js: Vec<i64>) -> Self {
        let mut js = js;
        js.sort_unstable();
        js.dedup();
        let lc = (2 * n_phi + 1).pow(nu as u32);
        let nj = js.len();
        DecayOperator { nu, n_phi, js, e: vec![C64::new(0.0, 0.0); lc * nj * nj] }
    }

    pub fn identity(nu: usize, n_phi: usize, js: Vec<i64>) -> Self {
        let mut a = DecayOperator::zero(nu, n_phi, js);
        let nj = a.js.len();
        let l0 = a.l_flat_zero();
        for r in 0..nj {
            a.e[(l0 * nj + r) * nj + r] = C64::new(1.0, 0.0);
        }
        a
    }

    /// Multiplication by a (possibly φ-dependent) function p:
    /// A_{j}^{j'}(l) = p_{l, j−j'}.
    pub fn mult_op(p: &TorusField, js: &[i64]) -> Self {
        let mut a = DecayOperator::zero(p.nu(), p.n_phi(), js.to_vec());
        let nj = a.js.len();
        let mut lbuf = vec![0i64; a.nu];
        let lc = a.lcount();
        for lf in 0..lc {
            a.decode_l(lf, &mut lbuf);
            for r in 0..nj {
                for c in 0..nj {
                    let dj = a.js[r] - a.js[c];
                    if dj.unsigned_abs() as usize <= p.n_x() {
                        a.e[(lf * nj + r) * nj + c] = p.get(&lbuf, dj);
                    }
                }
            }
        }
        a
    }

    /// Rank-one operator h ↦ (h, g)_{L²(T_x)} χ, a φ-family of x-rank-one maps
    /// (real pairing, no conjugation): A_{j}^{j'}(l) = Σ_{l'} g_{l', −j'} χ_{l−l', j}.
    pub fn rank_one(chi: &TorusField, g: &TorusField, js: &[i64]) -> Self {
        assert_eq!(chi.nu(), g.nu());
        // Töplitz offsets are sums of a χ and a g frequency
        let mut a = DecayOperator::zero(chi.nu(), chi.n_phi() + g.n_phi(), js.to_vec());
        let nj = a.js.len();
        let mut lo = vec![0i64; a.nu];
        let mut lg = vec![0i64; g.nu()];
        let lc = a.lcount();
        let glen = g.coeffs().len();
        for lf in 0..lc {
            a.decode_l(lf, &mut lo);
            for gidx in 0..glen {
                let gz = g.coeffs()[gidx];
                if gz.norm() == 0.0 {
                    continue;
                }
                let gj = g.decode(gidx, &mut lg);
                // χ index: l − l'
                let mut lchi = vec![0i64; a.nu];
                let mut inside = true;
                for i in 0..a.nu {
                    lchi[i] = lo[i] - lg[i];
                    if lchi[i].unsigned_abs() as usize > chi.n_phi() {
                        inside = false;
                        break;
                    }
                }
                if !inside {
                    continue;
                }
                for r in 0..nj {
                    let jr = a.js[r];
                    if jr.unsigned_abs() as usize > chi.n_x() {
                        continue;
                    }
                    let chz = chi.get(&lchi, jr);
                    if chz.norm() == 0.0 {
                        continue;
                    }
                    // column j' has g-coefficient at −j'
                    if let Ok(c) = a.js.binary_search(&(-gj)) {
                        a.e[(lf * nj + r) * nj + c] += chz * gz;
                    }
                }
            }
        }
        a
    }

    /// Diagonal operator diag over j of f(j) (φ-independent); e.g. ∂_x^k with
    /// f(j) = (ij)^k.
    pub fn diag_op(nu: usize, n_phi: usize, js: &[i64], f: impl Fn(i64) -> C64) -> Self {
        let mut a = DecayOperator::zero(nu, n_phi, js.to_vec());
        let nj = a.js.len();
        let l0 = a.l_flat_zero();
        for r in 0..nj {
            a.e[(l0 * nj + r) * nj + r] = f(a.js[r]);
        }
        a
    }

    pub fn nu(&self) -> usize {
        self.nu
    }
    pub fn n_phi(&self) -> usize {
        self.n_phi
    }
    pub fn js(&self) -> &[i64] {
        &self.js
    }

    pub fn lcount(&self) -> usize {
        (2 * self.n_phi + 1).pow(self.nu as u32)
    }

    fn l_flat_zero(&self) -> usize {
        let mut f = 0usize;
        for _ in 0..self.nu {
            f = f * (2 * self.n_phi + 1) + self.n_phi;
        }
        f
    }

    pub fn l_flat_of(&self, l: &[i64]) -> Option<usize> {
        let mut f = 0usize;
        for &li in l {
            if li.unsigned_abs() as usize > self.n_phi {
                return None;
            }
            f = f * (2 * self.n_phi + 1) + (li + self.n_phi as i64) as usize;
        }
        Some(f)
    }

    pub fn decode_l(&self, mut lf: usize, buf: &mut [i64]) {
        let ls = 2 * self.n_phi + 1;
        for i in (0..self.nu).rev() {
            buf[i] = (lf % ls) as i64 - self.n_phi as i64;
            lf /= ls;
        }
    }

    pub fn get(&self, l: &[i64], j: i64, jp: i64) -> C64 {
        let nj = self.js.len();
        match (self.l_flat_of(l), self.js.binary_search(&j), self.js.binary_search(&jp)) {
            (Some(lf), Ok(r), Ok(c)) => self.e[(lf * nj + r) * nj + c],
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn set(&mut self, l: &[i64], j: i64, jp: i64, v: C64) {
        let nj = self.js.len();
        let lf = self.l_flat_of(l).expect("l outside box");
        let r = self.js.binary_search(&j).expect("row mode not in support");
        let c = self.js.binary_search(&jp).expect("col mode not in support");
        self.e[(lf * nj + r) * nj + c] = v;
    }

    pub fn scale(&mut self, a: C64) {
        for z in &mut self.e {
            *z *= a;
        }
    }

    pub fn scaled(&self, a: C64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub fn add(&self, o: &DecayOperator) -> Self {
        assert!(self.nu == o.nu && self.n_phi == o.n_phi && self.js == o.js);
        let mut out = self.clone();
        for (a, b) in out.e.iter_mut().zip(&o.e) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, o: &DecayOperator) -> Self {
        assert!(self.nu == o.nu && self.n_phi == o.n_phi && self.js == o.js);
        let mut out = self.clone();
        for (a, b) in out.e.iter_mut().zip(&o.e) {
            *a -= b;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.e.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// (Ah)_{l,j} = Σ_{l',j'} A_j^{j'}(l−l') h_{l',j'}; rows/columns outside
    /// the operator's mode list do not participate.
    pub fn apply(&self, h: &TorusField) -> TorusField {
        assert_eq!(h.nu(), self.nu);
        let nj = self.js.len();
        let mut out = TorusField::zero(h.nu(), h.n_phi(), h.n_x());
        // gather column values per (l', j')
        let mut lbuf = vec![0i64; self.nu];
        let mut lout = vec![0i64; self.nu];
        let mut dl = vec![0i64; self.nu];
        let hn = h.coeffs().len();
        for hidx in 0..hn {
            let hz = h.coeffs()[hidx];
            if hz.norm() == 0.0 {
                continue;
            }
            let jp = h.decode(hidx, &mut lbuf);
            let c = match self.js.binary_search(&jp) {
                Ok(c) => c,
                Err(_) => continue,
            };
            // scatter into all output (l, j): l − l' within op box
            let outn = out.coeffs().len();
            for oidx in 0..outn {
                let j = out.decode(oidx, &mut lout);
                let r = match self.js.binary_search(&j) {
                    Ok(r) => r,
                    Err(_) => continue,
                };
                let mut ok = true;
                for i in 0..self.nu {
                    dl[i] = lout[i] - lbuf[i];
                    if dl[i].unsigned_abs() as usize > self.n_phi {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                let lf = self.l_flat_of(&dl).unwrap();
                let a = self.e[(lf * nj + r) * nj + c];
                if a.norm() > 0.0 {
                    out.coeffs_mut()[oidx] += a * hz;
                }
            }
        }
        out
    }

    /// Töplitz composition (A∘B)_{j}^{j''}(l) = Σ_{l'} Σ_{j'} A_j^{j'}(l') B_{j'}^{j''}(l−l'),
    /// truncated back to |l| ≤ n_phi.
    pub fn compose(&self, o: &DecayOperator) -> DecayOperator {
        assert!(self.nu == o.nu && self.n_phi == o.n_phi && self.js == o.js);
        let nj = self.js.len();
        let lc = self.lcount();
        let nu = self.nu;
        let n_phi = self.n_phi;
        let mut out = DecayOperator::zero(nu, n_phi, self.js.clone());
        let blocks: Vec<Vec<C64>> = par::par_map_range(lc, |lf_out| {
            let mut lo = vec![0i64; nu];
            out.decode_l(lf_out, &mut lo);
            let mut block = vec![C64::new(0.0, 0.0); nj * nj];
            let mut la = vec![0i64; nu];
            for lfa in 0..lc {
                self.decode_l(lfa, &mut la);
                let mut lb = vec![0i64; nu];
                let mut ok = true;
                for i in 0..nu {
                    lb[i] = lo[i] - la[i];
                    if lb[i].unsigned_abs() as usize > n_phi {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                let lfb = o.l_flat_of(&lb).unwrap();
                let ab = &self.e[lfa * nj * nj..(lfa + 1) * nj * nj];
                let bb = &o.e[lfb * nj * nj..(lfb + 1) * nj * nj];
                // block += ab · bb
                for r in 0..nj {
                    for k in 0..nj {
                        let a = ab[r * nj + k];
                        if a.norm() == 0.0 {
                            continue;
                        }
                        let brow = &bb[k * nj..(k + 1) * nj];
                        let crow = &mut block[r * nj..(r + 1) * nj];
                        for c in 0..nj {
                            crow[c] += a * brow[c];
                        }
                    }
                }
            }
            block
        });
        for (lf, b) in blocks.into_iter().enumerate() {
            out.e[lf * nj * nj..(lf + 1) * nj * nj].copy_from_slice(&b);
        }
        out
    }

    /// exp(self) by the series, stopping when a term falls below `tol` in
    /// max-abs.
    pub fn exp_series(&self, tol: f64) -> DecayOperator {
        let mut sum = DecayOperator::identity(self.nu, self.n_phi, self.js.clone());
        let mut term = DecayOperator::identity(self.nu, self.n_phi, self.js.clone());
        for k in 1..200 {
            term = term.compose(self);
            term.scale(C64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
            if term.max_abs() < tol {
                break;
            }
        }
        sum
    }

    /// s-decay norm on the (l, j−j') diagonals.
    pub fn decay_norm(&self, s: f64) -> f64 {
        let nj = self.js.len();
        if nj == 0 {
            return 0.0;
        }
        let jmin = self.js[0];
        let jmax = self.js[nj - 1];
        let span = (jmax - jmin) as usize;
        let lc = self.lcount();
        // sup over each diagonal (l, m)
        let mut sup = vec![0.0f64; lc * (2 * span + 1)];
        for lf in 0..lc {
            for r in 0..nj {
                for c in 0..nj {
                    let v = self.e[(lf * nj + r) * nj + c].norm();
                    if v > 0.0 {
                        let m = (self.js[r] - self.js[c] + span as i64) as usize;
                        let slot = &mut sup[lf * (2 * span + 1) + m];
                        if v > *slot {
                            *slot = v;
                        }
                    }
                }
            }
        }
        let mut acc = 0.0f64;
        let mut lbuf = vec![0i64; self.nu];
        for lf in 0..lc {
            self.decode_l(lf, &mut lbuf);
            for mi in 0..(2 * span + 1) {
                let d = sup[lf * (2 * span + 1) + mi];
                if d > 0.0 {
                    let m = mi as i64 - span as i64;
                    acc += bracket(&lbuf, m).powf(2.0 * s) * d * d;
                }
            }
        }
        acc.sqrt()
    }

    /// Max |A_j^{j'}(l) − conj(A_{−j}^{−j'}(−l))| — zero for operators mapping
    /// real fields to real fields.
    pub fn reality_defect(&self) -> f64 {
        let nj = self.js.len();
        let lc = self.lcount();
        let mut lbuf = vec![0i64; self.nu];
        let mut worst = 0.0f64;
        for lf in 0..lc {
            self.decode_l(lf, &mut lbuf);
            let lneg: Vec<i64> = lbuf.iter().map(|&a| -a).collect();
            let lfn = self.l_flat_of(&lneg).unwrap();
            for r in 0..nj {
                let rn = match self.js.binary_search(&(-self.js[r])) {
                    Ok(k) => k,
                    Err(_) => continue,
                };
                for c in 0..nj {
                    let cn = match self.js.binary_search(&(-self.js[c])) {
                        Ok(k) => k,
                        Err(_) => continue,
                    };
                    let d = (self.e[(lf * nj + r) * nj + c]
                        - self.e[(lfn * nj + rn) * nj + cn].conj())
                    .norm();
                    if d > worst {
                        worst = d;
                    }
                }
            }
        }
        worst
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nj = self.js.len();
        let lc = self.lcount();
        let mut lbuf = vec![0i64; self.nu];
        let mut entries = Vec::new();
        for lf in 0..lc {
            self.decode_l(lf, &mut lbuf);
            for r in 0..nj {
                for c in 0..nj {
                    let z = self.e[(lf * nj + r) * nj + c];
                    if z.norm() == 0.0 {
                        continue;
                    }
                    let mut row: Vec<serde_json::Value> =
                        lbuf.iter().map(|&a| serde_json::json!(a)).collect();
                    row.push(serde_json::json!(self.js[r]));
                    row.push(serde_json::json!(self.js[c]));
                    row.push(serde_json::json!(z.re));
                    row.push(serde_json::json!(z.im));
                    entries.push(serde_json::Value::Array(row));
                }
            }
        }
        serde_json::json!({
            "nu": self.nu,
            "n_phi": self.n_phi,
            "js": self.js,
            "entries": entries,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<DecayOperator, FieldError> {
        let bad = |m: &str| FieldError::BadEntry(m.to_string());
        let nu = v["nu"].as_u64().ok_or_else(|| bad("nu"))? as usize;
        let n_phi = v["n_phi"].as_u64().ok_or_else(|| bad("n_phi"))? as usize;
        let js: Vec<i64> = v["js"]
            .as_array()
            .ok_or_else(|| bad("js"))?
            .iter()
            .map(|x| x.as_i64().unwrap_or(i64::MAX))
            .collect();
        if js.contains(&i64::MAX) {
            return Err(bad("js entry"));
        }
        let mut out = DecayOperator::zero(nu, n_phi, js);
        let entries = v["entries"].as_array().ok_or_else(|| bad("entries"))?;
        for e in entries {
            let row = e.as_array().ok_or_else(|| bad("entry row"))?;
            if row.len() != nu + 4 {
                return Err(bad("entry length"));
            }
            let mut l = vec![0i64; nu];
            for i in 0..nu {
                l[i] = row[i].as_i64().ok_or_else(|| bad("l"))?;
            }
            let j = row[nu].as_i64().ok_or_else(|| bad("j"))?;
            let jp = row[nu + 1].as_i64().ok_or_else(|| bad("j'"))?;
            let re = row[nu + 2].as_f64().ok_or_else(|| bad("re"))?;
            let im = row[nu + 3].as_f64().ok_or_else(|| bad("im"))?;
            out.set(&l, j, jp, C64::new(re, im));
        }
        let d = out.reality_defect();
        if d > 1e-10 * (1.0 + out.max_abs()) {
            return Err(FieldError::Reality(d));
        }
        Ok(out)
    }
}
