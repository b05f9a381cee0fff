use crate::generator::BirkhoffGenerator;
use fourier_core::{C64, TorusField};
use hamiltonian::symplectic_form;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("flow integrator stalled at t = {t:.3e} with step {h:.3e} (error estimate {err:.3e})")]
    StepUnderflow { t: f64, h: f64, err: f64 },
    #[error("flow expects an autonomous field (no angle slots), got ν = {0}")]
    NotAutonomous(usize),
}

const STEP_TOL: f64 = 2e-14;

fn rk4_step(
    rhs: &impl Fn(&[C64], &mut [C64]),
    sgn: f64,
    y: &[C64],
    h: f64,
    scratch: &mut [Vec<C64>],
) -> Vec<C64> {
    let n = y.len();
    let [k1, k2, k3, k4, tmp] = scratch else { unreachable!() };
    rhs(y, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * sgn * k1[i];
    }
    rhs(tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * sgn * k2[i];
    }
    rhs(tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * sgn * k3[i];
    }
    rhs(tmp, k4);
    (0..n)
        .map(|i| y[i] + (h * sgn / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Flow of an autonomous right-hand side from 0 to `time` (either sign) by
/// step-doubled classical Runge–Kutta: each accepted step compares one full
/// step against two halves and keeps the halves.
fn integrate(
    rhs: &impl Fn(&[C64], &mut [C64]),
    time: f64,
    y0: Vec<C64>,
) -> Result<Vec<C64>, FlowError> {
    if time == 0.0 {
        return Ok(y0);
    }
    let (sgn, t_end) = (time.signum(), time.abs());
    let n = y0.len();
    let mut scratch = vec![vec![C64::new(0.0, 0.0); n]; 5];
    let mut y = y0;
    let mut t = 0.0;
    let mut h: f64 = 0.5 * t_end;
    while t < t_end {
        h = h.min(t_end - t);
        let full = rk4_step(rhs, sgn, &y, h, &mut scratch);
        let half = rk4_step(rhs, sgn, &y, 0.5 * h, &mut scratch);
        let half2 = rk4_step(rhs, sgn, &half, 0.5 * h, &mut scratch);
        let scale: f64 = 1.0 + y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let err = full
            .iter()
            .zip(&half2)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / 15.0
            / scale;
        if err <= STEP_TOL {
            y = half2;
            t += h;
            h *= (STEP_TOL / err.max(1e-300)).powf(0.2).clamp(1.0, 2.0);
        } else {
            h *= 0.9 * (STEP_TOL / err).powf(0.2).clamp(0.2, 0.9);
            if h < 1e-9 * t_end {
                return Err(FlowError::StepUnderflow { t, h, err });
            }
        }
    }
    Ok(y)
}

/// Jacobian of the window flow in mode coordinates, row-major over
/// (output mode + c, input mode + c). Identity off the window.
#[derive(Debug, Clone)]
pub struct WindowJacobian {
    c: i64,
    m: Vec<C64>,
}

impl WindowJacobian {
    fn dim(&self) -> usize {
        (2 * self.c + 1) as usize
    }

    pub fn cutoff(&self) -> i64 {
        self.c
    }

    pub fn entry(&self, out_mode: i64, in_mode: i64) -> C64 {
        let d = self.dim();
        self.m[(out_mode + self.c) as usize * d + (in_mode + self.c) as usize]
    }

    /// Push a tangent field through the flow: (DΦ h)_j = Σ_q J_{jq} h_q on the
    /// window, h_j off it.
    pub fn push(&self, h: &TorusField) -> TorusField {
        assert_eq!(h.nu(), 0);
        let c = self.c;
        let mut out = h.resize(0, h.n_x().max(c as usize)).unwrap();
        for j in -c..=c {
            let mut acc = C64::new(0.0, 0.0);
            for q in -c..=c {
                let hq = if q.unsigned_abs() as usize <= h.n_x() { h.get(&[], q) } else { C64::new(0.0, 0.0) };
                acc += self.entry(j, q) * hq;
            }
            out.set(&[], j, acc);
        }
        out
    }

    /// Transport a gradient against the flow: for g = ∇(H∘Φ)(u) given
    /// w = ∇H(Φu), bilinearity of ⟨a,b⟩ = Σ a_p b_{−p} forces
    /// g_m = Σ_p J_{−p,−m} w_p on the window, w_m off it.
    pub fn pullback(&self, w: &TorusField) -> TorusField {
        assert_eq!(w.nu(), 0);
        let c = self.c;
        let mut out = w.resize(0, w.n_x().max(c as usize)).unwrap();
        for m in -c..=c {
            let mut acc = C64::new(0.0, 0.0);
            for p in -c..=c {
                let wp = if p.unsigned_abs() as usize <= w.n_x() { w.get(&[], p) } else { C64::new(0.0, 0.0) };
                acc += self.entry(-p, -m) * wp;
            }
            out.set(&[], m, acc);
        }
        out
    }
}

impl BirkhoffGenerator {
    fn window_state(&self, u: &TorusField) -> Vec<C64> {
        let c = self.cutoff();
        let mut y0 = vec![C64::new(0.0, 0.0); (2 * c + 1) as usize];
        for j in -c..=c {
            if j != 0 && j.unsigned_abs() as usize <= u.n_x() {
                y0[(j + c) as usize] = u.get(&[], j);
            }
        }
        y0
    }

    fn window_output(&self, u: &TorusField, y0: &[C64], y1: &[C64]) -> TorusField {
        let c = self.cutoff();
        let mut out = u.resize(0, u.n_x().max(c as usize)).unwrap();
        for j in -c..=c {
            if j != 0 {
                let idx = (j + c) as usize;
                let cur = out.get(&[], j);
                out.set(&[], j, cur + y1[idx] - y0[idx]);
            }
        }
        out.enforce_reality();
        out
    }

    /// Time-`s` flow of X_F: identity outside the mode window. The output box
    /// widens to hold the window.
    pub fn flow_time(&self, u: &TorusField, s: f64) -> Result<TorusField, FlowError> {
        if u.nu() != 0 {
            return Err(FlowError::NotAutonomous(u.nu()));
        }
        let y0 = self.window_state(u);
        let y1 = integrate(&|y: &[C64], out: &mut [C64]| self.vector_field(y, out), s, y0.clone())?;
        Ok(self.window_output(u, &y0, &y1))
    }

    /// Φ_B(u) or its inverse: the time-±1 flow.
    pub fn apply(&self, u: &TorusField, dir: Direction) -> Result<TorusField, FlowError> {
        let s = match dir {
            Direction::Forward => 1.0,
            Direction::Inverse => -1.0,
        };
        self.flow_time(u, s)
    }

    /// Flow together with its exact mode-space Jacobian, propagated by the
    /// variational equation Ṁ = DX_F(y(t)) M alongside the state.
    pub fn flow_with_jacobian(
        &self,
        u: &TorusField,
        s: f64,
    ) -> Result<(TorusField, WindowJacobian), FlowError> {
        if u.nu() != 0 {
            return Err(FlowError::NotAutonomous(u.nu()));
        }
        let c = self.cutoff();
        let d = (2 * c + 1) as usize;
        let y0 = self.window_state(u);
        let mut state = y0.clone();
        state.resize(d + d * d, C64::new(0.0, 0.0));
        for i in 0..d {
            state[d + i * d + i] = C64::new(1.0, 0.0);
        }
        let rhs = |y: &[C64], out: &mut [C64]| {
            self.vector_field(&y[..d], &mut out[..d]);
            let mut a = vec![C64::new(0.0, 0.0); d * d];
            self.vector_field_jacobian(&y[..d], &mut a);
            let m = &y[d..];
            let dm = &mut out[d..];
            for i in 0..d {
                for k in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for p in 0..d {
                        acc += a[i * d + p] * m[p * d + k];
                    }
                    dm[i * d + k] = acc;
                }
            }
        };
        let out = integrate(&rhs, s, state)?;
        let field = self.window_output(u, &y0, &out[..d]);
        Ok((field, WindowJacobian { c, m: out[d..].to_vec() }))
    }
}

/// Symplecticity defect |Ω(DΦh, DΦk) − Ω(h,k)| / (1 + |Ω(h,k)|) with the
/// Jacobian applied by Richardson-extrapolated central differences.
pub fn flow_jacobian_defect(
    gen: &BirkhoffGenerator,
    u: &TorusField,
    h: &TorusField,
    k: &TorusField,
) -> Result<f64, FlowError> {
    let dphi = |w: &TorusField| -> Result<TorusField, FlowError> {
        let mut out: Option<TorusField> = None;
        // (4·D_{δ/2} − D_δ)/3 kills the δ² term of the central difference
        for (delta, coef) in [(1e-3, -1.0 / 3.0), (5e-4, 4.0 / 3.0)] {
            let mut up = u.clone();
            up.axpy(delta, w);
            let mut um = u.clone();
            um.axpy(-delta, w);
            let d = gen
                .apply(&up, Direction::Forward)?
                .sub(&gen.apply(&um, Direction::Forward)?)
                .scaled(coef / (2.0 * delta));
            out = Some(match out {
                None => d,
                Some(mut acc) => {
                    acc.axpy(1.0, &d);
                    acc
                }
            });
        }
        Ok(out.unwrap())
    };
    let dh = dphi(h)?;
    let dk = dphi(k)?;
    let want = {
        let hb = h.resize(0, dh.n_x()).unwrap();
        let kb = k.resize(0, dh.n_x()).unwrap();
        symplectic_form(&hb, &kb)
    };
    let got = symplectic_form(&dh, &dk);
    Ok((got - want).abs() / (1.0 + want.abs()))
}
