use fourier_core::{Projection, TorusField};
use hamiltonian::Model;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("embedding needs {nu} angle/action components, got {got}")]
    Components { nu: usize, got: usize },
    #[error("component box mismatch: expected ({n_phi}, {n_x}), got ({got_phi}, {got_x})")]
    Box { n_phi: usize, n_x: usize, got_phi: usize, got_x: usize },
    #[error("normal component leaks onto tangential/average modes (defect {0:.3e})")]
    NotNormal(f64),
    #[error("component is not a real field (reality defect {0:.3e})")]
    NotReal(f64),
    #[error("bad serialized embedding: {0}")]
    Json(String),
}

/// Embedded-torus unknown: the angle correction Θ, the action y (both real
/// maps T^ν → R^ν, stored as ν angle-only fields), the normal remainder z
/// (no tangential or average x-modes), and the counterterm ζ ∈ R^ν.
///
/// The same shape carries the invariance residual, whose slots are then the
/// three components of the functional and ζ = 0.
#[derive(Debug, Clone)]
pub struct TorusEmbedding {
    pub theta: Vec<TorusField>,
    pub y: Vec<TorusField>,
    pub z: TorusField,
    pub zeta: Vec<f64>,
}

impl TorusEmbedding {
    /// The flat torus: Θ = y = z = 0, ζ = 0.
    pub fn trivial(nu: usize, n_phi: usize, n_x: usize) -> Self {
        TorusEmbedding {
            theta: vec![TorusField::zero(nu, n_phi, 0); nu],
            y: vec![TorusField::zero(nu, n_phi, 0); nu],
            z: TorusField::zero(nu, n_phi, n_x),
            zeta: vec![0.0; nu],
        }
    }

    pub fn nu(&self) -> usize {
        self.z.nu()
    }

    pub fn n_phi(&self) -> usize {
        self.z.n_phi()
    }

    pub fn n_x(&self) -> usize {
        self.z.n_x()
    }

    pub fn validate(&self, model: &Model, n_phi: usize, n_x: usize) -> Result<(), EmbeddingError> {
        let nu = model.nu();
        for list in [&self.theta, &self.y] {
            if list.len() != nu {
                return Err(EmbeddingError::Components { nu, got: list.len() });
            }
            for f in list.iter() {
                if f.nu() != nu || f.n_phi() != n_phi || f.n_x() != 0 {
                    return Err(EmbeddingError::Box {
                        n_phi,
                        n_x: 0,
                        got_phi: f.n_phi(),
                        got_x: f.n_x(),
                    });
                }
                let d = f.reality_defect();
                if d > 1e-10 {
                    return Err(EmbeddingError::NotReal(d));
                }
            }
        }
        if self.zeta.len() != nu {
            return Err(EmbeddingError::Components { nu, got: self.zeta.len() });
        }
        if self.z.nu() != nu || self.z.n_phi() != n_phi || self.z.n_x() != n_x {
            return Err(EmbeddingError::Box {
                n_phi,
                n_x,
                got_phi: self.z.n_phi(),
                got_x: self.z.n_x(),
            });
        }
        let d = self.z.reality_defect();
        if d > 1e-10 {
            return Err(EmbeddingError::NotReal(d));
        }
        let leak = self
            .z
            .sub(&self.z.project(&model.sites_full(), Projection::Normal))
            .l2_norm();
        if leak > 1e-10 * (1.0 + self.z.l2_norm()) {
            return Err(EmbeddingError::NotNormal(leak));
        }
        Ok(())
    }

    /// Size of the periodic part: ‖Θ‖_s + ‖y‖_s + ‖z‖_s (component sums).
    pub fn norm(&self, s: f64) -> f64 {
        let th: f64 = self.theta.iter().map(|f| f.sobolev_norm(s)).sum();
        let yy: f64 = self.y.iter().map(|f| f.sobolev_norm(s)).sum();
        th + yy + self.z.sobolev_norm(s)
    }

    pub fn zeta_norm(&self) -> f64 {
        self.zeta.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// self += a·other, slot by slot (ζ included).
    pub fn axpy(&mut self, a: f64, other: &TorusEmbedding) {
        assert_eq!(self.theta.len(), other.theta.len());
        for (t, o) in self.theta.iter_mut().zip(&other.theta) {
            t.axpy(a, o);
        }
        for (t, o) in self.y.iter_mut().zip(&other.y) {
            t.axpy(a, o);
        }
        self.z.axpy(a, &other.z);
        for (t, o) in self.zeta.iter_mut().zip(&other.zeta) {
            *t += a * o;
        }
    }

    pub fn sub(&self, other: &TorusEmbedding) -> TorusEmbedding {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn enforce_reality(&mut self) {
        for f in self.theta.iter_mut().chain(self.y.iter_mut()) {
            f.enforce_reality();
        }
        self.z.enforce_reality();
    }

    pub fn to_json(&self) -> Value {
        json!({
            "theta": self.theta.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
            "y": self.y.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
            "z": self.z.to_json(),
            "zeta": self.zeta,
        })
    }

    pub fn from_json(v: &Value) -> Result<TorusEmbedding, EmbeddingError> {
        let field = |val: &Value| {
            TorusField::from_json(val).map_err(|e| EmbeddingError::Json(e.to_string()))
        };
        let list = |key: &str| -> Result<Vec<TorusField>, EmbeddingError> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| EmbeddingError::Json(format!("missing array '{key}'")))?
                .iter()
                .map(field)
                .collect()
        };
        let zeta = v
            .get("zeta")
            .and_then(Value::as_array)
            .ok_or_else(|| EmbeddingError::Json("missing array 'zeta'".into()))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| EmbeddingError::Json("bad zeta entry".into())))
            .collect::<Result<Vec<f64>, _>>()?;
        Ok(TorusEmbedding {
            theta: list("theta")?,
            y: list("y")?,
            z: field(v.get("z").ok_or_else(|| EmbeddingError::Json("missing 'z'".into()))?)?,
            zeta,
        })
    }
}
