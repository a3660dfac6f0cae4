use super::index::MAX_DIM;
use super::TensorError;
use nalgebra::DMatrix;

/// Lorentzian metric at a point, signature (−,+,…,+), with cached inverse and √|det g|.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    dim: usize,
    g: Vec<f64>,
    ginv: Vec<f64>,
    sqrt_abs_det: f64,
}

/// Orientation relative to the coordinate orientation dx⁰∧…∧dxⁿ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Orientation(i8);

impl Orientation {
    pub const POSITIVE: Orientation = Orientation(1);
    pub const NEGATIVE: Orientation = Orientation(-1);

    pub fn new(sign: i8) -> Result<Orientation, TensorError> {
        match sign {
            1 | -1 => Ok(Orientation(sign)),
            _ => Err(TensorError::BadOrientation(sign)),
        }
    }

    pub fn sign(self) -> f64 {
        self.0 as f64
    }

    pub fn flipped(self) -> Orientation {
        Orientation(-self.0)
    }
}

impl Default for Orientation {
    fn default() -> Self {
        Orientation::POSITIVE
    }
}

impl Metric {
    /// Build from a row-major `dim×dim` array. The array is symmetrized after a
    /// symmetry check; exactly one negative eigenvalue is required.
    pub fn new(dim: usize, g: &[f64]) -> Result<Metric, TensorError> {
        if dim < 2 || dim > MAX_DIM || g.len() != dim * dim {
            return Err(TensorError::Shape(format!("metric of dim {dim} with {} components", g.len())));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(TensorError::Degenerate("non-finite metric component".into()));
        }
        let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for a in 0..dim {
            for b in 0..a {
                if (g[a * dim + b] - g[b * dim + a]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(TensorError::NotSymmetric);
                }
            }
        }
        let m = DMatrix::from_fn(dim, dim, |a, b| 0.5 * (g[a * dim + b] + g[b * dim + a]));
        let eig = m.clone().symmetric_eigen();
        let tiny = 1e-14 * scale.max(f64::MIN_POSITIVE);
        if eig.eigenvalues.iter().any(|l| l.abs() <= tiny) {
            return Err(TensorError::Degenerate("metric has a vanishing eigenvalue".into()));
        }
        let negatives = eig.eigenvalues.iter().filter(|l| **l < 0.0).count();
        if negatives != 1 {
            return Err(TensorError::NotLorentzian(negatives));
        }
        let det = m.determinant();
        let inv = m.clone().try_inverse().ok_or_else(|| TensorError::Degenerate("singular metric".into()))?;
        let mut ginv = vec![0.0; dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                ginv[a * dim + b] = 0.5 * (inv[(a, b)] + inv[(b, a)]);
            }
        }
        Ok(Metric { dim, g: m.as_slice().to_vec(), ginv, sqrt_abs_det: det.abs().sqrt() })
    }

    /// diag(−c², 1, …, 1); with this normalization ∂₀ has g(∂₀,∂₀) = −c².
    pub fn minkowski(dim: usize, c: f64) -> Metric {
        let mut g = vec![0.0; dim * dim];
        g[0] = -c * c;
        for a in 1..dim {
            g[a * dim + a] = 1.0;
        }
        Metric::new(dim, &g).expect("Minkowski metric is Lorentzian")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn g(&self, a: usize, b: usize) -> f64 {
        self.g[a * self.dim + b]
    }

    pub fn ginv(&self, a: usize, b: usize) -> f64 {
        self.ginv[a * self.dim + b]
    }

    pub fn components(&self) -> &[f64] {
        &self.g
    }

    pub fn inverse_components(&self) -> &[f64] {
        &self.ginv
    }

    pub fn sqrt_abs_det(&self) -> f64 {
        self.sqrt_abs_det
    }

    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for a in 0..d {
            for b in 0..d {
                s += self.g[a * d + b] * u[a] * v[b];
            }
        }
        s
    }

    pub fn dot_co(&self, a: &[f64], b: &[f64]) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += self.ginv[i * d + j] * a[i] * b[j];
            }
        }
        s
    }

    /// v♭
    pub fn lower(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d).map(|a| (0..d).map(|b| self.g[a * d + b] * v[b]).sum()).collect()
    }

    /// α♯
    pub fn raise(&self, alpha: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d).map(|a| (0..d).map(|b| self.ginv[a * d + b] * alpha[b]).sum()).collect()
    }
}
