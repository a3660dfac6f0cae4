//! Observer-relative electromagnetism: E/B from the Faraday form, D/H from
//! the field derivative of the Lagrangian, the Poynting form, the projection
//! tensor, and the Maxwell Lagrangian and stress-energy-momentum tensor.
//!
//! Everything here is pointwise. Dimension D = n + 1 with n ≥ 2; the magnetic
//! fields B, H are (n−2)-forms.

use crate::calculus::{MetricField, TensorField};
use crate::tensor::{trace_tensor_product, vector_covector, Form, KVector, Metric, Orientation, Slot, Tensor};
use thiserror::Error;

/// Pointwise tolerance for g(u,u) = −c² and transversality.
pub const FRAME_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EmError {
    #[error("velocity is not timelike (g(w,w) = {norm2}){}", at_point(.point))]
    NotTimelike { norm2: f64, point: Option<Vec<f64>> },
    #[error("observer not normalized: g(u,u) + c² = {0:e}")]
    NotNormalized(f64),
    #[error("speed of light must be positive and finite, got {0}")]
    BadLightSpeed(f64),
    #[error("{what} is not transverse to u (|i_u| = {residual:e})")]
    NotTransverse { what: &'static str, residual: f64 },
    #[error("{what}: expected degree {expected}, got {got}")]
    Degree { what: &'static str, expected: usize, got: usize },
}

fn at_point(p: &Option<Vec<f64>>) -> String {
    p.as_ref().map(|x| format!(" at x = {x:?}")).unwrap_or_default()
}

/// A unit world-velocity, g(u,u) = −c².
#[derive(Clone, Debug, PartialEq)]
pub struct Observer {
    u: Vec<f64>,
    u_flat: Vec<f64>,
    c: f64,
}

impl Observer {
    pub fn new(g: &Metric, u: &[f64], c: f64) -> Result<Observer, EmError> {
        check_c(c)?;
        let n2 = g.dot(u, u);
        if (n2 + c * c).abs() > FRAME_TOL * c * c {
            return Err(EmError::NotNormalized(n2 + c * c));
        }
        Ok(Observer { u: u.to_vec(), u_flat: g.lower(u), c })
    }

    /// u = c·w/√(−g(w,w)).
    pub fn normalize(g: &Metric, w: &[f64], c: f64) -> Result<Observer, EmError> {
        check_c(c)?;
        let n2 = g.dot(w, w);
        if !(n2 < 0.0) {
            return Err(EmError::NotTimelike { norm2: n2, point: None });
        }
        let s = c / (-n2).sqrt();
        let u: Vec<f64> = w.iter().map(|x| x * s).collect();
        Ok(Observer { u_flat: g.lower(&u), u, c })
    }

    /// Observer at rest in the chart: u = (c/√(−g₀₀)) ∂₀.
    pub fn static_frame(g: &Metric, c: f64) -> Result<Observer, EmError> {
        let mut w = vec![0.0; g.dim()];
        w[0] = 1.0;
        Observer::normalize(g, &w, c)
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn u_flat(&self) -> &[f64] {
        &self.u_flat
    }

    pub fn u_flat_form(&self) -> Form {
        Form::covector(&self.u_flat)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// n, the spatial dimension.
    pub fn n(&self) -> usize {
        self.u.len() - 1
    }

    /// P = δ + (1/c²) u ⊗ u♭.
    pub fn projection(&self) -> Tensor {
        let c2 = self.c * self.c;
        Tensor::identity(self.dim()).add(&vector_covector(&self.u, &self.u_flat).scale(1.0 / c2))
    }

    /// Radar metric p = g + (1/c²) u♭ ⊗ u♭.
    pub fn radar_metric(&self, g: &Metric) -> Tensor {
        let d = self.dim();
        let c2 = self.c * self.c;
        Tensor::from_fn(d, &[Slot::Down, Slot::Down], |i| g.g(i[0], i[1]) + self.u_flat[i[0]] * self.u_flat[i[1]] / c2)
    }

    /// |i_u α| relative to the size of α, for transversality checks.
    pub fn transverse_residual(&self, alpha: &Form) -> f64 {
        if alpha.deg() == 0 {
            return 0.0;
        }
        let r = alpha.interior(&self.u).expect("degree ≥ 1").max_abs();
        r / (1.0 + self.c * alpha.max_abs())
    }

    pub fn require_transverse(&self, what: &'static str, alpha: &Form) -> Result<(), EmError> {
        let residual = self.transverse_residual(alpha);
        if residual > FRAME_TOL {
            return Err(EmError::NotTransverse { what, residual });
        }
        Ok(())
    }

    /// α − u♭ ∧ i_u α / g(u,u): the u-transverse part of a form.
    pub fn project_form(&self, alpha: &Form) -> Form {
        if alpha.deg() == 0 {
            return alpha.clone();
        }
        let iu = alpha.interior(&self.u).expect("degree ≥ 1");
        alpha.axpy(1.0 / (self.c * self.c), &self.u_flat_form().wedge(&iu).expect("fits"))
    }
}

fn check_c(c: f64) -> Result<(), EmError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(EmError::BadLightSpeed(c));
    }
    Ok(())
}

/// Normalize a velocity field pointwise; the first non-timelike point is reported.
pub fn normalize_velocity(w: &TensorField, m: &MetricField, c: f64) -> Result<TensorField, EmError> {
    check_c(c)?;
    let grid = w.grid();
    for p in 0..grid.len() {
        let n2 = m.metric(p).dot(w.at(p), w.at(p));
        if !(n2 < 0.0) {
            return Err(EmError::NotTimelike { norm2: n2, point: Some(grid.point(p)) });
        }
    }
    Ok(TensorField::from_points(grid, &[Slot::Up], |p, out| {
        let o = Observer::normalize(m.metric(p), w.at(p), c).expect("checked");
        out.copy_from_slice(o.u());
    }))
}

/// E (1-form) and B ((n−2)-form), both u-transverse.
#[derive(Clone, Debug, PartialEq)]
pub struct EbSplit {
    pub e: Form,
    pub b: Form,
}

/// D (1-form) and H ((n−2)-form), both u-transverse.
#[derive(Clone, Debug, PartialEq)]
pub struct DhSplit {
    pub d: Form,
    pub h: Form,
}

/// E = −(1/c) i_u F, B = −(1/c) i_u ⋆F.
pub fn eb_decompose(f: &Form, obs: &Observer, g: &Metric, o: Orientation) -> EbSplit {
    let k = -1.0 / obs.c;
    let e = f.interior(obs.u()).expect("2-form").scale(k);
    let b = f.hodge(g, o).interior(obs.u()).expect("(n−1)-form").scale(k);
    EbSplit { e, b }
}

/// F = (1/c) u♭∧E − (1/c) ⋆(u♭∧B).
pub fn eb_reconstruct(split: &EbSplit, obs: &Observer, g: &Metric, o: Orientation) -> Result<Form, EmError> {
    check_degrees(obs, &split.e, &split.b, "E", "B")?;
    obs.require_transverse("E", &split.e)?;
    obs.require_transverse("B", &split.b)?;
    let ub = obs.u_flat_form();
    let k = 1.0 / obs.c;
    let a = ub.wedge(&split.e).expect("fits").scale(k);
    let b = ub.wedge(&split.b).expect("fits").hodge(g, o).scale(k);
    Ok(a.sub(&b))
}

fn check_degrees(obs: &Observer, one: &Form, mag: &Form, a: &'static str, b: &'static str) -> Result<(), EmError> {
    if one.deg() != 1 {
        return Err(EmError::Degree { what: a, expected: 1, got: one.deg() });
    }
    if mag.deg() != obs.n() - 2 {
        return Err(EmError::Degree { what: b, expected: obs.n() - 2, got: mag.deg() });
    }
    Ok(())
}

/// D = −(1/c) i_u ⋆Θ, H = (1/c) i_u Θ, for Θ the (n−1)-form field derivative.
pub fn dh_extract(theta: &Form, obs: &Observer, g: &Metric, o: Orientation) -> DhSplit {
    let k = 1.0 / obs.c;
    let d = theta.hodge(g, o).interior(obs.u()).expect("2-form").scale(-k);
    let h = theta.interior(obs.u()).expect("(n−1)-form").scale(k);
    DhSplit { d, h }
}

/// Θ = −(1/c) ⋆(u♭∧D) − (1/c) u♭∧H.
pub fn dh_assemble(split: &DhSplit, obs: &Observer, g: &Metric, o: Orientation) -> Result<Form, EmError> {
    check_degrees(obs, &split.d, &split.h, "D", "H")?;
    obs.require_transverse("D", &split.d)?;
    obs.require_transverse("H", &split.h)?;
    let ub = obs.u_flat_form();
    let k = -1.0 / obs.c;
    let a = ub.wedge(&split.d).expect("fits").hodge(g, o).scale(k);
    let b = ub.wedge(&split.h).expect("fits").scale(k);
    Ok(a.add(&b))
}

/// The 2-vector incarnation of the field derivative (tensor factor of the
/// density): −(1/c)(u∧D♯) + (1/c)⋆(u∧H♯).
pub fn field_derivative_bivector(split: &DhSplit, obs: &Observer, g: &Metric, o: Orientation) -> KVector {
    let u = KVector::vector(obs.u());
    let k = 1.0 / obs.c;
    let a = u.wedge(&split.d.sharp(g)).expect("fits").scale(-k);
    let b = u.wedge(&split.h.sharp(g)).expect("fits").hodge(g, o).scale(k);
    a.add(&b)
}

/// (−1)^n (1/c) i_{E♯} i_u ⋆(X♭) for a 1-form E and (n−2)-vector X.
/// With X = ∂ε/∂B this is S_ε; with X = B♯ it is the Maxwell Poynting form.
pub fn poynting(e: &Form, x: &KVector, obs: &Observer, g: &Metric, o: Orientation) -> Form {
    let sign = if obs.n() % 2 == 0 { 1.0 } else { -1.0 };
    let star = x.flat(g).hodge(g, o);
    let iu = star.interior(obs.u()).expect("(n−1)-form");
    iu.interior(&g.raise(e.data())).expect("1-form+").scale(sign / obs.c)
}

/// Maxwell Poynting form, X = B♯.
pub fn maxwell_poynting(split: &EbSplit, obs: &Observer, g: &Metric, o: Orientation) -> Form {
    poynting(&split.e, &split.b.sharp(g), obs, g, o)
}

/// ℓ_M / μ(g) = −½ ⟨F,F⟩ (F∧⋆F = ⟨F,F⟩μ).
pub fn maxwell_lagrangian(f: &Form, g: &Metric) -> f64 {
    -0.5 * f.norm2(g)
}

/// 𝔱_M = −½|F|² δ + F♯ ⊗tr F (tensor factor; the density carries μ(g)).
pub fn maxwell_sem(f: &Form, g: &Metric) -> Tensor {
    let d = f.dim();
    trace_tensor_product(&f.sharp(g), f).add(&Tensor::identity(d).scale(-0.5 * f.norm2(g)))
}

/// The same tensor from the E/B expansion:
/// ½(|E|²+|B|²)(uu♭/c² + P) + (u⊗S + S♯⊗u♭)/c − E♯⊗E − B♯⊗tr B.
pub fn maxwell_sem_eb(split: &EbSplit, obs: &Observer, g: &Metric, o: Orientation) -> Tensor {
    let c = obs.c;
    let half = 0.5 * (split.e.norm2(g) + split.b.norm2(g));
    let s = maxwell_poynting(split, obs, g, o);
    let uu = vector_covector(obs.u(), obs.u_flat());
    let mut t = uu.scale(half / (c * c)).add(&obs.projection().scale(half));
    t = t.add(&vector_covector(obs.u(), s.data()).scale(1.0 / c));
    t = t.add(&vector_covector(&g.raise(s.data()), obs.u_flat()).scale(1.0 / c));
    t = t.sub(&vector_covector(&g.raise(split.e.data()), split.e.data()));
    t.sub(&trace_tensor_product(&split.b.sharp(g), &split.b))
}

/// Energy density seen by the observer: u♭·t·u / c².
pub fn observed_energy(t: &Tensor, obs: &Observer) -> f64 {
    let d = obs.dim();
    let mut s = 0.0;
    for a in 0..d {
        for b in 0..d {
            s += obs.u_flat()[a] * t.get(&[a, b]) * obs.u()[b];
        }
    }
    s / (obs.c * obs.c)
}

#[cfg(test)]
mod tests;
