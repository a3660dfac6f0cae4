//! Dense antisymmetric arrays: differential forms (all slots down) and
//! multivectors (all slots up).
//!
//! Normalizations: (dx⁰∧dx¹)₀₁ = 1, (i_vα)_{b…} = v^a α_{ab…},
//! ⟨α,β⟩ = (1/k!) α_I β^I, ⋆β = (1/k!) β^{a₁…a_k} μ_{a₁…a_k b…}, so that
//! α∧⋆β = ⟨α,β⟩ μ.

use super::index::{combinations, complement, linear, perm_sign, permutations, pow_usize, unlinear};
use super::metric::{Metric, Orientation};
use super::TensorError;
use std::fmt;
use std::marker::PhantomData;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lower;
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Upper;

pub struct Alt<V> {
    dim: usize,
    deg: usize,
    data: Vec<f64>,
    _v: PhantomData<V>,
}

/// Differential k-form at a point.
pub type Form = Alt<Lower>;
/// k-vector (totally antisymmetric contravariant tensor) at a point.
pub type KVector = Alt<Upper>;

impl<V> Clone for Alt<V> {
    fn clone(&self) -> Self {
        Alt { dim: self.dim, deg: self.deg, data: self.data.clone(), _v: PhantomData }
    }
}

impl<V> PartialEq for Alt<V> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.deg == other.deg && self.data == other.data
    }
}

impl<V> fmt::Debug for Alt<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alt(dim={}, deg={}, ", self.dim, self.deg)?;
        f.debug_list().entries(self.increasing()).finish()?;
        write!(f, ")")
    }
}

impl<V> Alt<V> {
    pub fn zero(dim: usize, deg: usize) -> Self {
        assert!(deg <= dim, "degree {deg} exceeds dimension {dim}");
        Alt { dim, deg, data: vec![0.0; pow_usize(dim, deg)], _v: PhantomData }
    }

    /// Build from values on increasing index sets, in [`combinations`] order.
    pub fn from_increasing(dim: usize, deg: usize, vals: &[f64]) -> Self {
        let combos = combinations(dim, deg);
        assert_eq!(vals.len(), combos.len(), "expected {} independent components", combos.len());
        let mut out = Self::zero(dim, deg);
        for (set, v) in combos.iter().zip(vals) {
            out.set_increasing(set, *v);
        }
        out
    }

    /// Build from a function evaluated on increasing index sets.
    pub fn from_fn(dim: usize, deg: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut out = Self::zero(dim, deg);
        for set in combinations(dim, deg) {
            let v = f(set);
            out.set_increasing(set, v);
        }
        out
    }

    /// Accept a dense array only if it is antisymmetric (to 1e-12 relative).
    pub fn from_dense(dim: usize, deg: usize, data: Vec<f64>) -> Result<Self, TensorError> {
        if data.len() != pow_usize(dim, deg) {
            return Err(TensorError::Shape(format!("{} components for degree {deg} in dim {dim}", data.len())));
        }
        let candidate = Alt { dim, deg, data, _v: PhantomData };
        let projected = Self::antisymmetrize(dim, deg, &candidate.data);
        let scale = candidate.max_abs().max(1.0);
        if candidate.dist(&projected) > 1e-12 * scale {
            return Err(TensorError::NotAntisymmetric);
        }
        Ok(projected)
    }

    /// Antisymmetric projection (1/k!) Σ_σ sgn σ T_{σ(I)} of a dense rank-k array.
    pub fn antisymmetrize(dim: usize, deg: usize, data: &[f64]) -> Self {
        let perms = permutations(deg);
        let norm = perms.len() as f64;
        Self::from_fn(dim, deg, |set| {
            let mut idx = vec![0; deg];
            let mut s = 0.0;
            for (p, sign) in perms {
                for (slot, &q) in p.iter().enumerate() {
                    idx[slot] = set[q];
                }
                s += sign * data[linear(&idx, dim)];
            }
            s / norm
        })
    }

    fn set_increasing(&mut self, set: &[usize], v: f64) {
        let mut idx = vec![0; self.deg];
        for (p, sign) in permutations(self.deg) {
            for (slot, &q) in p.iter().enumerate() {
                idx[slot] = set[q];
            }
            self.data[linear(&idx, self.dim)] = sign * v;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    /// Dense row-major components (length dim^deg).
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[linear(idx, self.dim)]
    }

    /// Independent components on increasing index sets.
    pub fn increasing(&self) -> Vec<f64> {
        combinations(self.dim, self.deg).iter().map(|s| self.get(s)).collect()
    }

    pub fn scalar(&self) -> f64 {
        assert_eq!(self.deg, 0);
        self.data[0]
    }

    pub fn scale(&self, s: f64) -> Self {
        Alt { dim: self.dim, deg: self.deg, data: self.data.iter().map(|v| v * s).collect(), _v: PhantomData }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    /// self + a·other
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        assert_eq!((self.dim, self.deg), (other.dim, other.deg), "shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(x, y)| x + a * y).collect();
        Alt { dim: self.dim, deg: self.deg, data, _v: PhantomData }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// α∧β with (dx⁰∧dx¹)₀₁ = 1.
    pub fn wedge(&self, other: &Self) -> Result<Self, TensorError> {
        assert_eq!(self.dim, other.dim);
        let (k, l, d) = (self.deg, other.deg, self.dim);
        if k + l > d {
            return Err(TensorError::DegreeOverflow { degree: k + l, dim: d });
        }
        let mut buf = Vec::with_capacity(k + l);
        Ok(Self::from_fn(d, k + l, |set| {
            let mut s = 0.0;
            for sub in combinations(k + l, k) {
                let a: Vec<usize> = sub.iter().map(|&i| set[i]).collect();
                let b: Vec<usize> = complement(sub, k + l).iter().map(|&i| set[i]).collect();
                buf.clear();
                buf.extend_from_slice(sub);
                buf.extend(complement(sub, k + l));
                s += perm_sign(&buf) * self.get(&a) * other.get(&b);
            }
            s
        }))
    }

    pub(crate) fn from_raw(dim: usize, deg: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), pow_usize(dim, deg));
        Alt { dim, deg, data, _v: PhantomData }
    }

    /// Apply `m` (row-major dim×dim) to every slot: out^{a…} = m^{a b} … in_{b…}.
    fn transform_all(&self, m: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut cur = self.data.clone();
        let mut idx = vec![0; self.deg];
        for slot in 0..self.deg {
            let mut next = vec![0.0; cur.len()];
            let stride = pow_usize(d, self.deg - 1 - slot);
            for (lin, out) in next.iter_mut().enumerate() {
                unlinear(lin, d, self.deg, &mut idx);
                let a = idx[slot];
                let base = lin - a * stride;
                let mut s = 0.0;
                for b in 0..d {
                    s += m[a * d + b] * cur[base + b * stride];
                }
                *out = s;
            }
            cur = next;
        }
        cur
    }
}

impl Form {
    /// 1-form from covector components.
    pub fn covector(alpha: &[f64]) -> Form {
        Form::from_raw(alpha.len(), 1, alpha.to_vec())
    }

    pub fn constant(dim: usize, v: f64) -> Form {
        Form::from_raw(dim, 0, vec![v])
    }

    /// Interior product (i_vα)_{b…} = v^a α_{a b…}.
    pub fn interior(&self, v: &[f64]) -> Result<Form, TensorError> {
        if self.deg == 0 {
            return Err(TensorError::ZeroDegree("interior product"));
        }
        let d = self.dim;
        let stride = pow_usize(d, self.deg - 1);
        let mut data = vec![0.0; stride];
        for (lin, out) in data.iter_mut().enumerate() {
            *out = (0..d).map(|a| v[a] * self.data[a * stride + lin]).sum();
        }
        Ok(Form::from_raw(d, self.deg - 1, data))
    }

    /// Contraction with a multivector: (i_Xα)_{b…} = (1/k!) X^{a₁…a_k} α_{a₁…a_k b…}.
    pub fn interior_kvector(&self, x: &KVector) -> Result<Form, TensorError> {
        let k = x.deg();
        if k > self.deg {
            return Err(TensorError::DegreeOverflow { degree: k, dim: self.deg });
        }
        let d = self.dim;
        let rest = pow_usize(d, self.deg - k);
        let mut data = vec![0.0; rest];
        for set in combinations(d, k) {
            let xa = x.get(set);
            if xa == 0.0 {
                continue;
            }
            let off = linear(set, d) * rest;
            for (lin, out) in data.iter_mut().enumerate() {
                *out += xa * self.data[off + lin];
            }
        }
        Ok(Form::from_raw(d, self.deg - k, data))
    }

    /// α♯, all slots raised.
    pub fn sharp(&self, g: &Metric) -> KVector {
        KVector::from_raw(self.dim, self.deg, self.transform_all(g.inverse_components()))
    }

    /// Hodge star: (⋆β)_B = β^A · sign(A,B) · o·√|g| with A the complement of B.
    pub fn hodge(&self, g: &Metric, o: Orientation) -> Form {
        self.sharp(g).star_components(g, o)
    }

    /// ⟨α,β⟩ = (1/k!) α_I β^I.
    pub fn inner(&self, other: &Form, g: &Metric) -> Result<f64, TensorError> {
        if self.deg != other.deg {
            return Err(TensorError::DegreeMismatch(self.deg, other.deg));
        }
        Ok(other.sharp(g).pairing(self))
    }

    /// |α|² = ⟨α,α⟩ (indefinite).
    pub fn norm2(&self, g: &Metric) -> f64 {
        self.sharp(g).pairing(self)
    }
}

impl KVector {
    pub fn vector(v: &[f64]) -> KVector {
        KVector::from_raw(v.len(), 1, v.to_vec())
    }

    /// X♭, all slots lowered.
    pub fn flat(&self, g: &Metric) -> Form {
        Form::from_raw(self.dim, self.deg, self.transform_all(g.components()))
    }

    /// (1/k!) X^I α_I.
    pub fn pairing(&self, alpha: &Form) -> f64 {
        assert_eq!(self.deg, alpha.deg());
        combinations(self.dim, self.deg).iter().map(|s| self.get(s) * alpha.get(s)).sum()
    }

    /// ⋆X := (⋆X♭)♯.
    pub fn hodge(&self, g: &Metric, o: Orientation) -> KVector {
        self.star_components(g, o).sharp(g)
    }

    /// i_X μ, the canonical k-vector → (n+1−k)-form isomorphism.
    pub fn into_volume(&self, g: &Metric, o: Orientation) -> Form {
        self.star_components(g, o)
    }

    /// (1/k!) X^{a₁…a_k} μ_{a₁…a_k b…} for contravariant components X.
    fn star_components(&self, g: &Metric, o: Orientation) -> Form {
        let d = self.dim;
        let vol = o.sign() * g.sqrt_abs_det();
        Form::from_fn(d, d - self.deg, |b| {
            let a = complement(b, d);
            let mut perm = a.clone();
            perm.extend_from_slice(b);
            perm_sign(&perm) * vol * self.get(&a)
        })
    }

    /// (i_ω X)^{b…} = ω_a X^{a b…}.
    pub fn interior_covector(&self, omega: &[f64]) -> Result<KVector, TensorError> {
        if self.deg == 0 {
            return Err(TensorError::ZeroDegree("interior product"));
        }
        let d = self.dim;
        let stride = pow_usize(d, self.deg - 1);
        let mut data = vec![0.0; stride];
        for (lin, out) in data.iter_mut().enumerate() {
            *out = (0..d).map(|a| omega[a] * self.data[a * stride + lin]).sum();
        }
        Ok(KVector::from_raw(d, self.deg - 1, data))
    }
}

/// Volume form μ = o·√|det g|·ε.
pub fn volume_form(g: &Metric, o: Orientation) -> Form {
    KVector::from_raw(g.dim(), 0, vec![1.0]).star_components(g, o)
}
