use super::form::{Form, KVector};
use super::index::{combinations, linear, pow_usize, unlinear};
use super::metric::Metric;
use super::TensorError;

/// Variance of one tensor slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Up,
    Down,
}

impl Slot {
    pub fn flipped(self) -> Slot {
        match self {
            Slot::Up => Slot::Down,
            Slot::Down => Slot::Up,
        }
    }
}

/// Dense tensor with an explicit variance per slot; row-major, first slot slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    dim: usize,
    slots: Vec<Slot>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zero(dim: usize, slots: &[Slot]) -> Tensor {
        Tensor { dim, slots: slots.to_vec(), data: vec![0.0; pow_usize(dim, slots.len())] }
    }

    pub fn from_data(dim: usize, slots: &[Slot], data: Vec<f64>) -> Result<Tensor, TensorError> {
        if data.len() != pow_usize(dim, slots.len()) {
            return Err(TensorError::Shape(format!("{} components for rank {} in dim {dim}", data.len(), slots.len())));
        }
        Ok(Tensor { dim, slots: slots.to_vec(), data })
    }

    pub fn from_fn(dim: usize, slots: &[Slot], mut f: impl FnMut(&[usize]) -> f64) -> Tensor {
        let rank = slots.len();
        let mut idx = vec![0; rank];
        let data = (0..pow_usize(dim, rank))
            .map(|lin| {
                unlinear(lin, dim, rank, &mut idx);
                f(&idx)
            })
            .collect();
        Tensor { dim, slots: slots.to_vec(), data }
    }

    pub fn scalar(dim: usize, v: f64) -> Tensor {
        Tensor { dim, slots: vec![], data: vec![v] }
    }

    /// δ^μ_ν
    pub fn identity(dim: usize) -> Tensor {
        Tensor::from_fn(dim, &[Slot::Up, Slot::Down], |i| if i[0] == i[1] { 1.0 } else { 0.0 })
    }

    pub fn from_form(f: &Form) -> Tensor {
        Tensor { dim: f.dim(), slots: vec![Slot::Down; f.deg()], data: f.data().to_vec() }
    }

    pub fn from_kvector(x: &KVector) -> Tensor {
        Tensor { dim: x.dim(), slots: vec![Slot::Up; x.deg()], data: x.data().to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[linear(idx, self.dim)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let lin = linear(idx, self.dim);
        self.data[lin] = v;
    }

    pub fn scale(&self, s: f64) -> Tensor {
        Tensor { dim: self.dim, slots: self.slots.clone(), data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.axpy(-1.0, other)
    }

    /// self + a·other; variances must match.
    pub fn axpy(&self, a: f64, other: &Tensor) -> Tensor {
        assert_eq!(self.slots, other.slots, "variance mismatch");
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(x, y)| x + a * y).collect();
        Tensor { dim: self.dim, slots: self.slots.clone(), data }
    }

    pub fn add_assign_scaled(&mut self, a: f64, other: &Tensor) {
        assert_eq!(self.slots, other.slots, "variance mismatch");
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dist(&self, other: &Tensor) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn outer(&self, other: &Tensor) -> Tensor {
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&other.slots);
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Tensor { dim: self.dim, slots, data }
    }

    /// Multiply slot `slot` by the matrix m: out[..a..] = Σ_b m[a][b] in[..b..].
    fn transform_slot(&self, slot: usize, m: &[f64], new: Slot) -> Tensor {
        let d = self.dim;
        let rank = self.rank();
        let stride = pow_usize(d, rank - 1 - slot);
        let mut idx = vec![0; rank];
        let mut data = vec![0.0; self.data.len()];
        for (lin, out) in data.iter_mut().enumerate() {
            unlinear(lin, d, rank, &mut idx);
            let a = idx[slot];
            let base = lin - a * stride;
            *out = (0..d).map(|b| m[a * d + b] * self.data[base + b * stride]).sum();
        }
        let mut slots = self.slots.clone();
        slots[slot] = new;
        Tensor { dim: d, slots, data }
    }

    pub fn raise_index(&self, slot: usize, g: &Metric) -> Result<Tensor, TensorError> {
        match self.slots.get(slot) {
            None => Err(TensorError::SlotOutOfRange { slot, rank: self.rank() }),
            Some(Slot::Up) => Err(TensorError::VarianceMismatch { slot, expected: Slot::Down }),
            Some(Slot::Down) => Ok(self.transform_slot(slot, g.inverse_components(), Slot::Up)),
        }
    }

    pub fn lower_index(&self, slot: usize, g: &Metric) -> Result<Tensor, TensorError> {
        match self.slots.get(slot) {
            None => Err(TensorError::SlotOutOfRange { slot, rank: self.rank() }),
            Some(Slot::Down) => Err(TensorError::VarianceMismatch { slot, expected: Slot::Up }),
            Some(Slot::Up) => Ok(self.transform_slot(slot, g.components(), Slot::Down)),
        }
    }

    /// Lower every upper slot.
    pub fn all_lowered(&self, g: &Metric) -> Tensor {
        let mut t = self.clone();
        for s in 0..self.rank() {
            if t.slots[s] == Slot::Up {
                t = t.transform_slot(s, g.components(), Slot::Down);
            }
        }
        t
    }

    /// Full contraction Σ_I κ_I π^I with a tensor of dual variance (no factorials).
    pub fn contract_full(&self, other: &Tensor) -> Result<f64, TensorError> {
        if self.rank() != other.rank() || self.slots.iter().zip(&other.slots).any(|(a, b)| *a == *b) {
            return Err(TensorError::NotDual);
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// κ̂: two extra slots (Up, Down) appended. With the extra pair written
    /// (a, b),
    /// κ̂[I, a, b] = Σ_{r down} κ[I with i_r→b] δ^a_{i_r} − Σ_{r up} κ[I with i_r→a] δ^{i_r}_b,
    /// so that (£_ζκ)_I = ζ^γ∂_γκ_I + κ̂[I,a,b] ∂_aζ^b.
    pub fn hat_lift(&self) -> Tensor {
        let d = self.dim;
        let rank = self.rank();
        let mut slots = self.slots.clone();
        slots.push(Slot::Up);
        slots.push(Slot::Down);
        let mut sub = vec![0; rank];
        Tensor::from_fn(d, &slots, |idx| {
            let (a, b) = (idx[rank], idx[rank + 1]);
            let mut s = 0.0;
            for r in 0..rank {
                sub.copy_from_slice(&idx[..rank]);
                match self.slots[r] {
                    Slot::Down if idx[r] == a => {
                        sub[r] = b;
                        s += self.get(&sub);
                    }
                    Slot::Up if idx[r] == b => {
                        sub[r] = a;
                        s -= self.get(&sub);
                    }
                    _ => {}
                }
            }
            s
        })
    }

    /// Contract the first `rank(other)` slots of self against all slots of `other`
    /// (dual variances), leaving the trailing slots.
    pub fn contract_leading(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        let k = other.rank();
        if k > self.rank() || self.slots[..k].iter().zip(&other.slots).any(|(a, b)| *a == *b) {
            return Err(TensorError::NotDual);
        }
        let rest = pow_usize(self.dim, self.rank() - k);
        let mut data = vec![0.0; rest];
        for (lin, w) in other.data.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            for (j, out) in data.iter_mut().enumerate() {
                *out += w * self.data[lin * rest + j];
            }
        }
        Ok(Tensor { dim: self.dim, slots: self.slots[k..].to_vec(), data })
    }

    /// Transpose of a rank-2 tensor.
    pub fn transpose(&self) -> Tensor {
        assert_eq!(self.rank(), 2);
        let mut slots = self.slots.clone();
        slots.swap(0, 1);
        Tensor::from_fn(self.dim, &slots, |i| self.get(&[i[1], i[0]]))
    }

    /// Trace of a (1,1) tensor.
    pub fn trace(&self) -> f64 {
        assert_eq!(self.rank(), 2);
        assert_ne!(self.slots[0], self.slots[1], "trace needs one upper and one lower slot");
        (0..self.dim).map(|a| self.get(&[a, a])).sum()
    }

    /// Antisymmetric part of a rank-2 tensor (max-abs), a symmetry diagnostic.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.rank(), 2);
        let d = self.dim;
        let mut m: f64 = 0.0;
        for a in 0..d {
            for b in 0..a {
                m = m.max((self.get(&[a, b]) - self.get(&[b, a])).abs());
            }
        }
        m
    }
}

/// (v ⊗ ω)^μ_ν = v^μ ω_ν.
pub fn vector_covector(v: &[f64], w: &[f64]) -> Tensor {
    let d = v.len();
    Tensor::from_fn(d, &[Slot::Up, Slot::Down], |i| v[i[0]] * w[i[1]])
}

/// (X ⊗tr Y)^μ_ν = (1/(k−1)!) X^{μα…} Y_{να…} for a k-vector X and k-form Y.
/// For k = 0 there is no slot to trace and the result is zero.
pub fn trace_tensor_product(x: &KVector, y: &Form) -> Tensor {
    let d = x.dim();
    let k = x.deg();
    assert_eq!(k, y.deg(), "degree mismatch");
    if k == 0 {
        return Tensor::zero(d, &[Slot::Up, Slot::Down]);
    }
    // (1/(k−1)!) Σ over all (k−1)-tuples = Σ over increasing (k−1)-sets
    let sets = combinations(d, k - 1);
    let mut ia = vec![0; k];
    let mut ib = vec![0; k];
    Tensor::from_fn(d, &[Slot::Up, Slot::Down], |i| {
        let mut s = 0.0;
        for set in sets {
            ia[0] = i[0];
            ib[0] = i[1];
            ia[1..].copy_from_slice(set);
            ib[1..].copy_from_slice(set);
            s += x.get(&ia) * y.get(&ib);
        }
        s
    })
}

/// The full (unnormalized) contraction X^{I}Y_{I} divided by k!, i.e. X : Y.
pub fn colon(x: &KVector, y: &Form) -> f64 {
    x.pairing(y)
}
