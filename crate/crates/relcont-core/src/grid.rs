//! Uniform tensor-product chart grids and point-major fields over them.
//!
//! A [`Field`] stores `ncomp` reals per grid point, point-major. Tensor-valued
//! fields use the dense component layout of [`crate::tensor::Tensor`];
//! derivative operators append the derivative index as the fastest slot.

use crate::parallel;
use thiserror::Error;

/// Minimum points per refined axis (width of the one-sided edge stencil plus margin).
pub const MIN_POINTS: usize = 5;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GridError {
    #[error("axis {axis}: need lo < hi, got [{lo}, {hi}]")]
    BadBounds { axis: usize, lo: f64, hi: f64 },
    #[error("axis {axis}: {n} points, need at least {min}")]
    TooFewPoints { axis: usize, n: usize, min: usize },
    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("grid has {0} axes; supported 1..=6")]
    BadDimension(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    /// Axes along which every field is known to be constant (symmetry
    /// directions) are never refined and may use fewer points.
    pub frozen: bool,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Axis {
        Axis { lo, hi, n, frozen: false }
    }

    pub fn frozen(lo: f64, hi: f64, n: usize) -> Axis {
        Axis { lo, hi, n, frozen: true }
    }

    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.h()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
    strides: Vec<usize>,
    len: usize,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Grid, GridError> {
        if axes.is_empty() || axes.len() > crate::tensor::index::MAX_DIM {
            return Err(GridError::BadDimension(axes.len()));
        }
        for (i, a) in axes.iter().enumerate() {
            if !(a.lo < a.hi) {
                return Err(GridError::BadBounds { axis: i, lo: a.lo, hi: a.hi });
            }
            let min = if a.frozen { 3 } else { MIN_POINTS };
            if a.n < min {
                return Err(GridError::TooFewPoints { axis: i, n: a.n, min });
            }
        }
        let mut strides = vec![1; axes.len()];
        for i in (0..axes.len() - 1).rev() {
            strides[i] = strides[i + 1] * axes[i + 1].n;
        }
        let len = axes.iter().map(|a| a.n).product();
        Ok(Grid { axes, strides, len })
    }

    /// Same box, `n` points on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64, n: usize) -> Result<Grid, GridError> {
        Grid::new(vec![Axis::new(lo, hi, n); dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn h(&self, axis: usize) -> f64 {
        self.axes[axis].h()
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, mut lin: usize, out: &mut [usize]) {
        for (a, s) in self.strides.iter().enumerate() {
            out[a] = lin / s;
            lin %= s;
        }
    }

    pub fn coords(&self, lin: usize, out: &mut [f64]) {
        for (a, s) in self.strides.iter().enumerate() {
            out[a] = self.axes[a].coord((lin / s) % self.axes[a].n);
        }
    }

    pub fn point(&self, lin: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        self.coords(lin, &mut x);
        x
    }

    /// Nested refinement: level k has (N−1)·2^k + 1 points per refinable axis,
    /// so every coarse point is also a fine point.
    pub fn refined(&self, level: u32) -> Grid {
        let axes = self
            .axes
            .iter()
            .map(|a| if a.frozen { a.clone() } else { Axis { n: (a.n - 1) * (1 << level) + 1, ..a.clone() } })
            .collect();
        Grid::new(axes).expect("refinement keeps a valid grid")
    }

    /// The box shrunk by `margin_cells` cells of this grid on each refinable axis.
    pub fn interior_region(&self, margin_cells: usize) -> Region {
        Region {
            lo: self.axes.iter().map(|a| if a.frozen { a.lo } else { a.lo + margin_cells as f64 * a.h() }).collect(),
            hi: self.axes.iter().map(|a| if a.frozen { a.hi } else { a.hi - margin_cells as f64 * a.h() }).collect(),
        }
    }

    pub fn whole_region(&self) -> Region {
        Region { lo: self.axes.iter().map(|a| a.lo).collect(), hi: self.axes.iter().map(|a| a.hi).collect() }
    }
}

/// Axis-aligned physical box used to select points for residual norms.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = 1e-9;
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| *x >= l - tol * (1.0 + l.abs()) && *x <= h + tol * (1.0 + h.abs()))
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }
}

/// L∞ and grid-weighted L2 norms of a residual, with the worst point.
#[derive(Clone, Debug, PartialEq)]
pub struct Norms {
    pub linf: f64,
    pub l2: f64,
    pub worst: Option<Vec<f64>>,
    pub points: usize,
}

impl Norms {
    pub fn zero() -> Norms {
        Norms { linf: 0.0, l2: 0.0, worst: None, points: 0 }
    }

    /// Norms of a list of pointwise magnitudes, unit weights.
    pub fn of_values(values: &[f64], points: &[Vec<f64>]) -> Norms {
        let mut n = Norms::zero();
        let mut s = 0.0;
        for (v, x) in values.iter().zip(points) {
            s += v * v;
            if !(v.abs() <= n.linf) {
                n.linf = if v.is_nan() { f64::INFINITY } else { v.abs() };
                n.worst = Some(x.clone());
            }
        }
        n.points = values.len();
        n.l2 = if values.is_empty() { 0.0 } else { (s / values.len() as f64).sqrt() };
        n
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    ncomp: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid, ncomp: usize) -> Field {
        Field { grid: grid.clone(), ncomp, data: vec![0.0; grid.len() * ncomp] }
    }

    pub fn from_data(grid: &Grid, ncomp: usize, data: Vec<f64>) -> Field {
        assert_eq!(data.len(), grid.len() * ncomp, "field data length");
        Field { grid: grid.clone(), ncomp, data }
    }

    /// Sample `f(x, out)` at every grid point.
    pub fn from_fn<F>(grid: &Grid, ncomp: usize, f: F) -> Field
    where
        F: Fn(&[f64], &mut [f64]) + Sync + Send,
    {
        let mut data = vec![0.0; grid.len() * ncomp];
        let d = grid.dim();
        parallel::fill_chunks(&mut data, ncomp, |p, out| {
            let mut x = [0.0; crate::tensor::index::MAX_DIM];
            grid.coords(p, &mut x[..d]);
            f(&x[..d], out)
        });
        Field { grid: grid.clone(), ncomp, data }
    }

    /// Build from a per-point closure `f(p, out)` (p = linear point index), the
    /// workhorse for pointwise maps over other fields.
    pub fn from_points<F>(grid: &Grid, ncomp: usize, f: F) -> Field
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        let mut data = vec![0.0; grid.len() * ncomp];
        parallel::fill_chunks(&mut data, ncomp, f);
        Field { grid: grid.clone(), ncomp, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn at(&self, p: usize) -> &[f64] {
        &self.data[p * self.ncomp..(p + 1) * self.ncomp]
    }

    pub fn map<F>(&self, ncomp: usize, f: F) -> Field
    where
        F: Fn(&[f64], &mut [f64]) + Sync + Send,
    {
        Field::from_points(&self.grid, ncomp, |p, out| f(self.at(p), out))
    }

    pub fn add(&self, other: &Field) -> Field {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, s: f64) -> Field {
        Field { grid: self.grid.clone(), ncomp: self.ncomp, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// self + a·other.
    pub fn axpy(&self, a: f64, other: &Field) -> Field {
        assert_eq!(self.ncomp, other.ncomp, "component count");
        assert_eq!(self.data.len(), other.data.len(), "grid size");
        let data = self.data.iter().zip(&other.data).map(|(x, y)| x + a * y).collect();
        Field { grid: self.grid.clone(), ncomp: self.ncomp, data }
    }

    /// Value at an arbitrary point by tensor-product quadratic Lagrange
    /// interpolation on the three nodes nearest to `x` along each refinable
    /// axis (extrapolating from the edge nodes outside the box); frozen axes
    /// use the nearest node.
    pub fn interpolate(&self, x: &[f64]) -> Vec<f64> {
        self.interpolate_inset(x, 0)
    }

    /// As [`Field::interpolate`], but the stencils avoid the `margin` outermost
    /// nodes of each refinable axis that has room for it. Used for data whose
    /// edge values are less accurate, such as repeated one-sided differences.
    pub fn interpolate_inset(&self, x: &[f64], margin: usize) -> Vec<f64> {
        let d = self.grid.dim();
        let mut stencils: Vec<([usize; 3], [f64; 3], usize)> = Vec::with_capacity(d);
        for (a, ax) in self.grid.axes.iter().enumerate() {
            let t = (x[a] - ax.lo) / ax.h();
            if ax.frozen {
                let i = t.round().clamp(0.0, (ax.n - 1) as f64) as usize;
                stencils.push(([i, i, i], [1.0, 0.0, 0.0], 1));
                continue;
            }
            let m = if ax.n >= 3 + 2 * margin { margin as isize } else { 0 };
            let i0 = (t.round() as isize - 1).clamp(m, ax.n as isize - 3 - m) as usize;
            let s = t - i0 as f64;
            let w = [0.5 * (s - 1.0) * (s - 2.0), -s * (s - 2.0), 0.5 * s * (s - 1.0)];
            stencils.push(([i0, i0 + 1, i0 + 2], w, 3));
        }
        let nc = self.ncomp;
        let mut out = vec![0.0; nc];
        let mut k = vec![0usize; d];
        let mut idx = vec![0usize; d];
        'outer: loop {
            let mut w = 1.0;
            for a in 0..d {
                idx[a] = stencils[a].0[k[a]];
                w *= stencils[a].1[k[a]];
            }
            let p = self.grid.index(&idx);
            for (o, v) in out.iter_mut().zip(self.at(p)) {
                *o += w * v;
            }
            for a in (0..d).rev() {
                k[a] += 1;
                if k[a] < stencils[a].2 {
                    continue 'outer;
                }
                k[a] = 0;
            }
            break;
        }
        out
    }

    /// ∂f/∂x^axis with the 2nd-order central stencil inside and the 2nd-order
    /// one-sided stencil (−3f₀ + 4f₁ − f₂)/2h at the two edges, summed as
    /// differences so constant data has an exactly zero derivative.
    pub fn partial(&self, axis: usize) -> Result<Field, GridError> {
        let d = self.grid.dim();
        if axis >= d {
            return Err(GridError::AxisOutOfRange { axis, dim: d });
        }
        let nc = self.ncomp;
        let n = self.grid.axes[axis].n;
        let s = self.grid.strides[axis];
        let inv2h = 1.0 / (2.0 * self.grid.h(axis));
        let mut data = vec![0.0; self.data.len()];
        parallel::fill_chunks(&mut data, nc, |p, out| {
            let i = (p / s) % n;
            let f = |k: isize| &self.data[((p as isize + k * s as isize) as usize) * nc..][..nc];
            if i == 0 {
                let (f0, f1, f2) = (f(0), f(1), f(2));
                for c in 0..nc {
                    out[c] = (3.0 * (f1[c] - f0[c]) - (f2[c] - f1[c])) * inv2h;
                }
            } else if i + 1 == n {
                let (f0, f1, f2) = (f(0), f(-1), f(-2));
                for c in 0..nc {
                    out[c] = (3.0 * (f0[c] - f1[c]) - (f1[c] - f2[c])) * inv2h;
                }
            } else {
                let (fp, fm) = (f(1), f(-1));
                for c in 0..nc {
                    out[c] = (fp[c] - fm[c]) * inv2h;
                }
            }
        });
        Ok(Field { grid: self.grid.clone(), ncomp: nc, data })
    }

    /// All partials, derivative index appended last: out[c·D + a] = ∂_a f_c.
    pub fn gradient(&self) -> Field {
        let d = self.grid.dim();
        let parts: Vec<Field> = (0..d).map(|a| self.partial(a).expect("axis in range")).collect();
        let nc = self.ncomp;
        Field::from_points(&self.grid, nc * d, |p, out| {
            for (a, part) in parts.iter().enumerate() {
                let v = part.at(p);
                for c in 0..nc {
                    out[c * d + a] = v[c];
                }
            }
        })
    }

    /// Norms of the pointwise max-abs component over points inside `region`.
    pub fn norms(&self, region: &Region) -> Norms {
        self.norms_by(region, |v| v.iter().fold(0.0f64, |m, x| m.max(x.abs())))
    }

    /// Norms of a pointwise magnitude `mag(values)` over `region`. L2 is the
    /// grid-weighted RMS sqrt(Σ mag² ΔV / Σ ΔV) over the selected points.
    pub fn norms_by<M>(&self, region: &Region, mag: M) -> Norms
    where
        M: Fn(&[f64]) -> f64 + Sync + Send,
    {
        let d = self.grid.dim();
        let picked: Vec<Option<(f64, usize)>> = parallel::map_indices(self.grid.len(), |p| {
            let mut x = [0.0; crate::tensor::index::MAX_DIM];
            self.grid.coords(p, &mut x[..d]);
            region.contains(&x[..d]).then(|| (mag(self.at(p)), p))
        });
        let mut n = Norms::zero();
        let mut s = 0.0;
        let mut worst = None;
        for (v, p) in picked.into_iter().flatten() {
            n.points += 1;
            s += v * v;
            if !(v.abs() <= n.linf) {
                n.linf = if v.is_nan() { f64::INFINITY } else { v.abs() };
                worst = Some(p);
            }
        }
        if n.points > 0 {
            // uniform cells: Σ v² ΔV / Σ ΔV is the point mean
            n.l2 = (s / n.points as f64).sqrt();
        }
        n.worst = worst.map(|p| self.grid.point(p));
        n
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}
