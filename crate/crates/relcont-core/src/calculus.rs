//! Differential operators on chart grids: Levi-Civita connection, covariant
//! derivative and divergence, d and δ, Lie derivatives, the Lie-derivative
//! integration-by-parts identities, and curvature.
//!
//! Every operator is built from [`Field::partial`], so identities that hold
//! algebraically for exact derivatives hold to O(h²) (or exactly, when the
//! algebra only permutes the same discrete partials).

use crate::grid::{Field, Grid, GridError, Norms, Region};
use crate::tensor::index::{combinations, pow_usize, unlinear, MAX_DIM};
use crate::tensor::{Form, KVector, Metric, Orientation, Slot, Tensor, TensorError};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CalculusError {
    #[error("metric invalid at x = {point:?}: {source}")]
    Metric { point: Vec<f64>, source: TensorError },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("{0}")]
    Shape(String),
}

/// A tensor field: slot variances plus a point-major [`Field`] with d^rank
/// components per point.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    slots: Vec<Slot>,
    field: Field,
}

impl TensorField {
    pub fn new(slots: &[Slot], field: Field) -> TensorField {
        let d = field.grid().dim();
        assert_eq!(field.ncomp(), pow_usize(d, slots.len()), "component count must be d^rank");
        TensorField { slots: slots.to_vec(), field }
    }

    pub fn from_fn<F>(grid: &Grid, slots: &[Slot], f: F) -> TensorField
    where
        F: Fn(&[f64], &mut [f64]) + Sync + Send,
    {
        TensorField::new(slots, Field::from_fn(grid, pow_usize(grid.dim(), slots.len()), f))
    }

    pub fn from_points<F>(grid: &Grid, slots: &[Slot], f: F) -> TensorField
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        TensorField::new(slots, Field::from_points(grid, pow_usize(grid.dim(), slots.len()), f))
    }

    pub fn scalar(field: Field) -> TensorField {
        assert_eq!(field.ncomp(), 1);
        TensorField { slots: vec![], field }
    }

    /// Form field from a per-point constructor.
    pub fn from_forms<F>(grid: &Grid, deg: usize, f: F) -> TensorField
    where
        F: Fn(usize) -> Form + Sync + Send,
    {
        TensorField::from_points(grid, &vec![Slot::Down; deg], |p, out| out.copy_from_slice(f(p).data()))
    }

    pub fn from_tensors<F>(grid: &Grid, slots: &[Slot], f: F) -> TensorField
    where
        F: Fn(usize) -> Tensor + Sync + Send,
    {
        TensorField::from_points(grid, slots, |p, out| out.copy_from_slice(f(p).data()))
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    pub fn at(&self, p: usize) -> &[f64] {
        self.field.at(p)
    }

    pub fn tensor_at(&self, p: usize) -> Tensor {
        Tensor::from_data(self.dim(), &self.slots, self.at(p).to_vec()).expect("shape")
    }

    /// The value at p as a form (all slots must be covariant). Antisymmetry is
    /// trusted: form fields are only built from forms.
    pub fn form_at(&self, p: usize) -> Form {
        debug_assert!(self.slots.iter().all(|s| *s == Slot::Down));
        Form::from_raw(self.dim(), self.rank(), self.at(p).to_vec())
    }

    pub fn kvector_at(&self, p: usize) -> KVector {
        debug_assert!(self.slots.iter().all(|s| *s == Slot::Up));
        KVector::from_raw(self.dim(), self.rank(), self.at(p).to_vec())
    }

    pub fn add(&self, other: &TensorField) -> TensorField {
        assert_eq!(self.slots, other.slots, "variance mismatch");
        TensorField { slots: self.slots.clone(), field: self.field.add(&other.field) }
    }

    pub fn sub(&self, other: &TensorField) -> TensorField {
        assert_eq!(self.slots, other.slots, "variance mismatch");
        TensorField { slots: self.slots.clone(), field: self.field.sub(&other.field) }
    }

    pub fn scale(&self, s: f64) -> TensorField {
        TensorField { slots: self.slots.clone(), field: self.field.scale(s) }
    }

    pub fn norms(&self, region: &Region) -> Norms {
        self.field.norms(region)
    }

    /// ∂_a of every component, derivative slot appended (Down).
    pub fn partial_gradient(&self) -> TensorField {
        let mut slots = self.slots.clone();
        slots.push(Slot::Down);
        TensorField { slots, field: self.field.gradient() }
    }
}

/// Metric sampled on a grid with per-point inverse/volume data and
/// finite-difference Christoffel symbols Γ^λ_{μν} (layout [λ][μ][ν]).
#[derive(Clone, Debug)]
pub struct MetricField {
    metrics: Vec<Metric>,
    g: TensorField,
    christoffel: Field,
}

impl MetricField {
    /// Sample g_{μν}(x) (row-major d×d) and build the connection by FD.
    pub fn from_fn<F>(grid: &Grid, f: F) -> Result<MetricField, CalculusError>
    where
        F: Fn(&[f64], &mut [f64]) + Sync + Send,
    {
        MetricField::from_components(TensorField::from_fn(grid, &[Slot::Down, Slot::Down], f))
    }

    pub fn minkowski(grid: &Grid, c: f64) -> MetricField {
        let d = grid.dim();
        MetricField::from_fn(grid, |_, g| {
            g.fill(0.0);
            g[0] = -c * c;
            for i in 1..d {
                g[i * d + i] = 1.0;
            }
        })
        .expect("Minkowski metric is valid")
    }

    pub fn from_components(g: TensorField) -> Result<MetricField, CalculusError> {
        if g.slots() != [Slot::Down, Slot::Down] {
            return Err(CalculusError::Shape("metric field must be (0,2)".into()));
        }
        let grid = g.grid().clone();
        let d = grid.dim();
        let metrics: Vec<Result<Metric, CalculusError>> = crate::parallel::map_indices(grid.len(), |p| {
            Metric::new(d, g.at(p)).map_err(|source| CalculusError::Metric { point: grid.point(p), source })
        });
        let metrics: Vec<Metric> = metrics.into_iter().collect::<Result<_, _>>()?;
        let dg = g.field().gradient();
        let christoffel = Field::from_points(&grid, d * d * d, |p, out| {
            let m = &metrics[p];
            let dgp = dg.at(p);
            // ∂_a g_{bc} at dgp[(b d + c) d + a]
            let dgi = |b: usize, c: usize, a: usize| dgp[(b * d + c) * d + a];
            for l in 0..d {
                for mu in 0..d {
                    for nu in mu..d {
                        let mut s = 0.0;
                        for sg in 0..d {
                            let gi = m.ginv(l, sg);
                            if gi != 0.0 {
                                s += gi * (dgi(sg, nu, mu) + dgi(sg, mu, nu) - dgi(mu, nu, sg));
                            }
                        }
                        out[(l * d + mu) * d + nu] = 0.5 * s;
                        out[(l * d + nu) * d + mu] = 0.5 * s;
                    }
                }
            }
        });
        Ok(MetricField { metrics, g, christoffel })
    }

    pub fn grid(&self) -> &Grid {
        self.g.grid()
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn metric(&self, p: usize) -> &Metric {
        &self.metrics[p]
    }

    pub fn components(&self) -> &TensorField {
        &self.g
    }

    /// Γ^λ_{μν} at p, layout [λ][μ][ν].
    pub fn christoffel(&self, p: usize) -> &[f64] {
        self.christoffel.at(p)
    }

    pub fn christoffel_field(&self) -> &Field {
        &self.christoffel
    }

    /// Volume form μ(g) as a field.
    pub fn volume_form(&self, o: Orientation) -> TensorField {
        TensorField::from_forms(self.grid(), self.dim(), |p| crate::tensor::volume_form(self.metric(p), o))
    }
}

fn strides(d: usize, rank: usize) -> [usize; MAX_DIM] {
    let mut s = [1usize; MAX_DIM];
    for r in 0..rank {
        s[r] = pow_usize(d, rank - 1 - r);
    }
    s
}

/// ∇T, derivative slot appended: (∇T)[I, a] = ∇_a T_I.
pub fn covariant_derivative(t: &TensorField, m: &MetricField) -> TensorField {
    let d = t.dim();
    let rank = t.rank();
    let grad = t.field().gradient();
    let st = strides(d, rank);
    let slots = t.slots().to_vec();
    let mut out_slots = slots.clone();
    out_slots.push(Slot::Down);
    TensorField::from_points(t.grid(), &out_slots, |p, out| {
        out.copy_from_slice(grad.at(p));
        let gam = m.christoffel(p);
        let tv = t.at(p);
        let mut idx = [0usize; MAX_DIM];
        for lin in 0..tv.len() {
            unlinear(lin, d, rank, &mut idx[..rank]);
            for a in 0..d {
                let mut s = 0.0;
                for r in 0..rank {
                    let ir = idx[r];
                    let base = lin - ir * st[r];
                    match slots[r] {
                        // + Γ^{i_r}_{a m} T[..m..]
                        Slot::Up => {
                            for mm in 0..d {
                                s += gam[(ir * d + a) * d + mm] * tv[base + mm * st[r]];
                            }
                        }
                        // − Γ^m_{a i_r} T[..m..]
                        Slot::Down => {
                            for mm in 0..d {
                                s -= gam[(mm * d + a) * d + ir] * tv[base + mm * st[r]];
                            }
                        }
                    }
                }
                out[lin * d + a] += s;
            }
        }
    })
}

/// div^∇ on the first (contravariant) slot: (div T)_{rest} = ∇_μ T^{μ rest}.
pub fn divergence(t: &TensorField, m: &MetricField) -> Result<TensorField, CalculusError> {
    if t.slots().first() != Some(&Slot::Up) {
        return Err(CalculusError::Shape("divergence needs a leading contravariant slot".into()));
    }
    let d = t.dim();
    let nabla = covariant_derivative(t, m);
    let rest = pow_usize(d, t.rank() - 1);
    Ok(TensorField::from_points(t.grid(), &t.slots()[1..], |p, out| {
        let v = nabla.at(p);
        for (j, o) in out.iter_mut().enumerate() {
            // layout [μ][rest][a], contract μ with a
            *o = (0..d).map(|mu| v[(mu * rest + j) * d + mu]).sum();
        }
    }))
}

/// Exterior derivative of a k-form field (pure FD antisymmetrization).
pub fn exterior_derivative(alpha: &TensorField) -> Result<TensorField, CalculusError> {
    let d = alpha.dim();
    let k = alpha.rank();
    if alpha.slots().iter().any(|s| *s != Slot::Down) {
        return Err(CalculusError::Shape("exterior derivative needs a form field".into()));
    }
    if k + 1 > d {
        return Err(TensorError::DegreeOverflow { degree: k + 1, dim: d }.into());
    }
    let grad = alpha.field().gradient();
    Ok(TensorField::from_forms(alpha.grid(), k + 1, |p| {
        let gv = grad.at(p);
        let mut rest = [0usize; MAX_DIM];
        Form::from_fn(d, k + 1, |j| {
            let mut s = 0.0;
            for r in 0..=k {
                let mut w = 0;
                for (q, &jq) in j.iter().enumerate() {
                    if q != r {
                        rest[w] = jq;
                        w += 1;
                    }
                }
                let lin: usize = rest[..k].iter().fold(0, |acc, &i| acc * d + i);
                let sg = if r % 2 == 0 { 1.0 } else { -1.0 };
                s += sg * gv[lin * d + j[r]];
            }
            s
        })
    }))
}

/// Pointwise Hodge star of a form field.
pub fn hodge_field(alpha: &TensorField, m: &MetricField, o: Orientation) -> TensorField {
    let d = alpha.dim();
    TensorField::from_forms(alpha.grid(), d - alpha.rank(), |p| alpha.form_at(p).hodge(m.metric(p), o))
}

/// δ = (−1)^{D(k−1)} ⋆d⋆ on k-forms, D = n+1.
pub fn codifferential(alpha: &TensorField, m: &MetricField, o: Orientation) -> Result<TensorField, CalculusError> {
    let k = alpha.rank();
    if k == 0 {
        return Err(TensorError::ZeroDegree("codifferential").into());
    }
    let d = alpha.dim();
    let sd = exterior_derivative(&hodge_field(alpha, m, o))?;
    let sign = if (d * (k - 1)) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(hodge_field(&sd, m, o).scale(sign))
}

/// Σ over the hat-lift terms κ̂[I,a,b]·D[b·d + a] where D[b][a] is some
/// derivative of ζ (∂_aζ^b or ∇_aζ^b), evaluated without materializing κ̂.
fn hat_contract(slots: &[Slot], kv: &[f64], dz: &[f64], d: usize, out: &mut [f64]) {
    let rank = slots.len();
    let st = strides(d, rank);
    let mut idx = [0usize; MAX_DIM];
    for (lin, o) in out.iter_mut().enumerate() {
        unlinear(lin, d, rank, &mut idx[..rank]);
        let mut s = 0.0;
        for r in 0..rank {
            let ir = idx[r];
            let base = lin - ir * st[r];
            for mm in 0..d {
                let kval = kv[base + mm * st[r]];
                match slots[r] {
                    // κ̂[I,a,b] ∋ +κ[I: i_r→b] δ^a_{i_r}: a = i_r, b = mm
                    Slot::Down => s += kval * dz[mm * d + ir],
                    // −κ[I: i_r→a] δ^{i_r}_b: a = mm, b = i_r
                    Slot::Up => s -= kval * dz[ir * d + mm],
                }
            }
        }
        *o += s;
    }
}

/// £_ζκ = ζ^γ∂_γκ + κ̂ : ∂ζ (coordinate form).
pub fn lie_derivative(zeta: &TensorField, kappa: &TensorField) -> Result<TensorField, CalculusError> {
    if zeta.slots() != [Slot::Up] {
        return Err(CalculusError::Shape("ζ must be a vector field".into()));
    }
    let d = kappa.dim();
    let gk = kappa.field().gradient();
    let gz = zeta.field().gradient();
    let slots = kappa.slots().to_vec();
    Ok(TensorField::from_points(kappa.grid(), &slots, |p, out| {
        let z = zeta.at(p);
        let g = gk.at(p);
        for (lin, o) in out.iter_mut().enumerate() {
            *o = (0..d).map(|c| z[c] * g[lin * d + c]).sum();
        }
        hat_contract(&slots, kappa.at(p), gz.at(p), d, out);
    }))
}

/// £_ζκ = ∇_ζκ + κ̂ : ∇ζ (covariant form; agrees with [`lie_derivative`] up to
/// rounding because the Christoffel terms cancel algebraically).
pub fn lie_derivative_covariant(
    zeta: &TensorField,
    kappa: &TensorField,
    m: &MetricField,
) -> Result<TensorField, CalculusError> {
    if zeta.slots() != [Slot::Up] {
        return Err(CalculusError::Shape("ζ must be a vector field".into()));
    }
    let d = kappa.dim();
    let nk = covariant_derivative(kappa, m);
    let nz = covariant_derivative(zeta, m);
    let slots = kappa.slots().to_vec();
    Ok(TensorField::from_points(kappa.grid(), &slots, |p, out| {
        let z = zeta.at(p);
        let g = nk.at(p);
        for (lin, o) in out.iter_mut().enumerate() {
            *o = (0..d).map(|c| z[c] * g[lin * d + c]).sum();
        }
        hat_contract(&slots, kappa.at(p), nz.at(p), d, out);
    }))
}

/// Q^ν_μ = κ̂[I,ν,μ] π[I]: the (1,1) contraction π ∴ κ̂.
pub fn hat_pairing(kappa: &TensorField, pi: &TensorField) -> Result<TensorField, CalculusError> {
    if kappa.rank() != pi.rank() || kappa.slots().iter().zip(pi.slots()).any(|(a, b)| a == b) {
        return Err(TensorError::NotDual.into());
    }
    let d = kappa.dim();
    let slots = kappa.slots().to_vec();
    Ok(TensorField::from_points(kappa.grid(), &[Slot::Up, Slot::Down], |p, out| {
        let pv = pi.at(p);
        // Q[ν][μ] = Σ_I π_I κ̂[I,ν,μ]: contract hat_contract's adjoint by
        // probing with unit derivative matrices.
        let mut e = vec![0.0; d * d];
        let mut tmp = vec![0.0; pv.len()];
        for nu in 0..d {
            for mu in 0..d {
                e.fill(0.0);
                e[mu * d + nu] = 1.0; // dz[b·d + a] with a = ν, b = μ
                tmp.fill(0.0);
                hat_contract(&slots, kappa.at(p), &e, d, &mut tmp);
                out[nu * d + mu] = tmp.iter().zip(pv).map(|(a, b)| a * b).sum();
            }
        }
    }))
}

fn full_pairing(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residual of the coordinate integration-by-parts identity
/// (£_ζκ)·π = ζ^μ(∂_μκ·π − ∂_νQ^ν_μ) + ∂_ν(Q^ν_μζ^μ), with Q = π ∴ κ̂.
pub fn lie_lemma_residual(zeta: &TensorField, kappa: &TensorField, pi: &TensorField) -> Result<Field, CalculusError> {
    let d = kappa.dim();
    let lie = lie_derivative(zeta, kappa)?;
    let q = hat_pairing(kappa, pi)?;
    let dq = q.field().gradient();
    let gk = kappa.field().gradient();
    let qz = Field::from_points(kappa.grid(), d, |p, out| {
        let (qv, z) = (q.at(p), zeta.at(p));
        for nu in 0..d {
            out[nu] = (0..d).map(|mu| qv[nu * d + mu] * z[mu]).sum();
        }
    });
    let dqz = qz.gradient();
    Ok(Field::from_points(kappa.grid(), 1, |p, out| {
        let (z, pv, g) = (zeta.at(p), pi.at(p), gk.at(p));
        let lhs = full_pairing(lie.at(p), pv);
        let mut rhs = 0.0;
        for mu in 0..d {
            let dk_pi: f64 = pv.iter().enumerate().map(|(lin, pi)| g[lin * d + mu] * pi).sum();
            let divq: f64 = (0..d).map(|nu| dq.at(p)[(nu * d + mu) * d + nu]).sum();
            rhs += z[mu] * (dk_pi - divq);
        }
        rhs += (0..d).map(|nu| dqz.at(p)[nu * d + nu]).sum::<f64>();
        out[0] = lhs - rhs;
    }))
}

/// Residual of the covariant form (£_ζκ):π = ∇_ζκ:π − div^∇(Q)·ζ + div^∇(Q·ζ)
/// with π the tensor factor of a weight-1 density.
pub fn lie_lemma_residual_covariant(
    zeta: &TensorField,
    kappa: &TensorField,
    pi: &TensorField,
    m: &MetricField,
) -> Result<Field, CalculusError> {
    let d = kappa.dim();
    let lie = lie_derivative_covariant(zeta, kappa, m)?;
    let q = hat_pairing(kappa, pi)?;
    let divq = divergence(&q, m)?;
    let nk = covariant_derivative(kappa, m);
    let qz = TensorField::from_points(kappa.grid(), &[Slot::Up], |p, out| {
        let (qv, z) = (q.at(p), zeta.at(p));
        for nu in 0..d {
            out[nu] = (0..d).map(|mu| qv[nu * d + mu] * z[mu]).sum();
        }
    });
    let divqz = divergence(&qz, m)?;
    Ok(Field::from_points(kappa.grid(), 1, |p, out| {
        let (z, pv, g) = (zeta.at(p), pi.at(p), nk.at(p));
        let lhs = full_pairing(lie.at(p), pv);
        let mut rhs = divqz.at(p)[0];
        for mu in 0..d {
            let dk_pi: f64 = pv.iter().enumerate().map(|(lin, pi)| g[lin * d + mu] * pi).sum();
            rhs += z[mu] * (dk_pi - divq.at(p)[mu]);
        }
        out[0] = lhs - rhs;
    }))
}

/// Residual 1-form of the A/F integration-by-parts identity for
/// ℓ = φ·ℓ_M(F, g) + (J·A)μ(g), F = dA:
/// div^∇(J⊗Â + π⊗tr F̂) − J·∇A − π:∇F + i_{·}F∧(d(i_πμ) + i_Jμ) − i_{·}A d(i_Jμ),
/// with π = −φF♯ (so ∂ℓ/∂F = πμ, 𝔡ℓ/𝔡F = i_πμ) and ∂ℓ/∂A = Jμ.
/// Everything is divided through by μ(g).
pub fn crucial_lemma_residual(
    phi: &Field,
    j: &TensorField,
    a: &TensorField,
    m: &MetricField,
    o: Orientation,
) -> Result<TensorField, CalculusError> {
    let d = a.dim();
    let f = exterior_derivative(a)?;
    let grid = a.grid();
    let pi = TensorField::from_points(grid, &[Slot::Up, Slot::Up], |p, out| {
        out.copy_from_slice(f.form_at(p).sharp(m.metric(p)).scale(-phi.at(p)[0]).data());
    });
    // J⊗Â contracts to J^μ A_ν; π ⊗tr F̂ to π ⊗tr F
    let flux = TensorField::from_points(grid, &[Slot::Up, Slot::Down], |p, out| {
        let t = crate::tensor::trace_tensor_product(&pi.kvector_at(p), &f.form_at(p));
        let (jv, av) = (j.at(p), a.at(p));
        for mu in 0..d {
            for nu in 0..d {
                out[mu * d + nu] = t.get(&[mu, nu]) + jv[mu] * av[nu];
            }
        }
    });
    let lhs = divergence(&flux, m)?;
    let na = covariant_derivative(a, m);
    let nf = covariant_derivative(&f, m);
    let ipi = TensorField::from_forms(grid, d - 2, |p| pi.kvector_at(p).into_volume(m.metric(p), o));
    let dipi = exterior_derivative(&ipi)?;
    let ij = TensorField::from_forms(grid, d - 1, |p| j.kvector_at(p).into_volume(m.metric(p), o));
    let dij = exterior_derivative(&ij)?;
    Ok(TensorField::from_points(grid, &[Slot::Down], |p, out| {
        let g = m.metric(p);
        let mu_vol = crate::tensor::volume_form(g, o);
        let full = combinations(d, d)[0].clone();
        let top = |w: &Form| w.get(&full) / mu_vol.get(&full);
        let fp = f.form_at(p);
        let src = dipi.form_at(p).add(&ij.form_at(p));
        let (jv, pv, nav, nfv) = (j.at(p), pi.at(p), na.at(p), nf.at(p));
        for nu in 0..d {
            let j_grad_a: f64 = (0..d).map(|b| jv[b] * nav[b * d + nu]).sum();
            // π:∇F with the 1/2! normalization
            let pi_grad_f: f64 = 0.5 * (0..d * d).map(|ab| pv[ab] * nfv[ab * d + nu]).sum::<f64>();
            let e = {
                let mut v = vec![0.0; d];
                v[nu] = 1.0;
                v
            };
            let inuf = fp.interior(&e).expect("degree 2");
            let wedge = top(&inuf.wedge(&src).expect("fits"));
            let a_term = a.at(p)[nu] * top(&dij.form_at(p));
            out[nu] = lhs.at(p)[nu] - j_grad_a - pi_grad_f + wedge - a_term;
        }
    }))
}

/// Riemann tensor R^ρ_{σμν} = ∂_μΓ^ρ_{νσ} − ∂_νΓ^ρ_{μσ} + Γ^ρ_{μλ}Γ^λ_{νσ} − Γ^ρ_{νλ}Γ^λ_{μσ}.
pub fn riemann(m: &MetricField) -> TensorField {
    let d = m.dim();
    let dg = m.christoffel_field().gradient();
    TensorField::from_points(m.grid(), &[Slot::Up, Slot::Down, Slot::Down, Slot::Down], |p, out| {
        let gam = m.christoffel(p);
        let dgv = dg.at(p);
        let g3 = |l: usize, a: usize, b: usize| gam[(l * d + a) * d + b];
        let dg4 = |l: usize, a: usize, b: usize, c: usize| dgv[((l * d + a) * d + b) * d + c];
        for rho in 0..d {
            for sg in 0..d {
                for mu in 0..d {
                    for nu in 0..d {
                        let mut s = dg4(rho, nu, sg, mu) - dg4(rho, mu, sg, nu);
                        for l in 0..d {
                            s += g3(rho, mu, l) * g3(l, nu, sg) - g3(rho, nu, l) * g3(l, mu, sg);
                        }
                        out[((rho * d + sg) * d + mu) * d + nu] = s;
                    }
                }
            }
        }
    })
}

/// Ricci tensor R_{σν} = R^ρ_{σρν}.
pub fn ricci(m: &MetricField) -> TensorField {
    let d = m.dim();
    let r = riemann(m);
    TensorField::from_points(m.grid(), &[Slot::Down, Slot::Down], |p, out| {
        let rv = r.at(p);
        for sg in 0..d {
            for nu in 0..d {
                out[sg * d + nu] = (0..d).map(|rho| rv[((rho * d + sg) * d + rho) * d + nu]).sum();
            }
        }
    })
}

pub struct Curvature {
    pub ricci: TensorField,
    pub scalar: Field,
    /// Ein_{μν} = R_{μν} − ½Rg_{μν}.
    pub einstein: TensorField,
    /// Ein^μ_ν.
    pub einstein_mixed: TensorField,
}

pub fn curvature(m: &MetricField) -> Curvature {
    let d = m.dim();
    let ric = ricci(m);
    let scalar = Field::from_points(m.grid(), 1, |p, out| {
        let g = m.metric(p);
        let r = ric.at(p);
        out[0] = (0..d * d).map(|ab| g.ginv(ab / d, ab % d) * r[ab]).sum();
    });
    let einstein = TensorField::from_points(m.grid(), &[Slot::Down, Slot::Down], |p, out| {
        let g = m.metric(p);
        let r = ric.at(p);
        for ab in 0..d * d {
            out[ab] = r[ab] - 0.5 * scalar.at(p)[0] * g.g(ab / d, ab % d);
        }
    });
    let einstein_mixed = TensorField::from_points(m.grid(), &[Slot::Up, Slot::Down], |p, out| {
        out.copy_from_slice(einstein.tensor_at(p).raise_index(0, m.metric(p)).expect("down slot").data());
    });
    Curvature { ricci: ric, scalar, einstein, einstein_mixed }
}

/// div^∇ Ein, a 1-form that vanishes identically (contracted Bianchi).
pub fn bianchi_residual(m: &MetricField) -> TensorField {
    divergence(&curvature(m).einstein_mixed, m).expect("mixed tensor")
}

#[cfg(test)]
mod tests;
