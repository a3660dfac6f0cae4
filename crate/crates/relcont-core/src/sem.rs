//! Stress-energy-momentum assembly in the three equivalent writings
//! (transported variables, E/B components, Faraday form), the matter/Maxwell
//! and microscopic splittings, and the balance, Maxwell-in-matter and
//! ponderomotive residuals on grids.
//!
//! All tensors are the (1,1) factor 𝔱 of the density 𝔗 = 𝔱 μ(g).

use crate::calculus::{
    codifferential, covariant_derivative, divergence, exterior_derivative, lie_derivative, CalculusError, MetricField,
    TensorField,
};
use crate::constitutive::{faraday_evaluate, ConstitutiveError, MatterState, Model, Partials};
use crate::em::{eb_decompose, poynting, EmError, Observer};
use crate::grid::{Field, Grid};
use crate::parallel;
use crate::tensor::index::combinations;
use crate::tensor::{trace_tensor_product, vector_covector, Form, KVector, Metric, Orientation, Slot, Tensor};
use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SemError {
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
    #[error(transparent)]
    Em(#[from] EmError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("at grid point {point:?}: {source}")]
    AtPoint { point: Vec<f64>, source: Box<SemError> },
    #[error("field state: {0}")]
    Shape(String),
}

/// Which writing produced a tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SemForm {
    PhiForm,
    EbForm,
    FaradayForm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemTensor {
    pub t: Tensor,
    pub form: SemForm,
}

impl SemTensor {
    /// max |𝔱_{μν} − 𝔱_{νμ}| of the lowered tensor.
    pub fn asymmetry(&self, g: &Metric) -> f64 {
        self.t.lower_index(0, g).expect("(1,1)").asymmetry()
    }
}

fn uu_over_c2(obs: &Observer) -> Tensor {
    let c = obs.c();
    vector_covector(obs.u(), obs.u_flat()).scale(1.0 / (c * c))
}

/// The six groups of the E/B writing for one set of partials.
#[derive(Clone, Debug)]
pub struct EbGroups {
    /// (ε − ε_E·E) uu♭/c²
    pub energy: Tensor,
    /// (1/c)(u⊗S_ε + S_ε♯⊗u♭)
    pub poynting: Tensor,
    /// ε_E ⊗ E
    pub electric: Tensor,
    /// −B♯ ⊗tr (ε_B)♭
    pub magnetic: Tensor,
    /// (ε_ρρ + ε_s s + ε_B:B − ε) P
    pub pressure: Tensor,
    /// −t_el
    pub elastic: Tensor,
}

impl EbGroups {
    pub fn new(p: &Partials, st: &MatterState, o: Orientation) -> EbGroups {
        let obs = &st.obs;
        let g = &st.g;
        let s = p.poynting(st, o);
        let c = obs.c();
        EbGroups {
            energy: uu_over_c2(obs).scale(p.total_energy(st)),
            poynting: vector_covector(obs.u(), s.data())
                .add(&vector_covector(&g.raise(s.data()), obs.u_flat()))
                .scale(1.0 / c),
            electric: vector_covector(&p.d_e, st.e.data()),
            magnetic: p.magnetic_stress(st).scale(-1.0),
            pressure: obs.projection().scale(p.pressure(st)),
            elastic: p.elastic_stress(st).scale(-1.0),
        }
    }

    pub fn sum(&self) -> Tensor {
        self.energy.add(&self.poynting).add(&self.electric).add(&self.magnetic).add(&self.pressure).add(&self.elastic)
    }
}

/// 𝔱 from the E/B writing.
pub fn sem_eb(model: &Model, st: &MatterState, o: Orientation) -> Result<SemTensor, SemError> {
    let ev = model.evaluate(st)?;
    Ok(SemTensor { t: EbGroups::new(&ev.total, st, o).sum(), form: SemForm::EbForm })
}

/// 𝔱 from the Faraday writing:
/// (𝔢 − 𝔢_u·u)uu♭/c² − u⊗𝔢_u + 𝔢_F ⊗tr F + (ρ𝔢_ρ + s𝔢_s − 𝔢)P − t_el.
pub fn sem_faraday(model: &Model, st: &MatterState, f: &Form, o: Orientation) -> Result<SemTensor, SemError> {
    let fe = faraday_evaluate(model, st, f, o)?.total;
    let obs = &st.obs;
    let eu_u: f64 = fe.d_u.iter().zip(obs.u()).map(|(a, b)| a * b).sum();
    let mut t = uu_over_c2(obs).scale(fe.e - eu_u);
    t = t.sub(&vector_covector(obs.u(), &fe.d_u));
    t = t.add(&trace_tensor_product(&fe.d_f, f));
    t = t.add(&obs.projection().scale(st.rho * fe.d_rho + st.s * fe.d_s - fe.e));
    let ev = model.evaluate(st)?;
    t = t.sub(&ev.total.elastic_stress(st));
    Ok(SemTensor { t, form: SemForm::FaradayForm })
}

/// Matter/Maxwell splitting 𝔗 = 𝔗_m + 𝔗_M: the E/B groups with matter and
/// Maxwell partials respectively.
pub fn sem_split_matter_maxwell(model: &Model, st: &MatterState, o: Orientation) -> Result<(Tensor, Tensor), SemError> {
    let ev = model.evaluate(st)?;
    Ok((EbGroups::new(&ev.matter, st, o).sum(), EbGroups::new(&ev.maxwell, st, o).sum()))
}

/// Microscopic splitting 𝔗 = mT + MT: the matter part keeps only the rest
/// energy and the fluid pressure ε_{m,ρ}ρ + ε_{m,s}s − ε_m (plus −t_el); the
/// Poynting, stress and ∂ε_m/∂B : B pressure terms go to the field part.
pub fn sem_split_microscopic(model: &Model, st: &MatterState, o: Orientation) -> Result<(Tensor, Tensor), SemError> {
    let ev = model.evaluate(st)?;
    let (m, mx, tot) = (&ev.matter, &ev.maxwell, &ev.total);
    let obs = &st.obs;
    let p_fluid = m.d_rho * st.rho + m.d_s * st.s - m.eps;
    let mt = uu_over_c2(obs).scale(m.total_energy(st)).add(&obs.projection().scale(p_fluid)).sub(&m.elastic_stress(st));
    let full = EbGroups::new(tot, st, o);
    let p_field = mx.db_colon_b(&st.b) + m.db_colon_b(&st.b) - mx.eps;
    let big = uu_over_c2(obs)
        .scale(mx.total_energy(st))
        .add(&full.poynting)
        .add(&full.electric)
        .add(&full.magnetic)
        .add(&obs.projection().scale(p_field));
    Ok((mt, big))
}

/// Transported (Φ-pushed) variables: generalized velocity w, the scalar
/// factors ϱ/μ(g) and ς/μ(g), potential A and Faraday form F.
#[derive(Clone, Debug)]
pub struct MaterialState {
    pub w: Vec<f64>,
    pub varrho: f64,
    pub varsigma: f64,
    pub a: Form,
    pub f: Form,
    pub cauchy: Option<Tensor>,
    pub g: Metric,
    pub c: f64,
    pub q: f64,
}

impl MaterialState {
    /// √(−g(w,w)), erroring for non-timelike w.
    pub fn w_norm(&self) -> Result<f64, SemError> {
        let n2 = -self.g.dot(&self.w, &self.w);
        if !(n2 > 0.0) {
            return Err(EmError::NotTimelike { norm2: -n2, point: None }.into());
        }
        Ok(n2.sqrt())
    }

    /// ρ = √(−g(w,w))ϱ/(cμ), s likewise, u = cw/√(−g(w,w)), E and B from F.
    /// No transversality validation of the Cauchy tensor (perturbation use).
    pub fn proper(&self, o: Orientation) -> Result<MatterState, SemError> {
        let root = self.w_norm()?;
        let obs = Observer::normalize(&self.g, &self.w, self.c)?;
        let split = eb_decompose(&self.f, &obs, &self.g, o);
        Ok(MatterState {
            rho: root * self.varrho / self.c,
            s: root * self.varsigma / self.c,
            e: split.e,
            b: split.b,
            cauchy: self.cauchy.clone(),
            obs,
            g: self.g.clone(),
        })
    }

    /// ℓ/μ(g) = −ε − qϱ̃ A·w.
    pub fn lagrangian(&self, model: &Model, o: Orientation) -> Result<f64, SemError> {
        let st = self.proper(o)?;
        let aw: f64 = self.a.data().iter().zip(&self.w).map(|(a, w)| a * w).sum();
        Ok(-model.evaluate(&st)?.total.eps - self.q * self.varrho * aw)
    }
}

/// Partials of ℓ/μ(g) in the transported variables.
#[derive(Clone, Debug)]
pub struct MaterialPartials {
    pub l: f64,
    pub d_w: Vec<f64>,
    pub d_varrho: f64,
    pub d_varsigma: f64,
    pub d_a: Vec<f64>,
    pub d_f: KVector,
    pub d_c: Option<Tensor>,
}

/// Closed-form partials:
/// ∂ℓ/∂w = (1/√)[(1/c)(ε_ρρ + ε_s s − ε_E·E − ε_B:B)u♭ + ε_E·i_·F + ε_B : i_·⋆F] − qϱ̃A,
/// ∂ℓ/∂ϱ̃ = −(√/c)ε_ρ − qA·w, ∂ℓ/∂ς̃ = −(√/c)ε_s, ∂ℓ/∂A = −qϱ̃w,
/// ∂ℓ/∂F = (1/c)u∧ε_E + (1/c)⋆(u∧ε_B), ∂ℓ/∂c = −ε_c; here √ = √(−g(w,w)).
pub fn material_partials(model: &Model, ms: &MaterialState, o: Orientation) -> Result<MaterialPartials, SemError> {
    let st = ms.proper(o)?;
    let root = ms.w_norm()?;
    let p = model.evaluate(&st)?.total;
    let g = &ms.g;
    let d = g.dim();
    let c = ms.c;
    let aw: f64 = ms.a.data().iter().zip(&ms.w).map(|(a, w)| a * w).sum();
    let star_f = ms.f.hodge(g, o);
    let scalar = (p.d_rho * st.rho + p.d_s * st.s - p.de_dot_e(&st.e) - p.db_colon_b(&st.b)) / c;
    let d_w = (0..d)
        .map(|b| {
            let mut eb = vec![0.0; d];
            eb[b] = 1.0;
            let ie = ms.f.interior(&eb).expect("2-form");
            let ib = star_f.interior(&eb).expect("(n−1)-form");
            (scalar * st.obs.u_flat()[b] + p.de_dot_e(&ie) + p.db_colon_b(&ib)) / root
                - ms.q * ms.varrho * ms.a.data()[b]
        })
        .collect();
    let u = KVector::vector(st.obs.u());
    let d_f = u
        .wedge(&KVector::vector(&p.d_e))
        .expect("fits")
        .add(&u.wedge(&p.d_b).expect("fits").hodge(g, o))
        .scale(1.0 / c);
    Ok(MaterialPartials {
        l: -p.eps - ms.q * ms.varrho * aw,
        d_w,
        d_varrho: -root / c * p.d_rho - ms.q * aw,
        d_varsigma: -root / c * p.d_s,
        d_a: ms.w.iter().map(|w| -ms.q * ms.varrho * w).collect(),
        d_f,
        d_c: p.d_c.map(|t| t.scale(-1.0)),
    })
}

/// Central-difference partials of ℓ/μ(g), step `h`.
pub fn material_partials_fd(
    model: &Model,
    ms: &MaterialState,
    o: Orientation,
    h: f64,
) -> Result<MaterialPartials, SemError> {
    let d = ms.g.dim();
    let l = |m: &MaterialState| m.lagrangian(model, o);
    let diff = |f: &dyn Fn(&mut MaterialState, f64)| -> Result<f64, SemError> {
        let (mut p, mut m) = (ms.clone(), ms.clone());
        f(&mut p, h);
        f(&mut m, -h);
        Ok((l(&p)? - l(&m)?) / (2.0 * h))
    };
    let mut d_w = vec![0.0; d];
    let mut d_a = vec![0.0; d];
    for b in 0..d {
        d_w[b] = diff(&|m, e| m.w[b] += e)?;
        d_a[b] = diff(&|m, e| {
            let mut v = vec![0.0; d];
            v[b] = e;
            m.a = m.a.add(&Form::covector(&v));
        })?;
    }
    let sets = combinations(d, 2);
    let mut fvals = vec![0.0; sets.len()];
    for (j, set) in sets.iter().enumerate() {
        fvals[j] = diff(&|m, e| {
            let dir = Form::from_fn(d, 2, |ij| if ij == set.as_slice() { e } else { 0.0 });
            m.f = m.f.add(&dir);
        })?;
    }
    let d_c = match &ms.cauchy {
        Some(_) => {
            let mut t = Tensor::zero(d, &[Slot::Up, Slot::Up]);
            for a in 0..d {
                for b in a..d {
                    let v = diff(&|m, e| {
                        let c = m.cauchy.as_mut().expect("present");
                        c.set(&[a, b], c.get(&[a, b]) + e);
                        if a != b {
                            c.set(&[b, a], c.get(&[b, a]) + e);
                        }
                    })?;
                    // the off-diagonal perturbation moves both c_ab and c_ba
                    let v = if a == b { v } else { 0.5 * v };
                    t.set(&[a, b], v);
                    t.set(&[b, a], v);
                }
            }
            Some(t)
        }
        None => None,
    };
    Ok(MaterialPartials {
        l: l(ms)?,
        d_w,
        d_varrho: diff(&|m, e| m.varrho += e)?,
        d_varsigma: diff(&|m, e| m.varsigma += e)?,
        d_a,
        d_f: KVector::from_increasing(d, 2, &fvals),
        d_c,
    })
}

/// (ℓ − ϱ̃ℓ_ϱ − ς̃ℓ_ς)δ + w⊗ℓ_w − ℓ_A⊗A − ℓ_F ⊗tr F − 2ℓ_c·c.
pub fn assemble_material(ms: &MaterialState, p: &MaterialPartials) -> Tensor {
    let d = ms.g.dim();
    let mut t = Tensor::identity(d).scale(p.l - ms.varrho * p.d_varrho - ms.varsigma * p.d_varsigma);
    t = t.add(&vector_covector(&ms.w, &p.d_w));
    t = t.sub(&vector_covector(&p.d_a, ms.a.data()));
    t = t.sub(&trace_tensor_product(&p.d_f, &ms.f));
    if let (Some(dc), Some(c)) = (&p.d_c, &ms.cauchy) {
        // (2 ℓ_c·c)^μ_ν = 2 ℓ_c^{λμ} c_{λν}
        let el = Tensor::from_fn(d, &[Slot::Up, Slot::Down], |i| {
            2.0 * (0..d).map(|l| dc.get(&[l, i[0]]) * c.get(&[l, i[1]])).sum::<f64>()
        });
        t = t.sub(&el);
    }
    t
}

/// 𝔱 from the transported-variable writing with closed-form partials.
pub fn sem_material(model: &Model, ms: &MaterialState, o: Orientation) -> Result<SemTensor, SemError> {
    let p = material_partials(model, ms, o)?;
    Ok(SemTensor { t: assemble_material(ms, &p), form: SemForm::PhiForm })
}

/// The same with finite-difference partials of ℓ.
pub fn sem_material_fd(model: &Model, ms: &MaterialState, o: Orientation, h: f64) -> Result<SemTensor, SemError> {
    let p = material_partials_fd(model, ms, o, h)?;
    Ok(SemTensor { t: assemble_material(ms, &p), form: SemForm::PhiForm })
}

/// Boundary conditions on a continuum face with normal n.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BoundaryResiduals {
    /// g(u, n)
    pub u_normal: f64,
    /// 𝔱_ec(·, n) − p n♭ (lowered)
    pub traction: Vec<f64>,
    /// i_n D
    pub d_normal: f64,
    /// i_n i_u ⋆H, components over increasing index sets
    pub h_tangential: Vec<f64>,
}

impl BoundaryResiduals {
    pub fn max_abs(&self) -> f64 {
        self.traction
            .iter()
            .chain(&self.h_tangential)
            .fold(self.u_normal.abs().max(self.d_normal.abs()), |m, x| m.max(x.abs()))
    }
}

/// 𝔱_ec = −ε_E⊗E + B♯⊗tr(ε_B)♭ + t_el.
pub fn continuum_stress(p: &Partials, st: &MatterState) -> Tensor {
    vector_covector(&p.d_e, st.e.data()).scale(-1.0).add(&p.magnetic_stress(st)).add(&p.elastic_stress(st))
}

pub fn boundary_residuals(
    model: &Model,
    st: &MatterState,
    n: &[f64],
    o: Orientation,
) -> Result<BoundaryResiduals, SemError> {
    let ev = model.evaluate(st)?;
    let g = &st.g;
    let d = g.dim();
    let t = continuum_stress(&ev.total, st).lower_index(0, g).expect("(1,1)");
    let p = ev.total.pressure(st);
    let nf = g.lower(n);
    let traction = (0..d).map(|m| (0..d).map(|k| t.get(&[m, k]) * n[k]).sum::<f64>() - p * nf[m]).collect();
    let fields = ev.derived_fields(g);
    let d_normal = fields.d.data().iter().zip(n).map(|(a, b)| a * b).sum();
    let h = fields.h.hodge(g, o).interior(st.obs.u()).and_then(|x| x.interior(n));
    let h_tangential = match h {
        Ok(x) => x.increasing(),
        Err(_) => vec![],
    };
    Ok(BoundaryResiduals { u_normal: g.dot(st.obs.u(), n), traction, d_normal, h_tangential })
}

/// Smooth field data on a grid: normalized world-velocity u, densities,
/// Faraday form and optional Cauchy tensor.
#[derive(Clone, Debug)]
pub struct FieldState {
    pub metric: MetricField,
    pub rho: Field,
    pub s: Field,
    pub u: TensorField,
    pub f: TensorField,
    pub cauchy: Option<TensorField>,
    pub q: f64,
    pub c: f64,
}

/// Pointwise quantities of one grid point.
#[derive(Clone, Debug)]
struct PointData {
    sem: Tensor,
    flux: Vec<f64>,
    s: Vec<f64>,
    eps_tot: f64,
    p: f64,
    t_ec: Tensor,
    t_f: Tensor,
    u_omega: Tensor,
    pi: KVector,
    pi_m: KVector,
}

impl FieldState {
    pub fn grid(&self) -> &Grid {
        self.metric.grid()
    }

    fn check(&self) -> Result<(), SemError> {
        let d = self.metric.dim();
        let ok = self.u.slots() == [Slot::Up]
            && self.f.slots() == [Slot::Down, Slot::Down]
            && self.rho.ncomp() == 1
            && self.s.ncomp() == 1
            && self.cauchy.as_ref().is_none_or(|c| c.slots() == [Slot::Down, Slot::Down])
            && self.u.dim() == d;
        if !ok {
            return Err(SemError::Shape("u must be a vector, F a 2-form, rho/s scalars, c a (0,2) tensor".into()));
        }
        Ok(())
    }

    /// The pointwise state at grid point p (E, B from F and u).
    pub fn matter_state(&self, p: usize, o: Orientation) -> Result<MatterState, SemError> {
        let g = self.metric.metric(p).clone();
        let obs = Observer::new(&g, self.u.at(p), self.c)?;
        let f = self.f.form_at(p);
        let split = eb_decompose(&f, &obs, &g, o);
        Ok(MatterState {
            rho: self.rho.at(p)[0],
            s: self.s.at(p)[0],
            e: split.e,
            b: split.b,
            cauchy: self.cauchy.as_ref().map(|c| c.tensor_at(p)),
            obs,
            g,
        })
    }

    fn points(&self, model: &Model, o: Orientation) -> Result<Vec<PointData>, SemError> {
        self.check()?;
        let grid = self.grid();
        let results = parallel::map_indices(grid.len(), |p| {
            self.point(model, p, o).map_err(|e| SemError::AtPoint { point: grid.point(p), source: Box::new(e) })
        });
        results.into_iter().collect()
    }

    fn point(&self, model: &Model, p: usize, o: Orientation) -> Result<PointData, SemError> {
        let st = self.matter_state(p, o)?;
        let f = self.f.form_at(p);
        let ev = model.evaluate(&st)?;
        let tot = &ev.total;
        let obs = &st.obs;
        let c = obs.c();
        let g = &st.g;
        // S = c S_ε, so that the energy flux is ε_tot u + S
        let s = g.raise(tot.poynting(&st, o).data()).iter().map(|x| c * x).collect::<Vec<_>>();
        let eps_tot = tot.total_energy(&st);
        let flux = obs.u().iter().zip(&s).map(|(u, s)| eps_tot * u + s).collect();
        let fe = faraday_evaluate(model, &st, &f, o)?;
        let m = &ev.matter;
        let p_m = m.d_rho * st.rho + m.d_s * st.s - m.eps;
        let t_f = uu_over_c2(obs).scale(m.eps).add(&obs.projection().scale(p_m)).sub(&m.elastic_stress(&st));
        let omega = omega_matter(m, &st, o);
        Ok(PointData {
            sem: EbGroups::new(tot, &st, o).sum(),
            flux,
            s,
            eps_tot,
            p: tot.pressure(&st),
            t_ec: continuum_stress(tot, &st),
            t_f,
            u_omega: vector_covector(obs.u(), omega.data()),
            pi: fe.total.d_f,
            pi_m: fe.matter.d_f,
        })
    }
}

/// ω_m = −(−1)ⁿ(1/c²)(i_{ε_{m,E}} i_u ⋆B + i_{E♯} i_u ⋆(ε_{m,B})♭), the
/// P-projection of ∂𝔢_m/∂u.
pub fn omega_matter(m: &Partials, st: &MatterState, o: Orientation) -> Form {
    let g = &st.g;
    let c = st.obs.c();
    // poynting(e, X) = (−1)ⁿ(1/c) i_{e♯} i_u ⋆X♭
    let a = poynting(&Form::covector(&g.lower(&m.d_e)), &st.b.sharp(g), &st.obs, g, o);
    let b = poynting(&st.e, &m.d_b, &st.obs, g, o);
    a.add(&b).scale(-1.0 / c)
}

fn grid_fields<F>(grid: &Grid, slots: &[Slot], pts: &[PointData], f: F) -> TensorField
where
    F: Fn(&PointData, &mut [f64]) + Sync + Send,
{
    TensorField::from_points(grid, slots, |p, out| f(&pts[p], out))
}

/// The assembled SEM field in the E/B writing.
pub fn sem_field(model: &Model, fs: &FieldState, o: Orientation) -> Result<TensorField, SemError> {
    let pts = fs.points(model, o)?;
    Ok(grid_fields(fs.grid(), &[Slot::Up, Slot::Down], &pts, |p, out| out.copy_from_slice(p.sem.data())))
}

/// Balance residuals; `unprojected` is div^∇𝔱 and its projections
/// `energy_from_div` = −u·div𝔱 and `momentum_from_div` = P(div𝔱) are the
/// algebraic counterparts of `energy` and `momentum`.
#[derive(Clone, Debug)]
pub struct BalanceResiduals {
    pub energy: TensorField,
    pub momentum: TensorField,
    pub continuity_mass: TensorField,
    pub continuity_entropy: TensorField,
    pub cauchy_advection: Option<TensorField>,
    pub maxwell_matter: TensorField,
    pub unprojected: TensorField,
    pub energy_from_div: TensorField,
    pub momentum_from_div: TensorField,
}

fn scalar_field(grid: &Grid, f: impl Fn(usize) -> f64 + Sync + Send) -> TensorField {
    TensorField::from_points(grid, &[], move |p, out| out[0] = f(p))
}

fn contract_mixed(t: &Tensor, nabla_u: &[f64], d: usize) -> f64 {
    // t^μ_ν ∇_μ u^ν with ∇u laid out [ν][μ]
    let mut s = 0.0;
    for mu in 0..d {
        for nu in 0..d {
            s += t.get(&[mu, nu]) * nabla_u[nu * d + mu];
        }
    }
    s
}

pub fn balance_residuals(model: &Model, fs: &FieldState, o: Orientation) -> Result<BalanceResiduals, SemError> {
    let pts = fs.points(model, o)?;
    let grid = fs.grid();
    let m = &fs.metric;
    let d = grid.dim();
    let c2 = fs.c * fs.c;
    let u = &fs.u;
    let nabla_u = covariant_derivative(u, m);
    let acc = |p: usize| -> Vec<f64> {
        let (uv, nu) = (u.at(p), nabla_u.at(p));
        (0..d).map(|mu| (0..d).map(|a| uv[a] * nu[mu * d + a]).sum()).collect()
    };
    let div_u = |p: usize| -> f64 { (0..d).map(|a| nabla_u.at(p)[a * d + a]).sum() };

    let flux = grid_fields(grid, &[Slot::Up], &pts, |p, out| out.copy_from_slice(&p.flux));
    let div_flux = divergence(&flux, m)?;
    let energy = scalar_field(grid, |p| {
        let pt = &pts[p];
        let a = acc(p);
        div_flux.at(p)[0] + m.metric(p).dot(&pt.s, &a) / c2 - contract_mixed(&pt.t_ec, nabla_u.at(p), d)
            + pt.p * div_u(p)
    });

    let su = TensorField::from_points(grid, &[Slot::Up, Slot::Down], |p, out| {
        let g = m.metric(p);
        let t = vector_covector(&pts[p].s, &g.lower(u.at(p))).add(&vector_covector(u.at(p), &g.lower(&pts[p].s)));
        out.copy_from_slice(t.data());
    });
    let div_su = divergence(&su, m)?;
    let t_ec = grid_fields(grid, &[Slot::Up, Slot::Down], &pts, |p, out| out.copy_from_slice(p.t_ec.data()));
    let div_t = divergence(&t_ec, m)?;
    let pressure = TensorField::scalar(Field::from_points(grid, 1, |p, out| out[0] = pts[p].p));
    let grad_p = exterior_derivative(&pressure)?;
    let momentum = TensorField::from_points(grid, &[Slot::Down], |p, out| {
        let pt = &pts[p];
        let g = m.metric(p);
        let uf = g.lower(u.at(p));
        let a = g.lower(&acc(p));
        let proj = |w: &[f64]| -> Vec<f64> {
            let uw: f64 = u.at(p).iter().zip(w).map(|(x, y)| x * y).sum();
            w.iter().zip(&uf).map(|(w, uf)| w + uf * uw / c2).collect()
        };
        let ps = proj(div_su.at(p));
        let pg = proj(grad_p.at(p));
        let tdu = contract_mixed(&pt.t_ec, nabla_u.at(p), d);
        for nu in 0..d {
            out[nu] = (pt.eps_tot + pt.p) * a[nu] / c2 + ps[nu] / c2 + uf[nu] * tdu / c2 - div_t.at(p)[nu] + pg[nu];
        }
    });

    let rho_u = TensorField::from_points(grid, &[Slot::Up], |p, out| {
        for (o, x) in out.iter_mut().zip(u.at(p)) {
            *o = fs.rho.at(p)[0] * x;
        }
    });
    let s_u = TensorField::from_points(grid, &[Slot::Up], |p, out| {
        for (o, x) in out.iter_mut().zip(u.at(p)) {
            *o = fs.s.at(p)[0] * x;
        }
    });
    let cauchy_advection = match &fs.cauchy {
        Some(c) => Some(lie_derivative(u, c)?),
        None => None,
    };
    let mx = maxwell_residuals_from(&pts, fs, o)?;

    let sem = grid_fields(grid, &[Slot::Up, Slot::Down], &pts, |p, out| out.copy_from_slice(p.sem.data()));
    let unprojected = divergence(&sem, m)?;
    let energy_from_div = scalar_field(grid, |p| -(0..d).map(|a| u.at(p)[a] * unprojected.at(p)[a]).sum::<f64>());
    let momentum_from_div = TensorField::from_points(grid, &[Slot::Down], |p, out| {
        let uf = m.metric(p).lower(u.at(p));
        let w = unprojected.at(p);
        let uw: f64 = u.at(p).iter().zip(w).map(|(x, y)| x * y).sum();
        for nu in 0..d {
            out[nu] = w[nu] + uf[nu] * uw / c2;
        }
    });
    Ok(BalanceResiduals {
        energy,
        momentum,
        continuity_mass: divergence(&rho_u, m)?,
        continuity_entropy: divergence(&s_u, m)?,
        cauchy_advection,
        maxwell_matter: mx.first,
        unprojected,
        energy_from_div,
        momentum_from_div,
    })
}

/// Maxwell-in-matter residuals with π = ∂𝔢/∂F:
/// `first` = −δ(π♭) − ρq u♭ (1-form), `second` = d(i_π μ) + qρ i_u μ (n-form).
#[derive(Clone, Debug)]
pub struct MaxwellResiduals {
    pub first: TensorField,
    pub second: TensorField,
}

/// Sign σ in first = σ ⋆second: +1 in three dimensions, −1 in four; in general
/// (−1)^(dim+1). The relation is algebraic (pointwise), not only O(h²).
pub fn maxwell_duality_sign(dim: usize) -> f64 {
    if dim % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

pub fn maxwell_residuals(model: &Model, fs: &FieldState, o: Orientation) -> Result<MaxwellResiduals, SemError> {
    let pts = fs.points(model, o)?;
    maxwell_residuals_from(&pts, fs, o)
}

fn maxwell_residuals_from(pts: &[PointData], fs: &FieldState, o: Orientation) -> Result<MaxwellResiduals, SemError> {
    let grid = fs.grid();
    let m = &fs.metric;
    let d = grid.dim();
    let q = fs.q;
    let pi_flat = TensorField::from_forms(grid, 2, |p| pts[p].pi.flat(m.metric(p)));
    let dpi = codifferential(&pi_flat, m, o)?;
    let first = TensorField::from_points(grid, &[Slot::Down], |p, out| {
        let uf = m.metric(p).lower(fs.u.at(p));
        for nu in 0..d {
            out[nu] = -dpi.at(p)[nu] - fs.rho.at(p)[0] * q * uf[nu];
        }
    });
    let ipi = TensorField::from_forms(grid, d - 2, |p| pts[p].pi.into_volume(m.metric(p), o));
    let dipi = exterior_derivative(&ipi)?;
    let second = TensorField::from_forms(grid, d - 1, |p| {
        let iu = KVector::vector(fs.u.at(p)).into_volume(m.metric(p), o);
        dipi.form_at(p).axpy(q * fs.rho.at(p)[0], &iu)
    });
    Ok(MaxwellResiduals { first, second })
}

/// The ponderomotive writing div𝔱_f = 𝔣 with
/// 𝔱_f = 𝔢_m uu♭/c² + p_m P − t_el and 𝔣 = div(u⊗ω_m) − π_m:∇F + qρ i_uF.
#[derive(Clone, Debug)]
pub struct PonderomotiveResiduals {
    /// div𝔱_f − 𝔣
    pub direct: TensorField,
    /// 𝔣 itself
    pub force: TensorField,
    /// div𝔱 + i_{R♯}F with R the first Maxwell residual; equals `direct`
    /// identically (to O(h²)), and reduces to div𝔱 where Maxwell holds.
    pub via_balance: TensorField,
}

pub fn ponderomotive_residuals(
    model: &Model,
    fs: &FieldState,
    o: Orientation,
) -> Result<PonderomotiveResiduals, SemError> {
    let pts = fs.points(model, o)?;
    let grid = fs.grid();
    let m = &fs.metric;
    let d = grid.dim();
    let t_f = grid_fields(grid, &[Slot::Up, Slot::Down], &pts, |p, out| out.copy_from_slice(p.t_f.data()));
    let div_tf = divergence(&t_f, m)?;
    let uw = grid_fields(grid, &[Slot::Up, Slot::Down], &pts, |p, out| out.copy_from_slice(p.u_omega.data()));
    let div_uw = divergence(&uw, m)?;
    let nf = covariant_derivative(&fs.f, m);
    let force = TensorField::from_points(grid, &[Slot::Down], |p, out| {
        let pi = pts[p].pi_m.data();
        let nfv = nf.at(p);
        let uv = fs.u.at(p);
        let fv = fs.f.at(p);
        let qr = fs.q * fs.rho.at(p)[0];
        for nu in 0..d {
            // π_m:∇_νF with the 1/2! normalization
            let pf: f64 = 0.5 * (0..d * d).map(|ab| pi[ab] * nfv[ab * d + nu]).sum::<f64>();
            let iuf: f64 = (0..d).map(|a| uv[a] * fv[a * d + nu]).sum();
            out[nu] = div_uw.at(p)[nu] - pf + qr * iuf;
        }
    });
    let direct = TensorField::new(&[Slot::Down], div_tf.field().sub(force.field()));
    let sem = grid_fields(grid, &[Slot::Up, Slot::Down], &pts, |p, out| out.copy_from_slice(p.sem.data()));
    let div_t = divergence(&sem, m)?;
    let mx = maxwell_residuals_from(&pts, fs, o)?;
    let via_balance = TensorField::from_points(grid, &[Slot::Down], |p, out| {
        let r = m.metric(p).raise(mx.first.at(p));
        let fv = fs.f.at(p);
        for nu in 0..d {
            out[nu] = div_t.at(p)[nu] + (0..d).map(|a| r[a] * fv[a * d + nu]).sum::<f64>();
        }
    });
    Ok(PonderomotiveResiduals { direct, force, via_balance })
}
