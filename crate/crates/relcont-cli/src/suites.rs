//! The check suites. Each suite evaluates one refinement level and returns a
//! measure per check; pointwise (algebraic) checks are only evaluated on the
//! base level, convergence checks on every level.

use crate::build::{Compiled, Problem};
use relcont_core::calculus::{
    bianchi_residual, codifferential, crucial_lemma_residual, divergence, exterior_derivative, lie_lemma_residual,
    lie_lemma_residual_covariant, CalculusError, TensorField,
};
use relcont_core::constitutive::{ConstitutiveError, ModelKind};
use relcont_core::em::maxwell_sem;
use relcont_core::grid::{Field, Grid, Norms, Region};
use relcont_core::junction::{einstein_residual, maxwell_sem_field, Junction, JunctionError, TwoSidedSolution};
use relcont_core::sampling::{random_form, rng, smooth_tensor};
use relcont_core::sem::{
    balance_residuals, maxwell_duality_sign, maxwell_residuals, ponderomotive_residuals, sem_eb, sem_faraday,
    sem_field, sem_material, sem_material_fd, sem_split_matter_maxwell, sem_split_microscopic, FieldState,
    MaterialState, SemError,
};
use relcont_core::tensor::{vector_covector, Form, Orientation, Slot, Tensor, TensorError};
use serde::Serialize;
use thiserror::Error;

/// Step of the finite-difference ℓ partials.
pub const FD_STEP: f64 = 1e-5;
/// Cap on the number of grid points used by pointwise checks.
pub const MAX_POINTWISE: usize = 128;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Junction(#[from] JunctionError),
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// How a check is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// Pointwise algebra, default tolerance 1e-12.
    Exact,
    /// Analytic assembly of one quantity in two ways, 1e-10.
    Assembly,
    /// Against a finite-difference oracle, 1e-5.
    Fd,
    /// Discretization error under refinement, expected ratio 4 ± 25%.
    Convergence,
}

impl Kind {
    pub fn class(self) -> &'static str {
        match self {
            Kind::Exact => "exact",
            Kind::Assembly => "assembly",
            Kind::Fd => "fd",
            Kind::Convergence => "convergence",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Kind::Exact => 1e-12,
            Kind::Assembly => 1e-10,
            Kind::Fd => 1e-5,
            Kind::Convergence => 0.25,
        }
    }
}

/// A check known to the runner.
#[derive(Clone, Copy, Debug)]
pub struct CheckInfo {
    pub name: &'static str,
    pub suite: &'static str,
    pub kind: Kind,
    /// The relation tested, as a formula.
    pub anchor: &'static str,
}

const fn check(name: &'static str, suite: &'static str, kind: Kind, anchor: &'static str) -> CheckInfo {
    CheckInfo { name, suite, kind, anchor }
}

use Kind::{Assembly, Convergence, Exact, Fd};

pub const CATALOG: &[CheckInfo] = &[
    check("hodge_involution", "identities", Exact, "⋆⋆α = (−1)^(k(D−k)+1) α for k-forms, Lorentzian g"),
    check("interior_hodge", "identities", Exact, "i_u⋆ω = (−1)^k ⋆(u♭∧ω)"),
    check("hodge_inner", "identities", Exact, "α∧⋆β = ⟨α,β⟩ μ(g)"),
    check("exterior_derivative_squared", "identities", Exact, "d(dα) = 0"),
    check("codifferential_squared", "identities", Exact, "δ(δα) = 0 with δ a signed ⋆d⋆"),
    check("lie_lemma", "identities", Convergence, "(£_ζκ):π = ∇_ζκ:π − div(Q)·ζ + div(Q·ζ), Q = π∴κ̂"),
    check("lie_lemma_coordinate", "identities", Convergence, "(£_ζκ)·π = ζ^μ(∂_μκ·π − ∂_νQ^ν_μ) + ∂_ν(Q^ν_μ ζ^μ)"),
    check("potential_lemma", "identities", Convergence, "integration by parts of ℓ(A, F = dA, g) in A and F"),
    check("bianchi", "identities", Convergence, "div Ein = 0"),
    check("sem_material_vs_eb", "sem", Assembly, "𝔗 from ℓ(w, ϱ, ς, A, F, c) = 𝔗 in the E/B writing"),
    check("sem_material_fd", "sem", Fd, "𝔗 from finite-difference ∂ℓ = 𝔗 in the E/B writing"),
    check("sem_faraday_vs_eb", "sem", Assembly, "𝔗 from 𝔢(u, F) = 𝔗 in the E/B writing"),
    check("sem_symmetry", "sem", Assembly, "𝔱_μν = 𝔱_νμ"),
    check("split_matter_maxwell", "sem", Exact, "𝔗 = 𝔗_m + 𝔗_M"),
    check("split_microscopic", "sem", Exact, "𝔗 = m𝔗 + M𝔗"),
    check("vacuum_relations", "sem", Exact, "Maxwell medium: D = E, H = B"),
    check("euler_maxwell_fluid", "sem", Exact, "Euler–Maxwell: 𝔗 = (ε+p)uu♭/c² + pδ + 𝔗_M"),
    check("energy_balance", "balance", Convergence, "energy equation along u"),
    check("momentum_balance", "balance", Convergence, "momentum equation transverse to u"),
    check("sem_divergence", "balance", Convergence, "div𝔗 = 0"),
    check("energy_projection", "balance", Convergence, "energy equation = −u·div𝔗"),
    check("momentum_projection", "balance", Convergence, "momentum equation = P(div𝔗)"),
    check("mass_continuity", "balance", Convergence, "div(ρu) = 0"),
    check("entropy_continuity", "balance", Convergence, "div(su) = 0"),
    check("cauchy_advection", "balance", Convergence, "£_u c = 0"),
    check("maxwell_first", "maxwell", Convergence, "−δ(π♭) = ρq u♭, π = ∂𝔢/∂F"),
    check("maxwell_second", "maxwell", Convergence, "d(i_π μ) + qρ i_u μ = 0"),
    check("maxwell_duality", "maxwell", Exact, "−δ(π♭) − ρq u♭ = (−1)^(D+1) ⋆(d(i_π μ) + qρ i_u μ)"),
    check("ponderomotive_writing", "maxwell", Convergence, "div𝔱_f − 𝔣 = div𝔗 + i_(R♯)F"),
    check("maxwell_sem_divergence", "maxwell", Convergence, "div𝔱_M = 0"),
    check("maxwell_sem_trace", "maxwell", Exact, "tr 𝔱_M = 0 in four dimensions"),
    check("faraday_closed", "maxwell", Convergence, "dF = 0"),
    check("gauge_invariance", "maxwell", Assembly, "A → A + df leaves 𝔗 and every residual unchanged"),
    check("einstein", "einstein", Convergence, "Ein = χ𝔱"),
    check("einstein_exterior", "einstein", Convergence, "Ein = χ𝔱_M on the exterior side"),
    check("jump_metric_tangential", "junction", Convergence, "[g] tangential = 0"),
    check("jump_potential_tangential", "junction", Convergence, "[A] tangential = 0"),
    check("jump_extrinsic_curvature", "junction", Convergence, "[K] = 0"),
    check("jump_obrien_synge", "junction", Convergence, "[Ein(·, n)] tangential = 0"),
    check("jump_u_normal", "junction", Convergence, "g(u, n) = 0"),
    check("jump_traction", "junction", Convergence, "[𝔱(·, n) − p n♭] = 0"),
    check("jump_e_tangential", "junction", Convergence, "[i_n i_u ⋆E] = 0"),
    check("jump_b_normal", "junction", Convergence, "[i_n B] = 0"),
    check("jump_d_normal", "junction", Convergence, "[i_n D] = 0"),
    check("jump_h_tangential", "junction", Convergence, "[i_n i_u ⋆H] = 0"),
    check("jump_poynting_normal", "junction", Convergence, "[i_n S] = 0"),
];

pub fn info(name: &str) -> Option<&'static CheckInfo> {
    CATALOG.iter().find(|c| c.name == name)
}

/// Which SEM writings `sem --form` compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SemSelect {
    /// The material (ℓ-based) writing.
    Phi,
    /// The E/B writing: symmetry, splits, vacuum and fluid oracles.
    Eb,
    /// The Faraday (𝔢(u, F)) writing.
    Faraday,
    All,
}

impl SemSelect {
    pub fn includes(self, check: &str) -> bool {
        let form = match check {
            "sem_material_vs_eb" | "sem_material_fd" => SemSelect::Phi,
            "sem_faraday_vs_eb" => SemSelect::Faraday,
            _ => SemSelect::Eb,
        };
        self == SemSelect::All || self == form
    }
}

/// Pointwise residual magnitudes along a line through the grid.
pub type Profile = Vec<(Vec<f64>, f64)>;

#[derive(Clone, Debug)]
pub struct Measure {
    pub name: String,
    pub norms: Norms,
    pub note: Option<String>,
    /// Not applicable to this scenario; counts as passed.
    pub skipped: bool,
    pub profile: Profile,
}

impl Measure {
    fn skipped(name: &str, why: &str) -> Measure {
        Measure { name: name.into(), norms: Norms::zero(), note: Some(why.into()), skipped: true, profile: vec![] }
    }

    fn values(name: &str, values: &[f64], points: &[Vec<f64>]) -> Measure {
        let profile = points.iter().cloned().zip(values.iter().copied()).collect();
        Measure { name: name.into(), norms: Norms::of_values(values, points), note: None, skipped: false, profile }
    }

    fn field(name: &str, f: &Field, region: &Region) -> Measure {
        Measure { name: name.into(), norms: f.norms(region), note: None, skipped: false, profile: profile(f) }
    }

    fn tensor(name: &str, t: &TensorField, region: &Region) -> Measure {
        Measure::field(name, t.field(), region)
    }

    fn with_note(mut self, note: impl Into<String>) -> Measure {
        self.note = Some(note.into());
        self
    }
}

/// The line along the first refinable spatial axis (time if none) through the
/// middle node of every other axis.
fn profile(f: &Field) -> Profile {
    let grid = f.grid();
    let axes = grid.axes();
    let Some(line) = (1..axes.len()).find(|&a| !axes[a].frozen).or((!axes[0].frozen).then_some(0)) else {
        return vec![];
    };
    let mut multi: Vec<usize> = axes.iter().map(|a| a.n / 2).collect();
    (0..axes[line].n)
        .map(|i| {
            multi[line] = i;
            let p = grid.index(&multi);
            (grid.point(p), f.at(p).iter().fold(0.0f64, |m, v| m.max(v.abs())))
        })
        .collect()
}

/// Everything a suite sees for one level.
pub struct Env<'a> {
    pub compiled: &'a Compiled,
    pub problem: &'a Problem,
    /// Region of the interior grid used for grid norms.
    pub region: &'a Region,
    pub exterior_region: Option<&'a Region>,
    /// Evaluate pointwise checks (base level only).
    pub pointwise: bool,
    pub wanted: &'a dyn Fn(&str) -> bool,
    pub orientation: Orientation,
}

impl Env<'_> {
    fn state(&self) -> &FieldState {
        &self.problem.state
    }

    fn grid(&self) -> &Grid {
        self.state().grid()
    }

    fn seed(&self) -> u64 {
        self.compiled.scenario.seed
    }

    fn want(&self, name: &str) -> bool {
        (self.wanted)(name)
    }

    fn want_any(&self, names: &[&str]) -> bool {
        names.iter().any(|n| self.want(n))
    }

    /// Up to [`MAX_POINTWISE`] grid points inside the region, evenly strided.
    fn sample_points(&self) -> Vec<usize> {
        let grid = self.grid();
        let inside: Vec<usize> = (0..grid.len()).filter(|&p| self.region.contains(&grid.point(p))).collect();
        let stride = inside.len().div_ceil(MAX_POINTWISE).max(1);
        inside.into_iter().step_by(stride).collect()
    }

    fn min_h(&self) -> f64 {
        self.grid().axes().iter().filter(|a| !a.frozen).map(|a| a.h()).fold(f64::INFINITY, f64::min)
    }
}

/// a ≈ b relative to their size.
fn rel(a: &Tensor, b: &Tensor) -> f64 {
    a.dist(b) / (1.0 + a.max_abs().max(b.max_abs()))
}

fn rel_form(a: &Form, b: &Form) -> f64 {
    a.dist(b) / (1.0 + a.max_abs().max(b.max_abs()))
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn identities(env: &Env) -> Result<Vec<Measure>, SuiteError> {
    let mut out = Vec::new();
    let fs = env.state();
    let m = &fs.metric;
    let grid = env.grid();
    let d = grid.dim();
    let o = env.orientation;
    let seed = env.seed();
    if env.pointwise {
        let pts = env.sample_points();
        let xs: Vec<Vec<f64>> = pts.iter().map(|&p| grid.point(p)).collect();
        if env.want_any(&["hodge_involution", "interior_hodge", "hodge_inner"]) {
            let (mut inv, mut int, mut inner) = (vec![], vec![], vec![]);
            for &p in &pts {
                let g = m.metric(p);
                let u = fs.u.at(p);
                let ub = Form::covector(&g.lower(u));
                let mut r = rng(seed ^ (p as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                let (mut a1, mut a2, mut a3) = (0.0f64, 0.0f64, 0.0f64);
                for k in 0..=d {
                    let a = random_form(&mut r, d, k, 1.0);
                    let b = random_form(&mut r, d, k, 1.0);
                    a1 = a1.max(rel_form(&a.hodge(g, o).hodge(g, o), &a.scale(-sign(k * (d - k)))));
                    if k < d {
                        let lhs = a.hodge(g, o).interior(u)?;
                        let rhs = ub.wedge(&a)?.hodge(g, o).scale(sign(k));
                        a2 = a2.max(rel_form(&lhs, &rhs));
                    }
                    let lhs = a.wedge(&b.hodge(g, o))?;
                    let rhs = relcont_core::tensor::volume_form(g, o).scale(a.inner(&b, g)?);
                    a3 = a3.max(rel_form(&lhs, &rhs));
                }
                inv.push(a1);
                int.push(a2);
                inner.push(a3);
            }
            out.push(Measure::values("hodge_involution", &inv, &xs));
            out.push(Measure::values("interior_hodge", &int, &xs));
            out.push(Measure::values("hodge_inner", &inner, &xs));
        }
        // round-off of a second difference is ~ ε|α|/h², so scale by h²/|α|
        let h2 = env.min_h().powi(2);
        if env.want("exterior_derivative_squared") {
            let mut worst: Option<Measure> = None;
            for k in 0..d.saturating_sub(1) {
                let a = smooth_tensor_form(seed + k as u64, grid, k);
                let dd = exterior_derivative(&exterior_derivative(&a)?)?;
                let scaled = dd.field().scale(h2 / (a.field().max_abs() + f64::MIN_POSITIVE));
                worst = Some(max_measure(worst, Measure::field("exterior_derivative_squared", &scaled, env.region)));
            }
            out.push(worst.unwrap_or_else(|| Measure::skipped("exterior_derivative_squared", "chart too small")));
        }
        if env.want("codifferential_squared") {
            let mut worst: Option<Measure> = None;
            for k in 2..=d {
                let a = smooth_tensor_form(seed + 10 + k as u64, grid, k);
                let dd = codifferential(&codifferential(&a, m, o)?, m, o)?;
                let scaled = dd.field().scale(h2 / (a.field().max_abs() + f64::MIN_POSITIVE));
                worst = Some(max_measure(worst, Measure::field("codifferential_squared", &scaled, env.region)));
            }
            out.push(worst.unwrap_or_else(|| Measure::skipped("codifferential_squared", "chart too small")));
        }
    }
    if env.want_any(&["lie_lemma", "lie_lemma_coordinate"]) {
        let zeta = smooth_tensor(seed + 20, grid, &[Slot::Up], 1.0);
        let kappa = smooth_tensor(seed + 21, grid, &[Slot::Down, Slot::Down], 1.0);
        let pi = smooth_tensor(seed + 22, grid, &[Slot::Up, Slot::Up], 1.0);
        if env.want("lie_lemma") {
            out.push(Measure::field("lie_lemma", &lie_lemma_residual_covariant(&zeta, &kappa, &pi, m)?, env.region));
        }
        if env.want("lie_lemma_coordinate") {
            out.push(Measure::field("lie_lemma_coordinate", &lie_lemma_residual(&zeta, &kappa, &pi)?, env.region));
        }
    }
    if env.want("potential_lemma") {
        let phi = smooth_tensor(seed + 30, grid, &[], 0.5);
        let phi = Field::from_fn(grid, 1, |_, o| o[0] = 1.0).add(phi.field());
        let j = smooth_tensor(seed + 31, grid, &[Slot::Up], 1.0);
        let a = smooth_tensor(seed + 32, grid, &[Slot::Down], 1.0);
        out.push(Measure::tensor("potential_lemma", &crucial_lemma_residual(&phi, &j, &a, m, o)?, env.region));
    }
    if env.want("bianchi") {
        out.push(Measure::tensor("bianchi", &bianchi_residual(m), env.region));
    }
    Ok(out)
}

fn smooth_tensor_form(seed: u64, grid: &Grid, k: usize) -> TensorField {
    relcont_core::sampling::smooth_form(seed, grid, k, 1.0)
}

fn max_measure(a: Option<Measure>, b: Measure) -> Measure {
    match a {
        Some(a) if !(b.norms.linf > a.norms.linf) => a,
        _ => b,
    }
}

pub fn sem(env: &Env) -> Result<Vec<Measure>, SuiteError> {
    if !env.pointwise {
        return Ok(vec![]);
    }
    let fs = env.state();
    let model = &env.compiled.model;
    let o = env.orientation;
    let grid = env.grid();
    let pts = env.sample_points();
    let xs: Vec<Vec<f64>> = pts.iter().map(|&p| grid.point(p)).collect();
    let maxwell_medium = model.kind() == ModelKind::EulerMaxwell;
    let names = [
        "sem_material_vs_eb",
        "sem_material_fd",
        "sem_faraday_vs_eb",
        "sem_symmetry",
        "split_matter_maxwell",
        "split_microscopic",
        "vacuum_relations",
        "euler_maxwell_fluid",
    ];
    let mut vals: Vec<Vec<f64>> = vec![vec![]; names.len()];
    for &p in &pts {
        let st = fs.matter_state(p, o)?;
        let g = &st.g;
        let f = fs.f.form_at(p);
        let eb = sem_eb(model, &st, o)?;
        let ms = MaterialState {
            w: st.obs.u().to_vec(),
            varrho: st.rho,
            varsigma: st.s,
            a: env.problem.potential.as_ref().map_or_else(|| Form::zero(g.dim(), 1), |a| a.form_at(p)),
            f: f.clone(),
            cauchy: st.cauchy.clone(),
            g: g.clone(),
            c: fs.c,
            q: fs.q,
        };
        let mut row = [0.0; 8];
        if env.want(names[0]) {
            row[0] = rel(&sem_material(model, &ms, o)?.t, &eb.t);
        }
        if env.want(names[1]) {
            row[1] = rel(&sem_material_fd(model, &ms, o, FD_STEP)?.t, &eb.t);
        }
        if env.want(names[2]) {
            row[2] = rel(&sem_faraday(model, &st, &f, o)?.t, &eb.t);
        }
        row[3] = eb.asymmetry(g) / (1.0 + eb.t.max_abs());
        let (a, b) = sem_split_matter_maxwell(model, &st, o)?;
        row[4] = rel(&a.add(&b), &eb.t);
        let (a, b) = sem_split_microscopic(model, &st, o)?;
        row[5] = rel(&a.add(&b), &eb.t);
        if maxwell_medium {
            let ev = model.evaluate(&st)?;
            let df = ev.derived_fields(g);
            row[6] = rel_form(&df.d, &st.e).max(rel_form(&df.h, &st.b));
            let mt = &ev.matter;
            let pressure = mt.d_rho * st.rho + mt.d_s * st.s - mt.eps;
            let c2 = fs.c * fs.c;
            let fluid = vector_covector(st.obs.u(), st.obs.u_flat())
                .scale((mt.eps + pressure) / c2)
                .add(&Tensor::identity(g.dim()).scale(pressure));
            row[7] = rel(&fluid.add(&maxwell_sem(&f, g)), &eb.t);
        }
        for (v, r) in vals.iter_mut().zip(row) {
            v.push(r);
        }
    }
    let mut out = Vec::new();
    for (i, name) in names.iter().enumerate() {
        if !env.want(name) {
            continue;
        }
        if i >= 6 && !maxwell_medium {
            out.push(Measure::skipped(name, "only for the euler_maxwell model"));
            continue;
        }
        out.push(Measure::values(name, &vals[i], &xs));
    }
    Ok(out)
}

pub fn balance(env: &Env) -> Result<Vec<Measure>, SuiteError> {
    let b = balance_residuals(&env.compiled.model, env.state(), env.orientation)?;
    let r = env.region;
    let mut out = vec![
        Measure::tensor("energy_balance", &b.energy, r),
        Measure::tensor("momentum_balance", &b.momentum, r),
        Measure::tensor("sem_divergence", &b.unprojected, r),
        Measure::tensor("energy_projection", &b.energy.sub(&b.energy_from_div), r),
        Measure::tensor("momentum_projection", &b.momentum.sub(&b.momentum_from_div), r),
        Measure::tensor("mass_continuity", &b.continuity_mass, r),
        Measure::tensor("entropy_continuity", &b.continuity_entropy, r),
    ];
    out.push(match &b.cauchy_advection {
        Some(c) => Measure::tensor("cauchy_advection", c, r),
        None => Measure::skipped("cauchy_advection", "no Cauchy tensor given"),
    });
    Ok(out)
}

pub fn maxwell(env: &Env) -> Result<Vec<Measure>, SuiteError> {
    let fs = env.state();
    let model = &env.compiled.model;
    let o = env.orientation;
    let r = env.region;
    let m = &fs.metric;
    let grid = env.grid();
    let d = grid.dim();
    let mut out = Vec::new();
    if env.want_any(&["maxwell_first", "maxwell_second", "maxwell_duality"]) {
        let mx = maxwell_residuals(model, fs, o)?;
        out.push(Measure::tensor("maxwell_first", &mx.first, r));
        out.push(Measure::tensor("maxwell_second", &mx.second, r));
        if env.pointwise {
            let sigma = maxwell_duality_sign(d);
            let scale = 1.0 + mx.first.field().max_abs().max(mx.second.field().max_abs());
            let dual = Field::from_points(grid, 1, |p, out| {
                let star = mx.second.form_at(p).hodge(m.metric(p), o).scale(sigma);
                out[0] = mx.first.form_at(p).dist(&star) / scale;
            });
            out.push(Measure::field("maxwell_duality", &dual, r));
        }
    }
    if env.want("ponderomotive_writing") {
        let p = ponderomotive_residuals(model, fs, o)?;
        out.push(Measure::tensor("ponderomotive_writing", &p.direct.sub(&p.via_balance), r));
    }
    if env.want("maxwell_sem_divergence") {
        out.push(Measure::tensor("maxwell_sem_divergence", &divergence(&maxwell_sem_field(m, &fs.f), m)?, r));
    }
    if env.pointwise && env.want("maxwell_sem_trace") {
        out.push(if d == 4 {
            let tr = Field::from_points(grid, 1, |p, out| {
                let t = maxwell_sem(&fs.f.form_at(p), m.metric(p));
                out[0] = t.trace() / (1.0 + t.max_abs());
            });
            Measure::field("maxwell_sem_trace", &tr, r)
        } else {
            Measure::skipped("maxwell_sem_trace", "𝔱_M is trace-free only in four dimensions")
        });
    }
    if env.want("faraday_closed") {
        out.push(Measure::tensor("faraday_closed", &exterior_derivative(&fs.f)?, r));
    }
    if env.pointwise && env.want("gauge_invariance") {
        out.push(match &env.problem.potential {
            Some(a) => gauge(env, a)?,
            None => Measure::skipped("gauge_invariance", "needs a potential A"),
        });
    }
    Ok(out)
}

/// Largest change of 𝔗 and of all residuals under A → A + df, each relative
/// to the size of the original field.
fn gauge(env: &Env, a: &TensorField) -> Result<Measure, SuiteError> {
    let fs = env.state();
    let model = &env.compiled.model;
    let o = env.orientation;
    let grid = env.grid();
    let f = smooth_tensor(env.seed() + 40, grid, &[], 1.0);
    let a2 = a.add(&exterior_derivative(&f)?);
    let fs2 = FieldState { f: exterior_derivative(&a2)?, ..fs.clone() };
    let fields = |s: &FieldState| -> Result<Vec<TensorField>, SuiteError> {
        let b = balance_residuals(model, s, o)?;
        let mx = maxwell_residuals(model, s, o)?;
        Ok(vec![sem_field(model, s, o)?, b.energy, b.momentum, b.unprojected, mx.first, mx.second])
    };
    let (before, after) = (fields(fs)?, fields(&fs2)?);
    let mut change = Field::zeros(grid, 1);
    for (x, y) in before.iter().zip(&after) {
        let diff = y.field().sub(x.field()).scale(1.0 / (1.0 + x.field().max_abs()));
        change = Field::from_points(grid, 1, |p, out| {
            out[0] = change.at(p)[0].max(diff.at(p).iter().fold(0.0f64, |m, v| m.max(v.abs())));
        });
    }
    Ok(Measure::field("gauge_invariance", &change, env.region)
        .with_note("f: seeded smooth scalar, df by grid differences"))
}

pub fn einstein(env: &Env) -> Result<Vec<Measure>, SuiteError> {
    let fs = env.state();
    let chi = env.compiled.scenario.chi;
    let mut out = Vec::new();
    if env.want("einstein") {
        let sem = sem_field(&env.compiled.model, fs, env.orientation)?;
        out.push(Measure::tensor("einstein", &einstein_residual(&fs.metric, &sem, chi)?, env.region));
    }
    if env.want("einstein_exterior") {
        out.push(match (&env.problem.exterior, env.exterior_region) {
            (Some(ext), Some(region)) => {
                let sem = maxwell_sem_field(&ext.metric, &ext.f);
                Measure::tensor("einstein_exterior", &einstein_residual(&ext.metric, &sem, chi)?, region)
            }
            _ => Measure::skipped("einstein_exterior", "no exterior side"),
        });
    }
    Ok(out)
}

pub fn junction(env: &Env) -> Result<Vec<Measure>, SuiteError> {
    let (Some(ext), Some((iface, samples))) = (&env.problem.exterior, &env.compiled.interface) else {
        let why = "needs [exterior] and [interface]";
        return Ok(relcont_core::junction::JUMP_CONDITIONS
            .iter()
            .map(|n| Measure::skipped(&format!("jump_{n}"), why))
            .collect());
    };
    let sol = TwoSidedSolution {
        interior: env.state().clone(),
        interior_potential: env.problem.potential.clone(),
        model: env.compiled.model.clone(),
        exterior: ext.clone(),
        chi: env.compiled.scenario.chi,
    };
    let report = Junction::new(&sol, iface, samples.clone(), env.orientation)?.report();
    Ok(report
        .checks
        .iter()
        .map(|c| {
            let name = format!("jump_{}", c.name);
            match &c.note {
                Some(note) => Measure::skipped(&name, note),
                None => Measure::values(&name, &c.values, &report.samples),
            }
        })
        .collect())
}

pub type SuiteFn = fn(&Env) -> Result<Vec<Measure>, SuiteError>;

pub fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "identities" => identities,
        "sem" => sem,
        "balance" => balance,
        "maxwell" => maxwell,
        "einstein" => einstein,
        "junction" => junction,
        _ => return None,
    })
}

/// No check of the suite needs more than the base level.
pub fn pointwise_only(suite: &str, wanted: &dyn Fn(&str) -> bool) -> bool {
    CATALOG.iter().filter(|c| c.suite == suite && wanted(c.name)).all(|c| c.kind != Kind::Convergence)
}
