//! Energy-density models ε(ρ, s, E, B, c, g) = ε_m + ε_M with symbolic
//! partials, a central-difference oracle for them, and the derived fields
//! (D, H, P, M, pressure, total energy, elastic stress).
//!
//! The matter part is
//!
//! ```text
//! ε_m = eos(ρ,s) − ½ χᴱ(ρ,s) I₁ − ½ χᴮ(ρ,s) I₂ + f(ρ,s,I₁,I₂,I₃) + W(ρ,s,J₁,J₂)
//! ```
//!
//! with I₁ = |E|², I₂ = |B|², I₃ = g(E,B) (n = 3 only), J₁ = tr c and
//! J₂ = c^{ab}c_{ab}; the Maxwell part is ε_M = −½I₁ + ½I₂. Nonlinear
//! electrodynamics replaces ε_M by ε_nl(α, β) with α = ½⟨F,F⟩ = ½(I₂ − I₁)
//! and β = ½(F∧F)/μ = I₃.

use crate::em::{EmError, Observer};
use crate::tensor::index::combinations;
use crate::tensor::{trace_tensor_product, Form, KVector, Metric, Orientation, Slot, Tensor, TensorError};
use relcont_expr::{EvalError, Expr, ParseError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Variable table of model expressions.
pub const MODEL_VARS: [&str; 8] = ["rho", "s", "I1", "I2", "I3", "J1", "J2", "c"];
const RHO: usize = 0;
const S: usize = 1;
const I1: usize = 2;
const I2: usize = 3;
const I3: usize = 4;
const J1: usize = 5;
const J2: usize = 6;
const NPARTIAL: usize = 7;

/// Variables of the nonlinear electrodynamics density.
pub const NL_VARS: [&str; 2] = ["alpha", "beta"];

/// Central-difference step of the partial-derivative oracle.
pub const FD_STEP: f64 = 1e-5;
pub const FD_REL_TOL: f64 = 1e-5;
pub const FD_ABS_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ConstitutiveError {
    #[error("model field `{field}`: {source}")]
    Parse { field: &'static str, source: ParseError },
    #[error("model field `{field}` may only depend on {allowed}")]
    Dependence { field: &'static str, allowed: &'static str },
    #[error("model kind {kind:?} does not take `{field}`")]
    FieldNotAllowed { kind: ModelKind, field: &'static str },
    #[error("model kind {kind:?} requires `{field}`")]
    MissingField { kind: ModelKind, field: &'static str },
    #[error("{what} = {value} is outside its validity range ({range})")]
    OutOfRange { what: &'static str, value: f64, range: &'static str },
    #[error("elastic model needs a Cauchy deformation tensor")]
    MissingCauchy,
    #[error("{0} is only defined for n = 3")]
    NeedsThreeSpace(&'static str),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Em(#[from] EmError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("invalid state: {0}")]
    State(String),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Hash)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    EulerMaxwell,
    Linear,
    NonlinearInvariants,
    Elastic,
    NonlinearEd,
}

fn default_eos() -> String {
    "rho*c^2".into()
}

/// Scenario-level model description; all functions are expression strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Fluid state equation ε₀(rho, s) (may use `c`).
    #[serde(default = "default_eos")]
    pub eos: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_e: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_b: Option<String>,
    /// f(rho, s, I1, I2, I3).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    /// Elastic energy W(rho, s, J1, J2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    /// ε_nl(alpha, beta).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nl: Option<String>,
}

impl ModelSpec {
    pub fn euler_maxwell(eos: &str) -> ModelSpec {
        ModelSpec {
            kind: ModelKind::EulerMaxwell,
            eos: eos.into(),
            chi_e: None,
            chi_b: None,
            f: None,
            w: None,
            nl: None,
        }
    }

    pub fn linear(eos: &str, chi_e: &str, chi_b: &str) -> ModelSpec {
        ModelSpec {
            kind: ModelKind::Linear,
            chi_e: Some(chi_e.into()),
            chi_b: Some(chi_b.into()),
            ..Self::euler_maxwell(eos)
        }
    }

    pub fn nonlinear_invariants(eos: &str, f: &str) -> ModelSpec {
        ModelSpec { kind: ModelKind::NonlinearInvariants, f: Some(f.into()), ..Self::euler_maxwell(eos) }
    }

    pub fn elastic(eos: &str, w: &str) -> ModelSpec {
        ModelSpec { kind: ModelKind::Elastic, w: Some(w.into()), ..Self::euler_maxwell(eos) }
    }

    pub fn nonlinear_ed(eos: &str, nl: &str) -> ModelSpec {
        ModelSpec { kind: ModelKind::NonlinearEd, nl: Some(nl.into()), ..Self::euler_maxwell(eos) }
    }
}

fn parse_field(
    field: &'static str,
    text: &str,
    allowed: &[usize],
    allowed_names: &'static str,
) -> Result<Expr, ConstitutiveError> {
    let e = Expr::parse_with(text, &MODEL_VARS).map_err(|source| ConstitutiveError::Parse { field, source })?;
    if (0..MODEL_VARS.len()).any(|v| e.depends_on(v) && !allowed.contains(&v)) {
        return Err(ConstitutiveError::Dependence { field, allowed: allowed_names });
    }
    Ok(e)
}

fn var(i: usize) -> Expr {
    Expr::var(i)
}

/// A compiled model: ε_m and ε_M as expressions with their partials.
#[derive(Clone, Debug)]
pub struct Model {
    spec: ModelSpec,
    c: f64,
    matter: Expr,
    maxwell: Expr,
    d_matter: Vec<Expr>,
    d_maxwell: Vec<Expr>,
    chi_e: Expr,
    chi_b: Expr,
    nl: Option<NonlinearEd>,
}

impl Model {
    pub fn new(spec: &ModelSpec, c: f64) -> Result<Model, ConstitutiveError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(EmError::BadLightSpeed(c).into());
        }
        let kind = spec.kind;
        let allowed: &[&'static str] = match kind {
            ModelKind::EulerMaxwell => &[],
            ModelKind::Linear => &["chi_e", "chi_b"],
            ModelKind::NonlinearInvariants => &["f"],
            ModelKind::Elastic => &["chi_e", "chi_b", "w"],
            ModelKind::NonlinearEd => &["nl"],
        };
        let present = [
            ("chi_e", spec.chi_e.is_some()),
            ("chi_b", spec.chi_b.is_some()),
            ("f", spec.f.is_some()),
            ("w", spec.w.is_some()),
            ("nl", spec.nl.is_some()),
        ];
        for (field, here) in present {
            if here && !allowed.contains(&field) {
                return Err(ConstitutiveError::FieldNotAllowed { kind, field });
            }
        }
        let required = match kind {
            ModelKind::NonlinearInvariants => Some(("f", spec.f.is_some())),
            ModelKind::Elastic => Some(("w", spec.w.is_some())),
            ModelKind::NonlinearEd => Some(("nl", spec.nl.is_some())),
            _ => None,
        };
        if let Some((field, false)) = required {
            return Err(ConstitutiveError::MissingField { kind, field });
        }

        let cvar = MODEL_VARS.len() - 1;
        let eos = parse_field("eos", &spec.eos, &[RHO, S, cvar], "rho, s, c")?;
        let opt = |field: &'static str, text: &Option<String>, allowed: &[usize], names: &'static str| {
            text.as_deref().map(|t| parse_field(field, t, allowed, names)).unwrap_or(Ok(Expr::constant(0.0)))
        };
        let chi_e = opt("chi_e", &spec.chi_e, &[RHO, S, cvar], "rho, s, c")?;
        let chi_b = opt("chi_b", &spec.chi_b, &[RHO, S, cvar], "rho, s, c")?;
        let f = opt("f", &spec.f, &[RHO, S, I1, I2, I3, cvar], "rho, s, I1, I2, I3, c")?;
        let w = opt("w", &spec.w, &[RHO, S, J1, J2, cvar], "rho, s, J1, J2, c")?;

        let at_c = |e: &Expr| -> Result<Option<f64>, ConstitutiveError> {
            if (0..NPARTIAL).any(|v| e.depends_on(v)) {
                return Ok(None);
            }
            let mut vals = [0.0; 8];
            vals[cvar] = c;
            Ok(Some(e.eval(&vals)?))
        };
        if let Some(v) = at_c(&chi_b)? {
            check_chi_b(v)?;
        }

        let template =
            Expr::parse_with("eos - 0.5*xe*I1 - 0.5*xb*I2 + f + w", &["eos", "xe", "xb", "f", "w", "I1", "I2"])
                .expect("template parses");
        let mut matter = template.substitute(&[eos, chi_e.clone(), chi_b.clone(), f, w, var(I1), var(I2)]);
        let maxwell_text = Expr::parse_with("-0.5*I1 + 0.5*I2", &MODEL_VARS).expect("parses");
        let mut nl = None;
        if let Some(text) = &spec.nl {
            let n = NonlinearEd::new(text)?;
            // ε_m = eos + ε_nl(½(I₂ − I₁), I₃) − ε_M
            let alpha = Expr::parse_with("0.5*(I2 - I1)", &MODEL_VARS).expect("parses");
            let nl_sub = n.expr.substitute(&[alpha, var(I3)]);
            let t = Expr::parse_with("m + n + 0.5*I1 - 0.5*I2", &["m", "n", "I1", "I2"]).expect("parses");
            matter = t.substitute(&[matter, nl_sub, var(I1), var(I2)]);
            nl = Some(n);
        }
        let d_matter = (0..NPARTIAL).map(|v| matter.derivative(v)).collect();
        let d_maxwell = (0..NPARTIAL).map(|v| maxwell_text.derivative(v)).collect();
        Ok(Model { spec: spec.clone(), c, matter, maxwell: maxwell_text, d_matter, d_maxwell, chi_e, chi_b, nl })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn uses_i3(&self) -> bool {
        self.matter.depends_on(I3)
    }

    pub fn uses_cauchy(&self) -> bool {
        self.matter.depends_on(J1) || self.matter.depends_on(J2)
    }

    pub fn nonlinear_ed(&self) -> Option<&NonlinearEd> {
        self.nl.as_ref()
    }

    /// (χᴱ, χᴮ) at (ρ, s) and their ρ, s derivatives: [χ, ∂ρχ, ∂sχ].
    pub fn susceptibilities(&self, rho: f64, s: f64) -> Result<([f64; 3], [f64; 3]), ConstitutiveError> {
        let vals = self.values(rho, s, [0.0; 5]);
        let three = |e: &Expr| -> Result<[f64; 3], ConstitutiveError> {
            Ok([e.eval(&vals)?, e.derivative(RHO).eval(&vals)?, e.derivative(S).eval(&vals)?])
        };
        Ok((three(&self.chi_e)?, three(&self.chi_b)?))
    }

    /// Effective susceptibilities entering the pressure of a linear medium,
    /// p = p₀ + ½(1 + χ̃ᴱ)I₁ + ½(1 − χ̃ᴮ)I₂:
    /// χ̃ᴱ = χᴱ − ρ∂ρχᴱ − s∂sχᴱ and χ̃ᴮ = χᴮ + ρ∂ρχᴮ + s∂sχᴮ.
    pub fn tilde_susceptibilities(&self, rho: f64, s: f64) -> Result<(f64, f64), ConstitutiveError> {
        let (e, b) = self.susceptibilities(rho, s)?;
        Ok((e[0] - rho * e[1] - s * e[2], b[0] + rho * b[1] + s * b[2]))
    }

    fn values(&self, rho: f64, s: f64, inv: [f64; 5]) -> [f64; 8] {
        [rho, s, inv[0], inv[1], inv[2], inv[3], inv[4], self.c]
    }

    /// ε and its partials, split into matter and Maxwell parts.
    pub fn evaluate(&self, st: &MatterState) -> Result<ConstitutiveEval, ConstitutiveError> {
        let g = &st.g;
        let n = g.dim() - 1;
        if (st.obs.c() - self.c).abs() > 1e-12 * self.c {
            return Err(ConstitutiveError::State(format!(
                "observer c = {} differs from model c = {}",
                st.obs.c(),
                self.c
            )));
        }
        if self.uses_i3() && n != 3 {
            return Err(ConstitutiveError::NeedsThreeSpace("the invariant I3 = g(E,B)"));
        }
        if self.uses_cauchy() && st.cauchy.is_none() {
            return Err(ConstitutiveError::MissingCauchy);
        }
        let e_sharp = g.raise(st.e.data());
        let b_sharp = st.b.sharp(g);
        let i1 = st.e.norm2(g);
        let i2 = st.b.norm2(g);
        let i3 = if n == 3 { g.dot_co(st.e.data(), st.b.data()) } else { 0.0 };
        let (j1, j2, c_up) = match &st.cauchy {
            Some(c) => {
                let up = c.raise_index(0, g)?.raise_index(1, g)?;
                let j1 = (0..g.dim()).map(|a| (0..g.dim()).map(|b| g.ginv(a, b) * c.get(&[a, b])).sum::<f64>()).sum();
                let j2 = up.data().iter().zip(c.data()).map(|(x, y)| x * y).sum();
                (j1, j2, Some(up))
            }
            None => (0.0, 0.0, None),
        };
        let vals = self.values(st.rho, st.s, [i1, i2, i3, j1, j2]);
        if self.chi_b.depends_on(RHO) || self.chi_b.depends_on(S) {
            check_chi_b(self.chi_b.eval(&vals)?)?;
        }
        let part = |eps: &Expr, d: &[Expr]| -> Result<Partials, ConstitutiveError> {
            let dv: Vec<f64> = d.iter().map(|e| e.eval(&vals)).collect::<Result<_, _>>()?;
            // ∂I₁/∂E = 2E♯, ∂I₂/∂B = 2B♯, ∂I₃/∂E = B♯, ∂I₃/∂B = E♯ (n = 3)
            let mut d_e: Vec<f64> = e_sharp.iter().map(|x| 2.0 * dv[I1] * x).collect();
            let mut d_b = b_sharp.scale(2.0 * dv[I2]);
            if n == 3 && dv[I3] != 0.0 {
                for (o, x) in d_e.iter_mut().zip(b_sharp.data()) {
                    *o += dv[I3] * x;
                }
                d_b = d_b.axpy(dv[I3], &KVector::vector(&e_sharp));
            }
            let d_c = c_up.as_ref().map(|up| {
                // ∂J₁/∂c_{ab} = g^{ab}, ∂J₂/∂c_{ab} = 2c^{ab}
                Tensor::from_fn(g.dim(), &[Slot::Up, Slot::Up], |i| {
                    dv[J1] * g.ginv(i[0], i[1]) + 2.0 * dv[J2] * up.get(i)
                })
            });
            Ok(Partials { eps: eps.eval(&vals)?, d_rho: dv[RHO], d_s: dv[S], d_e, d_b, d_c })
        };
        let matter = part(&self.matter, &self.d_matter)?;
        let maxwell = part(&self.maxwell, &self.d_maxwell)?;
        Ok(ConstitutiveEval { total: matter.add(&maxwell), matter, maxwell })
    }

    /// Central-difference check of every analytic partial of the total ε.
    pub fn fd_check_partials(&self, st: &MatterState) -> Result<FdReport, ConstitutiveError> {
        let base = self.evaluate(st)?.total;
        let h = FD_STEP;
        let mut checks = Vec::new();
        let eps_at = |s: &MatterState| self.evaluate(s).map(|e| e.total.eps);
        let mut push =
            |name: String, analytic: f64, plus: MatterState, minus: MatterState| -> Result<(), ConstitutiveError> {
                let fd = (eps_at(&plus)? - eps_at(&minus)?) / (2.0 * h);
                checks.push(FdCheck::new(name, analytic, fd));
                Ok(())
            };
        {
            let (mut p, mut m) = (st.clone(), st.clone());
            p.rho += h;
            m.rho -= h;
            push("d/drho".into(), base.d_rho, p, m)?;
            let (mut p, mut m) = (st.clone(), st.clone());
            p.s += h;
            m.s -= h;
            push("d/ds".into(), base.d_s, p, m)?;
        }
        let d = st.g.dim();
        for a in 0..d {
            let mut de = vec![0.0; d];
            de[a] = h;
            let (mut p, mut m) = (st.clone(), st.clone());
            p.e = st.e.add(&Form::covector(&de));
            m.e = st.e.sub(&Form::covector(&de));
            push(format!("d/dE_{a}"), base.d_e[a], p, m)?;
        }
        let k = st.b.deg();
        for (j, set) in combinations(d, k).iter().enumerate() {
            let mut unit = vec![0.0; combinations(d, k).len()];
            unit[j] = h;
            let db = Form::from_increasing(d, k, &unit);
            let (mut p, mut m) = (st.clone(), st.clone());
            p.b = st.b.add(&db);
            m.b = st.b.sub(&db);
            push(format!("d/dB_{set:?}"), base.d_b.get(set), p, m)?;
        }
        if let (Some(c), Some(dc)) = (&st.cauchy, &base.d_c) {
            // symmetric perturbation: c_ab and c_ba move together, so the
            // off-diagonal derivative is ε_c^{ab} + ε_c^{ba}
            for a in 0..d {
                for b in a..d {
                    let mut delta = Tensor::zero(d, &[Slot::Down, Slot::Down]);
                    delta.set(&[a, b], h);
                    delta.set(&[b, a], h);
                    let (mut p, mut m) = (st.clone(), st.clone());
                    p.cauchy = Some(c.add(&delta));
                    m.cauchy = Some(c.sub(&delta));
                    let analytic = if a == b { dc.get(&[a, a]) } else { dc.get(&[a, b]) + dc.get(&[b, a]) };
                    push(format!("d/dc_{a}{b}"), analytic, p, m)?;
                }
            }
        }
        Ok(FdReport::new(checks))
    }
}

fn check_chi_b(v: f64) -> Result<(), ConstitutiveError> {
    if !(v < 1.0) {
        return Err(ConstitutiveError::OutOfRange { what: "chi_b", value: v, range: "chi_b < 1 so that 1/mu0 > 0" });
    }
    Ok(())
}

/// Pointwise matter state. Fields are public so perturbation oracles can move
/// off the constraint set; [`MatterState::new`] checks the invariants.
#[derive(Clone, Debug)]
pub struct MatterState {
    pub rho: f64,
    pub s: f64,
    pub e: Form,
    pub b: Form,
    pub cauchy: Option<Tensor>,
    pub obs: Observer,
    pub g: Metric,
}

impl MatterState {
    pub fn new(
        rho: f64,
        s: f64,
        e: Form,
        b: Form,
        cauchy: Option<Tensor>,
        obs: Observer,
        g: Metric,
    ) -> Result<MatterState, ConstitutiveError> {
        if !(rho > 0.0) {
            return Err(ConstitutiveError::State(format!("rho must be positive, got {rho}")));
        }
        if e.deg() != 1 || b.deg() + 3 != g.dim() {
            return Err(ConstitutiveError::State("E must be a 1-form and B an (n−2)-form".into()));
        }
        obs.require_transverse("E", &e)?;
        obs.require_transverse("B", &b)?;
        if let Some(c) = &cauchy {
            if c.slots() != [Slot::Down, Slot::Down] || c.asymmetry() > 1e-10 * (1.0 + c.max_abs()) {
                return Err(ConstitutiveError::State("Cauchy tensor must be a symmetric (0,2) tensor".into()));
            }
            let cu = (0..g.dim())
                .map(|b| (0..g.dim()).map(|a| c.get(&[a, b]) * obs.u()[a]).sum::<f64>().abs())
                .fold(0.0, f64::max);
            if cu > 1e-10 * (1.0 + obs.c() * c.max_abs()) {
                return Err(ConstitutiveError::State(format!("Cauchy tensor is not u-transverse (|c(u,·)| = {cu:e})")));
            }
        }
        Ok(MatterState { rho, s, e, b, cauchy, obs, g })
    }
}

/// ε and its partials: ∂ε/∂E is a vector, ∂ε/∂B an (n−2)-vector (colon
/// normalization, dε = ε_B : dB), ∂ε/∂c a symmetric (2,0) tensor.
#[derive(Clone, Debug)]
pub struct Partials {
    pub eps: f64,
    pub d_rho: f64,
    pub d_s: f64,
    pub d_e: Vec<f64>,
    pub d_b: KVector,
    pub d_c: Option<Tensor>,
}

impl Partials {
    pub fn add(&self, o: &Partials) -> Partials {
        let d_c = match (&self.d_c, &o.d_c) {
            (Some(a), Some(b)) => Some(a.add(b)),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        Partials {
            eps: self.eps + o.eps,
            d_rho: self.d_rho + o.d_rho,
            d_s: self.d_s + o.d_s,
            d_e: self.d_e.iter().zip(&o.d_e).map(|(a, b)| a + b).collect(),
            d_b: self.d_b.add(&o.d_b),
            d_c,
        }
    }

    /// ∂ε/∂E · E.
    pub fn de_dot_e(&self, e: &Form) -> f64 {
        self.d_e.iter().zip(e.data()).map(|(a, b)| a * b).sum()
    }

    /// ∂ε/∂B : B.
    pub fn db_colon_b(&self, b: &Form) -> f64 {
        self.d_b.pairing(b)
    }

    /// ε_ρρ + ε_s s + ε_B:B − ε.
    pub fn pressure(&self, st: &MatterState) -> f64 {
        self.d_rho * st.rho + self.d_s * st.s + self.db_colon_b(&st.b) - self.eps
    }

    /// ε − ε_E·E.
    pub fn total_energy(&self, st: &MatterState) -> f64 {
        self.eps - self.de_dot_e(&st.e)
    }

    /// (t_el)^μ_ν = −2 ε_c^{λμ} c_{λν}; zero without a Cauchy tensor.
    pub fn elastic_stress(&self, st: &MatterState) -> Tensor {
        let d = st.g.dim();
        match (&self.d_c, &st.cauchy) {
            (Some(dc), Some(c)) => Tensor::from_fn(d, &[Slot::Up, Slot::Down], |i| {
                -2.0 * (0..d).map(|l| dc.get(&[l, i[0]]) * c.get(&[l, i[1]])).sum::<f64>()
            }),
            _ => Tensor::zero(d, &[Slot::Up, Slot::Down]),
        }
    }

    /// P t_el P, equal to [`Partials::elastic_stress`] for a u-transverse c.
    pub fn elastic_stress_projected(&self, st: &MatterState) -> Tensor {
        let p = st.obs.projection();
        let t = self.elastic_stress(st);
        let d = st.g.dim();
        Tensor::from_fn(d, &[Slot::Up, Slot::Down], |i| {
            let mut acc = 0.0;
            for a in 0..d {
                for b in 0..d {
                    acc += p.get(&[i[0], a]) * t.get(&[a, b]) * p.get(&[b, i[1]]);
                }
            }
            acc
        })
    }

    /// S_ε = (−1)^n (1/c) i_{E♯} i_u ⋆(ε_B♭).
    pub fn poynting(&self, st: &MatterState, o: Orientation) -> Form {
        crate::em::poynting(&st.e, &self.d_b, &st.obs, &st.g, o)
    }

    /// B♯ ⊗tr (ε_B)♭.
    pub fn magnetic_stress(&self, st: &MatterState) -> Tensor {
        trace_tensor_product(&st.b.sharp(&st.g), &self.d_b.flat(&st.g))
    }
}

#[derive(Clone, Debug)]
pub struct ConstitutiveEval {
    pub total: Partials,
    pub matter: Partials,
    pub maxwell: Partials,
}

/// D = P + E and H = −M + B, from ε_E = −D♯, ε_B = H♯, ε_{m,E} = −P♯, ε_{m,B} = −M♯.
#[derive(Clone, Debug)]
pub struct DerivedFields {
    pub d: Form,
    pub h: Form,
    pub p: Form,
    pub m: Form,
}

impl ConstitutiveEval {
    pub fn derived_fields(&self, g: &Metric) -> DerivedFields {
        let lower = |v: &[f64]| Form::covector(&g.lower(v));
        DerivedFields {
            d: lower(&self.total.d_e).scale(-1.0),
            h: self.total.d_b.flat(g),
            p: lower(&self.matter.d_e).scale(-1.0),
            m: self.matter.d_b.flat(g).scale(-1.0),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FdCheck {
    pub name: String,
    pub analytic: f64,
    pub fd: f64,
    pub error: f64,
    pub pass: bool,
}

impl FdCheck {
    fn new(name: String, analytic: f64, fd: f64) -> FdCheck {
        let error = (analytic - fd).abs();
        let pass = error <= FD_ABS_FLOOR || error <= FD_REL_TOL * analytic.abs().max(fd.abs());
        FdCheck { name, analytic, fd, error, pass }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FdReport {
    pub checks: Vec<FdCheck>,
    pub pass: bool,
}

impl FdReport {
    pub fn new(checks: Vec<FdCheck>) -> FdReport {
        let pass = checks.iter().all(|c| c.pass);
        FdReport { checks, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &FdCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Nonlinear electrodynamics ε_nl(α, β), n = 3.
#[derive(Clone, Debug)]
pub struct NonlinearEd {
    expr: Expr,
    d_alpha: Expr,
    d_beta: Expr,
}

impl NonlinearEd {
    pub fn new(text: &str) -> Result<NonlinearEd, ConstitutiveError> {
        let expr =
            Expr::parse_with(text, &NL_VARS).map_err(|source| ConstitutiveError::Parse { field: "nl", source })?;
        Ok(NonlinearEd { d_alpha: expr.derivative(0), d_beta: expr.derivative(1), expr })
    }

    /// α = ½⟨F,F⟩ and β = ½(F∧F)/μ.
    pub fn invariants(f: &Form, g: &Metric, o: Orientation) -> Result<(f64, f64), ConstitutiveError> {
        if g.dim() != 4 {
            return Err(ConstitutiveError::NeedsThreeSpace("nonlinear electrodynamics"));
        }
        let top = [0, 1, 2, 3];
        let ff = f.wedge(f).expect("4D").get(&top);
        let mu = crate::tensor::volume_form(g, o).get(&top);
        Ok((0.5 * f.norm2(g), 0.5 * ff / mu))
    }

    /// (ε_nl, ∂ε_nl/∂α, ∂ε_nl/∂β) at (α, β).
    pub fn eval(&self, alpha: f64, beta: f64) -> Result<[f64; 3], ConstitutiveError> {
        let v = [alpha, beta];
        Ok([self.expr.eval(&v)?, self.d_alpha.eval(&v)?, self.d_beta.eval(&v)?])
    }

    /// ℓ_nl / μ = −ε_nl(α, β).
    pub fn lagrangian(&self, f: &Form, g: &Metric, o: Orientation) -> Result<f64, ConstitutiveError> {
        let (a, b) = Self::invariants(f, g, o)?;
        Ok(-self.eval(a, b)?[0])
    }

    /// 𝔗_nl = ε_α 𝔗_M + (ε_α α + ε_β β − ε_nl) δ.
    pub fn sem(&self, f: &Form, g: &Metric, o: Orientation) -> Result<Tensor, ConstitutiveError> {
        let (a, b) = Self::invariants(f, g, o)?;
        let [e, ea, eb] = self.eval(a, b)?;
        Ok(crate::em::maxwell_sem(f, g).scale(ea).add(&Tensor::identity(4).scale(ea * a + eb * b - e)))
    }
}

/// ∂𝔢/∂u (1-form) and ∂𝔢/∂F (2-vector) of 𝔢(ρ, s, u, F, c, g) = ε(ρ, s, E(u,F), B(u,F), c, g).
#[derive(Clone, Debug)]
pub struct FaradayPartials {
    pub e: f64,
    pub d_rho: f64,
    pub d_s: f64,
    pub d_u: Vec<f64>,
    pub d_f: KVector,
    pub d_c: Option<Tensor>,
}

#[derive(Clone, Debug)]
pub struct FaradayEval {
    pub total: FaradayPartials,
    pub matter: FaradayPartials,
}

/// E = −(1/c)i_uF and B = −(1/c)i_u⋆F for an arbitrary (not necessarily
/// normalized) u.
pub fn eb_from_raw(u: &[f64], f: &Form, g: &Metric, o: Orientation, c: f64) -> (Form, Form) {
    (f.interior(u).expect("2-form").scale(-1.0 / c), f.hodge(g, o).interior(u).expect("(n−1)-form").scale(-1.0 / c))
}

/// 𝔢(ρ, s, u, F, c, g) with E, B computed from a raw u; the remaining state
/// (ρ, s, c, g) is taken from `st`.
pub fn faraday_energy(
    model: &Model,
    st: &MatterState,
    u: &[f64],
    f: &Form,
    o: Orientation,
) -> Result<f64, ConstitutiveError> {
    let (e, b) = eb_from_raw(u, f, &st.g, o, st.obs.c());
    let mut s = st.clone();
    s.e = e;
    s.b = b;
    Ok(model.evaluate(&s)?.total.eps)
}

/// Faraday-form adapter: the chain rule through E = −(1/c)i_uF and B = −(1/c)i_u⋆F,
/// which are linear in u and in F, evaluated on basis directions.
pub fn faraday_evaluate(
    model: &Model,
    st: &MatterState,
    f: &Form,
    o: Orientation,
) -> Result<FaradayEval, ConstitutiveError> {
    let ev = model.evaluate(st)?;
    let g = &st.g;
    let d = g.dim();
    let c = st.obs.c();
    let conv = |p: &Partials| -> FaradayPartials {
        let pair0 = |(de, db): (Form, Form)| p.de_dot_e(&de) + p.db_colon_b(&db);
        let d_u = (0..d)
            .map(|a| {
                let mut ea = vec![0.0; d];
                ea[a] = 1.0;
                pair0(eb_from_raw(&ea, f, g, o, c))
            })
            .collect();
        let d_f = KVector::from_fn(d, 2, |ab| {
            let dir = Form::from_fn(d, 2, |ij| if ij == ab { 1.0 } else { 0.0 });
            pair0(eb_from_raw(st.obs.u(), &dir, g, o, c))
        });
        FaradayPartials { e: p.eps, d_rho: p.d_rho, d_s: p.d_s, d_u, d_f, d_c: p.d_c.clone() }
    };
    Ok(FaradayEval { total: conv(&ev.total), matter: conv(&ev.matter) })
}
