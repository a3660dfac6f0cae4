//! Interface geometry and junction residuals between an interior continuum
//! and an exterior electrovacuum, plus Einstein-equation residuals.
//!
//! The interface is the zero set of a level-set expression φ; the interior
//! side is φ < 0. Both sides carry their own grid; values at interface samples
//! come from quadratic interpolation/extrapolation on each grid separately.
//! Jumps [X] = X⁺ − X⁻ use one normal orientation (pointing into φ > 0) on
//! both sides, and tangential components are taken in a frame that depends
//! only on ker dφ, so every reported norm is frame- and scale-invariant.

use crate::calculus::{curvature, CalculusError, MetricField, TensorField};
use crate::constitutive::{MatterState, Model, ModelSpec};
use crate::em::{eb_decompose, maxwell_sem, EmError, Observer};
use crate::grid::{Grid, Norms};
use crate::parallel;
use crate::sem::{continuum_stress, FieldState, SemError};
use crate::tensor::{Form, Metric, Orientation, Slot, Tensor, TensorError};
use nalgebra::DMatrix;
use relcont_expr::{BinOp, EvalError, Expr, Node, ParseError};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum JunctionError {
    #[error("level set: {0}")]
    Parse(#[from] ParseError),
    #[error("level set: {0}")]
    Eval(#[from] EvalError),
    #[error("level set uses x{var} but the chart has {dim} coordinates")]
    Dimension { var: usize, dim: usize },
    #[error("interface is null at {point:?} (g⁻¹(dφ,dφ) = {norm2:e})")]
    NullInterface { point: Vec<f64>, norm2: f64 },
    #[error("induced metric is degenerate at {point:?}")]
    Degenerate { point: Vec<f64> },
    #[error("∇φ vanishes at {point:?}")]
    ZeroGradient { point: Vec<f64> },
    #[error("projection onto φ = 0 did not converge from {point:?}")]
    NoConvergence { point: Vec<f64> },
    #[error("no interface samples in the requested box")]
    NoSamples,
    #[error("sample {point:?} lies more than one cell outside the {side} grid")]
    Outside { point: Vec<f64>, side: &'static str },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error(transparent)]
    Em(#[from] EmError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

impl From<crate::constitutive::ConstitutiveError> for JunctionError {
    fn from(e: crate::constitutive::ConstitutiveError) -> Self {
        JunctionError::Sem(e.into())
    }
}

/// Which side a normal is outward for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// φ < 0; outward normal along +∇φ.
    Interior,
    /// φ > 0; outward normal along −∇φ.
    Exterior,
}

/// Level set φ(x) = 0 with symbolic gradient and Hessian.
#[derive(Clone, Debug)]
pub struct Interface {
    dim: usize,
    phi: Expr,
    grad: Vec<Expr>,
    hess: Vec<Expr>,
}

/// Newton iterations stop once the distance estimate |φ|/|∇φ| is below this.
const PROJECTION_TOL: f64 = 1e-13;

impl Interface {
    pub fn new(text: &str, dim: usize) -> Result<Interface, JunctionError> {
        Interface::from_expr(Expr::parse(text)?, dim)
    }

    pub fn from_expr(phi: Expr, dim: usize) -> Result<Interface, JunctionError> {
        if let Some(var) = phi.max_var().filter(|v| *v >= dim) {
            return Err(JunctionError::Dimension { var, dim });
        }
        let grad: Vec<Expr> = (0..dim).map(|a| phi.derivative(a)).collect();
        let hess = (0..dim * dim).map(|ab| grad[ab / dim].derivative(ab % dim)).collect();
        Ok(Interface { dim, phi, grad, hess })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expr(&self) -> &Expr {
        &self.phi
    }

    /// The same interface described by λφ (λ > 0 keeps the sides, λ < 0 swaps them).
    pub fn scaled(&self, lambda: f64) -> Interface {
        let l = Expr::constant(lambda);
        let mul =
            |e: &Expr| Expr { node: Node::Bin(BinOp::Mul, Box::new(l.clone()), Box::new(e.clone())), span: e.span };
        Interface {
            dim: self.dim,
            phi: mul(&self.phi),
            grad: self.grad.iter().map(mul).collect(),
            hess: self.hess.iter().map(mul).collect(),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64, JunctionError> {
        Ok(self.phi.eval(x)?)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, JunctionError> {
        self.grad.iter().map(|e| e.eval(x).map_err(Into::into)).collect()
    }

    /// Row-major coordinate Hessian ∂_a∂_bφ.
    pub fn hessian(&self, x: &[f64]) -> Result<Vec<f64>, JunctionError> {
        self.hess.iter().map(|e| e.eval(x).map_err(Into::into)).collect()
    }

    /// Newton projection along the coordinate gradient onto φ = 0.
    pub fn project(&self, x0: &[f64]) -> Result<Vec<f64>, JunctionError> {
        let mut x = x0.to_vec();
        for _ in 0..60 {
            let v = self.value(&x)?;
            let gr = self.gradient(&x)?;
            let n2: f64 = gr.iter().map(|g| g * g).sum();
            if !(n2 > 0.0) || !n2.is_finite() {
                return Err(JunctionError::ZeroGradient { point: x });
            }
            if v.abs() <= PROJECTION_TOL * n2.sqrt() {
                return Ok(x);
            }
            for (xa, ga) in x.iter_mut().zip(&gr) {
                *xa -= v * ga / n2;
            }
        }
        Err(JunctionError::NoConvergence { point: x0.to_vec() })
    }

    /// Project a regular lattice of `counts` points per axis in [lo, hi]
    /// (one point means the midpoint) and keep the projections that stay in
    /// the box. Lattice points from which the projection fails are skipped.
    pub fn lattice_samples(&self, lo: &[f64], hi: &[f64], counts: &[usize]) -> Result<Vec<Vec<f64>>, JunctionError> {
        let d = self.dim;
        if lo.len() != d || hi.len() != d || counts.len() != d || counts.contains(&0) {
            return Err(JunctionError::Shape("sample box must give lo, hi and a positive count per axis".into()));
        }
        let total: usize = counts.iter().product();
        let mut out = Vec::new();
        let mut idx = vec![0usize; d];
        for lin in 0..total {
            let mut r = lin;
            for a in (0..d).rev() {
                idx[a] = r % counts[a];
                r /= counts[a];
            }
            let x: Vec<f64> = (0..d)
                .map(|a| {
                    if counts[a] == 1 {
                        0.5 * (lo[a] + hi[a])
                    } else {
                        lo[a] + (hi[a] - lo[a]) * idx[a] as f64 / (counts[a] - 1) as f64
                    }
                })
                .collect();
            let Ok(p) = self.project(&x) else { continue };
            let inside = (0..d).all(|a| p[a] >= lo[a] - 1e-12 && p[a] <= hi[a] + 1e-12);
            if inside {
                out.push(p);
            }
        }
        if out.is_empty() {
            return Err(JunctionError::NoSamples);
        }
        Ok(out)
    }
}

/// Orthonormal (coordinate-Euclidean) basis of ker dφ by Gram-Schmidt of the
/// coordinate vectors; it depends only on the line spanned by dφ.
pub fn tangent_frame(dphi: &[f64]) -> Vec<Vec<f64>> {
    let d = dphi.len();
    let norm = dphi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let m: Vec<f64> = dphi.iter().map(|x| x / norm).collect();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for k in 0..d {
        if frame.len() + 1 == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for b in std::iter::once(&m).chain(frame.iter()) {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-6 {
            frame.push(v.iter().map(|x| x / len).collect());
        }
    }
    frame
}

/// Unit normal, induced metric and extrinsic curvature at one interface point.
#[derive(Clone, Debug)]
pub struct Geometry {
    /// n♭ = ±dφ/|dφ|_g
    pub n_form: Vec<f64>,
    pub n: Vec<f64>,
    /// g(n, n) = ε: +1 for a timelike interface, −1 for a spacelike one.
    pub eps: f64,
    /// Tangent frame t_i (shared by both sides).
    pub frame: Vec<Vec<f64>>,
    /// h_ij = g(t_i, t_j), row-major.
    pub h: Vec<f64>,
    /// K_ij = g(t_i, ∇_{t_j} n), row-major.
    pub k: Vec<f64>,
    /// k = h^{ij} K_ij
    pub trace: f64,
}

/// Geometry from the metric and its Christoffel symbols Γ^λ_{μν} (layout
/// [λ][μ][ν]) at x. With n♭ = dφ/N, K(t_i, t_j) = t_i^a t_j^b (∂_a∂_bφ −
/// Γ^λ_{ab}∂_λφ)/N since the ∂N term is normal.
pub fn interface_geometry(
    iface: &Interface,
    x: &[f64],
    g: &Metric,
    gamma: &[f64],
    side: Side,
) -> Result<Geometry, JunctionError> {
    let d = iface.dim;
    let dphi = iface.gradient(x)?;
    let e2: f64 = dphi.iter().map(|v| v * v).sum();
    if !(e2 > 0.0) {
        return Err(JunctionError::ZeroGradient { point: x.to_vec() });
    }
    let norm2 = g.dot_co(&dphi, &dphi);
    if norm2.abs() <= 1e-10 * e2 * max_abs(g.inverse_components()) {
        return Err(JunctionError::NullInterface { point: x.to_vec(), norm2 });
    }
    let big_n = norm2.abs().sqrt();
    let s = match side {
        Side::Interior => 1.0,
        Side::Exterior => -1.0,
    };
    let n_form: Vec<f64> = dphi.iter().map(|v| s * v / big_n).collect();
    let n = g.raise(&n_form);
    let hphi = iface.hessian(x)?;
    let nabla =
        |a: usize, b: usize| hphi[a * d + b] - (0..d).map(|l| gamma[(l * d + a) * d + b] * dphi[l]).sum::<f64>();
    let frame = tangent_frame(&dphi);
    let m = frame.len();
    let mut h = vec![0.0; m * m];
    let mut k = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            h[i * m + j] = g.dot(&frame[i], &frame[j]);
            let mut acc = 0.0;
            for a in 0..d {
                for b in 0..d {
                    acc += frame[i][a] * frame[j][b] * nabla(a, b);
                }
            }
            k[i * m + j] = s * acc / big_n;
        }
    }
    let hm = DMatrix::from_row_slice(m, m, &h);
    let scale = max_abs(&h).max(f64::MIN_POSITIVE);
    if hm.determinant().abs() <= 1e-12 * scale.powi(m as i32) {
        return Err(JunctionError::Degenerate { point: x.to_vec() });
    }
    let hinv = hm.try_inverse().ok_or_else(|| JunctionError::Degenerate { point: x.to_vec() })?;
    let trace = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| hinv[(i, j)] * k[i * m + j]).sum();
    Ok(Geometry { n_form, n, eps: norm2.signum(), frame, h, k, trace })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// The exterior (electrovacuum) side.
#[derive(Clone, Debug)]
pub struct VacuumSide {
    pub metric: MetricField,
    pub f: TensorField,
    pub potential: Option<TensorField>,
}

#[derive(Clone, Debug)]
pub struct TwoSidedSolution {
    pub interior: FieldState,
    pub interior_potential: Option<TensorField>,
    pub model: Model,
    pub exterior: VacuumSide,
    /// Einstein coupling in Ein = χ𝔱.
    pub chi: f64,
}

/// The seven electromagnetic and mechanical jump quantities at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct EmJumps {
    /// g(u, n), interior
    pub u_normal: f64,
    /// [𝔱(·, n) − p n♭], lowered components
    pub traction: Vec<f64>,
    /// [i_n i_u ⋆E]
    pub e_tangential: Vec<f64>,
    /// [i_n B] (empty when B is a 0-form)
    pub b_normal: Vec<f64>,
    /// [i_n D]
    pub d_normal: f64,
    /// [i_n i_u ⋆H]
    pub h_tangential: Vec<f64>,
    /// [i_n S] with S = cS_ε; implied by the E and H conditions
    pub poynting_normal: f64,
}

struct SideEm {
    traction: Vec<f64>,
    e_t: Vec<f64>,
    b_n: Vec<f64>,
    d_n: f64,
    h_t: Vec<f64>,
    s_n: f64,
}

/// Jump quantities of one side; `n_form` is its unit normal covector.
fn side_em(model: &Model, st: &MatterState, n_form: &[f64], o: Orientation) -> Result<SideEm, JunctionError> {
    let (g, obs) = (&st.g, &st.obs);
    let d = g.dim();
    let ev = model.evaluate(st)?;
    let fields = ev.derived_fields(g);
    let n = g.raise(n_form);
    let t = continuum_stress(&ev.total, st).lower_index(0, g)?;
    let p = ev.total.pressure(st);
    let traction = (0..d).map(|m| (0..d).map(|k| t.get(&[m, k]) * n[k]).sum::<f64>() - p * n_form[m]).collect();
    let tangential = |x: &Form| -> Result<Vec<f64>, JunctionError> {
        Ok(x.hodge(g, o).interior(obs.u())?.interior(&n)?.increasing())
    };
    let b_n = if st.b.deg() == 0 { vec![] } else { st.b.interior(&n)?.increasing() };
    let pair = |a: &[f64]| a.iter().zip(&n).map(|(x, y)| x * y).sum::<f64>();
    Ok(SideEm {
        traction,
        e_t: tangential(&st.e)?,
        b_n,
        d_n: pair(fields.d.data()),
        h_t: tangential(&fields.h)?,
        s_n: obs.c() * pair(ev.total.poynting(st, o).data()),
    })
}

/// Jumps between an interior matter state and exterior vacuum fields (g⁺, F⁺)
/// at one point with level-set gradient `dphi`. The exterior observer is the
/// interior world-velocity renormalized with g⁺; the exterior is treated as
/// the Maxwell-only medium, so D⁺ = E⁺ and H⁺ = B⁺.
pub fn em_jumps_at(
    model: &Model,
    inner: &MatterState,
    g_out: &Metric,
    f_out: &Form,
    dphi: &[f64],
    o: Orientation,
) -> Result<EmJumps, JunctionError> {
    let unit = |g: &Metric| -> Result<Vec<f64>, JunctionError> {
        let n2 = g.dot_co(dphi, dphi);
        if !(n2.abs() > 0.0) {
            return Err(JunctionError::NullInterface { point: vec![], norm2: n2 });
        }
        Ok(dphi.iter().map(|v| v / n2.abs().sqrt()).collect())
    };
    let c = inner.obs.c();
    let n_in = unit(&inner.g)?;
    let minus = side_em(model, inner, &n_in, o)?;
    let obs = Observer::normalize(g_out, inner.obs.u(), c)?;
    let split = eb_decompose(f_out, &obs, g_out, o);
    let outer = MatterState { rho: 1.0, s: 0.0, e: split.e, b: split.b, cauchy: None, obs, g: g_out.clone() };
    let vacuum = Model::new(&ModelSpec::euler_maxwell("0"), c)?;
    let plus = side_em(&vacuum, &outer, &unit(g_out)?, o)?;
    Ok(EmJumps {
        u_normal: inner.g.dot(inner.obs.u(), &inner.g.raise(&n_in)),
        traction: diff(&plus.traction, &minus.traction),
        e_tangential: diff(&plus.e_t, &minus.e_t),
        b_normal: diff(&plus.b_n, &minus.b_n),
        d_normal: plus.d_n - minus.d_n,
        h_tangential: diff(&plus.h_t, &minus.h_t),
        poynting_normal: plus.s_n - minus.s_n,
    })
}

/// Names of all junction conditions, in report order.
pub const JUMP_CONDITIONS: [&str; 11] = [
    "metric_tangential",
    "potential_tangential",
    "extrinsic_curvature",
    "obrien_synge",
    "u_normal",
    "traction",
    "e_tangential",
    "b_normal",
    "d_normal",
    "h_tangential",
    "poynting_normal",
];

/// Per-sample magnitudes of one condition and their aggregate norms.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpCheck {
    pub name: &'static str,
    pub values: Vec<f64>,
    pub norms: Norms,
    /// Why the condition could not be evaluated, if so.
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpReport {
    pub samples: Vec<Vec<f64>>,
    pub checks: Vec<JumpCheck>,
}

impl JumpReport {
    pub fn get(&self, name: &str) -> Option<&JumpCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn linf(&self, name: &str) -> f64 {
        self.get(name).map_or(f64::NAN, |c| c.norms.linf)
    }
}

struct SamplePoint {
    metric: f64,
    potential: Option<f64>,
    curvature: f64,
    obrien_synge: f64,
    em: EmJumps,
}

fn check_inside(grid: &Grid, x: &[f64], side: &'static str) -> Result<(), JunctionError> {
    for (a, ax) in grid.axes().iter().enumerate() {
        let slack = if ax.frozen { f64::INFINITY } else { ax.h() * (1.0 + 1e-9) };
        if x[a] < ax.lo - slack || x[a] > ax.hi + slack {
            return Err(JunctionError::Outside { point: x.to_vec(), side });
        }
    }
    Ok(())
}

fn metric_at(m: &MetricField, x: &[f64]) -> Result<(Metric, Vec<f64>), JunctionError> {
    let d = m.dim();
    let g = Metric::new(d, &m.components().field().interpolate(x))?;
    Ok((g, m.christoffel_field().interpolate(x)))
}

fn form_at(f: &TensorField, x: &[f64], deg: usize) -> Form {
    Form::antisymmetrize(f.dim(), deg, &f.field().interpolate(x))
}

/// Junction data evaluated at interface samples; one method per group of
/// conditions, `report` for all of them.
pub struct Junction {
    samples: Vec<Vec<f64>>,
    points: Vec<SamplePoint>,
    has_potential: bool,
}

impl Junction {
    pub fn new(
        sol: &TwoSidedSolution,
        iface: &Interface,
        samples: Vec<Vec<f64>>,
        o: Orientation,
    ) -> Result<Junction, JunctionError> {
        let fs = &sol.interior;
        let ext = &sol.exterior;
        let d = iface.dim();
        if fs.metric.dim() != d || ext.metric.dim() != d {
            return Err(JunctionError::Shape("interface and grids must share the chart dimension".into()));
        }
        if ext.f.slots() != [Slot::Down, Slot::Down] || fs.u.slots() != [Slot::Up] {
            return Err(JunctionError::Shape("exterior F must be a 2-form and u a vector".into()));
        }
        if samples.is_empty() {
            return Err(JunctionError::NoSamples);
        }
        for x in &samples {
            check_inside(fs.grid(), x, "interior")?;
            check_inside(ext.metric.grid(), x, "exterior")?;
        }
        let ein_in = curvature(&fs.metric).einstein;
        let ein_out = curvature(&ext.metric).einstein;
        let pot_in = sol.interior_potential.as_ref();
        let pot_out = ext.potential.as_ref();
        let has_potential = pot_in.is_some() && pot_out.is_some();
        let results = parallel::map_indices(samples.len(), |i| -> Result<SamplePoint, JunctionError> {
            let x = &samples[i];
            let (g_in, gam_in) = metric_at(&fs.metric, x)?;
            let (g_out, gam_out) = metric_at(&ext.metric, x)?;
            let geo_in = interface_geometry(iface, x, &g_in, &gam_in, Side::Interior)?;
            let geo_out = interface_geometry(iface, x, &g_out, &gam_out, Side::Interior)?;
            let frob = |a: &[f64], b: &[f64]| euclid(&diff(a, b));
            let frame = &geo_in.frame;
            let potential = match (pot_in, pot_out) {
                (Some(a_in), Some(a_out)) => {
                    let (ai, ao) = (a_in.field().interpolate(x), a_out.field().interpolate(x));
                    let pull = |a: &[f64]| {
                        frame.iter().map(|t| t.iter().zip(a).map(|(u, v)| u * v).sum()).collect::<Vec<f64>>()
                    };
                    Some(frob(&pull(&ao), &pull(&ai)))
                }
                _ => None,
            };
            let ein_n = |ein: &TensorField, geo: &Geometry| -> Vec<f64> {
                // second differences are only first-order accurate at the two
                // outermost nodes; extrapolate from further inside instead
                let e = ein.field().interpolate_inset(x, 2);
                frame.iter().map(|t| (0..d * d).map(|ab| e[ab] * t[ab / d] * geo.n[ab % d]).sum()).collect()
            };
            // interior matter state at the sample
            let obs = Observer::normalize(&g_in, &fs.u.field().interpolate(x), fs.c)?;
            let f_in = form_at(&fs.f, x, 2);
            let split = eb_decompose(&f_in, &obs, &g_in, o);
            let cauchy = match &fs.cauchy {
                Some(c) => Some(Tensor::from_data(d, &[Slot::Down, Slot::Down], c.field().interpolate(x))?),
                None => None,
            };
            let inner = MatterState {
                rho: fs.rho.interpolate(x)[0],
                s: fs.s.interpolate(x)[0],
                e: split.e,
                b: split.b,
                cauchy,
                obs,
                g: g_in.clone(),
            };
            let dphi = iface.gradient(x)?;
            let em = em_jumps_at(&sol.model, &inner, &g_out, &form_at(&ext.f, x, 2), &dphi, o)?;
            Ok(SamplePoint {
                metric: frob(&geo_out.h, &geo_in.h),
                potential,
                curvature: frob(&geo_out.k, &geo_in.k),
                obrien_synge: frob(&ein_n(&ein_out, &geo_out), &ein_n(&ein_in, &geo_in)),
                em,
            })
        });
        let points = results.into_iter().collect::<Result<Vec<_>, _>>()?;
        Ok(Junction { samples, points, has_potential })
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    fn check(&self, name: &'static str, f: impl Fn(&SamplePoint) -> f64) -> JumpCheck {
        let values: Vec<f64> = self.points.iter().map(f).collect();
        JumpCheck { name, norms: Norms::of_values(&values, &self.samples), values, note: None }
    }

    /// Tangential [g] (induced metrics) and [A] (pulled-back potentials).
    pub fn preliminary(&self) -> [JumpCheck; 2] {
        let metric = self.check("metric_tangential", |p| p.metric);
        let potential = if self.has_potential {
            self.check("potential_tangential", |p| p.potential.unwrap_or(f64::NAN))
        } else {
            JumpCheck {
                name: "potential_tangential",
                values: vec![],
                norms: Norms::zero(),
                note: Some("no potential given on both sides".into()),
            }
        };
        [metric, potential]
    }

    /// [K] in the shared tangent frame.
    pub fn israel_darmois(&self) -> JumpCheck {
        self.check("extrinsic_curvature", |p| p.curvature)
    }

    /// Tangential part of [Ein(·, n)]; implied by the Israel-Darmois conditions.
    pub fn obrien_synge(&self) -> JumpCheck {
        self.check("obrien_synge", |p| p.obrien_synge)
    }

    /// The six electromagnetic/mechanical conditions and the implied i_n[S].
    pub fn em(&self) -> Vec<JumpCheck> {
        vec![
            self.check("u_normal", |p| p.em.u_normal.abs()),
            self.check("traction", |p| euclid(&p.em.traction)),
            self.check("e_tangential", |p| euclid(&p.em.e_tangential)),
            self.check("b_normal", |p| euclid(&p.em.b_normal)),
            self.check("d_normal", |p| p.em.d_normal.abs()),
            self.check("h_tangential", |p| euclid(&p.em.h_tangential)),
            self.check("poynting_normal", |p| p.em.poynting_normal.abs()),
        ]
    }

    pub fn report(&self) -> JumpReport {
        let [m, a] = self.preliminary();
        let mut checks = vec![m, a, self.israel_darmois(), self.obrien_synge()];
        checks.extend(self.em());
        JumpReport { samples: self.samples.clone(), checks }
    }
}

/// 𝔱_M = F♯ ⊗tr F − ½|F|²δ on a grid.
pub fn maxwell_sem_field(m: &MetricField, f: &TensorField) -> TensorField {
    TensorField::from_tensors(m.grid(), &[Slot::Up, Slot::Down], |p| maxwell_sem(&f.form_at(p), m.metric(p)))
}

/// Ein_{μν} − χ 𝔱_{μν} (𝔱 lowered on its first slot); Ein μ(g) = χ𝔗 with
/// 𝔗 = 𝔱 μ(g), so the density factor cancels.
pub fn einstein_residual(m: &MetricField, sem: &TensorField, chi: f64) -> Result<TensorField, JunctionError> {
    if sem.slots() != [Slot::Up, Slot::Down] || sem.grid() != m.grid() {
        return Err(JunctionError::Shape("SEM must be a (1,1) field on the metric's grid".into()));
    }
    let ein = curvature(m).einstein;
    Ok(TensorField::from_points(m.grid(), &[Slot::Down, Slot::Down], |p, out| {
        let t = sem.tensor_at(p).lower_index(0, m.metric(p)).expect("(1,1)");
        for (o, (e, t)) in out.iter_mut().zip(ein.at(p).iter().zip(t.data())) {
            *o = e - chi * t;
        }
    }))
}

#[cfg(test)]
mod tests;
