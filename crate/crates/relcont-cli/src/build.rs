//! Turning a scenario into grid fields, once per refinement level.
//!
//! Expressions are parsed once; blobs are read once onto the base grid and
//! interpolated at finer levels. A given potential A becomes F = dA with the
//! grid's exterior derivative, so F is discretely closed and gauge changes
//! A → A + df leave it unchanged to round-off.

use crate::scenario::{schema, Blob, Components, GridSpec, MetricKind, MetricSpec, Scalar, Scenario, ScenarioError};
use relcont_core::calculus::{exterior_derivative, CalculusError, MetricField, TensorField};
use relcont_core::constitutive::{ConstitutiveError, Model};
use relcont_core::em::{normalize_velocity, EmError};
use relcont_core::grid::{Axis, Field, Grid, GridError};
use relcont_core::junction::{Interface, JunctionError, VacuumSide};
use relcont_core::parallel;
use relcont_core::sem::FieldState;
use relcont_core::tensor::index::combinations;
use relcont_core::tensor::{Form, Slot};
use relcont_expr::{EvalError, Expr, ParseError};
use std::path::PathBuf;
use std::sync::Arc;
use thiserror::Error;

/// Relative tolerance of the unit-normalization check on a given u.
pub const UNIT_TOL: f64 = 1e-10;
/// Relative tolerance of the closedness check on a directly given F.
pub const CLOSED_TOL: f64 = 1e-9;

/// Problems with the input: exit code 2.
#[derive(Debug, Error)]
pub enum InputError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{field}: {source}")]
    Parse { field: String, source: ParseError },
    #[error("{field}: uses x{var}, but the chart has {dim} coordinates")]
    Dimension { field: String, var: usize, dim: usize },
    #[error("{field}: depends on x{var}, a frozen (symmetry) axis")]
    Frozen { field: String, var: usize },
    #[error("{field} at x = {point:?}: {source}")]
    Eval { field: String, point: Vec<f64>, source: EvalError },
    #[error("{field}: {source}")]
    Grid { field: String, source: GridError },
    #[error("{field}: {source}")]
    Calculus { field: String, source: CalculusError },
    #[error("{field}: {reason}")]
    Blob { field: String, reason: String },
    #[error("fields.u is not timelike at x = {point:?} (g(u,u) = {norm2:e})")]
    NotTimelike { point: Vec<f64>, norm2: f64 },
    #[error(
        "fields.u is not unit at x = {point:?}: g(u,u) = {norm2:e}, expected −c² = {want:e} (give w to normalize)"
    )]
    NotUnit { point: Vec<f64>, norm2: f64, want: f64 },
    #[error("{field}: w is not timelike: {source}")]
    Velocity { field: String, source: EmError },
    #[error("{field}: F is not closed, (dF)_{component:?} = {value:e} at x = {point:?}")]
    NotClosed { field: String, component: Vec<usize>, point: Vec<f64>, value: f64 },
    #[error("model: {0}")]
    Model(#[from] ConstitutiveError),
    #[error("interface: {0}")]
    Interface(#[from] JunctionError),
}

/// A compiled scalar slot.
#[derive(Clone, Debug)]
enum Source {
    Const(f64),
    Expr(Expr),
    /// Component `comp` of a base-grid field.
    Blob(Arc<Field>, usize),
}

impl Source {
    fn at(&self, x: &[f64]) -> Result<f64, EvalError> {
        match self {
            Source::Const(v) => Ok(*v),
            Source::Expr(e) => e.eval(x),
            Source::Blob(f, c) => Ok(f.interpolate(x)[*c]),
        }
    }

    fn derivative(&self, var: usize) -> Option<Source> {
        match self {
            Source::Const(_) => Some(Source::Const(0.0)),
            Source::Expr(e) => Some(Source::Expr(e.derivative(var))),
            Source::Blob(..) => None,
        }
    }
}

fn compile_expr(field: &str, text: &str, grid: &Grid) -> Result<Expr, InputError> {
    let e = Expr::parse(text).map_err(|source| InputError::Parse { field: field.into(), source })?;
    let dim = grid.dim();
    if let Some(var) = e.max_var().filter(|&v| v >= dim) {
        return Err(InputError::Dimension { field: field.into(), var, dim });
    }
    if let Some(var) = (0..dim).find(|&v| grid.axes()[v].frozen && e.depends_on(v)) {
        return Err(InputError::Frozen { field: field.into(), var });
    }
    Ok(e)
}

struct Ctx<'a> {
    scenario: &'a Scenario,
    base: &'a Grid,
}

impl Ctx<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn blob(&self, field: &str, b: &Blob, ncomp: usize) -> Result<Arc<Field>, InputError> {
        let err = |reason: String| InputError::Blob { field: field.into(), reason };
        let mut want: Vec<usize> = self.base.axes().iter().map(|a| a.n).collect();
        if ncomp > 1 {
            want.push(ncomp);
        }
        if b.shape != want {
            return Err(err(format!("shape {:?} does not match the base grid, expected {want:?}", b.shape)));
        }
        let path: PathBuf = self.scenario.base_dir.join(&b.file);
        let bytes = std::fs::read(&path).map_err(|e| err(format!("{}: {e}", path.display())))?;
        let n: usize = want.iter().product();
        if bytes.len() != 8 * n {
            return Err(err(format!("{}: {} bytes, expected {} little-endian f64", path.display(), bytes.len(), n)));
        }
        let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        Ok(Arc::new(Field::from_data(self.base, ncomp, data)))
    }

    fn scalar(&self, field: &str, s: &Scalar) -> Result<Source, InputError> {
        Ok(match s {
            Scalar::Number(v) => Source::Const(*v),
            Scalar::Expr(t) => Source::Expr(compile_expr(field, t, self.base)?),
            Scalar::Blob(b) => Source::Blob(self.blob(field, b, 1)?, 0),
        })
    }

    fn components(&self, field: &str, c: &Components, n: usize) -> Result<Vec<Source>, InputError> {
        match c {
            Components::List(v) => {
                v.iter().enumerate().map(|(i, s)| self.scalar(&format!("{field}[{i}]"), s)).collect()
            }
            Components::Blob(b) => {
                let f = self.blob(field, b, n)?;
                Ok((0..n).map(|i| Source::Blob(f.clone(), i)).collect())
            }
        }
    }

    fn matrix(&self, field: &str, m: &[Vec<Scalar>]) -> Result<Vec<Source>, InputError> {
        let mut out = Vec::new();
        for (i, row) in m.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                out.push(self.scalar(&format!("{field}[{i}][{j}]"), s)?);
            }
        }
        Ok(out)
    }
}

/// Samples sources at every grid point, point-major.
fn sample(grid: &Grid, field: &str, sources: &[Source]) -> Result<Vec<f64>, InputError> {
    let rows = parallel::map_indices(grid.len(), |p| {
        let x = grid.point(p);
        sources.iter().map(|s| s.at(&x).map_err(|source| (x.clone(), source))).collect::<Result<Vec<f64>, _>>()
    });
    let mut data = Vec::with_capacity(grid.len() * sources.len());
    for r in rows {
        let r = r.map_err(|(point, source)| InputError::Eval { field: field.into(), point, source })?;
        data.extend(r);
    }
    Ok(data)
}

fn build_grid(field: &str, g: &GridSpec) -> Result<Grid, InputError> {
    let axes = g
        .axes
        .iter()
        .map(|a| if a.frozen { Axis::frozen(a.lo, a.hi, a.n) } else { Axis::new(a.lo, a.hi, a.n) })
        .collect();
    Grid::new(axes).map_err(|source| InputError::Grid { field: field.into(), source })
}

#[derive(Clone, Debug)]
enum MetricSource {
    Minkowski,
    /// f(r) = 1 − 2M/r + Q²/r² in (t, r, θ, ϕ).
    Spherical {
        mass: f64,
        charge: f64,
    },
    Components(Vec<Source>),
}

enum FaradaySource {
    Potential(Vec<Source>),
    Direct(Vec<Source>),
}

struct SideSources {
    field: &'static str,
    metric_name: &'static str,
    metric: MetricSource,
    faraday: FaradaySource,
}

/// A scenario compiled once: expressions parsed, blobs loaded, model built.
pub struct Compiled {
    pub scenario: Scenario,
    pub base: Grid,
    pub model: Model,
    pub interface: Option<(Interface, Vec<Vec<f64>>)>,
    interior: SideSources,
    velocity: (bool, Vec<Source>),
    rho: Source,
    s: Source,
    cauchy: Option<Vec<Source>>,
    exterior: Option<SideSources>,
    ext_base: Option<Grid>,
}

/// Grid data of one refinement level.
pub struct Problem {
    pub level: u32,
    pub state: FieldState,
    pub potential: Option<TensorField>,
    pub exterior: Option<VacuumSide>,
}

fn metric_source(ctx: &Ctx, field: &str, m: &MetricSpec) -> Result<MetricSource, InputError> {
    Ok(match m.kind {
        MetricKind::Minkowski => MetricSource::Minkowski,
        MetricKind::Schwarzschild => MetricSource::Spherical { mass: m.mass.unwrap_or(0.0), charge: 0.0 },
        MetricKind::ReissnerNordstrom => {
            MetricSource::Spherical { mass: m.mass.unwrap_or(0.0), charge: m.charge.unwrap_or(0.0) }
        }
        MetricKind::Components => {
            let c = m.components.as_ref().ok_or_else(|| schema(format!("{field}.components"), "required"))?;
            MetricSource::Components(ctx.matrix(&format!("{field}.components"), c)?)
        }
    })
}

fn faraday_source(
    ctx: &Ctx,
    field: &str,
    a: Option<&Components>,
    f: Option<&Components>,
) -> Result<FaradaySource, InputError> {
    let d = ctx.dim();
    match (a, f) {
        (Some(a), None) => Ok(FaradaySource::Potential(ctx.components(&format!("{field}.a"), a, d)?)),
        (None, Some(f)) => Ok(FaradaySource::Direct(ctx.components(&format!("{field}.f"), f, d * (d - 1) / 2)?)),
        _ => Err(schema(field, "give exactly one of 'a' and 'f'").into()),
    }
}

impl Compiled {
    pub fn new(scenario: &Scenario) -> Result<Compiled, InputError> {
        scenario.validate()?;
        let base = build_grid("grid", &scenario.grid)?;
        let ctx = Ctx { scenario, base: &base };
        let d = ctx.dim();
        let fs = &scenario.fields;
        let velocity = match (&fs.u, &fs.w) {
            (Some(u), None) => (true, ctx.components("fields.u", u, d)?),
            (None, Some(w)) => (false, ctx.components("fields.w", w, d)?),
            _ => return Err(schema("fields", "give exactly one of 'u' and 'w'").into()),
        };
        let interior = SideSources {
            field: "fields",
            metric_name: "metric",
            metric: metric_source(&ctx, "metric", &scenario.metric)?,
            faraday: faraday_source(&ctx, "fields", fs.a.as_ref(), fs.f.as_ref())?,
        };
        let cauchy = fs.cauchy.as_ref().map(|c| ctx.matrix("fields.cauchy", c)).transpose()?;
        let (exterior, ext_base) = match &scenario.exterior {
            Some(e) => {
                let eg = build_grid("exterior.grid", &e.grid)?;
                let ectx = Ctx { scenario, base: &eg };
                let side = SideSources {
                    field: "exterior",
                    metric_name: "exterior.metric",
                    metric: metric_source(&ectx, "exterior.metric", &e.metric)?,
                    faraday: faraday_source(&ectx, "exterior", e.a.as_ref(), e.f.as_ref())?,
                };
                (Some(side), Some(eg))
            }
            None => (None, None),
        };
        let interface = match &scenario.interface {
            Some(i) => {
                let iface = Interface::new(&i.level_set, d)?;
                let samples = iface.lattice_samples(&i.lo, &i.hi, &i.counts)?;
                Some((iface, samples))
            }
            None => None,
        };
        let compiled = Compiled {
            model: Model::new(&scenario.model, scenario.c)?,
            rho: ctx.scalar("fields.rho", &fs.rho)?,
            s: ctx.scalar("fields.s", &fs.s)?,
            scenario: scenario.clone(),
            base,
            interface,
            interior,
            velocity,
            cauchy,
            exterior,
            ext_base,
        };
        compiled.check_closed(&compiled.interior, &compiled.base)?;
        if let (Some(e), Some(g)) = (&compiled.exterior, &compiled.ext_base) {
            compiled.check_closed(e, g)?;
        }
        Ok(compiled)
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// A directly given F must be closed: symbolically (derivatives of the
    /// expressions evaluated on the base grid) or, for blobs, discretely.
    fn check_closed(&self, side: &SideSources, grid: &Grid) -> Result<(), InputError> {
        let FaradaySource::Direct(f) = &side.faraday else { return Ok(()) };
        let d = self.dim();
        let field = format!("{}.f", side.field);
        let pairs = combinations(d, 2);
        let index = |a: usize, b: usize| pairs.iter().position(|p| p[0] == a && p[1] == b).expect("increasing pair");
        let scale = 1.0 + sample(grid, &field, f)?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let derivs: Option<Vec<Vec<Source>>> = f.iter().map(|s| (0..d).map(|k| s.derivative(k)).collect()).collect();
        let Some(derivs) = derivs else {
            let ff = self.faraday_field(side, grid)?.0;
            let df =
                exterior_derivative(&ff).map_err(|source| InputError::Calculus { field: field.clone(), source })?;
            let worst = df.field().max_abs();
            if worst > CLOSED_TOL * scale {
                let p = (0..grid.len()).max_by(|&i, &j| max_abs(df.at(i)).total_cmp(&max_abs(df.at(j)))).unwrap_or(0);
                return Err(InputError::NotClosed { field, component: vec![], point: grid.point(p), value: worst });
            }
            return Ok(());
        };
        for t in combinations(d, 3) {
            let (a, b, c) = (t[0], t[1], t[2]);
            // (dF)_abc = ∂_a F_bc − ∂_b F_ac + ∂_c F_ab
            let terms =
                [(&derivs[index(b, c)][a], 1.0), (&derivs[index(a, c)][b], -1.0), (&derivs[index(a, b)][c], 1.0)];
            for p in 0..grid.len() {
                let x = grid.point(p);
                let mut v = 0.0;
                for (s, sign) in terms {
                    v += sign
                        * s.at(&x).map_err(|source| InputError::Eval {
                            field: field.clone(),
                            point: x.clone(),
                            source,
                        })?;
                }
                if v.abs() > CLOSED_TOL * scale {
                    return Err(InputError::NotClosed { field, component: t.clone(), point: x, value: v });
                }
            }
        }
        Ok(())
    }

    fn metric_field(&self, side: &SideSources, grid: &Grid) -> Result<MetricField, InputError> {
        let c = self.scenario.c;
        let field = side.metric_name.to_string();
        let d = grid.dim();
        let comps = match &side.metric {
            MetricSource::Minkowski => return Ok(MetricField::minkowski(grid, c)),
            MetricSource::Spherical { mass, charge } => {
                let (m, q) = (*mass, *charge);
                Field::from_fn(grid, d * d, move |x, o| {
                    let (r, th) = (x[1], x[2]);
                    let f = 1.0 - 2.0 * m / r + q * q / (r * r);
                    o.fill(0.0);
                    o[0] = -c * c * f;
                    o[5] = 1.0 / f;
                    o[10] = r * r;
                    o[15] = (r * th.sin()).powi(2);
                })
            }
            MetricSource::Components(s) => {
                let data = sample(grid, &field, s)?;
                for p in 0..grid.len() {
                    let g = &data[p * d * d..(p + 1) * d * d];
                    for a in 0..d {
                        for b in 0..a {
                            if (g[a * d + b] - g[b * d + a]).abs() > 1e-12 * (1.0 + g[a * d + b].abs()) {
                                return Err(schema(
                                    format!("{field}.components"),
                                    format!("not symmetric in ({b}, {a}) at x = {:?}", grid.point(p)),
                                )
                                .into());
                            }
                        }
                    }
                }
                Field::from_data(grid, d * d, data)
            }
        };
        MetricField::from_components(TensorField::new(&[Slot::Down, Slot::Down], comps))
            .map_err(|source| InputError::Calculus { field, source })
    }

    /// F and, when given, the potential A.
    fn faraday_field(&self, side: &SideSources, grid: &Grid) -> Result<(TensorField, Option<TensorField>), InputError> {
        let d = grid.dim();
        match &side.faraday {
            FaradaySource::Potential(a) => {
                let field = format!("{}.a", side.field);
                let pot = TensorField::new(&[Slot::Down], Field::from_data(grid, d, sample(grid, &field, a)?));
                let f = exterior_derivative(&pot).map_err(|source| InputError::Calculus { field, source })?;
                Ok((f, Some(pot)))
            }
            FaradaySource::Direct(f) => {
                let inc = sample(grid, &format!("{}.f", side.field), f)?;
                let k = d * (d - 1) / 2;
                Ok((TensorField::from_forms(grid, 2, |p| Form::from_increasing(d, 2, &inc[p * k..(p + 1) * k])), None))
            }
        }
    }

    fn velocity_field(&self, grid: &Grid, metric: &MetricField) -> Result<TensorField, InputError> {
        let (unit, src) = &self.velocity;
        let c = self.scenario.c;
        let name = if *unit { "fields.u" } else { "fields.w" };
        let v = TensorField::new(&[Slot::Up], Field::from_data(grid, grid.dim(), sample(grid, name, src)?));
        if !unit {
            return normalize_velocity(&v, metric, c)
                .map_err(|source| InputError::Velocity { field: name.into(), source });
        }
        for p in 0..grid.len() {
            let n2 = metric.metric(p).dot(v.at(p), v.at(p));
            if !(n2 < 0.0) {
                return Err(InputError::NotTimelike { point: grid.point(p), norm2: n2 });
            }
            if (n2 + c * c).abs() > UNIT_TOL * c * c {
                return Err(InputError::NotUnit { point: grid.point(p), norm2: n2, want: -c * c });
            }
        }
        Ok(v)
    }

    pub fn exterior_base(&self) -> Option<&Grid> {
        self.ext_base.as_ref()
    }

    pub fn grid(&self, level: u32) -> Grid {
        self.base.refined(level)
    }

    /// Fields on the grid refined `level` times.
    pub fn problem(&self, level: u32) -> Result<Problem, InputError> {
        let grid = self.grid(level);
        let metric = self.metric_field(&self.interior, &grid)?;
        let (f, potential) = self.faraday_field(&self.interior, &grid)?;
        let u = self.velocity_field(&grid, &metric)?;
        let scalar = |name: &str, s: &Source| -> Result<Field, InputError> {
            Ok(Field::from_data(&grid, 1, sample(&grid, name, std::slice::from_ref(s))?))
        };
        let cauchy = match &self.cauchy {
            Some(c) => {
                let d = grid.dim();
                Some(TensorField::new(
                    &[Slot::Down, Slot::Down],
                    Field::from_data(&grid, d * d, sample(&grid, "fields.cauchy", c)?),
                ))
            }
            None => None,
        };
        let state = FieldState {
            rho: scalar("fields.rho", &self.rho)?,
            s: scalar("fields.s", &self.s)?,
            metric,
            u,
            f,
            cauchy,
            q: self.scenario.q,
            c: self.scenario.c,
        };
        let exterior = match (&self.exterior, &self.ext_base) {
            (Some(e), Some(base)) => {
                let g = base.refined(level);
                let metric = self.metric_field(e, &g)?;
                let (f, potential) = self.faraday_field(e, &g)?;
                Some(VacuumSide { metric, f, potential })
            }
            _ => None,
        };
        Ok(Problem { level, state, potential, exterior })
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
