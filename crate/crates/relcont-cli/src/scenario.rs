//! Scenario files: a TOML description of the chart, grids, metric, fields,
//! constitutive model, optional exterior/interface, and the checks to run.
//!
//! Expressions are written in the coordinate DSL (`x0` … `x9`, where `x0` is
//! time). Any scalar slot also accepts a plain number or a binary blob
//! `{ file = "rho.bin", shape = [..] }` of little-endian f64 in row-major
//! grid order, with a trailing component axis for multi-component blobs.

use relcont_core::constitutive::ModelSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error("serializing scenario: {0}")]
    Write(#[from] toml::ser::Error),
    #[error("{field}: {reason}")]
    Schema { field: String, reason: String },
}

pub fn schema(field: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema { field: field.into(), reason: reason.into() }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Spatial dimension n; the chart has n + 1 coordinates.
    pub dimension: usize,
    pub c: f64,
    /// Einstein coupling in Ein = χ𝔗.
    #[serde(default = "one")]
    pub chi: f64,
    /// Charge per unit rest mass.
    #[serde(default)]
    pub q: f64,
    /// Seed of the random inputs used by the identity suites.
    #[serde(default)]
    pub seed: u64,
    /// Default refinement depth (levels 0..=refine); `--refine` overrides it.
    #[serde(default = "two")]
    pub refine: u32,
    /// Base-grid cells excluded from grid norms at each refinable boundary
    /// (`--include-boundary` uses every point).
    #[serde(default = "default_margin")]
    pub margin: usize,
    /// Suites run by the `all` command.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<String>,
    /// Individual checks left out of every run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skip: Vec<String>,
    /// Per-check (or per-class) tolerance overrides.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    pub grid: GridSpec,
    pub metric: MetricSpec,
    pub fields: FieldsSpec,
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exterior: Option<ExteriorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interface: Option<InterfaceSpec>,
    /// Directory that blob paths are relative to; set by [`Scenario::load`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn one() -> f64 {
    1.0
}

fn two() -> u32 {
    2
}

fn default_margin() -> usize {
    2
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub axes: Vec<AxisSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    /// Symmetry direction: fields are constant along it and it is never refined.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub frozen: bool,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Minkowski,
    /// Coordinates (t, r, θ, ϕ) = (x0, x1, x2, x3).
    Schwarzschild,
    /// Coordinates as for Schwarzschild.
    ReissnerNordstrom,
    Components,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub kind: MetricKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge: Option<f64>,
    /// Full (symmetric) component matrix g_ab, for `kind = "components"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Vec<Scalar>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expr(String),
    Blob(Blob),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Blob {
    pub file: PathBuf,
    pub shape: Vec<usize>,
}

/// Components of a multi-component field: one scalar per component, or one
/// blob with a trailing component axis.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Components {
    List(Vec<Scalar>),
    Blob(Blob),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldsSpec {
    /// Unit world-velocity (g(u,u) = −c²); exactly one of `u`, `w`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Components>,
    /// Any future timelike vector, normalized to u.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Components>,
    pub rho: Scalar,
    #[serde(default = "zero_scalar")]
    pub s: Scalar,
    /// Potential 1-form; exactly one of `a`, `f`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Components>,
    /// Faraday 2-form by increasing components F_01, F_02, …, F_12, …
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Components>,
    /// Cauchy deformation tensor, a full symmetric matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cauchy: Option<Vec<Vec<Scalar>>>,
}

fn zero_scalar() -> Scalar {
    Scalar::Number(0.0)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExteriorSpec {
    pub grid: GridSpec,
    pub metric: MetricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Components>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Components>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSpec {
    /// φ; the interior is φ < 0.
    pub level_set: String,
    /// Sampling box and lattice counts per coordinate; lattice points are
    /// projected onto φ = 0.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.into(), source })?;
        let mut s: Scenario =
            toml::from_str(&text).map_err(|source| ScenarioError::Toml { path: path.into(), source })?;
        s.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        s.validate()?;
        Ok(s)
    }

    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let s: Scenario =
            toml::from_str(text).map_err(|source| ScenarioError::Toml { path: "<string>".into(), source })?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        Ok(toml::to_string(self)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_toml()?).map_err(|source| ScenarioError::Io { path: path.into(), source })
    }

    /// Chart dimension n + 1.
    pub fn chart_dim(&self) -> usize {
        self.dimension + 1
    }

    /// Structural checks that need no evaluation.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let d = self.chart_dim();
        if !(2..=relcont_core::tensor::index::MAX_DIM).contains(&d) {
            return Err(schema(
                "dimension",
                format!("chart dimension {d} outside 2..={}", relcont_core::tensor::index::MAX_DIM),
            ));
        }
        if !(self.c > 0.0) {
            return Err(schema("c", "must be positive"));
        }
        validate_grid("grid", &self.grid, d)?;
        validate_metric("metric", &self.metric, d)?;
        let f = &self.fields;
        exactly_one("fields", "u", f.u.is_some(), "w", f.w.is_some())?;
        exactly_one("fields", "a", f.a.is_some(), "f", f.f.is_some())?;
        for (name, comps) in [("fields.u", &f.u), ("fields.w", &f.w)] {
            components_len(name, comps.as_ref(), d)?;
        }
        components_len("fields.a", f.a.as_ref(), d)?;
        components_len("fields.f", f.f.as_ref(), d * (d - 1) / 2)?;
        if let Some(c) = &f.cauchy {
            square("fields.cauchy", c, d)?;
        }
        if let Some(ext) = &self.exterior {
            validate_grid("exterior.grid", &ext.grid, d)?;
            validate_metric("exterior.metric", &ext.metric, d)?;
            exactly_one("exterior", "a", ext.a.is_some(), "f", ext.f.is_some())?;
            components_len("exterior.a", ext.a.as_ref(), d)?;
            components_len("exterior.f", ext.f.as_ref(), d * (d - 1) / 2)?;
        }
        if let Some(i) = &self.interface {
            if i.lo.len() != d || i.hi.len() != d || i.counts.len() != d {
                return Err(schema("interface", format!("lo, hi and counts need {d} entries")));
            }
            if self.exterior.is_none() {
                return Err(schema("interface", "an interface needs an [exterior] side"));
            }
        }
        for c in &self.checks {
            if !crate::run::SUITES.contains(&c.as_str()) {
                return Err(schema(
                    "checks",
                    format!("unknown suite '{c}' (expected one of {:?})", crate::run::SUITES),
                ));
            }
        }
        Ok(())
    }
}

fn validate_grid(field: &str, g: &GridSpec, d: usize) -> Result<(), ScenarioError> {
    if g.axes.len() != d {
        return Err(schema(format!("{field}.axes"), format!("need {d} axes, found {}", g.axes.len())));
    }
    for (i, a) in g.axes.iter().enumerate() {
        if !(a.hi > a.lo) || a.n < 2 {
            return Err(schema(format!("{field}.axes[{i}]"), "need hi > lo and n ≥ 2"));
        }
    }
    Ok(())
}

fn validate_metric(field: &str, m: &MetricSpec, d: usize) -> Result<(), ScenarioError> {
    match m.kind {
        MetricKind::Minkowski => {}
        MetricKind::Schwarzschild | MetricKind::ReissnerNordstrom => {
            if d != 4 {
                return Err(schema(field, "Schwarzschild and Reissner–Nordström need dimension = 3"));
            }
            if m.mass.is_none() {
                return Err(schema(format!("{field}.mass"), "required"));
            }
            if m.kind == MetricKind::ReissnerNordstrom && m.charge.is_none() {
                return Err(schema(format!("{field}.charge"), "required"));
            }
        }
        MetricKind::Components => match &m.components {
            Some(c) => square(&format!("{field}.components"), c, d)?,
            None => return Err(schema(format!("{field}.components"), "required for kind = \"components\"")),
        },
    }
    Ok(())
}

fn exactly_one(field: &str, a: &str, has_a: bool, b: &str, has_b: bool) -> Result<(), ScenarioError> {
    if has_a == has_b {
        return Err(schema(field, format!("give exactly one of '{a}' and '{b}'")));
    }
    Ok(())
}

fn components_len(field: &str, c: Option<&Components>, n: usize) -> Result<(), ScenarioError> {
    match c {
        Some(Components::List(v)) if v.len() != n => {
            Err(schema(field, format!("need {n} components, found {}", v.len())))
        }
        _ => Ok(()),
    }
}

fn square(field: &str, m: &[Vec<Scalar>], d: usize) -> Result<(), ScenarioError> {
    if m.len() != d || m.iter().any(|r| r.len() != d) {
        return Err(schema(field, format!("need a {d}×{d} matrix")));
    }
    Ok(())
}
