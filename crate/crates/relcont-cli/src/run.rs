//! Command dispatch, refinement studies, tolerances and the report.

use crate::build::{Compiled, InputError, Problem};
use crate::suites::{self, info, CheckInfo, Env, Kind, Measure, Profile, SemSelect, SuiteError, CATALOG};
use relcont_core::convergence::judge;
use relcont_core::grid::Region;
use relcont_core::tensor::Orientation;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Suites in the order `all` runs them.
pub const SUITES: [&str; 6] = ["identities", "sem", "balance", "maxwell", "einstein", "junction"];

/// Expected error ratio under h → h/2 and the absolute floor of convergence checks.
pub const DEFAULT_RATIO: f64 = 4.0;
pub const DEFAULT_FLOOR: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{suite} at refinement level {level}: {source}")]
    Suite { suite: &'static str, level: u32, source: SuiteError },
    #[error(
        "--tol {0}: expected name=value with a check name or one of exact, assembly, fd, convergence, ratio, floor"
    )]
    Tolerance(String),
    #[error("writing plots to {path}: {source}")]
    Plot { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// Every run error is an input problem (exit code 2); failed checks are not errors.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Identities,
    Sem(SemSelect),
    Balance,
    Maxwell,
    Junction,
    Einstein,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Identities => "identities",
            Command::Sem(_) => "sem",
            Command::Balance => "balance",
            Command::Maxwell => "maxwell",
            Command::Junction => "junction",
            Command::Einstein => "einstein",
            Command::All => "all",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Refinement depth; the scenario's `refine` when None.
    pub refine: Option<u32>,
    /// `--tol name=value` overrides, applied after the scenario's.
    pub tolerances: Vec<(String, f64)>,
    pub plot: Option<PathBuf>,
    pub include_boundary: bool,
}

pub fn parse_tolerance(s: &str) -> Result<(String, f64), RunError> {
    let (k, v) = s.split_once('=').ok_or_else(|| RunError::Tolerance(s.into()))?;
    let v: f64 = v.trim().parse().map_err(|_| RunError::Tolerance(s.into()))?;
    let k = k.trim();
    let base = k.strip_suffix(".ratio").or(k.strip_suffix(".floor")).unwrap_or(k);
    let known = ["exact", "assembly", "fd", "convergence", "ratio", "floor"].contains(&base) || info(base).is_some();
    if !known || !(v > 0.0) {
        return Err(RunError::Tolerance(s.into()));
    }
    Ok((k.into(), v))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One line of the report.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Record {
    pub name: String,
    pub suite: &'static str,
    pub anchor: &'static str,
    pub kind: Kind,
    pub status: Status,
    pub pass: bool,
    /// Norms on the finest level evaluated.
    pub linf: f64,
    pub l2: f64,
    /// Grid sizes (points per axis) of the levels used.
    pub grids: Vec<Vec<usize>>,
    /// L∞ error per level.
    pub errors: Vec<f64>,
    pub ratios: Vec<f64>,
    pub order: Option<f64>,
    /// Threshold (pointwise kinds) or relative ratio band (convergence).
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    /// Worst point on the finest level.
    pub worst: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Summary {
    pub scenario: String,
    pub command: &'static str,
    pub levels: u32,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
    pub summary: Summary,
    pub profiles: BTreeMap<String, Profile>,
}

impl Report {
    pub fn get(&self, name: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.pass {
            0
        } else {
            1
        }
    }

    /// One JSON object per record, then `{"summary": …}`.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s += &serde_json::to_string(r).expect("records serialize");
            s.push('\n');
        }
        #[derive(Serialize)]
        struct Wrap<'a> {
            summary: &'a Summary,
        }
        s += &serde_json::to_string(&Wrap { summary: &self.summary }).expect("summary serializes");
        s.push('\n');
        s
    }

    /// `<dir>/<check>.csv` with columns x0 … x{D−1}, residual.
    pub fn write_plots(&self, dir: &Path) -> Result<(), RunError> {
        let err = |source| RunError::Plot { path: dir.into(), source };
        std::fs::create_dir_all(dir).map_err(err)?;
        for (name, prof) in &self.profiles {
            let Some((x0, _)) = prof.first() else { continue };
            let path = dir.join(format!("{name}.csv"));
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path).map_err(err)?);
            let header: Vec<String> = (0..x0.len()).map(|i| format!("x{i}")).chain(["residual".to_string()]).collect();
            writeln!(f, "{}", header.join(",")).map_err(err)?;
            for (x, v) in prof {
                let row: Vec<String> = x.iter().chain([v]).map(|v| format!("{v:e}")).collect();
                writeln!(f, "{}", row.join(",")).map_err(err)?;
            }
            f.flush().map_err(err)?;
        }
        Ok(())
    }
}

struct Tolerances<'a> {
    scenario: &'a BTreeMap<String, f64>,
    cli: &'a [(String, f64)],
}

impl Tolerances<'_> {
    fn lookup(&self, key: &str) -> Option<f64> {
        self.cli.iter().rev().find(|(k, _)| k == key).map(|(_, v)| *v).or_else(|| self.scenario.get(key).copied())
    }

    /// Specific key, then class key, then default.
    fn get(&self, name: &str, suffix: Option<&str>, class: &str, default: f64) -> f64 {
        let specific = match suffix {
            Some(s) => format!("{name}.{s}"),
            None => name.to_string(),
        };
        self.lookup(&specific).or_else(|| self.lookup(class)).unwrap_or(default)
    }
}

fn requested(compiled: &Compiled, command: Command) -> (Vec<&'static str>, Vec<&'static CheckInfo>) {
    let sc = &compiled.scenario;
    let (suites, form): (Vec<&'static str>, SemSelect) = match command {
        Command::All if !sc.checks.is_empty() => {
            (SUITES.iter().copied().filter(|s| sc.checks.iter().any(|c| c == s)).collect(), SemSelect::All)
        }
        Command::All => (
            SUITES.iter().copied().filter(|&s| s != "junction" || compiled.interface.is_some()).collect(),
            SemSelect::All,
        ),
        Command::Sem(f) => (vec!["sem"], f),
        other => (vec![SUITES.iter().copied().find(|&s| s == other.name()).expect("suite command")], SemSelect::All),
    };
    let checks = CATALOG
        .iter()
        .filter(|c| suites.contains(&c.suite))
        .filter(|c| c.suite != "sem" || form.includes(c.name))
        .filter(|c| !sc.skip.iter().any(|s| s == c.name))
        .collect();
    (suites, checks)
}

#[derive(Default)]
struct Acc {
    grids: Vec<Vec<usize>>,
    measures: Vec<Measure>,
}

pub fn run(compiled: &Compiled, command: Command, opts: &Options) -> Result<Report, RunError> {
    let sc = &compiled.scenario;
    let refine = opts.refine.unwrap_or(sc.refine);
    let (suites, checks) = requested(compiled, command);
    let wanted_names: Vec<&str> = checks.iter().map(|c| c.name).collect();
    let wanted = |n: &str| wanted_names.contains(&n);
    let region_of = |g: &relcont_core::grid::Grid| -> Region {
        if opts.include_boundary {
            g.whole_region()
        } else {
            g.interior_region(sc.margin)
        }
    };
    let region = region_of(&compiled.base);
    let ext_region = compiled.exterior_base().map(region_of);
    let mut acc: BTreeMap<&'static str, Acc> = checks.iter().map(|c| (c.name, Acc::default())).collect();
    let active: Vec<&'static str> = suites.iter().copied().filter(|s| checks.iter().any(|c| c.suite == *s)).collect();
    let needs_levels = active.iter().any(|s| !suites::pointwise_only(s, &wanted));
    let last = if needs_levels { refine } else { 0 };
    for level in 0..=last {
        let problem: Problem = compiled.problem(level)?;
        let env = Env {
            compiled,
            problem: &problem,
            region: &region,
            exterior_region: ext_region.as_ref(),
            pointwise: level == 0,
            wanted: &wanted,
            orientation: Orientation::POSITIVE,
        };
        let dims: Vec<usize> = problem.state.grid().axes().iter().map(|a| a.n).collect();
        for &suite in &active {
            if level > 0 && suites::pointwise_only(suite, &wanted) {
                continue;
            }
            let f = suites::suite_fn(suite).expect("known suite");
            let measures = f(&env).map_err(|source| RunError::Suite { suite, level, source })?;
            for m in measures {
                if let Some(a) = acc.get_mut(m.name.as_str()) {
                    a.grids.push(dims.clone());
                    a.measures.push(m);
                }
            }
        }
    }
    let tols = Tolerances { scenario: &sc.tolerances, cli: &opts.tolerances };
    let mut records = Vec::new();
    let mut profiles = BTreeMap::new();
    for c in &checks {
        let a = acc.remove(c.name).unwrap_or_default();
        let (record, profile) = record(c, a, &tols);
        if let Some(p) = profile {
            profiles.insert(record.name.clone(), p);
        }
        records.push(record);
    }
    records.sort_by(|a, b| a.name.cmp(&b.name));
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let summary = Summary {
        scenario: sc.name.clone(),
        command: command.name(),
        levels: last + 1,
        checks: records.len(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
        pass: records.iter().all(|r| r.pass),
    };
    Ok(Report { records, summary, profiles })
}

fn record(c: &CheckInfo, a: Acc, tols: &Tolerances) -> (Record, Option<Profile>) {
    let tolerance = tols.get(c.name, None, c.kind.class(), c.kind.default_tolerance());
    let mut r = Record {
        name: c.name.into(),
        suite: c.suite,
        anchor: c.anchor,
        kind: c.kind,
        status: Status::Fail,
        pass: false,
        linf: f64::NAN,
        l2: f64::NAN,
        grids: a.grids,
        errors: a.measures.iter().map(|m| m.norms.linf).collect(),
        ratios: vec![],
        order: None,
        tolerance,
        expected_ratio: None,
        floor: None,
        worst: None,
        note: None,
    };
    let Some(last) = a.measures.last() else {
        r.note = Some("the suite produced no value for this check".into());
        return (r, None);
    };
    if last.skipped {
        r.status = Status::Skipped;
        r.pass = true;
        r.note = last.note.clone();
        r.errors.clear();
        r.grids.clear();
        return (r, None);
    }
    r.linf = last.norms.linf;
    r.l2 = last.norms.l2;
    r.worst = last.norms.worst.clone();
    r.note = last.note.clone();
    if c.kind == Kind::Convergence {
        let ratio = tols.get(c.name, Some("ratio"), "ratio", DEFAULT_RATIO);
        let floor = tols.get(c.name, Some("floor"), "floor", DEFAULT_FLOOR);
        let j = judge(&r.errors, ratio, tolerance, floor);
        r.pass = j.pass;
        r.ratios = j.ratios;
        r.order = j.observed_order;
        r.expected_ratio = Some(ratio);
        r.floor = Some(floor);
        if !j.note.is_empty() {
            r.note = Some(j.note);
        }
    } else {
        r.pass = r.errors.iter().all(|e| *e <= tolerance);
        if !r.pass {
            r.note = Some(format!("{:e} exceeds {:e}", r.linf, tolerance));
        }
    }
    if r.pass {
        r.status = Status::Pass;
    }
    (r, Some(last.profile.clone()))
}
