//! Scenario files, simulation and transform runs, and the invariant check
//! suites behind the `gup` command-line tool.

pub mod checks;
pub mod config;

use std::collections::BTreeMap;
use std::io::Read;
use std::time::Instant;

use serde::Serialize;

use crate::algebra::CanonicalState;
use crate::dynamics::{energy_drift, integrate, Hamiltonian, Trajectory};
use crate::error::{Error, Result};
use crate::frames::{minkowski_interval, Event, GalileanBoost, GalileanLaw, LorentzBoost};
use crate::legendre::euclidean_interval;

pub use checks::{run_check, Bound, CheckResult, Suite};
pub use config::{
    parse_config, parse_config_with, BoostLaw, BoostSpec, InitialState, ModelSpec, ModelTag,
    OutputSpec, ScenarioConfig,
};

/// Shortest round-trip decimal, switching to exponent form for very large or
/// very small magnitudes.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub model: String,
    pub samples: usize,
    pub t_end: f64,
    pub endpoint_x: Vec<f64>,
    pub endpoint_p: Vec<f64>,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformSummary {
    pub law: String,
    pub velocity: f64,
    /// `u` for Galilean laws, `c_eff` for Lorentz.
    pub scale: f64,
    pub rows: usize,
    /// Largest change of the pairwise interval, relative to the pair's
    /// Euclidean separation `scale^2 dt^2 + |dx|^2`. Absent for the
    /// approximate laws, which are not expected to preserve it.
    pub interval_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectorySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
    pub failures: usize,
    /// Excluded from determinism comparisons.
    pub wall_time_s: f64,
}

impl RunReport {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            scenario: None,
            trajectory: None,
            transform: None,
            checks: Vec::new(),
            failures: 0,
            wall_time_s: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Output of a simulation: the trajectory table and its report.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub csv: String,
    pub report: RunReport,
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn csv_error(e: csv::Error) -> Error {
    let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Csv {
        row,
        message: e.to_string(),
    }
}

fn trajectory_csv<const D: usize>(traj: &Trajectory<D>) -> Result<String> {
    let mut w = csv_writer();
    let mut header = vec!["t".to_string()];
    if D == 1 {
        header.extend(["x".into(), "p".into()]);
    } else {
        header.extend((1..=D).map(|i| format!("x{i}")));
        header.extend((1..=D).map(|i| format!("p{i}")));
    }
    header.push("energy".into());
    w.write_record(&header).map_err(csv_error)?;
    for ((t, s), e) in traj.times.iter().zip(&traj.states).zip(&traj.energies) {
        let row = std::iter::once(*t)
            .chain(s.x.iter().copied())
            .chain(s.p.iter().copied())
            .chain(std::iter::once(*e))
            .map(format_f64);
        w.write_record(row).map_err(csv_error)?;
    }
    finish_csv(w)
}

fn summarize<const D: usize>(h: &Hamiltonian, traj: &Trajectory<D>) -> TrajectorySummary {
    let (t_end, last) = traj.last().expect("trajectory holds the initial state");
    TrajectorySummary {
        model: h.kind.name().to_string(),
        samples: traj.len(),
        t_end,
        endpoint_x: last.x.to_vec(),
        endpoint_p: last.p.to_vec(),
        initial_energy: traj.energies[0],
        final_energy: *traj.energies.last().expect("non-empty"),
        energy_drift: energy_drift(traj),
    }
}

fn simulate_state<const D: usize>(
    h: &Hamiltonian,
    state: &CanonicalState<D>,
    t_end: f64,
    dt: f64,
) -> Result<(String, TrajectorySummary)> {
    let traj = integrate(h, state, t_end, dt)?;
    Ok((trajectory_csv(&traj)?, summarize(h, &traj)))
}

/// Integrates the configured model and renders the trajectory table.
pub fn run_simulate(config: &ScenarioConfig) -> Result<SimulationRun> {
    let started = Instant::now();
    let missing = |key: &str| Error::Validation {
        key: key.to_string(),
        message: "required by simulate".into(),
    };
    let derived = config
        .derived
        .as_ref()
        .ok_or_else(|| missing("model.kind"))?;
    let initial = config.initial.ok_or_else(|| missing("initial.x"))?;
    let t_end = config.t_end.ok_or_else(|| missing("t_end"))?;
    let dt = config.dt.ok_or_else(|| missing("dt"))?;
    let h = &derived.hamiltonian;

    let (csv, summary) = match initial {
        InitialState::OneD(s) => simulate_state(h, &s, t_end, dt)?,
        InitialState::ThreeD(s) => simulate_state(h, &s, t_end, dt)?,
    };
    let mut report = RunReport::new("simulate");
    report.scenario = Some(config.echo());
    report.trajectory = Some(summary);
    report.wall_time_s = started.elapsed().as_secs_f64();
    Ok(SimulationRun { csv, report })
}

enum Transform {
    Galilean(GalileanBoost),
    Lorentz(LorentzBoost),
}

impl Transform {
    fn apply<const D: usize>(&self, e: &Event<D>) -> Event<D> {
        match self {
            Transform::Galilean(b) => b.apply(e),
            Transform::Lorentz(b) => b.apply(e),
        }
    }

    fn scale(&self) -> f64 {
        match self {
            Transform::Galilean(b) => b.u,
            Transform::Lorentz(b) => b.c_eff,
        }
    }

    /// Interval preserved by the transform, with its positive-definite
    /// normalisation `scale^2 dt^2 + |dx|^2`.
    fn interval<const D: usize>(&self, a: &Event<D>, b: &Event<D>) -> Option<(f64, f64)> {
        let s = self.scale();
        let norm = euclidean_interval(a, b, s);
        match self {
            Transform::Galilean(g) if g.law == GalileanLaw::Exact => Some((norm, norm)),
            Transform::Galilean(_) => None,
            Transform::Lorentz(_) => Some((minkowski_interval(a, b, s), norm)),
        }
    }
}

fn build_transform(config: &ScenarioConfig) -> Result<Transform> {
    let boost = config.boost.ok_or_else(|| Error::Validation {
        key: "boost.law".into(),
        message: "required by transform".into(),
    })?;
    let derived = config.derived.as_ref();
    let underivable = |key: &str| Error::Validation {
        key: key.to_string(),
        message: "not given and cannot be derived (needs a deformed model)".into(),
    };
    Ok(match boost.law {
        BoostLaw::Galilean(law) => {
            let u = match boost.scale {
                Some(u) => u,
                None => derived
                    .and_then(|d| d.u)
                    .ok_or_else(|| underivable("boost.u"))?,
            };
            Transform::Galilean(GalileanBoost::new(boost.velocity, u, law)?)
        }
        BoostLaw::Lorentz => {
            let c_eff = match boost.scale {
                Some(c) => c,
                None => {
                    let d = derived.ok_or_else(|| underivable("boost.c_eff"))?;
                    crate::constants::effective_light_speed(
                        d.gamma,
                        d.geometry,
                        config.units.light_speed(),
                    )?
                }
            };
            Transform::Lorentz(LorentzBoost::new(boost.velocity, c_eff)?)
        }
    })
}

/// Event table read from CSV: the header and the rows.
struct EventTable {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn read_events(input: impl Read) -> Result<EventTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    let width = header.len();
    let names_ok = match width {
        2 => header[0] == "t" && (header[1] == "x" || header[1] == "x1"),
        4 => header == ["t", "x1", "x2", "x3"],
        _ => false,
    };
    if !names_ok {
        return Err(Error::Csv {
            row: 1,
            message: format!(
                "header must be `t,x1` or `t,x1,x2,x3`, found `{}`",
                header.join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != width {
            return Err(Error::Csv {
                row,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        let values = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Csv {
                        row,
                        message: format!("`{f}` is not a finite number"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(values);
    }
    Ok(EventTable { header, rows })
}

fn to_event<const D: usize>(row: &[f64]) -> Event<D> {
    let mut x = [0.0; D];
    x.copy_from_slice(&row[1..=D]);
    Event::new(row[0], x)
}

fn transform_rows<const D: usize>(
    transform: &Transform,
    rows: &[Vec<f64>],
) -> (Vec<Vec<f64>>, Option<f64>) {
    let before: Vec<Event<D>> = rows.iter().map(|r| to_event(r)).collect();
    let after: Vec<Event<D>> = before.iter().map(|e| transform.apply(e)).collect();
    let mut residual = None;
    for i in 0..before.len() {
        for j in (i + 1)..before.len() {
            let Some((old, norm)) = transform.interval(&before[i], &before[j]) else {
                continue;
            };
            let (new, _) = transform.interval(&after[i], &after[j]).expect("same law");
            let change = if norm > 0.0 {
                (new - old).abs() / norm
            } else {
                (new - old).abs()
            };
            residual = Some(residual.map_or(change, |r: f64| r.max(change)));
        }
    }
    if residual.is_none()
        && transform
            .interval(&Event::<D>::new(0.0, [0.0; D]), &Event::new(0.0, [0.0; D]))
            .is_some()
    {
        residual = Some(0.0);
    }
    let out = after
        .iter()
        .map(|e| std::iter::once(e.t).chain(e.x.iter().copied()).collect())
        .collect();
    (out, residual)
}

/// Output of a transform run.
#[derive(Debug, Clone)]
pub struct TransformRun {
    pub csv: String,
    pub report: RunReport,
}

/// Maps every event of the CSV through the configured boost.
pub fn run_transform(config: &ScenarioConfig, events: impl Read) -> Result<TransformRun> {
    let started = Instant::now();
    let transform = build_transform(config)?;
    let table = read_events(events)?;
    let (rows, residual) = if table.header.len() == 2 {
        transform_rows::<1>(&transform, &table.rows)
    } else {
        transform_rows::<3>(&transform, &table.rows)
    };

    let mut w = csv_writer();
    w.write_record(&table.header).map_err(csv_error)?;
    for row in &rows {
        w.write_record(row.iter().map(|v| format_f64(*v)))
            .map_err(csv_error)?;
    }
    let csv = finish_csv(w)?;

    let boost = config.boost.expect("checked by build_transform");
    let mut report = RunReport::new("transform");
    report.scenario = Some(config.echo());
    report.transform = Some(TransformSummary {
        law: boost.law.name().to_string(),
        velocity: boost.velocity,
        scale: transform.scale(),
        rows: rows.len(),
        interval_residual: residual,
    });
    report.wall_time_s = started.elapsed().as_secs_f64();
    Ok(TransformRun { csv, report })
}
