//! Flat `key = value` scenario files with dotted sections.
//!
//! ```text
//! # free particle under the exact 1D model
//! units = natural
//! t_end = 1
//! dt = 0.01
//! model.kind = nonrel_exact_1d
//! model.mass = 1
//! model.beta = 0.01
//! model.potential = free
//! initial.x = 0
//! initial.p = 1
//! boost.law = exact
//! boost.velocity = 0.3
//! output.trajectory = traj.csv
//! ```
//!
//! Vector values (3D states) are comma separated: `initial.p = 1, 0, 0`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::algebra::{CanonicalState1D, CanonicalState3D, DeformationParameters};
use crate::constants::{effective_light_speed, effective_velocity_u, Geometry, UnitSystem};
use crate::dynamics::{Hamiltonian, HamiltonianKind, Potential, SqrtBranch};
use crate::error::{Error, Result};
use crate::frames::GalileanLaw;

use super::format_f64;

/// Relative tolerance for `gamma^2 = beta m^2` when both are given.
const COUPLING_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Beta(f64),
    Gamma(f64),
    Both { beta: f64, gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    NonRelExact1D,
    NonRelFirstOrder1D,
    NonRel3DFirstOrder,
    NonRel3DExact,
    RelFirstOrder1D,
    EffectiveSqrt,
}

impl ModelTag {
    const ALL: [ModelTag; 6] = [
        ModelTag::NonRelExact1D,
        ModelTag::NonRelFirstOrder1D,
        ModelTag::NonRel3DFirstOrder,
        ModelTag::NonRel3DExact,
        ModelTag::RelFirstOrder1D,
        ModelTag::EffectiveSqrt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelTag::NonRelExact1D => "nonrel_exact_1d",
            ModelTag::NonRelFirstOrder1D => "nonrel_first_order_1d",
            ModelTag::NonRel3DFirstOrder => "nonrel_3d_first_order",
            ModelTag::NonRel3DExact => "nonrel_3d_exact",
            ModelTag::RelFirstOrder1D => "rel_first_order_1d",
            ModelTag::EffectiveSqrt => "effective_sqrt",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }

    fn dimension(&self) -> Option<usize> {
        match self {
            ModelTag::NonRel3DFirstOrder | ModelTag::NonRel3DExact => Some(3),
            ModelTag::EffectiveSqrt => None,
            _ => Some(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub tag: ModelTag,
    pub mass: f64,
    pub coupling: Coupling,
    pub potential: Potential,
    /// Light speed for `rel_first_order_1d`, when given explicitly.
    pub c: Option<f64>,
    /// Velocity scale for `effective_sqrt`, when given explicitly.
    pub scale: Option<f64>,
    pub branch: SqrtBranch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    OneD(CanonicalState1D),
    ThreeD(CanonicalState3D),
}

impl InitialState {
    pub fn dimension(&self) -> usize {
        match self {
            InitialState::OneD(_) => 1,
            InitialState::ThreeD(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoostLaw {
    Galilean(GalileanLaw),
    Lorentz,
}

impl BoostLaw {
    pub fn name(&self) -> &'static str {
        match self {
            BoostLaw::Galilean(l) => l.name(),
            BoostLaw::Lorentz => "lorentz",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "exact" => BoostLaw::Galilean(GalileanLaw::Exact),
            "first_order" => BoostLaw::Galilean(GalileanLaw::FirstOrder),
            "ordinary" => BoostLaw::Galilean(GalileanLaw::Ordinary),
            "lorentz" => BoostLaw::Lorentz,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostSpec {
    pub law: BoostLaw,
    pub velocity: f64,
    /// `u` for Galilean laws, `c_eff` for Lorentz, when given explicitly.
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputSpec {
    pub trajectory: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// Quantities derived from the model at parse time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derived {
    pub params: DeformationParameters,
    pub gamma: f64,
    pub geometry: Geometry,
    /// Deformed-Galilean scale; `None` when `beta = 0`.
    pub u: Option<f64>,
    pub hamiltonian: Hamiltonian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub units: UnitSystem,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub model: Option<ModelSpec>,
    pub initial: Option<InitialState>,
    pub boost: Option<BoostSpec>,
    pub output: OutputSpec,
    pub derived: Option<Derived>,
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

struct Document {
    entries: BTreeMap<String, Entry>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `key = value`, found `{content}`"),
                });
            };
            let key = key.trim();
            let valid_key = !key.is_empty()
                && key.split('.').all(|part| {
                    !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                });
            if !valid_key {
                return Err(Error::Parse {
                    line,
                    message: format!("invalid key `{key}`"),
                });
            }
            let entry = Entry {
                line,
                value: value.trim().to_string(),
                used: false,
            };
            if let Some(previous) = entries.insert(key.to_string(), entry) {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "duplicate key `{key}` (first set on line {})",
                        previous.line
                    ),
                });
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            e.value.clone()
        })
    }

    fn has_section(&self, section: &str) -> bool {
        let prefix = format!("{section}.");
        self.entries.keys().any(|k| k.starts_with(&prefix))
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        let Some(raw) = self.take(key) else {
            return Ok(None);
        };
        let value: f64 = raw
            .parse()
            .map_err(|_| invalid(key, format!("`{raw}` is not a number")))?;
        if !value.is_finite() {
            return Err(invalid(key, "value must be finite"));
        }
        Ok(Some(value))
    }

    fn vector(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(raw) = self.take(key) else {
            return Ok(None);
        };
        let values = raw
            .split(',')
            .map(|part| {
                let part = part.trim();
                part.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| invalid(key, format!("`{part}` is not a finite number")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(values))
    }

    fn required_number(&mut self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| invalid(key, "missing required key"))
    }

    fn finish(self) -> Result<()> {
        if let Some((key, _)) = self.entries.iter().find(|(_, e)| !e.used) {
            return Err(invalid(key, "unknown key"));
        }
        Ok(())
    }
}

fn invalid(key: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        key: key.to_string(),
        message: message.into(),
    }
}

fn positive(key: &str, value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(key, format!("must be positive, got {value}")))
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    parse_config_with(text, None)
}

/// Parses a scenario; `units_override` (from `GUP_UNITS`) replaces the
/// document's `units` key.
pub fn parse_config_with(text: &str, units_override: Option<UnitSystem>) -> Result<ScenarioConfig> {
    let mut doc = Document::parse(text)?;

    let units = match doc.take("units") {
        Some(raw) => raw.parse::<UnitSystem>().map_err(|m| invalid("units", m))?,
        None => UnitSystem::Natural,
    };
    let units = units_override.unwrap_or(units);

    let t_end = doc
        .number("t_end")?
        .map(|v| positive("t_end", v))
        .transpose()?;
    let dt = doc.number("dt")?.map(|v| positive("dt", v)).transpose()?;

    let model = if doc.has_section("model") {
        Some(parse_model(&mut doc)?)
    } else {
        None
    };

    let initial = if doc.has_section("initial") {
        let x = doc
            .vector("initial.x")?
            .ok_or_else(|| invalid("initial.x", "missing required key"))?;
        let p = doc
            .vector("initial.p")?
            .ok_or_else(|| invalid("initial.p", "missing required key"))?;
        if x.len() != p.len() {
            return Err(invalid(
                "initial.p",
                format!("has {} components but initial.x has {}", p.len(), x.len()),
            ));
        }
        Some(match x.len() {
            1 => InitialState::OneD(CanonicalState1D::scalar(x[0], p[0])),
            3 => InitialState::ThreeD(CanonicalState3D::new(
                [x[0], x[1], x[2]],
                [p[0], p[1], p[2]],
            )),
            n => {
                return Err(invalid(
                    "initial.x",
                    format!("expected 1 or 3 components, got {n}"),
                ))
            }
        })
    } else {
        None
    };

    let boost = if doc.has_section("boost") {
        let raw = doc
            .take("boost.law")
            .ok_or_else(|| invalid("boost.law", "missing required key"))?;
        let law = BoostLaw::parse(&raw).ok_or_else(|| {
            invalid(
                "boost.law",
                format!("unknown law `{raw}` (exact, first_order, ordinary, lorentz)"),
            )
        })?;
        let velocity = doc.required_number("boost.velocity")?;
        let (scale_key, other_key) = match law {
            BoostLaw::Lorentz => ("boost.c_eff", "boost.u"),
            BoostLaw::Galilean(_) => ("boost.u", "boost.c_eff"),
        };
        if doc.take(other_key).is_some() {
            return Err(invalid(
                other_key,
                format!("not used by the {} law", law.name()),
            ));
        }
        let scale = doc
            .number(scale_key)?
            .map(|v| positive(scale_key, v))
            .transpose()?;
        Some(BoostSpec {
            law,
            velocity,
            scale,
        })
    } else {
        None
    };

    let output = OutputSpec {
        trajectory: doc.take("output.trajectory").map(PathBuf::from),
        events: doc.take("output.events").map(PathBuf::from),
        report: doc.take("output.report").map(PathBuf::from),
    };
    doc.finish()?;

    let derived = model
        .as_ref()
        .map(|m| derive(m, initial.as_ref(), units))
        .transpose()?;

    Ok(ScenarioConfig {
        units,
        t_end,
        dt,
        model,
        initial,
        boost,
        output,
        derived,
    })
}

fn parse_model(doc: &mut Document) -> Result<ModelSpec> {
    let raw = doc
        .take("model.kind")
        .ok_or_else(|| invalid("model.kind", "missing required key"))?;
    let tag = ModelTag::parse(&raw).ok_or_else(|| {
        let names: Vec<_> = ModelTag::ALL.iter().map(|t| t.name()).collect();
        invalid(
            "model.kind",
            format!("unknown model `{raw}` (one of {})", names.join(", ")),
        )
    })?;
    let mass = positive("model.mass", doc.required_number("model.mass")?)?;
    let coupling = match (doc.number("model.beta")?, doc.number("model.gamma")?) {
        (Some(beta), None) => Coupling::Beta(beta),
        (None, Some(gamma)) => Coupling::Gamma(gamma),
        (Some(beta), Some(gamma)) => {
            let implied = beta * mass * mass;
            let scale = implied.max(gamma * gamma).max(f64::MIN_POSITIVE);
            if (gamma * gamma - implied).abs() > COUPLING_TOLERANCE * scale {
                return Err(Error::Conflict(format!(
                    "gamma^2 = {} but beta m^2 = {implied}",
                    gamma * gamma
                )));
            }
            Coupling::Both { beta, gamma }
        }
        (None, None) => {
            return Err(invalid(
                "model.beta",
                "one of model.beta or model.gamma is required",
            ))
        }
    };

    let potential = match doc.take("model.potential").as_deref() {
        None | Some("free") => Potential::Free,
        Some("harmonic") => Potential::Harmonic {
            stiffness: doc.required_number("model.stiffness")?,
        },
        Some("uniform_field") => Potential::UniformField {
            force: doc.required_number("model.force")?,
        },
        Some(other) => {
            return Err(invalid(
                "model.potential",
                format!("unknown potential `{other}` (free, harmonic, uniform_field)"),
            ))
        }
    };

    let c = doc
        .number("model.c")?
        .map(|v| positive("model.c", v))
        .transpose()?;
    if c.is_some() && tag != ModelTag::RelFirstOrder1D {
        return Err(invalid("model.c", "only used by rel_first_order_1d"));
    }
    let scale = doc
        .number("model.scale")?
        .map(|v| positive("model.scale", v))
        .transpose()?;
    let branch = match doc.take("model.branch").as_deref() {
        None | Some("euclidean") => SqrtBranch::Euclidean,
        Some("relativistic") => SqrtBranch::Relativistic,
        Some(other) => {
            return Err(invalid(
                "model.branch",
                format!("unknown branch `{other}` (euclidean, relativistic)"),
            ))
        }
    };
    if tag != ModelTag::EffectiveSqrt && (scale.is_some() || branch != SqrtBranch::Euclidean) {
        return Err(invalid(
            "model.scale",
            "scale and branch are only used by effective_sqrt",
        ));
    }

    Ok(ModelSpec {
        tag,
        mass,
        coupling,
        potential,
        c,
        scale,
        branch,
    })
}

fn derive(model: &ModelSpec, initial: Option<&InitialState>, units: UnitSystem) -> Result<Derived> {
    let params = match model.coupling {
        Coupling::Beta(beta) | Coupling::Both { beta, .. } => {
            DeformationParameters::new(beta, model.mass)
        }
        Coupling::Gamma(gamma) => DeformationParameters::from_gamma(gamma, model.mass),
    }
    .map_err(|e| invalid("model.beta", e.to_string()))?;
    let gamma = match model.coupling {
        Coupling::Gamma(gamma) | Coupling::Both { gamma, .. } => gamma,
        Coupling::Beta(_) => params.gamma(),
    };

    let dimension = match (model.tag.dimension(), initial.map(InitialState::dimension)) {
        (Some(d), Some(found)) if d != found => {
            return Err(invalid(
                "initial.x",
                format!(
                    "{} is a {d}D model but the initial state is {found}D",
                    model.tag.name()
                ),
            ))
        }
        (Some(d), _) => d,
        (None, Some(found)) => found,
        (None, None) => 1,
    };
    let geometry = if dimension == 3 {
        Geometry::ThreeD
    } else {
        Geometry::OneD
    };
    let u = if gamma > 0.0 {
        Some(effective_velocity_u(gamma, geometry)?)
    } else {
        None
    };

    let kind = match model.tag {
        ModelTag::NonRelExact1D => HamiltonianKind::NonRelExact1D,
        ModelTag::NonRelFirstOrder1D => HamiltonianKind::NonRelFirstOrder1D,
        ModelTag::NonRel3DFirstOrder => HamiltonianKind::NonRel3DFirstOrder,
        ModelTag::NonRel3DExact => HamiltonianKind::NonRel3DExact,
        ModelTag::RelFirstOrder1D => HamiltonianKind::RelFirstOrder1D {
            c: model.c.unwrap_or_else(|| units.light_speed()),
        },
        ModelTag::EffectiveSqrt => {
            let scale = match (model.scale, model.branch) {
                (Some(s), _) => s,
                (None, SqrtBranch::Euclidean) => u.ok_or_else(|| {
                    invalid(
                        "model.scale",
                        "cannot derive u from beta = 0; give model.scale",
                    )
                })?,
                (None, SqrtBranch::Relativistic) => {
                    effective_light_speed(gamma, geometry, units.light_speed())?
                }
            };
            HamiltonianKind::EffectiveSquareRoot {
                scale,
                branch: model.branch,
            }
        }
    };
    let hamiltonian = Hamiltonian::new(kind, params, model.potential)?;
    Ok(Derived {
        params,
        gamma,
        geometry,
        u,
        hamiltonian,
    })
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format_f64(*v))
        .collect::<Vec<_>>()
        .join(", ")
}

impl ScenarioConfig {
    /// Writes the configuration back in the key/value format accepted by
    /// [`parse_config`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("units", self.units.to_string());
        if let Some(t) = self.t_end {
            put("t_end", format_f64(t));
        }
        if let Some(dt) = self.dt {
            put("dt", format_f64(dt));
        }
        if let Some(m) = &self.model {
            put("model.kind", m.tag.name().into());
            put("model.mass", format_f64(m.mass));
            match m.coupling {
                Coupling::Beta(b) => put("model.beta", format_f64(b)),
                Coupling::Gamma(g) => put("model.gamma", format_f64(g)),
                Coupling::Both { beta, gamma } => {
                    put("model.beta", format_f64(beta));
                    put("model.gamma", format_f64(gamma));
                }
            }
            match m.potential {
                Potential::Free => put("model.potential", "free".into()),
                Potential::Harmonic { stiffness } => {
                    put("model.potential", "harmonic".into());
                    put("model.stiffness", format_f64(stiffness));
                }
                Potential::UniformField { force } => {
                    put("model.potential", "uniform_field".into());
                    put("model.force", format_f64(force));
                }
            }
            if let Some(c) = m.c {
                put("model.c", format_f64(c));
            }
            if let Some(s) = m.scale {
                put("model.scale", format_f64(s));
            }
            if m.branch == SqrtBranch::Relativistic {
                put("model.branch", "relativistic".into());
            }
        }
        match self.initial {
            Some(InitialState::OneD(s)) => {
                put("initial.x", join(&s.x));
                put("initial.p", join(&s.p));
            }
            Some(InitialState::ThreeD(s)) => {
                put("initial.x", join(&s.x));
                put("initial.p", join(&s.p));
            }
            None => {}
        }
        if let Some(b) = self.boost {
            put("boost.law", b.law.name().into());
            put("boost.velocity", format_f64(b.velocity));
            if let Some(s) = b.scale {
                let key = if b.law == BoostLaw::Lorentz {
                    "boost.c_eff"
                } else {
                    "boost.u"
                };
                put(key, format_f64(s));
            }
        }
        for (key, path) in [
            ("output.trajectory", &self.output.trajectory),
            ("output.events", &self.output.events),
            ("output.report", &self.output.report),
        ] {
            if let Some(p) = path {
                put(key, p.display().to_string());
            }
        }
        out
    }

    /// Key/value view used to echo the scenario in reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.render()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }
}
