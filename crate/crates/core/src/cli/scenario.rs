//! Scenario documents (TOML) and their validation.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::demon::{FeedbackModel, Protocol};
use crate::evolution::{analytic_lifetime, EvolutionConfig, StepControl, DEFAULT_ALPHA};
use crate::ledger::{Direction, LedgerMode, TransitEvent};
use crate::shell::{DiskProfile, ShellPolicy};
use crate::units::{parse_quantity, Dimension};

/// A scenario field failed to parse or validate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ScenarioError {
    pub path: String,
    pub message: String,
}

impl ScenarioError {
    fn new(path: impl Into<String>, message: impl ToString) -> Self {
        ScenarioError {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, ScenarioError>;

/// A number in natural units, or a string `"<number> <unit>"`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum QuantityInput {
    Number(f64),
    Text(String),
}

impl QuantityInput {
    fn resolve(&self, dimension: Dimension, path: &str) -> Result<f64> {
        match self {
            QuantityInput::Number(x) => Ok(*x),
            QuantityInput::Text(s) => {
                parse_quantity(s, dimension).map_err(|e| ScenarioError::new(path, e))
            }
        }
    }
}

fn resolve_opt(q: &Option<QuantityInput>, dim: Dimension, path: &str) -> Result<Option<f64>> {
    q.as_ref().map(|q| q.resolve(dim, path)).transpose()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    initial_mass: QuantityInput,
    mode: Option<LedgerMode>,
    #[serde(default)]
    evolution: RawEvolution,
    #[serde(default)]
    shell: RawShell,
    #[serde(default)]
    events: Vec<RawEvent>,
    demon: Option<RawDemon>,
    #[serde(default)]
    output: RawOutput,
    // consumed by sweep expansion before deserialisation
    #[serde(default)]
    sweep: Option<toml::Table>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvolution {
    alpha: Option<f64>,
    mass_floor: Option<QuantityInput>,
    t_end: Option<QuantityInput>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_step: Option<QuantityInput>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShell {
    sigma0: Option<f64>,
    r_ref: Option<QuantityInput>,
    p: Option<f64>,
    r_outer_max: Option<QuantityInput>,
    window: Option<QuantityInput>,
    fixed_mass: Option<QuantityInput>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    time: QuantityInput,
    mass: QuantityInput,
    direction: Direction,
    declared_di: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawRange {
    List(Vec<f64>),
    Span { start: f64, stop: f64, step: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDemon {
    bath_temperature: Option<f64>,
    prior: Option<Vec<f64>>,
    error_rates: Option<RawRange>,
    protocol: Option<String>,
    confidence: Option<f64>,
    work: Option<Vec<Vec<f64>>>,
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<String>,
    formats: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSpec {
    pub directory: String,
    pub formats: Vec<OutputFormat>,
}

impl OutputSpec {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemonGrid {
    pub models: Vec<FeedbackModel>,
    pub protocol: Protocol,
    pub tolerance: f64,
}

pub const DEFAULT_DEMON_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub initial_mass: f64,
    pub events: Vec<TransitEvent>,
    /// Outside observer's information change per event, for verification.
    pub declared_di: Vec<Option<f64>>,
    pub evolution: EvolutionConfig,
    pub demon: Option<DemonGrid>,
    pub output: OutputSpec,
}

impl Scenario {
    /// SHA-256 of the canonical JSON form of the validated scenario.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("scenario serialises");
        hex::encode(Sha256::digest(canonical))
    }

    pub fn with_mode(mut self, mode: LedgerMode) -> Self {
        self.evolution.ledger_mode = mode;
        self
    }
}

fn toml_error(e: toml::de::Error) -> ScenarioError {
    let message = e.message().to_string();
    ScenarioError::new("scenario", message.trim())
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario = toml::from_str(text).map_err(toml_error)?;
    if raw.sweep.is_some() {
        return Err(ScenarioError::new(
            "sweep",
            "sweep tables are only accepted by the sweep subcommand",
        ));
    }
    validate(raw)
}

/// One concrete grid point of a sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub parameters: Vec<(String, toml::Value)>,
    pub scenario: Scenario,
}

/// Expand the `[sweep]` table into the cartesian product of its value lists.
///
/// Keys are dotted paths into the document (`"evolution.alpha"`), visited in
/// sorted order; the last key varies fastest.
pub fn expand_sweep(text: &str) -> Result<Vec<SweepPoint>> {
    let mut doc: toml::Table = text.parse().map_err(toml_error)?;
    let sweep = match doc.remove("sweep") {
        Some(toml::Value::Table(t)) if !t.is_empty() => t,
        Some(_) => return Err(ScenarioError::new("sweep", "must be a non-empty table")),
        None => return Err(ScenarioError::new("sweep", "missing [sweep] table")),
    };
    let mut axes = Vec::new();
    for (key, values) in sweep {
        match values {
            toml::Value::Array(v) if !v.is_empty() => axes.push((key, v)),
            _ => {
                return Err(ScenarioError::new(
                    format!("sweep.{key}"),
                    "must be a non-empty array",
                ))
            }
        }
    }

    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        let mut rem = index;
        let mut chosen = vec![toml::Value::Boolean(false); axes.len()];
        for (slot, (_, values)) in chosen.iter_mut().zip(&axes).rev() {
            *slot = values[rem % values.len()].clone();
            rem /= values.len();
        }
        let mut point_doc = doc.clone();
        let mut parameters = Vec::new();
        for ((key, _), value) in axes.iter().zip(chosen) {
            set_path(&mut point_doc, key, value.clone())?;
            parameters.push((key.clone(), value));
        }
        let raw: RawScenario =
            toml::Value::Table(point_doc)
                .try_into()
                .map_err(|e: toml::de::Error| {
                    ScenarioError::new(format!("sweep point {index}"), e.message())
                })?;
        let scenario = validate(raw).map_err(|e| ScenarioError {
            path: format!("sweep point {index}: {}", e.path),
            message: e.message,
        })?;
        points.push(SweepPoint {
            parameters,
            scenario,
        });
    }
    Ok(points)
}

fn set_path(doc: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let leaf = parts.pop().filter(|s| !s.is_empty());
    let Some(leaf) = leaf else {
        return Err(ScenarioError::new(format!("sweep.{path}"), "empty key"));
    };
    let mut table = doc;
    for part in parts {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = match entry {
            toml::Value::Table(t) => t,
            _ => {
                return Err(ScenarioError::new(
                    format!("sweep.{path}"),
                    format!("`{part}` is not a table"),
                ))
            }
        };
    }
    table.insert(leaf.to_string(), value);
    Ok(())
}

fn positive(x: f64, path: &str) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(ScenarioError::new(
            path,
            format!("{x} must be finite and > 0"),
        ))
    }
}

fn validate(raw: RawScenario) -> Result<Scenario> {
    let m0 = positive(
        raw.initial_mass.resolve(Dimension::MASS, "initial_mass")?,
        "initial_mass",
    )?;
    let defaults = EvolutionConfig::for_mass(m0);

    let ev = &raw.evolution;
    let alpha = ev.alpha.unwrap_or(DEFAULT_ALPHA);
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(ScenarioError::new(
            "evolution.alpha",
            format!("{alpha} must be >= 0"),
        ));
    }
    let mass_floor = match resolve_opt(&ev.mass_floor, Dimension::MASS, "evolution.mass_floor")? {
        Some(f) => positive(f, "evolution.mass_floor")?,
        None => defaults.mass_floor,
    };
    if mass_floor >= m0 {
        return Err(ScenarioError::new(
            "evolution.mass_floor",
            format!("{mass_floor} must be below initial_mass {m0}"),
        ));
    }
    let t_end = match resolve_opt(&ev.t_end, Dimension::TIME, "evolution.t_end")? {
        Some(t) => positive(t, "evolution.t_end")?,
        None if alpha > 0.0 => 1.1 * analytic_lifetime(m0, alpha),
        None => {
            return Err(ScenarioError::new(
                "evolution.t_end",
                "required when alpha = 0",
            ))
        }
    };
    let step_control = StepControl {
        rel_tol: positive(
            ev.rel_tol.unwrap_or(defaults.step_control.rel_tol),
            "evolution.rel_tol",
        )?,
        abs_tol: positive(ev.abs_tol.unwrap_or(1e-9 * mass_floor), "evolution.abs_tol")?,
        max_step: match resolve_opt(&ev.max_step, Dimension::TIME, "evolution.max_step")? {
            Some(h) => positive(h, "evolution.max_step")?,
            None => f64::INFINITY,
        },
    };

    let shell_policy = shell_policy(&raw.shell, &defaults)?;

    let mut events = Vec::with_capacity(raw.events.len());
    let mut declared_di = Vec::with_capacity(raw.events.len());
    for (i, e) in raw.events.iter().enumerate() {
        let path = format!("events[{i}]");
        let time = e.time.resolve(Dimension::TIME, &format!("{path}.time"))?;
        let mass = e.mass.resolve(Dimension::MASS, &format!("{path}.mass"))?;
        let event = TransitEvent::new(time, mass, e.direction).map_err(|err| {
            let field = if matches!(err, crate::Error::InvalidMass(_)) {
                "mass"
            } else {
                "time"
            };
            ScenarioError::new(format!("{path}.{field}"), err)
        })?;
        if !(time >= 0.0 && time < t_end) {
            return Err(ScenarioError::new(
                format!("{path}.time"),
                format!("{time} must lie in [0, t_end = {t_end})"),
            ));
        }
        if let Some(prev) = events.last().map(|p: &TransitEvent| p.time) {
            if time < prev {
                return Err(ScenarioError::new(
                    format!("{path}.time"),
                    format!("{time} precedes the previous event at {prev}; events must be sorted"),
                ));
            }
        }
        if let Some(di) = e.declared_di {
            if !di.is_finite() {
                return Err(ScenarioError::new(
                    format!("{path}.declared_di"),
                    "must be finite",
                ));
            }
        }
        events.push(event);
        declared_di.push(e.declared_di);
    }

    let evolution = EvolutionConfig {
        alpha,
        mass_floor,
        t_end,
        step_control,
        shell_policy,
        ledger_mode: raw.mode.unwrap_or_default(),
    };
    evolution
        .validate()
        .map_err(|e| ScenarioError::new("evolution", e))?;

    let demon = raw.demon.as_ref().map(demon_grid).transpose()?;

    let output = OutputSpec {
        directory: raw.output.directory.clone().unwrap_or_else(|| "out".into()),
        formats: match &raw.output.formats {
            None => vec![OutputFormat::Csv, OutputFormat::Json],
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(i, f)| match f.as_str() {
                    "csv" => Ok(OutputFormat::Csv),
                    "json" => Ok(OutputFormat::Json),
                    other => Err(ScenarioError::new(
                        format!("output.formats[{i}]"),
                        format!("unknown format `{other}` (expected csv or json)"),
                    )),
                })
                .collect::<Result<_>>()?,
        },
    };

    Ok(Scenario {
        name: raw.name.unwrap_or_else(|| "scenario".into()),
        initial_mass: m0,
        events,
        declared_di,
        evolution,
        demon,
        output,
    })
}

fn shell_policy(raw: &RawShell, defaults: &EvolutionConfig) -> Result<ShellPolicy> {
    if let Some(fixed) = &raw.fixed_mass {
        let disk_keys = raw.sigma0.is_some()
            || raw.r_ref.is_some()
            || raw.p.is_some()
            || raw.r_outer_max.is_some()
            || raw.window.is_some();
        if disk_keys {
            return Err(ScenarioError::new(
                "shell.fixed_mass",
                "cannot be combined with disk-profile keys",
            ));
        }
        let mass = fixed.resolve(Dimension::MASS, "shell.fixed_mass")?;
        let policy = ShellPolicy::Fixed { mass };
        policy
            .validate()
            .map_err(|e| ScenarioError::new("shell.fixed_mass", e))?;
        return Ok(policy);
    }
    let ShellPolicy::Disk {
        profile: default_profile,
        window: default_window,
    } = defaults.shell_policy
    else {
        unreachable!("default shell policy is a disk");
    };
    let profile = DiskProfile {
        sigma0: raw.sigma0.unwrap_or(default_profile.sigma0),
        r_ref: resolve_opt(&raw.r_ref, Dimension::LENGTH, "shell.r_ref")?
            .unwrap_or(default_profile.r_ref),
        p: raw.p.unwrap_or(default_profile.p),
        r_outer_max: resolve_opt(&raw.r_outer_max, Dimension::LENGTH, "shell.r_outer_max")?
            .unwrap_or(default_profile.r_outer_max),
    };
    profile
        .validate()
        .map_err(|e| ScenarioError::new("shell", e))?;
    let window =
        resolve_opt(&raw.window, Dimension::TIME, "shell.window")?.unwrap_or(default_window);
    let window = positive(window, "shell.window")?;
    Ok(ShellPolicy::Disk { profile, window })
}

fn demon_grid(raw: &RawDemon) -> Result<DemonGrid> {
    let temperature = positive(
        raw.bath_temperature.unwrap_or(1.0),
        "demon.bath_temperature",
    )?;
    let prior = raw.prior.clone().unwrap_or_else(|| vec![0.5, 0.5]);
    let rates: Vec<f64> = match &raw.error_rates {
        None => (0..=50).map(|i| i as f64 / 100.0).collect(),
        Some(RawRange::List(v)) => v.clone(),
        Some(RawRange::Span { start, stop, step }) => {
            if !(*step > 0.0 && stop >= start) {
                return Err(ScenarioError::new(
                    "demon.error_rates",
                    "span needs step > 0 and stop >= start",
                ));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=n).map(|i| start + i as f64 * step).collect()
        }
    };
    if rates.is_empty() {
        return Err(ScenarioError::new("demon.error_rates", "grid is empty"));
    }
    let protocol = match raw.protocol.as_deref().unwrap_or("optimal") {
        "optimal" => Protocol::Optimal,
        "naive" => Protocol::Naive,
        "idle" => Protocol::Idle,
        "assumed" => Protocol::Assumed {
            confidence: raw.confidence.ok_or_else(|| {
                ScenarioError::new("demon.confidence", "required for protocol = \"assumed\"")
            })?,
        },
        "table" => Protocol::Table {
            work: raw.work.clone().ok_or_else(|| {
                ScenarioError::new("demon.work", "required for protocol = \"table\"")
            })?,
        },
        other => {
            return Err(ScenarioError::new(
                "demon.protocol",
                format!("unknown protocol `{other}`"),
            ))
        }
    };
    let models = rates
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            FeedbackModel::new(prior.clone(), eps, temperature, &protocol)
                .map_err(|e| ScenarioError::new(format!("demon.error_rates[{i}]"), e))
        })
        .collect::<Result<Vec<_>>>()?;
    let tolerance = raw.tolerance.unwrap_or(DEFAULT_DEMON_TOLERANCE);
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(ScenarioError::new(
            "demon.tolerance",
            "must be finite and >= 0",
        ));
    }
    Ok(DemonGrid {
        models,
        protocol,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::constants;

    #[test]
    fn minimal_document_gets_defaults() {
        let s = parse_scenario("initial_mass = 2.0").unwrap();
        assert_eq!(s.name, "scenario");
        assert_eq!(s.initial_mass, 2.0);
        assert_eq!(s.evolution.alpha, DEFAULT_ALPHA);
        assert_eq!(s.evolution.mass_floor, 2e-6);
        assert_eq!(
            s.evolution.t_end,
            1.1 * analytic_lifetime(2.0, DEFAULT_ALPHA)
        );
        assert_eq!(s.evolution.ledger_mode, LedgerMode::Differential);
        assert!(s.events.is_empty());
        assert!(s.demon.is_none());
        assert_eq!(s.output.directory, "out");
        assert!(matches!(s.evolution.shell_policy, ShellPolicy::Disk { .. }));
    }

    #[test]
    fn negative_particle_mass_names_event() {
        let doc = r#"
            initial_mass = 1.0
            [[events]]
            time = 0.0
            mass = 0.1
            direction = "infall"
            [[events]]
            time = 1.0
            mass = -0.1
            direction = "infall"
        "#;
        let err = parse_scenario(doc).unwrap_err();
        assert_eq!(err.path, "events[1].mass");
    }

    #[test]
    fn solar_mass_conversion() {
        let s = parse_scenario(r#"initial_mass = "1.0 solar_mass""#).unwrap();
        let oracle = constants::solar_mass() / constants::planck_mass();
        assert!(((s.initial_mass - oracle) / oracle).abs() < 1e-15);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_scenario("initial_mass = 1.0\n[evolution]\nalpah = 1.0").unwrap_err();
        assert!(err.to_string().contains("alpah"), "{err}");
    }

    #[test]
    fn missing_required_key_is_named() {
        let err = parse_scenario("name = \"x\"").unwrap_err();
        assert!(err.to_string().contains("initial_mass"), "{err}");
    }

    #[test]
    fn zero_alpha_needs_t_end() {
        let err = parse_scenario("initial_mass = 1.0\n[evolution]\nalpha = 0.0").unwrap_err();
        assert_eq!(err.path, "evolution.t_end");
    }

    #[test]
    fn unsorted_events_rejected() {
        let doc = r#"
            initial_mass = 1.0
            [evolution]
            alpha = 0.0
            t_end = 5.0
            [[events]]
            time = 2.0
            mass = 0.1
            direction = "infall"
            [[events]]
            time = 1.0
            mass = 0.1
            direction = "emission"
        "#;
        assert_eq!(parse_scenario(doc).unwrap_err().path, "events[1].time");
    }

    #[test]
    fn fixed_shell_excludes_disk_keys() {
        let doc = "initial_mass = 1.0\n[shell]\nfixed_mass = 0.1\nsigma0 = 1.0";
        assert_eq!(parse_scenario(doc).unwrap_err().path, "shell.fixed_mass");
        let ok = parse_scenario("initial_mass = 1.0\n[shell]\nfixed_mass = 0.1").unwrap();
        assert_eq!(ok.evolution.shell_policy, ShellPolicy::Fixed { mass: 0.1 });
    }

    #[test]
    fn demon_span_grid() {
        let doc = r#"
            initial_mass = 1.0
            [demon]
            error_rates = { start = 0.0, stop = 0.5, step = 0.01 }
        "#;
        let s = parse_scenario(doc).unwrap();
        let grid = s.demon.unwrap();
        assert_eq!(grid.models.len(), 51);
        assert!((grid.models[50].error_rate - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bad_output_format() {
        let err = parse_scenario("initial_mass = 1.0\n[output]\nformats = [\"xml\"]").unwrap_err();
        assert_eq!(err.path, "output.formats[0]");
    }

    #[test]
    fn sweep_expands_cartesian() {
        let doc = r#"
            initial_mass = 1.0
            [evolution]
            alpha = 0.0
            t_end = 1.0
            [sweep]
            "evolution.t_end" = [1.0, 2.0, 3.0]
            initial_mass = [1.0, 2.0]
        "#;
        let points = expand_sweep(doc).unwrap();
        assert_eq!(points.len(), 6);
        assert_eq!(points[0].parameters[0].0, "evolution.t_end");
        assert_eq!(points[1].scenario.initial_mass, 2.0);
        assert_eq!(points[2].scenario.evolution.t_end, 2.0);
        assert!(parse_scenario(doc).is_err());
    }

    #[test]
    fn sweep_point_validation_reports_point() {
        let doc = "initial_mass = 1.0\n[sweep]\ninitial_mass = [1.0, -1.0]";
        let err = expand_sweep(doc).unwrap_err();
        assert!(err.path.starts_with("sweep point 1"), "{err}");
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = parse_scenario("initial_mass = 1.0").unwrap();
        let b = parse_scenario("initial_mass = 1.0 # same").unwrap();
        let c = parse_scenario("initial_mass = 1.5").unwrap();
        assert_eq!(a.config_hash(), b.config_hash());
        assert_ne!(a.config_hash(), c.config_hash());
    }
}
