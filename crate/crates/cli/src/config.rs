//! Run configuration: TOML schema, unit conversion, overrides and emission.
//!
//! Every physical value is a unit-tagged string. Missing sections fall back
//! to the GaAs preset; unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use polariton_engine::condensate::GridSpec;
use polariton_engine::phases::{Axis, ParamId, Quantity, Scale, SweepSpec};
use polariton_engine::{BathKind, BathSpec, EngineParams, Scenario};
use serde::{Deserialize, Serialize};

use crate::units::{format_quantity, parse_quantity, Dimension};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// Dotted path of the offending field, empty for document-level errors.
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "config error: {}", self.message)
        } else {
            write!(f, "config error at `{}`: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<polariton_engine::Error> for ConfigError {
    fn from(e: polariton_engine::Error) -> Self {
        match e {
            polariton_engine::Error::InvalidParameter { field, reason } => {
                ConfigError::new(field, reason)
            }
            other => ConfigError::new("", other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SteadyState,
    GainCurve,
    SolveCondensate,
    PhaseDiagram,
    PowerMap,
    EfficiencyMap,
    RefrigeratorDiagram,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SteadyState => "steady-state",
            Command::GainCurve => "gain-curve",
            Command::SolveCondensate => "solve-condensate",
            Command::PhaseDiagram => "phase-diagram",
            Command::PowerMap => "power-map",
            Command::EfficiencyMap => "efficiency-map",
            Command::RefrigeratorDiagram => "refrigerator-diagram",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateOptions {
    /// Condensate occupation; the stable root is used when absent.
    pub occupation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainCurveOptions {
    pub n_max: f64,
    pub points: usize,
    /// Add a curve with a flat cold spectral density of equal peak height.
    pub compare_flat: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        Axis::linear(ParamId::ColdTemperature, self.start, self.stop, self.count).values()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagramOptions {
    pub cold_temperatures: Range,
    pub hot_bracket: (f64, f64),
    /// One boundary per loss rate (ps⁻¹).
    pub loss_rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputOptions {
    pub directory: PathBuf,
    pub format: Format,
    /// Significant digits of numeric output.
    pub precision: usize,
}

/// Validated configuration in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub scenario: Scenario,
    pub grid: GridSpec,
    pub steady_state: SteadyStateOptions,
    pub gain_curve: GainCurveOptions,
    pub phase_diagram: PhaseDiagramOptions,
    pub sweep: Option<SweepSpec>,
    pub output: OutputOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RawConfig::default()
            .resolve()
            .expect("default preset is valid")
    }
}

// ---- raw schema ---------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawConfig {
    command: Command,
    engine: RawEngine,
    cold: RawBath,
    hot: RawBath,
    grid: RawGrid,
    steady_state: RawSteadyState,
    gain_curve: RawGainCurve,
    phase_diagram: RawPhaseDiagram,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
    output: RawOutput,
}

impl Default for RawConfig {
    fn default() -> Self {
        RawConfig {
            command: Command::SolveCondensate,
            engine: RawEngine::default(),
            cold: RawBath {
                kind: BathKind::LorentzianCold,
                alpha: "0.1 ps^-1".into(),
                center: Some("5 meV".into()),
                edge: None,
                width: Some("1.7 ps^-1".into()),
                temperature: "10 K".into(),
                mu: None,
            },
            hot: RawBath {
                kind: BathKind::StepHot,
                alpha: "0.2 ps^-1".into(),
                center: None,
                edge: Some("1 eV".into()),
                width: None,
                temperature: "200 K".into(),
                mu: Some("992 meV".into()),
            },
            grid: RawGrid::default(),
            steady_state: RawSteadyState::default(),
            gain_curve: RawGainCurve::default(),
            phase_diagram: RawPhaseDiagram::default(),
            sweep: None,
            output: RawOutput::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEngine {
    e2: String,
    e3: String,
    omega: String,
    coupling: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    loss_rate: Option<String>,
    /// Condensate lifetime 1/γ, alternative to `loss_rate`.
    #[serde(skip_serializing_if = "Option::is_none")]
    lifetime: Option<String>,
    replicas: u64,
}

impl Default for RawEngine {
    fn default() -> Self {
        RawEngine {
            e2: "5 meV".into(),
            e3: "1005 meV".into(),
            omega: "1 eV".into(),
            coupling: "0.048 ps^-1".into(),
            loss_rate: None,
            lifetime: Some("1 ps".into()),
            replicas: 10_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBath {
    kind: BathKind,
    alpha: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    width: Option<String>,
    temperature: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawGrid {
    n_max: f64,
    points: usize,
    linear_prefix: usize,
    geometric_start: f64,
}

impl Default for RawGrid {
    fn default() -> Self {
        let g = GridSpec::default();
        RawGrid {
            n_max: g.n_max,
            points: g.points,
            linear_prefix: g.linear_prefix,
            geometric_start: g.geometric_start,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSteadyState {
    #[serde(skip_serializing_if = "Option::is_none")]
    occupation: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawGainCurve {
    n_max: f64,
    points: usize,
    compare_flat: bool,
}

impl Default for RawGainCurve {
    fn default() -> Self {
        RawGainCurve {
            n_max: 2000.0,
            points: 81,
            compare_flat: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    start: String,
    stop: String,
    count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawPhaseDiagram {
    cold_temperatures: RawRange,
    hot_bracket: [String; 2],
    loss_rates: Vec<String>,
}

impl Default for RawPhaseDiagram {
    fn default() -> Self {
        RawPhaseDiagram {
            cold_temperatures: RawRange {
                start: "2 K".into(),
                stop: "40 K".into(),
                count: 20,
            },
            hot_bracket: ["5 K".into(), "2000 K".into()],
            loss_rates: vec!["1 ps^-1".into(), "0.01 ps^-1".into(), "0.0001 ps^-1".into()],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    param: ParamId,
    start: String,
    stop: String,
    count: usize,
    #[serde(default)]
    scale: Scale,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis1: RawAxis,
    #[serde(skip_serializing_if = "Option::is_none")]
    axis2: Option<RawAxis>,
    #[serde(default)]
    quantities: Vec<Quantity>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawOutput {
    directory: PathBuf,
    format: Format,
    precision: usize,
}

impl Default for RawOutput {
    fn default() -> Self {
        RawOutput {
            directory: PathBuf::from("out"),
            format: Format::Csv,
            precision: 10,
        }
    }
}

// ---- resolution ---------------------------------------------------------

fn param_dimension(p: ParamId) -> Dimension {
    if p.is_temperature() {
        Dimension::Temperature
    } else {
        Dimension::Energy
    }
}

fn required<'a>(field: &str, v: &'a Option<String>) -> Result<&'a str, ConfigError> {
    v.as_deref()
        .ok_or_else(|| ConfigError::new(field, "missing for this bath kind"))
}

fn forbidden(field: &str, v: &Option<String>, kind: BathKind) -> Result<(), ConfigError> {
    match v {
        Some(_) => Err(ConfigError::new(
            field,
            format!("not used by a {} bath", kind_name(kind)),
        )),
        None => Ok(()),
    }
}

fn kind_name(kind: BathKind) -> &'static str {
    match kind {
        BathKind::LorentzianCold => "lorentzian-cold",
        BathKind::StepHot => "step-hot",
        BathKind::Flat => "flat",
    }
}

impl RawEngine {
    fn resolve(&self) -> Result<EngineParams, ConfigError> {
        let e = |f: &str, v: &str| parse_quantity(&format!("engine.{f}"), v, Dimension::Energy);
        let loss_rate = match (&self.loss_rate, &self.lifetime) {
            (Some(r), None) => e("loss_rate", r)?,
            (None, Some(t)) => {
                let tau = parse_quantity("engine.lifetime", t, Dimension::Time)?;
                if !(tau > 0.0) {
                    return Err(ConfigError::new("engine.lifetime", "must be positive"));
                }
                1.0 / tau
            }
            _ => {
                return Err(ConfigError::new(
                    "engine.loss_rate",
                    "give exactly one of `loss_rate` and `lifetime`",
                ))
            }
        };
        Ok(EngineParams {
            e2: e("e2", &self.e2)?,
            e3: e("e3", &self.e3)?,
            omega: e("omega", &self.omega)?,
            coupling: e("coupling", &self.coupling)?,
            loss_rate,
            replicas: self.replicas,
        })
    }
}

impl RawBath {
    fn resolve(&self, name: &str) -> Result<BathSpec, ConfigError> {
        let path = |f: &str| format!("{name}.{f}");
        let energy = |f: &str, v: &str| parse_quantity(&path(f), v, Dimension::Energy);
        let alpha = energy("alpha", &self.alpha)?;
        let temperature = parse_quantity(&path("temperature"), &self.temperature, Dimension::Temperature)?;
        match self.kind {
            BathKind::LorentzianCold => {
                forbidden(&path("edge"), &self.edge, self.kind)?;
                forbidden(&path("mu"), &self.mu, self.kind)?;
                let center = energy("center", required(&path("center"), &self.center)?)?;
                let width = energy("width", required(&path("width"), &self.width)?)?;
                Ok(BathSpec::lorentzian(alpha, center, width, temperature))
            }
            BathKind::StepHot => {
                forbidden(&path("center"), &self.center, self.kind)?;
                forbidden(&path("width"), &self.width, self.kind)?;
                let edge = energy("edge", required(&path("edge"), &self.edge)?)?;
                let mu = energy("mu", required(&path("mu"), &self.mu)?)?;
                Ok(BathSpec::step(alpha, edge, mu, temperature))
            }
            BathKind::Flat => {
                for (f, v) in [("center", &self.center), ("edge", &self.edge), ("width", &self.width)] {
                    forbidden(&path(f), v, self.kind)?;
                }
                let mut b = BathSpec::flat(alpha, temperature);
                if let Some(mu) = &self.mu {
                    b.mu = energy("mu", mu)?;
                }
                Ok(b)
            }
        }
    }

    fn emit(b: &BathSpec) -> Self {
        let e = |x: f64| Some(format_quantity(x, Dimension::Energy));
        let (center, edge, width, mu) = match b.kind {
            BathKind::LorentzianCold => (e(b.center_or_edge), None, e(b.width), None),
            BathKind::StepHot => (None, e(b.center_or_edge), None, e(b.mu)),
            BathKind::Flat => (None, None, None, (b.mu != 0.0).then(|| e(b.mu)).flatten()),
        };
        RawBath {
            kind: b.kind,
            alpha: format_quantity(b.alpha, Dimension::Energy),
            center,
            edge,
            width,
            temperature: format_quantity(b.temperature, Dimension::Temperature),
            mu,
        }
    }
}

impl RawRange {
    fn resolve(&self, field: &str, dim: Dimension) -> Result<Range, ConfigError> {
        let r = Range {
            start: parse_quantity(&format!("{field}.start"), &self.start, dim)?,
            stop: parse_quantity(&format!("{field}.stop"), &self.stop, dim)?,
            count: self.count,
        };
        if r.count == 0 {
            return Err(ConfigError::new(format!("{field}.count"), "must be at least 1"));
        }
        if r.count > 1 && !(r.stop > r.start) {
            return Err(ConfigError::new(format!("{field}.stop"), "must exceed start"));
        }
        Ok(r)
    }
}

impl RawAxis {
    fn resolve(&self, field: &str) -> Result<Axis, ConfigError> {
        let dim = param_dimension(self.param);
        let axis = Axis {
            param: self.param,
            start: parse_quantity(&format!("{field}.start"), &self.start, dim)?,
            stop: parse_quantity(&format!("{field}.stop"), &self.stop, dim)?,
            count: self.count,
            scale: self.scale,
        };
        axis.validate(field)?;
        Ok(axis)
    }

    fn emit(a: &Axis) -> Self {
        let dim = param_dimension(a.param);
        RawAxis {
            param: a.param,
            start: format_quantity(a.start, dim),
            stop: format_quantity(a.stop, dim),
            count: a.count,
            scale: a.scale,
        }
    }
}

impl RawConfig {
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let scenario = Scenario {
            engine: self.engine.resolve()?,
            cold: self.cold.resolve("cold")?,
            hot: self.hot.resolve("hot")?,
        };
        scenario.validate()?;

        let grid = GridSpec {
            n_max: self.grid.n_max,
            points: self.grid.points,
            linear_prefix: self.grid.linear_prefix,
            geometric_start: self.grid.geometric_start,
        };
        grid.validate()?;

        if let Some(n) = self.steady_state.occupation {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(ConfigError::new(
                    "steady_state.occupation",
                    "must be finite and non-negative",
                ));
            }
        }

        let gc = &self.gain_curve;
        if !(gc.n_max > 0.0 && gc.n_max.is_finite()) {
            return Err(ConfigError::new("gain_curve.n_max", "must be positive and finite"));
        }
        if gc.points < 2 {
            return Err(ConfigError::new("gain_curve.points", "must be at least 2"));
        }

        let pd = &self.phase_diagram;
        let hot_bracket = (
            parse_quantity("phase_diagram.hot_bracket[0]", &pd.hot_bracket[0], Dimension::Temperature)?,
            parse_quantity("phase_diagram.hot_bracket[1]", &pd.hot_bracket[1], Dimension::Temperature)?,
        );
        if !(hot_bracket.0 > 0.0 && hot_bracket.1 > hot_bracket.0) {
            return Err(ConfigError::new(
                "phase_diagram.hot_bracket",
                "needs 0 < lower < upper",
            ));
        }
        let loss_rates = pd
            .loss_rates
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let field = format!("phase_diagram.loss_rates[{i}]");
                let v = parse_quantity(&field, r, Dimension::Energy)?;
                if v > 0.0 {
                    Ok(v)
                } else {
                    Err(ConfigError::new(field, "must be positive"))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if loss_rates.is_empty() {
            return Err(ConfigError::new("phase_diagram.loss_rates", "must not be empty"));
        }
        let cold_temperatures =
            pd.cold_temperatures
                .resolve("phase_diagram.cold_temperatures", Dimension::Temperature)?;
        if !(cold_temperatures.start > 0.0) {
            return Err(ConfigError::new(
                "phase_diagram.cold_temperatures.start",
                "must be positive",
            ));
        }

        let sweep = match &self.sweep {
            None => None,
            Some(raw) => {
                let spec = SweepSpec {
                    axis1: raw.axis1.resolve("sweep.axis1")?,
                    axis2: raw.axis2.as_ref().map(|a| a.resolve("sweep.axis2")).transpose()?,
                    quantities: raw.quantities.clone(),
                };
                spec.validate()?;
                Some(spec)
            }
        };

        let out = &self.output;
        if !(1..=17).contains(&out.precision) {
            return Err(ConfigError::new("output.precision", "must be between 1 and 17"));
        }

        Ok(RunConfig {
            command: self.command,
            scenario,
            grid,
            steady_state: SteadyStateOptions {
                occupation: self.steady_state.occupation,
            },
            gain_curve: GainCurveOptions {
                n_max: gc.n_max,
                points: gc.points,
                compare_flat: gc.compare_flat,
            },
            phase_diagram: PhaseDiagramOptions {
                cold_temperatures,
                hot_bracket,
                loss_rates,
            },
            sweep,
            output: OutputOptions {
                directory: out.directory.clone(),
                format: out.format,
                precision: out.precision,
            },
        })
    }

    fn emit(c: &RunConfig) -> Self {
        let e = |x: f64| format_quantity(x, Dimension::Energy);
        let t = |x: f64| format_quantity(x, Dimension::Temperature);
        let eng = &c.scenario.engine;
        let pd = &c.phase_diagram;
        RawConfig {
            command: c.command,
            engine: RawEngine {
                e2: e(eng.e2),
                e3: e(eng.e3),
                omega: e(eng.omega),
                coupling: e(eng.coupling),
                loss_rate: Some(e(eng.loss_rate)),
                lifetime: None,
                replicas: eng.replicas,
            },
            cold: RawBath::emit(&c.scenario.cold),
            hot: RawBath::emit(&c.scenario.hot),
            grid: RawGrid {
                n_max: c.grid.n_max,
                points: c.grid.points,
                linear_prefix: c.grid.linear_prefix,
                geometric_start: c.grid.geometric_start,
            },
            steady_state: RawSteadyState {
                occupation: c.steady_state.occupation,
            },
            gain_curve: RawGainCurve {
                n_max: c.gain_curve.n_max,
                points: c.gain_curve.points,
                compare_flat: c.gain_curve.compare_flat,
            },
            phase_diagram: RawPhaseDiagram {
                cold_temperatures: RawRange {
                    start: t(pd.cold_temperatures.start),
                    stop: t(pd.cold_temperatures.stop),
                    count: pd.cold_temperatures.count,
                },
                hot_bracket: [t(pd.hot_bracket.0), t(pd.hot_bracket.1)],
                loss_rates: pd.loss_rates.iter().map(|&r| e(r)).collect(),
            },
            sweep: c.sweep.as_ref().map(|s| RawSweep {
                axis1: RawAxis::emit(&s.axis1),
                axis2: s.axis2.as_ref().map(RawAxis::emit),
                quantities: s.quantities.clone(),
            }),
            output: RawOutput {
                directory: c.output.directory.clone(),
                format: c.output.format,
                precision: c.output.precision,
            },
        }
    }
}

// ---- documents and overrides ---------------------------------------------

fn parse_document(text: &str) -> Result<toml::Table, ConfigError> {
    text.parse::<toml::Table>()
        .map_err(|e| ConfigError::new("", e.to_string().trim_end().to_string()))
}

/// Applies `key.path=value`. The value is read as a TOML literal when it
/// parses as one and as a bare string otherwise, so `--set hot.temperature="300 K"`
/// and `--set hot.temperature=300 K` are equivalent.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new("", format!("override `{assignment}` is not KEY=VALUE")))?;
    let path = path.trim();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(ConfigError::new(path, "empty key segment in override"));
    }
    let (last, parents) = keys.split_last().expect("split yields one key");
    let mut table = doc;
    for (depth, key) in parents.iter().enumerate() {
        let entry = table
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| {
            ConfigError::new(keys[..=depth].join("."), "is not a table")
        })?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

/// Overlays `user` on `base`. A bath table that names its `kind` replaces
/// the preset bath, and `loss_rate`/`lifetime` displace each other.
fn merge(base: &mut toml::Table, user: toml::Table, path: &str) {
    for (key, value) in user {
        let here = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => {
                let replaces = matches!(here.as_str(), "cold" | "hot") && u.contains_key("kind");
                if replaces {
                    *b = u;
                    continue;
                }
                if here == "engine" {
                    for (given, displaced) in [("loss_rate", "lifetime"), ("lifetime", "loss_rate")] {
                        if u.contains_key(given) {
                            b.remove(displaced);
                        }
                    }
                }
                merge(b, u, &here);
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn from_document(doc: toml::Table) -> Result<RunConfig, ConfigError> {
    let mut full = toml::Table::try_from(RawConfig::default()).expect("preset serializes");
    merge(&mut full, doc, "");
    let raw: RawConfig = serde_path_to_error::deserialize(toml::Value::Table(full)).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { String::new() } else { path };
        ConfigError::new(field, e.into_inner().to_string().trim_end().to_string())
    })?;
    raw.resolve()
}

/// Parses and validates a config document with overrides applied in order.
pub fn load_config_str(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut doc = parse_document(text)?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    from_document(doc)
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    load_config_str(&text, overrides)
}

/// Best-effort output directory of a document that may fail validation.
pub fn peek_output_directory(text: &str, overrides: &[String]) -> Option<PathBuf> {
    let mut doc = parse_document(text).ok()?;
    for o in overrides {
        apply_override(&mut doc, o).ok()?;
    }
    doc.get("output")?
        .get("directory")?
        .as_str()
        .map(PathBuf::from)
}

/// Canonical TOML with every value in internal units.
pub fn emit_config(config: &RunConfig) -> String {
    toml::to_string(&RawConfig::emit(config)).expect("config serializes")
}
