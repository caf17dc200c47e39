//! Command dispatch, output files and the run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use polariton_engine::condensate::{gain_curve, GainCurve};
use polariton_engine::liouville::{assemble_generator, steady_state};
use polariton_engine::phases::{
    phase_boundary_t, refrigerator_diagram, reversible_line, solve_condensate_auto, sweep, Axis,
    ParamId, PhaseDiagram, Quantity, SweepSpec,
};
use polariton_engine::thermo::{currents, net_power_and_efficiency, SteadyStateReport};
use polariton_engine::BathKind;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{emit_config, Command, ConfigError, Format, RunConfig};
use crate::output::{label, round_json, Cell, Table};

pub const TOOL: &str = "polariton-engine";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    ConfigError,
    NumericFailure,
    Partial,
    IoError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::IoError => 1,
            Status::ConfigError => 2,
            Status::NumericFailure => 3,
            Status::Partial => 4,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numeric failure: {0}")]
    Numeric(polariton_engine::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<polariton_engine::Error> for RunError {
    fn from(e: polariton_engine::Error) -> Self {
        match e {
            polariton_engine::Error::InvalidParameter { .. } => RunError::Config(e.into()),
            other => RunError::Numeric(other),
        }
    }
}

impl RunError {
    pub fn status(&self) -> Status {
        match self {
            RunError::Config(_) => Status::ConfigError,
            RunError::Numeric(_) => Status::NumericFailure,
            RunError::Io(_) => Status::IoError,
        }
    }
}

/// A grid or boundary point that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRecord {
    /// Parameter name and value for each coordinate.
    pub at: Vec<(String, f64)>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualStats {
    pub count: usize,
    pub max: f64,
    pub median: f64,
}

impl ResidualStats {
    fn of(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        Some(ResidualStats {
            count: values.len(),
            max: values[values.len() - 1],
            median: values[values.len() / 2],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Metadata written next to every run's data files, including failed runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Option<&'static str>,
    pub status: Status,
    pub exit_code: i32,
    pub error: Option<String>,
    /// Canonical echo of the resolved config.
    pub config: Option<String>,
    pub wall_time_seconds: f64,
    pub summary: Value,
    pub failures: Vec<FailureRecord>,
    pub first_law_residual: Option<ResidualStats>,
    pub positivity_flags: usize,
    pub files: Vec<FileRecord>,
}

impl RunManifest {
    pub fn failed(error: &RunError, config: Option<&RunConfig>) -> Self {
        RunManifest {
            tool: TOOL,
            version: VERSION,
            command: config.map(|c| c.command.name()),
            status: error.status(),
            exit_code: error.status().exit_code(),
            error: Some(error.to_string()),
            config: config.map(emit_config),
            wall_time_seconds: 0.0,
            summary: Value::Null,
            failures: Vec::new(),
            first_law_residual: None,
            positivity_flags: 0,
            files: Vec::new(),
        }
    }

    pub fn write(&self, directory: &Path) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(directory)?;
        let path = directory.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// Tables and metadata produced by one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Value,
    pub failures: Vec<FailureRecord>,
    pub residuals: Vec<f64>,
    pub positivity_flags: usize,
}

impl Outcome {
    fn new(tables: Vec<Table>, summary: Value) -> Self {
        Outcome {
            tables,
            summary,
            failures: Vec::new(),
            residuals: Vec::new(),
            positivity_flags: 0,
        }
    }

    fn record(&mut self, report: &SteadyStateReport) {
        self.residuals.push(report.first_law_residual);
        self.positivity_flags += report.positivity_flag as usize;
    }
}

/// Runs the configured command without touching the filesystem.
pub fn execute(config: &RunConfig) -> Result<Outcome, RunError> {
    match config.command {
        Command::SteadyState => steady_state_cmd(config),
        Command::GainCurve => gain_curve_cmd(config),
        Command::SolveCondensate => solve_condensate_cmd(config),
        Command::PhaseDiagram => phase_diagram_cmd(config),
        Command::PowerMap => map_cmd(config, "power-map", &[Quantity::NetPower, Quantity::Power, Quantity::HeatFromHot]),
        Command::EfficiencyMap => map_cmd(config, "efficiency-map", &[Quantity::NetEfficiency, Quantity::EtaCarnot]),
        Command::RefrigeratorDiagram => refrigerator_cmd(config),
    }
}

/// Executes, writes data files and the manifest, and returns the manifest.
/// The manifest is written even when the command fails.
pub fn run(config: &RunConfig, directory: &Path) -> RunManifest {
    let start = Instant::now();
    let mut manifest = match execute(config).and_then(|o| write_outputs(config, directory, o)) {
        Ok(m) => m,
        Err(e) => RunManifest::failed(&e, Some(config)),
    };
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    if let Err(e) = manifest.write(directory) {
        manifest.status = Status::IoError;
        manifest.exit_code = Status::IoError.exit_code();
        manifest.error = Some(format!("cannot write manifest: {e}"));
    }
    manifest
}

fn write_outputs(config: &RunConfig, directory: &Path, o: Outcome) -> Result<RunManifest, RunError> {
    std::fs::create_dir_all(directory)?;
    let precision = config.output.precision;
    let mut files = Vec::new();
    for t in &o.tables {
        let (ext, text) = match config.output.format {
            Format::Csv => ("csv", t.to_csv(precision)),
            Format::Json => ("json", t.to_json(precision, &o.summary)),
        };
        let name = format!("{}.{ext}", t.name);
        std::fs::write(directory.join(&name), &text)?;
        files.push(FileRecord {
            name,
            bytes: text.len() as u64,
            sha256: format!("{:x}", Sha256::digest(text.as_bytes())),
        });
    }
    let status = if o.failures.is_empty() {
        Status::Ok
    } else {
        Status::Partial
    };
    Ok(RunManifest {
        tool: TOOL,
        version: VERSION,
        command: Some(config.command.name()),
        status,
        exit_code: status.exit_code(),
        error: None,
        config: Some(emit_config(config)),
        wall_time_seconds: 0.0,
        summary: round_json(&o.summary, precision),
        failures: o.failures,
        first_law_residual: ResidualStats::of(o.residuals),
        positivity_flags: o.positivity_flags,
        files,
    })
}

const REPORT_COLUMNS: [&str; 24] = [
    "rho11", "rho22", "rho33", "re_rho23", "im_rho23", "re_rho13", "im_rho13", "re_rho12",
    "im_rho12", "rc2", "rc3", "rh2", "rh3", "r", "power_w", "qc_dot", "eh_dot", "qh_dot",
    "work_in_dot", "net_power", "net_efficiency", "first_law_residual", "min_eigenvalue",
    "positivity_flag",
];

fn report_cells(rep: &SteadyStateReport) -> Vec<Cell> {
    let m = &rep.rho.entries;
    let r = &rep.rates;
    let net = net_power_and_efficiency(rep);
    vec![
        m[(0, 0)].re.into(),
        m[(1, 1)].re.into(),
        m[(2, 2)].re.into(),
        m[(1, 2)].re.into(),
        m[(1, 2)].im.into(),
        m[(0, 2)].re.into(),
        m[(0, 2)].im.into(),
        m[(0, 1)].re.into(),
        m[(0, 1)].im.into(),
        r.rc2.into(),
        r.rc3.into(),
        r.rh2.into(),
        r.rh3.into(),
        r.r.into(),
        rep.power_w.into(),
        rep.qc_dot.into(),
        rep.eh_dot.into(),
        rep.qh_dot.into(),
        rep.work_in_dot.into(),
        net.net_power.into(),
        net.net_efficiency.into(),
        rep.first_law_residual.into(),
        rep.min_eigenvalue.into(),
        rep.positivity_flag.into(),
    ]
}

fn with_report<'a>(leading: &[&'a str]) -> Vec<&'a str> {
    leading.iter().copied().chain(REPORT_COLUMNS).collect()
}

fn steady_state_cmd(c: &RunConfig) -> Result<Outcome, RunError> {
    let s = &c.scenario;
    let (n, source) = match c.steady_state.occupation {
        Some(n) => (n, "configured"),
        None => (solve_condensate_auto(s, &c.grid)?.occupation(), "stable-root"),
    };
    let g = assemble_generator(s, s.engine.rabi(n)?)?;
    let rho = steady_state(&g)?;
    let rep = currents(&rho, &g.frame, s)?;
    let mut t = Table::new("steady-state", &with_report(&["n", "rabi", "theta", "lambda"]));
    let mut row: Vec<Cell> = vec![n.into(), g.frame.rabi.into(), g.frame.theta.into(), g.frame.lambda.into()];
    row.extend(report_cells(&rep));
    t.push(row);
    let mut o = Outcome::new(vec![t], json!({ "occupation": n, "occupation_source": source }));
    o.record(&rep);
    Ok(o)
}

fn curve_summary(label: &str, curve: &GainCurve) -> Value {
    let (i, peak) = curve.peak();
    json!({
        "curve": label,
        "peak_n": curve.n_grid[i],
        "peak_r": peak,
        "discontinuities": curve.discontinuities.iter().map(|d| json!({
            "n_lo": d.n_lo, "n_hi": d.n_hi, "r_lo": d.r_lo, "r_hi": d.r_hi,
            "direction": if d.is_rise() { "rise" } else { "drop" },
        })).collect::<Vec<_>>(),
    })
}

fn gain_curve_cmd(c: &RunConfig) -> Result<Outcome, RunError> {
    let opts = &c.gain_curve;
    let grid: Vec<f64> = (0..opts.points)
        .map(|i| opts.n_max * i as f64 / (opts.points - 1) as f64)
        .collect();
    let mut scenarios = vec![(label(&c.scenario.cold.kind), c.scenario)];
    if opts.compare_flat && c.scenario.cold.kind != BathKind::Flat {
        scenarios.push((label(&BathKind::Flat), c.scenario.with_flat_cold()));
    }
    let e = &c.scenario.engine;
    let m = e.replicas as f64;
    let mut t = Table::new("gain-curve", &["curve", "n", "r", "m_r", "loss"]);
    let mut summaries = Vec::new();
    for (name, s) in &scenarios {
        let curve = gain_curve(s, &grid)?;
        for (&n, &r) in curve.n_grid.iter().zip(&curve.r_values) {
            t.push(vec![name.as_str().into(), n.into(), r.into(), (m * r).into(), (e.loss_rate * n).into()]);
        }
        summaries.push(curve_summary(name, &curve));
    }
    Ok(Outcome::new(vec![t], json!({ "curves": summaries })))
}

fn solve_condensate_cmd(c: &RunConfig) -> Result<Outcome, RunError> {
    let sol = solve_condensate_auto(&c.scenario, &c.grid)?;
    let mut t = Table::new("solve-condensate", &with_report(&["n", "kind", "stable", "residual"]));
    let mut o = Outcome::new(Vec::new(), Value::Null);
    for root in &sol.roots {
        let mut row: Vec<Cell> =
            vec![root.n.into(), label(&root.kind).into(), root.stable.into(), root.residual.into()];
        match &root.report {
            Some(rep) => {
                row.extend(report_cells(rep));
                if root.n > 0.0 {
                    o.record(rep);
                }
            }
            None => row.extend(REPORT_COLUMNS.iter().map(|_| Cell::Empty)),
        }
        t.push(row);
    }
    o.tables.push(t);
    o.summary = json!({
        "occupation": sol.occupation(),
        "condensed": sol.condensed(),
        "threshold_exceeded": sol.threshold_exceeded,
        "transition_order": label(&sol.transition_order_hint),
        "bistable": sol.bistable(),
        "gain_slope": sol.gain_slope,
        "n_max": sol.curve.n_grid.last().copied().unwrap_or(0.0),
        "curve": curve_summary(&label(&c.scenario.cold.kind), &sol.curve),
    });
    Ok(o)
}

fn phase_diagram_cmd(c: &RunConfig) -> Result<Outcome, RunError> {
    let opts = &c.phase_diagram;
    let tcs = opts.cold_temperatures.values();
    let line = reversible_line(&c.scenario)?;
    let mut t = Table::new(
        "phase-diagram",
        &["series", "loss_rate", "cold_temperature", "hot_temperature", "kind", "first_order_hot_temperature"],
    );
    for &tc in &tcs {
        t.push(vec![
            "reversible".into(),
            Cell::Empty,
            tc.into(),
            line.hot_temperature(tc).into(),
            "reversible".into(),
            Cell::Empty,
        ]);
    }
    let mut o = Outcome::new(Vec::new(), Value::Null);
    let mut counts = Vec::new();
    for (i, &gamma) in opts.loss_rates.iter().enumerate() {
        let mut s = c.scenario;
        s.engine.loss_rate = gamma;
        let b = phase_boundary_t(&s, &tcs, opts.hot_bracket, &c.grid);
        let series = format!("gamma-{i}");
        for p in &b.points {
            t.push(vec![
                series.as_str().into(),
                gamma.into(),
                p.cold_temperature.into(),
                p.hot_temperature.into(),
                label(&p.kind).into(),
                p.first_order_hot_temperature.into(),
            ]);
        }
        for m in &b.omitted {
            o.failures.push(FailureRecord {
                at: vec![
                    (ParamId::LossRate.name().into(), gamma),
                    (ParamId::ColdTemperature.name().into(), m.cold_temperature),
                ],
                error: m.reason.to_string(),
            });
        }
        counts.push(json!({ "series": series, "loss_rate": gamma, "points": b.points.len(), "omitted": b.omitted.len() }));
    }
    o.tables.push(t);
    o.summary = json!({ "reversible_slope": line.slope, "series": counts });
    Ok(o)
}

fn default_map_spec(quantities: &[Quantity]) -> SweepSpec {
    let units = polariton_engine::UnitSystem::standard();
    SweepSpec {
        axis1: Axis::linear(ParamId::HotTemperature, 50.0, 400.0, 15),
        axis2: Some(Axis::linear(ParamId::HotMu, units.from_mev(986.0), units.from_mev(998.0), 13)),
        quantities: quantities.to_vec(),
    }
}

fn diagram_outcome(name: &str, d: &PhaseDiagram, summary: Value) -> Outcome {
    let mut columns: Vec<&str> = vec![d.spec.axis1.param.name()];
    if let Some(a) = &d.spec.axis2 {
        columns.push(a.param.name());
    }
    columns.extend(["condensed", "n_c", "threshold_exceeded", "transition_order", "bistable", "positivity_flag"]);
    columns.extend(d.spec.quantities.iter().map(|q| q.name()));
    let mut t = Table::new(name, &columns);
    let mut o = Outcome::new(Vec::new(), summary);
    for p in &d.points {
        let mut at = vec![(d.spec.axis1.param.name().to_string(), p.coords[0])];
        if let Some(a) = &d.spec.axis2 {
            at.push((a.param.name().to_string(), p.coords[1]));
        }
        let data = match &p.outcome {
            Ok(data) => data,
            Err(e) => {
                o.failures.push(FailureRecord { at, error: e.to_string() });
                continue;
            }
        };
        let mut row: Vec<Cell> = at.iter().map(|(_, v)| Cell::Num(*v)).collect();
        row.extend([
            data.condensed.into(),
            data.n_c.into(),
            data.threshold_exceeded.into(),
            label(&data.transition_order).into(),
            data.bistable.into(),
            data.positivity_flag.into(),
        ]);
        row.extend(d.spec.quantities.iter().map(|&q| Cell::from(data.quantity(q))));
        t.push(row);
        if data.condensed {
            if let Some(r) = data.quantity(Quantity::Residual) {
                o.residuals.push(r);
            }
        }
        o.positivity_flags += data.positivity_flag as usize;
    }
    o.tables.push(t);
    o
}

/// Adds the residual so the manifest can report first-law statistics.
fn with_residual(mut spec: SweepSpec) -> (SweepSpec, Vec<Quantity>) {
    let requested = spec.quantities.clone();
    if !spec.quantities.contains(&Quantity::Residual) {
        spec.quantities.push(Quantity::Residual);
    }
    (spec, requested)
}

fn strip_unrequested(mut d: PhaseDiagram, requested: Vec<Quantity>) -> PhaseDiagram {
    d.spec.quantities = requested;
    d
}

fn map_cmd(c: &RunConfig, name: &str, defaults: &[Quantity]) -> Result<Outcome, RunError> {
    let mut spec = c.sweep.clone().unwrap_or_else(|| default_map_spec(defaults));
    if spec.quantities.is_empty() {
        spec.quantities = defaults.to_vec();
    }
    let (full, requested) = with_residual(spec);
    let d = sweep(&full, &c.scenario, &c.grid)?;
    let residuals: Vec<f64> = d
        .points
        .iter()
        .filter_map(|p| p.outcome.as_ref().ok())
        .filter(|p| p.condensed)
        .filter_map(|p| p.quantity(Quantity::Residual))
        .collect();
    let d = strip_unrequested(d, requested);
    let mut o = diagram_outcome(name, &d, json!({ "points": d.points.len() }));
    o.residuals = residuals;
    Ok(o)
}

fn refrigerator_cmd(c: &RunConfig) -> Result<Outcome, RunError> {
    let axes = match &c.sweep {
        None => ((2.0, 40.0, 20), (2.0, 40.0, 20)),
        Some(s) => {
            let a2 = s.axis2.ok_or_else(|| {
                ConfigError::new("sweep.axis2", "refrigerator-diagram needs a cold.temperature axis")
            })?;
            let ok = |a: &Axis, p: ParamId| a.param == p && a.scale == polariton_engine::phases::Scale::Linear;
            if !ok(&s.axis1, ParamId::HotTemperature) {
                return Err(ConfigError::new("sweep.axis1", "must be a linear hot.temperature axis").into());
            }
            if !ok(&a2, ParamId::ColdTemperature) {
                return Err(ConfigError::new("sweep.axis2", "must be a linear cold.temperature axis").into());
            }
            ((s.axis1.start, s.axis1.stop, s.axis1.count), (a2.start, a2.stop, a2.count))
        }
    };
    let requested = c
        .sweep
        .as_ref()
        .map(|s| s.quantities.clone())
        .filter(|q| !q.is_empty())
        .unwrap_or_else(|| vec![Quantity::NetPower]);
    let mut quantities = requested.clone();
    if !quantities.contains(&Quantity::Residual) {
        quantities.push(Quantity::Residual);
    }
    let r = refrigerator_diagram(&c.scenario, axes.0, axes.1, quantities, &c.grid)?;
    let residuals: Vec<f64> = r
        .diagram
        .points
        .iter()
        .filter_map(|p| p.outcome.as_ref().ok())
        .filter(|p| p.condensed)
        .filter_map(|p| p.quantity(Quantity::Residual))
        .collect();
    let below = r.diagram.crossings().iter().filter(|x| x.fixed > x.condensed_at).count();
    let d = strip_unrequested(r.diagram, requested);
    let summary = json!({
        "reversible_slope": r.reversible.slope,
        "points": d.points.len(),
        "onsets_with_cold_above_hot": below,
    });
    let mut o = diagram_outcome("refrigerator-diagram", &d, summary);
    o.residuals = residuals;
    Ok(o)
}
