use std::path::Path;
use std::process::Command as Process;

use polariton_engine::condensate::GridSpec;
use polariton_engine::phases::{Axis, ParamId, Quantity, Scale, SweepSpec};
use polariton_engine::{BathSpec, EngineParams, Scenario};
use polariton_engine_cli::config::{
    Format, GainCurveOptions, OutputOptions, PhaseDiagramOptions, Range, SteadyStateOptions,
};
use polariton_engine_cli::{emit_config, load_config_str, Command, RunConfig};
use proptest::prelude::*;
use serde_json::Value;
use sha2::{Digest, Sha256};

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_polariton-engine"))
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn default_preset_solves_to_a_stable_condensate() {
    let dir = tempfile::tempdir().unwrap();
    let status = binary()
        .args(["solve-condensate", "--out-dir"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let m = manifest(dir.path());
    assert_eq!(m["status"], "ok");
    assert_eq!(m["summary"]["condensed"], true);
    let n_c = m["summary"]["occupation"].as_f64().unwrap();
    assert!((n_c - 202.7).abs() < 0.1, "N_c = {n_c}");

    let csv = std::fs::read_to_string(dir.path().join("solve-condensate.csv")).unwrap();
    let file = &m["files"][0];
    assert_eq!(file["name"], "solve-condensate.csv");
    assert_eq!(file["sha256"], format!("{:x}", Sha256::digest(csv.as_bytes())));
    assert_eq!(file["bytes"], csv.len());
    let stable: Vec<&str> = csv.lines().filter(|l| l.contains(",crossing,true,")).collect();
    assert_eq!(stable.len(), 1);
    assert!(m["first_law_residual"]["max"].as_f64().unwrap() < 1e-2);
}

#[test]
fn negative_temperature_is_rejected_with_field_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "[cold]\nkind = \"lorentzian-cold\"\nalpha = \"0.1 ps^-1\"\ncenter = \"5 meV\"\n\
         width = \"1.7 ps^-1\"\ntemperature = \"-5 K\"\n",
    )
    .unwrap();
    let out = binary()
        .arg("--config")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("cold.temperature"), "{stderr}");
    let m = manifest(&dir.path().join("out"));
    assert_eq!(m["status"], "config-error");
    assert!(m["error"].as_str().unwrap().contains("cold.temperature"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary()
        .args(["--set", "hot.temprature=300 K", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("temprature"));
}

#[test]
fn energy_units_are_interchangeable() {
    let a = load_config_str("", &["engine.e2=5 meV".into()]).unwrap();
    let b = load_config_str("", &["engine.e2=7.596 ps^-1".into()]).unwrap();
    let (x, y) = (a.scenario.engine.e2, b.scenario.engine.e2);
    assert!((x - y).abs() <= 1e-4 * x, "{x} vs {y}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let run = |dir: &Path| {
        let status = binary()
            .args(["gain-curve", "--set", "gain_curve.points=41", "--out-dir"])
            .arg(dir)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        std::fs::read(dir.join("gain-curve.csv")).unwrap()
    };
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (a, b) = (run(d1.path()), run(d2.path()));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    // Lorentzian and flat curves, 41 points each, plus two header lines.
    assert_eq!(text.lines().count(), 2 + 2 * 41);
}

#[test]
fn json_output_mirrors_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let status = binary()
        .args(["steady-state", "--format", "json", "--set", "steady_state.occupation=50", "--out-dir"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("steady-state.json")).unwrap())
            .unwrap();
    assert_eq!(doc["schema"], "polariton-engine/steady-state/v1");
    assert_eq!(doc["columns"][0], "n");
    assert_eq!(doc["rows"][0][0], 50.0);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn unclosed_phase_boundaries_make_a_partial_run() {
    let dir = tempfile::tempdir().unwrap();
    let status = binary()
        .args([
            "phase-diagram",
            "--set",
            "phase_diagram.hot_bracket=[\"5 K\", \"40 K\"]",
            "--set",
            "phase_diagram.loss_rates=[\"1 ps^-1\"]",
            "--set",
            "phase_diagram.cold_temperatures={ start = \"4 K\", stop = \"20 K\", count = 3 }",
            "--out-dir",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
    let m = manifest(dir.path());
    assert_eq!(m["status"], "partial");
    assert!(!m["failures"].as_array().unwrap().is_empty());
    let csv = std::fs::read_to_string(dir.path().join("phase-diagram.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("gamma-0,")));
}

#[test]
fn numeric_failures_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    // A bath with no modes at either transition leaves the state undetermined.
    let out = binary()
        .args([
            "steady-state",
            "--set",
            "steady_state.occupation=0",
            "--set",
            "hot.edge=2 eV",
            "--out-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(manifest(dir.path())["status"], "numeric-failure");
}

prop_compose! {
    fn run_config()(
        e2 in 0.1..20.0f64,
        gap in 0.5..2.0f64,
        delta in -1.0..1.0f64,
        coupling in 0.001..0.2f64,
        loss in 1e-5..10.0f64,
        replicas in 1u64..1_000_000,
        cold_flat in any::<bool>(),
        alpha_c in 0.0..1.0f64,
        width in 0.1..5.0f64,
        tc in 0.5..100.0f64,
        alpha_h in 0.0..1.0f64,
        edge_offset in -2.0..2.0f64,
        mu_gap in 0.1..20.0f64,
        th in 0.5..2000.0f64,
        grid in (1e2..1e12f64, 2usize..12, 0usize..400, 1e-5..1e-1f64),
        occupation in prop::option::of(0.0..1e6f64),
        gain in (1.0..1e5f64, 2usize..500, any::<bool>()),
        phase in ((0.1..10.0f64, 0.0..50.0f64, 1usize..40), (0.1..10.0f64, 0.0..3000.0f64), prop::collection::vec(1e-6..10.0f64, 1..4)),
        sweep in prop::option::of((0usize..8, 0usize..8, any::<bool>(), 0.1..10.0f64, 2usize..30, prop::collection::vec(0usize..7, 0..4))),
        out in (any::<bool>(), 1usize..18, "[a-z]{1,8}"),
        command in 0usize..7,
    ) -> RunConfig {
        let mev = |x: f64| polariton_engine::model::mev(x);
        let e3 = mev(e2 + gap * 1000.0);
        let engine = EngineParams {
            e2: mev(e2),
            e3,
            omega: e3 - mev(e2) - mev(delta),
            coupling,
            loss_rate: loss,
            replicas,
        };
        let cold = if cold_flat {
            BathSpec::flat(alpha_c, tc)
        } else {
            BathSpec::lorentzian(alpha_c, mev(e2), width, tc)
        };
        let edge = e3 + mev(edge_offset);
        let hot = BathSpec::step(alpha_h, edge, edge - mev(mu_gap), th);
        let sweep = sweep.map(|(p1, p2, log, lo, count, qs)| {
            let p1 = ParamId::ALL[p1];
            let p2 = ParamId::ALL[if p2 == p1 as usize { (p2 + 1) % 8 } else { p2 }];
            let axis = |p: ParamId| Axis {
                param: p,
                start: lo,
                stop: lo * 3.0,
                count,
                scale: if log { Scale::Log } else { Scale::Linear },
            };
            SweepSpec {
                axis1: axis(p1),
                axis2: (p2 != p1).then(|| axis(p2)),
                quantities: qs.into_iter().map(|i| Quantity::ALL[i]).collect(),
            }
        });
        let commands = [
            Command::SteadyState,
            Command::GainCurve,
            Command::SolveCondensate,
            Command::PhaseDiagram,
            Command::PowerMap,
            Command::EfficiencyMap,
            Command::RefrigeratorDiagram,
        ];
        RunConfig {
            command: commands[command],
            scenario: Scenario { engine, cold, hot },
            grid: GridSpec {
                n_max: grid.0,
                points: grid.1 + 3 + grid.2,
                linear_prefix: grid.1,
                geometric_start: grid.3,
            },
            steady_state: SteadyStateOptions { occupation },
            gain_curve: GainCurveOptions { n_max: gain.0, points: gain.1, compare_flat: gain.2 },
            phase_diagram: PhaseDiagramOptions {
                cold_temperatures: Range {
                    start: (phase.0).0,
                    stop: (phase.0).0 + (phase.0).1 + 1.0,
                    count: (phase.0).2,
                },
                hot_bracket: ((phase.1).0, (phase.1).0 + (phase.1).1 + 1.0),
                loss_rates: phase.2,
            },
            sweep,
            output: OutputOptions {
                directory: out.2.into(),
                format: if out.0 { Format::Json } else { Format::Csv },
                precision: out.1,
            },
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn emitted_configs_load_back_identically(config in run_config()) {
        let text = emit_config(&config);
        let loaded = load_config_str(&text, &[]);
        prop_assert_eq!(loaded, Ok(config), "{}", text);
    }
}
