//! Parameter sweeps, phase boundaries and the reversible limit.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condensate::{gain_slope, solve_condensate, CondensateSolution, GridSpec, TransitionOrder};
use crate::error::{Error, Result};
use crate::liouville::{lamb_limit, DensityMatrix3};
use crate::model::Scenario;
use crate::thermo::{inversion_ratio, net_power_and_efficiency};

/// Largest N_max tried when a sweep point needs a wider bracket.
pub const N_MAX_CEILING: f64 = 1e15;
/// Minimum bisection count for boundary points.
pub const BOUNDARY_BISECTIONS: usize = 12;
/// Relative bracket width at which boundary bisection stops.
pub const BOUNDARY_RELATIVE_TOLERANCE: f64 = 1e-4;

/// A sweepable scalar. Values are in internal units (ps⁻¹, K).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParamId {
    #[serde(rename = "hot.temperature")]
    HotTemperature,
    #[serde(rename = "cold.temperature")]
    ColdTemperature,
    #[serde(rename = "hot.mu")]
    HotMu,
    #[serde(rename = "hot.alpha")]
    HotAlpha,
    #[serde(rename = "cold.alpha")]
    ColdAlpha,
    #[serde(rename = "engine.loss_rate")]
    LossRate,
    #[serde(rename = "engine.coupling")]
    Coupling,
    #[serde(rename = "engine.detuning")]
    Detuning,
}

impl ParamId {
    pub const ALL: [ParamId; 8] = [
        ParamId::HotTemperature,
        ParamId::ColdTemperature,
        ParamId::HotMu,
        ParamId::HotAlpha,
        ParamId::ColdAlpha,
        ParamId::LossRate,
        ParamId::Coupling,
        ParamId::Detuning,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamId::HotTemperature => "hot.temperature",
            ParamId::ColdTemperature => "cold.temperature",
            ParamId::HotMu => "hot.mu",
            ParamId::HotAlpha => "hot.alpha",
            ParamId::ColdAlpha => "cold.alpha",
            ParamId::LossRate => "engine.loss_rate",
            ParamId::Coupling => "engine.coupling",
            ParamId::Detuning => "engine.detuning",
        }
    }

    /// Whether the value is a temperature (K) rather than a rate (ps⁻¹).
    pub fn is_temperature(self) -> bool {
        matches!(self, ParamId::HotTemperature | ParamId::ColdTemperature)
    }

    pub fn get(self, s: &Scenario) -> f64 {
        match self {
            ParamId::HotTemperature => s.hot.temperature,
            ParamId::ColdTemperature => s.cold.temperature,
            ParamId::HotMu => s.hot.mu,
            ParamId::HotAlpha => s.hot.alpha,
            ParamId::ColdAlpha => s.cold.alpha,
            ParamId::LossRate => s.engine.loss_rate,
            ParamId::Coupling => s.engine.coupling,
            ParamId::Detuning => s.engine.detuning(),
        }
    }

    /// Detuning moves ω and keeps e2, e3 fixed.
    pub fn set(self, s: &mut Scenario, value: f64) {
        match self {
            ParamId::HotTemperature => s.hot.temperature = value,
            ParamId::ColdTemperature => s.cold.temperature = value,
            ParamId::HotMu => s.hot.mu = value,
            ParamId::HotAlpha => s.hot.alpha = value,
            ParamId::ColdAlpha => s.cold.alpha = value,
            ParamId::LossRate => s.engine.loss_rate = value,
            ParamId::Coupling => s.engine.coupling = value,
            ParamId::Detuning => s.engine = s.engine.with_detuning(value),
        }
    }

    pub fn applied(self, s: &Scenario, value: f64) -> Scenario {
        let mut out = *s;
        self.set(&mut out, value);
        out
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::invalid("sweep.param", format!("unknown parameter `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: ParamId,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    pub fn linear(param: ParamId, start: f64, stop: f64, count: usize) -> Self {
        Axis {
            param,
            start,
            stop,
            count,
            scale: Scale::Linear,
        }
    }

    pub fn log(param: ParamId, start: f64, stop: f64, count: usize) -> Self {
        Axis {
            scale: Scale::Log,
            ..Self::linear(param, start, stop, count)
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if self.count < 2 {
            return Err(Error::invalid(format!("{field}.count"), "need at least 2 points"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::invalid(format!("{field}.range"), "must be finite"));
        }
        if self.scale == Scale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(Error::invalid(
                format!("{field}.range"),
                "log axes need positive endpoints",
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }
}

/// Per-point outputs beyond the condensate occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    NetPower,
    NetEfficiency,
    Power,
    #[serde(rename = "qh_dot")]
    HeatFromHot,
    Inversion,
    Residual,
    EtaCarnot,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::NetPower,
        Quantity::NetEfficiency,
        Quantity::Power,
        Quantity::HeatFromHot,
        Quantity::Inversion,
        Quantity::Residual,
        Quantity::EtaCarnot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::NetPower => "net_power",
            Quantity::NetEfficiency => "net_efficiency",
            Quantity::Power => "power",
            Quantity::HeatFromHot => "qh_dot",
            Quantity::Inversion => "inversion",
            Quantity::Residual => "residual",
            Quantity::EtaCarnot => "eta_carnot",
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::invalid("sweep.quantities", format!("unknown quantity `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis1: Axis,
    /// Absent for one-dimensional ramps.
    pub axis2: Option<Axis>,
    pub quantities: Vec<Quantity>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.axis1.validate("sweep.axis1")?;
        if let Some(a) = &self.axis2 {
            a.validate("sweep.axis2")?;
            if a.param == self.axis1.param {
                return Err(Error::invalid("sweep.axis2.param", "duplicates axis1"));
            }
        }
        Ok(())
    }

    /// Scenario at every grid point, axis1 outermost.
    pub fn points(&self, base: &Scenario) -> Vec<([f64; 2], Scenario)> {
        let v1 = self.axis1.values();
        let v2 = self.axis2.map(|a| a.values());
        let mut out = Vec::new();
        for &x in &v1 {
            let s1 = self.axis1.param.applied(base, x);
            match (&self.axis2, &v2) {
                (Some(a2), Some(v2)) => {
                    out.extend(v2.iter().map(|&y| ([x, y], a2.param.applied(&s1, y))))
                }
                _ => out.push(([x, f64::NAN], s1)),
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointData {
    pub condensed: bool,
    pub n_c: f64,
    pub threshold_exceeded: bool,
    pub transition_order: TransitionOrder,
    pub bistable: bool,
    pub positivity_flag: bool,
    /// In the order requested by the sweep; absent values are undefined
    /// (e.g. efficiency with zero heat flow).
    pub quantities: Vec<(Quantity, Option<f64>)>,
}

impl PointData {
    pub fn quantity(&self, q: Quantity) -> Option<f64> {
        self.quantities.iter().find(|(k, _)| *k == q).and_then(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    /// Axis values; the second is NaN for one-dimensional ramps.
    pub coords: [f64; 2],
    pub outcome: std::result::Result<PointData, Error>,
}

impl PhasePoint {
    pub fn condensed(&self) -> Option<bool> {
        self.outcome.as_ref().ok().map(|d| d.condensed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub spec: SweepSpec,
    /// Row-major with axis1 outermost.
    pub points: Vec<PhasePoint>,
}

/// A grid cell edge across which the condensed indicator flips.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCrossing {
    pub row: usize,
    /// Value along axis2 (NaN for ramps).
    pub fixed: f64,
    pub normal_at: f64,
    pub condensed_at: f64,
}

impl PhaseDiagram {
    pub fn shape(&self) -> (usize, usize) {
        (self.spec.axis1.count, self.spec.axis2.map_or(1, |a| a.count))
    }

    pub fn at(&self, i1: usize, i2: usize) -> &PhasePoint {
        &self.points[i1 * self.shape().1 + i2]
    }

    pub fn failures(&self) -> impl Iterator<Item = (&PhasePoint, &Error)> {
        self.points
            .iter()
            .filter_map(|p| p.outcome.as_ref().err().map(|e| (p, e)))
    }

    /// Adjacent points along axis1 with opposite condensed indicators.
    pub fn crossings(&self) -> Vec<GridCrossing> {
        let (n1, n2) = self.shape();
        let mut out = Vec::new();
        for i2 in 0..n2 {
            for i1 in 0..n1 - 1 {
                let (a, b) = (self.at(i1, i2), self.at(i1 + 1, i2));
                match (a.condensed(), b.condensed()) {
                    (Some(ca), Some(cb)) if ca != cb => {
                        let (normal, cond) = if ca { (b, a) } else { (a, b) };
                        out.push(GridCrossing {
                            row: i2,
                            fixed: a.coords[1],
                            normal_at: normal.coords[0],
                            condensed_at: cond.coords[0],
                        })
                    }
                    _ => {}
                }
            }
        }
        out
    }
}

/// Solves with N_max widened ×100 until the bracket closes.
pub fn solve_condensate_auto(scenario: &Scenario, grid: &GridSpec) -> Result<CondensateSolution> {
    let mut grid = *grid;
    loop {
        match solve_condensate(scenario, &grid) {
            Err(Error::Bracket { .. }) if grid.n_max * 100.0 <= N_MAX_CEILING => {
                grid.n_max *= 100.0;
            }
            other => return other,
        }
    }
}

pub fn evaluate_point(
    scenario: &Scenario,
    grid: &GridSpec,
    quantities: &[Quantity],
) -> Result<PointData> {
    let sol = solve_condensate_auto(scenario, grid)?;
    let root = sol.stable_root().copied();
    let report = root.and_then(|r| r.report);
    let n_c = sol.occupation();
    let condensed = n_c > 0.0;
    let rho = match &report {
        Some(r) => r.rho,
        None => undriven_state(scenario)?,
    };
    let net = report.as_ref().map(net_power_and_efficiency);
    let eta_carnot = 1.0 - scenario.cold.temperature / scenario.hot.temperature;
    let values = quantities
        .iter()
        .map(|&q| {
            let v = match (q, condensed) {
                (Quantity::NetPower, true) => net.map(|n| n.net_power),
                (Quantity::NetEfficiency, true) => net.and_then(|n| n.net_efficiency),
                (Quantity::Power, true) => report.map(|r| r.power_w),
                (Quantity::HeatFromHot, true) => report.map(|r| r.qh_dot),
                (Quantity::Residual, true) => report.map(|r| r.first_law_residual),
                (Quantity::NetPower | Quantity::Power | Quantity::HeatFromHot, false) => Some(0.0),
                (Quantity::Residual, false) => Some(0.0),
                (Quantity::NetEfficiency, false) => None,
                (Quantity::Inversion, _) => inversion_ratio(&rho),
                (Quantity::EtaCarnot, _) => Some(eta_carnot),
            };
            (q, v)
        })
        .collect();
    Ok(PointData {
        condensed,
        n_c,
        threshold_exceeded: sol.threshold_exceeded,
        transition_order: sol.transition_order_hint,
        bistable: sol.bistable(),
        positivity_flag: report.is_some_and(|r| r.positivity_flag),
        quantities: values,
    })
}

/// Ω = 0 state from the Lamb populations.
fn undriven_state(scenario: &Scenario) -> Result<DensityMatrix3> {
    Ok(DensityMatrix3::from_populations(lamb_limit(scenario)?.populations()?))
}

/// Evaluates every grid point concurrently; failures are stored in place.
pub fn sweep(spec: &SweepSpec, base: &Scenario, grid: &GridSpec) -> Result<PhaseDiagram> {
    spec.validate()?;
    grid.validate()?;
    let points = spec
        .points(base)
        .into_par_iter()
        .map(|(coords, s)| PhasePoint {
            coords,
            outcome: s
                .validate()
                .and_then(|_| evaluate_point(&s, grid, &spec.quantities)),
        })
        .collect();
    Ok(PhaseDiagram {
        spec: spec.clone(),
        points,
    })
}

/// T_h(T_c) = T_c (e3 − μ)/e2, where the entropy changes of both baths balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReversibleLine {
    pub slope: f64,
}

impl ReversibleLine {
    pub fn hot_temperature(&self, cold_temperature: f64) -> f64 {
        self.slope * cold_temperature
    }
}

pub fn reversible_line(scenario: &Scenario) -> Result<ReversibleLine> {
    let e = &scenario.engine;
    if !(e.e2 > 0.0) {
        return Err(Error::invalid("engine.e2", "must be positive"));
    }
    Ok(ReversibleLine {
        slope: (e.e3 - scenario.hot.mu) / e.e2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Continuous,
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub cold_temperature: f64,
    /// Where M·R′(0) = γ.
    pub hot_temperature: f64,
    pub kind: BoundaryKind,
    /// Onset of a nonzero stable root, when it differs from the linear
    /// threshold.
    pub first_order_hot_temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmittedPoint {
    pub cold_temperature: f64,
    pub reason: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseBoundary {
    pub points: Vec<BoundaryPoint>,
    pub omitted: Vec<OmittedPoint>,
}

/// Bisects a sign change of `f` on [lo, hi].
pub fn bisect(
    mut lo: f64,
    mut hi: f64,
    f: impl Fn(f64) -> Result<bool>,
) -> Result<f64> {
    let f_lo = f(lo)?;
    if f_lo == f(hi)? {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut iterations = 0;
    while iterations < BOUNDARY_BISECTIONS
        || (hi - lo) > BOUNDARY_RELATIVE_TOLERANCE * lo.abs().max(hi.abs())
    {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? == f_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(0.5 * (lo + hi))
}

/// Linear threshold condition M·R′(0) > γ.
pub fn above_linear_threshold(scenario: &Scenario) -> Result<bool> {
    let e = &scenario.engine;
    Ok(e.replicas as f64 * gain_slope(scenario)? > e.loss_rate)
}

/// Phase boundary T_h(T_c) for each cold temperature.
///
/// Bisects M·R′(0) = γ in T_h; where the solver suspects a first-order
/// transition just above that point, the onset of a nonzero stable root is
/// bisected as well.
pub fn phase_boundary_t(
    base: &Scenario,
    cold_temperatures: &[f64],
    hot_bracket: (f64, f64),
    grid: &GridSpec,
) -> PhaseBoundary {
    let results: Vec<_> = cold_temperatures
        .par_iter()
        .map(|&tc| (tc, boundary_point(base, tc, hot_bracket, grid)))
        .collect();
    let mut out = PhaseBoundary::default();
    for (tc, r) in results {
        match r {
            Ok(p) => out.points.push(p),
            Err(reason) => out.omitted.push(OmittedPoint {
                cold_temperature: tc,
                reason,
            }),
        }
    }
    out
}

fn boundary_point(
    base: &Scenario,
    tc: f64,
    (lo, hi): (f64, f64),
    grid: &GridSpec,
) -> Result<BoundaryPoint> {
    let at = |th: f64| {
        let mut s = *base;
        s.cold.temperature = tc;
        s.hot.temperature = th;
        s
    };
    let th = bisect(lo, hi, |th| above_linear_threshold(&at(th)))?;
    let probe = |th: f64| solve_condensate_auto(&at(th), grid);
    let suspected = [th * (1.0 - 1e-3), th * (1.0 + 1e-3)]
        .into_iter()
        .filter(|t| *t > lo && *t < hi)
        .map(probe)
        .collect::<Result<Vec<_>>>()?
        .iter()
        .any(|s| s.transition_order_hint == TransitionOrder::FirstOrderSuspected);
    if !suspected {
        return Ok(BoundaryPoint {
            cold_temperature: tc,
            hot_temperature: th,
            kind: BoundaryKind::Continuous,
            first_order_hot_temperature: None,
        });
    }
    let onset = bisect(lo, hi, |t| Ok(probe(t)?.condensed()))?;
    Ok(BoundaryPoint {
        cold_temperature: tc,
        hot_temperature: th,
        kind: BoundaryKind::FirstOrder,
        first_order_hot_temperature: Some(onset),
    })
}

/// Condensation diagram over (T_x, T_ph) = (hot, cold) temperatures in the
/// regime μ > ω, with the reversible slope for overlay.
#[derive(Debug, Clone, PartialEq)]
pub struct RefrigeratorDiagram {
    pub diagram: PhaseDiagram,
    pub reversible: ReversibleLine,
}

pub fn refrigerator_diagram(
    base: &Scenario,
    hot_axis: (f64, f64, usize),
    cold_axis: (f64, f64, usize),
    quantities: Vec<Quantity>,
    grid: &GridSpec,
) -> Result<RefrigeratorDiagram> {
    if !(base.hot.mu > base.engine.omega) {
        return Err(Error::invalid(
            "hot.mu",
            "refrigerator regime needs mu above omega",
        ));
    }
    let spec = SweepSpec {
        axis1: Axis::linear(ParamId::HotTemperature, hot_axis.0, hot_axis.1, hot_axis.2),
        axis2: Some(Axis::linear(
            ParamId::ColdTemperature,
            cold_axis.0,
            cold_axis.1,
            cold_axis.2,
        )),
        quantities,
    };
    Ok(RefrigeratorDiagram {
        diagram: sweep(&spec, base, grid)?,
        reversible: reversible_line(base)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mev;
    use approx::assert_relative_eq;

    #[test]
    fn param_round_trip() {
        for p in ParamId::ALL {
            assert_eq!(p.name().parse::<ParamId>().unwrap(), p);
            let s = p.applied(&Scenario::gaas(), 0.25);
            assert_relative_eq!(p.get(&s), 0.25, max_relative = 1e-12);
        }
        assert!("hot.nonsense".parse::<ParamId>().is_err());
    }

    #[test]
    fn axis_values() {
        let a = Axis::linear(ParamId::HotTemperature, 10.0, 20.0, 3);
        assert_eq!(a.values(), vec![10.0, 15.0, 20.0]);
        let l = Axis::log(ParamId::LossRate, 1e-4, 1.0, 5).values();
        assert_relative_eq!(l[2], 1e-2, max_relative = 1e-12);
        assert!(Axis::linear(ParamId::LossRate, 0.0, 1.0, 1).validate("x").is_err());
        assert!(Axis::log(ParamId::LossRate, 0.0, 1.0, 3).validate("x").is_err());
    }

    #[test]
    fn reversible_slopes() {
        let mut s = Scenario::gaas();
        assert_relative_eq!(reversible_line(&s).unwrap().slope, 2.6, max_relative = 1e-12);
        s.hot.mu = s.engine.e3;
        assert_eq!(reversible_line(&s).unwrap().slope, 0.0);
        s.hot.mu = s.engine.e3 - s.engine.e2;
        assert_relative_eq!(reversible_line(&s).unwrap().slope, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn bisection_needs_sign_change() {
        let root = bisect(0.0, 4.0, |x| Ok(x > 1.5)).unwrap();
        assert!((root - 1.5).abs() < 1e-3);
        assert!(matches!(bisect(0.0, 1.0, |_| Ok(true)), Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn boundary_above_reversible_line() {
        let s = Scenario::gaas();
        let b = phase_boundary_t(&s, &[10.0, 5.0], (11.0, 300.0), &GridSpec::default());
        assert!(b.omitted.is_empty());
        for p in &b.points {
            assert_eq!(p.kind, BoundaryKind::Continuous);
            assert!(p.hot_temperature > 2.6 * p.cold_temperature);
        }
        let none = phase_boundary_t(&s, &[10.0], (100.0, 300.0), &GridSpec::default());
        assert_eq!(none.omitted.len(), 1);
    }

    #[test]
    fn on_reversible_line_is_normal() {
        let mut s = Scenario::gaas();
        s.hot.temperature = reversible_line(&s).unwrap().hot_temperature(s.cold.temperature);
        let p = evaluate_point(&s, &GridSpec::default(), &[Quantity::NetPower]).unwrap();
        assert!(!p.condensed);
        assert_eq!(p.quantity(Quantity::NetPower), Some(0.0));
    }

    #[test]
    fn ramp_changes_phase_once() {
        let spec = SweepSpec {
            axis1: Axis::linear(ParamId::HotTemperature, 20.0, 120.0, 6),
            axis2: None,
            quantities: vec![Quantity::NetPower, Quantity::Residual],
        };
        let d = sweep(&spec, &Scenario::gaas(), &GridSpec::default()).unwrap();
        assert_eq!(d.failures().count(), 0);
        assert_eq!(d.crossings().len(), 1);
        let last = d.points.last().unwrap().outcome.as_ref().unwrap();
        assert!(last.condensed && last.quantity(Quantity::NetPower).unwrap() > 0.0);
    }

    #[test]
    fn refrigerator_requires_mu_above_omega() {
        let g = GridSpec::default();
        assert!(refrigerator_diagram(&Scenario::gaas(), (1.0, 2.0, 2), (1.0, 2.0, 2), vec![], &g).is_err());
        let mut s = Scenario::refrigerator();
        s.hot.mu = s.engine.omega;
        let spec = SweepSpec {
            axis1: Axis::linear(ParamId::HotTemperature, 100.0, 300.0, 3),
            axis2: Some(Axis::linear(ParamId::ColdTemperature, 5.0, 15.0, 2)),
            quantities: vec![Quantity::NetPower],
        };
        let d = sweep(&spec, &s, &g).unwrap();
        assert!(d.points.iter().any(|p| p.condensed() == Some(true)));
        for p in &d.points {
            assert_eq!(p.outcome.as_ref().unwrap().quantity(Quantity::NetPower), Some(0.0));
        }
        assert!(mev(1.0) > 0.0);
    }
}
