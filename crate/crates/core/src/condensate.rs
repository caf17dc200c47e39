//! Gain curve R(N) and self-consistent condensate occupations.
//!
//! The condensate number obeys Ṅ = M·R(N) − γN. Fixed points are located
//! on a grid, refined by a bracketing solver, and classified by the sign of
//! the flow on either side.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liouville::{assemble_generator, lamb_limit, steady_state};
use crate::model::Scenario;
use crate::thermo::{currents, SteadyStateReport};

/// Occupation used for the forward-difference slope R′(0).
pub const SLOPE_STEP: f64 = 1e-6;
/// Relative width at which a bracketed root is accepted.
pub const ROOT_RELATIVE_TOLERANCE: f64 = 1e-8;
/// Fixed-point residual bound, relative to max(γN, γ).
pub const ROOT_RESIDUAL_TOLERANCE: f64 = 1e-8;
/// A step in R larger than this multiple of the secant prediction is a jump.
pub const JUMP_FACTOR: f64 = 10.0;

const MAX_REFINE_ITERATIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gain {
    pub n: f64,
    pub r: f64,
    /// Absent only at N = 0 when the undriven steady state is not unique.
    pub report: Option<SteadyStateReport>,
}

/// R = Ω Im ρ₃₂ at the steady state for occupation `n`.
pub fn gain_at(scenario: &Scenario, n: f64) -> Result<Gain> {
    if !(n >= 0.0 && n.is_finite()) {
        return Err(Error::Domain {
            quantity: "condensate occupation",
            value: n,
            reason: "must be finite and non-negative",
        });
    }
    let rabi = scenario.engine.rabi(n)?;
    let solved = assemble_generator(scenario, rabi).and_then(|g| {
        let rho = steady_state(&g)?;
        currents(&rho, &g.frame, scenario)
    });
    match solved {
        Ok(report) => Ok(Gain {
            n,
            r: report.rates.r,
            report: Some(report),
        }),
        Err(Error::DegenerateSteadyState { .. }) if n == 0.0 => Ok(Gain {
            n,
            r: 0.0,
            report: None,
        }),
        Err(e) => Err(e.at_occupation(n)),
    }
}

/// R′(0) by forward difference.
pub fn gain_slope(scenario: &Scenario) -> Result<f64> {
    Ok(gain_at(scenario, SLOPE_STEP)?.r / SLOPE_STEP)
}

/// Golden-rule gain 4g_c²N(ρ₃₃−ρ₂₂)/(γ↓c+γ↓h) from the Ω = 0 populations.
pub fn linear_gain(scenario: &Scenario, n: f64) -> Result<f64> {
    let lamb = lamb_limit(scenario)?;
    let g = scenario.engine.coupling;
    Ok(4.0 * g * g * n * lamb.inversion()? / lamb.linewidth())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdInversion {
    pub critical_inversion: f64,
    pub inversion: f64,
    pub exceeded: bool,
}

/// Critical inversion γ(γ↓c+γ↓h)/(4g_c²M) against the Ω = 0 inversion.
pub fn threshold_inversion(scenario: &Scenario) -> Result<ThresholdInversion> {
    let lamb = lamb_limit(scenario)?;
    let e = &scenario.engine;
    let critical_inversion =
        e.loss_rate * lamb.linewidth() / (4.0 * e.coupling * e.coupling * e.replicas as f64);
    let inversion = lamb.inversion()?;
    Ok(ThresholdInversion {
        critical_inversion,
        inversion,
        exceeded: inversion > critical_inversion,
    })
}

/// Occupation grid: N = 0, a linear prefix below `geometric_start`, then
/// geometric spacing up to `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub n_max: f64,
    pub points: usize,
    pub linear_prefix: usize,
    pub geometric_start: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_max: 1e7,
            points: 400,
            linear_prefix: 8,
            geometric_start: 1e-3,
        }
    }
}

impl GridSpec {
    pub fn with_n_max(mut self, n_max: f64) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.geometric_start > 0.0 && self.n_max > self.geometric_start) {
            return Err(Error::invalid(
                "grid.n_max",
                format!(
                    "need 0 < geometric start ({}) < n_max ({})",
                    self.geometric_start, self.n_max
                ),
            ));
        }
        if !self.n_max.is_finite() {
            return Err(Error::invalid("grid.n_max", "must be finite"));
        }
        if self.points < self.linear_prefix + 3 {
            return Err(Error::invalid(
                "grid.points",
                format!("need at least {} points", self.linear_prefix + 3),
            ));
        }
        Ok(())
    }

    pub fn nodes(&self) -> Vec<f64> {
        let geometric = self.points - self.linear_prefix - 1;
        let mut nodes = Vec::with_capacity(self.points);
        nodes.push(0.0);
        let step = self.geometric_start / (self.linear_prefix + 1) as f64;
        nodes.extend((1..=self.linear_prefix).map(|i| i as f64 * step));
        let ratio = (self.n_max / self.geometric_start).ln() / (geometric - 1) as f64;
        nodes.extend((0..geometric).map(|i| self.geometric_start * (ratio * i as f64).exp()));
        *nodes.last_mut().unwrap() = self.n_max;
        nodes
    }
}

/// A grid interval across which R jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discontinuity {
    pub n_lo: f64,
    pub n_hi: f64,
    pub r_lo: f64,
    pub r_hi: f64,
}

impl Discontinuity {
    pub fn is_rise(&self) -> bool {
        self.r_hi > self.r_lo
    }
}

/// Intervals whose change in R exceeds `JUMP_FACTOR` times the change
/// predicted by the preceding secant.
pub fn detect_discontinuities(n: &[f64], r: &[f64]) -> Vec<Discontinuity> {
    let r_scale = r.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let floor = 1e-6 * r_scale;
    let mut out = Vec::new();
    for i in 1..n.len().saturating_sub(1) {
        let slope = (r[i] - r[i - 1]) / (n[i] - n[i - 1]);
        let predicted = slope * (n[i + 1] - n[i]);
        let change = r[i + 1] - r[i];
        if change.abs() > floor && change.abs() > JUMP_FACTOR * predicted.abs() {
            out.push(Discontinuity {
                n_lo: n[i],
                n_hi: n[i + 1],
                r_lo: r[i],
                r_hi: r[i + 1],
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainCurve {
    pub n_grid: Vec<f64>,
    pub r_values: Vec<f64>,
    pub scenario: Scenario,
    pub discontinuities: Vec<Discontinuity>,
}

impl GainCurve {
    /// Index and value of the largest R.
    pub fn peak(&self) -> (usize, f64) {
        self.r_values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, r)| if r > best.1 { (i, r) } else { best })
    }
}

/// Evaluates `n_grid` in order, returning the first failure by grid position.
fn evaluate(scenario: &Scenario, n_grid: &[f64]) -> Result<Vec<Gain>> {
    n_grid
        .par_iter()
        .map(|&n| gain_at(scenario, n))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

pub fn gain_curve(scenario: &Scenario, n_grid: &[f64]) -> Result<GainCurve> {
    scenario.validate()?;
    if n_grid.first().is_some_and(|&n| n < 0.0) || n_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(
            "gain_curve.n_grid",
            "must be non-negative and strictly ascending",
        ));
    }
    let r_values: Vec<f64> = evaluate(scenario, n_grid)?.iter().map(|g| g.r).collect();
    Ok(GainCurve {
        discontinuities: detect_discontinuities(n_grid, &r_values),
        n_grid: n_grid.to_vec(),
        r_values,
        scenario: *scenario,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootKind {
    /// N = 0, a root for every parameter set.
    Origin,
    /// f changes sign continuously.
    Crossing,
    /// f changes sign across a discontinuity of R; not a true fixed point.
    Jump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionOrder {
    Continuous,
    FirstOrderSuspected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub n: f64,
    pub stable: bool,
    pub kind: RootKind,
    /// |M·R − γN| / max(γN, γ)
    pub residual: f64,
    pub report: Option<SteadyStateReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondensateSolution {
    pub roots: Vec<Root>,
    /// M·R′(0) > γ
    pub threshold_exceeded: bool,
    pub transition_order_hint: TransitionOrder,
    /// R′(0) from the forward difference.
    pub gain_slope: f64,
    pub curve: GainCurve,
}

impl CondensateSolution {
    /// Largest stable occupation, zero in the normal phase.
    pub fn occupation(&self) -> f64 {
        self.stable_root().map_or(0.0, |r| r.n)
    }

    /// The stable root with the largest N.
    pub fn stable_root(&self) -> Option<&Root> {
        self.roots.iter().rev().find(|r| r.stable)
    }

    pub fn condensed(&self) -> bool {
        self.occupation() > 0.0
    }

    pub fn nonzero_roots(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| r.kind != RootKind::Origin)
    }

    pub fn bistable(&self) -> bool {
        self.roots.iter().filter(|r| r.stable).count() >= 2
    }
}

struct Flow<'a> {
    scenario: &'a Scenario,
    m: f64,
    gamma: f64,
}

impl Flow<'_> {
    fn at(&self, n: f64) -> Result<f64> {
        Ok(self.of(n, gain_at(self.scenario, n)?.r))
    }

    fn of(&self, n: f64, r: f64) -> f64 {
        self.m * r - self.gamma * n
    }

    fn tolerance(&self, n: f64) -> f64 {
        ROOT_RESIDUAL_TOLERANCE * (self.gamma * n).max(self.gamma)
    }

    /// Illinois regula falsi with a forced bisection every third step.
    fn refine(&self, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> Result<(f64, RootKind)> {
        // True flow values at the bracket ends; fa/fb are Illinois-weighted.
        let (mut ta, mut tb) = (fa, fb);
        let mut side = 0i8;
        for iter in 0..MAX_REFINE_ITERATIONS {
            let (best, fbest) = if ta.abs() <= tb.abs() { (a, ta) } else { (b, tb) };
            if b - a <= ROOT_RELATIVE_TOLERANCE * b && fbest.abs() <= self.tolerance(best) {
                return Ok((best, RootKind::Crossing));
            }
            let mut x = if iter % 3 == 2 {
                0.5 * (a + b)
            } else {
                (a * fb - b * fa) / (fb - fa)
            };
            if !(x > a && x < b) {
                x = 0.5 * (a + b);
            }
            if !(x > a && x < b) {
                break;
            }
            let fx = self.at(x)?;
            if fx == 0.0 {
                return Ok((x, RootKind::Crossing));
            }
            if (fx > 0.0) == (fb > 0.0) {
                b = x;
                fb = fx;
                tb = fx;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            } else {
                a = x;
                fa = fx;
                ta = fx;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            }
        }
        let (best, fbest) = if ta.abs() <= tb.abs() { (a, ta) } else { (b, tb) };
        if fbest.abs() <= self.tolerance(best) {
            Ok((best, RootKind::Crossing))
        } else {
            Ok((0.5 * (a + b), RootKind::Jump))
        }
    }

    /// Sign of f′ by central difference; falls back to the bracket
    /// orientation when the difference is inconclusive.
    fn stable_at(&self, n: f64, rising_bracket: bool) -> bool {
        let h = 1e-6 * n;
        match (self.at(n + h), self.at(n - h)) {
            (Ok(hi), Ok(lo)) if hi != lo && (hi - lo).is_finite() => hi < lo,
            _ => !rising_bracket,
        }
    }
}

/// All fixed points of Ṅ = M·R(N) − γN on [0, N_max].
pub fn solve_condensate(scenario: &Scenario, grid: &GridSpec) -> Result<CondensateSolution> {
    scenario.validate()?;
    grid.validate()?;
    let flow = Flow {
        scenario,
        m: scenario.engine.replicas as f64,
        gamma: scenario.engine.loss_rate,
    };
    let nodes = grid.nodes();
    let gains = evaluate(scenario, &nodes)?;
    let r: Vec<f64> = gains.iter().map(|g| g.r).collect();
    let f: Vec<f64> = nodes.iter().zip(&r).map(|(&n, &r)| flow.of(n, r)).collect();
    let last = *f.last().unwrap();
    if last > 0.0 {
        return Err(Error::Bracket {
            n_max: grid.n_max,
            excess: last,
        });
    }

    let slope = gain_slope(scenario)?;
    let threshold_exceeded = flow.m * slope > flow.gamma;
    let mut roots = vec![Root {
        n: 0.0,
        stable: !threshold_exceeded,
        kind: RootKind::Origin,
        residual: 0.0,
        report: gains[0].report,
    }];
    for i in 1..nodes.len() - 1 {
        let (fa, fb) = (f[i], f[i + 1]);
        if fa == 0.0 {
            let stable = flow.stable_at(nodes[i], f[i - 1] < 0.0);
            roots.push(Root {
                n: nodes[i],
                stable,
                kind: RootKind::Crossing,
                residual: 0.0,
                report: gains[i].report,
            });
            continue;
        }
        if (fa > 0.0) == (fb > 0.0) || fb == 0.0 {
            continue;
        }
        let rising = fa < 0.0;
        let (n, kind) = flow.refine(nodes[i], fa, nodes[i + 1], fb)?;
        let gain = gain_at(scenario, n)?;
        let stable = match kind {
            RootKind::Crossing => flow.stable_at(n, rising),
            _ => !rising,
        };
        roots.push(Root {
            n,
            stable,
            kind,
            residual: flow.of(n, gain.r).abs() / (flow.gamma * n).max(flow.gamma),
            report: gain.report,
        });
    }

    let curve = GainCurve {
        discontinuities: detect_discontinuities(&nodes, &r),
        n_grid: nodes,
        r_values: r,
        scenario: *scenario,
    };
    let upper = roots.iter().rev().find(|r| r.stable).map_or(0.0, |r| r.n);
    let stable_nonzero = upper > 0.0;
    let superlinear = curve
        .n_grid
        .iter()
        .zip(&curve.r_values)
        .skip(1)
        .any(|(&n, &r)| flow.m * r > flow.gamma * n);
    let jump_onset = curve
        .discontinuities
        .iter()
        .any(|d| d.is_rise() && d.n_hi <= upper);
    let first_order =
        !threshold_exceeded && (stable_nonzero || superlinear) || jump_onset;
    Ok(CondensateSolution {
        roots,
        threshold_exceeded,
        transition_order_hint: if first_order {
            TransitionOrder::FirstOrderSuspected
        } else {
            TransitionOrder::Continuous
        },
        gain_slope: slope,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mev;
    use approx::assert_relative_eq;

    #[test]
    fn no_drive_no_gain() {
        let g = gain_at(&Scenario::gaas(), 0.0).unwrap();
        assert_eq!(g.r, 0.0);
        assert!(g.report.is_some());
        assert!(gain_at(&Scenario::gaas(), -1.0).is_err());
    }

    #[test]
    fn linear_gain_is_proportional() {
        let s = Scenario::gaas();
        let one = linear_gain(&s, 1.0).unwrap();
        assert_eq!(linear_gain(&s, 2.0).unwrap(), 2.0 * one);
        let lamb = lamb_limit(&s).unwrap();
        let want = 4.0 * 0.048f64.powi(2) * lamb.inversion().unwrap() / lamb.linewidth();
        assert_relative_eq!(one, want, max_relative = 1e-15);
    }

    #[test]
    fn small_drive_matches_golden_rule() {
        let s = Scenario::gaas();
        let lamb = lamb_limit(&s).unwrap();
        let rabi = 1e-3 * lamb.linewidth();
        let n = (rabi / (2.0 * s.engine.coupling)).powi(2);
        let exact = gain_at(&s, n).unwrap().r;
        assert_relative_eq!(exact, linear_gain(&s, n).unwrap(), max_relative = 1e-3);
    }

    #[test]
    fn critical_inversion_limits() {
        let mut s = Scenario::gaas();
        let base = threshold_inversion(&s).unwrap();
        assert!(base.exceeded);
        s.engine.loss_rate = 1e-12;
        assert!(threshold_inversion(&s).unwrap().critical_inversion < 1e-12);
        s.engine.loss_rate = 1.0;
        s.engine.replicas = u64::MAX;
        assert!(threshold_inversion(&s).unwrap().critical_inversion < 1e-14);
    }

    #[test]
    fn grid_layout() {
        let g = GridSpec::default();
        let nodes = g.nodes();
        assert_eq!(nodes.len(), 400);
        assert_eq!(nodes[0], 0.0);
        assert_eq!(nodes[9], 1e-3);
        assert_eq!(*nodes.last().unwrap(), 1e7);
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        assert!(GridSpec { points: 5, ..g }.validate().is_err());
    }

    #[test]
    fn jump_detector() {
        let n = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let smooth = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(detect_discontinuities(&n, &smooth).is_empty());
        let step = [0.0, 0.0, 0.0, 3.0, 3.0, 3.0];
        let d = detect_discontinuities(&n, &step);
        assert_eq!(d.len(), 1);
        assert!(d[0].is_rise() && d[0].n_lo == 2.0);
    }

    #[test]
    fn default_engine_condenses() {
        let s = Scenario::gaas();
        let sol = solve_condensate(&s, &GridSpec::default()).unwrap();
        assert!(sol.threshold_exceeded);
        assert!(!sol.roots[0].stable);
        let root = sol.stable_root().unwrap();
        assert!(root.n > 0.0);
        assert!(root.residual < ROOT_RESIDUAL_TOLERANCE);
        assert_eq!(sol.transition_order_hint, TransitionOrder::Continuous);
    }

    #[test]
    fn cold_pump_stays_normal() {
        let mut s = Scenario::gaas();
        s.hot.temperature = 20.0;
        let sol = solve_condensate(&s, &GridSpec::default()).unwrap();
        assert_eq!(sol.roots.len(), 1);
        assert!(sol.roots[0].stable);
        assert_eq!(sol.occupation(), 0.0);
        assert!(mev(1.0) > 0.0);
    }

    #[test]
    fn unclosed_bracket() {
        let s = Scenario::gaas();
        let grid = GridSpec::default().with_n_max(10.0);
        assert!(matches!(
            solve_condensate(&s, &grid),
            Err(Error::Bracket { .. })
        ));
    }
}
