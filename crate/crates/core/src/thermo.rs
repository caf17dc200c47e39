//! Energy currents, power and efficiencies of a steady state.
//!
//! Currents are oriented out of the working medium: `power_w` flows into the
//! condensate, `qc_dot` into the cold bath and `eh_dot` into the hot bath, so
//! the first law reads W + Q_c + E_h = 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::liouville::{rates_rotating, BathRates, DensityMatrix3, POSITIVITY_TOLERANCE};
use crate::model::{DressedFrame, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    IntoBath,
    OutOfBath,
    Zero,
}

impl Orientation {
    fn of(current: f64) -> Self {
        if current > 0.0 {
            Orientation::IntoBath
        } else if current < 0.0 {
            Orientation::OutOfBath
        } else {
            Orientation::Zero
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateReport {
    pub rho: DensityMatrix3,
    pub frame: DressedFrame,
    pub rates: BathRates,
    /// ω Ω Im ρ₃₂, power delivered to the condensate.
    pub power_w: f64,
    /// ẽ₃R^c₃ + ẽ₂R^c₂
    pub qc_dot: f64,
    /// (ẽ₃+ω)R^h₃ + (ẽ₂+ω)R^h₂
    pub eh_dot: f64,
    /// Heat drawn from the hot bath, −E_h − μR.
    pub qh_dot: f64,
    /// Chemical work μR supplied by the pump.
    pub work_in_dot: f64,
    /// |W + Q_c + E_h| / max(|W|, |Q_c|, |E_h|)
    pub first_law_residual: f64,
    pub min_eigenvalue: f64,
    /// Set when ρ has an eigenvalue below −1e-8.
    pub positivity_flag: bool,
    pub qc_orientation: Orientation,
    pub eh_orientation: Orientation,
}

impl SteadyStateReport {
    /// W + Q_c + E_h
    pub fn energy_balance(&self) -> f64 {
        self.power_w + self.qc_dot + self.eh_dot
    }

    /// ẽ₂(R^c₂ + R^h₂) + ẽ₃(R^c₃ + R^h₃), which equals the energy balance
    /// once R = R^h.
    pub fn dressed_balance(&self) -> f64 {
        let r = &self.rates;
        self.frame.e2_tilde * (r.rc2 + r.rh2) + self.frame.e3_tilde * (r.rc3 + r.rh3)
    }
}

pub fn currents(
    rho: &DensityMatrix3,
    frame: &DressedFrame,
    scenario: &Scenario,
) -> Result<SteadyStateReport> {
    let rates = rates_rotating(rho, frame, &scenario.cold, &scenario.hot)?;
    let power_w = frame.omega * rates.r;
    let qc_dot = frame.e3_tilde * rates.rc3 + frame.e2_tilde * rates.rc2;
    let eh_dot = frame.e3_tilde_hot * rates.rh3 + frame.e2_tilde_hot * rates.rh2;
    let work_in_dot = scenario.hot.mu * rates.r;
    let qh_dot = -eh_dot - work_in_dot;
    let scale = power_w
        .abs()
        .max(qc_dot.abs())
        .max(eh_dot.abs())
        .max(f64::MIN_POSITIVE);
    let min_eigenvalue = rho.min_eigenvalue();
    Ok(SteadyStateReport {
        rho: *rho,
        frame: *frame,
        rates,
        power_w,
        qc_dot,
        eh_dot,
        qh_dot,
        work_in_dot,
        first_law_residual: (power_w + qc_dot + eh_dot).abs() / scale,
        min_eigenvalue,
        positivity_flag: min_eigenvalue < -POSITIVITY_TOLERANCE,
        qc_orientation: Orientation::of(qc_dot),
        eh_orientation: Orientation::of(eh_dot),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Efficiency {
    pub eta: f64,
    pub eta_carnot: f64,
}

/// η = (ω − μ)/(e3 − μ) for the resonant engine, with η_C = 1 − T_c/T_h.
pub fn efficiency_analytic(scenario: &Scenario) -> Result<Efficiency> {
    let e = &scenario.engine;
    let mu = scenario.hot.mu;
    let heat = e.e3 - mu;
    if heat == 0.0 {
        return Err(Error::Domain {
            quantity: "e3 - mu",
            value: heat,
            reason: "heat input per cycle vanishes",
        });
    }
    Ok(Efficiency {
        eta: (e.omega - mu) / heat,
        eta_carnot: 1.0 - scenario.cold.temperature / scenario.hot.temperature,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetPerformance {
    /// (ω − μ)R
    pub net_power: f64,
    /// −(P_out − P_in)/Q_h with Q_h the heat flowing into the hot bath;
    /// positive when the engine converts heat to work.
    pub net_efficiency: Option<f64>,
    pub net_efficiency_abs: Option<f64>,
}

pub fn net_power_and_efficiency(report: &SteadyStateReport) -> NetPerformance {
    let net_power = report.power_w - report.work_in_dot;
    let heat_into_hot = -report.qh_dot;
    let net_efficiency = (heat_into_hot != 0.0).then(|| -net_power / heat_into_hot);
    NetPerformance {
        net_power,
        net_efficiency,
        net_efficiency_abs: net_efficiency.map(f64::abs),
    }
}

/// ρ₃₃/ρ₂₂, absent when ρ₂₂ vanishes.
pub fn inversion_ratio(rho: &DensityMatrix3) -> Option<f64> {
    let p2 = rho.population(2);
    (p2 != 0.0).then(|| rho.population(3) / p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::{assemble_generator, steady_state};
    use crate::model::{ev, mev};
    use approx::assert_relative_eq;

    #[test]
    fn analytic_efficiency_examples() {
        let mut s = Scenario::gaas();
        let eff = efficiency_analytic(&s).unwrap();
        assert_relative_eq!(eff.eta, 8.0 / 13.0, max_relative = 1e-10);
        assert_relative_eq!(eff.eta_carnot, 0.95, max_relative = 1e-15);
        s.hot.mu = s.engine.omega;
        assert_eq!(efficiency_analytic(&s).unwrap().eta, 0.0);
        s.hot.mu = s.engine.e3;
        assert!(efficiency_analytic(&s).is_err());
        assert_relative_eq!(s.engine.omega, ev(1.0));
    }

    #[test]
    fn stalled_cycle_has_no_currents() {
        let s = Scenario::gaas();
        let g = assemble_generator(&s, 0.0).unwrap();
        let rho = steady_state(&g).unwrap();
        let rep = currents(&rho, &g.frame, &s).unwrap();
        assert_eq!(rep.power_w, 0.0);
        assert!(rep.qc_dot.abs() < 1e-12);
        assert!(rep.eh_dot.abs() < 1e-9);
        assert!(rep.rates.r == 0.0);
    }

    #[test]
    fn zero_drive_inversion_matches_boltzmann_factors() {
        let s = Scenario::gaas();
        let rho = steady_state(&assemble_generator(&s, 0.0).unwrap()).unwrap();
        let units = crate::UnitSystem::standard();
        let bh = 1.0 / units.thermal_energy(s.hot.temperature);
        let bc = 1.0 / units.thermal_energy(s.cold.temperature);
        let want = (-bh * (s.engine.e3 - s.hot.mu) + bc * s.engine.e2).exp();
        assert_relative_eq!(inversion_ratio(&rho).unwrap(), want, max_relative = 1e-9);
        assert!(want > 1.0);
    }

    #[test]
    fn equal_temperatures_no_inversion_ratio() {
        let mut s = Scenario::gaas();
        s.hot.mu = 0.0;
        s.hot.temperature = s.cold.temperature;
        s.hot.center_or_edge = s.engine.e3 - mev(1.0);
        let rho = steady_state(&assemble_generator(&s, 0.0).unwrap()).unwrap();
        assert!(inversion_ratio(&rho).unwrap() < 1.0);
        let empty = DensityMatrix3::ground();
        assert_eq!(inversion_ratio(&empty), None);
    }

    #[test]
    fn driven_engine_signs_and_first_law() {
        let s = Scenario::gaas();
        let g = assemble_generator(&s, 1.0).unwrap();
        let rho = steady_state(&g).unwrap();
        let rep = currents(&rho, &g.frame, &s).unwrap();
        assert!(rep.rates.r > 0.0);
        assert!(rep.power_w > 0.0 && rep.qh_dot > 0.0);
        assert_eq!(rep.eh_orientation, Orientation::OutOfBath);
        assert_eq!(rep.qc_orientation, Orientation::IntoBath);
        let scale = rep.power_w.abs().max(rep.eh_dot.abs());
        assert!((rep.energy_balance() - rep.dressed_balance()).abs() < 1e-10 * scale);
        let net = net_power_and_efficiency(&rep);
        assert!(net.net_power > 0.0);
        assert!(net.net_efficiency.unwrap() > 0.0);
    }
}
