//! Parameters of the three-level working medium and its two reservoirs.
//!
//! Every energy and frequency is stored as an angular frequency in ps⁻¹
//! (ħ = 1). Temperatures stay in kelvin and are converted to ps⁻¹ through
//! [`UnitSystem::thermal_energy`] only where an occupation is evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ħ in meV·ps.
pub const HBAR_MEV_PS: f64 = 0.6582119569;
/// Boltzmann constant in meV/K.
pub const KB_MEV_PER_K: f64 = 0.08617333262;

/// Occupations are set to zero once (E - μ)/kT exceeds this.
const BOLTZMANN_CUTOFF: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// meV·ps
    pub hbar: f64,
    /// ps⁻¹ per K
    pub kb_over_hbar: f64,
    /// ps⁻¹ per meV
    pub mev_to_psinv: f64,
}

impl UnitSystem {
    pub fn standard() -> Self {
        let units = UnitSystem {
            hbar: HBAR_MEV_PS,
            kb_over_hbar: KB_MEV_PER_K / HBAR_MEV_PS,
            mev_to_psinv: 1.0 / HBAR_MEV_PS,
        };
        assert!((units.mev_to_psinv - 1.519_267).abs() < 1e-6);
        assert!((units.kb_over_hbar - 0.130_920).abs() < 1e-6);
        units
    }

    pub fn from_mev(&self, mev: f64) -> f64 {
        mev * self.mev_to_psinv
    }

    pub fn from_ev(&self, ev: f64) -> f64 {
        1e3 * ev * self.mev_to_psinv
    }

    pub fn to_mev(&self, psinv: f64) -> f64 {
        psinv * self.hbar
    }

    /// k_B T expressed in ps⁻¹.
    pub fn thermal_energy(&self, kelvin: f64) -> f64 {
        kelvin * self.kb_over_hbar
    }
}

/// Converts meV to ps⁻¹.
pub fn mev(x: f64) -> f64 {
    x / HBAR_MEV_PS
}

/// Converts eV to ps⁻¹.
pub fn ev(x: f64) -> f64 {
    1e3 * x / HBAR_MEV_PS
}

/// Energies of the working medium and its coupling to the condensate.
///
/// The ground level e1 is pinned at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub e2: f64,
    pub e3: f64,
    /// Condensate frequency ω.
    pub omega: f64,
    /// Pair-scattering strength g_c (ps⁻¹).
    pub coupling: f64,
    /// Condensate loss rate γ (ps⁻¹).
    pub loss_rate: f64,
    /// Number M of identical working media feeding the condensate.
    pub replicas: u64,
}

impl EngineParams {
    pub const E1: f64 = 0.0;

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("e2", self.e2),
            ("e3", self.e3),
            ("omega", self.omega),
            ("coupling", self.coupling),
            ("loss_rate", self.loss_rate),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(format!("engine.{field}"), "must be finite"));
            }
        }
        if self.e2 <= Self::E1 {
            return Err(Error::invalid("engine.e2", "must exceed e1 = 0"));
        }
        if self.e3 <= self.e2 {
            return Err(Error::invalid("engine.e3", "must exceed e2"));
        }
        if self.omega <= 0.0 {
            return Err(Error::invalid("engine.omega", "must be positive"));
        }
        if self.coupling <= 0.0 {
            return Err(Error::invalid("engine.coupling", "must be positive"));
        }
        if self.loss_rate < 0.0 {
            return Err(Error::invalid("engine.loss_rate", "must be non-negative"));
        }
        if self.replicas == 0 {
            return Err(Error::invalid("engine.replicas", "must be at least 1"));
        }
        Ok(())
    }

    /// Δ = (e3 − e2) − ω.
    pub fn detuning(&self) -> f64 {
        let d = (self.e3 - self.e2) - self.omega;
        // Differences below the resolution of e3 are rounding noise; a signed
        // zero here would flip the mixing angle between 0 and π.
        if d.abs() <= 4.0 * f64::EPSILON * self.e3.abs().max(self.omega.abs()) {
            0.0
        } else {
            d
        }
    }

    /// Moves ω so that the detuning equals `delta`, keeping e2 and e3.
    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.omega = (self.e3 - self.e2) - delta;
        self
    }

    pub fn rabi(&self, population: f64) -> Result<f64> {
        rabi_from_population(self.coupling, population)
    }
}

/// Ω = 2 g_c √N for a condensate of N particles.
pub fn rabi_from_population(coupling: f64, population: f64) -> Result<f64> {
    if !(population >= 0.0) {
        return Err(Error::Domain {
            quantity: "condensate population",
            value: population,
            reason: "must be non-negative",
        });
    }
    Ok(2.0 * coupling * population.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BathKind {
    /// (α/2) / ((x − center)² + width²)
    LorentzianCold,
    /// α Θ(x − edge), closed at the edge.
    StepHot,
    /// Constant α.
    Flat,
}

/// One bosonic reservoir: spectral density shape plus thermal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub kind: BathKind,
    pub alpha: f64,
    /// Lorentzian center or step edge; ignored for [`BathKind::Flat`].
    pub center_or_edge: f64,
    /// Lorentzian half-width; ignored otherwise.
    pub width: f64,
    /// Kelvin.
    pub temperature: f64,
    /// Chemical potential (zero for the phonon bath).
    pub mu: f64,
}

/// Spectral weight and occupation of a bath at one transition energy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BathSample {
    pub j: f64,
    pub n: f64,
}

impl BathSample {
    /// J·n, the absorption weight.
    pub fn up(&self) -> f64 {
        self.j * self.n
    }

    /// J·(1+n), the emission weight.
    pub fn down(&self) -> f64 {
        self.j * (1.0 + self.n)
    }
}

impl BathSpec {
    pub fn lorentzian(alpha: f64, center: f64, width: f64, temperature: f64) -> Self {
        BathSpec {
            kind: BathKind::LorentzianCold,
            alpha,
            center_or_edge: center,
            width,
            temperature,
            mu: 0.0,
        }
    }

    pub fn step(alpha: f64, edge: f64, mu: f64, temperature: f64) -> Self {
        BathSpec {
            kind: BathKind::StepHot,
            alpha,
            center_or_edge: edge,
            width: 0.0,
            temperature,
            mu,
        }
    }

    pub fn flat(alpha: f64, temperature: f64) -> Self {
        BathSpec {
            kind: BathKind::Flat,
            alpha,
            center_or_edge: 0.0,
            width: 0.0,
            temperature,
            mu: 0.0,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let field = |f: &str| format!("{name}.{f}");
        for (f, v) in [
            ("alpha", self.alpha),
            ("center_or_edge", self.center_or_edge),
            ("width", self.width),
            ("temperature", self.temperature),
            ("mu", self.mu),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(field(f), "must be finite"));
            }
        }
        if !(self.temperature > 0.0) {
            return Err(Error::invalid(field("temperature"), "must be positive"));
        }
        if self.alpha < 0.0 {
            return Err(Error::invalid(field("alpha"), "must be non-negative"));
        }
        match self.kind {
            BathKind::LorentzianCold if !(self.width > 0.0) => {
                Err(Error::invalid(field("width"), "must be positive"))
            }
            BathKind::StepHot if !(self.mu < self.center_or_edge) => Err(Error::invalid(
                field("mu"),
                "must lie below the step edge",
            )),
            _ => Ok(()),
        }
    }

    /// J(x), evaluated literally for every x.
    pub fn spectral_density(&self, x: f64) -> f64 {
        match self.kind {
            BathKind::LorentzianCold => {
                let d = x - self.center_or_edge;
                0.5 * self.alpha / (d * d + self.width * self.width)
            }
            BathKind::StepHot => {
                if x >= self.center_or_edge {
                    self.alpha
                } else {
                    0.0
                }
            }
            BathKind::Flat => self.alpha,
        }
    }

    /// Bose occupation n(E) = 1/(exp((E − μ)/kT) − 1).
    pub fn occupation(&self, energy: f64) -> Result<f64> {
        let units = UnitSystem::standard();
        let excess = energy - self.mu;
        if !(excess > 0.0) {
            return Err(Error::Domain {
                quantity: "bath occupation energy",
                value: energy,
                reason: "must exceed the chemical potential",
            });
        }
        let x = excess / units.thermal_energy(self.temperature);
        if x > BOLTZMANN_CUTOFF {
            return Ok(0.0);
        }
        Ok(1.0 / x.exp_m1())
    }

    /// Whether the bath has modes at transition energy `x`.
    ///
    /// The step bath only has modes at or above its edge. Continuous baths
    /// have modes above their chemical potential; a phonon bath (μ = 0) also
    /// absorbs at negative transition energies.
    pub fn supports(&self, x: f64) -> bool {
        match self.kind {
            BathKind::StepHot => x >= self.center_or_edge,
            BathKind::LorentzianCold | BathKind::Flat => {
                x > self.mu || (self.mu == 0.0 && x < 0.0)
            }
        }
    }

    /// J and n at a transition energy; both vanish off the mode support.
    ///
    /// Negative energies of a phonon bath use J(−x) = −J(x) and
    /// n(−x) = −(1 + n(x)), so absorption and emission swap roles.
    pub fn sample(&self, x: f64) -> Result<BathSample> {
        if !self.supports(x) {
            return Ok(BathSample::default());
        }
        if x < self.mu {
            let mirror = self.sample(-x)?;
            return Ok(BathSample {
                j: -mirror.j,
                n: -(1.0 + mirror.n),
            });
        }
        let j = self.spectral_density(x);
        if j == 0.0 {
            return Ok(BathSample::default());
        }
        Ok(BathSample {
            j,
            n: self.occupation(x)?,
        })
    }
}

/// Eigenbasis of the rotating-frame Hamiltonian at a given Rabi coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedFrame {
    /// Mixing angle, tan θ = Ω/Δ, in [0, π].
    pub theta: f64,
    /// Splitting Λ = √(Δ² + Ω²).
    pub lambda: f64,
    pub e2_tilde: f64,
    pub e3_tilde: f64,
    pub omega: f64,
    /// Rabi coupling Ω.
    pub rabi: f64,
    pub detuning: f64,
    /// ẽ₂ + ω, where the hot bath is sampled.
    pub e2_tilde_hot: f64,
    /// ẽ₃ + ω.
    pub e3_tilde_hot: f64,
}

impl DressedFrame {
    pub fn new(params: &EngineParams, rabi: f64) -> Result<Self> {
        if !(rabi >= 0.0) {
            return Err(Error::Domain {
                quantity: "Rabi coupling",
                value: rabi,
                reason: "must be non-negative",
            });
        }
        let delta = params.detuning();
        let lambda = delta.hypot(rabi);
        // Written around e2 and e3 so that Ω = 0 reproduces the bare levels
        // exactly, which matters at the closed step edge.
        Ok(DressedFrame {
            theta: rabi.atan2(delta),
            lambda,
            e2_tilde: params.e2 + 0.5 * (delta - lambda),
            e3_tilde: params.e2 + 0.5 * (delta + lambda),
            omega: params.omega,
            rabi,
            detuning: delta,
            e2_tilde_hot: params.e3 - 0.5 * (delta + lambda),
            e3_tilde_hot: params.e3 + 0.5 * (lambda - delta),
        })
    }

    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }

    pub fn sin_theta(&self) -> f64 {
        self.theta.sin()
    }
}

/// Engine plus both reservoirs: everything a steady state depends on
/// except the condensate population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub engine: EngineParams,
    pub cold: BathSpec,
    pub hot: BathSpec,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.engine.validate()?;
        self.cold.validate("cold")?;
        self.hot.validate("hot")?;
        if self.cold.mu != 0.0 {
            return Err(Error::invalid("cold.mu", "phonon bath has zero chemical potential"));
        }
        Ok(())
    }

    /// GaAs-microcavity values: e2 = 5 meV, e3 − e2 = 1 eV, Δ = 0,
    /// α_c = 0.1 ps⁻¹, g_ph = 1.7 ps⁻¹, T_c = 10 K, α_h = 0.2 ps⁻¹,
    /// E0 = 1 eV, E0 − μ = 8 meV, T_h = 200 K, γ = 1 ps⁻¹,
    /// g_c = 0.048 ps⁻¹, M = 10⁴.
    pub fn gaas() -> Self {
        let e2 = mev(5.0);
        let omega = ev(1.0);
        let e3 = mev(1005.0);
        let edge = ev(1.0);
        Scenario {
            engine: EngineParams {
                e2,
                e3,
                omega,
                coupling: 0.048,
                loss_rate: 1.0,
                replicas: 10_000,
            },
            cold: BathSpec::lorentzian(0.1, e2, 1.7, 10.0),
            hot: BathSpec::step(0.2, edge, mev(992.0), 200.0),
        }
    }

    /// Refrigerator regime: μ = 1.002 eV above ω = 1 eV. The step edge is
    /// placed 1 meV above μ so the upper level stays inside the pump band.
    pub fn refrigerator() -> Self {
        let mut s = Self::gaas();
        s.hot.mu = mev(1002.0);
        s.hot.center_or_edge = mev(1003.0);
        s
    }

    /// Detuned engine with the hot-bath edge shifted relative to e3.
    pub fn step_edge(detuning_mev: f64, edge_minus_e3_mev: f64) -> Self {
        let mut s = Self::gaas();
        s.engine = s.engine.with_detuning(mev(detuning_mev));
        s.hot.center_or_edge = mev(1005.0 + edge_minus_e3_mev);
        s.hot.mu = s.hot.center_or_edge - mev(8.0);
        s
    }

    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.engine = self.engine.with_detuning(delta);
        self
    }

    pub fn with_flat_cold(mut self) -> Self {
        let peak = self.cold.spectral_density(self.cold.center_or_edge);
        self.cold = BathSpec::flat(peak, self.cold.temperature);
        self
    }

    pub fn frame(&self, population: f64) -> Result<DressedFrame> {
        DressedFrame::new(&self.engine, self.engine.rabi(population)?)
    }
}
