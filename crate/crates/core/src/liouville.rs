//! Non-secular Born–Markov generator of the working medium in the rotating
//! basis (|1_R⟩, |2_R⟩, |3_R⟩), its steady state, and the bath rates.
//!
//! Matrices are indexed from zero: `entries[(1, 2)]` is ρ₂₃. Vectorization is
//! row-major, so ρ_ij sits at index `3 * i + j`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{BathSample, BathSpec, DressedFrame, EngineParams, Scenario};

pub type C64 = Complex64;
pub type Op9 = SMatrix<C64, 9, 9>;
pub type Vec9 = SVector<C64, 9>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Singular values below this fraction of the largest count as kernel.
const KERNEL_TOLERANCE: f64 = 1e-12;
const STEADY_RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Most negative eigenvalue tolerated before a state is flagged.
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Rotating,
    Dressed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3 {
    pub entries: Matrix3<C64>,
    pub basis: Basis,
}

impl DensityMatrix3 {
    pub fn new(entries: Matrix3<C64>, basis: Basis) -> Self {
        DensityMatrix3 { entries, basis }
    }

    /// Diagonal state in the rotating basis; populations are normalized.
    pub fn from_populations(p: [f64; 3]) -> Self {
        let total: f64 = p.iter().sum();
        let mut m = Matrix3::zeros();
        for (i, pi) in p.iter().enumerate() {
            m[(i, i)] = C64::new(pi / total, 0.0);
        }
        Self::new(m, Basis::Rotating)
    }

    /// |1⟩⟨1|
    pub fn ground() -> Self {
        Self::from_populations([1.0, 0.0, 0.0])
    }

    pub fn population(&self, level: usize) -> f64 {
        self.entries[(level - 1, level - 1)].re
    }

    /// ρ_ij with the one-based level labels used for the working medium.
    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.entries[(i - 1, j - 1)]
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.entries - self.entries.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol && (self.trace() - ONE).norm() <= tol
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        let h = (self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        let ev = h.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Real rotation taking rotating-basis components to dressed ones.
    fn rotation(frame: &DressedFrame) -> Matrix3<C64> {
        let (s, c) = (0.5 * frame.theta).sin_cos();
        Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c).map(|x| C64::new(x, 0.0))
    }

    /// ρ̃ = W ρ Wᵀ with |2̃⟩ = cos(θ/2)|2⟩ − sin(θ/2)|3⟩ and
    /// |3̃⟩ = sin(θ/2)|2⟩ + cos(θ/2)|3⟩.
    pub fn to_dressed(&self, frame: &DressedFrame) -> Self {
        debug_assert_eq!(self.basis, Basis::Rotating);
        let w = Self::rotation(frame);
        Self::new(w * self.entries * w.transpose(), Basis::Dressed)
    }

    pub fn to_rotating(&self, frame: &DressedFrame) -> Self {
        debug_assert_eq!(self.basis, Basis::Dressed);
        let w = Self::rotation(frame);
        Self::new(w.transpose() * self.entries * w, Basis::Rotating)
    }

    pub fn to_vec(&self) -> Vec9 {
        Vec9::from_fn(|k, _| self.entries[(k / 3, k % 3)])
    }

    pub fn from_vec(v: &Vec9, basis: Basis) -> Self {
        Self::new(Matrix3::from_fn(|i, j| v[3 * i + j]), basis)
    }
}

/// The four bath rates plus the condensate cycle rate, all in ps⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BathRates {
    pub rc2: f64,
    pub rc3: f64,
    pub rh2: f64,
    pub rh3: f64,
    /// R = Ω Im ρ₃₂, transfer |3_R⟩ → |2_R⟩ driven by the condensate.
    pub r: f64,
}

impl BathRates {
    /// Transfer |2_R⟩ → |1_R⟩ through the cold bath.
    pub fn rc(&self) -> f64 {
        self.rc2 + self.rc3
    }

    /// Transfer |1_R⟩ → |3_R⟩ through the hot bath.
    pub fn rh(&self) -> f64 {
        -(self.rh2 + self.rh3)
    }

    /// max(|R − R^c|, |R − R^h|)
    pub fn cycle_mismatch(&self) -> f64 {
        (self.r - self.rc()).abs().max((self.r - self.rh()).abs())
    }
}

/// Bath weights at the dressed transition energies; index 0 is level 2,
/// index 1 level 3.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DressedSamples {
    pub cold: [BathSample; 2],
    pub hot: [BathSample; 2],
}

impl DressedSamples {
    pub fn new(frame: &DressedFrame, cold: &BathSpec, hot: &BathSpec) -> Result<Self> {
        Ok(DressedSamples {
            cold: [cold.sample(frame.e2_tilde)?, cold.sample(frame.e3_tilde)?],
            hot: [hot.sample(frame.e2_tilde_hot)?, hot.sample(frame.e3_tilde_hot)?],
        })
    }
}

/// Bath rates as complex-linear functionals of the matrix entries, with
/// Re ρ₂₃ written as (ρ₂₃ + ρ₃₂)/2 so the same code acts on basis matrices.
fn rate_functionals(m: &Matrix3<C64>, frame: &DressedFrame, s: &DressedSamples) -> [C64; 4] {
    let (sn, cs) = frame.theta.sin_cos();
    let re23 = (m[(1, 2)] + m[(2, 1)]) * 0.5;
    let (r11, r22, r33) = (m[(0, 0)], m[(1, 1)], m[(2, 2)]);
    let [c2, c3] = s.cold;
    let [h2, h3] = s.hot;
    let rc2 = (-c2.down() * sn * re23 + (1.0 + cs) * (c2.down() * r22 - c2.up() * r11)) * PI;
    let rc3 = (c3.down() * sn * re23 + (1.0 - cs) * (c3.down() * r22 - c3.up() * r11)) * PI;
    let rh2 = (-h2.down() * sn * re23 + (1.0 - cs) * (h2.down() * r33 - h2.up() * r11)) * PI;
    let rh3 = (h3.down() * sn * re23 + (1.0 + cs) * (h3.down() * r33 - h3.up() * r11)) * PI;
    [rc2, rc3, rh2, rh3]
}

fn check_basis(rho: &DensityMatrix3, want: Basis) -> Result<()> {
    if rho.basis != want {
        return Err(Error::invalid(
            "rho.basis",
            format!("expected {want:?}, got {:?}", rho.basis),
        ));
    }
    Ok(())
}

/// Bath rates from rotating-basis matrix elements.
pub fn rates_rotating(
    rho: &DensityMatrix3,
    frame: &DressedFrame,
    cold: &BathSpec,
    hot: &BathSpec,
) -> Result<BathRates> {
    check_basis(rho, Basis::Rotating)?;
    let s = DressedSamples::new(frame, cold, hot)?;
    let [rc2, rc3, rh2, rh3] = rate_functionals(&rho.entries, frame, &s);
    Ok(BathRates {
        rc2: rc2.re,
        rc3: rc3.re,
        rh2: rh2.re,
        rh3: rh3.re,
        r: frame.rabi * rho.entries[(2, 1)].im,
    })
}

/// Bath rates from dressed-basis matrix elements ρ̃_ij.
pub fn rates_dressed(
    rho_tilde: &DensityMatrix3,
    frame: &DressedFrame,
    cold: &BathSpec,
    hot: &BathSpec,
) -> Result<BathRates> {
    check_basis(rho_tilde, Basis::Dressed)?;
    let s = DressedSamples::new(frame, cold, hot)?;
    let (sn, cs) = frame.theta.sin_cos();
    let m = &rho_tilde.entries;
    let (p1, p2, p3) = (m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re);
    let re23 = m[(1, 2)].re;
    let [c2, c3] = s.cold;
    let [h2, h3] = s.hot;
    let rc2 = PI * ((1.0 + cs) * (c2.down() * p2 - c2.up() * p1) + c2.down() * sn * re23);
    let rc3 = PI * ((1.0 - cs) * (c3.down() * p3 - c3.up() * p1) + c3.down() * sn * re23);
    let rh2 = PI * ((1.0 - cs) * (h2.down() * p2 - h2.up() * p1) - h2.down() * sn * re23);
    let rh3 = PI * ((1.0 + cs) * (h3.down() * p3 - h3.up() * p1) - h3.down() * sn * re23);
    // Ω Im ρ₃₂ in the rotating basis, expressed through ρ̃.
    let r = frame.rabi * rho_tilde.to_rotating(frame).entries[(2, 1)].im;
    Ok(BathRates { rc2, rc3, rh2, rh3, r })
}

/// −i[H₀′, ρ] with H₀′ = diag(0, e2, e2 + Δ) + (Ω/2)(|3⟩⟨2| + |2⟩⟨3|).
fn coherent_rhs(m: &Matrix3<C64>, params: &EngineParams, rabi: f64) -> Matrix3<C64> {
    let mut h = Matrix3::<C64>::zeros();
    h[(1, 1)] = C64::new(params.e2, 0.0);
    h[(2, 2)] = C64::new(params.e2 + params.detuning(), 0.0);
    h[(1, 2)] = C64::new(0.5 * rabi, 0.0);
    h[(2, 1)] = h[(1, 2)];
    (h * m - m * h) * C64::new(0.0, -1.0)
}

fn cold_rhs(m: &Matrix3<C64>, frame: &DressedFrame, s: &DressedSamples) -> Matrix3<C64> {
    let (sn, cs) = frame.theta.sin_cos();
    let [rc2, rc3, _, _] = rate_functionals(m, frame, s);
    let [c2, c3] = s.cold;
    let (a2, a3, b2, b3) = (c2.down(), c3.down(), c2.up(), c3.up());
    let p = 0.5 * PI;
    let mut d = Matrix3::zeros();
    d[(0, 0)] = rc2 + rc3;
    d[(1, 1)] = -(rc2 + rc3);

    let k23 = a2 * (1.0 + cs) + a3 * (1.0 - cs);
    let pops = (m[(0, 0)] * (b2 - b3) + m[(2, 2)] * (a3 - a2)) * sn;
    d[(1, 2)] = -(pops + m[(1, 2)] * k23) * p;
    d[(2, 1)] = -(pops + m[(2, 1)] * k23) * p;

    let k12 = (a2 + b2) * (1.0 + cs) + (a3 + b3) * (1.0 - cs);
    let x12 = (a3 - a2) * sn;
    d[(0, 1)] = -((m[(0, 1)] - m[(1, 0)]) * k12 + (m[(0, 2)] - m[(2, 0)]) * x12) * p;
    d[(1, 0)] = -((m[(1, 0)] - m[(0, 1)]) * k12 + (m[(2, 0)] - m[(0, 2)]) * x12) * p;

    let k13 = b2 * (1.0 + cs) + b3 * (1.0 - cs);
    let x13 = (b2 - b3) * sn;
    d[(0, 2)] = -(m[(0, 2)] * k13 + m[(1, 0)] * x13) * p;
    d[(2, 0)] = -(m[(2, 0)] * k13 + m[(0, 1)] * x13) * p;
    d
}

fn hot_rhs(m: &Matrix3<C64>, frame: &DressedFrame, s: &DressedSamples) -> Matrix3<C64> {
    let (sn, cs) = frame.theta.sin_cos();
    let [_, _, rh2, rh3] = rate_functionals(m, frame, s);
    let [h2, h3] = s.hot;
    let (a2, a3, b2, b3) = (h2.down(), h3.down(), h2.up(), h3.up());
    let p = 0.5 * PI;
    let mut d = Matrix3::zeros();
    d[(0, 0)] = rh2 + rh3;
    d[(2, 2)] = -(rh2 + rh3);

    let k23 = a2 * (1.0 - cs) + a3 * (1.0 + cs);
    let pops = (m[(0, 0)] * (b2 - b3) + m[(1, 1)] * (a3 - a2)) * sn;
    d[(1, 2)] = -(pops + m[(1, 2)] * k23) * p;
    d[(2, 1)] = -(pops + m[(2, 1)] * k23) * p;

    let k13 = (a3 + b3) * (1.0 + cs) + (a2 + b2) * (1.0 - cs);
    let x13 = (a3 - a2) * sn;
    d[(0, 2)] = -(m[(0, 2)] * k13 + m[(0, 1)] * x13) * p;
    d[(2, 0)] = -(m[(2, 0)] * k13 + m[(1, 0)] * x13) * p;

    let k12 = b3 * (1.0 + cs) + b2 * (1.0 - cs);
    d[(0, 1)] = -m[(0, 1)] * k12 * p;
    d[(1, 0)] = -m[(1, 0)] * k12 * p;
    d
}

fn superoperator(f: impl Fn(&Matrix3<C64>) -> Matrix3<C64>) -> Op9 {
    let mut op = Op9::zeros();
    for k in 0..9 {
        let mut e = Matrix3::zeros();
        e[(k / 3, k % 3)] = ONE;
        let out = f(&e);
        for l in 0..9 {
            op[(l, k)] = out[(l / 3, l % 3)];
        }
    }
    op
}

/// Linear map ρ ↦ ρ̇ on row-major vectorized 3×3 matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub matrix: Op9,
    pub coherent: Op9,
    pub cold: Op9,
    pub hot: Op9,
    pub frame: DressedFrame,
    pub samples: DressedSamples,
}

impl Generator {
    pub fn apply(&self, rho: &DensityMatrix3) -> Matrix3<C64> {
        let v = self.matrix * rho.to_vec();
        Matrix3::from_fn(|i, j| v[3 * i + j])
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Dissipative part only (cold + hot).
    pub fn dissipator(&self) -> Op9 {
        self.cold + self.hot
    }
}

/// Full generator −i[H₀′, ·] + D_cold + D_hot at Rabi coupling `rabi`.
pub fn assemble_generator(scenario: &Scenario, rabi: f64) -> Result<Generator> {
    let frame = DressedFrame::new(&scenario.engine, rabi)?;
    let samples = DressedSamples::new(&frame, &scenario.cold, &scenario.hot)?;
    let coherent = superoperator(|m| coherent_rhs(m, &scenario.engine, rabi));
    let cold = superoperator(|m| cold_rhs(m, &frame, &samples));
    let hot = superoperator(|m| hot_rhs(m, &frame, &samples));
    Ok(Generator {
        matrix: coherent + cold + hot,
        coherent,
        cold,
        hot,
        frame,
        samples,
    })
}

/// Number of singular values of the generator below the kernel tolerance.
pub fn kernel_dimension(gen: &Generator) -> usize {
    let sv = gen.matrix.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 9;
    }
    sv.iter().filter(|&&s| s <= KERNEL_TOLERANCE * max).count()
}

/// Unique unit-trace kernel element of the generator.
///
/// The ρ₁₁ row of the vectorized system is replaced by the trace condition.
pub fn steady_state(gen: &Generator) -> Result<DensityMatrix3> {
    let dim = kernel_dimension(gen);
    if dim != 1 {
        return Err(Error::DegenerateSteadyState { kernel_dim: dim });
    }
    let mut a = gen.matrix;
    for k in 0..9 {
        a[(0, k)] = if k % 4 == 0 { ONE } else { ZERO };
    }
    let mut b = Vec9::zeros();
    b[0] = ONE;
    let lu = a.lu();
    let singular = Error::DegenerateSteadyState { kernel_dim: 2 };
    let mut x = lu.solve(&b).ok_or(singular.clone())?;
    // One refinement step; small populations otherwise carry the absolute
    // error of the large ones.
    x += lu.solve(&(b - a * x)).ok_or(singular)?;
    let raw = DensityMatrix3::from_vec(&x, Basis::Rotating);
    let rho = DensityMatrix3::new(
        (raw.entries + raw.entries.adjoint()) * C64::new(0.5, 0.0),
        Basis::Rotating,
    );
    let residual = (gen.matrix * rho.to_vec()).norm();
    let tolerance = STEADY_RESIDUAL_TOLERANCE * gen.norm();
    if !(residual <= tolerance) {
        return Err(Error::SteadyStateResidual {
            residual,
            tolerance,
        });
    }
    Ok(rho)
}

/// Fixed-step RK4 integration of ρ̇ = G ρ up to `t_final` (ps).
pub fn integrate_eom(
    gen: &Generator,
    rho0: &DensityMatrix3,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix3> {
    let norm = gen.norm();
    if !(dt > 0.0) || dt * norm >= 0.1 {
        return Err(Error::StepSize { dt, norm });
    }
    let steps = (t_final / dt).ceil().max(0.0) as usize;
    if steps == 0 {
        return Ok(*rho0);
    }
    let h = C64::new(t_final / steps as f64, 0.0);
    let g = &gen.matrix;
    let mut v = rho0.to_vec();
    let half = C64::new(0.5, 0.0);
    let sixth = C64::new(1.0 / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    for _ in 0..steps {
        let k1 = g * v;
        let k2 = g * (v + k1 * (h * half));
        let k3 = g * (v + k2 * (h * half));
        let k4 = g * (v + k3 * h);
        v += (k1 + k2 * two + k3 * two + k4) * (h * sixth);
    }
    Ok(DensityMatrix3::from_vec(&v, rho0.basis))
}

/// Ω = 0 rates of the Lamb three-level laser equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambLimit {
    pub gamma_c_down: f64,
    pub gamma_c_up: f64,
    pub gamma_h_down: f64,
    pub gamma_h_up: f64,
    /// Dissipative decay rates of ρ₂₃, ρ₁₃ and ρ₁₂ (counter-rotating cold
    /// term in ρ₁₂ excluded).
    pub coherence_decay: [f64; 3],
}

impl LambLimit {
    /// Steady populations (ρ₁₁, ρ₂₂, ρ₃₃): each excited level in equilibrium
    /// with its own bath.
    pub fn populations(&self) -> Result<[f64; 3]> {
        let dead = |down: f64, up: f64| down == 0.0 && up == 0.0;
        if dead(self.gamma_c_down, self.gamma_c_up) || dead(self.gamma_h_down, self.gamma_h_up) {
            return Err(Error::DegenerateSteadyState { kernel_dim: 2 });
        }
        let x2 = self.gamma_c_up / self.gamma_c_down;
        let x3 = self.gamma_h_up / self.gamma_h_down;
        let z = 1.0 + x2 + x3;
        Ok([1.0 / z, x2 / z, x3 / z])
    }

    /// ρ₃₃ − ρ₂₂ at Ω = 0.
    pub fn inversion(&self) -> Result<f64> {
        let p = self.populations()?;
        Ok(p[2] - p[1])
    }

    /// γ↓c + γ↓h, the width of the 2–3 transition.
    pub fn linewidth(&self) -> f64 {
        self.gamma_c_down + self.gamma_h_down
    }
}

pub fn lamb_limit(scenario: &Scenario) -> Result<LambLimit> {
    let e = &scenario.engine;
    let c = scenario.cold.sample(e.e2)?;
    let h = scenario.hot.sample(e.e3)?;
    let two_pi = 2.0 * PI;
    let (gcd, gcu) = (two_pi * c.down(), two_pi * c.up());
    let (ghd, ghu) = (two_pi * h.down(), two_pi * h.up());
    Ok(LambLimit {
        gamma_c_down: gcd,
        gamma_c_up: gcu,
        gamma_h_down: ghd,
        gamma_h_up: ghu,
        coherence_decay: [
            0.5 * (gcd + ghd),
            0.5 * (ghu + ghd + gcu),
            0.5 * (gcu + gcd + ghu),
        ],
    })
}
