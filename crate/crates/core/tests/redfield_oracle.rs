//! The assembled generator against a Bloch-Redfield construction built
//! directly from the system-bath coupling operators.

use nalgebra::{Matrix2, Matrix3, SMatrix};
use num_complex::Complex64 as C64;
use polariton_engine::liouville::assemble_generator;
use polariton_engine::model::BathSpec;
use polariton_engine::Scenario;
use proptest::prelude::*;

type Op9 = SMatrix<C64, 9, 9>;

fn ket_bra(i: usize, j: usize) -> Matrix3<C64> {
    let mut m = Matrix3::zeros();
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

fn superop(f: impl Fn(&Matrix3<C64>) -> Matrix3<C64>) -> Op9 {
    let mut out = Op9::zeros();
    for col in 0..9 {
        let image = f(&ket_bra(col / 3, col % 3));
        for row in 0..9 {
            out[(row, col)] = image[(row / 3, row % 3)];
        }
    }
    out
}

/// Eigenpairs (ẽ_k, |k̃⟩) of the rotating-frame Hamiltonian's 2–3 block.
fn dressed_states(s: &Scenario, rabi: f64) -> [(f64, [f64; 3]); 2] {
    let e2 = s.engine.e2;
    let delta = s.engine.e3 - e2 - s.engine.omega;
    let h = Matrix2::new(e2, 0.5 * rabi, 0.5 * rabi, e2 + delta);
    let eig = h.symmetric_eigen();
    [0, 1].map(|k| {
        let v = eig.eigenvectors.column(k);
        (eig.eigenvalues[k], [0.0, v[0], v[1]])
    })
}

/// ⟨level|k̃⟩ |1⟩⟨k̃|, the part of |1⟩⟨level| lowering out of |k̃⟩.
fn lowering(level: usize, ket: &[f64; 3]) -> Matrix3<C64> {
    let mut m = Matrix3::zeros();
    for j in 0..3 {
        m[(0, j)] = C64::new(ket[level] * ket[j], 0.0);
    }
    m
}

/// Σ Γ (A ρ B − B A ρ) + h.c. over the listed (Γ, A) with partner B. The
/// conjugate is written out so the map stays linear on non-Hermitian inputs.
fn redfield(parts: &[(f64, Matrix3<C64>)], partner: &Matrix3<C64>) -> Op9 {
    let b_dag = partner.adjoint();
    superop(|rho| {
        let mut d = Matrix3::zeros();
        for (gamma, a) in parts {
            let g = C64::new(*gamma, 0.0);
            let a_dag = a.adjoint();
            d += (a * rho * partner - partner * a * rho + b_dag * rho * a_dag - rho * a_dag * b_dag) * g;
        }
        d
    })
}

fn oracle(s: &Scenario, rabi: f64) -> Op9 {
    let pi = std::f64::consts::PI;
    let states = dressed_states(s, rabi);
    let weights = |bath: &BathSpec, energy: f64| {
        let x = bath.sample(energy).unwrap();
        (pi * x.down(), pi * x.up())
    };

    // Cold coupling |1⟩⟨2| + h.c. is static: every component pairs with the
    // full Hermitian operator.
    let a_cold = ket_bra(0, 1) + ket_bra(1, 0);
    let mut cold_parts = Vec::new();
    for (e, ket) in &states {
        let l = lowering(1, ket);
        let (down, up) = weights(&s.cold, *e);
        cold_parts.push((down, l));
        cold_parts.push((up, l.adjoint()));
    }
    let cold = redfield(&cold_parts, &a_cold);

    // Hot coupling |1⟩⟨3|e^{−iωt} + h.c.: terms rotating at 2ω are dropped,
    // so lowering parts pair with |3⟩⟨1| and raising parts with |1⟩⟨3|.
    let mut down_parts = Vec::new();
    let mut up_parts = Vec::new();
    for (e, ket) in &states {
        let l = lowering(2, ket);
        let (down, up) = weights(&s.hot, e + s.engine.omega);
        down_parts.push((down, l));
        up_parts.push((up, l.adjoint()));
    }
    let hot = redfield(&down_parts, &ket_bra(2, 0)) + redfield(&up_parts, &ket_bra(0, 2));

    let mut h = Matrix3::<C64>::zeros();
    h[(1, 1)] = C64::new(s.engine.e2, 0.0);
    h[(2, 2)] = C64::new(s.engine.e3 - s.engine.omega, 0.0);
    h[(1, 2)] = C64::new(0.5 * rabi, 0.0);
    h[(2, 1)] = h[(1, 2)];
    let coherent = superop(|rho| (h * rho - rho * h) * C64::new(0.0, -1.0));
    coherent + cold + hot
}

fn compare(s: &Scenario, n: f64) -> f64 {
    let rabi = s.engine.rabi(n).unwrap();
    let g = assemble_generator(s, rabi).unwrap();
    let o = oracle(s, rabi);
    (g.matrix - o).norm() / g.norm()
}

#[test]
fn default_engine_matches_redfield() {
    for n in [0.0, 1.0, 50.0, 200.0, 3e4] {
        let err = compare(&Scenario::gaas(), n);
        assert!(err < 1e-12, "N={n}: relative mismatch {err:e}");
    }
}

#[test]
fn detuned_step_edges_match_redfield() {
    for d in [0.3, -0.3] {
        for edge in [0.0, 0.33, -0.2] {
            for n in [1.0, 26.4, 300.0] {
                let err = compare(&Scenario::step_edge(d, edge), n);
                assert!(err < 1e-12, "Δ={d} edge={edge} N={n}: {err:e}");
            }
        }
    }
}

proptest! {
    #[test]
    fn random_parameters_match_redfield(
        delta in -2.0f64..2.0,
        n in 0.0f64..2000.0,
        th in 20.0f64..400.0,
        tc in 2.0f64..60.0,
        edge in -3.0f64..3.0,
    ) {
        let mut s = Scenario::step_edge(delta, edge);
        s.hot.temperature = th;
        s.cold.temperature = tc;
        prop_assert!(compare(&s, n) < 1e-12);
    }
}
