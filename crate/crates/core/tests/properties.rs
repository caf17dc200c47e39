use polariton_engine::condensate::{
    gain_at, linear_gain, solve_condensate, threshold_inversion, GridSpec, RootKind,
};
use polariton_engine::liouville::{assemble_generator, lamb_limit, steady_state};
use polariton_engine::model::mev;
use polariton_engine::phases::{above_linear_threshold, sweep, Axis, ParamId, Quantity, SweepSpec};
use polariton_engine::thermo::currents;
use polariton_engine::Scenario;
use proptest::prelude::*;

prop_compose! {
    fn engine_scenario()(
        delta in 0.0..0.5f64,
        th in 30.0..400.0f64,
        tc in 2.0..40.0f64,
        alpha_c in 0.05..0.2f64,
        alpha_h in 0.1..0.4f64,
        gap in 4.0..12.0f64,
    ) -> Scenario {
        let mut s = Scenario::gaas().with_detuning(mev(delta));
        s.hot.temperature = th;
        s.cold.temperature = tc;
        s.cold.alpha = alpha_c;
        s.hot.alpha = alpha_h;
        s.hot.mu = s.hot.center_or_edge - mev(gap);
        s
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generator_preserves_trace(s in engine_scenario(), log_n in -3.0..5.0f64) {
        let g = assemble_generator(&s, s.engine.rabi(10f64.powf(log_n)).unwrap()).unwrap();
        for col in 0..9 {
            let t = g.matrix[(0, col)] + g.matrix[(4, col)] + g.matrix[(8, col)];
            prop_assert!(t.norm() <= 1e-12 * g.norm());
        }
    }

    #[test]
    fn steady_state_is_a_density_matrix(s in engine_scenario(), log_n in -3.0..5.0f64) {
        let g = assemble_generator(&s, s.engine.rabi(10f64.powf(log_n)).unwrap()).unwrap();
        let rho = steady_state(&g).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.trace().im.abs() < 1e-12);
        prop_assert!(rho.hermiticity_error() < 1e-12);
        prop_assert!(rho.min_eigenvalue() > -1e-8);
    }

    #[test]
    fn steady_state_closes_the_cycle(s in engine_scenario(), log_n in -1.0..4.0f64) {
        let g = assemble_generator(&s, s.engine.rabi(10f64.powf(log_n)).unwrap()).unwrap();
        let rho = steady_state(&g).unwrap();
        let rep = currents(&rho, &g.frame, &s).unwrap();
        let r = rep.rates;
        let scale = r.rc().abs().max(r.rh().abs()).max(r.r.abs()).max(1e-300);
        prop_assert!(r.cycle_mismatch() <= 1e-8 * scale);
        prop_assert!((rep.energy_balance() - rep.dressed_balance()).abs()
            <= 1e-8 * rep.power_w.abs().max(rep.eh_dot.abs()).max(1e-300));
    }

    #[test]
    fn weak_drive_follows_golden_rule(s in engine_scenario()) {
        let s = s.with_detuning(0.0);
        let lamb = lamb_limit(&s).unwrap();
        let rabi = 1e-4 * lamb.linewidth();
        let n = (rabi / (2.0 * s.engine.coupling)).powi(2);
        let exact = gain_at(&s, n).unwrap().r;
        let linear = linear_gain(&s, n).unwrap();
        prop_assert!((exact / linear - 1.0).abs() < 1e-3, "exact {exact:e} linear {linear:e}");
    }

    #[test]
    fn threshold_detectors_agree(s in engine_scenario(), log_gamma in -4.0..1.0f64) {
        let mut s = s;
        s.engine = s.engine.with_detuning(0.0);
        s.engine.loss_rate = 10f64.powf(log_gamma);
        let t = threshold_inversion(&s).unwrap();
        let margin = (t.inversion - t.critical_inversion).abs()
            / t.critical_inversion.abs().max(1e-300);
        prop_assume!(margin > 1e-2);
        prop_assert_eq!(t.exceeded, above_linear_threshold(&s).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn crossing_roots_balance_gain_and_loss(s in engine_scenario()) {
        let mut s = s;
        s.engine = s.engine.with_detuning(0.0);
        let sol = match solve_condensate(&s, &GridSpec::default()) {
            Ok(sol) => sol,
            Err(_) => return Ok(()),
        };
        for root in sol.roots.iter().filter(|r| r.kind == RootKind::Crossing) {
            prop_assert!(root.residual < 1e-6, "root {:?}", root.n);
            let rep = root.report.as_ref().unwrap();
            prop_assert!(rep.first_law_residual < 1e-2);
        }
        if sol.condensed() {
            prop_assert!(sol.stable_root().unwrap().stable);
        }
    }
}

#[test]
fn default_preset_condenses_above_threshold() {
    let sol = solve_condensate(&Scenario::gaas(), &GridSpec::default()).unwrap();
    assert!(sol.threshold_exceeded && sol.condensed());
    let root = sol.stable_root().unwrap();
    assert_eq!(root.kind, RootKind::Crossing);
    let m = Scenario::gaas().engine.replicas as f64;
    let r = root.report.as_ref().unwrap().rates.r;
    assert!((m * r - root.n).abs() < 1e-6 * root.n);
}

#[test]
fn sweeps_are_deterministic() {
    let spec = SweepSpec {
        axis1: Axis::linear(ParamId::HotTemperature, 20.0, 300.0, 6),
        axis2: Some(Axis::log(ParamId::LossRate, 1e-2, 1.0, 3)),
        quantities: vec![Quantity::NetPower, Quantity::Residual, Quantity::Inversion],
    };
    let base = Scenario::gaas();
    let a = sweep(&spec, &base, &GridSpec::default()).unwrap();
    let b = sweep(&spec, &base, &GridSpec::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.points.len(), 18);
}
