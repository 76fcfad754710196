use fotune_core::fractional_map::{classify_wedge, equivalent_pid, s_zeros, w_zeros};
use fotune_core::lqr_inverse::{gains_from_p, p_from_gains, p_third_row, q_from_p, RiccatiPackage};
use fotune_core::pole_placement::{closed_loop_characteristic, closed_loop_poles, desired_characteristic, place_gains};
use fotune_core::tuner::{two_stage_tune, TuneOptions};
use fotune_core::{ClosedLoopTarget, FractionalOrder, PidGains, Plant, WedgeClass};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn plant_strategy() -> impl Strategy<Value = Plant> {
    (prop_oneof![0.1..50.0f64, -50.0..-0.1f64], 0.0..3.0f64, 0.05..10.0f64)
        .prop_map(|(k, z, w)| Plant::new(k, z, w).unwrap())
}

fn target_strategy() -> impl Strategy<Value = ClosedLoopTarget> {
    (0.2..0.99f64, 0.5..20.0f64, 3.0..20.0f64).prop_map(|(z, w, m)| ClosedLoopTarget::new(z, w, m).unwrap())
}

/// Gains with complex-conjugate w-plane zeros.
fn complex_zero_gains() -> impl Strategy<Value = PidGains> {
    (0.1..50.0f64, 0.1..1000.0f64, 0.05..0.98f64).prop_map(|(kd, ki, frac)| {
        // kp² = frac · 4 ki kd
        let kp = (frac * 4.0 * ki * kd).sqrt();
        PidGains::new(kp, ki, kd)
    })
}

proptest! {
    #[test]
    fn pole_placement_roundtrip(plant in plant_strategy(), target in target_strategy()) {
        let gains = place_gains(&plant, &target);
        let rep = closed_loop_poles(&plant, &gains).unwrap();
        prop_assert!(rel(rep.dominant_zeta, target.zeta) <= 1e-9);
        prop_assert!(rel(rep.dominant_omega_n, target.omega_n) <= 1e-9);
        prop_assert!(rel(rep.dominance_ratio, target.m) <= 1e-9);
        prop_assert_eq!(rep.dominance_warning().is_some(), rep.dominance_ratio < 3.0);
    }

    #[test]
    fn coefficient_identity(plant in plant_strategy(), target in target_strategy()) {
        let got = closed_loop_characteristic(&plant, &place_gains(&plant, &target)).coefficients();
        let want = desired_characteristic(&target).coefficients();
        for (g, w) in got.iter().zip(want) {
            prop_assert!(rel(*g, w) <= 1e-10);
        }
    }

    #[test]
    fn care_closure(plant in plant_strategy(), target in target_strategy(), r in 0.01..100.0f64) {
        let gains = place_gains(&plant, &target);
        let pkg = RiccatiPackage::from_gains(&plant, &gains, r).unwrap();
        prop_assert!(pkg.care_residual <= 1e-8, "residual {}", pkg.care_residual);
        let back = pkg.gains(&plant);
        prop_assert!(rel(back.kp, gains.kp) <= 1e-12);
        prop_assert!(rel(back.ki, gains.ki) <= 1e-12);
        prop_assert!(rel(back.kd, gains.kd) <= 1e-12);
    }

    #[test]
    fn third_row_consistency(plant in plant_strategy(), target in target_strategy(), r in 0.01..100.0f64) {
        let p = p_from_gains(&plant, &place_gains(&plant, &target), r).unwrap();
        let row = p_third_row(&plant, &target, r);
        for (a, b) in p.third_row().iter().zip(row) {
            prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-12));
        }
    }

    #[test]
    fn weight_scale_law(plant in plant_strategy(), target in target_strategy(), c in 0.1..10.0f64) {
        let gains = place_gains(&plant, &target);
        let p1 = p_from_gains(&plant, &gains, 1.0).unwrap();
        let pc = p_from_gains(&plant, &gains, c).unwrap();
        for (a, b) in pc.entries().iter().zip(p1.entries()) {
            prop_assert!((a - c * b).abs() <= 1e-9 * (c * b).abs().max(1e-9));
        }
        let q1 = q_from_p(&plant, &p1, 1.0);
        let qc = q_from_p(&plant, &pc, c);
        for (a, b) in qc.q.iter().zip(q1.q) {
            prop_assert!((a - c * b).abs() <= 1e-8 * (c * b).abs().max(q1.q.iter().fold(0.0f64, |m, v| m.max(v.abs()))));
        }
        let g = gains_from_p(&pc, plant.gain, c);
        prop_assert!(rel(g.kp, gains.kp) <= 1e-12 && rel(g.ki, gains.ki) <= 1e-12 && rel(g.kd, gains.kd) <= 1e-12);
    }

    #[test]
    fn integer_order_identity(g in complex_zero_gains()) {
        let eq = equivalent_pid(&g, FractionalOrder::INTEGER).unwrap();
        prop_assert!(rel(eq.kp, g.kp) <= 1e-9);
        prop_assert!(rel(eq.ki, g.ki) <= 1e-9);
        prop_assert!(rel(eq.kd, g.kd) <= 1e-9);
    }

    #[test]
    fn equivalent_quadratic_has_mapped_zeros(g in complex_zero_gains(), q in 0.5..1.5f64) {
        let order = FractionalOrder::new(q).unwrap();
        let w = w_zeros(&g).unwrap();
        prop_assume!(classify_wedge(w.phi, order) == WedgeClass::UnderDamped);
        let eq = equivalent_pid(&g, order).unwrap();
        prop_assert!(eq.kp > 0.0 && eq.ki > 0.0 && eq.kd > 0.0);
        let [s1, _] = s_zeros(&g, order).unwrap();
        // roots of kd s² + kp s + ki
        let re = -eq.kp / (2.0 * eq.kd);
        let im = (4.0 * eq.ki * eq.kd - eq.kp * eq.kp).max(0.0).sqrt() / (2.0 * eq.kd);
        let scale = s1.norm();
        prop_assert!((s1.re - re).abs() <= 1e-9 * scale);
        prop_assert!((s1.im - im).abs() <= 1e-9 * scale);
        prop_assert!(s1.re < 0.0);
    }
}

#[test]
fn zeros_move_towards_heavier_damping() {
    let cases = [
        (Plant::new(9.0, 0.2, 3.0).unwrap(), ClosedLoopTarget::new(0.75, 7.0, 10.0).unwrap()),
        (Plant::new(25.0, 1.0, 5.0).unwrap(), ClosedLoopTarget::new(0.75, 10.0, 10.0).unwrap()),
        (Plant::new(1.0, 5.0, 1.0).unwrap(), ClosedLoopTarget::new(0.75, 5.0, 10.0).unwrap()),
    ];
    for (plant, target) in cases {
        let g = place_gains(&plant, &target);
        let angles: Vec<f64> = [1.0, 0.95, 0.9]
            .iter()
            .map(|&q| {
                let [s, _] = s_zeros(&g, FractionalOrder::new(q).unwrap()).unwrap();
                // angle from the negative real axis
                std::f64::consts::PI - s.arg()
            })
            .collect();
        assert!(angles[0] > angles[1] && angles[1] > angles[2], "{angles:?}");
    }
}

#[test]
fn tuning_report_is_self_consistent() {
    let cases = [
        (Plant::new(9.0, 0.2, 3.0).unwrap(), ClosedLoopTarget::new(0.75, 7.0, 10.0).unwrap(), 0.93),
        (Plant::new(25.0, 1.0, 5.0).unwrap(), ClosedLoopTarget::new(0.75, 10.0, 10.0).unwrap(), 0.92),
        (Plant::new(1.0, 5.0, 1.0).unwrap(), ClosedLoopTarget::new(0.75, 5.0, 10.0).unwrap(), 0.91),
    ];
    for (plant, target, desired) in cases {
        let opts = TuneOptions::default();
        let rep = two_stage_tune(&plant, &target, desired, &opts).unwrap();
        let sub = closed_loop_poles(&plant, &rep.suboptimal_gains).unwrap();
        assert!(rel(sub.dominant_zeta, rep.achieved_zeta) <= 1e-9);
        assert!(rel(sub.dominant_omega_n, rep.achieved_omega_n) <= 1e-9);
        let single = closed_loop_poles(&plant, &rep.single_stage_gains).unwrap();
        assert!(rel(single.dominant_zeta, rep.achieved_zeta) <= 1e-6);
        assert!(rel(single.dominant_omega_n, rep.achieved_omega_n) <= 1e-6);
        assert!(rep.achieved_zeta >= desired - opts.zeta_tolerance);

        // the next grid point up did not yet meet the request
        let prev = equivalent_pid(&rep.stage1_gains, FractionalOrder::new(rep.chosen_q + opts.q_step).unwrap()).unwrap();
        let prev_zeta = closed_loop_poles(&plant, &prev).unwrap().dominant_zeta;
        assert!(rep.achieved_zeta >= prev_zeta);
        assert!(prev_zeta < desired);

        let (s, l) = (rep.suboptimal_gains, rep.single_stage_gains);
        assert!(l.kp > s.kp && l.ki > s.ki && l.kd > s.kd);
        assert!(rep.riccati_lqr.care_residual <= 1e-8 && rep.riccati_subopt.care_residual <= 1e-8);
    }
}
