use proptest::prelude::*;

use rsw_core::diagnostics::{moments_planar, moments_radial, scale_family, ScaleKind};
use rsw_core::model::{build_initial_planar, build_initial_radial, InitialData, PlanarState, RadialGrid, RadialState};
use rsw_core::planar::{rotate_quarter, step2d, PlanarBoundary, PlanarOutcome};
use rsw_core::radial::{step, RadialBoundary, RadialScheme, StepOutcome};
use rsw_core::separated::{classify, kappa, theta, trace, Regime, TraceOptions};

fn radial_step(s: &RadialState<f64>) -> RadialState<f64> {
    match step(s, &RadialScheme::default(), RadialBoundary::FarField, 1.0).unwrap() {
        StepOutcome::Advanced { state, .. } => state,
        StepOutcome::Detected(d) => panic!("unexpected detection {d:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kappa_is_conserved(xi0 in -3.0f64..3.0, eta0 in -3.0f64..3.0) {
        prop_assume!(theta(xi0, eta0).abs() > 1e-6);
        let k0 = kappa(xi0, eta0).unwrap();
        let traj = trace(0.0, xi0, eta0, 2.0 * std::f64::consts::PI, &TraceOptions::default()).unwrap();
        prop_assert!(traj.max_kappa_drift() <= 1e-8 * (1.0 + k0.abs()));
    }

    #[test]
    fn regime_follows_kappa_sign(xi0 in -3.0f64..3.0, eta0 in -3.0f64..3.0) {
        prop_assume!(theta(xi0, eta0).abs() > 1e-6);
        let k0 = kappa(xi0, eta0).unwrap();
        let regime = classify(xi0, eta0).unwrap();
        if k0 > 1e-12 {
            let bounded = matches!(regime, Regime::Periodic { .. } | Regime::Equilibrium { .. });
            prop_assert!(bounded);
        } else if k0 < -1e-12 {
            prop_assert!(regime.is_blowup());
        }
    }

    #[test]
    fn rest_is_fixed_for_any_depth(h_bar in 0.1f64..10.0, cells in 10usize..80) {
        let g = RadialGrid::new(0.0, 2.0, cells).unwrap();
        let s = RadialState::rest(&g, h_bar);
        let next = radial_step(&s);
        prop_assert_eq!(next.h, s.h);
        prop_assert_eq!(next.u, s.u);
        prop_assert_eq!(next.v, s.v);
    }

    #[test]
    fn radial_mass_is_conserved(h in 0.0f64..0.5, u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let g = RadialGrid::new(0.0, 3.0, 120).unwrap();
        let init = InitialData::new("bump").with("h_amp", h + 0.01).with("u_amp", u).with("v_amp", v);
        let mut s = build_initial_radial(&init, &g, 1.0).unwrap();
        let m0 = moments_radial(&s).m;
        for _ in 0..10 {
            s = radial_step(&s);
        }
        prop_assert!((moments_radial(&s).m - m0).abs() <= 1e-12 * m0.abs().max(1e-3));
    }

    #[test]
    fn amplitude_scaling_inverts(lambda in 0.2f64..5.0) {
        let g = RadialGrid::new(0.0, 2.0, 50).unwrap();
        let init = InitialData::new("bump").with("h_amp", 0.2).with("u_amp", 0.4).with("v_amp", -0.3);
        let s: RadialState<f64> = build_initial_radial(&init, &g, 1.0).unwrap();
        let back = scale_family(&scale_family(&s, lambda, ScaleKind::Amplitude).unwrap(), 1.0 / lambda, ScaleKind::Amplitude).unwrap();
        for i in 0..s.len() {
            prop_assert!((back.h[i] - s.h[i]).abs() <= 1e-12);
            prop_assert!((back.u[i] - s.u[i]).abs() <= 1e-12);
            prop_assert!((back.v[i] - s.v[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn planar_step_commutes_with_quarter_rotation(cx in -0.5f64..0.5, cy in -0.5f64..0.5, swirl in -0.5f64..0.5) {
        let init = InitialData::new("offset_bump")
            .with("h_amp", 0.2)
            .with("swirl", swirl)
            .with("center_x", cx)
            .with("center_y", cy);
        let s: PlanarState<f64> = build_initial_planar(&init, 2.0, 16, 16, 1.0).unwrap();
        let advance = |s: &PlanarState<f64>| match step2d(s, &RadialScheme::default(), PlanarBoundary::FarField, 0.05).unwrap() {
            PlanarOutcome::Advanced { state, .. } => state,
            PlanarOutcome::Detected(d) => panic!("unexpected detection {d:?}"),
        };
        let a = rotate_quarter(&advance(&s)).unwrap();
        let b = advance(&rotate_quarter(&s).unwrap());
        for k in 0..a.h.len() {
            prop_assert!((a.h[k] - b.h[k]).abs() <= 1e-12);
            prop_assert!((a.hu[k] - b.hu[k]).abs() <= 1e-12);
            prop_assert!((a.hv[k] - b.hv[k]).abs() <= 1e-12);
        }
        let (m0, m1) = (moments_planar(&s), moments_planar(&rotate_quarter(&s).unwrap()));
        prop_assert!((m0.m - m1.m).abs() <= 1e-12 && (m0.e - m1.e).abs() <= 1e-12);
    }
}
