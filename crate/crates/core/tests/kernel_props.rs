use cartwing::extrapolation::*;
use proptest::prelude::*;

fn params() -> ExtrapParams {
    ExtrapParams::default()
}

fn run(values: Vec<f64>, h: f64, x_star: f64) -> ExtrapolationResult {
    extrapolate(
        &ExtrapStencil::new(0.0, h, values, x_star).unwrap(),
        &params(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn omega_in_unit_interval(values in prop::collection::vec(-100.0f64..100.0, 9), t in -4.0f64..-0.1) {
        let r = run(values, 0.1, t * 0.1);
        prop_assert!(r.omega > 0.0 && r.omega <= 1.0);
    }

    #[test]
    fn omega_is_one_on_linear_data(a in -10.0f64..10.0, b in -10.0f64..10.0, h in 0.001f64..1.0) {
        let values = (0..9).map(|j| a + b * j as f64 * h).collect();
        let r = run(values, h, -h);
        prop_assert_eq!(r.omega, 1.0);
        prop_assert!((r.u_star - (a - b * h)).abs() <= 1e-9 * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn quadratics_extrapolate_exactly(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, t in -3.0f64..-0.1) {
        let h = 0.1;
        let f = |x: f64| a + b * x + c * x * x;
        let values = (0..9).map(|j| f(j as f64 * h)).collect();
        let r = run(values, h, t * h);
        let exact = f(t * h);
        prop_assert!((r.u_star - exact).abs() <= 1e-10 * (1.0 + exact.abs()).max(a.abs() + b.abs() + c.abs()));
    }

    #[test]
    fn omega_is_scale_invariant(values in prop::collection::vec(-1.0f64..1.0, 9)) {
        let small = run(values.clone(), 0.1, -0.1);
        let big = run(values.iter().map(|v| v * 1e3).collect(), 0.1, -0.1);
        let floored = small.indicators.iter().any(|i| *i <= 1e-12);
        prop_assume!(!floored);
        prop_assert!((small.omega - big.omega).abs() < 1e-12);
    }

    #[test]
    fn global_weight_ignores_uniform_indicator_scaling(ind in prop::collection::vec(1e-6f64..10.0, 7), s in 1e-3f64..1e3) {
        let scaled: Vec<f64> = ind.iter().map(|v| v * s).collect();
        prop_assert!((global_weight(&ind) - global_weight(&scaled)).abs() < 1e-12);
    }

    #[test]
    fn plan_agrees_with_direct_route(values in prop::collection::vec(-3.0f64..3.0, 9), t in -4.0f64..-0.2) {
        let plan = ExtrapPlan::new(t, params()).unwrap();
        let direct = run(values.clone(), 1.0, t);
        let (u, w) = plan.apply(&values);
        prop_assert!((u - direct.u_star).abs() < 1e-9 * (1.0 + u.abs()));
        prop_assert!((w - direct.omega).abs() < 1e-9);
    }
}

#[test]
fn pure_jump_drives_omega_to_the_floor() {
    let values = (0..9).map(|j| if j > 4 { 1.0 } else { 0.0 }).collect();
    let r = run(values, 0.1, -0.1);
    assert!(r.omega <= 1e-10, "{}", r.omega);
    assert!(r.u_star.abs() < 1e-10);
}
