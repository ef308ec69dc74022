use std::sync::Arc;

use proptest::prelude::*;

use trials_core::dynamics::vector_field;
use trials_core::lyapunov::{fit_rate, DiagnosticsRow, Quantity, RateModel};
use trials_core::problem::{
    make_example1, make_example1_l1, make_example2, solve_saddle_point_quadratic, solve_saddle_point_reference,
    BoxIndicator, ProxFunction, QuadraticL1,
};
use trials_core::schedules::{
    check_conditions, make_constant_alpha, make_linear_alpha, make_power_alpha, CheckTolerance,
};
use trials_core::smoothing::{moreau_grad, moreau_value, MoreauBlock};
use trials_core::{log_grid, smooth_problem, FieldSpec, PhaseState, ProblemSpec, Vector};

fn vec2() -> impl Strategy<Value = Vector> {
    prop::array::uniform2(-3.0..3.0f64).prop_map(|a| Vector::from_row_slice(&a))
}

fn vec3() -> impl Strategy<Value = Vector> {
    prop::array::uniform3(-3.0..3.0f64).prop_map(|a| Vector::from_row_slice(&a))
}

type RateFn = Box<dyn Fn(f64) -> f64>;

fn problems() -> [ProblemSpec; 3] {
    [
        make_example1(),
        make_example2(),
        smooth_problem(&make_example1_l1(), 1e-2).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn augmentation_adds_half_mu_squared_residual(x in vec2(), y in vec2(), l in vec2()) {
        for p in problems() {
            let r = p.residual(&x, &y).unwrap();
            let diff = p.aug_lagrangian(&x, &y, &l).unwrap() - p.lagrangian(&x, &y, &l).unwrap();
            let expected = 0.5 * p.mu * r.norm_squared();
            prop_assert!((diff - expected).abs() <= 1e-12 * (1.0 + expected));
        }
    }

    #[test]
    fn gradient_matches_central_differences(x in vec2(), y in vec2(), l in vec2()) {
        for p in problems() {
            let g = p.grad_aug_lagrangian(&x, &y, &l).unwrap();
            let h = 1e-6;
            for i in 0..2 {
                let e = Vector::from_fn(2, |k, _| if k == i { h } else { 0.0 });
                let fd = |a: f64, b: f64| (a - b) / (2.0 * h);
                let gx = fd(p.aug_lagrangian(&(&x + &e), &y, &l).unwrap(), p.aug_lagrangian(&(&x - &e), &y, &l).unwrap());
                let gy = fd(p.aug_lagrangian(&x, &(&y + &e), &l).unwrap(), p.aug_lagrangian(&x, &(&y - &e), &l).unwrap());
                let gl = fd(p.aug_lagrangian(&x, &y, &(&l + &e)).unwrap(), p.aug_lagrangian(&x, &y, &(&l - &e)).unwrap());
                let scale = 1.0 + g.x.amax() + g.y.amax() + g.lambda.amax();
                prop_assert!((gx - g.x[i]).abs() <= 1e-6 * scale);
                prop_assert!((gy - g.y[i]).abs() <= 1e-6 * scale);
                prop_assert!((gl - g.lambda[i]).abs() <= 1e-6 * scale);
            }
        }
    }

    #[test]
    fn oracle_saddle_satisfies_saddle_inequality(x in vec2(), y in vec2(), l in vec2()) {
        let p1 = make_example1();
        let p2 = make_example2();
        for (p, sp) in [
            (&p1, solve_saddle_point_quadratic(&p1).unwrap()),
            (&p2, solve_saddle_point_reference(&p2, 1e-12).unwrap()),
        ] {
            let star = p.lagrangian(&sp.x, &sp.y, &sp.lambda).unwrap();
            prop_assert!(p.lagrangian(&sp.x, &sp.y, &l).unwrap() <= star + 1e-9);
            prop_assert!(star <= p.lagrangian(&x, &y, &sp.lambda).unwrap() + 1e-9);
        }
    }

    #[test]
    fn prox_is_firmly_nonexpansive(
        x in vec3(), y in vec3(), theta in 1e-3..2.0f64, weight in 0.0..2.0f64, scale in 0.0..3.0f64,
    ) {
        let blocks: [Box<dyn ProxFunction>; 2] = [
            Box::new(QuadraticL1::new(weight, scale, Vector::from_element(3, 0.5)).unwrap()),
            Box::new(BoxIndicator::new(Vector::from_element(3, -1.0), Vector::from_element(3, 0.5)).unwrap()),
        ];
        for f in &blocks {
            let d = f.prox(theta, &x) - f.prox(theta, &y);
            prop_assert!(d.norm_squared() <= d.dot(&(&x - &y)) + 1e-12);
        }
    }

    #[test]
    fn scalar_prox_minimizes_by_brute_force(x in -3.0..3.0f64, theta in 0.05..2.0f64, weight in 0.0..2.0f64) {
        let f = QuadraticL1::new(weight, 1.5, Vector::from_element(1, 0.3)).unwrap();
        let objective = |xi: f64| f.value(&Vector::from_element(1, xi)) + (xi - x).powi(2) / (2.0 * theta);
        let p = f.prox(theta, &Vector::from_element(1, x))[0];
        let brute = (0..=60_000)
            .map(|k| -4.0 + 8.0 * k as f64 / 60_000.0)
            .map(objective)
            .fold(f64::INFINITY, f64::min);
        prop_assert!(objective(p) <= brute + 1e-12);
        prop_assert!(objective(p) >= brute - 1e-6);
    }

    #[test]
    fn moreau_gradient_is_monotone_and_lipschitz(x in vec3(), y in vec3(), theta in 1e-3..1.0f64) {
        let m = MoreauBlock::new(Arc::new(QuadraticL1::l1(3, 1.0).unwrap()), theta).unwrap();
        let dg = moreau_grad(&m, &x) - moreau_grad(&m, &y);
        let dx = &x - &y;
        prop_assert!(dg.dot(&dx) >= -1e-12);
        prop_assert!(dg.norm() * theta <= dx.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn envelope_decreases_as_theta_grows(x in vec3(), t1 in 1e-3..0.5f64, extra in 0.0..1.0f64) {
        let base = Arc::new(QuadraticL1::l1(3, 0.8).unwrap());
        let small = moreau_value(&MoreauBlock::new(base.clone(), t1).unwrap(), &x);
        let large = moreau_value(&MoreauBlock::new(base.clone(), t1 + extra).unwrap(), &x);
        prop_assert!(large <= small + 1e-12);
        prop_assert!(small <= base.value(&x) + 1e-12);
    }

    #[test]
    fn equilibria_are_exactly_the_kkt_points(dx in vec2(), dl in vec2(), t in 1.0..10.0f64, eps in -8i32..0) {
        let p = make_example1();
        let sp = solve_saddle_point_quadratic(&p).unwrap();
        let fs = FieldSpec::new(p.clone(), make_linear_alpha(0.5, 1.1, 1.0, 1.0).unwrap()).unwrap();
        let size = 10f64.powi(eps);
        let x = &sp.x + &dx * size;
        let l = &sp.lambda + &dl * size;
        let kkt = p.kkt_residual(&x, &sp.y, &l).unwrap();
        let field = vector_field(&fs, t, &PhaseState::at_rest(x, sp.y.clone(), l)).unwrap();
        let moving = field.to_flat().iter().any(|v| v.abs() > 1e-14);
        prop_assert_eq!(moving, kkt > 1e-14, "kkt residual {}", kkt);
    }

    #[test]
    fn named_schedules_certify_and_match_closed_form_rates(
        eta in 1.05..3.0f64, sigma0 in 0.3..3.0f64, param in 0.05..0.95f64, scale in 0.5..4.0f64,
    ) {
        let grid = log_grid(1.0, 100.0, 120).unwrap();
        let cases: [(_, RateFn); 3] = [
            (make_constant_alpha(scale, eta, sigma0, 1.0).unwrap(), Box::new(move |t| (-(t - 1.0) / scale).exp())),
            (make_linear_alpha(param * 2.0, eta, sigma0, 1.0).unwrap(), Box::new(move |t: f64| t.powf(-1.0 / (param * 2.0)))),
            (
                make_power_alpha(param, eta, sigma0, 1.0).unwrap(),
                Box::new(move |t: f64| (-(t.powf(1.0 - param) - 1.0) / (1.0 - param)).exp()),
            ),
        ];
        for (s, rate) in &cases {
            let report = check_conditions(s, &grid, CheckTolerance::default()).unwrap();
            prop_assert!(report.certifies_lyapunov(), "{report}");
            for &t in grid.iter().step_by(7) {
                let (got, want) = (s.predicted_rate(t), rate(t));
                prop_assert!((got - want).abs() <= 1e-9 * want, "t={t}: {got} vs {want}");
                prop_assert!(s.xi(t) > 0.0);
            }
        }
    }

    #[test]
    fn log_grid_is_strictly_increasing(start in 0.1..10.0f64, span in 1e-3..100.0f64, n in 2usize..400) {
        let g = log_grid(start, start + span, n).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert_eq!(g[0], start);
        prop_assert_eq!(g[n - 1], start + span);
        prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn fits_recover_synthetic_rates(c in 0.1..10.0f64, p in 0.2..6.0f64, k in 0.1..3.0f64) {
        let rows: Vec<DiagnosticsRow> = log_grid(1.0, 20.0, 80)
            .unwrap()
            .into_iter()
            .map(|t| DiagnosticsRow {
                t,
                energy: 1.0,
                v_norm: 0.0,
                lagrangian_gap: c * t.powf(-p),
                feasibility: (c * (-k * (t.sqrt() - 1.0)).exp()).sqrt(),
                objective_error: 0.0,
                velocity_norm: 0.0,
                distance_to_saddle: 0.0,
                primal_distance: 0.0,
                predicted: 1.0,
            })
            .collect();
        let power = fit_rate(&rows, Quantity::LagrangianGap, RateModel::Power, (2.0, 20.0)).unwrap();
        prop_assert!((power.slope + p).abs() <= 1e-9);
        let tau = |t: f64| t.sqrt() - 1.0;
        let exp = fit_rate(&rows, Quantity::FeasibilitySquared, RateModel::Exponential(&tau), (1.0, 20.0)).unwrap();
        prop_assert!((exp.slope + k).abs() <= 1e-9);
    }
}
