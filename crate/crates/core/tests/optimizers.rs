//! Update rules: first steps derived by hand, stationarity and convergence on
//! the sphere `½‖θ‖²`.

use particlegp_core::classic::{step, step_in_place};
use particlegp_core::{OptimizerState, RngStream, RuleKind, UpdateRule};
use proptest::prelude::*;

fn first(kind: RuleKind, alpha: f64, theta: &[f64], g: &[f64]) -> Vec<f64> {
    step(&UpdateRule::new(kind, alpha), &OptimizerState::new(theta.len()), theta, g).unwrap().0
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn first_steps_by_hand() {
    let theta = [0.5, -1.0, 2.0];
    let g = [0.3, -2.0, 4.0];
    let a = 0.01;

    // θ − αg
    assert!(close(&first(RuleKind::Gd, a, &theta, &g), &[0.497, -0.98, 1.96], 1e-15));
    // δ = −αg with no history
    assert!(close(&first(RuleKind::Momentum, a, &theta, &g), &[0.497, -0.98, 1.96], 1e-15));
    // v = g², so every coordinate moves by exactly α against its sign
    assert!(close(&first(RuleKind::Adagrad, a, &theta, &g), &[0.49, -0.99, 1.99], 1e-15));
    // v = 0.01g², δ = −αg/(0.1·|g|)
    let r = a / 0.1;
    assert!(close(&first(RuleKind::Rmsprop, a, &theta, &g), &[0.5 - r, -1.0 + r, 2.0 - r], 1e-12));
    // bias-corrected m̂ = g, v̂ = g²
    assert!(close(&first(RuleKind::Adam, a, &theta, &g), &[0.49, -0.99, 1.99], 1e-6));
    // m̂ = (0.9·0.1/0.19 + 1)·g, v̂ = g²
    let k = a * (0.09 / 0.19 + 1.0);
    assert!(close(&first(RuleKind::Nadam, a, &theta, &g), &[0.5 - k, -1.0 + k, 2.0 - k], 1e-6));
}

#[test]
fn adagrad_worked_example() {
    assert_eq!(first(RuleKind::Adagrad, 0.1, &[0.0], &[5.0]), vec![-0.1]);
}

#[test]
fn adam_first_step_is_alpha_times_sign() {
    for &g in &[1e-3, 0.2, 1.0, 37.0, -4.0] {
        let next = first(RuleKind::Adam, 0.001, &[1.0], &[g]);
        assert!((next[0] - (1.0 - 0.001 * g.signum())).abs() < 1e-6, "g = {g}: {next:?}");
    }
}

#[test]
fn momentum_second_step() {
    let rule = UpdateRule::new(RuleKind::Momentum, 0.1);
    let mut state = OptimizerState::new(1);
    let mut theta = vec![1.0];
    step_in_place(&rule, &mut state, &mut theta, &[2.0]).unwrap();
    step_in_place(&rule, &mut state, &mut theta, &[1.0]).unwrap();
    // δ₁ = −0.2, δ₂ = −0.1 + 0.9·(−0.2)
    assert!((theta[0] - (1.0 - 0.2 - 0.28)).abs() < 1e-15);
}

#[test]
fn zero_gradient_leaves_parameters_alone() {
    for kind in RuleKind::ALL {
        let rule = UpdateRule::with_default_step(kind);
        let mut state = OptimizerState::new(2);
        let mut theta = vec![0.7, -3.2];
        for _ in 0..10 {
            step_in_place(&rule, &mut state, &mut theta, &[0.0, 0.0]).unwrap();
        }
        assert_eq!(theta, vec![0.7, -3.2], "{kind}");
    }
}

/// Steps until `‖θ‖ < 1e-3` on the sphere; `None` if the cap is hit.
fn steps_to_converge(rule: &UpdateRule, theta0: &[f64], cap: u64) -> Option<u64> {
    let mut theta = theta0.to_vec();
    let mut state = OptimizerState::new(theta.len());
    for t in 0..cap {
        if theta.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-3 {
            return Some(t);
        }
        let g = theta.clone();
        step_in_place(rule, &mut state, &mut theta, &g).unwrap();
    }
    None
}

#[test]
fn every_rule_converges_on_the_sphere() {
    let mut rng = RngStream::new(21, 0);
    let starts: Vec<Vec<f64>> = (0..5)
        .map(|_| {
            let d = 2 + (rng.uniform() * 4.0) as usize;
            let dir: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
            let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            let r = rng.uniform_range(0.5, 10.0);
            dir.iter().map(|x| r * x / n).collect()
        })
        .collect();
    for kind in RuleKind::ALL {
        let rule = UpdateRule::with_default_step(kind);
        for s in &starts {
            assert!(steps_to_converge(&rule, s, 100_000).is_some(), "{kind} from {s:?}");
        }
    }
}

proptest! {
    #[test]
    fn adam_first_step_opposes_gradient(g in prop::collection::vec(-100.0f64..100.0, 1..6)) {
        let theta = vec![0.0; g.len()];
        let next = first(RuleKind::Adam, 0.01, &theta, &g);
        for (n, gi) in next.iter().zip(&g) {
            if gi.abs() > 1e-6 {
                prop_assert!(n * gi < 0.0);
                prop_assert!((n.abs() - 0.01).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn adaptive_first_steps_ignore_gradient_scale(
        g in prop::collection::vec(0.01f64..10.0, 1..5),
        c in 0.1f64..100.0,
    ) {
        let theta = vec![1.0; g.len()];
        let scaled: Vec<f64> = g.iter().map(|x| c * x).collect();
        for kind in [RuleKind::Adagrad, RuleKind::Rmsprop, RuleKind::Adam, RuleKind::Nadam] {
            let a = first(kind, 0.01, &theta, &g);
            let b = first(kind, 0.01, &theta, &scaled);
            prop_assert!(close(&a, &b, 1e-9), "{kind}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn gd_is_linear_in_the_gradient(
        theta in prop::collection::vec(-10.0f64..10.0, 3),
        g in prop::collection::vec(-10.0f64..10.0, 3),
        alpha in 1e-4f64..1.0,
    ) {
        let next = first(RuleKind::Gd, alpha, &theta, &g);
        for i in 0..3 {
            prop_assert!((next[i] - (theta[i] - alpha * g[i])).abs() < 1e-12);
        }
    }
}
