use proptest::prelude::*;
use ptomech::dynamics::{
    branch_state, classify_trajectory, integrate, State, TrajectoryClass, DEFAULT_T_END,
};
use ptomech::model::{validate, SystemParams};
use ptomech::stability::{branch_stability, STABILITY_MARGIN};
use ptomech::steady::solve_branches;

/// Verdicts closer to zero than these cannot be resolved by a finite-horizon
/// classification: the deviation neither decays nor grows visibly.
const STABLE_RESOLUTION: f64 = -3e-4;
const UNSTABLE_RESOLUTION: f64 = 5e-3;
/// Far below every amplitude in the sampled range (weak drives put the
/// mechanical amplitude near 1e-17), so only the relative tolerance acts.
const ATOL: f64 = 1e-26;

fn params() -> impl Strategy<Value = SystemParams<f64>> {
    // Drives below the bistable range, so an unstable branch has no stable
    // neighbour to settle on.
    (-1.0f64..1.0, 0.0f64..1.2, -5.0f64..3.5).prop_map(|(kappa, j, log_a)| SystemParams {
        kappa,
        j,
        alpha_in: 10f64.powf(log_a),
        ..SystemParams::default()
    })
}

fn distance(a: &State<f64>, b: &State<f64>) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).norm_sqr()).sum::<f64>().sqrt()
}

fn norm(a: &State<f64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stability_verdict_agrees_with_dynamics(p in params()) {
        let v = validate(p).unwrap();
        for b in solve_branches(&v).unwrap() {
            let verdict = branch_stability(&v, &b, STABILITY_MARGIN).unwrap();
            let lambda = verdict.max_re_lambda;
            let target = branch_state(&b);
            let start = target.map(|z| z * (1.0 + 1e-6));
            if verdict.stable && lambda < STABLE_RESOLUTION {
                let traj = integrate(&v, start, DEFAULT_T_END, 1e-10, ATOL).unwrap();
                match classify_trajectory(&traj, 0.1).unwrap() {
                    TrajectoryClass::Converged(s) => {
                        prop_assert!(distance(&s, &target) <= 1e-5 * norm(&target).max(1e-300));
                    }
                    other => prop_assert!(false, "stable branch (lambda {lambda:e}) gave {other:?}"),
                }
            } else if !verdict.stable && lambda > UNSTABLE_RESOLUTION {
                let t_end = (40.0 / lambda).min(DEFAULT_T_END);
                let traj = integrate(&v, start, t_end, 1e-10, ATOL).unwrap();
                let class = classify_trajectory(&traj, 0.3).unwrap();
                prop_assert!(
                    !matches!(class, TrajectoryClass::Converged(_)),
                    "unstable branch (lambda {lambda:e}) converged"
                );
            }
        }
    }

    #[test]
    fn halving_rtol_barely_moves_the_final_state(p in params()) {
        let v = validate(p).unwrap();
        let b = solve_branches(&v).unwrap()[0];
        prop_assume!(branch_stability(&v, &b, STABILITY_MARGIN).unwrap().stable);
        let start = branch_state(&b).map(|z| z * 1.001);
        let rtol = 1e-8;
        let coarse = integrate(&v, start, 500.0, rtol, ATOL).unwrap().last();
        let fine = integrate(&v, start, 500.0, rtol / 2.0, ATOL).unwrap().last();
        prop_assert!(distance(&coarse, &fine) < 10.0 * rtol * norm(&fine).max(1e-300));
    }
}
