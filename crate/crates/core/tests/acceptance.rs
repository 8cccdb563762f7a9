//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::{Matrix4, Matrix6, Vector6};
use ptomech::covariance::{lyapunov_residual, solve_lyapunov, DiffusionD, DriftA};
use ptomech::dynamics::{
    branch_state, classify_trajectory, integrate, TrajectoryClass, DEFAULT_T_END,
};
use ptomech::entanglement::log_negativity;
use ptomech::grid::{Axis, Param};
use ptomech::model::{j_ep, supermodes, validate};
use ptomech::stability::{basin, branch_stability, STABILITY_MARGIN};
use ptomech::steady::solve_branches;
use ptomech::sweep::{basin_preset, figure_preset, run_sweep, SweepRecord, SweepSpec};
use ptomech::SystemParams;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn params(kappa: f64, j: f64, alpha_in: f64) -> SystemParams {
    SystemParams {
        kappa,
        j,
        alpha_in,
        ..SystemParams::default()
    }
}

fn ep_arithmetic() -> Outcome {
    let mut worst: f64 = 0.0;
    for (kappa, expected) in [(0.1, 0.275), (0.8, 0.45)] {
        let p = params(kappa, 0.0, 1.0);
        let jep = j_ep(&p);
        if (jep - expected).abs() > 1e-12 {
            return Err(format!("J_EP({kappa}) = {jep}, expected {expected}"));
        }
        for delta in [0.0, p.omega_m] {
            let split = supermodes(&SystemParams { j: jep, delta, ..p }).splitting();
            worst = worst.max(split);
        }
    }
    check(
        worst < 1e-12,
        format!("J_EP = 0.275, 0.45; max splitting at EP {worst:.1e}"),
    )
}

fn reference_points() -> Outcome {
    let stable = validate(params(0.8, 0.8, 1e2)).map_err(|e| e.to_string())?;
    let b = solve_branches(&stable).map_err(|e| e.to_string())?[0];
    let v = branch_stability(&stable, &b, STABILITY_MARGIN).map_err(|e| e.to_string())?;
    if !v.stable {
        return Err(format!(
            "stable point has max Re lambda {:e}",
            v.max_re_lambda
        ));
    }
    let start = branch_state(&b).map(|z| z * 1.01);
    let traj =
        integrate(&stable, start, 2.0 * DEFAULT_T_END, 1e-10, 1e-12).map_err(|e| e.to_string())?;
    match classify_trajectory(&traj, 0.1).map_err(|e| e.to_string())? {
        TrajectoryClass::Converged(_) => {}
        other => return Err(format!("stable point trajectory: {other:?}")),
    }

    let unstable = validate(params(0.8, 0.42, 1e-5)).map_err(|e| e.to_string())?;
    let b = solve_branches(&unstable).map_err(|e| e.to_string())?[0];
    let v = branch_stability(&unstable, &b, STABILITY_MARGIN).map_err(|e| e.to_string())?;
    if v.stable {
        return Err("unstable point judged stable".into());
    }
    let start = branch_state(&b).map(|z| z * (1.0 + 1e-6));
    let traj = integrate(&unstable, start, 300.0, 1e-10, 1e-20).map_err(|e| e.to_string())?;
    let rate = match classify_trajectory(&traj, 0.3).map_err(|e| e.to_string())? {
        TrajectoryClass::Diverged(rate) => rate,
        other => return Err(format!("unstable point trajectory: {other:?}")),
    };
    let expected = 2.0 * v.max_re_lambda;
    let rel = (rate / expected - 1.0).abs();
    check(
        rel < 0.05,
        format!("stable+Converged; unstable+Diverged, growth {rate:.4} vs 2 max Re lambda {expected:.4} ({:.2}%)", rel * 100.0),
    )
}

fn lyapunov_correctness() -> Outcome {
    let mut rng = common::rng(3);
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let a = common::random_hurwitz(&mut rng, k);
        let d = common::random_positive_diagonal(&mut rng);
        let v = solve_lyapunov(&DriftA { a }, &DiffusionD { d })
            .map_err(|e| format!("case {k}: {e}"))?;
        let dm = Matrix6::from_diagonal(&d);
        worst = worst.max(lyapunov_residual(&a, &v.v, &dm).norm() / dm.norm());
    }
    if worst > 1e-10 {
        return Err(format!("worst relative residual {worst:e}"));
    }

    // Independent decay channels: V_ii = d_i / (2 |a_i|), off-diagonals zero.
    let rates = Vector6::new(0.5, 1.0, 2.0, 0.25, 4.0, 0.125);
    let d = Vector6::new(1.0, 3.0, 0.5, 8.0, 2.0, 1.5);
    let v = solve_lyapunov(
        &DriftA {
            a: Matrix6::from_diagonal(&-rates),
        },
        &DiffusionD { d },
    )
    .map_err(|e| e.to_string())?;
    let exact = Matrix6::from_fn(|i, j| if i == j { d[i] / (2.0 * rates[i]) } else { 0.0 });
    if v.v != exact {
        return Err(format!(
            "diagonal case off by {:e}",
            (v.v - exact).abs().max()
        ));
    }
    // Damped oscillators with equal-variance noise: V = d / (2 decay) I.
    let mut a = Matrix6::zeros();
    for (blk, (decay, freq)) in [(0.5, 3.0), (0.25, 23.0), (2.0, 0.5)]
        .into_iter()
        .enumerate()
    {
        let o = 2 * blk;
        a[(o, o)] = -decay;
        a[(o + 1, o + 1)] = -decay;
        a[(o, o + 1)] = freq;
        a[(o + 1, o)] = -freq;
    }
    let d = Vector6::new(1.0, 1.0, 0.5, 0.5, 4.0, 4.0);
    let v = solve_lyapunov(&DriftA { a }, &DiffusionD { d }).map_err(|e| e.to_string())?;
    let exact = Matrix6::from_diagonal(&Vector6::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0));
    let err = (v.v - exact).abs().max();
    check(
        err <= 4.0 * f64::EPSILON,
        format!("500 random: worst residual {worst:.1e}; decoupled cases exact (oscillator error {err:.1e})"),
    )
}

fn negativity_oracle() -> Outcome {
    let mut rng = common::rng(4);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let v = common::random_physical_cm(&mut rng);
        let r = log_negativity(&v).map_err(|e| format!("case {k}: {e}"))?;
        worst = worst.max((r.eta - common::partial_transpose_eta(&v)).abs());
    }
    if worst > 1e-10 {
        return Err(format!("worst eta disagreement {worst:e}"));
    }
    for r in [0.1f64, 0.5, 1.0] {
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        let v = Matrix4::new(
            c, 0.0, s, 0.0, 0.0, c, 0.0, -s, s, 0.0, c, 0.0, 0.0, -s, 0.0, c,
        );
        let e = log_negativity(&v).map_err(|e| e.to_string())?.e_n;
        if (e - 2.0 * r).abs() > 1e-10 {
            return Err(format!("TMSV r = {r}: E_N = {e}"));
        }
    }
    for (n1, n2) in [(0.0, 0.0), (0.0, 3.0), (1.0, 0.25), (300.0, 1e-3)] {
        let v = Matrix4::from_diagonal(&nalgebra::Vector4::new(
            n1 + 0.5,
            n1 + 0.5,
            n2 + 0.5,
            n2 + 0.5,
        ));
        let e = log_negativity(&v).map_err(|e| e.to_string())?.e_n;
        if e != 0.0 {
            return Err(format!("thermal ({n1}, {n2}): E_N = {e}"));
        }
    }
    check(
        true,
        format!("1000 CMs: worst eta error {worst:.1e}; TMSV E_N = 2r; vacuum/thermal exactly 0"),
    )
}

fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>, String> {
    run_sweep(spec, None)
        .map(|r| r.records)
        .map_err(|e| e.to_string())
}

fn stable_en(r: &SweepRecord, pick: fn(&SweepRecord) -> Option<f64>) -> Option<f64> {
    if r.stable == Some(true) {
        pick(r)
    } else {
        None
    }
}

fn max_en(records: &[SweepRecord], pick: fn(&SweepRecord) -> Option<f64>) -> f64 {
    records
        .iter()
        .filter_map(|r| stable_en(r, pick))
        .fold(0.0, f64::max)
}

fn entanglement_beyond_ep() -> Outcome {
    let base = figure_preset("fig3b").map_err(|e| e.to_string())?;
    let mut spec = SweepSpec::new(
        SystemParams {
            chi: 0.0,
            ..base.template
        },
        vec![base.axes[0].clone(), Axis::linear(Param::J, 0.0, 1.2, 241)],
    );
    spec.outputs.entanglement = true;
    let records = sweep(&spec)?;
    let jep = j_ep(&base.template);
    let onset = records
        .iter()
        .filter(|r| stable_en(r, |r| r.en_mech_cav1).is_some_and(|e| e > 1e-4))
        .map(|r| r.coords[1])
        .fold(f64::INFINITY, f64::min);
    if !onset.is_finite() {
        return Err("no entanglement above 1e-4 anywhere on the J grid".into());
    }
    let agreement = if (0.29..=0.40).contains(&onset) {
        "agrees with 0.34"
    } else {
        "outside [0.29, 0.40], no agreement with 0.34 recorded"
    };
    check(
        onset > jep,
        format!("onset J = {onset:.3} > J_EP = {jep}; {agreement}"),
    )
}

fn enhancement_orderings() -> Outcome {
    // (a) gain-loss distant entanglement against the conventional system.
    let fig3b = figure_preset("fig3b").map_err(|e| e.to_string())?;
    let gain_loss = sweep(&SweepSpec::new(fig3b.template, vec![fig3b.axes[0].clone()]))?;
    let best_gl = max_en(&gain_loss, |r| r.en_mech_cav1);
    let conventional = sweep(&figure_preset("fig3a").map_err(|e| e.to_string())?)?;
    let best_conv = max_en(&conventional, |r| r.en_mech_cav2);
    let a_ok = best_gl > best_conv;
    let a = format!(
        "(a) {} max E_N {best_gl:.3e} vs conventional {best_conv:.3e}",
        verdict(a_ok)
    );

    // (b) gain-loss against loss-loss, pointwise where both are stable.
    let fig6d = sweep(&figure_preset("fig6d").map_err(|e| e.to_string())?)?;
    let n = fig6d.len() / 2;
    let mut compared = 0;
    let mut violations = 0;
    let mut worst = (0.0, 0.0, 0.0);
    for (gl, ll) in fig6d[..n].iter().zip(&fig6d[n..]) {
        if let (Some(x), Some(y)) = (
            stable_en(gl, |r| r.en_mech_cav1),
            stable_en(ll, |r| r.en_mech_cav1),
        ) {
            compared += 1;
            if x < y {
                violations += 1;
                if y - x > worst.2 - worst.1 {
                    worst = (gl.coords[0], x, y);
                }
            }
        }
    }
    let b_ok = compared > 0 && violations == 0;
    let b = format!(
        "(b) {} {violations}/{compared} points with gain-loss < loss-loss{}",
        verdict(b_ok),
        if violations > 0 {
            format!(
                " (largest gap at alpha_in = {:.3e}: {:.3e} vs {:.3e})",
                worst.0, worst.1, worst.2
            )
        } else {
            String::new()
        }
    );

    // (c) chi ordering at weak drive, where every chi curve is stable.
    let fig3c = figure_preset("fig3c").map_err(|e| e.to_string())?;
    let chis = fig3c.axes[1].values();
    let alphas = fig3c.axes[0].values();
    let records = sweep(&fig3c)?;
    let mut compared = 0;
    let mut violations = 0;
    for (i, _) in alphas.iter().enumerate().filter(|(_, a)| **a <= 1e2) {
        let curve: Option<Vec<f64>> = (0..chis.len())
            .map(|k| stable_en(&records[k * alphas.len() + i], |r| r.en_mech_cav1))
            .collect();
        let Some(curve) = curve else { continue };
        compared += 1;
        if curve.windows(2).any(|w| w[1] < w[0]) {
            violations += 1;
        }
    }
    let c_ok = compared > 0 && violations == 0;
    let c = format!(
        "(c) {} {violations}/{compared} weak-drive points where E_N decreases with chi",
        verdict(c_ok)
    );
    check(a_ok && b_ok && c_ok, format!("{a}; {b}; {c}"))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "violated:"
    }
}

fn basin_monotonicity() -> Outcome {
    let fraction = |name: &str| -> Result<f64, String> {
        let spec = basin_preset(name).map_err(|e| e.to_string())?;
        Ok(basin(&spec, None)
            .map_err(|e| e.to_string())?
            .unstable_fraction())
    };
    let (a, b, c, d) = (
        fraction("fig1a")?,
        fraction("fig1b")?,
        fraction("fig1c")?,
        fraction("fig1d")?,
    );
    check(
        a < b && c > d,
        format!(
            "unstable fraction kappa 0.1 -> 0.8: {a:.4} -> {b:.4}; J 0.2 -> 1.0: {c:.4} -> {d:.4}"
        ),
    )
}

fn thermal_robustness() -> Outcome {
    let spec = figure_preset("fig4").map_err(|e| e.to_string())?;
    let records = sweep(&spec)?;
    let mut curve = Vec::with_capacity(records.len());
    for r in &records {
        match stable_en(r, |r| r.en_mech_cav1) {
            Some(e) => curve.push((r.coords[0], e)),
            None => return Err(format!("n_th = {} is not stable", r.coords[0])),
        }
    }
    let monotone = curve.windows(2).all(|w| w[1].1 <= w[0].1);
    let at_300 = curve
        .iter()
        .find(|(n, _)| *n == 300.0)
        .map(|c| c.1)
        .unwrap_or(0.0);
    let n_star = curve
        .iter()
        .take_while(|(_, e)| *e > 0.0)
        .last()
        .map(|c| c.0);
    let summary = format!(
        "E_N(0) = {:.3e}, E_N(300) = {at_300:.3e}, nonincreasing: {monotone}, n_th* = {}",
        curve[0].1,
        n_star
            .map(|n| n.to_string())
            .unwrap_or_else(|| "none".into())
    );
    if at_300 > 0.0 {
        return check(monotone, summary);
    }
    check(monotone && n_star.is_some_and(|n| n >= 100.0), summary)
}

fn determinism() -> Outcome {
    let spec = figure_preset("fig3b").map_err(|e| e.to_string())?;
    let csv = |workers: Option<usize>| -> Result<Vec<u8>, String> {
        let mut out = Vec::new();
        run_sweep(&spec, workers)
            .map_err(|e| e.to_string())?
            .write_csv(&mut out)
            .map_err(|e| e.to_string())?;
        Ok(out)
    };
    let reference = csv(Some(1))?;
    for workers in [Some(2), Some(7), None, None] {
        if csv(workers)? != reference {
            return Err(format!("CSV differs with workers = {workers:?}"));
        }
    }
    check(
        true,
        format!(
            "{} bytes identical across 1, 2, 7 and all workers",
            reference.len()
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "EP arithmetic", ep_arithmetic),
        (2, "stability at reference points", reference_points),
        (3, "Lyapunov correctness", lyapunov_correctness),
        (4, "negativity oracle", negativity_oracle),
        (5, "entanglement beyond the EP", entanglement_beyond_ep),
        (6, "enhancement orderings", enhancement_orderings),
        (7, "basin monotonicity", basin_monotonicity),
        (8, "thermal robustness", thermal_robustness),
        (9, "determinism", determinism),
    ];
    let mut failed = 0;
    for (n, name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}, {secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}, {secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
