//! One function per subcommand; each writes its result to `out`.

use std::io::{Read, Write};

use num_complex::Complex;
use ptomech::covariance::{branch_covariance, DriftMode};
use ptomech::dynamics::{branch_state, classify_trajectory, integrate, Status, TrajectoryClass};
use ptomech::entanglement::pairwise_all;
use ptomech::model::{self, classify, validate, EP_TOLERANCE};
use ptomech::stability::{
    basin as basin_map, is_stable, jacobian, BasinSpec, BranchRule, CouplingMode, STABILITY_MARGIN,
};
use ptomech::steady::{solve_branches, BranchRecord};
use ptomech::sweep::{basin_preset, figure_preset, run_sweep, SweepSpec};
use ptomech::{SystemParams, ValidatedParams};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::params::ParamArgs;
use crate::{
    BasinArgs, CovarianceArgs, DynamicsArgs, EntangleArgs, Failure, Format, Outcome, Rule,
    StabilityArgs, SweepArgs,
};

fn emit(out: &mut dyn Write, value: &Value) -> Outcome {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn complex(z: Complex<f64>) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn supermodes(args: &ParamArgs, out: &mut dyn Write) -> Outcome {
    let p = args.resolve_optics()?;
    let s = model::supermodes(&p);
    let regime = classify(&p, EP_TOLERANCE * p.gamma);
    emit(
        out,
        &json!({
            "omega_plus": complex(s.omega_plus),
            "omega_minus": complex(s.omega_minus),
            "splitting": s.splitting(),
            "j_ep": regime.j_ep,
            "regime": regime.tag.to_string(),
        }),
    )
}

pub fn steady(args: &ParamArgs, out: &mut dyn Write) -> Outcome {
    let p = args.resolve()?;
    let branches: Vec<BranchRecord> = solve_branches(&p)?.iter().map(|b| b.to_record()).collect();
    emit(out, &json!({ "params": p, "branches": branches }))
}

pub fn stability(args: &StabilityArgs, out: &mut dyn Write) -> Outcome {
    if !(args.margin >= 0.0 && args.margin.is_finite()) {
        return Err(Failure::Input(
            "margin must be finite and nonnegative".into(),
        ));
    }
    let p = args.params.resolve()?;
    let mode = if args.phase_exact {
        CouplingMode::PhaseExact
    } else {
        CouplingMode::PaperLiteral
    };
    let mut rows = Vec::new();
    for (i, b) in solve_branches(&p)?.iter().enumerate() {
        let v = is_stable(&jacobian(&p, b, mode), args.margin)?;
        rows.push(json!({
            "index": i,
            "branch": b.to_record(),
            "stable": v.stable,
            "max_re_lambda": v.max_re_lambda,
            "eigenvalues": v.eigenvalues.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
        }));
    }
    emit(
        out,
        &json!({
            "params": p,
            "margin": args.margin,
            "mode": if args.phase_exact { "phase_exact" } else { "paper_literal" },
            "branches": rows,
        }),
    )
}

pub fn basin(args: &BasinArgs, workers: Option<usize>, out: &mut dyn Write) -> Outcome {
    let mut spec: BasinSpec = match (&args.preset, &args.spec) {
        (Some(name), _) => {
            let mut spec = basin_preset(name)?;
            spec.template = args.params.overlay(spec.template)?;
            spec
        }
        (None, Some(path)) => args.params.load_spec(path)?,
        (None, None) => return Err(Failure::Input("basin needs --preset or --spec".into())),
    };
    if let Some(rule) = args.rule {
        spec.rule = match rule {
            Rule::AnyStable => BranchRule::AnyStable,
            Rule::AllBranches => BranchRule::AllBranches,
        };
    }
    if let Some(margin) = args.margin {
        spec.margin = margin;
    }
    let map = basin_map(&spec, workers)?;
    match args.format {
        Format::Csv => map.write_csv(&mut *out)?,
        Format::Json => emit(
            out,
            &json!({ "metadata": map.metadata(), "cells": map.cells }),
        )?,
    }
    Ok(())
}

pub fn dynamics(args: &DynamicsArgs, out: &mut dyn Write) -> Outcome {
    if !args.perturb.is_finite() {
        return Err(Failure::Input("perturbation must be finite".into()));
    }
    let p = args.params.resolve()?;
    let branches = solve_branches(&p)?;
    let b = branches.get(args.branch).ok_or_else(|| {
        Failure::Input(format!(
            "branch {} requested but only {} steady state(s) exist",
            args.branch,
            branches.len()
        ))
    })?;
    let start = branch_state(b).map(|z| z * (1.0 + args.perturb));
    let traj = integrate(&p, start, args.t_end, args.rtol, args.atol)?;
    match args.format {
        Format::Csv => traj.write_csv(&mut *out)?,
        Format::Json => {
            let (status, t_final) = match traj.status {
                Status::Completed => ("completed", args.t_end),
                Status::Diverged { t } => ("diverged", t),
                Status::StepLimit { t } => ("step_limit", t),
            };
            let class = match classify_trajectory(&traj, args.window) {
                Ok(TrajectoryClass::Converged(_)) => json!({ "kind": "converged" }),
                Ok(TrajectoryClass::Diverged(rate)) => json!({ "kind": "diverged", "rate": rate }),
                Ok(TrajectoryClass::Oscillating) => json!({ "kind": "oscillating" }),
                Err(e) => json!({ "kind": null, "error": e.tag() }),
            };
            let last = traj.last();
            emit(
                out,
                &json!({
                    "status": status,
                    "t_final": t_final,
                    "samples": traj.times.len(),
                    "classification": class,
                    "final": {
                        "alpha1": complex(last[0]),
                        "alpha2": complex(last[1]),
                        "beta": complex(last[2]),
                    },
                }),
            )?;
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct SteadyInput {
    params: SystemParams,
    branches: Vec<BranchRecord>,
}

/// Parameters and branches from flags, or from `steady` output on stdin.
fn steady_states(args: &ParamArgs, stdin: bool) -> Outcome<(ValidatedParams, Vec<BranchRecord>)> {
    if !stdin {
        let p = args.resolve()?;
        let branches = solve_branches(&p)?.iter().map(|b| b.to_record()).collect();
        return Ok((p, branches));
    }
    if !args.is_empty() {
        return Err(Failure::Input(
            "--stdin takes its parameters from the input, not from flags".into(),
        ));
    }
    let mut text = String::new();
    std::io::stdin().read_to_string(&mut text)?;
    let input: SteadyInput =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
    if input.branches.is_empty() {
        return Err(Failure::Input("stdin: no branches".into()));
    }
    Ok((validate(input.params)?, input.branches))
}

fn drift_mode(paper_literal: bool) -> DriftMode {
    if paper_literal {
        DriftMode::PaperLiteral
    } else {
        DriftMode::Consistent
    }
}

/// Stability of each branch; fails when none is stable, since the
/// covariance exists only for stable steady states.
fn stable_flags(p: &ValidatedParams, branches: &[BranchRecord]) -> Outcome<Vec<(bool, f64)>> {
    let mut flags = Vec::with_capacity(branches.len());
    for r in branches {
        let v = is_stable(
            &jacobian(p, &r.to_branch(), CouplingMode::PaperLiteral),
            STABILITY_MARGIN,
        )?;
        flags.push((v.stable, v.max_re_lambda));
    }
    if !flags.iter().any(|f| f.0) {
        let best = flags.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
        return Err(Failure::Input(format!(
            "no stable steady state (smallest max Re lambda {best:e}); the covariance is undefined"
        )));
    }
    Ok(flags)
}

pub fn covariance(args: &CovarianceArgs, out: &mut dyn Write) -> Outcome {
    let (p, branches) = steady_states(&args.params, args.stdin)?;
    let flags = stable_flags(&p, &branches)?;
    let mode = drift_mode(args.paper_literal_a);
    let mut rows = Vec::new();
    for (i, (r, (stable, max_re))) in branches.iter().zip(flags).enumerate() {
        let cm = if stable {
            Some(branch_covariance(&p, &r.to_branch(), mode)?.to_record())
        } else {
            None
        };
        rows.push(
            json!({ "index": i, "stable": stable, "max_re_lambda": max_re, "covariance": cm }),
        );
    }
    emit(
        out,
        &json!({
            "params": p,
            "drift": if args.paper_literal_a { "paper_literal" } else { "consistent" },
            "branches": rows,
        }),
    )
}

pub fn entangle(args: &EntangleArgs, out: &mut dyn Write) -> Outcome {
    let (p, branches) = steady_states(&args.params, false)?;
    let flags = stable_flags(&p, &branches)?;
    let mode = drift_mode(args.paper_literal_a);
    let mut rows = Vec::new();
    let mut selected: Option<(usize, f64)> = None;
    for (i, (r, (stable, max_re))) in branches.iter().zip(flags).enumerate() {
        if !stable {
            rows.push(json!({ "index": i, "stable": false, "max_re_lambda": max_re, "e_n": null }));
            continue;
        }
        if selected.map_or(true, |(_, best)| max_re < best) {
            selected = Some((i, max_re));
        }
        let cm = branch_covariance(&p, &r.to_branch(), mode)?;
        let en = pairwise_all(&cm)?;
        rows.push(json!({
            "index": i,
            "stable": true,
            "max_re_lambda": max_re,
            "e_n": {
                "mech_cav1": en.mech_cav1.e_n,
                "mech_cav2": en.mech_cav2.e_n,
                "cav1_cav2": en.cav1_cav2.e_n,
            },
            "eta": {
                "mech_cav1": en.mech_cav1.eta,
                "mech_cav2": en.mech_cav2.eta,
                "cav1_cav2": en.cav1_cav2.eta,
            },
            "min_symplectic": cm.to_record().min_symplectic_eigenvalue,
        }));
    }
    emit(
        out,
        &json!({
            "params": p,
            "selected": selected.map(|s| s.0),
            "branches": rows,
        }),
    )
}

pub fn sweep(args: &SweepArgs, workers: Option<usize>, out: &mut dyn Write) -> Outcome {
    let spec: SweepSpec = match (&args.preset, &args.spec) {
        (Some(name), _) => {
            let mut spec = figure_preset(name)?;
            spec.template = args.params.overlay(spec.template)?;
            spec
        }
        (None, Some(path)) => args.params.load_spec(path)?,
        (None, None) => return Err(Failure::Input("sweep needs --preset or --spec".into())),
    };
    let result = run_sweep(&spec, workers)?;
    match args.format {
        Format::Csv => result.write_csv(&mut *out)?,
        Format::Json => {
            serde_json::to_writer(&mut *out, &result.to_json())?;
            writeln!(out)?;
        }
    }
    Ok(())
}
