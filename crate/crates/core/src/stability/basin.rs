//! Stability basins over two-parameter grids.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{branch_stability, STABILITY_MARGIN};
use crate::error::{Error, Result};
use crate::grid::{fmt_float, par_map, Axis, Param};
use crate::model::{validate, SystemParams};
use crate::steady::solve_branches;

/// How the verdicts of several branches combine into one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchRule {
    /// Stable if at least one branch is stable.
    #[default]
    AnyStable,
    /// Stable only if every branch is stable.
    AllBranches,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinSpec {
    pub template: SystemParams<f64>,
    pub x: Axis,
    pub y: Axis,
    #[serde(default)]
    pub rule: BranchRule,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_margin() -> f64 {
    STABILITY_MARGIN
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasinCell {
    pub x: f64,
    pub y: f64,
    pub branch_count: usize,
    /// `None` when the point could not be evaluated.
    pub stable: Option<bool>,
    /// Largest real part of the branch that decided the verdict.
    pub max_re_lambda: Option<f64>,
    pub error: Option<&'static str>,
}

/// Row-major grid of verdicts, `x` varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityMap {
    pub spec: BasinSpec,
    pub cells: Vec<BasinCell>,
    /// Points `(x, y)` on the exceptional-point line inside the grid.
    pub j_ep_contour: Vec<[f64; 2]>,
}

const BASIN_PARAMS: [Param; 3] = [Param::AlphaIn, Param::J, Param::Kappa];

/// Evaluates the stability verdict at every grid cell, in parallel.
///
/// Per-cell failures yield undefined cells; only a malformed spec is an error.
pub fn basin(spec: &BasinSpec, workers: Option<usize>) -> Result<StabilityMap> {
    for axis in [&spec.x, &spec.y] {
        axis.check()?;
        if !BASIN_PARAMS.contains(&axis.param) {
            return Err(Error::Spec(format!(
                "basin axes must be alpha_in, J or kappa, got {}",
                axis.param
            )));
        }
    }
    if spec.x.param == spec.y.param {
        return Err(Error::Spec("basin axes must differ".into()));
    }
    if !(spec.margin >= 0.0) {
        return Err(Error::Spec("margin must be nonnegative".into()));
    }
    let xs = spec.x.values();
    let ys = spec.y.values();
    let cells = par_map(xs.len() * ys.len(), workers, |k| {
        let (x, y) = (xs[k % xs.len()], ys[k / xs.len()]);
        let p = spec.y.param.apply(spec.x.param.apply(spec.template, x), y);
        evaluate(p, x, y, spec)
    })?;
    Ok(StabilityMap {
        j_ep_contour: contour(spec, &xs, &ys),
        spec: spec.clone(),
        cells,
    })
}

fn evaluate(p: SystemParams<f64>, x: f64, y: f64, spec: &BasinSpec) -> BasinCell {
    let undefined = |e: Error, branch_count| BasinCell {
        x,
        y,
        branch_count,
        stable: None,
        max_re_lambda: None,
        error: Some(e.tag()),
    };
    let v = match validate(p) {
        Ok(v) => v,
        Err(e) => return undefined(e, 0),
    };
    let branches = match solve_branches(&v) {
        Ok(b) => b,
        Err(e) => return undefined(e, 0),
    };
    let mut verdicts = Vec::with_capacity(branches.len());
    for b in &branches {
        match branch_stability(&v, b, spec.margin) {
            Ok(verdict) => verdicts.push(verdict.max_re_lambda),
            Err(e) => return undefined(e, branches.len()),
        }
    }
    let decisive = match spec.rule {
        BranchRule::AnyStable => verdicts.iter().copied().fold(f64::INFINITY, f64::min),
        BranchRule::AllBranches => verdicts.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    BasinCell {
        x,
        y,
        branch_count: branches.len(),
        stable: Some(decisive < -spec.margin),
        max_re_lambda: Some(decisive),
        error: None,
    }
}

/// The line `J = (gamma + kappa) / 4` expressed in the axes of the grid.
fn contour(spec: &BasinSpec, xs: &[f64], ys: &[f64]) -> Vec<[f64; 2]> {
    let t = &spec.template;
    let within = |v: f64, vals: &[f64]| {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        v >= lo && v <= hi
    };
    // Value of the y (resp. x) parameter on the EP line, given the other axis value.
    let partner = |own: Param, other: Param, other_value: f64| -> Option<f64> {
        let (kappa, j) = match other {
            Param::Kappa => (other_value, t.j),
            Param::J => (t.kappa, other_value),
            _ => (t.kappa, t.j),
        };
        match own {
            Param::J => Some((t.gamma + kappa) / 4.0),
            Param::Kappa => Some(4.0 * j - t.gamma),
            _ => None,
        }
    };
    let mut points = Vec::new();
    if spec.y.param != Param::AlphaIn {
        for &x in xs {
            if let Some(y) = partner(spec.y.param, spec.x.param, x) {
                if within(y, ys) {
                    points.push([x, y]);
                }
            }
        }
    } else {
        for &y in ys {
            if let Some(x) = partner(spec.x.param, spec.y.param, y) {
                if within(x, xs) {
                    points.push([x, y]);
                }
            }
        }
    }
    points
}

impl StabilityMap {
    /// Fraction of defined cells that are unstable.
    pub fn unstable_fraction(&self) -> f64 {
        let defined: Vec<bool> = self.cells.iter().filter_map(|c| c.stable).collect();
        if defined.is_empty() {
            return 0.0;
        }
        defined.iter().filter(|s| !**s).count() as f64 / defined.len() as f64
    }

    pub fn undefined_count(&self) -> usize {
        self.cells.iter().filter(|c| c.stable.is_none()).count()
    }

    /// CSV with columns `x,y,branch_count,stable,max_re_lambda`; undefined cells
    /// leave the last two empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,branch_count,stable,max_re_lambda")?;
        for c in &self.cells {
            let stable = c.stable.map(|s| if s { "1" } else { "0" }).unwrap_or("");
            let re = c.max_re_lambda.map(fmt_float).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{stable},{re}",
                fmt_float(c.x),
                fmt_float(c.y),
                c.branch_count
            )?;
        }
        Ok(())
    }

    /// Axes, rule, template and the EP contour, for the sidecar file.
    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "x": self.spec.x,
            "y": self.spec.y,
            "x_values": self.spec.x.values(),
            "y_values": self.spec.y.values(),
            "rule": self.spec.rule,
            "margin": self.spec.margin,
            "template": self.spec.template,
            "row_major": "x varies fastest",
            "j_ep_contour": self.j_ep_contour,
            "unstable_fraction": self.unstable_fraction(),
            "undefined_cells": self.undefined_count(),
        })
    }
}
