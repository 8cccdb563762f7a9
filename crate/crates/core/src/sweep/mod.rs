//! Parameter sweeps over the full steady-state, stability, covariance and
//! negativity chain.

mod presets;

pub use presets::{basin_preset, figure_preset, PRESET_NAMES};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::covariance::{branch_covariance, min_symplectic_eigenvalue, DriftMode};
use crate::entanglement::pairwise_all;
use crate::error::{Error, Result};
use crate::grid::{fmt_float, par_map, Axis, Param};
use crate::model::{validate, SystemParams, ValidatedParams};
use crate::stability::{branch_stability, STABILITY_MARGIN};
use crate::steady::{solve_branches, SteadyStateBranch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchPolicy {
    /// One record per point: the stable branch with the most negative
    /// eigenvalue real part (ties to the smaller `n2`), else the least
    /// unstable branch.
    #[default]
    MostStable,
    /// One record per branch.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    /// Covariance and negativities for stable branches.
    pub entanglement: bool,
    /// Bare detuning in the `(phi2, I2)` drift entry instead of the shifted one.
    pub paper_literal_drift: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            entanglement: true,
            paper_literal_drift: false,
        }
    }
}

fn default_margin() -> f64 {
    STABILITY_MARGIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub template: SystemParams<f64>,
    /// One or two axes; the first varies fastest.
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub branch_policy: BranchPolicy,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

impl SweepSpec {
    pub fn new(template: SystemParams<f64>, axes: Vec<Axis>) -> Self {
        SweepSpec {
            template,
            axes,
            branch_policy: BranchPolicy::default(),
            outputs: Outputs::default(),
            margin: STABILITY_MARGIN,
        }
    }

    /// Pre-flight checks; every later failure is recorded per point.
    pub fn check(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Spec(format!(
                "expected 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        for a in &self.axes {
            a.check()?;
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::Spec(format!(
                "axis {} appears twice",
                self.axes[0].param
            )));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(Error::Spec("margin must be finite and nonnegative".into()));
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.values().len()).product()
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// Axis values in axis order.
    pub coords: Vec<f64>,
    /// Index into the ascending-`n2` branch list.
    pub branch: Option<usize>,
    pub branch_count: usize,
    pub n2: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub stable: Option<bool>,
    pub max_re_lambda: Option<f64>,
    pub en_mech_cav1: Option<f64>,
    pub en_mech_cav2: Option<f64>,
    pub en_cav1_cav2: Option<f64>,
    /// Smallest symplectic eigenvalue of the full covariance matrix.
    pub min_symplectic: Option<f64>,
    pub error: Option<&'static str>,
}

impl SweepRecord {
    fn failed(coords: Vec<f64>, branch: Option<usize>, branch_count: usize, e: &Error) -> Self {
        SweepRecord {
            coords,
            branch,
            branch_count,
            n2: None,
            g1: None,
            g2: None,
            stable: None,
            max_re_lambda: None,
            en_mech_cav1: None,
            en_mech_cav2: None,
            en_cav1_cav2: None,
            min_symplectic: None,
            error: Some(e.tag()),
        }
    }

    pub fn has_entanglement(&self) -> bool {
        self.en_mech_cav1.is_some() || self.en_mech_cav2.is_some() || self.en_cav1_cav2.is_some()
    }
}

/// Records of a sweep in deterministic row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<Param>,
    pub records: Vec<SweepRecord>,
}

const FIELDS: [&str; 12] = [
    "branch",
    "branch_count",
    "n2",
    "g1",
    "g2",
    "stable",
    "max_re_lambda",
    "en_mech_cav1",
    "en_mech_cav2",
    "en_cav1_cav2",
    "min_symplectic",
    "error",
];

fn opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

impl SweepResult {
    pub fn header(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|p| p.name().to_string())
            .chain(FIELDS.iter().map(|s| s.to_string()))
            .collect()
    }

    /// CSV with a header row; absent values are empty cells.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.header().join(","))?;
        for r in &self.records {
            let mut cols: Vec<String> = r.coords.iter().map(|x| fmt_float(*x)).collect();
            cols.push(r.branch.map(|b| b.to_string()).unwrap_or_default());
            cols.push(r.branch_count.to_string());
            cols.extend([r.n2, r.g1, r.g2].map(opt));
            cols.push(
                r.stable
                    .map(|s| if s { "1" } else { "0" }.to_string())
                    .unwrap_or_default(),
            );
            cols.extend(
                [
                    r.max_re_lambda,
                    r.en_mech_cav1,
                    r.en_mech_cav2,
                    r.en_cav1_cav2,
                    r.min_symplectic,
                ]
                .map(opt),
            );
            cols.push(r.error.unwrap_or("").to_string());
            writeln!(w, "{}", cols.join(","))?;
        }
        Ok(())
    }

    /// Array of objects keyed like the CSV header; absent values are `null`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .records
            .iter()
            .map(|r| {
                let mut m = serde_json::Map::new();
                for (p, x) in self.axes.iter().zip(&r.coords) {
                    m.insert(p.name().into(), (*x).into());
                }
                m.insert("branch".into(), r.branch.into());
                m.insert("branch_count".into(), r.branch_count.into());
                m.insert("n2".into(), r.n2.into());
                m.insert("g1".into(), r.g1.into());
                m.insert("g2".into(), r.g2.into());
                m.insert("stable".into(), r.stable.into());
                m.insert("max_re_lambda".into(), r.max_re_lambda.into());
                m.insert("en_mech_cav1".into(), r.en_mech_cav1.into());
                m.insert("en_mech_cav2".into(), r.en_mech_cav2.into());
                m.insert("en_cav1_cav2".into(), r.en_cav1_cav2.into());
                m.insert("min_symplectic".into(), r.min_symplectic.into());
                m.insert("error".into(), r.error.into());
                serde_json::Value::Object(m)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Runs the pipeline for one parameter point.
///
/// Never fails: errors become tagged records.
pub fn evaluate_point(
    params: SystemParams<f64>,
    coords: Vec<f64>,
    policy: BranchPolicy,
    outputs: Outputs,
    margin: f64,
) -> Vec<SweepRecord> {
    let v = match validate(params) {
        Ok(v) => v,
        Err(e) => return vec![SweepRecord::failed(coords, None, 0, &e)],
    };
    let branches = match solve_branches(&v) {
        Ok(b) => b,
        Err(e) => return vec![SweepRecord::failed(coords, None, 0, &e)],
    };
    let count = branches.len();

    let mut verdicts = Vec::with_capacity(count);
    for (i, b) in branches.iter().enumerate() {
        match branch_stability(&v, b, margin) {
            Ok(s) => verdicts.push((i, s.stable, s.max_re_lambda)),
            Err(e) => {
                if policy == BranchPolicy::MostStable {
                    return vec![SweepRecord::failed(coords, Some(i), count, &e)];
                }
                verdicts.push((i, false, f64::NAN));
            }
        }
    }

    let chosen: Vec<(usize, bool, f64)> = match policy {
        BranchPolicy::All => verdicts,
        BranchPolicy::MostStable => {
            // Branches are sorted by n2, so the first minimum wins ties.
            let pick = |stable_only: bool| {
                verdicts.iter().filter(|v| !stable_only || v.1).fold(
                    None::<(usize, bool, f64)>,
                    |best, v| match best {
                        Some(b) if b.2 <= v.2 => Some(b),
                        _ => Some(*v),
                    },
                )
            };
            pick(true).or_else(|| pick(false)).into_iter().collect()
        }
    };

    chosen
        .into_iter()
        .map(|(i, stable, max_re)| {
            if max_re.is_nan() {
                return SweepRecord::failed(coords.clone(), Some(i), count, &Error::EigenFailure);
            }
            branch_record(
                &v,
                &branches[i],
                coords.clone(),
                i,
                count,
                stable,
                max_re,
                outputs,
            )
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn branch_record(
    v: &ValidatedParams<f64>,
    b: &SteadyStateBranch<f64>,
    coords: Vec<f64>,
    index: usize,
    count: usize,
    stable: bool,
    max_re: f64,
    outputs: Outputs,
) -> SweepRecord {
    let mut rec = SweepRecord {
        coords,
        branch: Some(index),
        branch_count: count,
        n2: Some(b.n2),
        g1: Some(b.g1),
        g2: Some(b.g2),
        stable: Some(stable),
        max_re_lambda: Some(max_re),
        en_mech_cav1: None,
        en_mech_cav2: None,
        en_cav1_cav2: None,
        min_symplectic: None,
        error: None,
    };
    if !(stable && outputs.entanglement) {
        return rec;
    }
    let mode = if outputs.paper_literal_drift {
        DriftMode::PaperLiteral
    } else {
        DriftMode::Consistent
    };
    let cm = match branch_covariance(v, b, mode) {
        Ok(cm) => cm,
        Err(e) => {
            rec.error = Some(e.tag());
            return rec;
        }
    };
    rec.min_symplectic = min_symplectic_eigenvalue(&cm).ok();
    match pairwise_all(&cm) {
        Ok(en) => {
            rec.en_mech_cav1 = Some(en.mech_cav1.e_n);
            rec.en_mech_cav2 = Some(en.mech_cav2.e_n);
            rec.en_cav1_cav2 = Some(en.cav1_cav2.e_n);
        }
        Err(e) => rec.error = Some(e.tag()),
    }
    rec
}

/// Evaluates every grid point in parallel on `workers` threads (all cores if `None`).
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> Result<SweepResult> {
    spec.check()?;
    let values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let n = values.iter().map(Vec::len).product();
    let per_point = par_map(n, workers, |k| {
        let mut rest = k;
        let mut coords = Vec::with_capacity(values.len());
        let mut p = spec.template;
        for (axis, vals) in spec.axes.iter().zip(&values) {
            let x = vals[rest % vals.len()];
            rest /= vals.len();
            p = axis.param.apply(p, x);
            coords.push(x);
        }
        evaluate_point(p, coords, spec.branch_policy, spec.outputs, spec.margin)
    })?;
    Ok(SweepResult {
        axes: spec.axes.iter().map(|a| a.param).collect(),
        records: per_point.into_iter().flatten().collect(),
    })
}
