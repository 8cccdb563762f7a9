//! Parameter axes shared by basin maps and sweeps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// A parameter that can be scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "alpha_in")]
    AlphaIn,
    #[serde(rename = "J")]
    J,
    #[serde(rename = "kappa")]
    Kappa,
    #[serde(rename = "chi")]
    Chi,
    #[serde(rename = "n_th")]
    NTh,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::AlphaIn => "alpha_in",
            Param::J => "J",
            Param::Kappa => "kappa",
            Param::Chi => "chi",
            Param::NTh => "n_th",
        }
    }

    /// Returns `p` with this parameter replaced by `value`.
    pub fn apply(self, mut p: SystemParams<f64>, value: f64) -> SystemParams<f64> {
        match self {
            Param::AlphaIn => p.alpha_in = value,
            Param::J => p.j = value,
            Param::Kappa => p.kappa = value,
            Param::Chi => p.chi = value,
            Param::NTh => p.n_th = value,
        }
        p
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha_in" | "alpha-in" => Ok(Param::AlphaIn),
            "J" | "j" => Ok(Param::J),
            "kappa" => Ok(Param::Kappa),
            "chi" => Ok(Param::Chi),
            "n_th" | "n-th" => Ok(Param::NTh),
            other => Err(Error::Spec(format!("unknown axis parameter `{other}`"))),
        }
    }
}

/// Sample points along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scale", rename_all = "lowercase")]
pub enum Grid {
    Linear {
        min: f64,
        max: f64,
        steps: usize,
    },
    Log {
        min: f64,
        max: f64,
        steps: usize,
    },
    /// Explicit values, used for families of curves.
    List {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    #[serde(flatten)]
    pub grid: Grid,
}

impl Axis {
    pub fn linear(param: Param, min: f64, max: f64, steps: usize) -> Self {
        Axis {
            param,
            grid: Grid::Linear { min, max, steps },
        }
    }

    pub fn log(param: Param, min: f64, max: f64, steps: usize) -> Self {
        Axis {
            param,
            grid: Grid::Log { min, max, steps },
        }
    }

    pub fn list(param: Param, values: Vec<f64>) -> Self {
        Axis {
            param,
            grid: Grid::List { values },
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Spec(format!("axis {}: {msg}", self.param)));
        match &self.grid {
            Grid::Linear { min, max, steps } | Grid::Log { min, max, steps } => {
                if !min.is_finite() || !max.is_finite() {
                    return bad("bounds must be finite".into());
                }
                if *steps < 2 {
                    return bad(format!("steps must be at least 2, got {steps}"));
                }
                if min > max {
                    return bad(format!("min {min} exceeds max {max}"));
                }
                if matches!(self.grid, Grid::Log { .. }) && *min <= 0.0 {
                    return bad(format!("log scale needs min > 0, got {min}"));
                }
            }
            Grid::List { values } => {
                if values.is_empty() {
                    return bad("empty value list".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("values must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// Sample values; equal bounds collapse to a single point.
    pub fn values(&self) -> Vec<f64> {
        match &self.grid {
            Grid::Linear { min, max, steps } => {
                if min == max {
                    return vec![*min];
                }
                let last = (steps - 1) as f64;
                (0..*steps)
                    .map(|k| match k {
                        0 => *min,
                        k if k == steps - 1 => *max,
                        k => min + (max - min) * k as f64 / last,
                    })
                    .collect()
            }
            Grid::Log { min, max, steps } => {
                if min == max {
                    return vec![*min];
                }
                let (lo, hi) = (min.ln(), max.ln());
                let last = (steps - 1) as f64;
                (0..*steps)
                    .map(|k| match k {
                        0 => *min,
                        k if k == steps - 1 => *max,
                        k => (lo + (hi - lo) * k as f64 / last).exp(),
                    })
                    .collect()
            }
            Grid::List { values } => values.clone(),
        }
    }
}

/// Maps `f` over `0..n` on a pool of `workers` threads (all cores if `None`).
///
/// The output order is the index order whatever the scheduling.
pub fn par_map<R, F>(n: usize, workers: Option<usize>, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if workers == Some(0) {
        return Err(Error::Spec("worker count must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Spec(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}

/// Formats a float with 17 significant digits, locale free.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
