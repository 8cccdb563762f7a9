//! Named sweep and basin configurations.

use super::{BranchPolicy, SweepSpec};
use crate::error::{Error, Result};
use crate::grid::{Axis, Param};
use crate::model::SystemParams;
use crate::stability::{BasinSpec, BranchRule, STABILITY_MARGIN};

pub const PRESET_NAMES: [&str; 16] = [
    "fig1a", "fig1b", "fig1c", "fig1d", "fig2ab", "fig3a", "fig3b", "fig3c", "fig3d", "fig4",
    "fig6a", "fig6b", "fig6c", "fig6d", "fig2c", "fig2d",
];

const BASIN_STEPS: usize = 200;
const CURVE_STEPS: usize = 200;
const CHI_VALUES: [f64; 4] = [0.0, 0.02, 0.05, 0.1];

fn template(kappa: f64, j: f64) -> SystemParams<f64> {
    SystemParams {
        kappa,
        j,
        ..SystemParams::default()
    }
}

fn alpha_basin() -> Axis {
    Axis::log(Param::AlphaIn, 1e-6, 1e4, BASIN_STEPS)
}

fn alpha_curve() -> Axis {
    Axis::log(Param::AlphaIn, 1.0, 1e4, CURVE_STEPS)
}

/// Stability-map presets (`fig1a`..`fig1d`).
pub fn basin_preset(name: &str) -> Result<BasinSpec> {
    let j_axis = Axis::linear(Param::J, 0.0, 1.2, BASIN_STEPS);
    let kappa_axis = Axis::linear(Param::Kappa, 0.0, 1.0, BASIN_STEPS);
    let (template, y) = match name {
        "fig1a" => (template(0.1, 0.8), j_axis),
        "fig1b" => (template(0.8, 0.8), j_axis),
        "fig1c" => (template(0.1, 0.2), kappa_axis),
        "fig1d" => (template(0.1, 1.0), kappa_axis),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(BasinSpec {
        template,
        x: alpha_basin(),
        y,
        rule: BranchRule::AnyStable,
        margin: STABILITY_MARGIN,
    })
}

/// Sweep presets. The `fig1*` names give the same grids as [`basin_preset`]
/// with full records per cell.
pub fn figure_preset(name: &str) -> Result<SweepSpec> {
    if name.starts_with("fig1") {
        let b = basin_preset(name)?;
        return Ok(SweepSpec::new(b.template, vec![b.x, b.y]));
    }
    let chi_list = || Axis::list(Param::Chi, CHI_VALUES.to_vec());
    let spec = match name {
        "fig2ab" => {
            let mut s = SweepSpec::new(
                template(0.1, 0.8),
                vec![alpha_basin(), Axis::list(Param::Kappa, vec![0.1, 0.4, 0.8])],
            );
            s.branch_policy = BranchPolicy::All;
            s
        }
        "fig2c" => single_point(SystemParams {
            alpha_in: 1e2,
            ..template(0.8, 0.8)
        }),
        "fig2d" => single_point(SystemParams {
            alpha_in: 1e-5,
            ..template(0.8, 0.42)
        }),
        // The conventional system: the gain cavity decoupled.
        "fig3a" => SweepSpec::new(template(-1.0, 0.0), vec![alpha_curve()]),
        "fig3b" => SweepSpec::new(
            template(0.1, 0.8),
            vec![
                alpha_curve(),
                Axis::list(Param::J, vec![0.34, 0.5, 0.8, 1.0]),
            ],
        ),
        "fig3c" => SweepSpec::new(template(1e-5, 1.0), vec![alpha_curve(), chi_list()]),
        "fig3d" => SweepSpec::new(
            template(1e-5, 0.8),
            vec![Axis::linear(Param::J, 0.0, 1.2, 121), chi_list()],
        ),
        "fig4" => SweepSpec::new(
            SystemParams {
                n_a: 1e-3,
                ..template(1e-5, 0.8)
            },
            vec![Axis::linear(Param::NTh, 0.0, 600.0, 61)],
        ),
        "fig6a" => loss_comparison(1.0, 0.1),
        "fig6b" => loss_comparison(1.0, 0.8),
        "fig6c" => loss_comparison(1.0, 0.1),
        "fig6d" => loss_comparison(0.8, 0.1),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(spec)
}

fn single_point(p: SystemParams<f64>) -> SweepSpec {
    let a = p.alpha_in;
    let mut s = SweepSpec::new(p, vec![Axis::list(Param::AlphaIn, vec![a])]);
    s.branch_policy = BranchPolicy::All;
    s
}

/// Gain-loss (`+kappa`) against loss-loss (`-kappa`).
fn loss_comparison(j: f64, kappa: f64) -> SweepSpec {
    SweepSpec::new(
        template(kappa, j),
        vec![alpha_curve(), Axis::list(Param::Kappa, vec![kappa, -kappa])],
    )
}
