//! System parameters, supermode spectrum and PT-regime classification.
//!
//! All rates are stored in units of the passive-cavity loss `gamma`; after
//! [`validate`] the parameter set always has `gamma == 1`.

use std::fmt;
use std::ops::Deref;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, cabs, Real};

/// Default EP tolerance for [`classify`], in units of `gamma`.
pub const EP_TOLERANCE: f64 = 1e-9;

/// Physical rates and drive settings of the gain-loss optomechanical system.
///
/// Cavity 1 is the active (gain `kappa`) resonator, cavity 2 the passive
/// (loss `gamma`) resonator hosting the mechanical mode and the parametric
/// amplifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams<T> {
    /// Mechanical frequency.
    pub omega_m: T,
    /// Passive-cavity loss rate (the unit of every other rate).
    pub gamma: T,
    /// Gain of cavity 1; negative values give a loss-loss pair.
    pub kappa: T,
    /// Mechanical damping.
    pub gamma_m: T,
    /// Single-photon optomechanical coupling.
    pub g: T,
    /// Optical tunneling rate.
    #[serde(rename = "J")]
    pub j: T,
    /// Drive detuning `omega_p - omega_c` (blue side, must be positive).
    pub delta: T,
    /// Parametric-amplifier gain.
    pub chi: T,
    /// Parametric-amplifier pump phase in radians.
    pub theta: T,
    /// Coherent drive amplitude, units of sqrt(gamma).
    pub alpha_in: T,
    /// Mechanical thermal occupation.
    pub n_th: T,
    /// Optical input occupation.
    pub n_a: T,
}

impl<T: Real> Default for SystemParams<T> {
    /// Experimental values quoted for the microresonator pair (omega_m/2pi =
    /// 23 MHz, gamma/2pi = 1 MHz) with the drive on the blue sideband.
    fn default() -> Self {
        let omega_m = T::lit(23.0);
        SystemParams {
            omega_m,
            gamma: T::one(),
            kappa: T::lit(0.1),
            gamma_m: T::lit(1.63e-3),
            g: T::lit(7.4e-5),
            j: T::lit(0.8),
            delta: omega_m,
            chi: T::zero(),
            theta: T::zero(),
            alpha_in: T::lit(3.0e3),
            n_th: T::zero(),
            n_a: T::zero(),
        }
    }
}

impl<T: Real> SystemParams<T> {
    /// Converts every field to `f64`.
    pub fn to_f64(&self) -> SystemParams<f64> {
        SystemParams {
            omega_m: self.omega_m.as_f64(),
            gamma: self.gamma.as_f64(),
            kappa: self.kappa.as_f64(),
            gamma_m: self.gamma_m.as_f64(),
            g: self.g.as_f64(),
            j: self.j.as_f64(),
            delta: self.delta.as_f64(),
            chi: self.chi.as_f64(),
            theta: self.theta.as_f64(),
            alpha_in: self.alpha_in.as_f64(),
            n_th: self.n_th.as_f64(),
            n_a: self.n_a.as_f64(),
        }
    }

    pub fn validate(self) -> Result<ValidatedParams<T>> {
        validate(self)
    }
}

impl SystemParams<f64> {
    /// Narrows to another precision.
    pub fn cast<T: Real>(&self) -> SystemParams<T> {
        SystemParams {
            omega_m: T::lit(self.omega_m),
            gamma: T::lit(self.gamma),
            kappa: T::lit(self.kappa),
            gamma_m: T::lit(self.gamma_m),
            g: T::lit(self.g),
            j: T::lit(self.j),
            delta: T::lit(self.delta),
            chi: T::lit(self.chi),
            theta: T::lit(self.theta),
            alpha_in: T::lit(self.alpha_in),
            n_th: T::lit(self.n_th),
            n_a: T::lit(self.n_a),
        }
    }
}

/// Parameters that passed [`validate`]; `gamma` is exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValidatedParams<T>(SystemParams<T>);

impl<T> Deref for ValidatedParams<T> {
    type Target = SystemParams<T>;

    fn deref(&self) -> &SystemParams<T> {
        &self.0
    }
}

impl<T: Real> ValidatedParams<T> {
    pub fn into_inner(self) -> SystemParams<T> {
        self.0
    }
}

/// Checks the invariants and rescales every rate to units of `gamma`.
///
/// Rates are divided by `gamma`, `alpha_in` by `sqrt(gamma)`; `theta` and the
/// occupations are dimensionless and left alone.
pub fn validate<T: Real>(p: SystemParams<T>) -> Result<ValidatedParams<T>> {
    let fields = [
        ("omega_m", p.omega_m),
        ("gamma", p.gamma),
        ("kappa", p.kappa),
        ("gamma_m", p.gamma_m),
        ("g", p.g),
        ("J", p.j),
        ("delta", p.delta),
        ("chi", p.chi),
        ("theta", p.theta),
        ("alpha_in", p.alpha_in),
        ("n_th", p.n_th),
        ("n_a", p.n_a),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            return Err(Error::domain(name, "must be finite"));
        }
    }
    let zero = T::zero();
    let positive = [
        ("gamma", p.gamma),
        ("omega_m", p.omega_m),
        ("gamma_m", p.gamma_m),
    ];
    for (name, value) in positive {
        if value <= zero {
            return Err(Error::domain(name, format!("must be > 0, got {value}")));
        }
    }
    if p.delta <= zero {
        return Err(Error::domain(
            "delta",
            format!("drive must be blue-detuned (delta > 0), got {}", p.delta),
        ));
    }
    let nonnegative = [
        ("g", p.g),
        ("J", p.j),
        ("alpha_in", p.alpha_in),
        ("n_th", p.n_th),
        ("n_a", p.n_a),
    ];
    for (name, value) in nonnegative {
        if value < zero {
            return Err(Error::domain(name, format!("must be >= 0, got {value}")));
        }
    }

    let scale = p.gamma;
    let root = scale.sqrt();
    Ok(ValidatedParams(SystemParams {
        omega_m: p.omega_m / scale,
        gamma: T::one(),
        kappa: p.kappa / scale,
        gamma_m: p.gamma_m / scale,
        g: p.g / scale,
        j: p.j / scale,
        delta: p.delta / scale,
        chi: p.chi / scale,
        theta: p.theta,
        alpha_in: p.alpha_in / root,
        n_th: p.n_th,
        n_a: p.n_a,
    }))
}

/// Like [`validate`], but any finite detuning is accepted.
///
/// The supermode spectrum does not depend on the drive convention, so
/// resonant or red-detuned configurations are meaningful there.
pub fn validate_optics<T: Real>(p: SystemParams<T>) -> Result<SystemParams<T>> {
    if !p.delta.is_finite() {
        return Err(Error::domain("delta", "must be finite"));
    }
    let mut rest = validate(SystemParams {
        delta: T::one(),
        ..p
    })?
    .into_inner();
    rest.delta = p.delta / p.gamma;
    Ok(rest)
}

/// Complex eigenfrequencies of the two optical supermodes.
///
/// The `+` mode carries the principal square root of the radical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupermodePair<T> {
    pub omega_plus: Complex<T>,
    pub omega_minus: Complex<T>,
}

impl<T: Real> SupermodePair<T> {
    pub fn splitting(&self) -> T {
        cabs(self.omega_plus - self.omega_minus)
    }
}

/// `omega_pm = (4i·delta - (gamma - kappa) ± sqrt((gamma + kappa)^2 - 16 J^2)) / 4`.
pub fn supermodes<T: Real>(p: &SystemParams<T>) -> SupermodePair<T> {
    let four = T::lit(4.0);
    let centre = c(-(p.gamma - p.kappa), four * p.delta);
    let sum = p.gamma + p.kappa;
    let radicand = sum * sum - T::lit(16.0) * p.j * p.j;
    let root = if radicand >= T::zero() {
        c(radicand.sqrt(), T::zero())
    } else {
        c(T::zero(), (-radicand).sqrt())
    };
    SupermodePair {
        omega_plus: (centre + root).unscale(four),
        omega_minus: (centre - root).unscale(four),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    BrokenPT,
    #[serde(rename = "EP")]
    ExceptionalPoint,
    UnbrokenPT,
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeTag::BrokenPT => "BrokenPT",
            RegimeTag::ExceptionalPoint => "EP",
            RegimeTag::UnbrokenPT => "UnbrokenPT",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime<T> {
    pub tag: RegimeTag,
    /// Critical tunneling `(gamma + kappa) / 4`.
    pub j_ep: T,
}

/// Critical tunneling rate at which the supermodes coalesce.
pub fn j_ep<T: Real>(p: &SystemParams<T>) -> T {
    (p.gamma + p.kappa) / T::lit(4.0)
}

/// Three-way comparison of `J` against the exceptional point, `tol` wide.
pub fn classify<T: Real>(p: &SystemParams<T>, tol: T) -> Regime<T> {
    let j_ep = j_ep(p);
    let tag = if p.j > j_ep + tol {
        RegimeTag::UnbrokenPT
    } else if p.j < j_ep - tol {
        RegimeTag::BrokenPT
    } else {
        RegimeTag::ExceptionalPoint
    };
    Regime { tag, j_ep }
}

const PLANCK: f64 = 6.626_070_15e-34;
const BOLTZMANN: f64 = 1.380_649e-23;

/// Bose occupation of a mode of ordinary frequency `freq_hz` (omega/2pi) at
/// temperature `temperature` in kelvin. Zero at zero temperature.
pub fn thermal_occupation(freq_hz: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = PLANCK * freq_hz / (BOLTZMANN * temperature);
    1.0 / x.exp_m1()
}
