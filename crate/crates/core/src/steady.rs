//! Mean-field fixed points of the driven three-mode system.
//!
//! The mechanical amplitude is eliminated in closed form,
//! `beta = i g n2 / (i omega_m + gamma_m / 2)`, and the gain-cavity amplitude
//! through `alpha1 = i J alpha2 / (i delta + kappa / 2)`. What remains is one
//! complex equation for `alpha2`,
//!
//! ```text
//! D(delta~) alpha2 + 2 chi e^{i theta} conj(alpha2) = i sqrt(gamma) alpha_in
//! D(delta~) = i delta~ - gamma/2 + J^2 / (i delta + kappa/2)
//! delta~    = delta + s n2,   s = 2 g^2 omega_m / (omega_m^2 + gamma_m^2/4)
//! ```
//!
//! Without the parametric amplifier `|D|^2 n2 = gamma alpha_in^2` is a real
//! cubic in `n2` and every branch comes out of the closed form. With it, the
//! linear 2x2 problem for `(Re alpha2, Im alpha2)` is solved at fixed `n2`
//! and the self-consistency `|alpha2(n2)|^2 = n2` is closed by a scan plus
//! bracketed root find.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SystemParams, ValidatedParams};
use crate::roots::{bracketed_root, monic_cubic_real_roots};
use crate::scalar::{c, cabs, ci, cr, polar, Real};

/// Smallest `|i delta + kappa/2|` for which the gain cavity can be eliminated.
pub const POLE_THRESHOLD: f64 = 1e-14;

/// Residual bound relative to `max(1, sqrt(gamma) alpha_in)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const MIN_SCAN_POINTS: usize = 2000;
const MAX_SCAN_POINTS: usize = 4_000_000;
const MAX_BRACKET_EXPANSIONS: usize = 60;

/// One self-consistent steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateBranch<T> {
    pub alpha1_s: Complex<T>,
    pub alpha2_s: Complex<T>,
    pub beta_s: Complex<T>,
    /// `|alpha2_s|^2`.
    pub n2: T,
    /// `delta + 2 g Re(beta_s)`.
    pub delta_tilde: T,
    /// Distant coupling `g |alpha1_s|`.
    pub g1: T,
    /// Direct coupling `g |alpha2_s|`.
    pub g2: T,
}

impl<T: Real> SteadyStateBranch<T> {
    /// The undriven fixed point.
    pub fn zero(p: &SystemParams<T>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        SteadyStateBranch {
            alpha1_s: zero,
            alpha2_s: zero,
            beta_s: zero,
            n2: T::zero(),
            delta_tilde: p.delta,
            g1: T::zero(),
            g2: T::zero(),
        }
    }

    /// Builds the branch implied by a loss-cavity amplitude.
    ///
    /// `beta`, `delta~`, `alpha1` and the couplings all follow from `alpha2`.
    pub fn from_alpha2(p: &SystemParams<T>, alpha2: Complex<T>) -> Result<Self> {
        let pole = gain_pole(p)?;
        let n2 = alpha2.norm_sqr();
        let beta = mechanical_amplitude(p, n2);
        let alpha1 = ci(p.j) * alpha2 / pole;
        Ok(SteadyStateBranch {
            alpha1_s: alpha1,
            alpha2_s: alpha2,
            beta_s: beta,
            n2,
            delta_tilde: p.delta + T::lit(2.0) * p.g * beta.re,
            g1: p.g * cabs(alpha1),
            g2: p.g * cabs(alpha2),
        })
    }

    pub fn to_record(&self) -> BranchRecord {
        BranchRecord {
            alpha1_re: self.alpha1_s.re.as_f64(),
            alpha1_im: self.alpha1_s.im.as_f64(),
            alpha2_re: self.alpha2_s.re.as_f64(),
            alpha2_im: self.alpha2_s.im.as_f64(),
            beta_re: self.beta_s.re.as_f64(),
            beta_im: self.beta_s.im.as_f64(),
            n2: self.n2.as_f64(),
            delta_tilde: self.delta_tilde.as_f64(),
            g1: self.g1.as_f64(),
            g2: self.g2.as_f64(),
        }
    }
}

/// Flat serialized form of a branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchRecord {
    pub alpha1_re: f64,
    pub alpha1_im: f64,
    pub alpha2_re: f64,
    pub alpha2_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub n2: f64,
    pub delta_tilde: f64,
    pub g1: f64,
    pub g2: f64,
}

impl BranchRecord {
    pub fn to_branch(&self) -> SteadyStateBranch<f64> {
        SteadyStateBranch {
            alpha1_s: Complex::new(self.alpha1_re, self.alpha1_im),
            alpha2_s: Complex::new(self.alpha2_re, self.alpha2_im),
            beta_s: Complex::new(self.beta_re, self.beta_im),
            n2: self.n2,
            delta_tilde: self.delta_tilde,
            g1: self.g1,
            g2: self.g2,
        }
    }
}

fn gain_pole<T: Real>(p: &SystemParams<T>) -> Result<Complex<T>> {
    let pole = c(p.kappa / T::lit(2.0), p.delta);
    let magnitude = cabs(pole);
    if magnitude < T::lit(POLE_THRESHOLD) {
        return Err(Error::SingularDecoupling {
            magnitude: magnitude.as_f64(),
        });
    }
    Ok(pole)
}

fn mechanical_amplitude<T: Real>(p: &SystemParams<T>, n2: T) -> Complex<T> {
    ci(p.g * n2) / c(p.gamma_m / T::lit(2.0), p.omega_m)
}

/// Detuning shift per intracavity photon, `2 g^2 omega_m / (omega_m^2 + gamma_m^2/4)`.
pub fn shift_per_photon<T: Real>(p: &SystemParams<T>) -> T {
    let half = p.gamma_m / T::lit(2.0);
    T::lit(2.0) * p.g * p.g * p.omega_m / (p.omega_m * p.omega_m + half * half)
}

/// Norm of the three stationarity residuals evaluated at `b`.
pub fn residual<T: Real>(p: &SystemParams<T>, b: &SteadyStateBranch<T>) -> T {
    let two = T::lit(2.0);
    let r1 = c(p.kappa / two, p.delta) * b.alpha1_s - ci(p.j) * b.alpha2_s;
    let detuning = p.delta + two * p.g * b.beta_s.re;
    let pa = polar(two * p.chi, p.theta);
    let r2 = c(-p.gamma / two, detuning) * b.alpha2_s
        - ci(p.j) * b.alpha1_s
        - ci(p.gamma.sqrt() * p.alpha_in)
        + pa * b.alpha2_s.conj();
    let r3 = -c(p.gamma_m / two, p.omega_m) * b.beta_s + ci(p.g * b.alpha2_s.norm_sqr());
    (r1.norm_sqr() + r2.norm_sqr() + r3.norm_sqr()).sqrt()
}

/// Residual bound for branch acceptance at this drive and precision.
pub fn residual_bound<T: Real>(p: &SystemParams<T>) -> T {
    T::tolerance(RESIDUAL_TOLERANCE) * T::one().max(p.gamma.sqrt() * p.alpha_in)
}

/// All steady-state branches, ascending in `n2`.
pub fn solve_branches<T: Real>(p: &ValidatedParams<T>) -> Result<Vec<SteadyStateBranch<T>>> {
    let pole = gain_pole(p)?;
    if p.alpha_in == T::zero() {
        return Ok(vec![SteadyStateBranch::zero(p)]);
    }

    let photon_numbers = if p.chi == T::zero() {
        cubic_photon_numbers(p, pole)
    } else {
        scanned_photon_numbers(p, pole)?
    };

    let bound = residual_bound(p);
    let mut branches = Vec::with_capacity(photon_numbers.len());
    for n in photon_numbers {
        let alpha2 = solve_alpha2(p, pole, n).ok_or_else(|| {
            Error::NoConvergence(format!("amplitude equation singular at n2 = {n}"))
        })?;
        let branch = SteadyStateBranch::from_alpha2(p, alpha2)?;
        let r = residual(p, &branch);
        if !(r <= bound) {
            return Err(Error::NoConvergence(format!(
                "branch at n2 = {} has residual {:e} above {:e}",
                branch.n2, r, bound
            )));
        }
        branches.push(branch);
    }
    branches.sort_by(|a, b| a.n2.partial_cmp(&b.n2).expect("finite photon numbers"));
    branches.dedup_by(|a, b| (a.n2 - b.n2).abs() <= T::lit(1e-12) * a.n2.max(b.n2));
    if branches.is_empty() {
        return Err(Error::NoConvergence("no steady state found".into()));
    }
    Ok(branches)
}

/// Effective couplings `(g |alpha1_s|, g |alpha2_s|)` recomputed from the amplitudes.
pub fn effective_couplings<T: Real>(p: &SystemParams<T>, b: &SteadyStateBranch<T>) -> (T, T) {
    (p.g * cabs(b.alpha1_s), p.g * cabs(b.alpha2_s))
}

/// `D` without its photon-number dependence: `(a, b0)` with `D = a + i (b0 + s n2)`.
fn reduced_dispersion<T: Real>(p: &SystemParams<T>, pole: Complex<T>) -> (T, T) {
    let coupling = cr(p.j * p.j) / pole;
    (-p.gamma / T::lit(2.0) + coupling.re, p.delta + coupling.im)
}

/// Solves `D alpha + 2 chi e^{i theta} conj(alpha) = i sqrt(gamma) alpha_in` at
/// the detuning implied by `n`.
fn solve_alpha2<T: Real>(p: &SystemParams<T>, pole: Complex<T>, n: T) -> Option<Complex<T>> {
    let (a, b0) = reduced_dispersion(p, pole);
    let d = c(a, b0 + shift_per_photon(p) * n);
    let drive = ci(p.gamma.sqrt() * p.alpha_in);
    if p.chi == T::zero() {
        return Some(drive / d);
    }
    let pa = polar(T::lit(2.0) * p.chi, p.theta);
    // [[dr + cr, ci - di], [di + ci, dr - cr]] (x, y)^T = (Re rhs, Im rhs)^T
    let m11 = d.re + pa.re;
    let m12 = pa.im - d.im;
    let m21 = d.im + pa.im;
    let m22 = d.re - pa.re;
    let det = m11 * m22 - m12 * m21;
    if det == T::zero() || !det.is_finite() {
        return None;
    }
    let x = (drive.re * m22 - m12 * drive.im) / det;
    let y = (m11 * drive.im - m21 * drive.re) / det;
    Some(c(x, y))
}

/// Photon numbers from the closed-form cubic `(a^2 + (b0 + s n)^2) n = gamma alpha_in^2`.
fn cubic_photon_numbers<T: Real>(p: &SystemParams<T>, pole: Complex<T>) -> Vec<T> {
    let (a, b0) = reduced_dispersion(p, pole);
    let s = shift_per_photon(p);
    let load = p.gamma * p.alpha_in * p.alpha_in;
    let a2 = a * a;
    if s == T::zero() {
        return vec![load / (a2 + b0 * b0)];
    }
    // In y = b0 + s n the coefficients are O(1):
    // (y^2 + a^2)(y - b0) = s load.
    let roots = monic_cubic_real_roots(-b0, a2, -(a2 * b0 + s * load));
    roots
        .into_iter()
        .map(|y| polish_photon_number(a, b0, s, load, (y - b0) / s))
        .filter(|n| *n >= T::zero() && n.is_finite())
        .collect()
}

fn polish_photon_number<T: Real>(a: T, b0: T, s: T, load: T, mut n: T) -> T {
    let two = T::lit(2.0);
    let f = |n: T| {
        let y = b0 + s * n;
        (a * a + y * y) * n - load
    };
    let mut fn_ = f(n);
    for _ in 0..4 {
        let y = b0 + s * n;
        let df = a * a + y * y + two * s * n * y;
        if df == T::zero() {
            break;
        }
        let next = n - fn_ / df;
        let f_next = f(next);
        if !(f_next.abs() < fn_.abs()) {
            break;
        }
        n = next;
        fn_ = f_next;
    }
    n
}

/// Photon numbers solving `|alpha2(n)|^2 = n` with the parametric amplifier on.
fn scanned_photon_numbers<T: Real>(p: &SystemParams<T>, pole: Complex<T>) -> Result<Vec<T>> {
    let s = shift_per_photon(p);
    if s == T::zero() {
        let alpha2 = solve_alpha2(p, pole, T::zero()).ok_or_else(|| {
            Error::NoConvergence("parametric amplifier exactly at threshold".into())
        })?;
        return Ok(vec![alpha2.norm_sqr()]);
    }

    let mismatch = |n: T| match solve_alpha2(p, pole, n) {
        Some(alpha) => alpha.norm_sqr() - n,
        None => T::max_value().unwrap_or(T::one()),
    };

    let load = p.gamma * p.alpha_in * p.alpha_in;
    let mut upper = T::lit(40.0) * load / (p.gamma * p.gamma);
    let mut h_upper = mismatch(upper);
    let mut expansions = 0;
    while !(h_upper < T::zero()) {
        expansions += 1;
        if expansions > MAX_BRACKET_EXPANSIONS {
            return Err(Error::NoConvergence(format!(
                "no upper bracket for n2 after {MAX_BRACKET_EXPANSIONS} expansions"
            )));
        }
        upper *= T::lit(4.0);
        h_upper = mismatch(upper);
    }

    // Uniform grid in n2 is uniform in delta~; resolve features down to 2e-3 gamma.
    let span = (s * upper / (T::lit(2e-3) * p.gamma)).as_f64();
    let points = if span.is_finite() {
        (span.ceil() as usize).clamp(MIN_SCAN_POINTS, MAX_SCAN_POINTS)
    } else {
        MAX_SCAN_POINTS
    };
    let step = upper / T::lit(points as f64);

    let mut roots = Vec::new();
    let mut n_prev = T::zero();
    let mut h_prev = mismatch(n_prev);
    for k in 1..=points {
        let n_next = if k == points {
            upper
        } else {
            step * T::lit(k as f64)
        };
        let h_next = if k == points {
            h_upper
        } else {
            mismatch(n_next)
        };
        if h_prev == T::zero() {
            roots.push(n_prev);
        } else if (h_prev > T::zero()) != (h_next > T::zero()) && h_next != T::zero() {
            let root =
                bracketed_root(mismatch, n_prev, n_next, h_prev, h_next, 400).ok_or_else(|| {
                    Error::NoConvergence(format!("bracket [{n_prev}, {n_next}] did not converge"))
                })?;
            roots.push(root);
        }
        n_prev = n_next;
        h_prev = h_next;
    }
    if h_prev == T::zero() {
        roots.push(n_prev);
    }
    Ok(roots)
}
