//! Noise-free mean-field dynamics, integrated with an adaptive
//! Dormand-Prince 5(4) pair.

use std::io::Write;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::fmt_float;
use crate::model::SystemParams;
use crate::scalar::{c, cabs, ci, polar, Real};
use crate::steady::SteadyStateBranch;

/// Amplitude beyond which integration stops with [`Status::Diverged`].
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Accepted-step budget of one integration.
///
/// Large amplitudes push the radiation-pressure detuning up and the required
/// step down; the budget keeps such runs finite.
pub const MAX_STEPS: usize = 5_000_000;

/// Default horizon, several mechanical damping times.
pub const DEFAULT_T_END: f64 = 2000.0;

/// `(alpha1, alpha2, beta)`.
pub type State<T> = [Complex<T>; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Status<T> {
    Completed,
    /// Stopped early because an amplitude crossed the guard or went non-finite.
    Diverged {
        t: T,
    },
    /// Stopped at time `t` after [`MAX_STEPS`] accepted steps.
    StepLimit {
        t: T,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<State<T>>,
    pub status: Status<T>,
}

impl<T: Real> Trajectory<T> {
    /// `(|alpha1|^2, |alpha2|^2)` per sample.
    pub fn intensities(&self) -> Vec<(T, T)> {
        self.states
            .iter()
            .map(|s| (s[0].norm_sqr(), s[1].norm_sqr()))
            .collect()
    }

    pub fn last(&self) -> State<T> {
        *self
            .states
            .last()
            .expect("trajectory holds the initial state")
    }

    /// CSV with columns `t`, real and imaginary parts of the amplitudes, `I1`, `I2`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "t,alpha1_re,alpha1_im,alpha2_re,alpha2_im,beta_re,beta_im,I1,I2"
        )?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let cols = [
                t.as_f64(),
                s[0].re.as_f64(),
                s[0].im.as_f64(),
                s[1].re.as_f64(),
                s[1].im.as_f64(),
                s[2].re.as_f64(),
                s[2].im.as_f64(),
                s[0].norm_sqr().as_f64(),
                s[1].norm_sqr().as_f64(),
            ];
            let line: Vec<String> = cols.iter().map(|x| fmt_float(*x)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Time derivative of the mean-field amplitudes.
pub fn rhs<T: Real>(p: &SystemParams<T>, y: &State<T>) -> State<T> {
    let two = T::lit(2.0);
    let [a1, a2, b] = *y;
    let detuning = p.delta + two * p.g * b.re;
    let da1 = c(p.kappa / two, p.delta) * a1 - ci(p.j) * a2;
    let da2 = c(-p.gamma / two, detuning) * a2 - ci(p.j) * a1 - ci(p.gamma.sqrt() * p.alpha_in)
        + polar(two * p.chi, p.theta) * a2.conj();
    let db = -c(p.gamma_m / two, p.omega_m) * b + ci(p.g * a2.norm_sqr());
    [da1, da2, db]
}

/// The branch amplitudes as an integrator state.
pub fn branch_state<T: Real>(b: &SteadyStateBranch<T>) -> State<T> {
    [b.alpha1_s, b.alpha2_s, b.beta_s]
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy<T: Real>(y: &State<T>, h: T, terms: &[(f64, &State<T>)]) -> State<T> {
    let mut out = *y;
    for (w, k) in terms {
        if *w == 0.0 {
            continue;
        }
        let hw = h * T::lit(*w);
        for i in 0..3 {
            out[i] += k[i] * hw;
        }
    }
    out
}

/// Integrates from `initial` at `t = 0` to `t_end`, storing every accepted step.
///
/// Each step keeps the local error estimate of every complex component below
/// `atol + rtol |y|`.
pub fn integrate<T: Real>(
    p: &SystemParams<T>,
    initial: State<T>,
    t_end: T,
    rtol: T,
    atol: T,
) -> Result<Trajectory<T>> {
    if !(t_end > T::zero()) || !t_end.is_finite() {
        return Err(Error::domain("t_end", "must be positive and finite"));
    }
    let max_tol = T::lit(1e-2);
    for (name, tol) in [("rtol", rtol), ("atol", atol)] {
        if !(tol > T::zero() && tol <= max_tol) {
            return Err(Error::domain(
                name,
                format!("must lie in (0, 1e-2], got {tol}"),
            ));
        }
    }
    // Below this the error estimate is rounding noise and the step never settles.
    let min_rtol = T::eps() * T::lit(100.0);
    if rtol < min_rtol {
        return Err(Error::domain(
            "rtol",
            format!("must be at least {min_rtol:e} in this precision"),
        ));
    }
    if initial
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::domain("initial", "state must be finite"));
    }

    let guard = T::lit(DIVERGENCE_GUARD);
    let scale_of = |y: &State<T>, z: &State<T>, i: usize| atol + rtol * cabs(y[i]).max(cabs(z[i]));

    let mut t = T::zero();
    let mut y = initial;
    let mut k1 = rhs(p, &y);
    let mut times = vec![t];
    let mut states = vec![y];

    // Starting step from the size of the derivative.
    let d0 = (0..3)
        .map(|i| cabs(y[i]) / scale_of(&y, &y, i))
        .fold(T::zero(), T::max);
    let d1 = (0..3)
        .map(|i| cabs(k1[i]) / scale_of(&y, &y, i))
        .fold(T::zero(), T::max);
    let mut h = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    };
    h = h.min(t_end).min(T::lit(0.1));

    let safety = T::lit(0.9);
    let min_factor = T::lit(0.2);
    let max_factor = T::lit(5.0);
    let mut rejected_last = false;

    while t < t_end {
        let h_floor = T::eps() * T::lit(16.0) * t.abs().max(T::one());
        if h < h_floor {
            return Err(Error::StepSizeUnderflow { t: t.as_f64() });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        let mut k: [State<T>; 7] = [k1; 7];
        for s in 1..7 {
            let terms: Vec<(f64, &State<T>)> = (0..s).map(|j| (A[s][j], &k[j])).collect();
            let ys = axpy(&y, h, &terms);
            k[s] = rhs(p, &ys);
        }
        // The last stage is evaluated at the fifth-order solution (FSAL).
        let y_new = axpy(&y, h, &(0..6).map(|j| (A[6][j], &k[j])).collect::<Vec<_>>());
        let err_vec = axpy(
            &[Complex::new(T::zero(), T::zero()); 3],
            h,
            &(0..7).map(|j| (E[j], &k[j])).collect::<Vec<_>>(),
        );
        let err = (0..3)
            .map(|i| cabs(err_vec[i]) / scale_of(&y, &y_new, i))
            .fold(T::zero(), T::max);

        if !err.is_finite() {
            h *= min_factor;
            rejected_last = true;
            continue;
        }
        if err <= T::one() {
            t = if t + h >= t_end { t_end } else { t + h };
            y = y_new;
            k1 = k[6];
            times.push(t);
            states.push(y);
            let blown = y
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite() || cabs(*z) > guard);
            if blown {
                return Ok(Trajectory {
                    times,
                    states,
                    status: Status::Diverged { t },
                });
            }
            if states.len() > MAX_STEPS {
                return Ok(Trajectory {
                    times,
                    states,
                    status: Status::StepLimit { t },
                });
            }
            let mut factor = if err == T::zero() {
                max_factor
            } else {
                safety * err.powf(T::lit(-0.2))
            };
            factor = factor.min(max_factor).max(min_factor);
            if rejected_last {
                factor = factor.min(T::one());
            }
            h *= factor;
            rejected_last = false;
        } else {
            let factor = (safety * err.powf(T::lit(-0.2))).max(min_factor);
            h *= factor;
            rejected_last = true;
        }
    }
    Ok(Trajectory {
        times,
        states,
        status: Status::Completed,
    })
}

/// Long-time behaviour of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryClass<T> {
    /// Settled; carries the final state.
    Converged(State<T>),
    /// Exponential growth; carries the fitted growth rate of `I1 + I2`.
    Diverged(T),
    Oscillating,
}

/// Minimum number of samples a trajectory needs for classification.
pub const MIN_SAMPLES: usize = 100;
/// Minimum number of samples inside the analysis window.
pub const MIN_WINDOW_SAMPLES: usize = 10;
/// Relative tail variation below which a trajectory counts as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;
/// Coefficient of determination required for an exponential-growth fit.
pub const GROWTH_R_SQUARED: f64 = 0.99;

/// Classifies the tail covering the last `window` fraction of the time span.
pub fn classify_trajectory<T: Real>(traj: &Trajectory<T>, window: T) -> Result<TrajectoryClass<T>> {
    if !(window > T::zero() && window <= T::one()) {
        return Err(Error::domain("window", "must lie in (0, 1]"));
    }
    let n = traj.times.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooShort { samples: n });
    }
    let t_last = traj.times[n - 1];
    let t_start = t_last * (T::one() - window);
    let first = traj
        .times
        .iter()
        .position(|t| *t >= t_start)
        .unwrap_or(n - 1);
    let tail = first..n;
    if tail.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::TooShort {
            samples: tail.len(),
        });
    }

    let last = traj.last();
    let norm = |s: &State<T>| {
        s.iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    };
    let diff = |s: &State<T>| {
        let d = [s[0] - last[0], s[1] - last[1], s[2] - last[2]];
        norm(&d)
    };
    let variation = traj.states[tail.clone()]
        .iter()
        .map(diff)
        .fold(T::zero(), T::max);
    let last_norm = norm(&last);
    if variation == T::zero() || variation < T::lit(CONVERGENCE_TOLERANCE) * last_norm {
        return Ok(TrajectoryClass::Converged(last));
    }

    // Least-squares line through ln(I1 + I2) on the window.
    let points: Vec<(T, T)> = tail
        .clone()
        .filter_map(|i| {
            let s = &traj.states[i];
            let intensity = s[0].norm_sqr() + s[1].norm_sqr();
            (intensity > T::zero()).then(|| (traj.times[i], intensity.ln()))
        })
        .collect();
    if points.len() == tail.len() {
        if let Some((slope, r2)) = linear_fit(&points) {
            if slope > T::zero() && r2 > T::lit(GROWTH_R_SQUARED) {
                return Ok(TrajectoryClass::Diverged(slope));
            }
        }
    }
    Ok(TrajectoryClass::Oscillating)
}

/// Slope and coefficient of determination of an ordinary least-squares line.
fn linear_fit<T: Real>(points: &[(T, T)]) -> Option<(T, T)> {
    let n = T::lit(points.len() as f64);
    let mean_x = points.iter().map(|p| p.0).fold(T::zero(), |a, b| a + b) / n;
    let mean_y = points.iter().map(|p| p.1).fold(T::zero(), |a, b| a + b) / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return None;
    }
    Some((sxy / sxx, sxy * sxy / (sxx * syy)))
}
