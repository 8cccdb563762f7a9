//! Scalar root finding: closed-form real cubic and a safeguarded bracketed solver.

use crate::scalar::Real;

/// Real roots of the monic cubic `y^3 + b y^2 + c y + d`, ascending.
///
/// Cardano in the one-real-root case, the trigonometric form otherwise.
/// Each root gets Newton polishing on the undepressed polynomial.
pub fn monic_cubic_real_roots<T: Real>(b: T, c: T, d: T) -> Vec<T> {
    let three = T::lit(3.0);
    let two = T::lit(2.0);
    let shift = b / three;
    let p = c - b * b / three;
    let q = two * b * b * b / T::lit(27.0) - b * c / three + d;
    let half_q = q / two;
    let third_p = p / three;
    let disc = half_q * half_q + third_p * third_p * third_p;

    let mut roots = if disc > T::zero() {
        // Single real root; pick the cube-root argument that avoids cancellation.
        let sq = disc.sqrt();
        let w = if half_q >= T::zero() {
            -half_q - sq
        } else {
            -half_q + sq
        };
        let u = w.cbrt();
        let t = if u == T::zero() { u } else { u - third_p / u };
        vec![t - shift]
    } else if p == T::zero() {
        vec![-shift]
    } else {
        let r = (-third_p).sqrt();
        let mut arg = -half_q / (r * r * r);
        if arg > T::one() {
            arg = T::one();
        }
        if arg < -T::one() {
            arg = -T::one();
        }
        let phi = arg.acos() / three;
        let tau = T::two_pi() / three;
        (0..3)
            .map(|k| two * r * (phi - tau * T::lit(k as f64)).cos() - shift)
            .collect()
    };

    for y in roots.iter_mut() {
        *y = polish_cubic(b, c, d, *y);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots
}

fn polish_cubic<T: Real>(b: T, c: T, d: T, mut y: T) -> T {
    let three = T::lit(3.0);
    let two = T::lit(2.0);
    for _ in 0..3 {
        let f = ((y + b) * y + c) * y + d;
        let df = (three * y + two * b) * y + c;
        if df == T::zero() || !f.is_finite() {
            break;
        }
        let next = y - f / df;
        if !next.is_finite() || (next - y).abs() >= (f / df).abs() * T::lit(2.0) {
            break;
        }
        let improved = (((next + b) * next + c) * next + d).abs() <= f.abs();
        if !improved {
            break;
        }
        y = next;
    }
    y
}

/// Finds a root of `f` in `[lo, hi]` given `f(lo)` and `f(hi)` of opposite sign.
///
/// Illinois-modified regula falsi with a bisection fallback whenever the
/// secant step does not shrink the bracket fast enough. Returns `None` if the
/// bracket is invalid or `max_iter` is exhausted.
pub fn bracketed_root<T: Real>(
    mut f: impl FnMut(T) -> T,
    mut lo: T,
    mut hi: T,
    mut f_lo: T,
    mut f_hi: T,
    max_iter: usize,
) -> Option<T> {
    if f_lo == T::zero() {
        return Some(lo);
    }
    if f_hi == T::zero() {
        return Some(hi);
    }
    if (f_lo > T::zero()) == (f_hi > T::zero()) {
        return None;
    }
    let half = T::lit(0.5);
    let mut side = 0i8;
    let mut width = (hi - lo).abs();
    for _ in 0..max_iter {
        let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !x.is_finite() || x <= lo.min(hi) || x >= lo.max(hi) {
            x = half * (lo + hi);
        }
        let fx = f(x);
        if !fx.is_finite() {
            return None;
        }
        if fx == T::zero() {
            return Some(x);
        }
        if (fx > T::zero()) == (f_hi > T::zero()) {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo *= half;
            }
            side = 1;
        } else {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi *= half;
            }
            side = -1;
        }
        let new_width = (hi - lo).abs();
        let scale = lo.abs().max(hi.abs());
        if new_width <= T::eps() * T::lit(4.0) * scale || new_width == T::zero() {
            return Some(if f_lo.abs() < f_hi.abs() { lo } else { hi });
        }
        if new_width > half * width {
            // Secant stalled: force a bisection.
            let mid = half * (lo + hi);
            let fm = f(mid);
            if !fm.is_finite() {
                return None;
            }
            if fm == T::zero() {
                return Some(mid);
            }
            if (fm > T::zero()) == (f_hi > T::zero()) {
                hi = mid;
                f_hi = fm;
            } else {
                lo = mid;
                f_lo = fm;
            }
            side = 0;
        }
        width = (hi - lo).abs();
    }
    None
}
