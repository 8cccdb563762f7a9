//! Eigenvalues of small dense complex matrices.
//!
//! Hessenberg reduction followed by single-shift complex QR with Wilkinson
//! shifts and periodic exceptional shifts. Only eigenvalues are formed.

use nalgebra::linalg::Hessenberg;
use nalgebra::{DMatrix, Dim, Matrix, RawStorage};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cabs, csqrt, Real};

const ITERATIONS_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of a square complex matrix, in deflation order.
pub fn complex_eigenvalues<T, R, C, S>(m: &Matrix<Complex<T>, R, C, S>) -> Result<Vec<Complex<T>>>
where
    T: Real,
    R: Dim,
    C: Dim,
    S: RawStorage<Complex<T>, R, C>,
{
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigenvalues of a non-square matrix");
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let dense = DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
    let mut h = if n > 2 {
        Hessenberg::new(dense).unpack_h()
    } else {
        dense
    };

    let eps = T::eps();
    let tiny = eps * eps * h.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)));
    let mut eig = vec![Complex::new(T::zero(), T::zero()); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = cabs(h[(l, l - 1)]);
            let scale = cabs(h[(l - 1, l - 1)]) + cabs(h[(l, l)]);
            if sub <= eps * scale || sub <= tiny {
                h[(l, l - 1)] = Complex::new(T::zero(), T::zero());
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > ITERATIONS_PER_EIGENVALUE * n {
            return Err(Error::EigenFailure);
        }

        let shift = if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            let mut s = cabs(h[(hi, hi - 1)]);
            if hi >= 2 {
                s += cabs(h[(hi - 1, hi - 2)]);
            }
            h[(hi, hi)] + Complex::new(T::lit(0.75) * s, T::zero())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        qr_sweep(&mut h, l, hi, shift);
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}

fn wilkinson_shift<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
) -> Complex<T> {
    let half = T::lit(0.5);
    let mid = (a - d).scale(half);
    let root = csqrt(mid * mid + b * c);
    let centre = (a + d).scale(half);
    let mu1 = centre + root;
    let mu2 = centre - root;
    if cabs(mu1 - d) <= cabs(mu2 - d) {
        mu1
    } else {
        mu2
    }
}

/// One shifted QR step on the active block `l..=hi` of a Hessenberg matrix.
fn qr_sweep<T: Real>(h: &mut DMatrix<Complex<T>>, l: usize, hi: usize, shift: Complex<T>) {
    let n = h.nrows();
    for k in l..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - l);
    for k in l..hi {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = cabs(x).hypot(cabs(y));
        let (cs, sn) = if r == T::zero() {
            (
                Complex::new(T::one(), T::zero()),
                Complex::new(T::zero(), T::zero()),
            )
        } else {
            (x.unscale(r), y.unscale(r))
        };
        for j in k..n {
            let top = h[(k, j)];
            let bottom = h[(k + 1, j)];
            h[(k, j)] = cs.conj() * top + sn.conj() * bottom;
            h[(k + 1, j)] = -sn * top + cs * bottom;
        }
        h[(k + 1, k)] = Complex::new(T::zero(), T::zero());
        rotations.push((cs, sn));
    }
    for (offset, (cs, sn)) in rotations.into_iter().enumerate() {
        let k = l + offset;
        let last = (k + 2).min(hi);
        for i in 0..=last {
            let left = h[(i, k)];
            let right = h[(i, k + 1)];
            h[(i, k)] = cs * left + sn * right;
            h[(i, k + 1)] = -sn.conj() * left + cs.conj() * right;
        }
    }
    for k in l..=hi {
        h[(k, k)] += shift;
    }
}
