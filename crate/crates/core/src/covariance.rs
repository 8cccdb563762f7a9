//! Quadrature drift and diffusion matrices and the steady-state covariance.
//!
//! Quadratures are ordered `(x, p, I1, phi1, I2, phi2)` with
//! `X = (O + O†)/sqrt(2)` and `Y = (O - O†)/(i sqrt(2))`, so the vacuum
//! variance of every quadrature is 1/2.

use nalgebra::{DMatrix, DVector, Matrix6, Vector6};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::eigen::complex_eigenvalues;
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::scalar::{cabs, Real};
use crate::steady::SteadyStateBranch;

/// Relative Frobenius residual required of a Lyapunov solution.
pub const LYAPUNOV_TOLERANCE: f64 = 1e-10;
/// Condition estimate above which the vectorized system is rejected.
pub const MAX_CONDITION: f64 = 1e14;
/// Quadrature labels in storage order.
pub const ORDERING: [&str; 6] = ["x", "p", "I1", "phi1", "I2", "phi2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DriftMode {
    /// `Delta~` in both cavity-2 off-diagonal slots, as implied by the Jacobian.
    #[default]
    Consistent,
    /// Bare `Delta` in the `(phi2, I2)` slot.
    PaperLiteral,
}

/// Real 6x6 drift matrix of the quadrature fluctuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftA<T: Real> {
    pub a: Matrix6<T>,
}

/// Diagonal diffusion matrix, stored as its diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionD<T: Real> {
    pub d: Vector6<T>,
}

impl<T: Real> DiffusionD<T> {
    pub fn matrix(&self) -> Matrix6<T> {
        Matrix6::from_diagonal(&self.d)
    }
}

/// Steady-state covariance matrix, symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix<T: Real> {
    pub v: Matrix6<T>,
}

pub fn drift_matrix<T: Real>(
    p: &SystemParams<T>,
    branch: &SteadyStateBranch<T>,
    mode: DriftMode,
) -> DriftA<T> {
    let two = T::lit(2.0);
    let half_gm = p.gamma_m / two;
    let g2 = two * branch.g2;
    let (cos, sin) = (p.theta.cos(), p.theta.sin());
    let pa_c = two * p.chi * cos;
    let pa_s = two * p.chi * sin;
    let dt = branch.delta_tilde;
    let lower = match mode {
        DriftMode::Consistent => dt,
        DriftMode::PaperLiteral => p.delta,
    };
    let z = T::zero();
    #[rustfmt::skip]
    let a = Matrix6::new(
        -half_gm,    p.omega_m,  z,            z,           z,                         z,
        -p.omega_m,  -half_gm,   z,            z,           g2,                        z,
        z,           z,          p.kappa / two, -p.delta,   z,                         p.j,
        z,           z,          p.delta,      p.kappa / two, -p.j,                    z,
        z,           z,          z,            p.j,         pa_c - p.gamma / two,      pa_s - dt,
        g2,          z,          -p.j,         z,           pa_s + lower,              -(pa_c + p.gamma / two),
    );
    DriftA { a }
}

/// Input-noise diffusion. The gain channel enters with `|kappa|` so that a
/// loss-loss pair (`kappa < 0`) keeps a positive matrix.
pub fn diffusion_matrix<T: Real>(p: &SystemParams<T>) -> DiffusionD<T> {
    let two = T::lit(2.0);
    let mech = p.gamma_m / two * (two * p.n_th + T::one());
    let gain = p.kappa.abs() / two * (two * p.n_a + T::one());
    let loss = p.gamma / two * (two * p.n_a + T::one());
    DiffusionD {
        d: Vector6::new(mech, mech, gain, gain, loss, loss),
    }
}

/// Largest real part of the spectrum of `a`.
pub fn spectral_abscissa<T: Real>(a: &Matrix6<T>) -> Result<T> {
    let ac = a.map(|x| Complex::new(x, T::zero()));
    let eig = complex_eigenvalues(&ac)?;
    Ok(eig
        .iter()
        .map(|z| z.re)
        .fold(T::lit(f64::NEG_INFINITY), T::max))
}

/// `A V + V A^T + D`.
pub fn lyapunov_residual<T: Real>(a: &Matrix6<T>, v: &Matrix6<T>, d: &Matrix6<T>) -> Matrix6<T> {
    a * v + v * a.transpose() + d
}

/// Kronecker-sum operator `I (x) A + A (x) I` acting on column-major `vec(V)`.
fn kronecker_sum<T: Real>(a: &Matrix6<T>) -> DMatrix<T> {
    let mut k = DMatrix::zeros(36, 36);
    for col in 0..6 {
        for row in 0..6 {
            let r = row + 6 * col;
            for m in 0..6 {
                // (A V)_{row,col} = sum_m A_{row,m} V_{m,col}
                k[(r, m + 6 * col)] += a[(row, m)];
                // (V A^T)_{row,col} = sum_m V_{row,m} A_{col,m}
                k[(r, row + 6 * m)] += a[(col, m)];
            }
        }
    }
    k
}

fn one_norm<T: Real>(m: &DMatrix<T>) -> T {
    m.column_iter()
        .map(|c| c.iter().fold(T::zero(), |s, x| s + x.abs()))
        .fold(T::zero(), T::max)
}

/// Solves `A V + V A^T = -D` for the unique symmetric `V`.
///
/// Dense LU on the vectorized 36x36 system, up to three steps of iterative
/// refinement, then explicit symmetrization.
pub fn solve_lyapunov<T: Real>(a: &DriftA<T>, d: &DiffusionD<T>) -> Result<CovarianceMatrix<T>> {
    if d.d.iter().any(|x| !x.is_finite() || *x < T::zero()) {
        return Err(Error::NonPhysical(
            "diffusion matrix must be finite and nonnegative".into(),
        ));
    }
    let max_re = spectral_abscissa(&a.a)?;
    if max_re >= T::zero() {
        return Err(Error::NotHurwitz {
            max_re: max_re.as_f64(),
        });
    }
    let dm = d.matrix();
    let k = kronecker_sum(&a.a);
    let lu = k.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::IllConditioned {
        cond: f64::INFINITY,
    })?;
    let cond = one_norm(&k) * one_norm(&inverse);
    if !cond.is_finite() || cond > T::lit(MAX_CONDITION) {
        return Err(Error::IllConditioned {
            cond: cond.as_f64(),
        });
    }

    let rhs = DVector::from_iterator(36, dm.iter().map(|x| -*x));
    let mut x = lu.solve(&rhs).ok_or(Error::IllConditioned {
        cond: cond.as_f64(),
    })?;
    for _ in 0..3 {
        let r = &rhs - &k * &x;
        let r_norm = r.amax();
        if r_norm == T::zero() {
            break;
        }
        match lu.solve(&r) {
            Some(dx) => x += dx,
            None => break,
        }
    }

    let raw = Matrix6::from_column_slice(x.as_slice());
    let v = (raw + raw.transpose()) * T::lit(0.5);
    let res = lyapunov_residual(&a.a, &v, &dm).norm();
    let bound = T::tolerance(LYAPUNOV_TOLERANCE) * dm.norm();
    if !(res <= bound) {
        return Err(Error::IllConditioned {
            cond: cond.as_f64(),
        });
    }
    Ok(CovarianceMatrix { v })
}

/// Drift, diffusion and Lyapunov solve for one branch.
pub fn branch_covariance<T: Real>(
    p: &SystemParams<T>,
    branch: &SteadyStateBranch<T>,
    mode: DriftMode,
) -> Result<CovarianceMatrix<T>> {
    solve_lyapunov(&drift_matrix(p, branch, mode), &diffusion_matrix(p))
}

/// Symplectic form `Omega = diag(J2, J2, J2)` with `J2 = [[0, 1], [-1, 0]]`.
pub fn symplectic_form<T: Real>() -> Matrix6<T> {
    let mut omega = Matrix6::zeros();
    for k in 0..3 {
        omega[(2 * k, 2 * k + 1)] = T::one();
        omega[(2 * k + 1, 2 * k)] = -T::one();
    }
    omega
}

/// Smallest symplectic eigenvalue of `V`, the moduli of the spectrum of `i Omega V`.
///
/// Values below 1/2 mean the state violates the uncertainty relation.
pub fn min_symplectic_eigenvalue<T: Real>(v: &CovarianceMatrix<T>) -> Result<T> {
    let ov = symplectic_form::<T>() * v.v;
    let m = ov.map(|x| Complex::new(T::zero(), x));
    let eig = complex_eigenvalues(&m)?;
    Ok(eig
        .iter()
        .map(|z| cabs(*z))
        .fold(T::lit(f64::INFINITY), T::min))
}

/// Serialized covariance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceRecord {
    pub ordering: Vec<String>,
    /// Row-major entries.
    pub v: Vec<f64>,
    pub min_symplectic_eigenvalue: Option<f64>,
}

impl<T: Real> CovarianceMatrix<T> {
    pub fn to_record(&self) -> CovarianceRecord {
        let mut v = Vec::with_capacity(36);
        for i in 0..6 {
            for j in 0..6 {
                v.push(self.v[(i, j)].as_f64());
            }
        }
        CovarianceRecord {
            ordering: ORDERING.iter().map(|s| s.to_string()).collect(),
            v,
            min_symplectic_eigenvalue: min_symplectic_eigenvalue(self).ok().map(Real::as_f64),
        }
    }
}

impl CovarianceRecord {
    pub fn to_matrix(&self) -> Result<CovarianceMatrix<f64>> {
        if self.v.len() != 36 {
            return Err(Error::NonPhysical(format!(
                "expected 36 entries, got {}",
                self.v.len()
            )));
        }
        Ok(CovarianceMatrix {
            v: Matrix6::from_row_slice(&self.v),
        })
    }
}
