//! Bipartite logarithmic negativity from the steady-state covariance matrix.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance of the discriminant and determinant checks, relative to `max(1, Sigma^2)`.
pub const DISCRIMINANT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Mech,
    Cav1,
    Cav2,
}

impl Mode {
    /// Index of the mode's first quadrature.
    pub fn offset(self) -> usize {
        match self {
            Mode::Mech => 0,
            Mode::Cav1 => 2,
            Mode::Cav2 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Mech => "mech",
            Mode::Cav1 => "cav1",
            Mode::Cav2 => "cav2",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mech" => Ok(Mode::Mech),
            "cav1" => Ok(Mode::Cav1),
            "cav2" => Ok(Mode::Cav2),
            other => Err(Error::domain("mode", format!("unknown mode `{other}`"))),
        }
    }
}

/// Two distinct modes. The order fixes the block layout of [`submatrix`];
/// the negativity does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModePair {
    k: Mode,
    l: Mode,
}

impl ModePair {
    pub fn new(k: Mode, l: Mode) -> Result<Self> {
        if k == l {
            return Err(Error::domain(
                "pair",
                format!("modes must differ, got {k} twice"),
            ));
        }
        Ok(ModePair { k, l })
    }

    pub fn modes(self) -> (Mode, Mode) {
        (self.k, self.l)
    }

    pub fn swapped(self) -> Self {
        ModePair {
            k: self.l,
            l: self.k,
        }
    }

    /// Same two modes regardless of order.
    pub fn same_modes(self, other: ModePair) -> bool {
        self == other || self == other.swapped()
    }
}

impl fmt::Display for ModePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.k, self.l)
    }
}

pub const MECH_CAV1: ModePair = ModePair {
    k: Mode::Mech,
    l: Mode::Cav1,
};
pub const MECH_CAV2: ModePair = ModePair {
    k: Mode::Mech,
    l: Mode::Cav2,
};
pub const CAV1_CAV2: ModePair = ModePair {
    k: Mode::Cav1,
    l: Mode::Cav2,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityResult<T> {
    /// Logarithmic negativity, natural log.
    pub e_n: T,
    /// Smallest symplectic eigenvalue of the partial transpose.
    pub eta: T,
    pub sigma: T,
}

/// The 4x4 covariance of `pair`, blocks `(V_k, V_kl; V_kl^T, V_l)`.
pub fn submatrix<T: Real>(v: &CovarianceMatrix<T>, pair: ModePair) -> Matrix4<T> {
    let idx = [
        pair.k.offset(),
        pair.k.offset() + 1,
        pair.l.offset(),
        pair.l.offset() + 1,
    ];
    Matrix4::from_fn(|i, j| v.v[(idx[i], idx[j])])
}

fn det2<T: Real>(m: Matrix2<T>) -> T {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// `E_N = max(0, -ln 2 eta)` with `eta^2 = (Sigma - sqrt(Sigma^2 - 4 det V_S)) / 2`.
pub fn log_negativity<T: Real>(vs: &Matrix4<T>) -> Result<NegativityResult<T>> {
    if vs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonPhysical(
            "covariance entries must be finite".into(),
        ));
    }
    let vk: Matrix2<T> = vs.fixed_view::<2, 2>(0, 0).into_owned();
    let vl: Matrix2<T> = vs.fixed_view::<2, 2>(2, 2).into_owned();
    let vkl: Matrix2<T> = vs.fixed_view::<2, 2>(0, 2).into_owned();
    let two = T::lit(2.0);
    let sigma = det2(vk) + det2(vl) - two * det2(vkl);
    let det = vs.determinant();
    let tol = T::tolerance(DISCRIMINANT_TOLERANCE) * T::one().max(sigma * sigma);
    if det < -tol {
        return Err(Error::NonPhysical(format!("det V_S = {det:e} is negative")));
    }
    let mut disc = sigma * sigma - T::lit(4.0) * det;
    if disc < T::zero() {
        if disc < -tol {
            return Err(Error::NonPhysical(format!(
                "discriminant {disc:e} is negative"
            )));
        }
        disc = T::zero();
    }
    // Smaller root of x^2 - Sigma x + det, written without cancellation.
    let root = disc.sqrt();
    let eta_sq = two * det / (sigma + root);
    if !(eta_sq > T::zero()) || !(sigma + root > T::zero()) {
        return Err(Error::NonPhysical(format!(
            "eta^2 = {eta_sq:e} is not positive"
        )));
    }
    let eta = eta_sq.sqrt();

    // Rounding in Sigma and det reaches eta through the square root, which
    // amplifies it near a degenerate pair. Within that bound of 1/2 the state
    // is indistinguishable from separable.
    let disc_err = T::lit(16.0) * T::eps() * (sigma * sigma).max(T::lit(4.0) * det.abs());
    let eta_sq_err = if disc > disc_err {
        disc_err / (two * root)
    } else {
        disc_err.sqrt() / two
    };
    let raw = -(two * eta).ln();
    let bound = eta_sq_err / (two * eta_sq) + T::eps() * T::lit(8.0);
    if raw <= bound {
        return Ok(NegativityResult {
            e_n: T::zero(),
            eta: eta.max(T::lit(0.5)),
            sigma,
        });
    }
    Ok(NegativityResult {
        e_n: raw,
        eta,
        sigma,
    })
}

/// Negativities of every mode pair of one covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairwiseNegativity<T> {
    pub mech_cav1: NegativityResult<T>,
    pub mech_cav2: NegativityResult<T>,
    pub cav1_cav2: NegativityResult<T>,
}

impl<T: Copy> PairwiseNegativity<T> {
    pub fn get(&self, pair: ModePair) -> NegativityResult<T> {
        if pair.same_modes(MECH_CAV1) {
            self.mech_cav1
        } else if pair.same_modes(MECH_CAV2) {
            self.mech_cav2
        } else {
            self.cav1_cav2
        }
    }
}

pub fn pairwise_all<T: Real>(v: &CovarianceMatrix<T>) -> Result<PairwiseNegativity<T>> {
    Ok(PairwiseNegativity {
        mech_cav1: log_negativity(&submatrix(v, MECH_CAV1))?,
        mech_cav2: log_negativity(&submatrix(v, MECH_CAV2))?,
        cav1_cav2: log_negativity(&submatrix(v, CAV1_CAV2))?,
    })
}
