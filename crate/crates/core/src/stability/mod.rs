//! Linear stability of steady-state branches.
//!
//! The fluctuation vector is ordered `(dbeta, dbeta†, dalpha1, dalpha1†,
//! dalpha2, dalpha2†)`. A branch is stable when every eigenvalue of the
//! Jacobian has real part below `-margin`.

mod basin;

pub use basin::{basin, BasinCell, BasinSpec, BranchRule, StabilityMap};

use nalgebra::Matrix6;
use num_complex::Complex;

use crate::eigen::complex_eigenvalues;
use crate::error::Result;
use crate::model::SystemParams;
use crate::scalar::{c, ci, polar, Real};
use crate::steady::SteadyStateBranch;

/// Default stability margin, units of `gamma`.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// How the optomechanical entries of the Jacobian treat the steady-state phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingMode {
    /// Entries `±i G2` with `G2 = g |alpha2_s|`; steady-state phases dropped.
    #[default]
    PaperLiteral,
    /// Entries `i g alpha2_s`, `i g conj(alpha2_s)` from the full linearization.
    PhaseExact,
}

/// 6x6 complex Jacobian of the linearized fluctuation dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianM<T: Real> {
    pub m: Matrix6<Complex<T>>,
}

impl<T: Real> JacobianM<T> {
    /// The matrix after swapping each operator with its adjoint and conjugating.
    ///
    /// Equal to `self` for every Jacobian built by [`jacobian`].
    pub fn conjugate_partner(&self) -> Matrix6<Complex<T>> {
        let partner = |k: usize| k ^ 1;
        Matrix6::from_fn(|i, j| self.m[(partner(i), partner(j))].conj())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict<T> {
    pub stable: bool,
    pub max_re_lambda: T,
    pub eigenvalues: Vec<Complex<T>>,
}

/// Assembles the Jacobian around `branch`.
pub fn jacobian<T: Real>(
    p: &SystemParams<T>,
    branch: &SteadyStateBranch<T>,
    mode: CouplingMode,
) -> JacobianM<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let two = T::lit(2.0);
    let omega_beta = c(p.gamma_m / two, p.omega_m);
    let omega_a1 = c(p.kappa / two, p.delta);
    let omega_a2 = c(-p.gamma / two, branch.delta_tilde);
    let tunnel = ci(p.j);
    let pa = polar(two * p.chi, p.theta);

    // (row, col) couplings between mechanics and cavity 2.
    let (to_a2, to_a2_dag, from_beta) = match mode {
        CouplingMode::PaperLiteral => {
            let g2 = branch.g2;
            (ci(g2), ci(g2), ci(g2))
        }
        CouplingMode::PhaseExact => {
            let a = branch.alpha2_s;
            let ig = ci(p.g);
            (ig * a.conj(), ig * a, ig * a)
        }
    };

    let mut m = Matrix6::from_element(zero);
    m[(0, 0)] = -omega_beta;
    m[(0, 4)] = to_a2;
    m[(0, 5)] = to_a2_dag;
    m[(1, 1)] = -omega_beta.conj();
    m[(1, 4)] = to_a2_dag.conj();
    m[(1, 5)] = to_a2.conj();
    m[(2, 2)] = omega_a1;
    m[(2, 4)] = -tunnel;
    m[(3, 3)] = omega_a1.conj();
    m[(3, 5)] = tunnel;
    m[(4, 0)] = from_beta;
    m[(4, 1)] = from_beta;
    m[(4, 2)] = -tunnel;
    m[(4, 4)] = omega_a2;
    m[(4, 5)] = pa;
    m[(5, 0)] = from_beta.conj();
    m[(5, 1)] = from_beta.conj();
    m[(5, 3)] = tunnel;
    m[(5, 4)] = pa.conj();
    m[(5, 5)] = omega_a2.conj();
    JacobianM { m }
}

/// Dense eigensolve of `jac`; stable iff the largest real part is below `-margin`.
pub fn is_stable<T: Real>(jac: &JacobianM<T>, margin: T) -> Result<StabilityVerdict<T>> {
    let eigenvalues = complex_eigenvalues(&jac.m)?;
    let max_re_lambda = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(T::lit(f64::NEG_INFINITY), |a, b| a.max(b));
    Ok(StabilityVerdict {
        stable: max_re_lambda < -margin,
        max_re_lambda,
        eigenvalues,
    })
}

/// Jacobian plus verdict in one call, with the default coupling mode.
pub fn branch_stability<T: Real>(
    p: &SystemParams<T>,
    branch: &SteadyStateBranch<T>,
    margin: T,
) -> Result<StabilityVerdict<T>> {
    is_stable(&jacobian(p, branch, CouplingMode::PaperLiteral), margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;
    use crate::steady::solve_branches;

    fn p(alpha_in: f64, kappa: f64, j: f64) -> SystemParams<f64> {
        SystemParams {
            alpha_in,
            kappa,
            j,
            ..SystemParams::default()
        }
    }

    fn verdict(params: SystemParams<f64>) -> StabilityVerdict<f64> {
        let v = validate(params).unwrap();
        let b = solve_branches(&v).unwrap();
        assert_eq!(b.len(), 1);
        branch_stability(&v, &b[0], STABILITY_MARGIN).unwrap()
    }

    fn contains(spectrum: &[Complex<f64>], z: Complex<f64>, tol: f64) -> bool {
        spectrum.iter().any(|w| (w - z).norm() < tol)
    }

    #[test]
    fn decoupled_spectrum_is_the_diagonal() {
        let params = validate(p(0.0, 0.3, 0.0)).unwrap();
        let b = SteadyStateBranch::zero(&params);
        let v = is_stable(&jacobian(&params, &b, CouplingMode::PaperLiteral), 0.0).unwrap();
        let ob = c(params.gamma_m / 2.0, params.omega_m);
        let o1 = c(params.kappa / 2.0, params.delta);
        let o2 = c(-0.5, params.delta);
        for z in [-ob, -ob.conj(), o1, o1.conj(), o2, o2.conj()] {
            assert!(contains(&v.eigenvalues, z, 1e-12), "{z} missing");
        }
    }

    #[test]
    fn optical_sector_matches_supermode_formula() {
        let params = validate(p(0.0, 0.8, 0.6)).unwrap();
        let b = SteadyStateBranch::zero(&params);
        let v = is_stable(&jacobian(&params, &b, CouplingMode::PaperLiteral), 0.0).unwrap();
        let centre = (0.8 - 1.0) / 4.0;
        let split = (1.8f64 * 1.8 / 16.0 - 0.36).max(0.0).sqrt();
        for re in [centre + split, centre - split] {
            assert!(v.eigenvalues.iter().any(|z| (z.re - re).abs() < 1e-10));
        }
    }

    #[test]
    fn amplifier_entries_are_real_at_zero_phase() {
        let params = validate(SystemParams {
            chi: 0.05,
            ..p(0.0, 0.1, 0.5)
        })
        .unwrap();
        let j = jacobian(
            &params,
            &SteadyStateBranch::zero(&params),
            CouplingMode::PaperLiteral,
        );
        assert_eq!(j.m[(4, 5)], Complex::new(0.1, 0.0));
        assert_eq!(j.m[(5, 4)], Complex::new(0.1, 0.0));
    }

    #[test]
    fn optomechanical_entry_pattern() {
        let params = validate(p(3e3, 0.1, 0.8)).unwrap();
        let b = solve_branches(&params).unwrap()[0];
        let m = jacobian(&params, &b, CouplingMode::PaperLiteral).m;
        let ig = ci(b.g2);
        for (i, j, want) in [
            (0, 4, ig),
            (0, 5, ig),
            (1, 4, -ig),
            (1, 5, -ig),
            (4, 0, ig),
            (4, 1, ig),
            (5, 0, -ig),
            (5, 1, -ig),
            (2, 4, ci(-0.8)),
            (3, 5, ci(0.8)),
            (4, 2, ci(-0.8)),
            (5, 3, ci(0.8)),
        ] {
            assert_eq!(m[(i, j)], want, "entry ({i}, {j})");
        }
    }

    #[test]
    fn conjugate_pair_symmetry() {
        let params = validate(SystemParams {
            chi: 0.02,
            theta: 0.7,
            ..p(3e3, 0.1, 0.8)
        })
        .unwrap();
        let b = solve_branches(&params).unwrap()[0];
        for mode in [CouplingMode::PaperLiteral, CouplingMode::PhaseExact] {
            let j = jacobian(&params, &b, mode);
            assert_eq!(j.conjugate_partner(), j.m);
        }
    }

    #[test]
    fn reference_points() {
        assert!(verdict(p(100.0, 0.8, 0.8)).stable);

        let v = verdict(p(1e-5, 0.8, 0.42));
        assert!(!v.stable);
        let expected = -0.05 + (0.2025f64 - 0.1764).sqrt();
        assert!(
            (v.max_re_lambda - expected).abs() < 1e-6,
            "{}",
            v.max_re_lambda
        );
    }

    #[test]
    fn all_lossy_decoupled_is_stable() {
        let params = validate(p(0.0, -0.2, 0.0)).unwrap();
        let b = SteadyStateBranch::zero(&params);
        assert!(
            branch_stability(&params, &b, STABILITY_MARGIN)
                .unwrap()
                .stable
        );
    }

    #[test]
    fn modes_agree_without_amplifier() {
        for (alpha_in, kappa, j) in [(3e3, 0.1, 0.8), (1e4, 0.8, 0.3), (20.0, -0.4, 1.1)] {
            let params = validate(p(alpha_in, kappa, j)).unwrap();
            for b in solve_branches(&params).unwrap() {
                let lit =
                    is_stable(&jacobian(&params, &b, CouplingMode::PaperLiteral), 1e-9).unwrap();
                let exact =
                    is_stable(&jacobian(&params, &b, CouplingMode::PhaseExact), 1e-9).unwrap();
                assert_eq!(lit.stable, exact.stable);
                assert!((lit.max_re_lambda - exact.max_re_lambda).abs() < 1e-10);
            }
        }
    }
}
