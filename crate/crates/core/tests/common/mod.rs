//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4, Matrix6, SymmetricEigen, Vector6};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rotation(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn squeezer(r: f64) -> Matrix2<f64> {
    Matrix2::new(r.exp(), 0.0, 0.0, (-r).exp())
}

fn local(a: Matrix2<f64>, b: Matrix2<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&b);
    m
}

fn beam_splitter(t: f64) -> Matrix4<f64> {
    let (s, c) = t.sin_cos();
    let i = Matrix2::identity();
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&(i * c));
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&(i * s));
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-i * s));
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&(i * c));
    m
}

fn two_mode_squeezer(r: f64) -> Matrix4<f64> {
    let z = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    let i = Matrix2::identity();
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&(i * r.cosh()));
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&(z * r.sinh()));
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&(z * r.sinh()));
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&(i * r.cosh()));
    m
}

/// Random symplectic 4x4 built from the standard Gaussian generators.
pub fn random_symplectic(rng: &mut impl Rng) -> Matrix4<f64> {
    let mut s = Matrix4::identity();
    for _ in 0..2 {
        let phis: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.0..std::f64::consts::TAU));
        s = local(rotation(phis[0]), rotation(phis[1])) * s;
        s = local(
            squeezer(rng.gen_range(-0.6..0.6)),
            squeezer(rng.gen_range(-0.6..0.6)),
        ) * s;
        s = local(rotation(phis[2]), rotation(phis[3])) * s;
        s = beam_splitter(rng.gen_range(0.0..std::f64::consts::PI)) * s;
        s = two_mode_squeezer(rng.gen_range(-0.8..0.8)) * s;
    }
    s
}

/// Random physical two-mode covariance `S diag(nu1, nu1, nu2, nu2) S^T`.
pub fn random_physical_cm(rng: &mut impl Rng) -> Matrix4<f64> {
    let nu1 = 0.5 + rng.gen_range(0.0..2.0) * rng.gen_range(0.0f64..1.0).powi(2);
    let nu2 = 0.5 + rng.gen_range(0.0..2.0) * rng.gen_range(0.0f64..1.0).powi(2);
    let s = random_symplectic(rng);
    let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(nu1, nu1, nu2, nu2));
    let v = s * d * s.transpose();
    (v + v.transpose()) * 0.5
}

pub fn omega4() -> Matrix4<f64> {
    let j = Matrix2::new(0.0, 1.0, -1.0, 0.0);
    local(j, j)
}

/// Smallest symplectic eigenvalue of the partial transpose, via the
/// Hermitian matrix `i W^{1/2} Omega W^{1/2}` with `W = P V P`.
pub fn partial_transpose_eta(v: &Matrix4<f64>) -> f64 {
    let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    let w = p * v * p;
    let eig = SymmetricEigen::new(w);
    let root = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let h = (root * omega4() * root).map(|x| Complex::new(0.0, x));
    let spectrum = SymmetricEigen::new(h).eigenvalues;
    spectrum
        .iter()
        .map(|x| x.abs())
        .fold(f64::INFINITY, f64::min)
}

fn normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; avoids pulling in rand_distr for one sampler.
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// Random Hurwitz matrix: dissipative symmetric part plus a random rotation
/// part, alternating with a random matrix shifted left of the imaginary axis.
pub fn random_hurwitz(rng: &mut impl Rng, k: usize) -> Matrix6<f64> {
    let b = Matrix6::from_fn(|_, _| normal(rng));
    let c = Matrix6::from_fn(|_, _| normal(rng));
    if k % 2 == 0 {
        let eps = rng.gen_range(0.05..1.0);
        -(b * b.transpose() + Matrix6::identity() * eps) + (c - c.transpose())
    } else {
        let abscissa = b
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        b - Matrix6::identity() * (abscissa + rng.gen_range(0.05..1.0))
    }
}

pub fn random_positive_diagonal(rng: &mut impl Rng) -> Vector6<f64> {
    Vector6::from_fn(|_, _| 10f64.powf(rng.gen_range(-2.0..2.0)))
}
