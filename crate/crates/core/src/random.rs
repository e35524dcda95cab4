//! Seeded random matrices and states for tests, sweeps and self-checks.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c, ComplexMatrix, StateVector, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let qr = gaussian_matrix(dim, rng).qr();
    let (mut q, r) = qr.unpack();
    // Fix the phases of R's diagonal so the distribution is exactly Haar.
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= ph;
    }
    q
}

/// Hermitian matrix with Gaussian entries, scaled to spectral norm `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(dim, rng);
    let h = (&g + g.adjoint()).scale(0.5);
    let norm = crate::linalg::spectral_norm(&h);
    h.scale(scale / norm)
}

pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let v = DVector::from_fn(dim, |_, _| gaussian(rng));
    StateVector::normalized(v).expect("gaussian vector is nonzero")
}

/// Probability vector of length `len` with `rank` nonzero entries, each at least `floor`.
pub fn random_probabilities<R: Rng + ?Sized>(
    len: usize,
    rank: usize,
    floor: f64,
    rng: &mut R,
) -> Vec<f64> {
    assert!(rank >= 1 && rank <= len && floor * rank as f64 <= 1.0);
    let raw: Vec<f64> = (0..rank).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    let spare = 1.0 - floor * rank as f64;
    let mut p: Vec<f64> = raw.iter().map(|x| floor + spare * x / total).collect();
    p.resize(len, 0.0);
    p
}

/// Density matrix `V diag(p) V†` with a Haar-random eigenbasis.
pub fn density_with_spectrum<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> ComplexMatrix {
    let v = haar_unitary(p.len(), rng);
    let d = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        p.len(),
        p.iter().map(|&x| c(x, 0.0)),
    ));
    let rho = &v * d * v.adjoint();
    (&rho + rho.adjoint()).scale(0.5)
}

/// Random density matrix whose nonzero eigenvalues are all at least `floor`.
pub fn random_density<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    floor: f64,
    rng: &mut R,
) -> ComplexMatrix {
    let p = random_probabilities(dim, rank, floor, rng);
    density_with_spectrum(&p, rng)
}
