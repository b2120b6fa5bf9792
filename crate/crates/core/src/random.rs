//! Seeded random states and operators.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::averaging::DensityMatrix;
use crate::error::Result;
use crate::hilbert::{CMatrix, CVector, CompositeSpace, OperatorMatrix, StateVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, space: &CompositeSpace) -> Result<StateVector> {
    let v = CVector::from_fn(space.total_dim(), |_, _| gaussian(rng));
    StateVector::normalized(space.clone(), v, 0.0)
}

/// GUE-like Hermitian matrix with entries of order `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, space: &CompositeSpace, scale: f64) -> Result<OperatorMatrix> {
    let d = space.total_dim();
    let a = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let h = (&a + a.adjoint()) * C64::new(0.5 * scale, 0.0);
    OperatorMatrix::hermitian(space.clone(), h)
}

/// Random mixed state `A A† / Tr(A A†)` with `A` of shape `d × rank`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, space: &CompositeSpace, rank: usize) -> Result<DensityMatrix> {
    let d = space.total_dim();
    let a = CMatrix::from_fn(d, rank.max(1), |_, _| gaussian(rng));
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::new(space.clone(), m / tr, "computational")
}
