//! Random states, unitaries and Kraus pairs for tests and sweeps.
//!
//! Sampling uses complex Gaussians: normalized Gaussian vectors are uniform
//! on the sphere, and Gram-Schmidt on a Gaussian matrix yields a Haar unitary.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::KrausSet;
use crate::linalg::{c, orthonormalize_against, ComplexMatrix, C64};
use crate::state::{DensityMatrix, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly distributed pure state of dimension `dim`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Haar-distributed unitary of size `n`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        if orthonormalize_against(&mut v, &cols, 1e-8) > 1e-8 {
            cols.push(v);
        }
    }
    ComplexMatrix::from_columns(&cols).expect("square")
}

/// Kraus pair read off the first block column of a Haar unitary on two qubits
/// (or two n-level systems).
pub fn random_kraus_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> KrausSet {
    let u = haar_unitary(rng, 2 * n);
    let k0 = u.block(0, 0, n, n).expect("block");
    let k1 = u.block(n, 0, n, n).expect("block");
    KrausSet::new(alloc::vec![k0, k1]).expect("isometry columns are complete")
}

/// Random mixed state: `ρ = G G† / tr(G G†)` for a Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let m = &g * &g.dagger();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_re(1.0 / tr)).expect("positive by construction")
}
