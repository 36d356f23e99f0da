#![allow(dead_code)]

use qrev_core::linalg::{self, cr, CMatrix, CVector};
use qrev_core::random::{ginibre, random_probabilities, random_unitary, unit_vector, InstanceRng};
use qrev_core::{DensityMatrix, PureStateFamily};
use rand::Rng;

/// Random split of `d` into `parts` positive block sizes.
pub fn random_sizes(d: usize, parts: usize, rng: &mut InstanceRng) -> Vec<usize> {
    let mut sizes = vec![1; parts];
    for _ in parts..d {
        let k = rng.random_range(0..parts);
        sizes[k] += 1;
    }
    sizes
}

/// Orthonormal block bases of a random orthogonal resolution of `C^d`.
pub fn random_blocks(d: usize, sizes: &[usize], rng: &mut InstanceRng) -> Vec<CMatrix> {
    let u = random_unitary(d, rng);
    let mut at = 0;
    sizes
        .iter()
        .map(|&s| {
            let q = u.columns(at, s).into_owned();
            at += s;
            q
        })
        .collect()
}

pub fn projectors_of(blocks: &[CMatrix]) -> Vec<CMatrix> {
    blocks.iter().map(linalg::projector_from_basis).collect()
}

/// Complete family whose orthogonally non-decomposable blocks are the
/// given ones: each block contributes its basis vectors followed by their
/// normalized sum.
pub fn connected_family(blocks: &[CMatrix]) -> PureStateFamily {
    let d = blocks[0].nrows();
    let mut vectors = Vec::new();
    for q in blocks {
        let mut sum = CVector::zeros(d);
        for col in q.column_iter() {
            vectors.push(col.into_owned());
            sum += col;
        }
        if q.ncols() > 1 {
            let n = sum.norm();
            vectors.push(sum / cr(n));
        }
    }
    PureStateFamily::new(d, vectors).unwrap()
}

/// Random state of rank `rank` supported on the columns of `q`.
pub fn state_on(q: &CMatrix, rank: usize, rng: &mut InstanceRng) -> DensityMatrix {
    let g = ginibre(q.ncols(), rank, rng);
    let m = q * &g * g.adjoint() * q.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m / cr(tr)).unwrap()
}

/// Gram matrix of `n` random unit vectors in `C^env`.
pub fn random_gram(n: usize, env: usize, rng: &mut InstanceRng) -> CMatrix {
    let psi: Vec<CVector> = (0..n).map(|_| unit_vector(env, rng)).collect();
    CMatrix::from_fn(n, n, |k, l| psi[l].dotc(&psi[k]))
}

pub fn weights(n: usize, rng: &mut InstanceRng) -> Vec<f64> {
    random_probabilities(n, rng)
}
