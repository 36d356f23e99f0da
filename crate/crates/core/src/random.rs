//! Seeded generators for test instances. All randomness flows from a
//! caller-supplied `u64` seed through ChaCha8, so instances are reproducible
//! bit for bit.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};

pub type InstanceRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * s, im * s)
    })
}

pub fn gaussian_vector<R: Rng>(d: usize, rng: &mut R) -> CVector {
    ginibre(d, 1, rng).column(0).into_owned()
}

pub fn unit_vector<R: Rng>(d: usize, rng: &mut R) -> CVector {
    let v = gaussian_vector(d, rng);
    let n = v.norm();
    v / c(n, 0.0)
}

/// Isometry `C^cols → C^rows` (orthonormal columns) from the QR factor of a
/// Ginibre matrix, with the phases of `R` absorbed so the distribution is
/// Haar.
pub fn random_isometry<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Result<CMatrix> {
    if cols > rows {
        return Err(Error::DimensionMismatch(format!(
            "isometry C^{cols} -> C^{rows} is impossible"
        )));
    }
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..cols {
        let d = r[(k, k)];
        let n = d.norm();
        if n > 0.0 {
            let phase = d / n;
            for i in 0..rows {
                q[(i, k)] *= phase;
            }
        }
    }
    Ok(q)
}

pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    random_isometry(d, d, rng).expect("square isometry")
}

/// Strictly positive probability vector (normalized exponential weights).
pub fn random_probabilities<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Random channel with `n_kraus` Kraus operators obtained by slicing a
/// Haar isometry `C^din → C^dout ⊗ C^n_kraus`.
pub fn random_channel(din: usize, dout: usize, n_kraus: usize, seed: u64) -> Result<KrausChannel> {
    let mut rng = seeded(seed);
    random_channel_with(din, dout, n_kraus, &mut rng)
}

pub fn random_channel_with<R: Rng>(
    din: usize,
    dout: usize,
    n_kraus: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if din == 0 || dout == 0 || n_kraus == 0 {
        return Err(Error::DimensionMismatch(
            "channel dimensions and Kraus count must be positive".into(),
        ));
    }
    let v = random_isometry(dout * n_kraus, din, rng)?;
    let kraus = (0..n_kraus)
        .map(|k| v.rows(k * dout, dout).into_owned())
        .collect();
    KrausChannel::new(din, dout, kraus)
}
