use super::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{
    self, c, cr, herm_eig, hermitian_basis, hermitian_part, projector_from_basis, range_basis,
    trace_norm_dist, unvec_row_major, vec_row_major, CMatrix,
};
use crate::states::DensityMatrix;

/// Relative tolerance for eigenvalue clustering and commutator checks.
pub const CQ_CLUSTER_TOL: f64 = 1e-7;

/// Representation `Φ(ρ) = Σ_k Tr(P_k ρ) σ_k` of a classical-quantum channel.
#[derive(Debug, Clone)]
pub struct CqStructure {
    pub projectors: Vec<CMatrix>,
    pub sigmas: Vec<DensityMatrix>,
    /// Orthonormal columns spanning each `P_k`.
    pub bases: Vec<CMatrix>,
    /// Choi trace distance between the channel and this representation.
    pub residual: f64,
}

impl CqStructure {
    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn sigma_ranks(&self, tol: f64) -> Vec<usize> {
        self.sigmas.iter().map(|s| s.rank(tol)).collect()
    }

    pub fn block_ranks(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.ncols()).collect()
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        super::cq_channel(&self.projectors, &self.sigmas)
    }

    /// Index of the block containing `v` (up to `tol` leakage), if any.
    pub fn block_containing(&self, v: &linalg::CVector, tol: f64) -> Option<usize> {
        let norm = v.norm();
        self.projectors
            .iter()
            .position(|p| (p * v - v).norm() <= tol * norm.max(1.0))
    }

    /// Index of the block whose projector dominates `p` (`P_k p = p`).
    pub fn block_covering(&self, p: &CMatrix, tol: f64) -> Option<usize> {
        self.projectors
            .iter()
            .position(|q| (q * p - p).norm() <= tol * p.norm().max(1.0))
    }
}

/// Basis of the (complex, *-closed) range of `Φ*` as Hermitian matrices.
fn dual_range(ch: &KrausChannel, tol: f64) -> Vec<CMatrix> {
    let din = ch.dim_in();
    let basis = hermitian_basis(ch.dim_out());
    let mut images = linalg::zeros(din * din, basis.len());
    for (j, x) in basis.iter().enumerate() {
        let y = ch.dual_apply(x).expect("dimensions agree");
        images.set_column(j, &vec_row_major(&y));
    }
    let range = range_basis(&images, tol);
    let mut out = Vec::with_capacity(2 * range.ncols());
    for col in range.column_iter() {
        let a = unvec_row_major(&col.into_owned(), din, din);
        let re = hermitian_part(&a);
        let im = (&a - a.adjoint()) * c(0.0, -0.5);
        for h in [re, im] {
            if h.norm() > 1e-3 {
                out.push(h);
            }
        }
    }
    out
}

fn commutes(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    (a * b - b * a).norm() <= tol * a.norm().max(1.0) * b.norm().max(1.0)
}

/// Splits each block into eigenspaces of `Q† H Q`, clustering eigenvalues
/// that differ by at most `tol · max(1, ‖H‖)`.
fn refine(blocks: Vec<CMatrix>, h: &CMatrix, tol: f64) -> Vec<CMatrix> {
    let gap = tol * h.norm().max(1.0);
    let mut out = Vec::with_capacity(blocks.len());
    for q in blocks {
        if q.ncols() == 1 {
            out.push(q);
            continue;
        }
        let compressed = hermitian_part(&(q.adjoint() * h * &q));
        let eig = herm_eig(&compressed).expect("compression is Hermitian");
        let mut start = 0;
        for k in 1..=eig.dim() {
            if k == eig.dim() || eig.eigenvalues[k - 1] - eig.eigenvalues[k] > gap {
                let vecs = eig.eigenvectors.columns(start, k - start).into_owned();
                out.push(&q * vecs);
                start = k;
            }
        }
    }
    out
}

/// Coarsest orthogonal resolution `{P_k}` and states `{σ_k}` with
/// `Φ(ρ) = Σ_k Tr(P_k ρ) σ_k`, if the channel has that form.
///
/// The range of `Φ*` must be a commuting family; its joint eigenspaces are
/// the `P_k`, and `σ_k = Φ(P_k / Tr P_k)`. Returns `None` when the range
/// does not commute or the reconstructed channel differs from `Φ` by more
/// than `tol` in Choi trace distance.
pub fn detect_cq(ch: &KrausChannel, tol: f64) -> Option<CqStructure> {
    let din = ch.dim_in();
    let range = dual_range(ch, linalg::DEFAULT_TOL);
    for (i, a) in range.iter().enumerate() {
        for b in &range[i + 1..] {
            if !commutes(a, b, CQ_CLUSTER_TOL) {
                return None;
            }
        }
    }
    let mut blocks = vec![linalg::identity(din)];
    for h in &range {
        blocks = refine(blocks, h, CQ_CLUSTER_TOL);
    }
    let projectors: Vec<CMatrix> = blocks.iter().map(projector_from_basis).collect();
    let sigmas: Vec<DensityMatrix> = blocks
        .iter()
        .zip(&projectors)
        .map(|(q, p)| {
            let out = ch
                .apply_operator(&(p / cr(q.ncols() as f64)))
                .expect("dimensions agree");
            DensityMatrix::from_raw(out)
        })
        .collect();
    let residual = cq_choi_residual(ch, &projectors, &sigmas).ok()?;
    if residual > tol {
        return None;
    }
    Some(CqStructure {
        projectors,
        sigmas,
        bases: blocks,
        residual,
    })
}

/// `‖Choi(Φ) − Σ_k σ_k ⊗ P_kᵀ‖₁`
pub fn cq_choi_residual(
    ch: &KrausChannel,
    projectors: &[CMatrix],
    sigmas: &[DensityMatrix],
) -> Result<f64> {
    if projectors.len() != sigmas.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} projectors, {} states",
            projectors.len(),
            sigmas.len()
        )));
    }
    let n = ch.dim_out() * ch.dim_in();
    let mut model = linalg::zeros(n, n);
    for (p, s) in projectors.iter().zip(sigmas) {
        model += linalg::tensor(s.matrix(), &p.transpose());
    }
    trace_norm_dist(&ch.choi(), &model)
}

#[cfg(test)]
mod tests {
    use super::super::{cq_channel, dephasing, depolarize_to, identity, unitary};
    use super::*;
    use crate::linalg::{matrix_unit, DEFAULT_TOL};
    use crate::random::{random_isometry, random_unitary, seeded};
    use crate::states::random_state;

    #[test]
    fn dephasing_is_cq_in_computational_basis() {
        let cq = detect_cq(&dephasing(2), DEFAULT_TOL).unwrap();
        assert_eq!(cq.len(), 2);
        for (p, s) in cq.projectors.iter().zip(&cq.sigmas) {
            assert!((p - s.matrix()).norm() < 1e-12);
            let k = if p[(0, 0)].re > 0.5 { 0 } else { 1 };
            assert!((p - matrix_unit(2, k, k)).norm() < 1e-12);
        }
    }

    #[test]
    fn depolarizing_is_a_single_block() {
        let sigma = random_state(2, 2, 3).unwrap();
        let cq = detect_cq(&depolarize_to(&sigma, 3).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(cq.len(), 1);
        assert!((&cq.projectors[0] - linalg::identity(3)).norm() < 1e-12);
        assert!((cq.sigmas[0].matrix() - sigma.matrix()).norm() < 1e-12);
    }

    #[test]
    fn unitary_and_identity_are_not_cq() {
        let u = random_unitary(3, &mut seeded(8));
        assert!(detect_cq(&unitary(&u).unwrap(), DEFAULT_TOL).is_none());
        assert!(detect_cq(&identity(2), DEFAULT_TOL).is_none());
    }

    #[test]
    fn round_trip_through_cq_channel() {
        let mut rng = seeded(40);
        for seed in 0..20u64 {
            let w = random_isometry(4, 4, &mut rng).unwrap();
            let blocks = [w.columns(0, 1).into_owned(), w.columns(1, 3).into_owned()];
            let ps: Vec<CMatrix> = blocks.iter().map(projector_from_basis).collect();
            let sigmas = vec![
                random_state(3, 1, 2 * seed).unwrap(),
                random_state(3, 2, 2 * seed + 1).unwrap(),
            ];
            let ch = cq_channel(&ps, &sigmas).unwrap();
            let cq = detect_cq(&ch, DEFAULT_TOL).unwrap();
            assert_eq!(cq.len(), 2);
            for p in &ps {
                let k = cq.block_covering(p, 1e-8).unwrap();
                assert!((&cq.projectors[k] - p).norm() < 1e-8);
            }
            assert!(cq.residual < 1e-10);
        }
    }

    #[test]
    fn complement_of_dephasing_is_cq() {
        let cq = detect_cq(&dephasing(3).complementary(), DEFAULT_TOL).unwrap();
        assert_eq!(cq.len(), 3);
        assert_eq!(cq.sigma_ranks(DEFAULT_TOL), vec![1, 1, 1]);
    }
}
