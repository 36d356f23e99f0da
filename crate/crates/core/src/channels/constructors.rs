use super::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{
    self, cr, herm_eig_tol, hermiticity_defect, projector_defect, psd_sqrt, CMatrix, CVector,
    Subsystem,
};
use crate::states::DensityMatrix;

const RESOLUTION_TOL: f64 = 1e-9;

pub fn identity(d: usize) -> KrausChannel {
    KrausChannel::new(d, d, vec![linalg::identity(d)]).expect("identity is CPTP")
}

/// `ρ ↦ U ρ U†`
pub fn unitary(u: &CMatrix) -> Result<KrausChannel> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "unitary must be square, got {:?}",
            u.shape()
        )));
    }
    KrausChannel::new(u.nrows(), u.nrows(), vec![u.clone()])
}

/// Kraus operators `√λ_j |e_j><f|` over eigenpairs of `sigma` and the
/// columns `f` of `basis`. Realizes `ρ ↦ σ Tr[Q Q† ρ]`.
pub(crate) fn prepare_on(sigma: &DensityMatrix, basis: &CMatrix) -> Vec<CMatrix> {
    let eig = sigma.eig();
    let mut kraus = Vec::new();
    for j in 0..eig.dim() {
        let lambda = eig.eigenvalues[j];
        if lambda <= 0.0 {
            continue;
        }
        let e = eig.vector(j) * cr(lambda.sqrt());
        for f in basis.column_iter() {
            kraus.push(&e * f.adjoint());
        }
    }
    kraus
}

/// Completely depolarizing channel `ρ ↦ σ Tr ρ` on a `dim_in`-dimensional input.
pub fn depolarize_to(sigma: &DensityMatrix, dim_in: usize) -> Result<KrausChannel> {
    let kraus = prepare_on(sigma, &linalg::identity(dim_in));
    KrausChannel::new(dim_in, sigma.dim(), kraus)
}

/// Checks that `projectors` are mutually orthogonal projectors on `C^dim`
/// summing to the identity.
pub fn validate_resolution(projectors: &[CMatrix], dim: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::InvalidResolution("no projectors given".into()));
    }
    let mut sum = linalg::zeros(dim, dim);
    for (k, p) in projectors.iter().enumerate() {
        if p.shape() != (dim, dim) {
            return Err(Error::InvalidResolution(format!(
                "projector {k} has shape {:?}, expected ({dim}, {dim})",
                p.shape()
            )));
        }
        let defect = projector_defect(p);
        if defect > RESOLUTION_TOL {
            return Err(Error::InvalidResolution(format!(
                "P_{k} is not an orthogonal projector (defect {defect:.3e})"
            )));
        }
        if p.trace().re < 0.5 {
            return Err(Error::InvalidResolution(format!("P_{k} is zero")));
        }
        for (l, q) in projectors.iter().enumerate().skip(k + 1) {
            let overlap = (p * q).norm();
            if overlap > RESOLUTION_TOL {
                return Err(Error::InvalidResolution(format!(
                    "P_{k} P_{l} = {overlap:.3e}, expected 0"
                )));
            }
        }
        sum += p;
    }
    let completeness = (sum - linalg::identity(dim)).norm();
    if completeness > RESOLUTION_TOL {
        return Err(Error::InvalidResolution(format!(
            "projectors sum to the identity only within {completeness:.3e}"
        )));
    }
    Ok(())
}

fn resolution_dim(projectors: &[CMatrix]) -> Result<usize> {
    projectors
        .first()
        .map(|p| p.nrows())
        .ok_or_else(|| Error::InvalidResolution("no projectors given".into()))
}

/// Classical-quantum channel `ρ ↦ Σ_k Tr(P_k ρ) σ_k`.
pub fn cq_channel(projectors: &[CMatrix], sigmas: &[DensityMatrix]) -> Result<KrausChannel> {
    let d = resolution_dim(projectors)?;
    validate_resolution(projectors, d)?;
    if sigmas.len() != projectors.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} output states for {} projectors",
            sigmas.len(),
            projectors.len()
        )));
    }
    let dout = sigmas[0].dim();
    if sigmas.iter().any(|s| s.dim() != dout) {
        return Err(Error::DimensionMismatch(
            "output states differ in dimension".into(),
        ));
    }
    let mut kraus = Vec::new();
    for (p, s) in projectors.iter().zip(sigmas) {
        let basis = linalg::support_basis(p, RESOLUTION_TOL)?;
        kraus.extend(prepare_on(s, &basis));
    }
    KrausChannel::new(d, dout, kraus)
}

/// `ρ ↦ Σ_k P_k ρ P_k`
pub fn pinching(projectors: &[CMatrix]) -> Result<KrausChannel> {
    let d = resolution_dim(projectors)?;
    validate_resolution(projectors, d)?;
    KrausChannel::new(d, d, projectors.to_vec())
}

/// Complete dephasing in the computational basis.
pub fn dephasing(d: usize) -> KrausChannel {
    let kraus = (0..d).map(|k| linalg::matrix_unit(d, k, k)).collect();
    KrausChannel::new(d, d, kraus).expect("dephasing is CPTP")
}

/// `ρ ↦ Σ_kl c_kl P_k ρ P_l` for a Gram matrix `c` of unit vectors.
///
/// With `R = √c` the vectors `ψ_k[j] = conj(R[j,k])` satisfy
/// `<ψ_l|ψ_k> = c_kl`, and the Kraus operators are `K_j = Σ_k ψ_k[j] P_k`.
pub fn gram_channel(projectors: &[CMatrix], c: &CMatrix) -> Result<KrausChannel> {
    let d = resolution_dim(projectors)?;
    validate_resolution(projectors, d)?;
    let n = projectors.len();
    if c.shape() != (n, n) {
        return Err(Error::NotAGramMatrix(format!(
            "shape {:?} does not match {n} projectors",
            c.shape()
        )));
    }
    if hermiticity_defect(c) > RESOLUTION_TOL {
        return Err(Error::NotAGramMatrix("matrix is not Hermitian".into()));
    }
    if let Some(k) = (0..n).find(|&k| (c[(k, k)] - cr(1.0)).norm() > RESOLUTION_TOL) {
        return Err(Error::NotAGramMatrix(format!(
            "diagonal entry {k} is {}, expected 1",
            c[(k, k)]
        )));
    }
    let eig = herm_eig_tol(c, RESOLUTION_TOL)?;
    if eig.min_eigenvalue() < -RESOLUTION_TOL {
        return Err(Error::NotAGramMatrix(format!(
            "min eigenvalue {:.3e} is negative",
            eig.min_eigenvalue()
        )));
    }
    let root = psd_sqrt(c).map_err(|e| Error::NotAGramMatrix(e.to_string()))?;
    let kraus = (0..n)
        .map(|j| {
            let mut k = linalg::zeros(d, d);
            for (idx, p) in projectors.iter().enumerate() {
                k += p * root[(j, idx)].conj();
            }
            k
        })
        .collect();
    KrausChannel::new(d, d, kraus)
}

fn unit_row(d: usize, i: usize) -> CMatrix {
    CMatrix::from_fn(1, d, |_, j| cr(if i == j { 1.0 } else { 0.0 }))
}

/// Partial trace on `C^dim_a ⊗ C^dim_e`, keeping the named factor.
pub fn partial_trace_channel(dim_a: usize, dim_e: usize, keep: Subsystem) -> KrausChannel {
    let kraus: Vec<CMatrix> = match keep {
        Subsystem::A => (0..dim_e)
            .map(|e| {
                let bra = unit_row(dim_e, e);
                linalg::tensor(&linalg::identity(dim_a), &bra)
            })
            .collect(),
        Subsystem::B => (0..dim_a)
            .map(|a| {
                let bra = unit_row(dim_a, a);
                linalg::tensor(&bra, &linalg::identity(dim_e))
            })
            .collect(),
    };
    let (dout, din) = kraus[0].shape();
    KrausChannel::new(din, dout, kraus).expect("partial trace is CPTP")
}

/// Channel `ρ ↦ Σ_kl P_k ρ P_l ⊗ Σ_pt <ψ^l_t|ψ^k_p> |p><t|` into
/// `C^d ⊗ C^m`, where `psi[k]` lists the vectors `ψ^k_p` (at most `m` of
/// them, all of one environment dimension) with `Σ_p ‖ψ^k_p‖² = 1`.
///
/// Its complementary channel is `ρ ↦ Σ_k Tr(P_k ρ) Σ_p |ψ^k_p><ψ^k_p|`.
pub fn block_embedding_channel(
    projectors: &[CMatrix],
    psi: &[Vec<CVector>],
    m: usize,
) -> Result<KrausChannel> {
    let d = resolution_dim(projectors)?;
    validate_resolution(projectors, d)?;
    if psi.len() != projectors.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} vector lists for {} projectors",
            psi.len(),
            projectors.len()
        )));
    }
    if let Some(k) = psi
        .iter()
        .position(|list| list.len() > m || list.is_empty())
    {
        return Err(Error::DimensionMismatch(format!(
            "block {k} has {} vectors, expected 1..={m}",
            psi[k].len()
        )));
    }
    let env = psi[0][0].len();
    if psi.iter().flatten().any(|v| v.len() != env) {
        return Err(Error::DimensionMismatch(
            "vectors differ in dimension".into(),
        ));
    }
    let embeds: Vec<CMatrix> = (0..m)
        .map(|p| {
            let ket = CMatrix::from_column_slice(m, 1, linalg::basis_vector(m, p).as_slice());
            linalg::tensor(&linalg::identity(d), &ket)
        })
        .collect();
    let kraus = (0..env)
        .map(|e| {
            let mut k = linalg::zeros(d * m, d);
            for (proj, list) in projectors.iter().zip(psi) {
                for (p, v) in list.iter().enumerate() {
                    k += &embeds[p] * proj * v[e];
                }
            }
            k
        })
        .collect();
    KrausChannel::new(d, d * m, kraus)
}
