use rand::Rng;

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{
    self, c, hermitian_basis, null_space_with_scale, polar_unitary, projector_defect,
    support_basis, tensor, trace_norm_dist, unvec_row_major, CMatrix,
};
use crate::random::seeded;

const PARTIAL_ISOMETRY_TOL: f64 = 1e-9;
const SPECTRUM_TOL: f64 = 1e-7;

fn check_inputs(phi: &KrausChannel, other: &KrausChannel) -> Result<()> {
    if phi.dim_in() != other.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "input dimensions {} and {} differ",
            phi.dim_in(),
            other.dim_in()
        )));
    }
    Ok(())
}

/// Largest residual among: partial-isometry defects of `W†W` and `WW†`,
/// `‖Choi(Φ') − (W⊗I) Choi(Φ) (W⊗I)†‖₁` and
/// `‖Choi(Φ) − (W†⊗I) Choi(Φ') (W⊗I)‖₁`.
pub fn isometric_equivalence_residual(
    phi: &KrausChannel,
    other: &KrausChannel,
    w: &CMatrix,
) -> Result<f64> {
    check_inputs(phi, other)?;
    if w.shape() != (other.dim_out(), phi.dim_out()) {
        return Err(Error::DimensionMismatch(format!(
            "witness is {:?}, expected ({}, {})",
            w.shape(),
            other.dim_out(),
            phi.dim_out()
        )));
    }
    let lift = tensor(w, &linalg::identity(phi.dim_in()));
    let choi = phi.choi();
    let choi_other = other.choi();
    let forward = trace_norm_dist(&choi_other, &(&lift * &choi * lift.adjoint()))?;
    let backward = trace_norm_dist(&choi, &(lift.adjoint() * &choi_other * &lift))?;
    let source = projector_defect(&(w.adjoint() * w));
    let target = projector_defect(&(w * w.adjoint()));
    Ok(forward.max(backward).max(source).max(target))
}

/// Whether `W` is a partial isometry with `Φ' = WΦW†` and `Φ = W†Φ'W`.
pub fn verify_isometric_equivalence(
    phi: &KrausChannel,
    other: &KrausChannel,
    w: &CMatrix,
    tol: f64,
) -> Result<bool> {
    check_inputs(phi, other)?;
    if w.shape() != (other.dim_out(), phi.dim_out()) {
        return Ok(false);
    }
    let lift = tensor(w, &linalg::identity(phi.dim_in()));
    let choi = phi.choi();
    let choi_other = other.choi();
    if projector_defect(&(w.adjoint() * w)) > PARTIAL_ISOMETRY_TOL
        || projector_defect(&(w * w.adjoint())) > PARTIAL_ISOMETRY_TOL
    {
        return Ok(false);
    }
    let forward = trace_norm_dist(&choi_other, &(&lift * &choi * lift.adjoint()))?;
    let backward = trace_norm_dist(&choi, &(lift.adjoint() * &choi_other * &lift))?;
    Ok(forward <= tol && backward <= tol)
}

/// Invariants that isometrically equivalent channels share: Choi rank and
/// the nonzero spectrum of `Φ(I/d)`. Returns a description of the first
/// mismatch, which disproves equivalence.
pub fn equivalence_invariant_mismatch(
    phi: &KrausChannel,
    other: &KrausChannel,
    tol: f64,
) -> Result<Option<String>> {
    check_inputs(phi, other)?;
    let (r, r2) = (phi.choi_rank(tol), other.choi_rank(tol));
    if r != r2 {
        return Ok(Some(format!("Choi ranks differ ({r} vs {r2})")));
    }
    let spectrum = |ch: &KrausChannel| -> Vec<f64> {
        let eig = ch.image_of_maximally_mixed().eig();
        let top = eig.max_eigenvalue();
        eig.eigenvalues
            .into_iter()
            .filter(|&x| x > tol * top)
            .collect()
    };
    let (s, s2) = (spectrum(phi), spectrum(other));
    if s.len() != s2.len() {
        return Ok(Some(format!(
            "output spans have dimensions {} and {}",
            s.len(),
            s2.len()
        )));
    }
    if let Some((a, b)) = s
        .iter()
        .zip(&s2)
        .find(|(a, b)| (*a - *b).abs() > SPECTRUM_TOL)
    {
        return Ok(Some(format!(
            "spectra of the image of I/d differ ({a} vs {b})"
        )));
    }
    Ok(None)
}

/// Searches for a partial isometry `W` implementing an isometric
/// equivalence of `phi` and `other`.
///
/// Restricted to the output spans, any witness is a unitary `u` with
/// `u A_X = A'_X u` for the compressed images of every Hermitian input `X`.
/// The solutions of this linear system form a space closed under the polar
/// decomposition, so the polar factor of a generic solution is a candidate.
/// `None` means no witness was found, not that none exists.
pub fn find_equivalence_witness(
    phi: &KrausChannel,
    other: &KrausChannel,
    tol: f64,
) -> Result<Option<CMatrix>> {
    check_inputs(phi, other)?;
    if equivalence_invariant_mismatch(phi, other, linalg::DEFAULT_TOL)?.is_some() {
        return Ok(None);
    }
    let q = support_basis(phi.image_of_maximally_mixed().matrix(), linalg::DEFAULT_TOL)?;
    let q2 = support_basis(
        other.image_of_maximally_mixed().matrix(),
        linalg::DEFAULT_TOL,
    )?;
    let s = q.ncols();
    if s != q2.ncols() || s == 0 {
        return Ok(None);
    }
    let inputs = hermitian_basis(phi.dim_in());
    // unknown w[a, b] at index a*s + b; equation (w A − A' w)[a, b] = 0
    let mut system = linalg::zeros(inputs.len() * s * s, s * s);
    let mut scale: f64 = 0.0;
    for (n, x) in inputs.iter().enumerate() {
        let a = q.adjoint() * phi.apply_operator(x)? * &q;
        let a2 = q2.adjoint() * other.apply_operator(x)? * &q2;
        scale = scale.max(a.norm()).max(a2.norm());
        for row in 0..s {
            for col in 0..s {
                let eq = n * s * s + row * s + col;
                for k in 0..s {
                    system[(eq, row * s + k)] += a[(k, col)];
                    system[(eq, k * s + col)] -= a2[(row, k)];
                }
            }
        }
    }
    let solutions = null_space_with_scale(&system, linalg::DEFAULT_TOL, scale);
    if solutions.ncols() == 0 {
        return Ok(None);
    }
    let mut rng = seeded(0x5eed);
    let mut combo = linalg::zeros(s * s, 1);
    for col in solutions.column_iter() {
        let coeff = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        combo += col * coeff;
    }
    let w_small = unvec_row_major(&combo.column(0).into_owned(), s, s);
    let u = polar_unitary(&w_small);
    let w = &q2 * u * q.adjoint();
    if verify_isometric_equivalence(phi, other, &w, tol)? {
        Ok(Some(w))
    } else {
        Ok(None)
    }
}
