use super::ond::{ond_decompose, OND_EDGE_TOL};
use super::{CriterionReport, Outcome, StatementOutcome, Verdict};
use crate::channels::{
    block_embedding_channel, detect_cq, find_equivalence_witness, gram_channel,
    isometric_equivalence_residual, CqStructure, KrausChannel,
};
use crate::error::{Error, Result};
use crate::linalg::{
    self, cr, projector_defect, projector_onto, rank_tol, tensor, trace_norm_dist, CMatrix,
    CVector, DEFAULT_TOL,
};
use crate::petz::{check_family, check_pure_family};
use crate::random::seeded;
use crate::states::{
    random_block_diagonal_state, DensityMatrix, DiscreteEnsemble, PureStateFamily,
};

/// Floor on the tolerance used for structural (c-q, equivalence) checks.
pub const STRUCTURE_TOL: f64 = 1e-8;
/// Leakage allowed when locating vectors and projectors inside c-q blocks.
const BLOCK_TOL: f64 = 1e-7;
const SIGMA_RANK_TOL: f64 = 1e-8;
const ORTHOGONALITY_TOL: f64 = 1e-8;
const PARTIAL_ISOMETRY_TOL: f64 = 1e-9;
/// Number of random block-diagonal states added to the adapted basis.
const BLOCK_SAMPLES: usize = 3;
const BLOCK_SEED: u64 = 0xb10c;

fn structure_tol(tol: f64) -> f64 {
    tol.max(STRUCTURE_TOL)
}

fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn check_complete(family: &PureStateFamily) -> Result<()> {
    let rank = rank_tol(&family.stacked(), DEFAULT_TOL);
    if rank < family.dim() {
        return Err(Error::NotComplete {
            rank,
            dim: family.dim(),
        });
    }
    Ok(())
}

/// `min{m(Φ) + 1, dim H^Φ_B}`
fn block_bound(channel: &KrausChannel) -> usize {
    let span = channel.output_span_and_m(DEFAULT_TOL);
    (span.m_value + 1).min(span.dim())
}

/// Eigenvectors of `σ` scaled by root eigenvalues, so `Σ ψψ† = σ`.
fn spectral_vectors(sigma: &DensityMatrix) -> Vec<CVector> {
    let eig = sigma.eig();
    let cut = SIGMA_RANK_TOL * eig.max_eigenvalue();
    (0..eig.dim())
        .filter(|&j| eig.eigenvalues[j] > cut)
        .map(|j| eig.vector(j) * cr(eig.eigenvalues[j].sqrt()))
        .collect()
}

fn max_sigma_rank(cq: &CqStructure) -> usize {
    cq.sigma_ranks(SIGMA_RANK_TOL)
        .into_iter()
        .max()
        .unwrap_or(0)
}

/// Records the equivalence of `channel` with the block-embedding channel
/// built from `projectors` and the c-q states assigned to them.
fn embedding_statement(
    report: &mut CriterionReport,
    key: &str,
    channel: &KrausChannel,
    projectors: &[CMatrix],
    sigmas: &[&DensityMatrix],
    m: usize,
    tol: f64,
) -> Result<()> {
    let psi: Vec<Vec<CVector>> = sigmas.iter().map(|s| spectral_vectors(s)).collect();
    let embedded = block_embedding_channel(projectors, &psi, m)?;
    match find_equivalence_witness(channel, &embedded, structure_tol(tol))? {
        Some(w) => {
            let residual = isometric_equivalence_residual(channel, &embedded, &w)?;
            report.set(key, StatementOutcome::new(Outcome::Pass, Some(residual)));
            report.values.insert(format!("{key}_residual"), residual);
            report.witnesses.isometry = Some(w);
        }
        None => report.set(
            key,
            StatementOutcome::new(Outcome::Unknown, None)
                .with_note("no isometric equivalence witness found"),
        ),
    }
    Ok(())
}

fn finish(report: &mut CriterionReport, keys: &[&str]) {
    let outcomes: Vec<Outcome> = keys.iter().map(|k| report.outcome(k)).collect();
    report.verdict = Verdict::from_agreement(&outcomes);
    let decided = outcomes.iter().filter(|o| **o != Outcome::Unknown).count();
    if report.verdict == Verdict::Unknown && decided > 0 {
        let summary: Vec<String> = keys
            .iter()
            .zip(&outcomes)
            .map(|(k, o)| format!("{k}={}", o.as_str()))
            .collect();
        report.warnings.push(format!(
            "equivalent statements disagree: {}",
            summary.join(", ")
        ));
    }
}

/// Reversibility with respect to a complete orthonormal family.
///
/// Statements:
/// - `petz_recovery`: the Petz channel of the uniform average recovers
///   every member;
/// - `complement_cq`: `Φ̂` is classical-quantum in the family's basis with
///   every `rank σ_i ≤ m`, where `m = min{m(Φ) + 1, dim H^Φ_B}`;
/// - `isometric_embedding`: `Φ` is isometrically equivalent to
///   `ρ ↦ Σ_ij <φ_i|ρ|φ_j> |φ_i><φ_j| ⊗ Σ_pt <ψ^j_t|ψ^i_p> |p><t|` built from
///   the spectral vectors of `σ_i`;
/// - `w_condition`: the adjoint of that witness satisfies
///   [`verify_w_condition`].
pub fn check_orthogonal_criterion(
    channel: &KrausChannel,
    family: &PureStateFamily,
    tol: f64,
) -> Result<CriterionReport> {
    if family.dim() != channel.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "family of dimension {} for a {}-dimensional input",
            family.dim(),
            channel.dim_in()
        )));
    }
    let vectors = family.vectors();
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            let overlap = vectors[i].dotc(&vectors[j]).norm();
            if overlap > ORTHOGONALITY_TOL {
                return Err(Error::NotOrthogonal { i, j, overlap });
            }
        }
    }
    check_complete(family)?;

    let mut report = CriterionReport::new(tol);
    let m = block_bound(channel);
    report.m_value = Some(m);

    let petz = check_pure_family(channel, family, &uniform_weights(family.len()), tol)?;
    report.set(
        "petz_recovery",
        StatementOutcome::new(Outcome::from_bool(petz.reversible), Some(petz.max_residual)),
    );

    let complement = channel.complementary();
    let cq = detect_cq(&complement, structure_tol(tol));
    let assignment: Option<Vec<usize>> = cq.as_ref().and_then(|cq| {
        vectors
            .iter()
            .map(|v| cq.block_containing(v, BLOCK_TOL))
            .collect()
    });
    let projectors: Vec<CMatrix> = vectors.iter().map(projector_onto).collect();
    report.witnesses.projectors = Some(projectors.clone());
    match (&cq, &assignment) {
        (Some(cq), Some(blocks)) => {
            let rank = max_sigma_rank(cq);
            let statement = StatementOutcome::new(Outcome::from_bool(rank <= m), Some(cq.residual));
            report.set(
                "complement_cq",
                if rank <= m {
                    statement
                } else {
                    statement.with_note(format!("rank σ = {rank} exceeds m = {m}"))
                },
            );
            if rank <= m {
                let sigmas: Vec<&DensityMatrix> = blocks.iter().map(|&k| &cq.sigmas[k]).collect();
                embedding_statement(
                    &mut report,
                    "isometric_embedding",
                    channel,
                    &projectors,
                    &sigmas,
                    m,
                    tol,
                )?;
            }
        }
        (Some(_), None) => report.set(
            "complement_cq",
            StatementOutcome::new(Outcome::Fail, None)
                .with_note("complementary channel is not classical-quantum in the family basis"),
        ),
        (None, _) => report.set(
            "complement_cq",
            StatementOutcome::new(Outcome::Fail, None)
                .with_note("complementary channel is not classical-quantum"),
        ),
    }
    if report.outcome("complement_cq") == Outcome::Fail {
        report.set(
            "isometric_embedding",
            StatementOutcome::new(Outcome::Fail, None)
                .with_note("no c-q representation of the complementary channel to embed"),
        );
    }
    report.witnesses.cq = cq;

    if let Some(w) = report.witnesses.isometry.clone() {
        let residual = w_condition_residual(channel, family, &w.adjoint())?;
        report.set(
            "w_condition",
            StatementOutcome::new(
                Outcome::from_bool(residual <= structure_tol(tol)),
                Some(residual),
            ),
        );
    }
    finish(
        &mut report,
        &[
            "petz_recovery",
            "complement_cq",
            "isometric_embedding",
            "w_condition",
        ],
    );
    Ok(report)
}

/// Largest violation of `|φ_i><φ_i| = Φ*(W (|φ_i><φ_i| ⊗ I_m) W†)`,
/// `Φ*(W W†) = I` and of `W` being a partial isometry.
pub fn w_condition_residual(
    channel: &KrausChannel,
    family: &PureStateFamily,
    w: &CMatrix,
) -> Result<f64> {
    let (da, db) = (channel.dim_in(), channel.dim_out());
    if w.nrows() != db || da == 0 || !w.ncols().is_multiple_of(da) || w.ncols() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "W is {:?}, expected ({db}, {da}·m)",
            w.shape()
        )));
    }
    if family.dim() != da {
        return Err(Error::DimensionMismatch(format!(
            "family of dimension {} for a {da}-dimensional input",
            family.dim()
        )));
    }
    let m = w.ncols() / da;
    let mut residual =
        projector_defect(&(w.adjoint() * w)).max(projector_defect(&(w * w.adjoint())));
    let ancilla = linalg::identity(m);
    for v in family.vectors() {
        let p = projector_onto(v);
        let pulled = channel.dual_apply(&(w * tensor(&p, &ancilla) * w.adjoint()))?;
        residual = residual.max(trace_norm_dist(&p, &pulled)?);
    }
    let unit = channel.dual_apply(&(w * w.adjoint()))?;
    residual = residual.max(trace_norm_dist(&unit, &linalg::identity(da))?);
    Ok(residual)
}

/// Whether the partial isometry `W: H_A ⊗ C^m → H_B` satisfies
/// `|φ_i><φ_i| = Φ*(W (|φ_i><φ_i| ⊗ I_m) W†)` for every member and
/// `Φ*(W W†) = I`, all within `tol`.
pub fn verify_w_condition(
    channel: &KrausChannel,
    family: &PureStateFamily,
    w: &CMatrix,
    tol: f64,
) -> Result<bool> {
    let residual = w_condition_residual(channel, family, w)?;
    let isometry = projector_defect(&(w.adjoint() * w)) <= PARTIAL_ISOMETRY_TOL;
    Ok(isometry && residual <= tol)
}

/// Reversibility with respect to an arbitrary complete pure family, via the
/// orthogonally non-decomposable blocks `{P_k}` of the family.
///
/// Statements:
/// - `petz_recovery`: the Petz channel recovers the family itself;
/// - `block_diagonal_recovery`: recovery of the basis adapted to `⊕ H_k`
///   together with seeded random block-diagonal states;
/// - `complement_cq`: `Φ̂(ρ) = Σ_k Tr(P_k ρ) σ_k` with `rank σ_k ≤ m`;
/// - `isometric_embedding`: equivalence with
///   `ρ ↦ Σ_kl P_k ρ P_l ⊗ Σ_pt <ψ^l_t|ψ^k_p> |p><t|`.
pub fn check_general_criterion(
    channel: &KrausChannel,
    family: &PureStateFamily,
    tol: f64,
) -> Result<CriterionReport> {
    if family.dim() != channel.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "family of dimension {} for a {}-dimensional input",
            family.dim(),
            channel.dim_in()
        )));
    }
    check_complete(family)?;
    let mut report = CriterionReport::new(tol);
    let ond = ond_decompose(family, OND_EDGE_TOL);
    for (i, j, overlap) in &ond.ambiguous_pairs {
        report.warnings.push(format!(
            "members {i} and {j} have overlap {overlap:.3e}, close to the orthogonality threshold"
        ));
    }
    let m = block_bound(channel);
    report.m_value = Some(m);
    report.values.insert("blocks".into(), ond.len() as f64);

    let petz = check_pure_family(channel, family, &uniform_weights(family.len()), tol)?;
    report.set(
        "petz_recovery",
        StatementOutcome::new(Outcome::from_bool(petz.reversible), Some(petz.max_residual)),
    );

    let basis = ond.adapted_basis();
    let mut states: Vec<DensityMatrix> = basis
        .column_iter()
        .map(|col| DensityMatrix::pure(&col.into_owned()))
        .collect();
    let mut rng = seeded(BLOCK_SEED);
    for _ in 0..BLOCK_SAMPLES {
        states.push(random_block_diagonal_state(&ond.projectors, &mut rng)?);
    }
    let surrogate = check_family(channel, &DiscreteEnsemble::uniform(states)?, tol)?;
    report.set(
        "block_diagonal_recovery",
        StatementOutcome::new(
            Outcome::from_bool(surrogate.reversible),
            Some(surrogate.max_residual),
        ),
    );

    let complement = channel.complementary();
    let cq = detect_cq(&complement, structure_tol(tol));
    match &cq {
        Some(cq) => {
            let cover: Option<Vec<usize>> = ond
                .projectors
                .iter()
                .map(|p| cq.block_covering(p, BLOCK_TOL))
                .collect();
            let rank = max_sigma_rank(cq);
            match cover {
                Some(blocks) if rank <= m => {
                    report.set(
                        "complement_cq",
                        StatementOutcome::new(Outcome::Pass, Some(cq.residual)),
                    );
                    let sigmas: Vec<&DensityMatrix> =
                        blocks.iter().map(|&k| &cq.sigmas[k]).collect();
                    embedding_statement(
                        &mut report,
                        "isometric_embedding",
                        channel,
                        &ond.projectors,
                        &sigmas,
                        m,
                        tol,
                    )?;
                }
                Some(_) => report.set(
                    "complement_cq",
                    StatementOutcome::new(Outcome::Fail, Some(cq.residual))
                        .with_note(format!("rank σ = {rank} exceeds m = {m}")),
                ),
                None => report.set(
                    "complement_cq",
                    StatementOutcome::new(Outcome::Fail, Some(cq.residual)).with_note(
                        "c-q blocks of the complementary channel split a block of the family",
                    ),
                ),
            }
        }
        None => report.set(
            "complement_cq",
            StatementOutcome::new(Outcome::Fail, None)
                .with_note("complementary channel is not classical-quantum"),
        ),
    }
    if report.outcome("complement_cq") == Outcome::Fail {
        report.set(
            "isometric_embedding",
            StatementOutcome::new(Outcome::Fail, None)
                .with_note("no c-q representation of the complementary channel to embed"),
        );
    }
    report.witnesses.cq = cq;
    report.witnesses.projectors = Some(ond.projectors.clone());
    report.witnesses.ensemble_basis = Some(basis);
    finish(
        &mut report,
        &[
            "petz_recovery",
            "block_diagonal_recovery",
            "complement_cq",
            "isometric_embedding",
        ],
    );
    Ok(report)
}

/// Reconstruction of a reversible channel as `ρ ↦ Σ_kl c_kl P_k ρ P_l` up
/// to a unitary on the output.
#[derive(Debug, Clone)]
pub struct GramReconstruction {
    pub projectors: Vec<CMatrix>,
    /// `c_kl = <ψ_l|ψ_k>` for the pure states `σ_k = |ψ_k><ψ_k|`.
    pub gram: CMatrix,
    /// `W` with `Φ(ρ) = W Φ'(ρ) W†`, when one was found.
    pub witness: Option<CMatrix>,
    pub witness_residual: Option<f64>,
    pub report: CriterionReport,
}

/// Recovers the Gram-matrix form of a channel reversible on `family`.
///
/// Requires either `ker Φ* = {0}` on the whole output space or equal input
/// and output dimensions with `Φ(I) = I`. Returns `None` when the channel
/// is not reversible on the family.
pub fn gram_reconstruct(
    channel: &KrausChannel,
    family: &PureStateFamily,
    tol: f64,
) -> Result<Option<GramReconstruction>> {
    let span = channel.output_span_and_m(DEFAULT_TOL);
    let injective_dual = span.m_value == 0 && span.dim() == channel.dim_out();
    let unital_square = channel.dim_in() == channel.dim_out() && {
        let image = channel.apply_operator(&linalg::identity(channel.dim_in()))?;
        (image - linalg::identity(channel.dim_out())).norm() <= structure_tol(tol)
    };
    if !injective_dual && !unital_square {
        return Err(Error::HypothesisNotMet(format!(
            "dual map has a kernel of dimension {} on an output span of dimension {} of {}, \
             and the channel is not a unital map between equal dimensions",
            span.m_value,
            span.dim(),
            channel.dim_out()
        )));
    }
    let report = check_general_criterion(channel, family, tol)?;
    if report.verdict != Verdict::Reversible {
        return Ok(None);
    }
    let (Some(cq), Some(projectors)) = (&report.witnesses.cq, &report.witnesses.projectors) else {
        return Ok(None);
    };
    let mut psi = Vec::with_capacity(projectors.len());
    for p in projectors {
        let k = cq.block_covering(p, BLOCK_TOL).ok_or_else(|| {
            Error::HypothesisNotMet("family block not covered by the c-q resolution".into())
        })?;
        let sigma = &cq.sigmas[k];
        let rank = sigma.rank(SIGMA_RANK_TOL);
        if rank != 1 {
            return Err(Error::HypothesisNotMet(format!(
                "complementary output state {k} has rank {rank}, expected a pure state"
            )));
        }
        psi.push(sigma.eig().vector(0));
    }
    let n = psi.len();
    let gram = CMatrix::from_fn(n, n, |k, l| psi[l].dotc(&psi[k]));
    let rebuilt = gram_channel(projectors, &gram)?;
    let witness = find_equivalence_witness(&rebuilt, channel, structure_tol(tol))?;
    let witness_residual = match &witness {
        Some(w) => Some(isometric_equivalence_residual(&rebuilt, channel, w)?),
        None => None,
    };
    Ok(Some(GramReconstruction {
        projectors: projectors.clone(),
        gram,
        witness,
        witness_residual,
        report,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{dephasing, depolarize_to, identity, pinching, unitary};
    use crate::linalg::{basis_vector, c, matrix_unit};
    use crate::random::{random_unitary, unit_vector};

    fn bit_flip_mixture() -> KrausChannel {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]);
        KrausChannel::new(2, 2, vec![linalg::identity(2) * cr(s), x * cr(s)]).unwrap()
    }

    /// Basis of C^3 adapted to blocks {0, 1} and {2}, plus a vector joining
    /// the first block.
    fn two_block_family() -> PureStateFamily {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let joint = CVector::from_vec(vec![cr(s), cr(s), cr(0.0)]);
        PureStateFamily::new(
            3,
            vec![
                basis_vector(3, 0),
                basis_vector(3, 1),
                joint,
                basis_vector(3, 2),
            ],
        )
        .unwrap()
    }

    fn two_block_projectors() -> Vec<CMatrix> {
        vec![
            matrix_unit(3, 0, 0) + matrix_unit(3, 1, 1),
            matrix_unit(3, 2, 2),
        ]
    }

    #[test]
    fn orthogonal_dephasing_is_reversible() {
        let report =
            check_orthogonal_criterion(&dephasing(2), &PureStateFamily::standard_basis(2), 1e-9)
                .unwrap();
        assert_eq!(report.verdict, Verdict::Reversible);
        assert_eq!(report.outcome("complement_cq"), Outcome::Pass);
        assert_eq!(report.outcome("isometric_embedding"), Outcome::Pass);
        assert_eq!(report.outcome("w_condition"), Outcome::Pass);
        let cq = report.witnesses.cq.as_ref().unwrap();
        assert!(cq.sigma_ranks(1e-8).iter().all(|&r| r == 1));
    }

    #[test]
    fn orthogonal_identity_in_any_basis() {
        let u = random_unitary(3, &mut seeded(4));
        let fam = PureStateFamily::from_columns(&u).unwrap();
        let report = check_orthogonal_criterion(&identity(3), &fam, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Reversible);
        assert_eq!(report.witnesses.cq.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn orthogonal_bit_flip_mixture_is_not_reversible() {
        let report = check_orthogonal_criterion(
            &bit_flip_mixture(),
            &PureStateFamily::standard_basis(2),
            1e-9,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::NotReversible);
        assert_eq!(report.outcome("petz_recovery"), Outcome::Fail);
        assert_eq!(report.outcome("complement_cq"), Outcome::Fail);
    }

    #[test]
    fn orthogonal_criterion_rejects_bad_families() {
        let fam = two_block_family();
        assert!(matches!(
            check_orthogonal_criterion(&identity(3), &fam, 1e-9),
            Err(Error::NotOrthogonal { .. })
        ));
        let partial =
            PureStateFamily::new(3, vec![basis_vector(3, 0), basis_vector(3, 1)]).unwrap();
        assert!(matches!(
            check_orthogonal_criterion(&identity(3), &partial, 1e-9),
            Err(Error::NotComplete { rank: 2, dim: 3 })
        ));
    }

    #[test]
    fn w_condition_examples() {
        let basis = PureStateFamily::standard_basis(2);
        assert!(verify_w_condition(&identity(2), &basis, &linalg::identity(2), 1e-9).unwrap());
        let dep = depolarize_to(&DensityMatrix::maximally_mixed(2), 2).unwrap();
        let mut rng = seeded(9);
        for _ in 0..10 {
            let w = random_unitary(2, &mut rng);
            assert!(!verify_w_condition(&dep, &basis, &w, 1e-6).unwrap());
        }
        assert!(verify_w_condition(&identity(2), &basis, &linalg::identity(3), 1e-9).is_err());
    }

    #[test]
    fn general_pinching_is_reversible() {
        let ch = pinching(&two_block_projectors()).unwrap();
        let report = check_general_criterion(&ch, &two_block_family(), 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Reversible, "{report:?}");
        assert_eq!(report.values["blocks"], 2.0);
        let cq = report.witnesses.cq.as_ref().unwrap();
        assert!(cq.sigma_ranks(1e-8).iter().all(|&r| r == 1));
        assert!(report.witnesses.isometry.is_some());
    }

    #[test]
    fn general_depolarizing_is_not_reversible() {
        let ch = depolarize_to(&DensityMatrix::maximally_mixed(3), 3).unwrap();
        let report = check_general_criterion(&ch, &two_block_family(), 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::NotReversible);
    }

    #[test]
    fn general_dephasing_fails_on_joined_block() {
        // dephasing destroys the coherence inside the first block
        let report = check_general_criterion(&dephasing(3), &two_block_family(), 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::NotReversible);
        assert_eq!(report.outcome("complement_cq"), Outcome::Fail);
    }

    #[test]
    fn general_criterion_needs_complete_family() {
        let fam = PureStateFamily::new(3, vec![basis_vector(3, 0)]).unwrap();
        assert!(matches!(
            check_general_criterion(&identity(3), &fam, 1e-9),
            Err(Error::NotComplete { .. })
        ));
    }

    #[test]
    fn gram_of_dephasing_is_identity() {
        let rec = gram_reconstruct(&dephasing(2), &PureStateFamily::standard_basis(2), 1e-9)
            .unwrap()
            .unwrap();
        assert!((rec.gram.clone() - linalg::identity(2)).norm() < 1e-8);
        let w = rec.witness.unwrap();
        // the witness is fixed up to phases on each block
        for i in 0..2 {
            for j in 0..2 {
                if i != j {
                    assert!(w[(i, j)].norm() < 1e-8);
                }
            }
            assert!((w[(i, i)].norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn gram_round_trip_keeps_moduli() {
        let c12 = c(0.3, 0.4);
        let gram = CMatrix::from_row_slice(2, 2, &[cr(1.0), c12, c12.conj(), cr(1.0)]);
        let projectors = vec![matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)];
        let ch = gram_channel(&projectors, &gram).unwrap();
        let rec = gram_reconstruct(&ch, &PureStateFamily::standard_basis(2), 1e-9)
            .unwrap()
            .unwrap();
        assert!((rec.gram[(0, 1)].norm() - 0.5).abs() < 1e-8);
        assert!(rec.witness_residual.unwrap() < 1e-8);
    }

    #[test]
    fn gram_of_unitary_is_trivial() {
        let u = random_unitary(2, &mut seeded(12));
        let ch = unitary(&u).unwrap();
        let mut rng = seeded(13);
        let fam = PureStateFamily::new(2, vec![unit_vector(2, &mut rng), unit_vector(2, &mut rng)])
            .unwrap();
        let rec = gram_reconstruct(&ch, &fam, 1e-9).unwrap().unwrap();
        assert_eq!(rec.projectors.len(), 1);
        assert!((rec.gram[(0, 0)] - cr(1.0)).norm() < 1e-8);
        let w = rec.witness.unwrap();
        let phase = (u.adjoint() * &w).trace() / cr(2.0);
        assert!((&u * phase - w).norm() < 1e-7);
    }

    #[test]
    fn gram_requires_hypothesis() {
        let dep = depolarize_to(&DensityMatrix::diagonal(&[0.7, 0.3]).unwrap(), 2).unwrap();
        assert!(matches!(
            gram_reconstruct(&dep, &PureStateFamily::standard_basis(2), 1e-9),
            Err(Error::HypothesisNotMet(_))
        ));
    }
}
