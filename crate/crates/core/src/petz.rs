//! Petz recovery channel and the reversibility tests built on it.

use serde::Serialize;

use crate::channels::{prepare_on, KrausChannel};
use crate::divergences::{relative_entropy, ExtendedReal, LogBase};
use crate::error::{Error, Result};
use crate::linalg::{psd_sqrt, rank_tol, trace_norm_dist, CMatrix, DEFAULT_TOL};
use crate::states::{
    average_state, check_nondegenerate, DensityMatrix, DiscreteEnsemble, PureStateFamily,
};

/// Threshold on `|H(ρ‖σ) − H(Φ(ρ)‖Φ(σ))|` for the entropic verdict.
pub const ENTROPY_GAP_TOL: f64 = 1e-6;
/// Trace-preservation slack accepted for recovery channels built from
/// ill-conditioned `Φ(σ)`.
const RECOVERY_TP_TOL: f64 = 1e-6;

/// Petz recovery channel
/// `Θ_σ(ϱ) = σ^{1/2} Φ*(Φ(σ)^{-1/2} ϱ Φ(σ)^{-1/2}) σ^{1/2} + σ Tr[(I − Π) ϱ]`,
/// where the inverse is taken on `supp Φ(σ)` (relative cutoff `tol`) and
/// `Π` projects onto that support.
pub fn petz_channel(
    channel: &KrausChannel,
    sigma: &DensityMatrix,
    tol: f64,
) -> Result<KrausChannel> {
    if sigma.dim() != channel.dim_in() {
        return Err(Error::InvalidState(format!(
            "reference state has dimension {}, channel input is {}",
            sigma.dim(),
            channel.dim_in()
        )));
    }
    let sqrt_sigma = psd_sqrt(sigma.matrix())?;
    let image = channel.apply(sigma)?;
    let eig = image.eig();
    let cut = tol * eig.max_eigenvalue();
    let inv_sqrt = eig.map(|x| if x > cut { 1.0 / x.sqrt() } else { 0.0 });
    let mut kraus: Vec<CMatrix> = channel
        .kraus()
        .iter()
        .map(|v| &sqrt_sigma * v.adjoint() * &inv_sqrt)
        .collect();
    let complement = eig.vectors_at_or_below(cut);
    if complement.ncols() > 0 {
        kraus.extend(prepare_on(sigma, &complement));
    }
    KrausChannel::new_with_tol(channel.dim_out(), channel.dim_in(), kraus, RECOVERY_TP_TOL)
}

/// Outcome of testing reversibility of a channel on a pair of states.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveryDiagnostics {
    /// `H(ρ‖σ) − H(Φ(ρ)‖Φ(σ))`
    pub entropy_gap: ExtendedReal,
    /// `‖ρ − Θ_σ(Φ(ρ))‖₁`
    pub recovery_residual: f64,
    /// Recovery residual within `tolerance`.
    pub reversible: bool,
    /// Entropy gap within [`ENTROPY_GAP_TOL`].
    pub entropy_preserved: bool,
    pub tolerance: f64,
}

impl RecoveryDiagnostics {
    /// Whether the entropic and recovery verdicts coincide.
    pub fn verdicts_agree(&self) -> bool {
        self.reversible == self.entropy_preserved
    }
}

/// Compares `H(Φ(ρ)‖Φ(σ)) = H(ρ‖σ)` with `ρ = Θ_σ(Φ(ρ))`.
pub fn check_pair(
    channel: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: f64,
    base: LogBase,
) -> Result<RecoveryDiagnostics> {
    if rho.dim() != channel.dim_in() || sigma.dim() != channel.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {} for a {}-dimensional input",
            rho.dim(),
            sigma.dim(),
            channel.dim_in()
        )));
    }
    let before = relative_entropy(rho, sigma, base);
    if !before.is_finite() {
        return Err(Error::SupportViolation);
    }
    let after = relative_entropy(&channel.apply(rho)?, &channel.apply(sigma)?, base);
    let entropy_gap = before.checked_sub(after)?;
    let theta = petz_channel(channel, sigma, DEFAULT_TOL)?;
    let recovered = theta.apply(&channel.apply(rho)?)?;
    let recovery_residual = trace_norm_dist(rho.matrix(), recovered.matrix())?;
    let entropy_preserved = entropy_gap
        .finite()
        .is_some_and(|g| g.abs() <= ENTROPY_GAP_TOL);
    Ok(RecoveryDiagnostics {
        entropy_gap,
        recovery_residual,
        reversible: recovery_residual <= tol,
        entropy_preserved,
        tolerance: tol,
    })
}

/// Outcome of testing `ρ_i = Θ_ρ̄(Φ(ρ_i))` for every member of a family.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyCheck {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub reversible: bool,
    /// The average state is rank deficient, so only its support is tested.
    pub restricted: bool,
    pub tolerance: f64,
}

/// Reversibility of `channel` on an ensemble via the Petz channel of its
/// average state.
pub fn check_family(
    channel: &KrausChannel,
    ensemble: &DiscreteEnsemble,
    tol: f64,
) -> Result<FamilyCheck> {
    if ensemble.dim() != channel.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "ensemble of dimension {} for a {}-dimensional input",
            ensemble.dim(),
            channel.dim_in()
        )));
    }
    let avg = average_state(ensemble);
    let restricted = rank_tol(avg.matrix(), DEFAULT_TOL) < avg.dim();
    let theta = petz_channel(channel, &avg, DEFAULT_TOL)?;
    let mut residuals = Vec::with_capacity(ensemble.len());
    for rho in ensemble.states() {
        let back = theta.apply(&channel.apply(rho)?)?;
        residuals.push(trace_norm_dist(rho.matrix(), back.matrix())?);
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(FamilyCheck {
        residuals,
        max_residual,
        reversible: max_residual <= tol,
        restricted,
        tolerance: tol,
    })
}

/// [`check_family`] on the pure states of `family` weighted by `weights`.
pub fn check_pure_family(
    channel: &KrausChannel,
    family: &PureStateFamily,
    weights: &[f64],
    tol: f64,
) -> Result<FamilyCheck> {
    check_nondegenerate(weights, family.len())?;
    let ensemble = DiscreteEnsemble::from_pure_family(family, weights.to_vec())?;
    check_family(channel, &ensemble, tol)
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidT(t))
    }
}

/// Petz channel of `σ_t = tρ + (1−t)σ`.
pub fn petz_t_channel(
    channel: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    t: f64,
) -> Result<KrausChannel> {
    check_t(t)?;
    petz_channel(channel, &rho.mix(sigma, t)?, DEFAULT_TOL)
}

/// `(t, ‖Choi(Θ_t) − Choi(Θ_σ)‖₁)` along a strictly decreasing grid in `(0, 1)`.
pub fn theta_t_convergence(
    channel: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    t_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    for (i, &t) in t_grid.iter().enumerate() {
        check_t(t)?;
        if i > 0 && t >= t_grid[i - 1] {
            return Err(Error::InvalidT(t));
        }
    }
    let limit = petz_channel(channel, sigma, DEFAULT_TOL)?.choi();
    t_grid
        .iter()
        .map(|&t| {
            let theta = petz_t_channel(channel, rho, sigma, t)?;
            Ok((t, trace_norm_dist(&theta.choi(), &limit)?))
        })
        .collect()
}

/// `‖Θ_σ(Φ(σ)) − σ‖₁`
pub fn fixed_point_residual(channel: &KrausChannel, sigma: &DensityMatrix) -> Result<f64> {
    let theta = petz_channel(channel, sigma, DEFAULT_TOL)?;
    let back = theta.apply(&channel.apply(sigma)?)?;
    trace_norm_dist(back.matrix(), sigma.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{dephasing, depolarize_to, identity, pinching, unitary};
    use crate::linalg::{cr, matrix_unit, CVector};
    use crate::random::{random_channel, random_unitary, seeded};
    use crate::states::random_state;

    const BITS: LogBase = LogBase::Bits;

    fn plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&CVector::from_vec(vec![cr(s), cr(s)]))
    }

    #[test]
    fn petz_of_unitary_is_inverse_unitary() {
        let u = random_unitary(3, &mut seeded(1));
        let sigma = random_state(3, 3, 2).unwrap();
        let theta = petz_channel(&unitary(&u).unwrap(), &sigma, DEFAULT_TOL).unwrap();
        let inverse = unitary(&u.adjoint()).unwrap();
        assert!(theta.choi_distance(&inverse).unwrap() < 1e-9);
    }

    #[test]
    fn petz_of_dephasing_at_maximally_mixed_is_dephasing() {
        let theta = petz_channel(
            &dephasing(2),
            &DensityMatrix::maximally_mixed(2),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(theta.choi_distance(&dephasing(2)).unwrap() < 1e-12);
    }

    #[test]
    fn petz_of_depolarizing_prepares_reference() {
        let tau = random_state(2, 2, 3).unwrap();
        let sigma = random_state(3, 3, 4).unwrap();
        let theta = petz_channel(&depolarize_to(&tau, 3).unwrap(), &sigma, DEFAULT_TOL).unwrap();
        let expected = depolarize_to(&sigma, 2).unwrap();
        assert!(theta.choi_distance(&expected).unwrap() < 1e-9);

        // rank-deficient target: the completion branch covers the kernel
        let tau = random_state(3, 1, 5).unwrap();
        let theta = petz_channel(
            &depolarize_to(&tau, 2).unwrap(),
            &random_state(2, 2, 6).unwrap(),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(theta.tp_residual() < 1e-9);
        assert_eq!(theta.dim_in(), 3);
    }

    #[test]
    fn fixed_point_and_trace_preservation() {
        for seed in 0..40u64 {
            let d = 2 + (seed as usize % 3);
            let ch =
                random_channel(d, 2 + (seed as usize % 4), 1 + (seed as usize % 3), seed).unwrap();
            let sigma = random_state(d, d, 1000 + seed).unwrap();
            assert!(
                fixed_point_residual(&ch, &sigma).unwrap() < 1e-8,
                "seed {seed}"
            );
            let theta = petz_channel(&ch, &sigma, DEFAULT_TOL).unwrap();
            assert!(theta.tp_residual() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let sigma = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            petz_channel(&dephasing(2), &sigma, DEFAULT_TOL),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn pair_cases() {
        let rho = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let sigma = DensityMatrix::diagonal(&[0.4, 0.6]).unwrap();
        let diag = check_pair(&dephasing(2), &rho, &sigma, DEFAULT_TOL, BITS).unwrap();
        assert!(diag.reversible && diag.entropy_preserved);
        assert!(diag.recovery_residual < 1e-12);

        let mm = DensityMatrix::maximally_mixed(2);
        let diag = check_pair(&dephasing(2), &plus(), &mm, DEFAULT_TOL, BITS).unwrap();
        assert!((diag.entropy_gap.finite().unwrap() - 1.0).abs() < 1e-10);
        assert!(diag.recovery_residual > 0.4);
        assert!(!diag.reversible && diag.verdicts_agree());

        let r = random_state(3, 2, 7).unwrap();
        let s = random_state(3, 3, 8).unwrap();
        let diag = check_pair(&identity(3), &r, &s, DEFAULT_TOL, BITS).unwrap();
        assert!(diag.reversible && diag.entropy_gap.finite().unwrap().abs() < 1e-10);

        let e0 = DensityMatrix::basis_state(2, 0);
        let e1 = DensityMatrix::basis_state(2, 1);
        assert!(matches!(
            check_pair(&dephasing(2), &e0, &e1, DEFAULT_TOL, BITS),
            Err(Error::SupportViolation)
        ));
    }

    #[test]
    fn pair_with_rank_deficient_reference() {
        // both states live in span{e0, e1} of C^3 and the pinching keeps that block
        let block = matrix_unit(3, 0, 0) + matrix_unit(3, 1, 1);
        let rest = matrix_unit(3, 2, 2);
        let ch = pinching(&[block, rest]).unwrap();
        let rho = DensityMatrix::new(random_state(2, 2, 9).unwrap().matrix().clone().resize(
            3,
            3,
            cr(0.0),
        ))
        .unwrap();
        let sigma = DensityMatrix::new(random_state(2, 2, 10).unwrap().matrix().clone().resize(
            3,
            3,
            cr(0.0),
        ))
        .unwrap();
        let diag = check_pair(&ch, &rho, &sigma, DEFAULT_TOL, BITS).unwrap();
        assert!(diag.reversible && diag.entropy_preserved);
    }

    #[test]
    fn family_cases() {
        let basis = PureStateFamily::standard_basis(2);
        let fc = check_pure_family(&dephasing(2), &basis, &[0.5, 0.5], DEFAULT_TOL).unwrap();
        assert!(fc.reversible && !fc.restricted && fc.max_residual < 1e-10);

        let fam = crate::states::random_pure_family(3, 4, 11).unwrap();
        let fc = check_pure_family(&identity(3), &fam, &[0.25; 4], DEFAULT_TOL).unwrap();
        assert!(fc.reversible);

        let dep = depolarize_to(&DensityMatrix::maximally_mixed(2), 2).unwrap();
        let fc = check_pure_family(&dep, &basis, &[0.5, 0.5], DEFAULT_TOL).unwrap();
        assert!(!fc.reversible && fc.max_residual > 0.5);

        assert!(matches!(
            check_pure_family(&dephasing(2), &basis, &[1.0, 0.0], DEFAULT_TOL),
            Err(Error::DegenerateDistribution(_))
        ));

        let partial = PureStateFamily::new(3, vec![crate::linalg::basis_vector(3, 0)]).unwrap();
        let fc = check_pure_family(&identity(3), &partial, &[1.0], DEFAULT_TOL).unwrap();
        assert!(fc.restricted && fc.reversible);
    }

    #[test]
    fn theta_t_cases() {
        let ch = random_channel(2, 3, 2, 12).unwrap();
        let s = random_state(2, 2, 13).unwrap();
        for (_, dist) in theta_t_convergence(&ch, &s, &s, &[0.5, 0.1]).unwrap() {
            assert!(dist < 1e-12);
        }
        let r = random_state(2, 1, 14).unwrap();
        for (_, dist) in theta_t_convergence(&identity(2), &r, &s, &[0.5, 0.1]).unwrap() {
            assert!(dist < 1e-9);
        }
        let grid = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let e0 = DensityMatrix::basis_state(2, 0);
        let mm = DensityMatrix::maximally_mixed(2);
        let conv = theta_t_convergence(&dephasing(2), &e0, &mm, &grid).unwrap();
        for w in conv.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-9);
        }
        assert!(conv.last().unwrap().1 < 1e-3);
        assert!(matches!(
            theta_t_convergence(&dephasing(2), &e0, &mm, &[0.1, 0.2]),
            Err(Error::InvalidT(_))
        ));
        assert!(matches!(
            petz_t_channel(&dephasing(2), &e0, &mm, 0.0),
            Err(Error::InvalidT(_))
        ));
    }
}
