use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{
    cr, herm_eig, hermitian_part, rank_tol, support_inv_sqrt, trace_norm_dist, CMatrix, CVector,
    DEFAULT_TOL,
};
use crate::states::{average_state, DiscreteEnsemble};

/// Relative cutoff below which eigenvalues of `B_i` are dropped.
const SPECTRAL_CUT: f64 = 1e-10;
/// Relative singular-value threshold used when reporting Kraus ranks.
const KRAUS_RANK_TOL: f64 = 1e-8;
/// Threshold for the rank of ensemble members.
const MEMBER_RANK_TOL: f64 = 1e-9;

/// Kraus operators of the complementary channel assembled from the
/// reversibility data of an ensemble.
#[derive(Debug, Clone)]
pub struct KrausExtraction {
    /// `W_ij = Σ_k <ψ_ij|k> V_k`, grouped by member.
    pub kraus: Vec<CMatrix>,
    /// Member index of each operator.
    pub members: Vec<usize>,
    pub ranks: Vec<usize>,
    pub max_rank: usize,
    /// Largest rank among the ensemble members.
    pub member_rank: usize,
    pub m_value: usize,
    pub span_dim: usize,
    /// `n · min{m(Φ) + r², dim H^Φ_B}`
    pub budget: usize,
    /// `max_i ‖A_i − Ψ*(B_i)‖₁`
    pub reversibility_residual: f64,
    /// `‖Σ W†W − I‖`
    pub tp_residual: f64,
    /// Choi distance between `{W_ij}` and the complementary channel.
    pub reexpansion_distance: f64,
    /// Reversibility residual within the tolerance.
    pub reversible: bool,
    /// The average state is rank deficient.
    pub restricted: bool,
}

impl KrausExtraction {
    pub fn count(&self) -> usize {
        self.kraus.len()
    }

    /// Rank and count bounds hold.
    pub fn within_budget(&self) -> bool {
        self.max_rank <= self.member_rank && self.count() <= self.budget
    }
}

/// Builds Kraus operators of `Φ̂` from the ensemble data.
///
/// With `V` the minimal Kraus form of `Φ̂` and `Ψ` the complement of that
/// form, sets `A_i = π_i ρ̄^{-1/2} ρ_i ρ̄^{-1/2}` and
/// `B_i = π_i Ψ(ρ̄)^{-1/2} Ψ(ρ_i) Ψ(ρ̄)^{-1/2}`. The eigenvectors `ψ_ij`
/// of each `B_i` (scaled by the root eigenvalue) give `W_ij`. When the
/// channel is reversible on the ensemble, `Ψ*(B_i) = A_i` and every
/// `W_ij` has rank at most the member rank.
pub fn extract_low_rank_kraus(
    channel: &KrausChannel,
    ensemble: &DiscreteEnsemble,
    tol: f64,
) -> Result<KrausExtraction> {
    if ensemble.dim() != channel.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "ensemble of dimension {} for a {}-dimensional input",
            ensemble.dim(),
            channel.dim_in()
        )));
    }
    let span = channel.output_span_and_m(DEFAULT_TOL);
    let complement = channel.complementary().minimal_kraus(DEFAULT_TOL);
    let psi_channel = complement.complementary_raw();

    let avg = average_state(ensemble);
    let restricted = avg.rank(DEFAULT_TOL) < avg.dim();
    let (avg_inv, _) = support_inv_sqrt(avg.matrix(), DEFAULT_TOL)?;
    let image_avg = psi_channel.apply(&avg)?;
    let (image_inv, _) = support_inv_sqrt(image_avg.matrix(), DEFAULT_TOL)?;

    let mut kraus = Vec::new();
    let mut members = Vec::new();
    let mut residual: f64 = 0.0;
    for (i, (w, rho)) in ensemble.weights().iter().zip(ensemble.states()).enumerate() {
        let a = &avg_inv * rho.matrix() * &avg_inv * cr(*w);
        let b =
            hermitian_part(&(&image_inv * psi_channel.apply(rho)?.matrix() * &image_inv * cr(*w)));
        residual = residual.max(trace_norm_dist(&a, &psi_channel.dual_apply(&b)?)?);
        let eig = herm_eig(&b)?;
        let cut = SPECTRAL_CUT * eig.max_eigenvalue().max(1.0);
        for j in 0..eig.dim() {
            let lambda = eig.eigenvalues[j];
            if lambda <= cut {
                continue;
            }
            let psi: CVector = eig.vector(j) * cr(lambda.sqrt());
            let mut op = CMatrix::zeros(complement.dim_out(), complement.dim_in());
            for (k, v) in complement.kraus().iter().enumerate() {
                op += v * psi[k].conj();
            }
            kraus.push(op);
            members.push(i);
        }
    }
    let ranks: Vec<usize> = kraus.iter().map(|w| rank_tol(w, KRAUS_RANK_TOL)).collect();
    let assembled = KrausChannel::new_with_tol(
        complement.dim_in(),
        complement.dim_out(),
        kraus.clone(),
        f64::INFINITY,
    )?;
    let member_rank = ensemble.max_rank(MEMBER_RANK_TOL);
    Ok(KrausExtraction {
        max_rank: ranks.iter().copied().max().unwrap_or(0),
        members,
        ranks,
        member_rank,
        m_value: span.m_value,
        span_dim: span.dim(),
        budget: ensemble.len() * span.kraus_budget(member_rank),
        reversibility_residual: residual,
        reversible: residual <= tol,
        tp_residual: assembled.tp_residual(),
        reexpansion_distance: assembled.choi_distance(&complement)?,
        restricted,
        kraus,
    })
}
