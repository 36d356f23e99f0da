use super::structural::{check_general_criterion, STRUCTURE_TOL};
use super::{CriterionReport, Outcome, StatementOutcome, Verdict};
use crate::channels::{detect_cq, KrausChannel};
use crate::divergences::{
    conditional_entropy, holevo_chi_entropy_form, log_dim, von_neumann_entropy, LogBase,
};
use crate::error::{Error, Result};
use crate::linalg::{self, partial_trace, swap_subsystems, CMatrix, Subsystem, DEFAULT_TOL};
use crate::states::{average_state, DensityMatrix, DiscreteEnsemble, PureStateFamily};

/// Distance of `χ` from `log dim H_A` accepted as saturation.
const SATURATION_TOL: f64 = 1e-8;
const SIGMA_RANK_TOL: f64 = 1e-8;
/// Threshold below which the basis entropy bound certifies `H_min = 0`.
const ZERO_ENTROPY_TOL: f64 = 1e-9;

fn adapted_basis(bases: &[CMatrix]) -> CMatrix {
    let rows = bases.first().map(|b| b.nrows()).unwrap_or(0);
    let cols: usize = bases.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in bases {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Whether the Holevo capacity reaches `log dim H_A`.
///
/// With a candidate family the general criterion decides; otherwise the
/// c-q resolution of `Φ̂` is detected and its rank bound checked. In both
/// cases the uniform ensemble over a basis adapted to the resolution is
/// evaluated and `χ(Φ(E))` reported. For a unital channel between equal
/// dimensions the smallest output entropy over that basis is reported as
/// `h_min` when it vanishes, else as `h_min_upper_bound`.
pub fn capacity_saturation_check(
    channel: &KrausChannel,
    family: Option<&PureStateFamily>,
    tol: f64,
    base: LogBase,
) -> Result<CriterionReport> {
    let (mut report, bases) = match family {
        Some(family) => {
            let report = check_general_criterion(channel, family, tol)?;
            let basis = report.witnesses.ensemble_basis.clone();
            (report, basis.map(|b| vec![b]))
        }
        None => {
            let mut report = CriterionReport::new(tol);
            let span = channel.output_span_and_m(DEFAULT_TOL);
            let m = (span.m_value + 1).min(span.dim());
            report.m_value = Some(m);
            let cq = detect_cq(&channel.complementary(), tol.max(STRUCTURE_TOL));
            let bases = match &cq {
                Some(cq) => {
                    let rank = cq
                        .sigma_ranks(SIGMA_RANK_TOL)
                        .into_iter()
                        .max()
                        .unwrap_or(0);
                    let ok = rank <= m;
                    let statement =
                        StatementOutcome::new(Outcome::from_bool(ok), Some(cq.residual));
                    report.set(
                        "complement_cq",
                        if ok {
                            statement
                        } else {
                            statement.with_note(format!("rank σ = {rank} exceeds m = {m}"))
                        },
                    );
                    report.witnesses.projectors = Some(cq.projectors.clone());
                    ok.then(|| cq.bases.clone())
                }
                None => {
                    report.set(
                        "complement_cq",
                        StatementOutcome::new(Outcome::Fail, None)
                            .with_note("complementary channel is not classical-quantum"),
                    );
                    None
                }
            };
            report.witnesses.cq = cq;
            (report, bases)
        }
    };
    let target = log_dim(channel.dim_in(), base);
    report.values.insert("log_dim_input".into(), target);
    let structural = report.verdict == Verdict::Reversible
        || (family.is_none() && report.outcome("complement_cq") == Outcome::Pass);
    match bases.filter(|_| structural) {
        Some(bases) => {
            let basis = adapted_basis(&bases);
            let states: Vec<DensityMatrix> = basis
                .column_iter()
                .map(|col| DensityMatrix::pure(&col.into_owned()))
                .collect();
            let outputs =
                DiscreteEnsemble::uniform(states.clone())?.map_states(|s| channel.apply(s))?;
            let chi = holevo_chi_entropy_form(&outputs, base);
            let gap = (chi - target).abs();
            report.values.insert("chi".into(), chi);
            report.set(
                "holevo_saturation",
                StatementOutcome::new(Outcome::from_bool(gap <= SATURATION_TOL), Some(gap)),
            );
            if channel.dim_in() == channel.dim_out() {
                let d = channel.dim_in();
                let image = channel.apply_operator(&linalg::identity(d))?;
                if (image - linalg::identity(d)).norm() <= tol.max(STRUCTURE_TOL) {
                    let h = outputs
                        .states()
                        .iter()
                        .map(|s| von_neumann_entropy(s, base))
                        .fold(f64::INFINITY, f64::min);
                    let key = if h <= ZERO_ENTROPY_TOL {
                        "h_min"
                    } else {
                        "h_min_upper_bound"
                    };
                    report.values.insert(key.into(), h.max(0.0));
                }
            }
            report.witnesses.ensemble_basis = Some(basis);
            report.verdict = if gap <= SATURATION_TOL {
                Verdict::Reversible
            } else {
                report.warnings.push(format!(
                    "structural criterion holds but χ misses log d by {gap:.3e}"
                ));
                Verdict::Unknown
            };
        }
        None => {
            report.set(
                "holevo_saturation",
                StatementOutcome::new(Outcome::Fail, None)
                    .with_note("no resolution satisfies the reversibility criterion"),
            );
            if family.is_none() {
                report.verdict = Verdict::NotReversible;
            }
        }
    }
    Ok(report)
}

/// `χ(E) − χ(Tr E)` where the partial trace keeps `keep` on `C^d1 ⊗ C^d2`.
pub fn holevo_partial_trace_loss(
    ensemble: &DiscreteEnsemble,
    dims: (usize, usize),
    keep: Subsystem,
    base: LogBase,
) -> Result<f64> {
    let reduced = ensemble.map_states(|s| {
        Ok(DensityMatrix::from_raw(partial_trace(
            s.matrix(),
            dims,
            keep,
        )?))
    })?;
    Ok(holevo_chi_entropy_form(ensemble, base) - holevo_chi_entropy_form(&reduced, base))
}

fn check_bipartite(ensemble: &DiscreteEnsemble, dims: (usize, usize)) -> Result<()> {
    if ensemble.dim() != dims.0 * dims.1 {
        return Err(Error::DimensionMismatch(format!(
            "ensemble of dimension {} on a {}x{} system",
            ensemble.dim(),
            dims.0,
            dims.1
        )));
    }
    Ok(())
}

fn check_strictness_hypotheses(
    ensemble: &DiscreteEnsemble,
    bound: usize,
    factor: &str,
    tol: f64,
) -> Result<()> {
    for (i, s) in ensemble.states().iter().enumerate() {
        let rank = s.rank(tol);
        if rank >= bound {
            return Err(Error::PreconditionFailed(format!(
                "member {i} has rank {rank}, needs less than dim H_{factor} = {bound}"
            )));
        }
    }
    let avg = average_state(ensemble);
    let rank = avg.rank(tol);
    if rank < avg.dim() {
        return Err(Error::PreconditionFailed(format!(
            "average state has rank {rank}, needs full rank {}",
            avg.dim()
        )));
    }
    Ok(())
}

/// `χ(E) − χ(Tr_E E)` for an ensemble on `H_B ⊗ H_E` with `dims = (dB, dE)`.
///
/// Requires every member rank below `dE` and a full-rank average; the gap
/// is then strictly positive.
pub fn strict_decrease_gap(
    ensemble: &DiscreteEnsemble,
    dims: (usize, usize),
    tol: f64,
    base: LogBase,
) -> Result<f64> {
    check_bipartite(ensemble, dims)?;
    check_strictness_hypotheses(ensemble, dims.1, "E", tol)?;
    holevo_partial_trace_loss(ensemble, dims, Subsystem::A, base)
}

/// `H_{A|B}(ρ̄) − Σ π_i H_{A|B}(ρ_i)` for an ensemble on `H_A ⊗ H_B` with
/// `dims = (dA, dB)`.
///
/// Requires every member rank below `dA` and a full-rank average; the gap
/// is then strictly positive. It equals `χ(E) − χ(Tr_A E)`.
pub fn strict_concavity_gap(
    ensemble: &DiscreteEnsemble,
    dims: (usize, usize),
    tol: f64,
    base: LogBase,
) -> Result<f64> {
    check_bipartite(ensemble, dims)?;
    check_strictness_hypotheses(ensemble, dims.0, "A", tol)?;
    let avg = conditional_entropy(&average_state(ensemble), dims, base)?;
    let mut members = 0.0;
    for (w, s) in ensemble.weights().iter().zip(ensemble.states()) {
        members += w * conditional_entropy(s, dims, base)?;
    }
    Ok(avg - members)
}

/// Swaps the factors of every member, `A⊗B → B⊗A`.
pub fn swap_ensemble(
    ensemble: &DiscreteEnsemble,
    dims: (usize, usize),
) -> Result<DiscreteEnsemble> {
    ensemble.map_states(|s| Ok(DensityMatrix::from_raw(swap_subsystems(s.matrix(), dims)?)))
}
