use std::path::Path;

use qrev_core::channels::detect_cq;
use qrev_core::criteria::{
    capacity_saturation_check, check_general_criterion, check_orthogonal_criterion,
    gram_reconstruct, holevo_partial_trace_loss, ond_decompose, strict_concavity_gap,
    strict_decrease_gap, swap_ensemble, CriterionReport, Verdict, OND_EDGE_TOL, STRUCTURE_TOL,
};
use qrev_core::divergences::{holevo_chi, holevo_cross_check};
use qrev_core::io::{
    channel_to_json, cq_to_json, ensemble_to_json, family_to_json, gram_to_json, matrix_to_json,
    ond_to_json, parse_channel, parse_channel_with_tol, parse_ensemble, parse_family, parse_state,
    state_to_json,
};
use qrev_core::linalg::{trace_norm_dist, Subsystem};
use qrev_core::petz::{
    check_family, check_pair, check_pure_family, fixed_point_residual, petz_channel,
};
use qrev_core::random::{random_channel, random_probabilities, seeded, unit_vector};
use qrev_core::states::{random_pure_family, random_state, random_state_with};
use qrev_core::{
    DensityMatrix, DiscreteEnsemble, Error, KrausChannel, PureStateFamily, DEFAULT_TOL,
};
use serde_json::{json, Value};

use crate::envelope::{Inputs, Outcome, Settings, Status};
use crate::{Command, GenCommand, Keep};

fn err(context: &str) -> impl Fn(Error) -> String + '_ {
    move |e| format!("{context}: {e}")
}

fn load_channel(inputs: &mut Inputs, path: &Path) -> Result<KrausChannel, String> {
    parse_channel(&inputs.load("channel", path)?).map_err(err("channel"))
}

fn load_state(inputs: &mut Inputs, name: &str, path: &Path) -> Result<DensityMatrix, String> {
    parse_state(&inputs.load(name, path)?).map_err(err(name))
}

fn load_family(inputs: &mut Inputs, path: &Path) -> Result<PureStateFamily, String> {
    parse_family(&inputs.load("family", path)?).map_err(err("family"))
}

fn load_ensemble(inputs: &mut Inputs, path: &Path) -> Result<DiscreteEnsemble, String> {
    parse_ensemble(&inputs.load("ensemble", path)?).map_err(err("ensemble"))
}

pub fn execute(
    command: &Command,
    inputs: &mut Inputs,
    settings: &Settings,
) -> Result<Outcome, String> {
    let tol = settings.tolerance;
    let base = settings.log_base;
    match command {
        Command::ValidateChannel { channel } => {
            let value = inputs.load("channel", channel)?;
            let ch = parse_channel_with_tol(&value, f64::INFINITY).map_err(err("channel"))?;
            let tp = ch.tp_residual();
            let mut out = Outcome::check(tp <= tol);
            out.residual("tp_residual", tp)
                .detail("dim_in", json!(ch.dim_in()))
                .detail("dim_out", json!(ch.dim_out()))
                .detail("n_kraus", json!(ch.n_kraus()))
                .detail("choi_rank", json!(ch.choi_rank(DEFAULT_TOL)));
            Ok(out)
        }
        Command::Complement { channel } => {
            let ch = load_channel(inputs, channel)?;
            let complement = ch.complementary();
            let mut out = Outcome::check(true);
            out.residual("tp_residual", complement.tp_residual())
                .witness("complement", channel_to_json(&complement))
                .detail("environment_dim", json!(complement.dim_out()));
            Ok(out)
        }
        Command::Petz {
            channel,
            sigma,
            rho,
        } => {
            let ch = load_channel(inputs, channel)?;
            let sigma = load_state(inputs, "sigma", sigma)?;
            let theta = petz_channel(&ch, &sigma, DEFAULT_TOL).map_err(err("petz"))?;
            let fixed = fixed_point_residual(&ch, &sigma).map_err(err("petz"))?;
            let mut ok = fixed <= tol;
            let mut out = Outcome::check(true);
            out.residual("fixed_point", fixed);
            if let Some(rho) = rho {
                let rho = load_state(inputs, "rho", rho)?;
                let image = ch.apply(&rho).map_err(err("rho"))?;
                let back = theta.apply(&image).map_err(err("rho"))?;
                let r = trace_norm_dist(rho.matrix(), back.matrix()).map_err(err("rho"))?;
                out.residual("recovery", r);
                ok &= r <= tol;
            }
            out.witness("petz", channel_to_json(&theta));
            out.set_status(Status::from_bool(ok));
            Ok(out)
        }
        Command::CheckPair {
            channel,
            rho,
            sigma,
        } => {
            let ch = load_channel(inputs, channel)?;
            let rho = load_state(inputs, "rho", rho)?;
            let sigma = load_state(inputs, "sigma", sigma)?;
            let diag = check_pair(&ch, &rho, &sigma, tol, base).map_err(err("check-pair"))?;
            let verdict = if !diag.verdicts_agree() {
                Verdict::Unknown
            } else if diag.reversible {
                Verdict::Reversible
            } else {
                Verdict::NotReversible
            };
            let mut out = verdict_outcome(verdict);
            out.residual("entropy_gap", diag.entropy_gap.to_f64())
                .residual("recovery_residual", diag.recovery_residual)
                .detail("entropy_preserved", json!(diag.entropy_preserved))
                .detail("recovered", json!(diag.reversible));
            if !diag.verdicts_agree() {
                out.warnings
                    .push("entropy and recovery verdicts disagree at this tolerance".into());
            }
            Ok(out)
        }
        Command::CheckFamily {
            channel,
            ensemble,
            family,
            weights,
        } => {
            let ch = load_channel(inputs, channel)?;
            let check = match (ensemble, family) {
                (Some(path), _) => {
                    let ens = load_ensemble(inputs, path)?;
                    check_family(&ch, &ens, tol)
                }
                (None, Some(path)) => {
                    let fam = load_family(inputs, path)?;
                    let w = match weights {
                        Some(w) => {
                            inputs.param("weights", format!("{w:?}"));
                            w.clone()
                        }
                        None => vec![1.0 / fam.len() as f64; fam.len()],
                    };
                    check_pure_family(&ch, &fam, &w, tol)
                }
                (None, None) => return Err("either --ensemble or --family is required".into()),
            }
            .map_err(err("check-family"))?;
            Ok(Outcome::from_report(&CriterionReport::from(check)))
        }
        Command::Ond { family } => {
            let fam = load_family(inputs, family)?;
            let ond = ond_decompose(&fam, tol.max(OND_EDGE_TOL));
            let labels = ond.labels();
            let gram = fam.gram();
            let mut cross: f64 = 0.0;
            for i in 0..fam.len() {
                for j in 0..i {
                    if labels[i] != labels[j] {
                        cross = cross.max(gram[(i, j)].norm());
                    }
                }
            }
            let status = if ond.ambiguous_pairs.is_empty() {
                Status::Pass
            } else {
                Status::Unknown
            };
            let mut out = Outcome::with_status(status);
            out.residual("max_cross_overlap", cross)
                .witness(
                    "projectors",
                    Value::Array(ond.projectors.iter().map(matrix_to_json).collect()),
                )
                .detail("ond", ond_to_json(&ond))
                .detail("blocks", json!(ond.len()));
            if !ond.ambiguous_pairs.is_empty() {
                out.warnings.push(format!(
                    "{} overlaps lie close to the edge threshold",
                    ond.ambiguous_pairs.len()
                ));
            }
            Ok(out)
        }
        Command::Criterion {
            channel,
            family,
            general,
        } => {
            let ch = load_channel(inputs, channel)?;
            let fam = load_family(inputs, family)?;
            let orthogonal = if *general {
                None
            } else {
                match check_orthogonal_criterion(&ch, &fam, tol) {
                    Ok(report) => Some(report),
                    Err(Error::NotOrthogonal { .. } | Error::NotComplete { .. }) => None,
                    Err(e) => return Err(format!("criterion: {e}")),
                }
            };
            let (report, kind) = match orthogonal {
                Some(report) => (report, "orthogonal"),
                None => (
                    check_general_criterion(&ch, &fam, tol).map_err(err("criterion"))?,
                    "general",
                ),
            };
            let mut out = Outcome::from_report(&report);
            out.detail("criterion", json!(kind));
            Ok(out)
        }
        Command::CqStructure { channel } => {
            let ch = load_channel(inputs, channel)?;
            match detect_cq(&ch, tol.max(STRUCTURE_TOL)) {
                Some(cq) => {
                    let mut out = Outcome::check(true);
                    out.residual("choi_residual", cq.residual)
                        .witness("cq", cq_to_json(&cq))
                        .detail("blocks", json!(cq.len()));
                    Ok(out)
                }
                None => Ok(Outcome::check(false)),
            }
        }
        Command::Gram { channel, family } => {
            let ch = load_channel(inputs, channel)?;
            let fam = load_family(inputs, family)?;
            match gram_reconstruct(&ch, &fam, tol) {
                Ok(Some(rec)) => {
                    let mut out = Outcome::from_report(&rec.report);
                    out.witness("gram_form", gram_to_json(&rec));
                    match rec.witness_residual {
                        Some(r) => {
                            out.residual("witness", r);
                        }
                        None => out.warnings.push(
                            "no unitary relating the channel to its Gram form was found".into(),
                        ),
                    }
                    Ok(out)
                }
                Ok(None) => Ok(verdict_outcome(Verdict::NotReversible)),
                Err(Error::HypothesisNotMet(msg)) => {
                    let mut out = verdict_outcome(Verdict::Unknown);
                    out.warnings.push(format!("hypothesis not met: {msg}"));
                    Ok(out)
                }
                Err(e) => Err(format!("gram: {e}")),
            }
        }
        Command::Capacity { channel, family } => {
            let ch = load_channel(inputs, channel)?;
            let fam = match family {
                Some(path) => Some(load_family(inputs, path)?),
                None => None,
            };
            let report =
                capacity_saturation_check(&ch, fam.as_ref(), tol, base).map_err(err("capacity"))?;
            Ok(Outcome::from_report(&report))
        }
        Command::Holevo {
            ensemble,
            channel,
            dims,
            keep,
        } => {
            let ens = load_ensemble(inputs, ensemble)?;
            let chi = holevo_chi(&ens, base).to_f64();
            let mismatch = holevo_cross_check(&ens, base);
            let mut ok = mismatch.is_none_or(|m| m <= tol);
            let mut out = Outcome::check(true);
            out.residual("chi", chi);
            if let Some(m) = mismatch {
                out.residual("forms_mismatch", m);
            }
            if let Some(path) = channel {
                let ch = load_channel(inputs, path)?;
                let image = ens.map_states(|s| ch.apply(s)).map_err(err("holevo"))?;
                let chi_out = holevo_chi(&image, base).to_f64();
                let slack = chi - chi_out;
                out.residual("chi_output", chi_out)
                    .residual("monotonicity_slack", slack);
                ok &= slack >= -tol;
            }
            if let Some(d) = *dims {
                inputs.param("dims", format!("{d:?}"));
                let keep = match keep {
                    Keep::A => Subsystem::A,
                    Keep::B => Subsystem::B,
                };
                inputs.param("keep", format!("{keep:?}"));
                let loss = holevo_partial_trace_loss(&ens, d, keep, base).map_err(err("holevo"))?;
                out.residual("partial_trace_loss", loss);
                ok &= loss >= -tol;
            }
            out.set_status(Status::from_bool(ok));
            Ok(out)
        }
        Command::DemoStrict { dims, members } => {
            let seed = settings.seed.unwrap_or(0);
            let (da, db) = *dims;
            if da < 2 || db < 2 {
                return Err("demo-strict needs both dimensions to be at least 2".into());
            }
            let d = da * db;
            let n = members.unwrap_or(d + 1);
            if n < d {
                return Err(format!(
                    "demo-strict needs at least {d} members for a full-rank average"
                ));
            }
            inputs.param("dims", format!("{da},{db}"));
            inputs.param("members", n);
            inputs.param("seed", seed);
            let mut rng = seeded(seed);
            let states = (0..n)
                .map(|_| DensityMatrix::pure(&unit_vector(d, &mut rng)))
                .collect();
            let ens = DiscreteEnsemble::new(random_probabilities(n, &mut rng), states)
                .map_err(err("demo-strict"))?;
            let concavity =
                strict_concavity_gap(&ens, (da, db), tol, base).map_err(err("demo-strict"))?;
            let swapped = swap_ensemble(&ens, (da, db)).map_err(err("demo-strict"))?;
            let decrease =
                strict_decrease_gap(&swapped, (db, da), tol, base).map_err(err("demo-strict"))?;
            let agreement = (concavity - decrease).abs();
            let mut out = Outcome::check(concavity > tol && decrease > tol && agreement <= tol);
            out.residual("concavity_gap", concavity)
                .residual("decrease_gap", decrease)
                .residual("gap_agreement", agreement)
                .witness("ensemble", ensemble_to_json(&ens));
            Ok(out)
        }
        Command::Gen(_) => Err("gen does not produce a report".into()),
    }
}

fn verdict_outcome(verdict: Verdict) -> Outcome {
    let mut out = Outcome::with_status(verdict.into());
    out.verdict = verdict.as_str().to_string();
    out
}

pub fn generate(command: &GenCommand, seed: u64) -> Result<Value, String> {
    match command {
        GenCommand::Channel {
            din, dout, kraus, ..
        } => {
            let ch = random_channel(*din, *dout, *kraus, seed).map_err(err("gen channel"))?;
            Ok(channel_to_json(&ch))
        }
        GenCommand::State { dim, rank, .. } => {
            let rho = random_state(*dim, rank.unwrap_or(*dim), seed).map_err(err("gen state"))?;
            Ok(state_to_json(&rho))
        }
        GenCommand::Family { dim, n, .. } => {
            let fam = random_pure_family(*dim, *n, seed).map_err(err("gen family"))?;
            Ok(family_to_json(&fam))
        }
        GenCommand::Ensemble { dim, n, rank, .. } => {
            let mut rng = seeded(seed);
            let states = (0..*n)
                .map(|_| random_state_with(*dim, *rank, &mut rng))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err("gen ensemble"))?;
            let weights = random_probabilities(*n, &mut rng);
            let ens = DiscreteEnsemble::new(weights, states).map_err(err("gen ensemble"))?;
            Ok(ensemble_to_json(&ens))
        }
    }
}
