//! Structural reversibility criteria and their applications.
//!
//! Every check returns a [`CriterionReport`] that records the outcome of
//! each equivalent statement, the residuals behind it and the witnesses
//! that were constructed along the way.

mod applications;
mod extract;
mod ond;
mod structural;

use std::collections::BTreeMap;

pub use applications::{
    capacity_saturation_check, holevo_partial_trace_loss, strict_concavity_gap,
    strict_decrease_gap, swap_ensemble,
};
pub use extract::{extract_low_rank_kraus, KrausExtraction};
pub use ond::{ond_decompose, OndDecomposition, OND_EDGE_TOL, OND_WARN_TOL};
pub use structural::{
    check_general_criterion, check_orthogonal_criterion, gram_reconstruct, verify_w_condition,
    w_condition_residual, GramReconstruction, STRUCTURE_TOL,
};

use crate::channels::CqStructure;
use crate::linalg::CMatrix;
use crate::petz::FamilyCheck;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Reversible,
    NotReversible,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Reversible => "Reversible",
            Verdict::NotReversible => "NotReversible",
            Verdict::Unknown => "Unknown",
        }
    }

    /// Combines statements that must all hold or all fail.
    pub fn from_agreement(outcomes: &[Outcome]) -> Verdict {
        let decided: Vec<Outcome> = outcomes
            .iter()
            .copied()
            .filter(|o| *o != Outcome::Unknown)
            .collect();
        if decided.is_empty() {
            Verdict::Unknown
        } else if decided.iter().all(|o| *o == Outcome::Pass) {
            Verdict::Reversible
        } else if decided.iter().all(|o| *o == Outcome::Fail) {
            Verdict::NotReversible
        } else {
            Verdict::Unknown
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Unknown,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatementOutcome {
    pub outcome: Outcome,
    pub residual: Option<f64>,
    pub note: Option<String>,
}

impl StatementOutcome {
    pub fn new(outcome: Outcome, residual: Option<f64>) -> Self {
        Self {
            outcome,
            residual,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Objects constructed while testing a criterion.
#[derive(Debug, Clone, Default)]
pub struct Witnesses {
    /// Classical-quantum form of the complementary channel.
    pub cq: Option<CqStructure>,
    /// Kraus operators of the complementary channel with their ranks.
    pub kraus: Option<Vec<CMatrix>>,
    pub kraus_ranks: Option<Vec<usize>>,
    /// Gram matrix `c_kl` of a reconstructed channel.
    pub gram: Option<CMatrix>,
    /// Partial isometry implementing an isometric equivalence.
    pub isometry: Option<CMatrix>,
    /// Projectors of the orthogonal decomposition used by the check.
    pub projectors: Option<Vec<CMatrix>>,
    /// Basis of a saturating ensemble, as columns.
    pub ensemble_basis: Option<CMatrix>,
}

/// Verdict of a reversibility test with its supporting evidence.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub verdict: Verdict,
    pub statements: BTreeMap<String, StatementOutcome>,
    pub witnesses: Witnesses,
    /// Named scalar results (residuals, Holevo quantities, gaps).
    pub values: BTreeMap<String, f64>,
    pub m_value: Option<usize>,
    pub tolerance: f64,
    /// The average state was rank deficient and only its support was tested.
    pub restricted: bool,
    pub warnings: Vec<String>,
}

impl CriterionReport {
    pub fn new(tolerance: f64) -> Self {
        Self {
            verdict: Verdict::Unknown,
            statements: BTreeMap::new(),
            witnesses: Witnesses::default(),
            values: BTreeMap::new(),
            m_value: None,
            tolerance,
            restricted: false,
            warnings: Vec::new(),
        }
    }

    pub fn statement(&self, key: &str) -> Option<&StatementOutcome> {
        self.statements.get(key)
    }

    pub fn outcome(&self, key: &str) -> Outcome {
        self.statements
            .get(key)
            .map(|s| s.outcome)
            .unwrap_or(Outcome::Unknown)
    }

    pub(crate) fn set(&mut self, key: &str, statement: StatementOutcome) {
        self.statements.insert(key.to_string(), statement);
    }
}

impl From<FamilyCheck> for CriterionReport {
    fn from(check: FamilyCheck) -> Self {
        let mut report = CriterionReport::new(check.tolerance);
        report.verdict = if check.reversible {
            Verdict::Reversible
        } else {
            Verdict::NotReversible
        };
        report.restricted = check.restricted;
        report.set(
            "petz_recovery",
            StatementOutcome::new(
                Outcome::from_bool(check.reversible),
                Some(check.max_residual),
            ),
        );
        report
            .values
            .insert("max_residual".into(), check.max_residual);
        for (i, r) in check.residuals.iter().enumerate() {
            report.values.insert(format!("residual_{i}"), *r);
        }
        if check.restricted {
            report
                .warnings
                .push("average state is rank deficient; only its support was tested".into());
        }
        report
    }
}
