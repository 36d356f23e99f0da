//! Entropic quantities on density matrices.

use std::fmt;
use std::ops::Add;

use serde::{Serialize, Serializer};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, Subsystem};
use crate::states::{average_state, DensityMatrix, DiscreteEnsemble};

/// Eigenvalues at or below this are dropped from `λ log λ` sums.
pub const ENTROPY_FLOOR: f64 = 1e-14;
/// Relative cutoff defining the support of the second argument of a
/// relative entropy.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Weight of `ρ` outside `supp σ` above which `H(ρ‖σ) = +∞`.
pub const SUPPORT_LEAK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "2")]
    Bits,
    #[serde(rename = "e")]
    Nats,
}

impl LogBase {
    /// Converts a value in nats to this base.
    pub fn from_nats(self, x: f64) -> f64 {
        match self {
            LogBase::Bits => x / std::f64::consts::LN_2,
            LogBase::Nats => x,
        }
    }

    pub fn log(self, x: f64) -> f64 {
        self.from_nats(x.ln())
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Bits => "2",
            LogBase::Nats => "e",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" | "bits" => Ok(LogBase::Bits),
            "e" | "nats" => Ok(LogBase::Nats),
            other => Err(Error::NotApplicable(format!(
                "log base must be 2 or e, got {other:?}"
            ))),
        }
    }
}

/// Real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// Value as `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// `self − other`; fails when the difference involves `∞ − ∞` or is `−∞`.
    pub fn checked_sub(self, other: ExtendedReal) -> Result<ExtendedReal> {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => Ok(ExtendedReal::Finite(a - b)),
            (ExtendedReal::PosInfinity, ExtendedReal::Finite(_)) => Ok(ExtendedReal::PosInfinity),
            _ => Err(Error::NotApplicable(
                "difference of extended reals is undefined or negative infinite".into(),
            )),
        }
    }

    pub fn scale(self, k: f64) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(x) => ExtendedReal::Finite(k * x),
            ExtendedReal::PosInfinity if k > 0.0 => ExtendedReal::PosInfinity,
            ExtendedReal::PosInfinity => ExtendedReal::Finite(0.0),
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::PosInfinity,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::PosInfinity => write!(f, "+inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => serializer.serialize_f64(*x),
            ExtendedReal::PosInfinity => serializer.serialize_str("+inf"),
        }
    }
}

fn entropy_of_spectrum(eigenvalues: &[f64], base: LogBase) -> f64 {
    let nats: f64 = eigenvalues
        .iter()
        .filter(|&&x| x > ENTROPY_FLOOR)
        .map(|&x| -x * x.ln())
        .sum();
    base.from_nats(nats).max(0.0)
}

/// `H(ρ) = −Tr ρ log ρ`
pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    entropy_of_spectrum(&rho.eig().eigenvalues, base)
}

/// `H(ρ‖σ) = Tr ρ (log ρ − log σ)`, or `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix, base: LogBase) -> ExtendedReal {
    assert_eq!(
        rho.dim(),
        sigma.dim(),
        "relative entropy of states of different dimension"
    );
    let se = sigma.eig();
    let cut = SUPPORT_CUTOFF * se.max_eigenvalue();
    let mut inside = 0.0;
    let mut cross = 0.0;
    for j in 0..se.dim() {
        let mu = se.eigenvalues[j];
        if mu <= cut {
            continue;
        }
        let v = se.vector(j);
        let weight = (v.adjoint() * rho.matrix() * &v)[(0, 0)].re;
        inside += weight;
        cross += weight * mu.ln();
    }
    let total = rho.matrix().trace().re;
    if total - inside > SUPPORT_LEAK_TOL {
        return ExtendedReal::PosInfinity;
    }
    let neg_entropy_nats: f64 = rho
        .eig()
        .eigenvalues
        .iter()
        .filter(|&&x| x > ENTROPY_FLOOR)
        .map(|&x| x * x.ln())
        .sum();
    ExtendedReal::Finite(base.from_nats(neg_entropy_nats - cross).max(0.0))
}

/// Holevo quantity `χ = H(ρ̄) − Σ π_i H(ρ_i)`.
pub fn holevo_chi(ensemble: &DiscreteEnsemble, base: LogBase) -> ExtendedReal {
    ExtendedReal::Finite(holevo_chi_entropy_form(ensemble, base))
}

/// `H(ρ̄) − Σ π_i H(ρ_i)`
pub fn holevo_chi_entropy_form(ensemble: &DiscreteEnsemble, base: LogBase) -> f64 {
    let avg = von_neumann_entropy(&average_state(ensemble), base);
    let members: f64 = ensemble
        .weights()
        .iter()
        .zip(ensemble.states())
        .map(|(w, s)| w * von_neumann_entropy(s, base))
        .sum();
    (avg - members).max(0.0)
}

/// `Σ π_i H(ρ_i‖ρ̄)`
pub fn holevo_chi_relative_form(ensemble: &DiscreteEnsemble, base: LogBase) -> ExtendedReal {
    let avg = average_state(ensemble);
    ensemble
        .weights()
        .iter()
        .zip(ensemble.states())
        .fold(ExtendedReal::Finite(0.0), |acc, (w, s)| {
            acc + relative_entropy(s, &avg, base).scale(*w)
        })
}

/// Absolute difference of the two Holevo formulas, `None` if the relative
/// form is infinite.
pub fn holevo_cross_check(ensemble: &DiscreteEnsemble, base: LogBase) -> Option<f64> {
    let rel = holevo_chi_relative_form(ensemble, base).finite()?;
    Some((rel - holevo_chi_entropy_form(ensemble, base)).abs())
}

/// `H_{A|B}(ρ) = H(ρ) − H(Tr_A ρ)` on `C^dA ⊗ C^dB`.
pub fn conditional_entropy(
    rho: &DensityMatrix,
    dims: (usize, usize),
    base: LogBase,
) -> Result<f64> {
    let reduced = partial_trace(rho.matrix(), dims, Subsystem::B)?;
    let hb = von_neumann_entropy(&DensityMatrix::from_raw(reduced), base);
    Ok(von_neumann_entropy(rho, base) - hb)
}

/// `H(Φ(ρ)) − H(ρ)`
pub fn entropy_gain(channel: &KrausChannel, rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    let out = channel.apply(rho)?;
    Ok(von_neumann_entropy(&out, base) - von_neumann_entropy(rho, base))
}

/// `|LHS − RHS|` for Donald's identity
/// `t H(ρ‖σ) + (1−t) H(σ‖σ) = t H(ρ‖σ_t) + (1−t) H(σ‖σ_t) + H(σ_t‖σ)`
/// with `σ_t = tρ + (1−t)σ`.
pub fn donald_residual(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    t: f64,
    base: LogBase,
) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidT(t));
    }
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let sigma_t = rho.mix(sigma, t)?;
    let finite = |x: ExtendedReal| {
        x.finite().ok_or_else(|| {
            Error::NotApplicable("a relative entropy in Donald's identity is infinite".into())
        })
    };
    let lhs = t * finite(relative_entropy(rho, sigma, base))?
        + (1.0 - t) * finite(relative_entropy(sigma, sigma, base))?;
    let rhs = t * finite(relative_entropy(rho, &sigma_t, base))?
        + (1.0 - t) * finite(relative_entropy(sigma, &sigma_t, base))?
        + finite(relative_entropy(&sigma_t, sigma, base))?;
    Ok((lhs - rhs).abs())
}

/// Binary entropy `h(p)` in the given base.
pub fn binary_entropy(p: f64, base: LogBase) -> f64 {
    entropy_of_spectrum(&[p, 1.0 - p], base)
}

/// `log d` in the given base.
pub fn log_dim(d: usize, base: LogBase) -> f64 {
    base.log(d as f64)
}
