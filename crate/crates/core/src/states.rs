//! Density matrices, pure-state families and discrete ensembles.

use crate::error::{Error, Result};
use crate::linalg::{
    self, cr, herm_eig, hermitian_part, hermiticity_defect, projector_onto, rank_tol,
    support_inv_sqrt, CMatrix, CVector, HermitianEig,
};
use crate::random::{ginibre, seeded, unit_vector};

/// Validation tolerance for state invariants.
pub const STATE_TOL: f64 = 1e-10;

/// Ensemble weights below this are dropped and the rest renormalized.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Positive semidefinite, unit-trace square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        Self::new_with_tol(mat, STATE_TOL)
    }

    pub fn new_with_tol(mat: CMatrix, tol: f64) -> Result<Self> {
        if !mat.is_square() || mat.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "state must be a non-empty square matrix, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if !linalg::is_finite(&mat) {
            return Err(Error::InvalidState("entries must be finite".into()));
        }
        let defect = hermiticity_defect(&mat);
        if defect > tol {
            return Err(Error::InvalidState(format!(
                "hermiticity defect = {defect:.3e}, expected <= {tol:e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!(
                "trace = {}, expected 1±{tol:e}",
                tr.re
            )));
        }
        let mat = hermitian_part(&mat);
        let min = herm_eig(&mat)?.min_eigenvalue();
        if min < -tol {
            return Err(Error::InvalidState(format!(
                "min eigenvalue = {min:.3e}, expected >= -{tol:e}"
            )));
        }
        Ok(Self { mat })
    }

    /// Hermitizes without further validation. Used for outputs of CPTP maps,
    /// which are states up to rounding.
    pub(crate) fn from_raw(mat: CMatrix) -> Self {
        Self {
            mat: hermitian_part(&mat),
        }
    }

    pub fn pure(v: &CVector) -> Self {
        let n = v.norm();
        let u = v / cr(n);
        Self::from_raw(projector_onto(&u))
    }

    pub fn basis_state(d: usize, i: usize) -> Self {
        Self::pure(&linalg::basis_vector(d, i))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: linalg::identity(d) * cr(1.0 / d as f64),
        }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(linalg::real_diag(probs))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn eig(&self) -> HermitianEig {
        herm_eig(&self.mat).expect("density matrices are Hermitian")
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    pub fn rank(&self, tol: f64) -> usize {
        rank_tol(&self.mat, tol)
    }

    pub fn is_full_rank(&self, tol: f64) -> bool {
        self.rank(tol) == self.dim()
    }

    /// Convex combination `t·self + (1−t)·other`.
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "mixing states of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self::from_raw(&self.mat * cr(t) + &other.mat * cr(1.0 - t)))
    }

    /// `U ρ U†`
    pub fn conjugate(&self, u: &CMatrix) -> DensityMatrix {
        Self::from_raw(u * &self.mat * u.adjoint())
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_raw(linalg::tensor(&self.mat, &other.mat))
    }
}

/// Indexed family of unit vectors `{|φ_λ>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateFamily {
    dim: usize,
    vectors: Vec<CVector>,
    labels: Option<Vec<String>>,
}

impl PureStateFamily {
    pub fn new(dim: usize, vectors: Vec<CVector>) -> Result<Self> {
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "vector {i} has length {}, family dimension is {dim}",
                    v.len()
                )));
            }
            let n = v.norm();
            if (n - 1.0).abs() > STATE_TOL {
                return Err(Error::InvalidState(format!(
                    "vector {i} has norm {n}, expected 1±{STATE_TOL:e}"
                )));
            }
        }
        Ok(Self {
            dim,
            vectors,
            labels: None,
        })
    }

    /// Normalizes every vector first; zero vectors are rejected.
    pub fn normalized(dim: usize, vectors: Vec<CVector>) -> Result<Self> {
        let mut out = Vec::with_capacity(vectors.len());
        for (i, v) in vectors.into_iter().enumerate() {
            let n = v.norm();
            if n == 0.0 {
                return Err(Error::InvalidState(format!("vector {i} is zero")));
            }
            out.push(v / cr(n));
        }
        Self::new(dim, out)
    }

    pub fn standard_basis(d: usize) -> Self {
        Self {
            dim: d,
            vectors: (0..d).map(|i| linalg::basis_vector(d, i)).collect(),
            labels: None,
        }
    }

    /// Columns of a unitary (or any matrix with unit columns).
    pub fn from_columns(m: &CMatrix) -> Result<Self> {
        Self::new(
            m.nrows(),
            (0..m.ncols()).map(|k| m.column(k).into_owned()).collect(),
        )
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vectors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} vectors",
                labels.len(),
                self.vectors.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn states(&self) -> Vec<DensityMatrix> {
        self.vectors.iter().map(DensityMatrix::pure).collect()
    }

    /// `d × n` matrix whose columns are the family vectors.
    pub fn stacked(&self) -> CMatrix {
        let mut m = linalg::zeros(self.dim, self.vectors.len());
        for (k, v) in self.vectors.iter().enumerate() {
            m.set_column(k, v);
        }
        m
    }

    /// Gram matrix `G_ij = <φ_i|φ_j>`.
    pub fn gram(&self) -> CMatrix {
        let s = self.stacked();
        s.adjoint() * s
    }

    /// Same family with members reordered: member `k` of the result is
    /// member `order[k]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            dim: self.dim,
            vectors: order.iter().map(|&i| self.vectors[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| order.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// `Σ π_i |φ_i><φ_i|`
    pub fn weighted_average(&self, weights: &[f64]) -> Result<CMatrix> {
        if weights.len() != self.vectors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} vectors",
                weights.len(),
                self.vectors.len()
            )));
        }
        let mut acc = linalg::zeros(self.dim, self.dim);
        for (w, v) in weights.iter().zip(&self.vectors) {
            acc += projector_onto(v) * cr(*w);
        }
        Ok(acc)
    }
}

/// Probability vector paired with states of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteEnsemble {
    weights: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl DiscreteEnsemble {
    /// Validates the distribution, then prunes weights below
    /// [`WEIGHT_FLOOR`] and renormalizes.
    pub fn new(weights: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().position(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch(format!(
                "state {bad} has dimension {}, expected {d}",
                states[bad].dim()
            )));
        }
        if let Some(bad) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::DegenerateDistribution(format!(
                "weight {bad} = {} is negative",
                weights[bad]
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::DegenerateDistribution(format!(
                "weights sum to {total}, expected 1±{STATE_TOL:e}"
            )));
        }
        let (weights, states): (Vec<f64>, Vec<DensityMatrix>) = weights
            .into_iter()
            .zip(states)
            .filter(|(w, _)| *w >= WEIGHT_FLOOR)
            .unzip();
        let kept: f64 = weights.iter().sum();
        let weights = weights.into_iter().map(|w| w / kept).collect();
        Ok(Self { weights, states })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(vec![1.0 / n as f64; states.len()], states)
    }

    pub fn from_pure_family(family: &PureStateFamily, weights: Vec<f64>) -> Result<Self> {
        Self::new(weights, family.states())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn max_rank(&self, tol: f64) -> usize {
        self.states.iter().map(|s| s.rank(tol)).max().unwrap_or(0)
    }

    /// Applies `f` to every member, keeping the weights.
    pub fn map_states<F>(&self, f: F) -> Result<DiscreteEnsemble>
    where
        F: Fn(&DensityMatrix) -> Result<DensityMatrix>,
    {
        let states = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            weights: self.weights.clone(),
            states,
        })
    }
}

/// `ρ̄ = Σ π_i ρ_i`
pub fn average_state(ensemble: &DiscreteEnsemble) -> DensityMatrix {
    let d = ensemble.dim();
    let mut acc = linalg::zeros(d, d);
    for (w, s) in ensemble.weights.iter().zip(&ensemble.states) {
        acc += s.matrix() * cr(*w);
    }
    DensityMatrix::from_raw(acc)
}

/// Whether the family vectors span the whole space.
pub fn is_complete(family: &PureStateFamily, tol: f64) -> bool {
    family.dim() > 0 && rank_tol(&family.stacked(), tol) == family.dim()
}

/// Dual overcomplete system `|ϕ_i> = √π_i · ρ̄_π^{-1/2} |φ_i>` with
/// `ρ̄_π = Σ π_i |φ_i><φ_i|`.
///
/// When `ρ̄_π` is singular the inverse square root is taken on its support,
/// so `Σ |ϕ_i><ϕ_i|` is the projector onto that support.
pub fn dual_overcomplete(
    family: &PureStateFamily,
    weights: &[f64],
    tol: f64,
) -> Result<Vec<CVector>> {
    check_nondegenerate(weights, family.len())?;
    let avg = family.weighted_average(weights)?;
    let (inv_sqrt, _) = support_inv_sqrt(&avg, tol)?;
    Ok(family
        .vectors()
        .iter()
        .zip(weights)
        .map(|(v, w)| &inv_sqrt * v * cr(w.sqrt()))
        .collect())
}

pub(crate) fn check_nondegenerate(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {n} members",
            weights.len()
        )));
    }
    if let Some(bad) = weights.iter().position(|w| w.is_nan() || *w <= 0.0) {
        return Err(Error::DegenerateDistribution(format!(
            "weight {bad} = {} is not positive",
            weights[bad]
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::DegenerateDistribution(format!(
            "weights sum to {total}"
        )));
    }
    Ok(())
}

/// `G G† / Tr(G G†)` for a seeded `dim × rank` complex Gaussian `G`.
pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = seeded(seed);
    random_state_with(dim, rank, &mut rng)
}

pub fn random_state_with<R: rand::Rng>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { rank, dim });
    }
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::from_raw(m / cr(tr)))
}

pub fn random_pure_family(dim: usize, n: usize, seed: u64) -> Result<PureStateFamily> {
    let mut rng = seeded(seed);
    PureStateFamily::new(dim, (0..n).map(|_| unit_vector(dim, &mut rng)).collect())
}

/// Seeded block-diagonal state `Σ_k P_k R P_k / Tr(·)` for a random
/// full-rank `R`.
pub fn random_block_diagonal_state<R: rand::Rng>(
    projectors: &[CMatrix],
    rng: &mut R,
) -> Result<DensityMatrix> {
    let d = projectors
        .first()
        .map(|p| p.nrows())
        .ok_or_else(|| Error::InvalidResolution("empty resolution".into()))?;
    let r = random_state_with(d, d, rng)?;
    let mut acc = linalg::zeros(d, d);
    for p in projectors {
        acc += p * r.matrix() * p;
    }
    let tr = acc.trace().re;
    Ok(DensityMatrix::from_raw(acc / cr(tr)))
}
