//! Kraus representations of channels and the constructions built on them:
//! dual map, Choi matrix, minimal Kraus form, complementary channel,
//! Kraus re-expansion, output span and the kernel dimension `m(Φ)`.

mod constructors;
mod cq;
mod equivalence;

pub(crate) use constructors::prepare_on;
pub use constructors::{
    block_embedding_channel, cq_channel, dephasing, depolarize_to, gram_channel, identity,
    partial_trace_channel, pinching, unitary, validate_resolution,
};
pub use cq::{cq_choi_residual, detect_cq, CqStructure, CQ_CLUSTER_TOL};
pub use equivalence::{
    equivalence_invariant_mismatch, find_equivalence_witness, isometric_equivalence_residual,
    verify_isometric_equivalence,
};

use crate::error::{Error, Result};
use crate::linalg::{
    self, cr, herm_eig, hermitian_part, rank_tol, trace_norm_dist, unvec_row_major, vec_row_major,
    CMatrix, CVector,
};
use crate::states::DensityMatrix;

/// Tolerance on `‖Σ V_k† V_k − I‖_F` accepted for a CPTP Kraus list.
pub const CPTP_TOL: f64 = 1e-9;

/// Completely positive trace-preserving map given by Kraus operators
/// `V_k : C^dim_in → C^dim_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        Self::new_with_tol(dim_in, dim_out, kraus, CPTP_TOL)
    }

    pub fn new_with_tol(
        dim_in: usize,
        dim_out: usize,
        kraus: Vec<CMatrix>,
        tol: f64,
    ) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::DimensionMismatch(
                "channel dimensions must be positive".into(),
            ));
        }
        if kraus.is_empty() {
            return Err(Error::NotCptp {
                residual: f64::INFINITY,
            });
        }
        if let Some(bad) = kraus.iter().position(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {bad} is {:?}, expected ({dim_out}, {dim_in})",
                kraus[bad].shape()
            )));
        }
        if kraus.iter().any(|k| !linalg::is_finite(k)) {
            return Err(Error::NotCptp { residual: f64::NAN });
        }
        let ch = Self {
            dim_in,
            dim_out,
            kraus,
        };
        let residual = ch.tp_residual();
        if residual.is_nan() || residual > tol {
            return Err(Error::NotCptp { residual });
        }
        Ok(ch)
    }

    /// Infers dimensions from the first operator.
    pub fn from_kraus(kraus: Vec<CMatrix>) -> Result<Self> {
        let (dout, din) = kraus.first().map(|k| k.shape()).ok_or(Error::NotCptp {
            residual: f64::INFINITY,
        })?;
        Self::new(din, dout, kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn n_kraus(&self) -> usize {
        self.kraus.len()
    }

    /// `‖Σ V_k† V_k − I‖_F`
    pub fn tp_residual(&self) -> f64 {
        let mut acc = linalg::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc += k.adjoint() * k;
        }
        (acc - linalg::identity(self.dim_in)).norm()
    }

    /// `Σ V_k X V_k†` for an arbitrary `dim_in × dim_in` operator.
    pub fn apply_operator(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "channel input is {0}x{0}, got {1:?}",
                self.dim_in,
                x.shape()
            )));
        }
        let mut acc = linalg::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            acc += k * x * k.adjoint();
        }
        Ok(acc)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_raw(self.apply_operator(rho.matrix())?))
    }

    /// Dual (Heisenberg-picture) map `Φ*(A) = Σ V_k† A V_k`.
    pub fn dual_apply(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.shape() != (self.dim_out, self.dim_out) {
            return Err(Error::DimensionMismatch(format!(
                "dual map input is {0}x{0}, got {1:?}",
                self.dim_out,
                a.shape()
            )));
        }
        let mut acc = linalg::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc += k.adjoint() * a * k;
        }
        Ok(acc)
    }

    /// `Φ(I/d)`, a full-rank input image whose support is the output span.
    pub fn image_of_maximally_mixed(&self) -> DensityMatrix {
        self.apply(&DensityMatrix::maximally_mixed(self.dim_in))
            .expect("dimensions agree")
    }

    /// Choi matrix `Σ_ij Φ(|i><j|) ⊗ |i><j|` (output factor first), i.e.
    /// `(Φ⊗Id)(|Ω><Ω|)` for the unnormalized `|Ω> = Σ_i |i>|i>`.
    pub fn choi(&self) -> CMatrix {
        let n = self.dim_out * self.dim_in;
        let mut acc = linalg::zeros(n, n);
        for k in &self.kraus {
            let v = vec_row_major(k);
            acc += &v * v.adjoint();
        }
        acc
    }

    pub fn choi_rank(&self, tol: f64) -> usize {
        rank_tol(&self.choi(), tol)
    }

    /// Trace-norm distance between Choi matrices.
    pub fn choi_distance(&self, other: &KrausChannel) -> Result<f64> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::DimensionMismatch(format!(
                "channels {}->{} and {}->{}",
                self.dim_in, self.dim_out, other.dim_in, other.dim_out
            )));
        }
        trace_norm_dist(&self.choi(), &other.choi())
    }

    /// `then ∘ self`
    pub fn compose(&self, then: &KrausChannel) -> Result<KrausChannel> {
        if then.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch(format!(
                "cannot feed a {}-dim output into a {}-dim input",
                self.dim_out, then.dim_in
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * then.kraus.len());
        for b in &then.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        KrausChannel::new(self.dim_in, then.dim_out, kraus)
    }

    /// Output conjugated by `W`: `ρ ↦ W Φ(ρ) W†`. `W` must be an isometry on
    /// the output span for the result to be trace preserving.
    pub fn conjugate_output(&self, w: &CMatrix) -> Result<KrausChannel> {
        if w.ncols() != self.dim_out {
            return Err(Error::DimensionMismatch(format!(
                "output map has {} columns, channel output is {}",
                w.ncols(),
                self.dim_out
            )));
        }
        KrausChannel::new(
            self.dim_in,
            w.nrows(),
            self.kraus.iter().map(|k| w * k).collect(),
        )
    }

    /// Channel with the same action and the fewest Kraus operators
    /// (as many as the Choi rank), read off the Choi eigendecomposition.
    pub fn minimal_kraus(&self, tol: f64) -> KrausChannel {
        let choi = hermitian_part(&self.choi());
        let eig = herm_eig(&choi).expect("Choi matrix is Hermitian");
        let cut = tol * eig.max_eigenvalue();
        let kraus: Vec<CMatrix> = (0..eig.dim())
            .filter(|&k| eig.eigenvalues[k] > cut)
            .map(|k| {
                let v: CVector = eig.vector(k) * cr(eig.eigenvalues[k].sqrt());
                unvec_row_major(&v, self.dim_out, self.dim_in)
            })
            .collect();
        KrausChannel {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus,
        }
    }

    /// Complementary channel `ρ ↦ Σ_kl Tr[V_k ρ V_l†] |k><l|` of this
    /// particular Kraus list.
    pub fn complementary_raw(&self) -> KrausChannel {
        let env = self.kraus.len();
        // R_b[k, i] = V_k[b, i] for each output basis vector b
        let kraus = (0..self.dim_out)
            .map(|b| CMatrix::from_fn(env, self.dim_in, |k, i| self.kraus[k][(b, i)]))
            .collect();
        KrausChannel {
            dim_in: self.dim_in,
            dim_out: env,
            kraus,
        }
    }

    /// Complementary channel evaluated on the minimal Kraus form, so the
    /// environment dimension equals the Choi rank and full-rank inputs map
    /// to full-rank outputs.
    pub fn complementary(&self) -> KrausChannel {
        self.minimal_kraus(linalg::DEFAULT_TOL).complementary_raw()
    }

    /// Kraus operators `W_i = Σ_k <ψ_i|k> V_k` for an overcomplete system
    /// `{ψ_i}` on the Kraus index space.
    pub fn reexpand_kraus(&self, psi: &[CVector]) -> Result<KrausChannel> {
        let n = self.kraus.len();
        if let Some(bad) = psi.iter().position(|p| p.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "vector {bad} has length {}, Kraus index space has dimension {n}",
                psi[bad].len()
            )));
        }
        let mut resolution = linalg::zeros(n, n);
        for p in psi {
            resolution += p * p.adjoint();
        }
        let residual = (resolution - linalg::identity(n)).norm();
        if residual > CPTP_TOL {
            return Err(Error::NotOvercomplete { residual });
        }
        let kraus = psi
            .iter()
            .map(|p| {
                let mut w = linalg::zeros(self.dim_out, self.dim_in);
                for (k, v) in self.kraus.iter().enumerate() {
                    w += v * p[k].conj();
                }
                w
            })
            .collect();
        KrausChannel::new(self.dim_in, self.dim_out, kraus)
    }

    /// Output span `H^Φ_B = supp Φ(I/d)` and `m(Φ)`, the dimension of the
    /// kernel of `Φ*` restricted to operators supported on that span.
    pub fn output_span_and_m(&self, tol: f64) -> OutputSpan {
        let image = self.image_of_maximally_mixed();
        let basis = linalg::support_basis(image.matrix(), tol).expect("channel outputs are PSD");
        let s = basis.ncols();
        // column (a*s + b) holds vec Φ*(Q |a><b| Q†)
        let mut map = linalg::zeros(self.dim_in * self.dim_in, s * s);
        for a in 0..s {
            for b in 0..s {
                let x = basis.column(a) * basis.column(b).adjoint();
                let y = self.dual_apply(&x).expect("dimensions agree");
                map.set_column(a * s + b, &vec_row_major(&y));
            }
        }
        let rank = rank_tol(&map, tol);
        OutputSpan {
            projector: linalg::projector_from_basis(&basis),
            basis,
            m_value: s * s - rank,
        }
    }
}

/// Output span of a channel together with `m(Φ)`.
#[derive(Debug, Clone)]
pub struct OutputSpan {
    pub projector: CMatrix,
    /// Orthonormal columns spanning the output span.
    pub basis: CMatrix,
    pub m_value: usize,
}

impl OutputSpan {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `min{m(Φ) + r², dim H^Φ_B}`
    pub fn kraus_budget(&self, r: usize) -> usize {
        (self.m_value + r * r).min(self.dim())
    }
}
