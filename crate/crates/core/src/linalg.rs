//! Dense complex-matrix kernels: Hermitian eigendecomposition, functions of
//! PSD matrices on their support, tensor products, partial traces and
//! tolerance-aware rank.
//!
//! Tensor products use the left-factor-major index convention: the basis
//! vector `|a>|b>` of `C^dA ⊗ C^dB` has index `a * dB + b`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative tolerance for rank and support decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Entries below this modulus are skipped when fixing eigenvector phases.
const PHASE_ANCHOR: f64 = 1e-6;

/// Eigenvalues closer than this (relative to the spectral scale) are treated
/// as degenerate for ordering purposes.
const TIE_EPS: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// `|i><j|` in dimension `d`.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = zeros(d, d);
    m[(i, j)] = cr(1.0);
    m
}

pub fn basis_vector(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = cr(1.0);
    v
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&x| cr(x)),
    ))
}

/// `|u><v|`
pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

pub fn projector_onto(v: &CVector) -> CMatrix {
    outer(v, v)
}

/// Projector `Q Q†` for a matrix whose columns are orthonormal.
pub fn projector_from_basis(q: &CMatrix) -> CMatrix {
    q * q.adjoint()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * cr(0.5)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Orthonormal basis of `d × d` Hermitian matrices (diagonal units, then
/// symmetric and antisymmetric off-diagonal combinations).
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        out.push(matrix_unit(d, i, i));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut sym = zeros(d, d);
            sym[(i, j)] = cr(s);
            sym[(j, i)] = cr(s);
            out.push(sym);
            let mut asym = zeros(d, d);
            asym[(i, j)] = c(0.0, -s);
            asym[(j, i)] = c(0.0, s);
            out.push(asym);
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U f(Λ) U†`
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let d = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for k in 0..d {
            let fk = f(self.eigenvalues[k]);
            for r in 0..d {
                scaled[(r, k)] *= fk;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }

    /// Columns for eigenvalues strictly above `threshold`.
    pub fn vectors_above(&self, threshold: f64) -> CMatrix {
        let idx: Vec<usize> = (0..self.dim())
            .filter(|&k| self.eigenvalues[k] > threshold)
            .collect();
        self.eigenvectors.select_columns(idx.iter())
    }

    /// Columns for eigenvalues at or below `threshold`.
    pub fn vectors_at_or_below(&self, threshold: f64) -> CMatrix {
        let idx: Vec<usize> = (0..self.dim())
            .filter(|&k| self.eigenvalues[k] <= threshold)
            .collect();
        self.eigenvectors.select_columns(idx.iter())
    }
}

/// Multiply `v` by the phase that makes its first entry of modulus above
/// `PHASE_ANCHOR` real and positive.
pub fn normalize_phase(v: &mut CVector) {
    if let Some(anchor) = v.iter().find(|z| z.norm() > PHASE_ANCHOR).copied() {
        let phase = anchor.conj() / anchor.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

fn lexicographic(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

pub fn herm_eig(m: &CMatrix) -> Result<HermitianEig> {
    herm_eig_tol(m, DEFAULT_TOL)
}

/// Hermitian eigendecomposition with deterministic output: eigenvalues
/// descending, phases fixed by [`normalize_phase`], degenerate runs ordered
/// lexicographically by eigenvector entries.
pub fn herm_eig_tol(m: &CMatrix, tol: f64) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.norm();
    let defect = hermiticity_defect(m);
    if defect > tol * scale {
        return Err(Error::NotHermitian { asymmetry: defect });
    }
    let d = m.nrows();
    if d == 0 {
        return Ok(HermitianEig {
            eigenvalues: Vec::new(),
            eigenvectors: zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut pairs: Vec<(f64, CVector)> = (0..d)
        .map(|k| {
            let mut v = eig.eigenvectors.column(k).into_owned();
            let n = v.norm();
            if n > 0.0 {
                v /= cr(n);
            }
            normalize_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let tie = TIE_EPS * scale.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (pairs[end - 1].0 - pairs[end].0).abs() <= tie {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
        }
        start = end;
    }

    let mut vectors = zeros(d, d);
    let mut values = Vec::with_capacity(d);
    for (k, (val, v)) in pairs.into_iter().enumerate() {
        vectors.set_column(k, &v);
        values.push(val);
    }
    Ok(HermitianEig {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

fn psd_eig(m: &CMatrix, tol: f64) -> Result<HermitianEig> {
    let eig = herm_eig_tol(m, tol)?;
    let floor = -tol * eig.max_eigenvalue().abs().max(1.0);
    if eig.min_eigenvalue() < floor {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min_eigenvalue(),
        });
    }
    Ok(eig)
}

pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    psd_sqrt_tol(m, DEFAULT_TOL)
}

/// Principal square root of a PSD matrix; eigenvalues in `[-tol, 0)` are
/// clamped to zero.
pub fn psd_sqrt_tol(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let eig = psd_eig(m, tol)?;
    Ok(eig.map(|x| x.max(0.0).sqrt()))
}

/// Pseudo-inverse square root on the support of a PSD matrix.
///
/// Eigenvalues above `tol * λ_max` map to `λ^{-1/2}`, the rest to zero. The
/// second matrix is the projector onto the retained support.
pub fn support_inv_sqrt(m: &CMatrix, tol: f64) -> Result<(CMatrix, CMatrix)> {
    let eig = psd_eig(m, tol)?;
    let top = eig.max_eigenvalue();
    if top <= tol {
        return Err(Error::ZeroMatrix);
    }
    let cut = tol * top;
    let inv = eig.map(|x| if x > cut { 1.0 / x.sqrt() } else { 0.0 });
    let proj = eig.map(|x| if x > cut { 1.0 } else { 0.0 });
    Ok((inv, proj))
}

/// Orthonormal basis (as columns) of the support of a PSD matrix.
pub fn support_basis(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let eig = psd_eig(m, tol)?;
    let top = eig.max_eigenvalue();
    if top <= 0.0 {
        return Ok(zeros(m.nrows(), 0));
    }
    Ok(eig.vectors_above(tol * top))
}

pub fn support_projector(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    Ok(projector_from_basis(&support_basis(m, tol)?))
}

/// Thin singular value decomposition `m = u · diag(values) · v†`, sorted in
/// decreasing order. `u` has `max(rows, cols)` rows padded with zeros when
/// `m` is wide; only the first `m.nrows()` rows are meaningful.
struct Svd {
    values: Vec<f64>,
    u: CMatrix,
    v: CMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
fn jacobi_svd(m: &CMatrix) -> Svd {
    let (rows, n) = m.shape();
    let r = rows.max(n);
    let mut a = zeros(r, n);
    a.view_mut((0, 0), (rows, n)).copy_from(m);
    let mut v = identity(n);
    let floor = (f64::EPSILON * m.norm()).powi(2);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if alpha.min(beta) <= floor || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut a, p, q, phase, c, s);
                rotate_columns(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = (0..n).map(|k| (a.column(k).norm(), k)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(Ordering::Equal));
    let values: Vec<f64> = order.iter().map(|o| o.0).collect();
    let u = CMatrix::from_fn(r, n, |i, j| {
        let (sigma, k) = order[j];
        if sigma > 0.0 {
            a[(i, k)] / sigma
        } else {
            cr(0.0)
        }
    });
    let v = CMatrix::from_fn(n, n, |i, j| v[(i, order[j].1)]);
    Svd { values, u, v }
}

/// Replaces columns `p`, `q` by `c·x_p − s·ē·x_q` and `s·x_p + c·ē·x_q`.
fn rotate_columns(m: &mut CMatrix, p: usize, q: usize, phase: Complex64, c: f64, s: f64) {
    let conj = phase.conj();
    for i in 0..m.nrows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)] * conj;
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = xp * s + xq * c;
    }
}

/// Orthonormal basis of the column space of an arbitrary matrix.
pub fn range_basis(m: &CMatrix, tol: f64) -> CMatrix {
    if m.ncols() == 0 || m.nrows() == 0 {
        return zeros(m.nrows(), 0);
    }
    let svd = jacobi_svd(m);
    let top = svd.values[0];
    if top == 0.0 {
        return zeros(m.nrows(), 0);
    }
    let keep = svd.values.iter().filter(|&&x| x > tol * top).count();
    svd.u.view((0, 0), (m.nrows(), keep)).into_owned()
}

pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn tensor_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Which tensor factor of a bipartite space is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace over the factor not listed in `keep`.
pub fn partial_trace(m: &CMatrix, dims: (usize, usize), keep: Subsystem) -> Result<CMatrix> {
    let (da, db) = dims;
    let n = da * db;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {da}x{db} needs a {n}x{n} matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|b| m[(i * db + b, j * db + b)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|a| m[(a * db + i, a * db + j)]).sum()
        }),
    };
    Ok(out)
}

/// Reorders `A⊗B` into `B⊗A`.
pub fn swap_subsystems(m: &CMatrix, dims: (usize, usize)) -> Result<CMatrix> {
    let (da, db) = dims;
    let n = da * db;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "swap over {da}x{db} needs a {n}x{n} matrix"
        )));
    }
    let idx = |k: usize| {
        let (b, a) = (k / da, k % da);
        a * db + b
    };
    Ok(CMatrix::from_fn(n, n, |i, j| m[(idx(i), idx(j))]))
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut values = jacobi_svd(m).values;
    values.truncate(m.nrows().min(m.ncols()));
    values
}

/// Number of singular values above `tol * σ_max`; zero for the zero matrix.
pub fn rank_tol(m: &CMatrix, tol: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Trace-norm distance `‖A − B‖₁`.
pub fn trace_norm_dist(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(trace_norm(&(a - b)))
}

/// Deviation of `P` from being an orthogonal projector.
pub fn projector_defect(p: &CMatrix) -> f64 {
    (p * p - p).norm() + hermiticity_defect(p)
}

/// Nearest unitary (polar factor) of a square matrix.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = jacobi_svd(m);
    let n = m.ncols();
    let mut u = svd.u;
    let null = null_space(&u.adjoint(), 1e-8);
    let rank = svd.values.iter().filter(|&&x| x > 0.0).count();
    for (k, j) in (rank..n).enumerate() {
        u.set_column(j, &null.column(k));
    }
    u * svd.v.adjoint()
}

/// Column-stacking of an `r × c` matrix into a vector of length `r * c`,
/// row-major (`index = row * c + col`).
pub fn vec_row_major(m: &CMatrix) -> CVector {
    let (r, cols) = m.shape();
    CVector::from_fn(r * cols, |k, _| m[(k / cols, k % cols)])
}

pub fn unvec_row_major(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Orthonormal basis of the null space of the linear map whose matrix is
/// `m`, with singular values at or below `tol * σ_max` treated as zero.
pub fn null_space(m: &CMatrix, tol: f64) -> CMatrix {
    null_space_with_scale(m, tol, 0.0)
}

/// Like [`null_space`], with the cutoff `tol * max(σ_max, scale)`, so a map
/// that is zero up to rounding relative to `scale` has a full null space.
pub fn null_space_with_scale(m: &CMatrix, tol: f64, scale: f64) -> CMatrix {
    let n = m.ncols();
    if m.nrows() == 0 || n == 0 {
        return identity(n);
    }
    let svd = jacobi_svd(m);
    let top = svd.values[0];
    let cut = tol * top.max(scale);
    if top <= cut || top == 0.0 {
        return identity(n);
    }
    let keep = svd.values.iter().filter(|&&x| x > cut).count();
    svd.v.columns(keep, n - keep).into_owned()
}
