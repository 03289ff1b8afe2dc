//! Dense complex Hermitian linear algebra.
//!
//! Numerical substrate for every density-matrix and SDP computation:
//! Kronecker products, partial traces, a cyclic-Jacobi Hermitian
//! eigensolver, positive parts, trace norm (normalized as half the sum of
//! singular values), fidelity and Uhlmann purifications.

mod eig;
mod matrix;

pub use eig::{eig_hermitian, EigenDecomposition};
pub use matrix::ComplexMatrix;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinmatError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max deviation {max_dev:.3e}, tolerance {tol:.3e})")]
    NotHermitian { max_dev: f64, tol: f64 },
    #[error("matrix is not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("vector is not unit-norm (norm {norm})")]
    NotUnitNorm { norm: f64 },
    #[error("non-finite entry encountered")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, LinmatError>;

/// Numerical tolerances, centralized. The defaults are the contract
/// values used throughout the crate.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Max allowed deviation from `A = A†` on validated inputs.
    pub hermitian: f64,
    /// Eigenvalues in `[-psd_slack, 0]` are treated as exactly zero.
    pub psd_slack: f64,
    /// Max allowed deviation of `Tr[rho]` from 1.
    pub trace_one: f64,
    /// Max allowed deviation of a state vector norm from 1.
    pub unit_norm: f64,
    /// Jacobi sweep stops once every off-diagonal entry is below this
    /// (relative to the largest input entry).
    pub jacobi_threshold: f64,
    /// Jacobi sweep cap.
    pub jacobi_max_sweeps: usize,
    /// Inputs to `matrix_sqrt_psd` with eigenvalues below `-sqrt_reject`
    /// are rejected rather than clamped.
    pub sqrt_reject: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-12,
            psd_slack: 1e-10,
            trace_one: 1e-10,
            unit_norm: 1e-12,
            jacobi_threshold: 1e-13,
            jacobi_max_sweeps: 100,
            sqrt_reject: 1e-8,
        }
    }
}

/// A square complex matrix validated to be Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

impl HermitianMatrix {
    /// Validates `A = A†` entrywise within `tol.hermitian` and symmetrizes
    /// the stored copy so downstream code sees an exactly Hermitian matrix.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tol(mat, &Tolerances::default())
    }

    pub fn with_tol(mat: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(LinmatError::DimensionMismatch(format!(
                "{}x{} matrix is not square",
                mat.rows(),
                mat.cols()
            )));
        }
        if !mat.is_finite() {
            return Err(LinmatError::NonFinite);
        }
        let mut max_dev = 0.0f64;
        for i in 0..mat.rows() {
            for j in i..mat.cols() {
                let dev = (mat.get(i, j) - mat.get(j, i).conj()).norm();
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev > tol.hermitian {
            return Err(LinmatError::NotHermitian {
                max_dev,
                tol: tol.hermitian,
            });
        }
        let mut sym = mat.clone();
        for i in 0..mat.rows() {
            for j in 0..mat.cols() {
                sym.set(i, j, (mat.get(i, j) + mat.get(j, i).conj()) * 0.5);
            }
        }
        Ok(HermitianMatrix { mat: sym })
    }

    /// Builds a Hermitian matrix from data already known to be exactly
    /// Hermitian by construction (e.g. `V Λ V†` reconstructions). The
    /// entries are symmetrized without a tolerance check.
    pub(crate) fn from_exact(mat: ComplexMatrix) -> Self {
        debug_assert_eq!(mat.rows(), mat.cols());
        let mut sym = mat.clone();
        for i in 0..mat.rows() {
            for j in 0..mat.cols() {
                sym.set(i, j, (mat.get(i, j) + mat.get(j, i).conj()) * 0.5);
            }
        }
        HermitianMatrix { mat: sym }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            mat: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix {
            mat: ComplexMatrix::identity(dim),
        }
    }

    /// Hermitian matrix with the given real diagonal.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = ComplexMatrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        HermitianMatrix { mat: m }
    }

    /// Rank-one projector `|v><v|` scaled by `v`'s squared norm.
    pub fn outer(v: &[Complex64]) -> Self {
        let d = v.len();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        HermitianMatrix { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat.get(i, j)
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            mat: self.mat.add(&other.mat),
        }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            mat: self.mat.sub(&other.mat),
        }
    }

    pub fn scale(&self, c: f64) -> HermitianMatrix {
        HermitianMatrix {
            mat: self.mat.scale(Complex64::new(c, 0.0)),
        }
    }

    /// Kronecker product of two Hermitian matrices, itself Hermitian.
    pub fn kron(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            mat: tensor(&self.mat, &other.mat),
        }
    }

    /// Real Hilbert-Schmidt inner product `Tr[A B]` (real for Hermitian
    /// `A`, `B`).
    pub fn inner(&self, other: &HermitianMatrix) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                // Tr[AB] = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij)
                acc += (self.get(i, j) * other.get(i, j).conj()).re;
            }
        }
        acc
    }

    /// Expectation `Tr[A rho]`.
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        self.inner(rho.hermitian())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let e = eig_hermitian(self);
        *e.eigenvalues().last().expect("nonempty spectrum")
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.max_abs()
    }
}

/// Trace-1 positive semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    herm: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tol(mat, &Tolerances::default())
    }

    pub fn with_tol(mat: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let herm = HermitianMatrix::with_tol(mat, tol)?;
        let tr = herm.trace();
        if (tr - 1.0).abs() > tol.trace_one {
            return Err(LinmatError::NotDensityMatrix(format!(
                "trace {tr} deviates from 1 by more than {:.1e}",
                tol.trace_one
            )));
        }
        let min_eig = herm.min_eigenvalue();
        if min_eig < -tol.psd_slack {
            return Err(LinmatError::NotDensityMatrix(format!(
                "min eigenvalue {min_eig:.3e} below -{:.1e}",
                tol.psd_slack
            )));
        }
        Ok(DensityMatrix { herm })
    }

    /// `|psi><psi|` for a pure state.
    pub fn from_pure(psi: &PureState) -> Self {
        DensityMatrix {
            herm: HermitianMatrix::outer(psi.amplitudes()),
        }
    }

    /// Diagonal density matrix from a probability vector.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-10 || p.iter().any(|&x| x < 0.0) {
            return Err(LinmatError::NotDensityMatrix(
                "probability vector must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(DensityMatrix {
            herm: HermitianMatrix::from_diag(p),
        })
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            herm: HermitianMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.herm
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.herm.matrix()
    }

    /// Kronecker product of two density matrices.
    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            herm: self.herm.kron(&other.herm),
        }
    }

    /// Uniform mixture `(a + b)/2`.
    pub fn average(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            herm: a.herm.add(&b.herm).scale(0.5),
        }
    }
}

/// Unit-norm complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        Self::with_tol(amps, &Tolerances::default())
    }

    pub fn with_tol(amps: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(LinmatError::NonFinite);
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol.unit_norm {
            return Err(LinmatError::NotUnitNorm { norm });
        }
        Ok(PureState { amps })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(LinmatError::NotUnitNorm { norm });
        }
        Ok(PureState {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Real-amplitude basis helper.
    pub fn from_reals(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|k>` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        PureState { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Which factor `partial_trace` keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Keep {
    A,
    B,
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a.get(i, j);
            for k in 0..rb {
                for l in 0..cb {
                    out.set(i * rb + k, j * cb + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Partial trace of an operator on `C^dA ⊗ C^dB`.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), keep: Keep) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    let d = da * db;
    if m.rows() != d || m.cols() != d {
        return Err(LinmatError::DimensionMismatch(format!(
            "expected {d}x{d} operator for dims ({da},{db}), got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    match keep {
        Keep::A => {
            let mut out = ComplexMatrix::zeros(da, da);
            for i in 0..da {
                for j in 0..da {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..db {
                        acc += m.get(i * db + k, j * db + k);
                    }
                    out.set(i, j, acc);
                }
            }
            Ok(out)
        }
        Keep::B => {
            let mut out = ComplexMatrix::zeros(db, db);
            for i in 0..db {
                for j in 0..db {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..da {
                        acc += m.get(k * db + i, k * db + j);
                    }
                    out.set(i, j, acc);
                }
            }
            Ok(out)
        }
    }
}

/// Positive part `Pos(A) = A⁺` of the unique decomposition `A = A⁺ - A⁻`
/// with orthogonal supports. Eigenvalues in `[-psd_slack, 0]` count as 0.
pub fn pos_part(a: &HermitianMatrix) -> HermitianMatrix {
    let e = eig_hermitian(a);
    let clamped: Vec<f64> = e.eigenvalues().iter().map(|&l| l.max(0.0)).collect();
    e.reconstruct_with(&clamped)
}

/// Trace norm, normalized as half the sum of the absolute
/// eigenvalues.
pub fn trace_norm(a: &HermitianMatrix) -> f64 {
    let e = eig_hermitian(a);
    0.5 * e.eigenvalues().iter().map(|l| l.abs()).sum::<f64>()
}

/// PSD square root. Eigenvalues in `[-psd_slack, 0]` are clamped to 0;
/// anything below `-sqrt_reject` is rejected.
pub fn matrix_sqrt_psd(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let tol = Tolerances::default();
    let e = eig_hermitian(a);
    let min_eig = *e.eigenvalues().last().expect("nonempty spectrum");
    if min_eig < -tol.sqrt_reject {
        return Err(LinmatError::NotPsd { min_eig });
    }
    let roots: Vec<f64> = e.eigenvalues().iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok(e.reconstruct_with(&roots))
}

/// Uhlmann fidelity `F(r, s) = Tr sqrt(sqrt(r) s sqrt(r))`, in `[0, 1]`.
/// For pure inputs this is `|<phi|psi>|`.
pub fn fidelity(r: &DensityMatrix, s: &DensityMatrix) -> Result<f64> {
    if r.dim() != s.dim() {
        return Err(LinmatError::DimensionMismatch(format!(
            "fidelity between dims {} and {}",
            r.dim(),
            s.dim()
        )));
    }
    let root = matrix_sqrt_psd(r.hermitian())?;
    let inner = root
        .matrix()
        .mul(s.matrix())
        .mul(root.matrix());
    let inner = HermitianMatrix::from_exact(inner);
    let e = eig_hermitian(&inner);
    let f: f64 = e.eigenvalues().iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(f.min(1.0))
}

/// Uhlmann-optimal purification pair: each output lives on `C^(d^2)`,
/// traces back to its input over the ancilla, and the pair's overlap
/// equals the fidelity.
///
/// Construction: `|psi_i> = (sqrt(r_i) W_i ⊗ I) |Omega>` with `W_0 = I`
/// and `W_1` the adjoint polar factor of `sqrt(r_0) sqrt(r_1)`.
pub fn purify_pair(r0: &DensityMatrix, r1: &DensityMatrix) -> Result<(PureState, PureState)> {
    if r0.dim() != r1.dim() {
        return Err(LinmatError::DimensionMismatch(format!(
            "purify_pair between dims {} and {}",
            r0.dim(),
            r1.dim()
        )));
    }
    let d = r0.dim();
    let s0 = matrix_sqrt_psd(r0.hermitian())?;
    let s1 = matrix_sqrt_psd(r1.hermitian())?;
    // n = sqrt(r0) sqrt(r1); its polar unitary aligns the two ancillas.
    let n = s0.matrix().mul(s1.matrix());
    let w = adjoint_polar_unitary(&n);
    // |psi0> = (s0 ⊗ I)|Omega|, |psi1> = (s1 w ⊗ I)|Omega>,
    // i.e. amplitudes are the matrix entries in row-major order.
    let m1 = s1.matrix().mul(&w);
    let amp = |m: &ComplexMatrix| -> Vec<Complex64> {
        let mut v = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                v.push(m.get(i, j));
            }
        }
        v
    };
    let p0 = PureState::normalized(amp(s0.matrix()))?;
    let p1 = PureState::normalized(amp(&m1))?;
    Ok((p0, p1))
}

/// Unitary `U` maximizing `Re Tr[N U]`, i.e. the adjoint of the polar
/// factor of `N`. Zero singular directions are completed deterministically
/// by Gram-Schmidt over the canonical basis.
fn adjoint_polar_unitary(n: &ComplexMatrix) -> ComplexMatrix {
    let d = n.rows();
    debug_assert_eq!(n.cols(), d);
    // N† N = V S² V†
    let gram = HermitianMatrix::from_exact(n.adjoint().mul(n));
    let e = eig_hermitian(&gram);
    let tol = 1e-12 * (1.0 + gram.max_abs());
    let mut right: Vec<Vec<Complex64>> = Vec::new(); // w_i
    let mut left: Vec<Vec<Complex64>> = Vec::new(); // u_i = N w_i / s_i
    for (idx, &l) in e.eigenvalues().iter().enumerate() {
        if l > tol {
            let s = l.sqrt();
            let w = e.eigenvector(idx);
            let u: Vec<Complex64> = (0..d)
                .map(|i| (0..d).map(|j| n.get(i, j) * w[j]).sum::<Complex64>() / s)
                .collect();
            right.push(w);
            left.push(u);
        }
    }
    complete_basis(&mut right, d);
    complete_basis(&mut left, d);
    // U = sum_i |w_i><u_i|  maximizes Re Tr[N U] = sum_i s_i.
    let mut u = ComplexMatrix::zeros(d, d);
    for (wv, uv) in right.iter().zip(left.iter()) {
        for i in 0..d {
            for j in 0..d {
                *u.get_mut(i, j) += wv[i] * uv[j].conj();
            }
        }
    }
    u
}

/// Extends a partial orthonormal set to a full basis of `C^d` by
/// Gram-Schmidt over canonical basis vectors, in index order.
fn complete_basis(vs: &mut Vec<Vec<Complex64>>, d: usize) {
    let mut k = 0usize;
    while vs.len() < d {
        assert!(k < d, "basis completion exhausted candidates");
        let mut cand = vec![Complex64::new(0.0, 0.0); d];
        cand[k] = Complex64::new(1.0, 0.0);
        k += 1;
        for v in vs.iter() {
            let proj: Complex64 = v.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
            for i in 0..d {
                cand[i] -= proj * v[i];
            }
        }
        let norm = cand.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for a in cand.iter_mut() {
                *a /= norm;
            }
            vs.push(cand);
        }
    }
}

/// On-disk matrix encoding: `dim`, real parts, imaginary parts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn to_complex(&self) -> Result<ComplexMatrix> {
        let d = self.dim;
        if self.re.len() != d
            || self.im.len() != d
            || self.re.iter().any(|r| r.len() != d)
            || self.im.iter().any(|r| r.len() != d)
        {
            return Err(LinmatError::DimensionMismatch(format!(
                "matrix file arrays do not match dim {d}"
            )));
        }
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, Complex64::new(self.re[i][j], self.im[i][j]));
            }
        }
        if !m.is_finite() {
            return Err(LinmatError::NonFinite);
        }
        Ok(m)
    }

    /// Hermiticity is validated on load.
    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_complex()?)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_complex()?)
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        assert_eq!(m.rows(), m.cols());
        let d = m.rows();
        let re = (0..d)
            .map(|i| (0..d).map(|j| m.get(i, j).re).collect())
            .collect();
        let im = (0..d)
            .map(|i| (0..d).map(|j| m.get(i, j).im).collect())
            .collect();
        MatrixFile { dim: d, re, im }
    }
}
