//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Accurate and simple at the dimensions this crate operates on
//! (everything is well below 256).

use num_complex::Complex64;

use super::{ComplexMatrix, HermitianMatrix, Tolerances};

/// Spectral decomposition `A = V Λ V†` with eigenvalues in non-increasing
/// order and orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector column `k` (matching `eigenvalues()[k]`).
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.rows())
            .map(|i| self.eigenvectors.get(i, k))
            .collect()
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// Rebuilds `V diag(values) V†` for an arbitrary replacement spectrum,
    /// e.g. clamped or square-rooted eigenvalues.
    pub fn reconstruct_with(&self, values: &[f64]) -> HermitianMatrix {
        let d = self.eigenvectors.rows();
        assert_eq!(values.len(), d);
        let mut out = ComplexMatrix::zeros(d, d);
        for (k, &l) in values.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            for i in 0..d {
                let vik = self.eigenvectors.get(i, k);
                for j in 0..d {
                    *out.get_mut(i, j) += vik * self.eigenvectors.get(j, k).conj() * l;
                }
            }
        }
        HermitianMatrix::from_exact(out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(&self.eigenvalues.clone())
    }
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations.
pub fn eig_hermitian(a: &HermitianMatrix) -> EigenDecomposition {
    let tol = Tolerances::default();
    let d = a.dim();
    let mut m = a.matrix().clone();
    let mut v = ComplexMatrix::identity(d);
    let scale = m.max_abs().max(1.0);
    let threshold = tol.jacobi_threshold * scale;

    for _sweep in 0..tol.jacobi_max_sweeps {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(m.get(p, q).norm());
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..d).map(|i| (m.get(i, i).re, i)).collect();
    // Non-increasing; index tiebreak for determinism.
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));

    let eigenvalues: Vec<f64> = pairs.iter().map(|&(l, _)| l).collect();
    let mut eigenvectors = ComplexMatrix::zeros(d, d);
    for (col, &(_, src)) in pairs.iter().enumerate() {
        for i in 0..d {
            eigenvectors.set(i, col, v.get(i, src));
        }
    }
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// One complex Jacobi rotation zeroing `m[p][q]`; accumulates into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = m.get(p, q);
    let gn = g.norm();
    if gn == 0.0 {
        return;
    }
    let phase = g / gn;
    let tau = (m.get(p, p).re - m.get(q, q).re) / (2.0 * gn);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let sigma = t * c;
    // U = I except U_pp = c, U_qp = sigma * conj(phase),
    // U_pq = -sigma * phase, U_qq = c; apply A <- U† A U, V <- V U.
    let s = phase.conj() * sigma;
    let d = m.rows();
    for k in 0..d {
        // columns: (A U)
        let akp = m.get(k, p);
        let akq = m.get(k, q);
        m.set(k, p, akp * c + akq * s);
        m.set(k, q, akq * c - akp * s.conj());
    }
    for k in 0..d {
        // rows: U† (A U)
        let apk = m.get(p, k);
        let aqk = m.get(q, k);
        m.set(p, k, apk * c + aqk * s.conj());
        m.set(q, k, aqk * c - apk * s);
    }
    // Force exact Hermitian structure on the rotated 2x2 block.
    m.set(p, q, Complex64::new(0.0, 0.0));
    m.set(q, p, Complex64::new(0.0, 0.0));
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    m.set(p, p, Complex64::new(app, 0.0));
    m.set(q, q, Complex64::new(aqq, 0.0));
    for k in 0..d {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c + vkq * s);
        v.set(k, q, vkq * c - vkp * s.conj());
    }
}
