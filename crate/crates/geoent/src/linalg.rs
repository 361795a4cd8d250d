//! Self-contained complex Hermitian eigendecomposition and singular value
//! decomposition.
//!
//! Hermitian eigenproblems are solved with cyclic Jacobi rotations; the SVD
//! of a rectangular matrix is obtained from the eigendecomposition of the
//! smaller Gram matrix, with the other side of singular vectors recovered by
//! multiplication and rank-deficient slots completed by Gram-Schmidt. Both
//! are deterministic: identical input gives bit-identical output.

use num_complex::Complex64;
use std::ops::{Index, IndexMut};
use thiserror::Error;

/// Relative off-diagonal Frobenius norm at which Jacobi sweeps stop.
pub const JACOBI_OFF_DIAG_TOL: f64 = 1e-13;
/// Jacobi sweep budget; convergence is quadratic, so this is generous.
pub const JACOBI_SWEEP_BUDGET: usize = 100;
/// Relative Hermiticity tolerance accepted by [`hermitian_eig`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Singular values at or below `RANK_TOL * sigma_max` are treated as zero.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: relative deviation {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi sweeps did not converge within {budget} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { off_norm: f64, budget: usize },
    #[error("dimension mismatch: {lhs_rows}x{lhs_cols} * {rhs_rows}x{rhs_cols}")]
    DimensionMismatch {
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        ComplexMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn conj_transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let lhs = self[(r, k)];
                if lhs.re == 0.0 && lhs.im == 0.0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += lhs * rhs[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, column: &[Complex64]) {
        assert_eq!(column.len(), self.rows);
        for (r, &v) in column.iter().enumerate() {
            self[(r, c)] = v;
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c {
                    sum += self[(r, c)].norm_sqr();
                }
            }
        }
        sum.sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigenvalues sorted descending (stable ties) with orthonormal
/// eigenvectors as the paired columns of `eigenvectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Thin SVD M = left * diag(singulars) * right^dagger with
/// `min(rows, cols)` columns on each side.
#[derive(Debug, Clone)]
pub struct SingularValueDecomposition {
    pub left: ComplexMatrix,
    pub singulars: Vec<f64>,
    pub right: ComplexMatrix,
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    let n = h.nrows();
    if h.nrows() != h.ncols() {
        return Err(LinalgError::NonSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let scale = h.frobenius_norm();
    if scale == 0.0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![0.0; n],
            eigenvectors: ComplexMatrix::identity(n),
        });
    }

    let mut deviation_sq = 0.0;
    for r in 0..n {
        for c in 0..n {
            deviation_sq += (h[(r, c)] - h[(c, r)].conj()).norm_sqr();
        }
    }
    let deviation = deviation_sq.sqrt() / scale;
    if deviation > HERMITICITY_TOL {
        return Err(LinalgError::NotHermitian { deviation });
    }

    // Work on the Hermitian average so rounding asymmetry cannot bias sweeps.
    let mut a = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            a[(r, c)] = (h[(r, c)] + h[(c, r)].conj()) * 0.5;
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let skip = scale * 1e-18;

    let mut off_norm = a.off_diagonal_norm();
    let mut converged = off_norm <= JACOBI_OFF_DIAG_TOL * scale;
    for _sweep in 0..JACOBI_SWEEP_BUDGET {
        if converged {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= skip {
                    continue;
                }
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                let w = apq / r;
                // Annihilation condition: t^2 - 2*tau*t - 1 = 0; take the
                // smaller-magnitude root for stability.
                let tau = (gamma - alpha) / (2.0 * r);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let new_kp = akp * c + akq * s * w.conj();
                    let new_kq = akq * c - akp * s * w;
                    a[(k, p)] = new_kp;
                    a[(p, k)] = new_kp.conj();
                    a[(k, q)] = new_kq;
                    a[(q, k)] = new_kq.conj();
                }
                let app = alpha * c * c + gamma * s * s + 2.0 * c * s * r;
                let aqq = alpha * s * s + gamma * c * c - 2.0 * c * s * r;
                a[(p, p)] = Complex64::new(app, 0.0);
                a[(q, q)] = Complex64::new(aqq, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * s * w.conj();
                    v[(k, q)] = vkq * c - vkp * s * w;
                }
            }
        }
        off_norm = a.off_diagonal_norm();
        converged = off_norm <= JACOBI_OFF_DIAG_TOL * scale;
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            off_norm,
            budget: JACOBI_SWEEP_BUDGET,
        });
    }

    // Stable descending sort keeps the pre-sort order inside ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (slot, &src) in order.iter().enumerate() {
        eigenvectors.set_column(slot, &v.column(src));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Thin SVD via the eigendecomposition of the smaller Gram matrix.
/// Right (or left) vectors are recovered as M^dagger a_k / sigma_k; slots with
/// sigma_k at or below the rank tolerance are completed to an orthonormal set
/// by Gram-Schmidt against the previous columns.
pub fn svd(m: &ComplexMatrix) -> Result<SingularValueDecomposition, LinalgError> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let k = rows.min(cols);
    let wide = rows <= cols;

    let gram = if wide {
        m.mul(&m.conj_transpose())?
    } else {
        m.conj_transpose().mul(m)?
    };
    let eig = hermitian_eig(&gram)?;

    let singulars: Vec<f64> = eig.eigenvalues[..k]
        .iter()
        .map(|&lambda| lambda.max(0.0).sqrt())
        .collect();
    let sigma_max = singulars.first().copied().unwrap_or(0.0);

    let primary = eig.eigenvectors; // k columns on the smaller side
    let mut derived = ComplexMatrix::zeros(if wide { cols } else { rows }, k);
    for (i, &sigma) in singulars.iter().enumerate() {
        if sigma > RANK_TOL * sigma_max && sigma > 0.0 {
            let a = primary.column(i);
            let mut b = if wide {
                apply_conj_transpose(m, &a)
            } else {
                apply(m, &a)
            };
            let norm = vec_norm(&b);
            for entry in &mut b {
                *entry /= norm;
            }
            derived.set_column(i, &b);
        } else {
            let fill = orthonormal_complement_column(&derived, i);
            derived.set_column(i, &fill);
        }
    }

    let mut left_primary = ComplexMatrix::zeros(primary.nrows(), k);
    for i in 0..k {
        left_primary.set_column(i, &primary.column(i));
    }

    if wide {
        Ok(SingularValueDecomposition {
            left: left_primary,
            singulars,
            right: derived,
        })
    } else {
        Ok(SingularValueDecomposition {
            left: derived,
            singulars,
            right: left_primary,
        })
    }
}

fn apply(m: &ComplexMatrix, x: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m.nrows()];
    for (r, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, &xc) in x.iter().enumerate() {
            acc += m[(r, c)] * xc;
        }
        *slot = acc;
    }
    out
}

fn apply_conj_transpose(m: &ComplexMatrix, x: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m.ncols()];
    for (c, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, &xr) in x.iter().enumerate() {
            acc += m[(r, c)].conj() * xr;
        }
        *slot = acc;
    }
    out
}

fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Pick the standard basis vector with the largest residual against the
/// first `filled` columns, project it out twice, and normalize.
fn orthonormal_complement_column(partial: &ComplexMatrix, filled: usize) -> Vec<Complex64> {
    let dim = partial.nrows();
    let mut best_cand = 0;
    let mut best_residual = f64::NEG_INFINITY;
    for cand in 0..dim {
        let projected: f64 = (0..filled).map(|j| partial[(cand, j)].norm_sqr()).sum();
        let residual = 1.0 - projected;
        if residual > best_residual {
            best_residual = residual;
            best_cand = cand;
        }
    }
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[best_cand] = Complex64::new(1.0, 0.0);
    for _pass in 0..2 {
        for j in 0..filled {
            let col = partial.column(j);
            let inner: Complex64 = col
                .iter()
                .zip(v.iter())
                .map(|(cj, vj)| cj.conj() * vj)
                .sum();
            for (vj, cj) in v.iter_mut().zip(col.iter()) {
                *vj -= inner * cj;
            }
        }
    }
    let norm = vec_norm(&v);
    for entry in &mut v {
        *entry /= norm;
    }
    v
}
