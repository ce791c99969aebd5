//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.

use super::{c, hermitian_deviation, max_abs_entry, CMatrix, C64};
use crate::{tolerance, Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Sum of `|v⟩⟨v|` over eigenvectors whose eigenvalue satisfies `keep`.
    pub fn spectral_projector(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let n = self.vectors.nrows();
        let mut p = CMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            if keep(lambda) {
                let v = self.vectors.column(k);
                p += v * v.adjoint();
            }
        }
        p
    }
}

pub fn hermitian_eigen(matrix: &CMatrix) -> Result<HermitianEigen> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: matrix.ncols() });
    }
    let scale = max_abs_entry(matrix).max(1.0);
    let deviation = hermitian_deviation(matrix);
    if deviation > tolerance::HERMITIAN_INPUT * scale {
        return Err(Error::NotHermitian { deviation });
    }

    // Symmetrize so the rotations act on an exactly Hermitian matrix.
    let mut a = (matrix + matrix.adjoint()) * c(0.5, 0.0);
    let mut v = CMatrix::identity(n, n);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tolerance::EIGEN_CONVERGENCE * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tolerance::EIGEN_CONVERGENCE * scale {
        return Err(Error::EigenNoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// `‖A‖₁`, the sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(delta: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigen(delta)?.values.iter().map(|l| l.abs()).sum())
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let mut sum = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Zeroes `a[p][q]` with the unitary `J = D·R`, where `D` removes the phase
/// of the pivot and `R` is the real Jacobi rotation. Updates `a ← J†aJ` and
/// `v ← vJ`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude < 1e-300 {
        return;
    }
    let unit = apq / magnitude;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * magnitude);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let cos = 1.0 / (t * t + 1.0).sqrt();
    let sin = t * cos;

    let jpp = c(cos, 0.0);
    let jpq = c(sin, 0.0);
    let jqp = unit.conj() * -sin;
    let jqq = unit.conj() * cos;

    let n = a.nrows();
    let column_update = |m: &mut CMatrix| {
        for k in 0..n {
            let mp = m[(k, p)];
            let mq = m[(k, q)];
            m[(k, p)] = mp * jpp + mq * jqp;
            m[(k, q)] = mp * jpq + mq * jqq;
        }
    };
    column_update(a);
    column_update(v);
    for k in 0..n {
        let ap = a[(p, k)];
        let aq = a[(q, k)];
        a[(p, k)] = jpp.conj() * ap + jqp.conj() * aq;
        a[(q, k)] = jpq.conj() * ap + jqq.conj() * aq;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}
