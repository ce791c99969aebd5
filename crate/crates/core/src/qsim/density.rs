use super::{c, hermitian_deviation, hermitian_eigen, CMatrix, Layout, PureState, C64};
use crate::{tolerance, Error, Result};

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let total: usize = dims.iter().product();
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch { expected: total, found: matrix.nrows() });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > tolerance::CONSTRUCTION {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace - c(1.0, 0.0)).norm() > tolerance::CONSTRUCTION {
            return Err(Error::InvalidDensity(format!("trace {trace}")));
        }
        let lowest = hermitian_eigen(&matrix)?.values.first().copied().unwrap_or(0.0);
        if lowest < tolerance::PSD_FLOOR {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lowest:e}")));
        }
        Ok(DensityOperator { dims, matrix })
    }

    /// Skips the eigenvalue check; the caller guarantees validity by construction.
    pub(crate) fn from_parts(dims: Vec<usize>, matrix: CMatrix) -> Self {
        DensityOperator { dims, matrix }
    }

    pub fn from_pure(state: &PureState) -> Self {
        DensityOperator { dims: state.dims().to_vec(), matrix: state.projector() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let matrix = CMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0);
        DensityOperator { dims: vec![dim], matrix }
    }

    /// Weighted sum `Σ wᵢ ρᵢ` of operators with identical layouts.
    pub fn mixture(parts: &[(f64, DensityOperator)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or(Error::InvalidDensity("empty mixture".into()))?;
        let mut matrix = CMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.dims != first.dims {
                return Err(Error::DimensionMismatch { expected: first.dim(), found: rho.dim() });
            }
            matrix += &rho.matrix * c(*w, 0.0);
        }
        Self::new(first.dims.clone(), matrix)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `tr(ρσ)`.
    pub fn overlap(&self, other: &DensityOperator) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok((&self.matrix * &other.matrix).trace().re)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, state: &PureState) -> Result<f64> {
        if self.dim() != state.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: state.dim() });
        }
        let v = state.amplitudes();
        Ok((v.adjoint() * &self.matrix * v)[(0, 0)].re)
    }

    /// Largest entrywise difference.
    pub fn max_entry_deviation(&self, other: &DensityOperator) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Reduced operator on `keep`, in the order listed.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let layout = Layout::new(&self.dims);
        layout.validate_subset(keep)?;
        let kept_dims: Vec<usize> = keep.iter().map(|&r| self.dims[r]).collect();
        let kept: usize = kept_dims.iter().product();
        let mut out = CMatrix::zeros(kept, kept);
        let n = self.dim();
        let split: Vec<(usize, usize)> = (0..n).map(|i| layout.split(i, keep)).collect();
        for i in 0..n {
            for j in 0..n {
                let (ai, ri) = split[i];
                let (aj, rj) = split[j];
                if ri == rj {
                    out[(ai, aj)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityOperator { dims: kept_dims, matrix: out })
    }
}

impl PureState {
    /// Reduced density operator on `keep`, in the order listed.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let layout = Layout::new(self.dims());
        layout.validate_subset(keep)?;
        let kept_dims: Vec<usize> = keep.iter().map(|&r| self.dims()[r]).collect();
        let kept: usize = kept_dims.iter().product();
        let rest = self.dim() / kept;
        let mut m = CMatrix::zeros(kept, rest);
        for i in 0..self.dim() {
            let (a, r) = layout.split(i, keep);
            m[(a, r)] = self.amplitude(i);
        }
        Ok(DensityOperator { dims: kept_dims, matrix: &m * m.adjoint() })
    }
}
