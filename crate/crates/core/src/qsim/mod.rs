//! Small exact quantum simulator.
//!
//! States carry an explicit list of register dimensions. Amplitudes are
//! indexed big-endian: the first register is the most significant digit of
//! the basis label, so `|01⟩` on two qubits is index 1 and `|10⟩` is index 2.

mod density;
mod eigen;
mod measure;
mod state;
mod swap;

pub use density::DensityOperator;
pub use eigen::{hermitian_eigen, trace_norm, HermitianEigen};
pub use measure::{
    measure_in_basis_exact, measure_in_basis_sampled, measure_projective_exact,
    measure_projective_sampled, MeasurementResult, QubitBasis,
};
pub use state::PureState;
pub use swap::{swap_test_pass_probability, swap_test_pass_probability_mixed};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{iθ}`.
pub fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Standard single-qubit gates.
pub mod gates {
    use super::{c, CMatrix};
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn identity(dim: usize) -> CMatrix {
        CMatrix::identity(dim, dim)
    }

    pub fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    pub fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn hadamard() -> CMatrix {
        let h = c(FRAC_1_SQRT_2, 0.0);
        CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
    }
}

/// Largest entrywise modulus of `a - a†`.
pub(crate) fn hermitian_deviation(a: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn max_abs_entry(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Index arithmetic over a big-endian register layout.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl Layout {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for r in (0..dims.len().saturating_sub(1)).rev() {
            strides[r] = strides[r + 1] * dims[r + 1];
        }
        Layout { dims: dims.to_vec(), strides }
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn digit(&self, index: usize, register: usize) -> usize {
        (index / self.strides[register]) % self.dims[register]
    }

    /// Splits a full index into (index over `subset`, index over the complement),
    /// each big-endian in the order the registers are listed / appear.
    pub fn split(&self, index: usize, subset: &[usize]) -> (usize, usize) {
        let mut inner = 0;
        for &r in subset {
            inner = inner * self.dims[r] + self.digit(index, r);
        }
        let mut outer = 0;
        for r in 0..self.dims.len() {
            if !subset.contains(&r) {
                outer = outer * self.dims[r] + self.digit(index, r);
            }
        }
        (inner, outer)
    }

    /// Offsets of every sub-index over `subset` relative to a base index whose
    /// `subset` digits are zero.
    pub fn offsets(&self, subset: &[usize]) -> Vec<usize> {
        let sub_total: usize = subset.iter().map(|&r| self.dims[r]).product();
        (0..sub_total)
            .map(|mut k| {
                let mut off = 0;
                for &r in subset.iter().rev() {
                    off += (k % self.dims[r]) * self.strides[r];
                    k /= self.dims[r];
                }
                off
            })
            .collect()
    }

    pub fn validate_subset(&self, subset: &[usize]) -> crate::Result<()> {
        for (i, &r) in subset.iter().enumerate() {
            if r >= self.dims.len() || subset[..i].contains(&r) {
                return Err(crate::Error::InvalidRegister { index: r, count: self.dims.len() });
            }
        }
        Ok(())
    }

    /// Full indices whose `subset` digits are all zero.
    pub fn bases(&self, subset: &[usize]) -> impl Iterator<Item = usize> + '_ {
        let subset = subset.to_vec();
        (0..self.total()).filter(move |&i| subset.iter().all(|&r| self.digit(i, r) == 0))
    }
}
