use nalgebra::DVector;

use super::{c, hermitian_deviation, CMatrix, Layout, C64};
use crate::{tolerance, Error, Result};

/// A normalized pure state over registers of the given dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Builds a state from raw amplitudes and normalizes it.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidParams(format!("register dimensions {dims:?}")));
        }
        let total: usize = dims.iter().product();
        if amplitudes.len() != total {
            return Err(Error::DimensionMismatch { expected: total, found: amplitudes.len() });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        PureState { dims, amplitudes: DVector::from_vec(amplitudes) }.normalize()
    }

    /// A single register of dimension `dim` in basis state `index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidRegister { index, count: dim });
        }
        let mut amps = vec![c(0.0, 0.0); dim];
        amps[index] = c(1.0, 0.0);
        Self::new(vec![dim], amps)
    }

    pub fn qubit(a0: C64, a1: C64) -> Result<Self> {
        Self::new(vec![2], vec![a0, a1])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        self.amplitudes.unscale_mut(n);
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// True when the states agree up to a global phase, i.e. `|⟨a|b⟩| = 1`.
    pub fn equals_up_to_phase(&self, other: &PureState, tol: f64) -> bool {
        self.dims == other.dims
            && self.inner(other).map(|z| (1.0 - z.norm()).abs() <= tol).unwrap_or(false)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { dims, amplitudes }
    }

    /// `|ψ⟩⟨ψ|` as a matrix.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Applies a unitary to the listed registers (in the listed order).
    pub fn apply_gate(&self, gate: &CMatrix, registers: &[usize]) -> Result<PureState> {
        let deviation = unitary_deviation(gate);
        if deviation > tolerance::CONSTRUCTION {
            return Err(Error::NonUnitary { deviation });
        }
        self.apply_local(gate, registers)
    }

    /// Applies an arbitrary operator to the listed registers without
    /// renormalizing. Used for measurement projectors.
    pub(crate) fn apply_local(&self, op: &CMatrix, registers: &[usize]) -> Result<PureState> {
        let layout = Layout::new(&self.dims);
        layout.validate_subset(registers)?;
        let sub: usize = registers.iter().map(|&r| self.dims[r]).product();
        if op.nrows() != sub || op.ncols() != sub {
            return Err(Error::DimensionMismatch { expected: sub, found: op.nrows() });
        }
        let offsets = layout.offsets(registers);
        let mut out = DVector::from_element(self.dim(), c(0.0, 0.0));
        let mut local = DVector::from_element(sub, c(0.0, 0.0));
        for base in layout.bases(registers) {
            for (k, off) in offsets.iter().enumerate() {
                local[k] = self.amplitudes[base + off];
            }
            let mapped = op * &local;
            for (k, off) in offsets.iter().enumerate() {
                out[base + off] = mapped[k];
            }
        }
        Ok(PureState { dims: self.dims.clone(), amplitudes: out })
    }
}

/// Largest entrywise deviation of `U†U` from the identity.
pub(crate) fn unitary_deviation(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let product = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - c(target, 0.0)).norm());
        }
    }
    worst.max(hermitian_deviation(&product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{gates, phase};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn plus() -> PureState {
        PureState::qubit(c(1.0, 0.0), c(1.0, 0.0)).unwrap()
    }

    fn minus() -> PureState {
        PureState::qubit(c(1.0, 0.0), c(-1.0, 0.0)).unwrap()
    }

    fn close(a: C64, b: f64) -> bool {
        (a - c(b, 0.0)).norm() < 1e-12
    }

    #[test]
    fn tensor_basis_states() {
        let s = PureState::basis(2, 0).unwrap().tensor(&PureState::basis(2, 1).unwrap());
        assert_eq!(s.dims(), &[2, 2]);
        for i in 0..4 {
            assert!(close(s.amplitude(i), if i == 1 { 1.0 } else { 0.0 }));
        }
    }

    #[test]
    fn tensor_plus_plus_is_uniform() {
        let s = plus().tensor(&plus());
        for i in 0..4 {
            assert!(close(s.amplitude(i), 0.5));
        }
    }

    #[test]
    fn tensor_plus_minus() {
        let s = plus().tensor(&minus());
        let expected = [0.5, -0.5, 0.5, -0.5];
        for (i, e) in expected.iter().enumerate() {
            assert!(close(s.amplitude(i), *e));
        }
    }

    #[test]
    fn z_flips_relative_sign() {
        let s = plus().apply_gate(&gates::pauli_z(), &[0]).unwrap();
        assert!(s.equals_up_to_phase(&minus(), 1e-12));
        assert!(close(s.amplitude(1), -FRAC_1_SQRT_2));
    }

    #[test]
    fn z_squared_is_identity() {
        let s = PureState::qubit(c(0.6, 0.0), phase(1.1) * 0.8).unwrap();
        let twice = s
            .apply_gate(&gates::pauli_z(), &[0])
            .unwrap()
            .apply_gate(&gates::pauli_z(), &[0])
            .unwrap();
        assert!((twice.amplitudes() - s.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn hadamard_on_zero_is_plus() {
        let s = PureState::basis(2, 0).unwrap().apply_gate(&gates::hadamard(), &[0]).unwrap();
        assert!(close(s.amplitude(0), FRAC_1_SQRT_2));
        assert!(close(s.amplitude(1), FRAC_1_SQRT_2));
    }

    #[test]
    fn gate_on_second_register_only() {
        // X on the second qubit of |00⟩ gives |01⟩.
        let s = PureState::basis(2, 0).unwrap().tensor(&PureState::basis(2, 0).unwrap());
        let s = s.apply_gate(&gates::pauli_x(), &[1]).unwrap();
        assert!(close(s.amplitude(1), 1.0));
    }

    #[test]
    fn non_unitary_gate_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(plus().apply_gate(&m, &[0]), Err(Error::NonUnitary { .. })));
    }

    #[test]
    fn bad_register_rejected() {
        assert!(matches!(
            plus().apply_gate(&gates::pauli_z(), &[1]),
            Err(Error::InvalidRegister { .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(
            PureState::new(vec![2], vec![c(0.0, 0.0); 2]).unwrap_err(),
            Error::ZeroNorm
        );
        assert!(matches!(
            PureState::new(vec![2, 2], vec![c(1.0, 0.0); 3]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            PureState::new(vec![2], vec![c(f64::NAN, 0.0), c(1.0, 0.0)]).unwrap_err(),
            Error::NonFinite
        );
    }
}
