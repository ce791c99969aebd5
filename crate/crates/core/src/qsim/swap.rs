use super::{DensityOperator, PureState};
use crate::{Error, Result};

/// Probability that the SWAP test on `|ξ⟩|χ⟩` leaves the control in `|0⟩`:
/// `(1 + |⟨ξ|χ⟩|²)/2`.
pub fn swap_test_pass_probability(xi: &PureState, chi: &PureState) -> Result<f64> {
    if xi.dims() != chi.dims() {
        return Err(Error::DimensionMismatch { expected: xi.dim(), found: chi.dim() });
    }
    Ok((1.0 + xi.inner(chi)?.norm_sqr()) / 2.0)
}

/// Mixed-state form: `(1 + tr(ρρ′))/2`.
pub fn swap_test_pass_probability_mixed(rho: &DensityOperator, rho2: &DensityOperator) -> Result<f64> {
    if rho.dims() != rho2.dims() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: rho2.dim() });
    }
    Ok((1.0 + rho.overlap(rho2)?) / 2.0)
}
