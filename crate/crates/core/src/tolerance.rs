//! Numerical tolerances shared by every module.

/// Checks performed when a state, basis, gate or density operator is built.
pub const CONSTRUCTION: f64 = 1e-12;

/// Comparisons between independently computed quantities.
pub const COMPARISON: f64 = 1e-9;

/// Hermiticity required of `trace_norm` inputs.
pub const HERMITIAN_INPUT: f64 = 1e-10;

/// Most negative eigenvalue still accepted in a density operator.
pub const PSD_FLOOR: f64 = -1e-10;

/// Off-diagonal Frobenius norm at which the Jacobi sweep stops.
pub const EIGEN_CONVERGENCE: f64 = 1e-12;

/// Branches with smaller Born probability are dropped in exact mode.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-15;
