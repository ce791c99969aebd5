use rand::Rng;

use super::{CMatrix, PureState};
use crate::{tolerance, Error, Result};

/// One branch of a measurement.
#[derive(Debug, Clone)]
pub struct MeasurementResult {
    pub outcome: usize,
    pub probability: f64,
    pub post_state: PureState,
}

/// An orthonormal basis `{|b₀⟩, |b₁⟩}` of one qubit.
#[derive(Debug, Clone)]
pub struct QubitBasis {
    vectors: [PureState; 2],
}

impl QubitBasis {
    pub fn new(b0: PureState, b1: PureState) -> Result<Self> {
        for b in [&b0, &b1] {
            if b.dims() != [2] {
                return Err(Error::DimensionMismatch { expected: 2, found: b.dim() });
            }
        }
        // PureState is normalized on construction; only orthogonality can fail.
        let deviation = b0.inner(&b1)?.norm();
        if deviation > tolerance::CONSTRUCTION {
            return Err(Error::InvalidBasis { deviation });
        }
        Ok(QubitBasis { vectors: [b0, b1] })
    }

    /// Validates raw amplitude pairs without renormalizing them first.
    pub fn from_amplitudes(b0: [super::C64; 2], b1: [super::C64; 2]) -> Result<Self> {
        let norm_dev = |b: &[super::C64; 2]| ((b[0].norm_sqr() + b[1].norm_sqr()).sqrt() - 1.0).abs();
        let deviation = norm_dev(&b0).max(norm_dev(&b1));
        if deviation > tolerance::CONSTRUCTION {
            return Err(Error::InvalidBasis { deviation });
        }
        Self::new(PureState::qubit(b0[0], b0[1])?, PureState::qubit(b1[0], b1[1])?)
    }

    pub fn vector(&self, outcome: usize) -> &PureState {
        &self.vectors[outcome]
    }

    fn projectors(&self) -> [CMatrix; 2] {
        [self.vectors[0].projector(), self.vectors[1].projector()]
    }
}

/// All branches (with nonnegligible probability) of measuring `register`.
pub fn measure_in_basis_exact(
    state: &PureState,
    register: usize,
    basis: &QubitBasis,
) -> Result<Vec<MeasurementResult>> {
    check_qubit(state, register)?;
    branches(state, &[register], &basis.projectors())
}

pub fn measure_in_basis_sampled<R: Rng + ?Sized>(
    state: &PureState,
    register: usize,
    basis: &QubitBasis,
    rng: &mut R,
) -> Result<MeasurementResult> {
    check_qubit(state, register)?;
    sample(branches(state, &[register], &basis.projectors())?, rng)
}

/// Projective measurement on a group of registers. The projectors must be
/// orthogonal idempotents summing to the identity.
pub fn measure_projective_exact(
    state: &PureState,
    registers: &[usize],
    projectors: &[CMatrix],
) -> Result<Vec<MeasurementResult>> {
    check_projectors(projectors)?;
    branches(state, registers, projectors)
}

pub fn measure_projective_sampled<R: Rng + ?Sized>(
    state: &PureState,
    registers: &[usize],
    projectors: &[CMatrix],
    rng: &mut R,
) -> Result<MeasurementResult> {
    check_projectors(projectors)?;
    sample(branches(state, registers, projectors)?, rng)
}

fn check_qubit(state: &PureState, register: usize) -> Result<()> {
    match state.dims().get(register) {
        None => Err(Error::InvalidRegister { index: register, count: state.dims().len() }),
        Some(2) => Ok(()),
        Some(&d) => Err(Error::DimensionMismatch { expected: 2, found: d }),
    }
}

fn check_projectors(projectors: &[CMatrix]) -> Result<()> {
    let n = projectors.first().map(|p| p.nrows()).unwrap_or(0);
    let mut sum = CMatrix::zeros(n, n);
    for p in projectors {
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.nrows() });
        }
        let idempotence = (p * p - p).norm();
        if idempotence > tolerance::HERMITIAN_INPUT {
            return Err(Error::InvalidBasis { deviation: idempotence });
        }
        sum += p;
    }
    let completeness = (sum - CMatrix::identity(n, n)).norm();
    if completeness > tolerance::HERMITIAN_INPUT {
        return Err(Error::InvalidBasis { deviation: completeness });
    }
    Ok(())
}

fn branches(state: &PureState, registers: &[usize], projectors: &[CMatrix]) -> Result<Vec<MeasurementResult>> {
    let mut out = Vec::with_capacity(projectors.len());
    for (outcome, p) in projectors.iter().enumerate() {
        let projected = state.apply_local(p, registers)?;
        let probability = projected.norm().powi(2);
        if probability > tolerance::NEGLIGIBLE_PROBABILITY {
            out.push(MeasurementResult { outcome, probability, post_state: projected.normalize()? });
        }
    }
    Ok(out)
}

fn sample<R: Rng + ?Sized>(branches: Vec<MeasurementResult>, rng: &mut R) -> Result<MeasurementResult> {
    let u: f64 = rng.random();
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    let mut acc = 0.0;
    let last = branches.len().saturating_sub(1);
    for (i, b) in branches.into_iter().enumerate() {
        acc += b.probability / total;
        if u < acc || i == last {
            return Ok(b);
        }
    }
    Err(Error::InvalidDensity("measurement produced no branches".into()))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{c, phase};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn phase_basis(phi: f64) -> QubitBasis {
        QubitBasis::new(
            PureState::qubit(c(1.0, 0.0), phase(phi)).unwrap(),
            PureState::qubit(c(1.0, 0.0), -phase(phi)).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_in_hadamard_basis_is_fair() {
        let res = measure_in_basis_exact(&PureState::basis(2, 0).unwrap(), 0, &phase_basis(0.0)).unwrap();
        assert_eq!(res.len(), 2);
        for b in &res {
            assert!((b.probability - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn measuring_half_of_bell_pair_steers_the_other_half() {
        let phi = 0.7;
        let bell = PureState::new(vec![2, 2], vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let res = measure_in_basis_exact(&bell, 1, &phase_basis(phi)).unwrap();
        let plus = &res[0];
        assert_eq!(plus.outcome, 0);
        assert!((plus.probability - 0.5).abs() < 1e-12);
        let kept = plus.post_state.partial_trace(&[0]).unwrap();
        let target = PureState::qubit(c(1.0, 0.0), phase(phi)).unwrap();
        assert!((kept.expectation(&target).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenstate_gives_certain_outcome() {
        let phi = 2.1;
        let s = PureState::qubit(c(1.0, 0.0), phase(phi)).unwrap();
        let res = measure_in_basis_exact(&s, 0, &phase_basis(phi)).unwrap();
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].outcome, 0);
        assert!((res[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let err = QubitBasis::new(PureState::basis(2, 0).unwrap(), PureState::qubit(c(1.0, 0.0), c(1.0, 0.0)).unwrap());
        assert!(matches!(err, Err(Error::InvalidBasis { .. })));
        let unnormalized = QubitBasis::from_amplitudes([c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(unnormalized, Err(Error::InvalidBasis { .. })));
    }

    #[test]
    fn measuring_qutrit_register_as_qubit_fails() {
        let s = PureState::basis(3, 1).unwrap();
        assert!(matches!(
            measure_in_basis_exact(&s, 0, &phase_basis(0.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn incomplete_projectors_rejected() {
        let s = PureState::basis(2, 0).unwrap();
        let p0 = PureState::basis(2, 0).unwrap().projector();
        assert!(measure_projective_exact(&s, &[0], &[p0]).is_err());
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let s = PureState::qubit(c(0.6, 0.0), c(0.8, 0.0)).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..32)
                .map(|_| measure_in_basis_sampled(&s, 0, &phase_basis(0.3), &mut rng).unwrap().outcome)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
    }

    proptest! {
        #[test]
        fn born_probabilities_sum_to_one(
            raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
            register in 0usize..3,
            phi in 0.0f64..6.3,
        ) {
            prop_assume!(raw.iter().any(|&(re, im)| re.abs() + im.abs() > 1e-3));
            let s = PureState::new(vec![2, 2, 2], raw.iter().map(|&(a, b)| c(a, b)).collect()).unwrap();
            let total: f64 = measure_in_basis_exact(&s, register, &phase_basis(phi)).unwrap()
                .iter().map(|b| b.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
