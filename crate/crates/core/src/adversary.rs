//! The impostor who holds `t` copies of the public key.
//!
//! Her copies `(|0⟩ + e^{iφ}|1⟩)^{⊗t}` live in the symmetric subspace, so they
//! are kept in the `(t+1)`-dimensional Hamming-weight basis
//! `|b_t(φ)⟩ = Σ_w √(C(t,w)/2ᵗ) e^{iwφ} |w⟩`. The map `|Sᵗ_w⟩ ↦ |w⟩` is
//! unitary and commutes with global rephasing, so nothing is lost.
//!
//! Her best attack answers Bob with the outcome of the Helstrom measurement
//! that separates the phase-averaged states
//! `ρ_± = avg_φ |±_φ⟩⟨±_φ| ⊗ |b_t(φ)⟩⟨b_t(φ)|`. Cheating and guessing are then
//! tied by `P_pass = (1 + P_succ)/2`.

use std::f64::consts::TAU;

use rand::Rng;

use crate::binomial::sqrt_binomial_weights;
use crate::keys::{public_key_state, PhaseFraction, PublicKeyElement};
use crate::protocol::{
    kernel_round, KernelOutcome, ProverTag, Prover, ResponseBit, ResponseBranch, Sampling,
};
use crate::qsim::{
    c, hermitian_eigen, measure_projective_exact, measure_projective_sampled, phase, trace_norm,
    CMatrix, DensityOperator, PureState,
};
use crate::transport::{RegisterHandle, Transport};
use crate::{seed, tolerance, Error, Result};

/// Largest `t` for which the `2(t+1)`-dimensional operators are built.
pub const MAX_ORACLE_COPIES: u64 = 64;

/// Eve's `t` key copies in the weight basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EveFrame {
    t: u64,
    state: PureState,
}

impl EveFrame {
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    /// `|b_t(φ)⟩`.
    pub fn with_phase(t: u64, phi: f64) -> Self {
        let amps = sqrt_binomial_weights(t)
            .into_iter()
            .enumerate()
            .map(|(w, a)| phase(w as f64 * phi) * a)
            .collect();
        let state = PureState::new(vec![t as usize + 1], amps).expect("binomial weights are normalized");
        EveFrame { t, state }
    }

    /// Weight-basis image of `t` copies of `element`: the amplitude on `|w⟩`
    /// is `√C(t,w) · a₀^{t−w} · a₁^w`.
    pub fn from_copies(element: &PublicKeyElement, t: u64) -> Self {
        let a0 = element.state().amplitude(0);
        let a1 = element.state().amplitude(1);
        let amps = sqrt_binomial_weights(t)
            .into_iter()
            .enumerate()
            .map(|(w, weight)| {
                // weight already carries |a₀|^{t−w}|a₁|^w = 2^{−t/2}; keep only the phases.
                (a0 / a0.norm()).powu((t as usize - w) as u32) * (a1 / a1.norm()).powu(w as u32) * weight
            })
            .collect();
        let state = PureState::new(vec![t as usize + 1], amps).expect("binomial weights are normalized");
        EveFrame { t, state }
    }
}

/// The frame at phase zero: amplitudes `√(C(t,w)/2ᵗ)`.
pub fn binomial_frame(t: u64) -> EveFrame {
    EveFrame::with_phase(t, 0.0)
}

/// `P_succ(t) = 1/2 + (1/2)(1/2ᵗ) Σ_{m=0}^{t−1} √(C(t,m) C(t,m+1))`.
pub fn psucc_formula(t: u64) -> f64 {
    0.5 + 0.5 * overlap_sum(t)
}

/// `(1/2ᵗ) Σ_{m=0}^{t−1} √(C(t,m) C(t,m+1))`, formed from log-space weights.
pub fn overlap_sum(t: u64) -> f64 {
    let a = sqrt_binomial_weights(t);
    a.windows(2).map(|w| w[0] * w[1]).sum()
}

/// Right-hand side of Cheung's inequality on [`overlap_sum`]:
/// `1 − 1/(2(t+1)) − 1/2^{t+1}`.
pub fn cheung_sum_rhs(t: u64) -> f64 {
    let t = t as f64;
    1.0 - 1.0 / (2.0 * (t + 1.0)) - 0.5f64.powf(t + 1.0)
}

/// Guessing-probability bound implied by Cheung's inequality: `1 − 1/(4(t+1))`.
pub fn cheung_bound(t: u64) -> f64 {
    1.0 - 1.0 / (4.0 * (t as f64 + 1.0))
}

/// Per-round pass bound `1 − 1/(8(t+1))`.
pub fn p_pass_bound(t: u64) -> f64 {
    1.0 - 1.0 / (8.0 * (t as f64 + 1.0))
}

/// Probability bound that an impostor with `t` copies passes all `s` rounds
/// of one session: `(1 − 1/(8(t+1)))^s`.
pub fn fool_first_attempt_bound(t: u64, s: u64) -> f64 {
    p_pass_bound(t).powf(s as f64)
}

/// Phase-averaged states Eve must tell apart, on `challenge ⊗ frame`.
#[derive(Debug, Clone)]
pub struct DiscriminationPair {
    t: u64,
    pub rho_plus: DensityOperator,
    pub rho_minus: DensityOperator,
}

impl DiscriminationPair {
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn difference(&self) -> CMatrix {
        self.rho_plus.matrix() - self.rho_minus.matrix()
    }
}

/// Grid size used by [`build_discrimination_pair`]. Entries are trigonometric
/// polynomials of degree at most `t + 1`, so any grid with more points averages
/// them exactly.
pub fn pair_grid(t: u64) -> u64 {
    2 * t + 5
}

pub fn build_discrimination_pair(t: u64) -> Result<DiscriminationPair> {
    build_discrimination_pair_on_grid(t, pair_grid(t))
}

/// `ρ_± = (1/p) Σ_k |χ_±(φ_k)⟩⟨χ_±(φ_k)|` with `φ_k = 2πk/p`.
pub fn build_discrimination_pair_on_grid(t: u64, p: u64) -> Result<DiscriminationPair> {
    if t > MAX_ORACLE_COPIES {
        return Err(Error::InvalidParams(format!("t = {t} exceeds {MAX_ORACLE_COPIES}")));
    }
    if p <= t + 1 {
        return Err(Error::InvalidParams(format!("grid of {p} points cannot average degree {}", t + 1)));
    }
    let dim = 2 * (t as usize + 1);
    let mut plus = CMatrix::zeros(dim, dim);
    let mut minus = CMatrix::zeros(dim, dim);
    for k in 1..=p {
        let phi = TAU * k as f64 / p as f64;
        let frame = EveFrame::with_phase(t, phi);
        for (sign, acc) in [(1.0, &mut plus), (-1.0, &mut minus)] {
            let qubit = PureState::qubit(c(1.0, 0.0), phase(phi) * sign)?;
            *acc += qubit.tensor(frame.state()).projector();
        }
    }
    let scale = c(1.0 / p as f64, 0.0);
    let dims = vec![2, t as usize + 1];
    Ok(DiscriminationPair {
        t,
        rho_plus: DensityOperator::new(dims.clone(), plus * scale)?,
        rho_minus: DensityOperator::new(dims, minus * scale)?,
    })
}

/// `1/2 + (1/4)‖ρ_+ − ρ_−‖₁`, the optimal equal-prior guessing probability.
pub fn helstrom_psucc_oracle(t: u64) -> Result<f64> {
    let pair = build_discrimination_pair(t)?;
    Ok(0.5 + 0.25 * trace_norm(&pair.difference())?)
}

/// Eve's binary measurement `{Π₊, 1 − Π₊}` on `challenge ⊗ frame`.
#[derive(Debug, Clone)]
pub struct HelstromStrategy {
    t: u64,
    projector_plus: CMatrix,
    psucc: f64,
}

impl HelstromStrategy {
    /// Π₊ projects onto the nonnegative eigenspace of `ρ_+ − ρ_−`; zero
    /// eigenvalues go to "+".
    pub fn from_pair(pair: &DiscriminationPair) -> Result<Self> {
        let eig = hermitian_eigen(&pair.difference())?;
        let projector_plus = eig.spectral_projector(|l| l > -tolerance::CONSTRUCTION);
        let succ_plus = (pair.rho_plus.matrix() * &projector_plus).trace().re;
        let minus_proj = CMatrix::identity(projector_plus.nrows(), projector_plus.ncols()) - &projector_plus;
        let succ_minus = (pair.rho_minus.matrix() * &minus_proj).trace().re;
        Ok(HelstromStrategy { t: pair.t, projector_plus, psucc: 0.5 * (succ_plus + succ_minus) })
    }

    pub fn optimal(t: u64) -> Result<Self> {
        Self::from_pair(&build_discrimination_pair(t)?)
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn psucc(&self) -> f64 {
        self.psucc
    }

    pub fn projector_plus(&self) -> &CMatrix {
        &self.projector_plus
    }

    pub fn projectors(&self) -> [CMatrix; 2] {
        let n = self.projector_plus.nrows();
        [self.projector_plus.clone(), CMatrix::identity(n, n) - &self.projector_plus]
    }
}

/// An impostor prover: she appends her frame after Bob's two registers,
/// measures `received ⊗ frame` with the Helstrom projectors and reports the
/// outcome as her bit.
#[derive(Debug, Clone)]
pub struct Impostor {
    strategy: HelstromStrategy,
    /// The key element she holds copies of, per round.
    copies: Vec<PublicKeyElement>,
}

impl Impostor {
    pub fn new(strategy: HelstromStrategy, copies: Vec<PublicKeyElement>) -> Self {
        Impostor { strategy, copies }
    }
}

impl Prover for Impostor {
    fn tag(&self) -> ProverTag {
        ProverTag::Adversary
    }

    fn copies_held(&self) -> Option<u64> {
        Some(self.strategy.t)
    }

    fn respond(
        &mut self,
        round: usize,
        joint: PureState,
        received: RegisterHandle,
        sampling: &mut Sampling<'_>,
    ) -> Result<Vec<ResponseBranch>> {
        let element = self
            .copies
            .get(round)
            .ok_or_else(|| Error::InvalidParams(format!("impostor holds no copies for round {round}")))?;
        let frame = EveFrame::from_copies(element, self.strategy.t);
        let frame_register = joint.dims().len();
        let full = joint.tensor(frame.state());
        let registers = [received.register(), frame_register];
        let projectors = self.strategy.projectors();
        let results = match sampling {
            Sampling::Exact => measure_projective_exact(&full, &registers, &projectors)?,
            Sampling::Sampled(rng) => {
                let mut m = measure_projective_sampled(&full, &registers, &projectors, rng)?;
                m.probability = 1.0;
                vec![m]
            }
        };
        Ok(results
            .into_iter()
            .map(|m| ResponseBranch {
                response: ResponseBit::from_outcome(m.outcome),
                probability: m.probability,
                joint_state: m.post_state,
            })
            .collect())
    }
}

/// Result of simulating one kernel round with the impostor as prover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheatGuessReport {
    pub t: u64,
    pub p_pass_exact: f64,
    pub psucc_strategy: f64,
}

/// Grid for averaging a whole attack round. Pass probabilities are
/// trigonometric polynomials of degree at most `2t + 4`.
pub fn attack_grid(t: u64) -> u64 {
    4 * (t + 3)
}

/// Exact pass probability of one impostor round, averaged over the private
/// phase on a grid of `4(t+3)` points.
pub fn eve_attack_round(t: u64, strategy: &HelstromStrategy) -> Result<CheatGuessReport> {
    check_strategy(t, strategy)?;
    let p = attack_grid(t);
    let mut total = 0.0;
    for k in 1..=p {
        let pk = public_key_state(&PhaseFraction::new(k, p)?);
        let mut eve = Impostor::new(strategy.clone(), vec![pk.clone()]);
        let mut transport = Transport::new();
        match kernel_round(&mut eve, 0, &pk, &mut transport, &mut Sampling::Exact)? {
            KernelOutcome::Exact { pass_probability, .. } => total += pass_probability,
            KernelOutcome::Sampled { .. } => unreachable!("exact sampling yields exact outcomes"),
        }
    }
    Ok(CheatGuessReport { t, p_pass_exact: total / p as f64, psucc_strategy: strategy.psucc })
}

/// Monte Carlo counterpart of [`eve_attack_round`]: each trial draws a private
/// phase from the attack grid, then samples Eve's measurement and Bob's SWAP
/// test. Returns the number of passing trials.
pub fn sample_attack_rounds(t: u64, strategy: &HelstromStrategy, trials: u64, seed: u64) -> Result<u64> {
    check_strategy(t, strategy)?;
    let p = attack_grid(t);
    let mut rng = seed::rng(seed);
    let mut transport = Transport::new();
    let mut passes = 0;
    for _ in 0..trials {
        let pk = public_key_state(&PhaseFraction::new(rng.random_range(1..=p), p)?);
        let mut eve = Impostor::new(strategy.clone(), vec![pk.clone()]);
        let outcome = kernel_round(&mut eve, 0, &pk, &mut transport, &mut Sampling::Sampled(&mut rng))?;
        if outcome.passed() {
            passes += 1;
        }
    }
    Ok(passes)
}

fn check_strategy(t: u64, strategy: &HelstromStrategy) -> Result<()> {
    if strategy.t != t {
        return Err(Error::DimensionMismatch {
            expected: 2 * (t as usize + 1),
            found: strategy.projector_plus.nrows(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::binomial;
    use crate::keys::PrivateKey;
    use crate::protocol::{run_session, Mode, Verdict};
    use crate::keys::{ProtocolParams, Variant};

    /// `1/2 + (1/2)·2^{-t}·Σ √(C(t,m)C(t,m+1))` evaluated directly.
    fn psucc_direct(t: u64) -> f64 {
        let s: f64 = (0..t).map(|m| (binomial(t, m) * binomial(t, m + 1)).sqrt()).sum();
        0.5 + 0.5 * s / 2f64.powi(t as i32)
    }

    #[test]
    fn frame_examples() {
        assert_eq!(binomial_frame(0).state().dims(), &[1]);
        assert!((binomial_frame(0).state().amplitude(0) - c(1.0, 0.0)).norm() < 1e-12);
        let f1 = binomial_frame(1);
        for w in 0..2 {
            assert!((f1.state().amplitude(w) - c(0.5f64.sqrt(), 0.0)).norm() < 1e-12);
        }
        let f2 = binomial_frame(2);
        for (w, e) in [0.5, 0.5f64.sqrt(), 0.5].iter().enumerate() {
            assert!((f2.state().amplitude(w) - c(*e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn frame_from_copies_matches_symmetric_projection() {
        // Project t qubit copies onto |S_w⟩ directly and compare.
        use crate::keys::SymmetricBasisState;
        for (k, p) in [(1u64, 3u64), (2, 5), (4, 7)] {
            let element = public_key_state(&PhaseFraction::new(k, p).unwrap());
            for t in 1..=5u64 {
                let mut copies = element.state().clone();
                for _ in 1..t {
                    copies = copies.tensor(element.state());
                }
                let frame = EveFrame::from_copies(&element, t);
                for w in 0..=t as usize {
                    let sym = SymmetricBasisState::new(t as usize, w).unwrap();
                    let amp = sym.state().inner(&copies).unwrap();
                    assert!((amp - frame.state().amplitude(w)).norm() < 1e-12);
                }
                let phi = TAU * k as f64 / p as f64;
                assert!(frame.state().equals_up_to_phase(EveFrame::with_phase(t, phi).state(), 1e-12));
            }
        }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(psucc_formula(0), 0.5);
        assert!((psucc_formula(1) - 0.75).abs() < 1e-12);
        assert!((psucc_formula(2) - (0.5 + 2.0 * 2f64.sqrt() / 8.0)).abs() < 1e-12);
        assert!((psucc_formula(3) - (0.5 + (3.0 + 2.0 * 3f64.sqrt()) / 16.0)).abs() < 1e-12);
        assert!((psucc_formula(3) - 0.904_006_350_946_109_7).abs() < 1e-12);
        for t in 0..=64 {
            assert!((psucc_formula(t) - psucc_direct(t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn cheung_examples() {
        assert!((overlap_sum(1) - 0.5).abs() < 1e-15);
        assert!((cheung_sum_rhs(1) - 0.5).abs() < 1e-15);
        assert!((overlap_sum(2) - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((cheung_sum_rhs(2) - (1.0 - 1.0 / 6.0 - 0.125)).abs() < 1e-15);
        assert!(overlap_sum(2) <= cheung_sum_rhs(2));
        assert_eq!(cheung_bound(1), 0.875);
        assert!(cheung_bound(1) >= psucc_formula(1));
    }

    #[test]
    fn fool_bound_examples() {
        assert_eq!(fool_first_attempt_bound(1, 1), 0.9375);
        assert!((fool_first_attempt_bound(1, 16) - 0.9375f64.powi(16)).abs() < 1e-15);
        assert!((fool_first_attempt_bound(1, 16) - 0.356_074).abs() < 1e-6);
        let mut prev = 1.0;
        for s in 1..200 {
            let b = fool_first_attempt_bound(3, s);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn pair_is_normalized_and_phase_selective() {
        for t in 0..=5u64 {
            let pair = build_discrimination_pair(t).unwrap();
            assert!((pair.rho_plus.trace() - c(1.0, 0.0)).norm() < 1e-12);
            assert!((pair.rho_minus.trace() - c(1.0, 0.0)).norm() < 1e-12);
            // Index (a, w) ↦ a·(t+1) + w carries excitation number a + w.
            let n = t as usize + 1;
            for i in 0..2 * n {
                for j in 0..2 * n {
                    let number = |idx: usize| idx / n + idx % n;
                    if number(i) != number(j) {
                        assert!(pair.rho_plus.matrix()[(i, j)].norm() < 1e-12);
                        assert!(pair.rho_minus.matrix()[(i, j)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn no_copies_means_no_information() {
        let pair = build_discrimination_pair(0).unwrap();
        let half = DensityOperator::maximally_mixed(2);
        assert!(pair.rho_plus.max_entry_deviation(&half) < 1e-12);
        assert!(pair.rho_minus.max_entry_deviation(&half) < 1e-12);
        assert!((helstrom_psucc_oracle(0).unwrap() - 0.5).abs() < 1e-12);
        assert!((psucc_formula(0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grid_choice_does_not_matter() {
        for t in 0..=6u64 {
            let a = build_discrimination_pair_on_grid(t, 2 * t + 5).unwrap();
            let b = build_discrimination_pair_on_grid(t, 4 * t + 9).unwrap();
            assert!(a.rho_plus.max_entry_deviation(&b.rho_plus) < 1e-12);
            assert!(a.rho_minus.max_entry_deviation(&b.rho_minus) < 1e-12);
        }
        assert!(build_discrimination_pair_on_grid(3, 4).is_err());
    }

    #[test]
    fn strategy_is_a_projector_and_optimal() {
        for t in 1..=6u64 {
            let s = HelstromStrategy::optimal(t).unwrap();
            let p = s.projector_plus();
            assert!((p * p - p).norm() < 1e-10);
            assert!((0.5..=1.0).contains(&s.psucc()));
            assert!((s.psucc() - helstrom_psucc_oracle(t).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_matches_formula() {
        for t in 1..=8u64 {
            let oracle = helstrom_psucc_oracle(t).unwrap();
            assert!((oracle - psucc_formula(t)).abs() < 1e-9, "t={t}: {oracle} vs {}", psucc_formula(t));
        }
    }

    #[test]
    fn attack_round_examples() {
        let s1 = HelstromStrategy::optimal(1).unwrap();
        let r1 = eve_attack_round(1, &s1).unwrap();
        assert!((r1.p_pass_exact - 0.875).abs() < 1e-9);
        let s2 = HelstromStrategy::optimal(2).unwrap();
        let r2 = eve_attack_round(2, &s2).unwrap();
        assert!((r2.p_pass_exact - (1.0 + psucc_formula(2)) / 2.0).abs() < 1e-9);
        assert!((r2.p_pass_exact - 0.926_776_695_3).abs() < 1e-9);
        assert!(matches!(eve_attack_round(3, &s2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cheat_guess_identity_for_suboptimal_strategies() {
        // The identity holds for any binary measurement, not only the optimal one.
        for t in 1..=3u64 {
            let pair = build_discrimination_pair(t).unwrap();
            let n = 2 * (t as usize + 1);
            // Π₊ = projector onto |challenge = 0⟩ ⊗ anything, a poor but valid guess.
            let mut proj = CMatrix::zeros(n, n);
            for i in 0..n / 2 {
                proj[(i, i)] = c(1.0, 0.0);
            }
            let minus = CMatrix::identity(n, n) - &proj;
            let psucc = 0.5 * ((pair.rho_plus.matrix() * &proj).trace().re
                + (pair.rho_minus.matrix() * &minus).trace().re);
            let strategy = HelstromStrategy { t, projector_plus: proj, psucc };
            let report = eve_attack_round(t, &strategy).unwrap();
            assert!((report.p_pass_exact - (1.0 + psucc) / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn impostor_session_pass_probability_is_phase_independent() {
        let t = 2;
        let strategy = HelstromStrategy::optimal(t).unwrap();
        let params = ProtocolParams::new(4, 5, Variant::Standard).unwrap();
        let key = PrivateKey::from_indices(5, &[1, 2, 3, 4, 5]).unwrap();
        let mut eve = Impostor::new(strategy, key.public_key_copy());
        let tr = run_session(&params, &key, &mut eve, Mode::Exact, 0, 0).unwrap();
        assert_eq!(tr.verdict, Verdict::Reject);
        assert_eq!(tr.copies_held, Some(2));
        let expected = (1.0 + psucc_formula(t)) / 2.0;
        for r in &tr.rounds {
            assert!((r.outcome.pass_probability().unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn sampled_attack_is_deterministic() {
        let s = HelstromStrategy::optimal(1).unwrap();
        let a = sample_attack_rounds(1, &s, 500, 3).unwrap();
        assert_eq!(a, sample_attack_rounds(1, &s, 500, 3).unwrap());
        // 500 trials at p = 0.875: σ ≈ 7.4.
        assert!((a as f64 - 437.5).abs() < 4.0 * 7.4);
    }
}
