//! The identification kernel and `s`-round sessions.
//!
//! One kernel round:
//! 1. Bob prepares `(|01⟩+|10⟩)/√2`, keeps register 0 and sends register 1.
//! 2. The prover measures the received register. Honest Alice uses the basis
//!    `{|0⟩ ± e^{iφ}|1⟩}` for her private phase and answers 0 for "+", 1 for "−".
//! 3. On a 1 Bob applies `Z` to his register, then SWAP-tests it against his
//!    authentic public-key element for this round.
//!
//! Bob accepts a session only if every SWAP test passed. All `s` rounds are
//! always run so transcripts have a fixed shape.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::keys::{public_key_state, PhaseFraction, PrivateKey, ProtocolParams, PublicKeyElement};
use crate::numfmt::{round_significant, JSON_DIGITS};
use crate::qsim::{
    c, gates, measure_in_basis_exact, measure_in_basis_sampled, swap_test_pass_probability_mixed,
    DensityOperator, MeasurementResult, PureState, QubitBasis,
};
use crate::transport::{Message, RegisterHandle, Role, Transport};
use crate::{seed, tolerance, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "sampled" => Ok(Mode::Sampled),
            other => Err(Error::InvalidParams(format!("unknown mode {other:?}"))),
        }
    }
}

/// Exact mode follows every measurement branch; sampled mode draws one.
pub enum Sampling<'a> {
    Exact,
    Sampled(&'a mut dyn RngCore),
}

impl Sampling<'_> {
    pub fn mode(&self) -> Mode {
        match self {
            Sampling::Exact => Mode::Exact,
            Sampling::Sampled(_) => Mode::Sampled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResponseBit {
    Zero,
    One,
}

impl ResponseBit {
    pub fn from_outcome(outcome: usize) -> Self {
        if outcome == 0 {
            ResponseBit::Zero
        } else {
            ResponseBit::One
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            ResponseBit::Zero => 0,
            ResponseBit::One => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProverTag {
    Honest,
    Adversary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Bob's entangled challenge for one round.
#[derive(Debug, Clone)]
pub struct KernelChallenge {
    pub joint_state: PureState,
    pub kept_register: usize,
    pub sent_register: usize,
}

pub fn bob_prepare_challenge() -> KernelChallenge {
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    KernelChallenge {
        joint_state: PureState::new(vec![2, 2], vec![zero, one, one, zero]).expect("fixed state"),
        kept_register: 0,
        sent_register: 1,
    }
}

/// `{|0⟩ + e^{iφ}|1⟩, |0⟩ − e^{iφ}|1⟩}`, normalized.
pub fn phase_basis(x: &PhaseFraction) -> QubitBasis {
    let u = x.unit();
    QubitBasis::new(
        PureState::qubit(c(1.0, 0.0), u).expect("unit amplitudes"),
        PureState::qubit(c(1.0, 0.0), -u).expect("unit amplitudes"),
    )
    .expect("phase basis is orthonormal")
}

/// A prover's answer in one measurement branch. `joint_state` is the whole
/// post-measurement state with Bob's kept register at index 0.
#[derive(Debug, Clone)]
pub struct ResponseBranch {
    pub response: ResponseBit,
    pub probability: f64,
    pub joint_state: PureState,
}

fn branches_from(results: Vec<MeasurementResult>) -> Vec<ResponseBranch> {
    results
        .into_iter()
        .map(|m| ResponseBranch {
            response: ResponseBit::from_outcome(m.outcome),
            probability: m.probability,
            joint_state: m.post_state,
        })
        .collect()
}

/// Honest Alice's step: measure the received register in the phase basis of `x`.
pub fn alice_respond(
    joint: &PureState,
    received: RegisterHandle,
    x: &PhaseFraction,
    sampling: &mut Sampling<'_>,
) -> Result<Vec<ResponseBranch>> {
    let basis = phase_basis(x);
    let register = received.register();
    let results = match sampling {
        Sampling::Exact => measure_in_basis_exact(joint, register, &basis)?,
        Sampling::Sampled(rng) => {
            let mut m = measure_in_basis_sampled(joint, register, &basis, rng)?;
            m.probability = 1.0;
            vec![m]
        }
    };
    Ok(branches_from(results))
}

/// Bob's step for one branch: conditional `Z` on the kept register, then the
/// SWAP-test pass probability against `pk`.
pub fn bob_verify_step(
    joint: &PureState,
    kept_register: usize,
    response: ResponseBit,
    pk: &PublicKeyElement,
) -> Result<f64> {
    let corrected = match response {
        ResponseBit::Zero => joint.clone(),
        ResponseBit::One => joint.apply_gate(&gates::pauli_z(), &[kept_register])?,
    };
    let kept = corrected.partial_trace(&[kept_register])?;
    swap_test_pass_probability_mixed(&kept, &DensityOperator::from_pure(pk.state()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelOutcome {
    Exact { pass_probability: f64, response_zero_probability: f64 },
    Sampled { response: ResponseBit, passed: bool },
}

impl KernelOutcome {
    pub fn passed(&self) -> bool {
        match *self {
            KernelOutcome::Exact { pass_probability, .. } => {
                pass_probability >= 1.0 - tolerance::CONSTRUCTION
            }
            KernelOutcome::Sampled { passed, .. } => passed,
        }
    }

    pub fn pass_probability(&self) -> Option<f64> {
        match *self {
            KernelOutcome::Exact { pass_probability, .. } => Some(pass_probability),
            KernelOutcome::Sampled { .. } => None,
        }
    }
}

/// Anyone who can answer Bob's challenge.
pub trait Prover {
    fn tag(&self) -> ProverTag;

    /// Public-key copies held, for adversaries.
    fn copies_held(&self) -> Option<u64> {
        None
    }

    /// Called once before a session's first round.
    fn begin_session(&mut self) -> Result<()> {
        Ok(())
    }

    /// Answers round `round` (0-based). The prover may append private
    /// registers after Bob's two; register 0 must stay Bob's.
    fn respond(
        &mut self,
        round: usize,
        joint: PureState,
        received: RegisterHandle,
        sampling: &mut Sampling<'_>,
    ) -> Result<Vec<ResponseBranch>>;
}

/// Remaining sessions an honest prover will take part in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UsageCounter {
    limit: u64,
    remaining: u64,
}

impl UsageCounter {
    pub fn new(r: u64) -> Self {
        UsageCounter { limit: r, remaining: r }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn consume(&mut self) -> Result<()> {
        if self.remaining == 0 {
            return Err(Error::UsageExhausted { uses: self.limit as usize });
        }
        self.remaining -= 1;
        Ok(())
    }
}

/// Honest prover holding the private key.
#[derive(Debug, Clone)]
pub struct Alice {
    key: PrivateKey,
    usage: UsageCounter,
}

impl Alice {
    pub fn new(key: PrivateKey, params: &ProtocolParams) -> Self {
        Alice { key, usage: UsageCounter::new(params.r()) }
    }

    pub fn usage(&self) -> UsageCounter {
        self.usage
    }
}

impl Prover for Alice {
    fn tag(&self) -> ProverTag {
        ProverTag::Honest
    }

    fn begin_session(&mut self) -> Result<()> {
        self.usage.consume()
    }

    fn respond(
        &mut self,
        round: usize,
        joint: PureState,
        received: RegisterHandle,
        sampling: &mut Sampling<'_>,
    ) -> Result<Vec<ResponseBranch>> {
        let x = self
            .key
            .phases()
            .get(round)
            .ok_or_else(|| Error::InvalidParams(format!("round {round} beyond key length")))?;
        alice_respond(&joint, received, x, sampling)
    }
}

/// Runs one kernel round against Bob's public-key element `pk`.
pub fn kernel_round(
    prover: &mut dyn Prover,
    round: usize,
    pk: &PublicKeyElement,
    transport: &mut Transport,
    sampling: &mut Sampling<'_>,
) -> Result<KernelOutcome> {
    let challenge = bob_prepare_challenge();
    let handle = transport.issue_handle(challenge.sent_register);
    transport.send(Role::Prover, Message::Register(handle))?;

    let received = transport.recv_register(Role::Prover)?;
    let branches = prover.respond(round, challenge.joint_state, received, sampling)?;
    for b in &branches {
        transport.send(Role::Verifier, Message::Bit(b.response))?;
    }

    let mut pass = 0.0;
    let mut zero = 0.0;
    let mut last = None;
    for b in &branches {
        let bit = transport.recv_bit(Role::Verifier)?;
        let p = bob_verify_step(&b.joint_state, challenge.kept_register, bit, pk)?;
        pass += b.probability * p;
        if bit == ResponseBit::Zero {
            zero += b.probability;
        }
        last = Some((bit, p));
    }

    match sampling {
        Sampling::Exact => Ok(KernelOutcome::Exact {
            pass_probability: pass,
            response_zero_probability: zero,
        }),
        Sampling::Sampled(rng) => {
            let (response, p) = last.ok_or_else(|| Error::Numerical("prover returned no branch".into()))?;
            let u: f64 = rng.random();
            Ok(KernelOutcome::Sampled { response, passed: u < p })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based round index.
    pub j: usize,
    pub outcome: KernelOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionTranscript {
    pub session_id: u64,
    pub params: ProtocolParams,
    pub mode: Mode,
    pub seed: u64,
    pub prover_tag: ProverTag,
    pub copies_held: Option<u64>,
    pub rounds: Vec<RoundRecord>,
    pub verdict: Verdict,
}

impl SessionTranscript {
    /// Product of per-round pass probabilities (exact mode only).
    pub fn accept_probability(&self) -> Option<f64> {
        self.rounds.iter().map(|r| r.outcome.pass_probability()).product()
    }

    /// Header line, one line per round, then the verdict line.
    pub fn to_json_lines(&self) -> String {
        let round = |x: f64| round_significant(x, JSON_DIGITS);
        let mut lines = Vec::with_capacity(self.rounds.len() + 2);
        lines.push(to_json(&HeaderLine {
            session_id: self.session_id,
            r: self.params.r(),
            s: self.params.s(),
            p: self.params.p(),
            variant: self.params.variant().as_str(),
            mode: self.mode,
            seed: self.seed,
            prover_tag: self.prover_tag,
            t: self.copies_held,
        }));
        for rec in &self.rounds {
            let line = match rec.outcome {
                KernelOutcome::Exact { pass_probability, response_zero_probability } => RoundLine {
                    j: rec.j,
                    response_bit: None,
                    p_response_zero: Some(round(response_zero_probability)),
                    pass: None,
                    pass_probability: Some(round(pass_probability)),
                },
                KernelOutcome::Sampled { response, passed } => RoundLine {
                    j: rec.j,
                    response_bit: Some(response.as_u8()),
                    p_response_zero: None,
                    pass: Some(passed),
                    pass_probability: None,
                },
            };
            lines.push(to_json(&line));
        }
        lines.push(to_json(&VerdictLine {
            verdict: self.verdict,
            accept_probability: self.accept_probability().map(round),
        }));
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

#[derive(Serialize)]
struct HeaderLine {
    session_id: u64,
    r: u64,
    s: u64,
    p: u64,
    variant: &'static str,
    mode: Mode,
    seed: u64,
    prover_tag: ProverTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<u64>,
}

#[derive(Serialize)]
struct RoundLine {
    j: usize,
    response_bit: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_response_zero: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass_probability: Option<f64>,
}

#[derive(Serialize)]
struct VerdictLine {
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    accept_probability: Option<f64>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("transcript records serialize")
}

/// Runs `s` kernel rounds; round `j` uses `x_j` and the `j`-th public-key
/// subsystem. Randomness comes from a single stream seeded with `seed`.
pub fn run_session(
    params: &ProtocolParams,
    key: &PrivateKey,
    prover: &mut dyn Prover,
    mode: Mode,
    seed: u64,
    session_id: u64,
) -> Result<SessionTranscript> {
    if key.len() as u64 != params.s() || key.p() != params.p() {
        return Err(Error::InvalidParams(format!(
            "key has {} entries mod {}, parameters need {} mod {}",
            key.len(),
            key.p(),
            params.s(),
            params.p()
        )));
    }
    prover.begin_session()?;

    let mut rng = seed::rng(seed);
    let mut transport = Transport::new();
    let mut rounds = Vec::with_capacity(key.len());
    for (j, x) in key.phases().iter().enumerate() {
        let pk = public_key_state(x);
        let mut sampling = match mode {
            Mode::Exact => Sampling::Exact,
            Mode::Sampled => Sampling::Sampled(&mut rng),
        };
        let outcome = kernel_round(prover, j, &pk, &mut transport, &mut sampling)?;
        rounds.push(RoundRecord { j: j + 1, outcome });
    }
    let verdict = if rounds.iter().all(|r| r.outcome.passed()) { Verdict::Accept } else { Verdict::Reject };
    Ok(SessionTranscript {
        session_id,
        params: *params,
        mode,
        seed,
        prover_tag: prover.tag(),
        copies_held: prover.copies_held(),
        rounds,
        verdict,
    })
}
