//! Private keys, public-key states and the phase-averaging identities.
//!
//! A private key is a tuple of `s` phases `2πkⱼ/p` with each `kⱼ` drawn
//! uniformly from `{1, …, p}`. Phases stay exact integer pairs until a state
//! is built. The standard scheme uses `p = r + 1`; the hardened variant
//! (secure when the adversary may also act as an honest verifier) uses
//! `p = 2r + 1` and changes nothing else.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::binomial::binomial;
use crate::qsim::{c, phase, CMatrix, DensityOperator, PureState, C64};
use crate::{seed, tolerance, Error, Result};

/// Largest register count for which 2ⁿ × 2ⁿ operators are built.
pub const MAX_OPERATOR_QUBITS: usize = 10;
/// Largest register count for which symmetric basis vectors are enumerated.
pub const MAX_STATE_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Standard,
    Hardened,
}

impl Variant {
    pub fn phase_modulus(self, r: u64) -> u64 {
        match self {
            Variant::Standard => r + 1,
            Variant::Hardened => 2 * r + 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Hardened => "hardened",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "hardened" => Ok(Variant::Hardened),
            other => Err(Error::InvalidParams(format!("unknown variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reusability `r`, security parameter `s` and variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolParams {
    r: u64,
    s: u64,
    variant: Variant,
}

impl ProtocolParams {
    pub fn new(r: u64, s: u64, variant: Variant) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParams("reusability r must be at least 1".into()));
        }
        if s == 0 {
            return Err(Error::InvalidParams("security parameter s must be at least 1".into()));
        }
        Ok(ProtocolParams { r, s, variant })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Number of distinct phases, `p ≥ 2`.
    pub fn p(&self) -> u64 {
        self.variant.phase_modulus(self.r)
    }
}

/// The angle `2πk/p`, held exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseFraction {
    k: u64,
    p: u64,
}

impl PhaseFraction {
    pub fn new(k: u64, p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParams(format!("phase modulus {p} < 2")));
        }
        if k == 0 || k > p {
            return Err(Error::InvalidParams(format!("phase index {k} outside 1..={p}")));
        }
        Ok(PhaseFraction { k, p })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn angle(&self) -> f64 {
        TAU * (self.k % self.p) as f64 / self.p as f64
    }

    /// `e^{iφ}`.
    pub fn unit(&self) -> C64 {
        phase(self.angle())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKey {
    xs: Vec<PhaseFraction>,
}

impl PrivateKey {
    pub fn from_indices(p: u64, ks: &[u64]) -> Result<Self> {
        if ks.is_empty() {
            return Err(Error::InvalidParams("private key must have at least one entry".into()));
        }
        let xs = ks.iter().map(|&k| PhaseFraction::new(k, p)).collect::<Result<_>>()?;
        Ok(PrivateKey { xs })
    }

    pub fn phases(&self) -> &[PhaseFraction] {
        &self.xs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn p(&self) -> u64 {
        self.xs[0].p
    }

    pub fn indices(&self) -> Vec<u64> {
        self.xs.iter().map(|x| x.k).collect()
    }

    /// One copy of the public key, `⊗ⱼ |ψ(xⱼ)⟩`, kept as separate subsystems.
    pub fn public_key_copy(&self) -> Vec<PublicKeyElement> {
        self.xs.iter().map(public_key_state).collect()
    }
}

pub fn generate_private_key(params: &ProtocolParams, seed: u64) -> PrivateKey {
    let mut rng = seed::rng(seed);
    let p = params.p();
    let xs = (0..params.s())
        .map(|_| PhaseFraction { k: rng.random_range(1..=p), p })
        .collect();
    PrivateKey { xs }
}

/// `(|0⟩ + e^{2πik/p}|1⟩)/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicKeyElement {
    state: PureState,
}

impl PublicKeyElement {
    pub fn state(&self) -> &PureState {
        &self.state
    }
}

pub fn public_key_state(x: &PhaseFraction) -> PublicKeyElement {
    let state = PureState::qubit(c(1.0, 0.0), x.unit()).expect("unit-modulus amplitudes");
    PublicKeyElement { state }
}

/// Normalized uniform superposition of the `n`-bit labels of Hamming weight `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBasisState {
    n: usize,
    w: usize,
    state: PureState,
}

impl SymmetricBasisState {
    pub fn new(n: usize, w: usize) -> Result<Self> {
        if n == 0 || n > MAX_STATE_QUBITS {
            return Err(Error::InvalidParams(format!("symmetric state on {n} qubits")));
        }
        if w > n {
            return Err(Error::InvalidParams(format!("weight {w} exceeds {n}")));
        }
        let amps = (0..1usize << n)
            .map(|i| if i.count_ones() as usize == w { c(1.0, 0.0) } else { c(0.0, 0.0) })
            .collect();
        let state = PureState::new(vec![2; n], amps)?;
        Ok(SymmetricBasisState { n, w, state })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }
}

/// `(1/p) Σₖ (|ψₖ⟩⟨ψₖ|)^{⊗n}` over the `p` discrete phases.
pub fn averaged_key_operator_discrete(p: u64, n_copies: usize) -> Result<DensityOperator> {
    if p < 2 {
        return Err(Error::InvalidParams(format!("phase modulus {p} < 2")));
    }
    check_operator_size(n_copies)?;
    let dim = 1usize << n_copies;
    let mut sum = CMatrix::zeros(dim, dim);
    for k in 1..=p {
        let single = public_key_state(&PhaseFraction::new(k, p)?).state;
        let mut copies = single.clone();
        for _ in 1..n_copies {
            copies = copies.tensor(&single);
        }
        sum += copies.projector();
    }
    Ok(DensityOperator::from_parts(vec![2; n_copies], sum * c(1.0 / p as f64, 0.0)))
}

/// `(1/2ⁿ) Σ_w C(n, w) |Sⁿ_w⟩⟨Sⁿ_w|`.
pub fn symmetric_mixture(n: usize) -> Result<DensityOperator> {
    check_operator_size(n)?;
    let dim = 1usize << n;
    let mut sum = CMatrix::zeros(dim, dim);
    for w in 0..=n {
        let weight = binomial(n as u64, w as u64) / 2f64.powi(n as i32);
        sum += SymmetricBasisState::new(n, w)?.state.projector() * c(weight, 0.0);
    }
    Ok(DensityOperator::from_parts(vec![2; n], sum))
}

fn check_operator_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_OPERATOR_QUBITS {
        return Err(Error::InvalidParams(format!(
            "operator on {n} qubits (supported 1..={MAX_OPERATOR_QUBITS})"
        )));
    }
    Ok(())
}

/// `(1/p) Σ_{k=1}^{p} e^{2πiak/p}` evaluated numerically, without snapping.
pub fn phase_average_exponential_raw(a: i64, p: u64) -> Result<C64> {
    if p < 2 {
        return Err(Error::InvalidParams(format!("phase modulus {p} < 2")));
    }
    let modulus = p as i64;
    let sum: C64 = (1..=modulus)
        .map(|k| phase(TAU * (a * k).rem_euclid(modulus) as f64 / p as f64))
        .sum();
    Ok(sum / p as f64)
}

/// The discrete phase average, which is exactly 1 when `p | a` and 0 otherwise.
/// Fails if the numerical sum is not within tolerance of either value.
pub fn phase_average_exponential(a: i64, p: u64) -> Result<f64> {
    let raw = phase_average_exponential_raw(a, p)?;
    let snapped = raw.re.round();
    if raw.im.abs() >= tolerance::CONSTRUCTION
        || (raw.re - snapped).abs() >= tolerance::CONSTRUCTION
        || !(snapped == 0.0 || snapped == 1.0)
    {
        return Err(Error::Numerical(format!("phase average of a={a}, p={p} evaluated to {raw}")));
    }
    Ok(snapped)
}

/// Private key file contents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub r: u64,
    pub s: u64,
    pub variant: Variant,
    pub seed: u64,
    pub xs: Vec<u64>,
    pub p: u64,
}

impl KeyFile {
    pub fn new(params: &ProtocolParams, seed: u64, key: &PrivateKey) -> Self {
        KeyFile {
            r: params.r(),
            s: params.s(),
            variant: params.variant(),
            seed,
            xs: key.indices(),
            p: params.p(),
        }
    }

    pub fn params(&self) -> Result<ProtocolParams> {
        let params = ProtocolParams::new(self.r, self.s, self.variant)?;
        if params.p() != self.p || self.xs.len() as u64 != self.s {
            return Err(Error::InvalidParams("key file fields are inconsistent".into()));
        }
        Ok(params)
    }

    pub fn private_key(&self) -> Result<PrivateKey> {
        self.params()?;
        PrivateKey::from_indices(self.p, &self.xs)
    }
}

/// What may be published about a key. Phases appear only when explicitly exposed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicKeyExport {
    pub p: u64,
    pub xs_redacted: bool,
    pub elements: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub xs: Option<Vec<u64>>,
}

impl PublicKeyExport {
    pub fn new(key: &PrivateKey, expose_phases: bool) -> Self {
        PublicKeyExport {
            p: key.p(),
            xs_redacted: !expose_phases,
            elements: key.len() as u64,
            xs: expose_phases.then(|| key.indices()),
        }
    }
}
